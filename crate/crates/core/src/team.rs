//! Compensation and the one-bit decision rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::landscape::{Landscape, TeamConfig};
use crate::norms::{compliance, NormMemory};

const WEIGHT_TOLERANCE: f64 = 1e-12;

fn check_pair(name: &str, a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0) || (a + b - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::param(format!(
            "{name} weights ({a}, {b}) must be non-negative and sum to 1"
        )));
    }
    Ok(())
}

/// Linear incentive scheme: `alpha` on own performance, `beta` on the
/// residual performance of the rest of the team.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveScheme {
    alpha: f64,
    beta: f64,
}

impl IncentiveScheme {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_pair("incentive", alpha, beta)?;
        Ok(IncentiveScheme { alpha, beta })
    }

    /// Pure individual incentives (`alpha = 1`).
    pub fn individual() -> Self {
        IncentiveScheme { alpha: 1.0, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Weights of incentive payoff (`w1`) and norm compliance (`w2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionWeights {
    w1: f64,
    w2: f64,
}

impl DecisionWeights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        check_pair("decision", w1, w2)?;
        Ok(DecisionWeights { w1, w2 })
    }

    /// No weight on norms.
    pub fn incentives_only() -> Self {
        DecisionWeights { w1: 1.0, w2: 0.0 }
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }
}

/// Mean performance of every agent other than `p`.
pub fn residual_performance(land: &Landscape, p: usize, cfg: &TeamConfig) -> Result<f64> {
    let agents = land.structure().p();
    if agents < 2 {
        return Err(Error::param("residual performance needs at least two agents"));
    }
    let sum: f64 = (0..agents)
        .filter(|&q| q != p)
        .map(|q| land.agent_performance(q, cfg))
        .sum();
    Ok(sum / (agents - 1) as f64)
}

/// `alpha * own + beta * residual`. With a single agent the residual term is
/// dropped, which only matters when `beta > 0`.
pub fn incentive_payoff(land: &Landscape, p: usize, cfg: &TeamConfig, scheme: &IncentiveScheme) -> f64 {
    let own = land.agent_performance(p, cfg);
    if scheme.beta == 0.0 {
        return scheme.alpha * own;
    }
    let residual = residual_performance(land, p, cfg).unwrap_or(0.0);
    scheme.alpha * own + scheme.beta * residual
}

/// Flips one bit of agent `p`'s block, chosen uniformly.
pub fn propose_flip<R: Rng + ?Sized>(p: usize, cfg: &TeamConfig, rng: &mut R) -> TeamConfig {
    let n = cfg.block_size();
    let offset = rng.random_range(0..n);
    cfg.flip(p * n + offset)
}

/// Everything besides the two candidate configurations that the decision
/// rule reads.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub land: &'a Landscape,
    pub scheme: IncentiveScheme,
    pub weights: DecisionWeights,
    pub memory: &'a NormMemory,
    pub period: usize,
    pub memory_span: usize,
    pub social_tasks: usize,
}

impl DecisionContext<'_> {
    /// `w1 * incentive + w2 * compliance` for agent `p` under `cfg`.
    pub fn objective(&self, p: usize, cfg: &TeamConfig) -> f64 {
        let inc = incentive_payoff(self.land, p, cfg, &self.scheme);
        let soc = if self.weights.w2 == 0.0 {
            0.0
        } else {
            let social = crate::norms::SocialBits::of(cfg, p, self.social_tasks);
            compliance(&social, self.memory, self.period, self.memory_span)
        };
        self.weights.w1 * inc + self.weights.w2 * soc
    }
}

/// Picks between the status quo and the candidate for agent `p`; an exact
/// tie keeps the status quo.
pub fn choose(p: usize, status_quo: TeamConfig, candidate: TeamConfig, ctx: &DecisionContext<'_>) -> TeamConfig {
    if ctx.objective(p, &candidate) > ctx.objective(p, &status_quo) {
        candidate
    } else {
        status_quo
    }
}
