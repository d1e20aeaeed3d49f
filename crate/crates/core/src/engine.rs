//! Per-period schedule, single runs and replication.
//!
//! Each period `t`:
//!
//! 1. every memory drops records older than the window,
//! 2. every agent proposes a one-bit flip of its own block of `x_{t-1}` and
//!    keeps whichever of status quo and candidate scores higher,
//! 3. all chosen blocks are written at once to form `x_t`,
//! 4. agents share their period-`t` social bits over the network,
//! 5. the normalized team performance of `x_t` is recorded.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::{self, InteractionStructure, Landscape, TeamConfig};
use crate::norms::{NormMemory, SocialNetwork};
use crate::seed::{self, Stream};
use crate::team::{choose, propose_flip, DecisionContext, DecisionWeights, IncentiveScheme};

/// Every model parameter of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub m: usize,
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub s: usize,
    pub rho: f64,
    /// Memory span `T_L`.
    pub t_l: usize,
    /// Social tasks per agent `N_S`.
    pub n_s: usize,
    /// Network degree `D`.
    pub d: usize,
    /// Observation period `T`.
    pub t_max: usize,
    pub scheme: IncentiveScheme,
    pub weights: DecisionWeights,
    pub seed: u64,
}

impl Default for ScenarioParams {
    /// Low complexity, individual incentives, no norms; the other values are
    /// the baseline team of four agents with four tasks each.
    fn default() -> Self {
        ScenarioParams {
            m: 16,
            p: 4,
            n: 4,
            k: 2,
            c: 0,
            s: 0,
            rho: 0.3,
            t_l: 50,
            n_s: 2,
            d: 2,
            t_max: 500,
            scheme: IncentiveScheme::individual(),
            weights: DecisionWeights::incentives_only(),
            seed: 0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.m != self.p * self.n {
            return Err(Error::param(format!("M={} must equal P*N={}", self.m, self.p * self.n)));
        }
        if self.n_s > self.n {
            return Err(Error::param(format!("N_S={} exceeds N={}", self.n_s, self.n)));
        }
        if self.t_max == 0 {
            return Err(Error::param("T must be at least 1"));
        }
        if self.t_l >= self.t_max {
            return Err(Error::param(format!("T_L={} must be below T={}", self.t_l, self.t_max)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::param(format!("rho={} outside [0, 1]", self.rho)));
        }
        if self.p < 2 && self.scheme.beta() > 0.0 {
            return Err(Error::param("a residual incentive needs at least two agents"));
        }
        landscape::check_shape(self.p, self.n, self.k, self.c, self.s)?;
        SocialNetwork::new(self.p, self.d)?;
        Ok(())
    }
}

/// Normalized performance trajectory of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// `series[t - 1]` is the normalized team performance after period `t`.
    pub series: Vec<f64>,
    pub final_config: TeamConfig,
    pub seed: u64,
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct RunState {
    params: ScenarioParams,
    run_seed: u64,
    landscape: Landscape,
    network: SocialNetwork,
    config: TeamConfig,
    memories: Vec<NormMemory>,
    agent_rngs: Vec<ChaCha8Rng>,
    period: usize,
    series: Vec<f64>,
}

impl RunState {
    /// Fresh landscape, uniform random starting configuration, empty
    /// memories, period 1.
    pub fn init(params: &ScenarioParams, run_seed: u64) -> Result<Self> {
        params.validate()?;
        let mut land_rng = seed::stream(run_seed, Stream::Landscape);
        let structure = InteractionStructure::build(params.p, params.n, params.k, params.c, params.s, &mut land_rng)?;
        let landscape = Landscape::build(structure, params.rho, &mut land_rng)?;
        Self::with_landscape(params, run_seed, landscape)
    }

    /// Like [`RunState::init`] but on a caller-supplied landscape.
    pub fn with_landscape(params: &ScenarioParams, run_seed: u64, landscape: Landscape) -> Result<Self> {
        params.validate()?;
        let st = landscape.structure();
        if st.p() != params.p || st.n() != params.n {
            return Err(Error::param("landscape shape does not match the scenario"));
        }
        let mut init_rng = seed::stream(run_seed, Stream::InitialConfig);
        let config = TeamConfig::from_mask(init_rng.random::<u64>(), params.m, params.n);
        Ok(RunState {
            network: SocialNetwork::new(params.p, params.d)?,
            memories: vec![NormMemory::new(); params.p],
            agent_rngs: (0..params.p).map(|a| seed::stream(run_seed, Stream::Agent(a))).collect(),
            params: params.clone(),
            run_seed,
            landscape,
            config,
            period: 1,
            series: Vec::with_capacity(params.t_max),
        })
    }

    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }

    pub fn landscape(&self) -> &Landscape {
        &self.landscape
    }

    pub fn config(&self) -> TeamConfig {
        self.config
    }

    pub fn memories(&self) -> &[NormMemory] {
        &self.memories
    }

    /// The period the next [`RunState::step`] will execute.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn series(&self) -> &[f64] {
        &self.series
    }

    pub fn is_finished(&self) -> bool {
        self.period > self.params.t_max
    }

    /// Agent `p`'s decision for the current period, reading only `x_{t-1}`
    /// and its own memory. Advances `p`'s proposal stream.
    fn decide(&mut self, p: usize) -> TeamConfig {
        let candidate = propose_flip(p, &self.config, &mut self.agent_rngs[p]);
        let ctx = DecisionContext {
            land: &self.landscape,
            scheme: self.params.scheme,
            weights: self.params.weights,
            memory: &self.memories[p],
            period: self.period,
            memory_span: self.params.t_l,
            social_tasks: self.params.n_s,
        };
        choose(p, self.config, candidate, &ctx)
    }

    /// Executes one period.
    pub fn step(&mut self) {
        let order: Vec<usize> = (0..self.params.p).collect();
        self.step_in_order(&order);
    }

    /// Executes one period, visiting agents in `order` (a permutation of
    /// `0..P`). Decisions all read `x_{t-1}`, so the order cannot change the
    /// outcome.
    pub fn step_in_order(&mut self, order: &[usize]) {
        assert!(!self.is_finished(), "run already finished");
        let mut seen = vec![false; self.params.p];
        for &p in order {
            assert!(!std::mem::replace(&mut seen[p], true), "agent {p} listed twice");
        }
        assert!(seen.iter().all(|&x| x), "order must cover every agent");
        let t = self.period;
        for memory in &mut self.memories {
            memory.expire(t, self.params.t_l);
        }
        let mut next = self.config;
        for &p in order {
            next = self.decide(p).splice_block(p, &next);
        }
        self.config = next;
        self.network.share(t, &next, self.params.n_s, &mut self.memories);
        self.series
            .push(self.landscape.team_performance(&next) / self.landscape.global_max());
        self.period += 1;
    }

    pub fn finish(self) -> RunTrace {
        RunTrace {
            series: self.series,
            final_config: self.config,
            seed: self.run_seed,
        }
    }
}

/// One full run of `params.t_max` periods.
pub fn run(params: &ScenarioParams, run_seed: u64) -> Result<RunTrace> {
    let mut state = RunState::init(params, run_seed)?;
    while !state.is_finished() {
        state.step();
    }
    Ok(state.finish())
}

/// Seed of replication `index` under `params.seed`.
pub fn run_seed(params: &ScenarioParams, index: usize) -> u64 {
    seed::derive(params.seed, index as u64)
}

/// `runs × T` matrix of normalized performance; row `i` is the run seeded
/// with [`run_seed`]`(params, i)`. Runs execute on the current rayon pool.
pub fn replicate(params: &ScenarioParams, runs: usize) -> Result<Vec<Vec<f64>>> {
    if runs == 0 {
        return Err(Error::param("need at least one run"));
    }
    params.validate()?;
    (0..runs)
        .into_par_iter()
        .map(|i| run(params, run_seed(params, i)).map(|trace| trace.series))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioParams {
        ScenarioParams {
            t_max: 120,
            t_l: 10,
            ..ScenarioParams::default()
        }
    }

    #[test]
    fn defaults_validate() {
        ScenarioParams::default().validate().unwrap();
    }

    #[test]
    fn invalid_params() {
        let bad = [
            ScenarioParams { m: 12, ..small() },
            ScenarioParams { n_s: 5, ..small() },
            ScenarioParams { t_l: 120, ..small() },
            ScenarioParams { rho: 1.1, ..small() },
            ScenarioParams { k: 4, ..small() },
            ScenarioParams { c: 2, s: 4, ..small() },
            ScenarioParams { d: 5, ..small() },
            ScenarioParams { p: 6, m: 24, ..small() },
        ];
        for b in bad {
            assert!(b.validate().is_err(), "{b:?}");
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a = RunState::init(&small(), 17).unwrap();
        let b = RunState::init(&small(), 17).unwrap();
        assert_eq!(a.config(), b.config());
        assert_eq!(a.landscape().structure(), b.landscape().structure());
        assert_eq!(a.landscape().global_max(), b.landscape().global_max());
        assert!(a.memories().iter().all(NormMemory::is_empty));
        assert_eq!(a.period(), 1);
    }

    #[test]
    fn initial_bits_are_fair() {
        let params = ScenarioParams { k: 0, ..small() };
        let inits = 10_000;
        let mut ones = [0usize; 16];
        for i in 0..inits {
            let mut rng = seed::stream(seed::derive(3, i), Stream::InitialConfig);
            let cfg = TeamConfig::from_mask(rng.random::<u64>(), params.m, params.n);
            for (b, count) in ones.iter_mut().enumerate() {
                *count += cfg.bit(b) as usize;
            }
        }
        for count in ones {
            assert!((count as f64 / inits as f64 - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn at_most_one_flip_per_agent() {
        let params = ScenarioParams {
            c: 2,
            s: 2,
            weights: DecisionWeights::new(0.5, 0.5).unwrap(),
            ..small()
        };
        let mut state = RunState::init(&params, 5).unwrap();
        while !state.is_finished() {
            let before = state.config();
            state.step();
            let after = state.config();
            for p in 0..4 {
                let changed = before.block(p).filter(|&i| before.bit(i) != after.bit(i)).count();
                assert!(changed <= 1);
            }
        }
    }

    #[test]
    fn separable_greedy_climb_never_declines() {
        let params = ScenarioParams { k: 0, ..small() };
        for seed in 0..20 {
            let trace = run(&params, seed).unwrap();
            assert!(trace.series.windows(2).all(|w| w[1] >= w[0]), "seed {seed}");
            assert!(trace.series.iter().all(|&v| v > 0.0 && v <= 1.0));
        }
    }

    #[test]
    fn memory_fills_to_window() {
        let params = ScenarioParams {
            weights: DecisionWeights::new(0.7, 0.3).unwrap(),
            ..small()
        };
        let mut state = RunState::init(&params, 1).unwrap();
        for _ in 0..50 {
            state.step();
        }
        assert!(state.memories().iter().all(|m| m.len() == params.d * params.t_l));
    }

    #[test]
    fn run_and_replicate_agree() {
        let params = small();
        let rows = replicate(&params, 3).unwrap();
        assert_eq!(rows[0], run(&params, run_seed(&params, 0)).unwrap().series);
        assert_eq!(rows, replicate(&params, 3).unwrap());
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.len() == params.t_max));
    }
}
