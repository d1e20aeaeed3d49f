use std::path::Path;

use serde::Deserialize;

use super::grid::{Complexity, ScenarioGrid};
use crate::engine::ScenarioParams;
use crate::error::{Error, Result};
use crate::team::{DecisionWeights, IncentiveScheme};

/// On-disk scenario configuration (TOML).
///
/// Top-level keys set replication options, `[base]` overrides single
/// scenario parameters and `[grid]` lists swept values. Every key is
/// optional; see `configs/table1.toml` for the full template.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub base: BaseSection,
    pub grid: GridSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseSection {
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub c: Option<usize>,
    pub s: Option<usize>,
    pub rho: Option<f64>,
    pub t_l: Option<usize>,
    pub n_s: Option<usize>,
    pub d: Option<usize>,
    pub t_max: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// `[K, C, S]` triples.
    pub complexities: Option<Vec<[usize; 3]>>,
    /// `[alpha, beta]` pairs.
    pub schemes: Option<Vec<[f64; 2]>>,
    /// `[w1, w2]` pairs.
    pub weights: Option<Vec<[f64; 2]>>,
    pub degrees: Option<Vec<usize>>,
    pub social_tasks: Option<Vec<usize>>,
    pub rhos: Option<Vec<f64>>,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Param(msg) => Error::Config(msg),
        other => other,
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Base scenario: defaults overridden by `[base]` and the top-level seed.
    pub fn base_params(&self) -> Result<ScenarioParams> {
        let d = ScenarioParams::default();
        let b = &self.base;
        let p = b.p.unwrap_or(d.p);
        let n = b.n.unwrap_or(d.n);
        let alpha = b.alpha.unwrap_or_else(|| b.beta.map_or(d.scheme.alpha(), |beta| 1.0 - beta));
        let beta = b.beta.unwrap_or(1.0 - alpha);
        let w1 = b.w1.unwrap_or_else(|| b.w2.map_or(d.weights.w1(), |w2| 1.0 - w2));
        let w2 = b.w2.unwrap_or(1.0 - w1);
        Ok(ScenarioParams {
            m: b.m.unwrap_or(p * n),
            p,
            n,
            k: b.k.unwrap_or(d.k),
            c: b.c.unwrap_or(d.c),
            s: b.s.unwrap_or(d.s),
            rho: b.rho.unwrap_or(d.rho),
            t_l: b.t_l.unwrap_or(d.t_l),
            n_s: b.n_s.unwrap_or(d.n_s),
            d: b.d.unwrap_or(d.d),
            t_max: b.t_max.unwrap_or(d.t_max),
            scheme: IncentiveScheme::new(alpha, beta).map_err(config_err)?,
            weights: DecisionWeights::new(w1, w2).map_err(config_err)?,
            seed: self.seed.unwrap_or(d.seed),
        })
    }

    /// The grid described by this file; `default_runs` applies when the file
    /// names no run count.
    pub fn to_grid(&self, default_runs: usize) -> Result<ScenarioGrid> {
        let base = self.base_params()?;
        let mut grid = ScenarioGrid::single(base, self.runs.unwrap_or(default_runs));
        let g = &self.grid;
        if let Some(list) = &g.complexities {
            grid.complexities = list.iter().map(|&[k, c, s]| Complexity { k, c, s }).collect();
        }
        if let Some(list) = &g.schemes {
            grid.schemes = list
                .iter()
                .map(|&[a, b]| IncentiveScheme::new(a, b))
                .collect::<Result<_>>()
                .map_err(config_err)?;
        }
        if let Some(list) = &g.weights {
            grid.weights = list
                .iter()
                .map(|&[a, b]| DecisionWeights::new(a, b))
                .collect::<Result<_>>()
                .map_err(config_err)?;
        }
        if let Some(list) = &g.degrees {
            grid.degrees = list.clone();
        }
        if let Some(list) = &g.social_tasks {
            grid.social_tasks = list.clone();
        }
        if let Some(list) = &g.rhos {
            grid.rhos = list.clone();
        }
        if let Some(c) = self.confidence {
            grid.confidence = c;
        }
        grid.validate().map_err(config_err)?;
        Ok(grid)
    }
}
