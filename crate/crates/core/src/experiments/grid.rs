use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::stats::{aggregate, AggregateSeries};
use crate::engine::{run, run_seed, ScenarioParams};
use crate::error::{Error, Result};
use crate::team::{DecisionWeights, IncentiveScheme};

/// Internal and external coupling counts `[K, C, S]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Complexity {
    pub k: usize,
    pub c: usize,
    pub s: usize,
}

impl Complexity {
    pub const LOW: Complexity = Complexity { k: 2, c: 0, s: 0 };
    pub const HIGH: Complexity = Complexity { k: 2, c: 2, s: 2 };
}

/// Canonical cell identifier, e.g. `K2C0S0_a1_w0.5_d2_ns2_rho0.3`.
pub fn scenario_id(p: &ScenarioParams) -> String {
    format!(
        "K{}C{}S{}_a{}_w{}_d{}_ns{}_rho{}",
        p.k,
        p.c,
        p.s,
        p.scheme.alpha(),
        p.weights.w2(),
        p.d,
        p.n_s,
        p.rho
    )
}

/// Predefined sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Both complexities × three incentive schemes × three decision weights.
    Main,
    /// Network degree sweep.
    Degree,
    /// Landscape correlation sweep.
    Rho,
    /// Social task count sweep.
    Nsoc,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Main, Figure::Degree, Figure::Rho, Figure::Nsoc];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Main => "main",
            Figure::Degree => "degree",
            Figure::Rho => "rho",
            Figure::Nsoc => "nsoc",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure {s:?} (expected main, degree, rho or nsoc)")))
    }
}

/// Cross product of swept values over a base scenario.
///
/// Cells are enumerated with `complexities` outermost, then `schemes`,
/// `weights`, `degrees`, `social_tasks` and `rhos` innermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGrid {
    pub base: ScenarioParams,
    pub complexities: Vec<Complexity>,
    pub schemes: Vec<IncentiveScheme>,
    pub weights: Vec<DecisionWeights>,
    pub degrees: Vec<usize>,
    pub social_tasks: Vec<usize>,
    pub rhos: Vec<f64>,
    pub runs: usize,
    pub confidence: f64,
}

/// One scenario of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub id: String,
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: GridCell,
    pub series: AggregateSeries,
}

fn schemes_table() -> Vec<IncentiveScheme> {
    [(1.0, 0.0), (0.75, 0.25), (0.25, 0.75)]
        .into_iter()
        .map(|(a, b)| IncentiveScheme::new(a, b).expect("valid scheme"))
        .collect()
}

fn weights_of(pairs: &[(f64, f64)]) -> Vec<DecisionWeights> {
    pairs
        .iter()
        .map(|&(a, b)| DecisionWeights::new(a, b).expect("valid weights"))
        .collect()
}

impl ScenarioGrid {
    /// A grid with exactly one cell: `base`.
    pub fn single(base: ScenarioParams, runs: usize) -> Self {
        ScenarioGrid {
            complexities: vec![Complexity {
                k: base.k,
                c: base.c,
                s: base.s,
            }],
            schemes: vec![base.scheme],
            weights: vec![base.weights],
            degrees: vec![base.d],
            social_tasks: vec![base.n_s],
            rhos: vec![base.rho],
            base,
            runs,
            confidence: 0.999,
        }
    }

    /// The predefined sweep for `figure` around `base`.
    ///
    /// The sensitivity sweeps hold `alpha = 1` and compare `w = (0.5, 0.5)`
    /// against the no-norm benchmark `w = (1, 0)`.
    pub fn figure(figure: Figure, base: ScenarioParams, runs: usize) -> Self {
        let mut grid = ScenarioGrid::single(base, runs);
        grid.complexities = vec![Complexity::LOW, Complexity::HIGH];
        match figure {
            Figure::Main => {
                grid.schemes = schemes_table();
                grid.weights = weights_of(&[(1.0, 0.0), (0.7, 0.3), (0.5, 0.5)]);
            }
            Figure::Degree | Figure::Rho | Figure::Nsoc => {
                grid.schemes = vec![IncentiveScheme::individual()];
                grid.weights = weights_of(&[(1.0, 0.0), (0.5, 0.5)]);
                match figure {
                    Figure::Degree => grid.degrees = vec![0, 1, 2, 3],
                    Figure::Rho => grid.rhos = vec![0.0, 0.3, 0.6, 0.9, 0.95],
                    Figure::Nsoc => grid.social_tasks = vec![0, 1, 2, 3, 4],
                    Figure::Main => unreachable!(),
                }
            }
        }
        grid
    }

    /// All cells in declaration order, each validated.
    pub fn cells(&self) -> Result<Vec<GridCell>> {
        let mut cells = Vec::new();
        for cx in &self.complexities {
            for scheme in &self.schemes {
                for weights in &self.weights {
                    for &d in &self.degrees {
                        for &n_s in &self.social_tasks {
                            for &rho in &self.rhos {
                                let params = ScenarioParams {
                                    k: cx.k,
                                    c: cx.c,
                                    s: cx.s,
                                    scheme: *scheme,
                                    weights: *weights,
                                    d,
                                    n_s,
                                    rho,
                                    ..self.base.clone()
                                };
                                let id = scenario_id(&params);
                                params.validate().map_err(|e| Error::Cell {
                                    id: id.clone(),
                                    source: Box::new(e),
                                })?;
                                cells.push(GridCell { id, params });
                            }
                        }
                    }
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::Config("scenario grid has no cells".into()));
        }
        Ok(cells)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 2 {
            return Err(Error::param(format!("need at least 2 runs per cell, got {}", self.runs)));
        }
        super::stats::normal_quantile(self.confidence)?;
        self.cells().map(|_| ())
    }
}

/// Runs every cell of `grid` on a pool of `parallelism` workers and
/// aggregates each cell. Output does not depend on `parallelism`.
pub fn run_grid(grid: &ScenarioGrid, parallelism: usize) -> Result<Vec<CellResult>> {
    grid.validate()?;
    let cells = grid.cells()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let runs = grid.runs;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();
    let traces: Vec<Result<Vec<f64>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                let params = &cells[c].params;
                run(params, run_seed(params, r)).map(|t| t.series)
            })
            .collect()
    });
    let mut traces = traces.into_iter();
    cells
        .into_iter()
        .map(|cell| {
            let rows = traces
                .by_ref()
                .take(runs)
                .collect::<Result<Vec<_>>>()
                .and_then(|rows| aggregate(&rows, grid.confidence));
            match rows {
                Ok(series) => Ok(CellResult { cell, series }),
                Err(e) => Err(Error::Cell {
                    id: cell.id,
                    source: Box::new(e),
                }),
            }
        })
        .collect()
}
