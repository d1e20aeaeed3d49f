//! Command-line driver: runs scenario grids and writes aggregated CSVs.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use teamnorms_core::engine::run_seed;
use teamnorms_core::experiments::ConfigFile;
use teamnorms_core::{run_grid, write_csv, Error, Figure, RunState, ScenarioGrid};

const DEFAULT_RUNS: usize = 1000;

#[derive(Parser)]
#[command(name = "teamnorms", version, about = "Team search on NK(C,S) landscapes with descriptive norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid described by a config file.
    Simulate {
        /// TOML scenario file (see configs/table1.toml).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a predefined sweep.
    Sweep {
        /// main | degree | rho | nsoc
        #[arg(long)]
        figure: String,
        /// Optional TOML file overriding the base scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Replications per cell (overrides the config file).
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write the first run's landscape of every cell to <out>/landscapes/.
    #[arg(long)]
    dump_landscape: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    let (grid, common, name) = match command {
        Command::Simulate { config, common } => {
            let file = ConfigFile::load(&config)?;
            (file.to_grid(DEFAULT_RUNS)?, common, "results".to_string())
        }
        Command::Sweep { figure, config, common } => {
            let figure: Figure = figure.parse()?;
            let file = match config {
                Some(path) => ConfigFile::load(&path)?,
                None => ConfigFile::default(),
            };
            let base = file.base_params()?;
            let mut grid = ScenarioGrid::figure(figure, base, file.runs.unwrap_or(DEFAULT_RUNS));
            if let Some(c) = file.confidence {
                grid.confidence = c;
            }
            (grid, common, figure.name().to_string())
        }
    };
    run_and_write(grid, &common, &name)
}

fn run_and_write(mut grid: ScenarioGrid, common: &Common, name: &str) -> Result<(), Error> {
    if let Some(runs) = common.runs {
        grid.runs = runs;
    }
    if let Some(seed) = common.seed {
        grid.base.seed = seed;
    }
    grid.validate()?;
    let workers = common
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    fs::create_dir_all(&common.out).map_err(|e| Error::Io {
        path: common.out.clone(),
        source: e,
    })?;
    if common.dump_landscape {
        dump_landscapes(&grid, &common.out.join("landscapes"))?;
    }
    let cells = grid.cells()?.len();
    eprintln!("{name}: {cells} cells x {} runs on {workers} workers", grid.runs);
    let started = Instant::now();
    let results = run_grid(&grid, workers)?;
    let path = common.out.join(format!("{name}.csv"));
    write_csv(&results, &path)?;
    eprintln!("wrote {} in {:.1}s", path.display(), started.elapsed().as_secs_f64());
    for r in &results {
        let tail = r.series.tail(100);
        eprintln!("  {:<40} final-100 mean {:.4} ± {:.4}", r.cell.id, tail.mean, tail.half_width);
    }
    Ok(())
}

fn dump_landscapes(grid: &ScenarioGrid, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    for cell in grid.cells()? {
        let seed = run_seed(&cell.params, 0);
        let state = RunState::init(&cell.params, seed)?;
        let path = dir.join(format!("{}.txt", cell.id));
        let file = fs::File::create(&path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        state
            .landscape()
            .dump(seed, BufWriter::new(file))
            .map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}
