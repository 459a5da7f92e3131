//! `fracmass`: experiment runner for fractional energies of S¹-valued maps around
//! codimension-two surfaces.

mod commands;
mod config;
mod output;

use clap::{CommandFactory, Parser, Subcommand};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fracmass", version, about = "Fractional mass experiments", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// JSON experiment config; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated, strictly increasing values in (0,1).
    #[arg(long, global = true, value_delimiter = ',')]
    s_grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Grid or lattice step.
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    r_cut: Option<f64>,
    /// Truncation T of the vortex-limit integrals.
    #[arg(long, global = true)]
    truncation: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    degrees: Option<Vec<i32>>,
    /// Slab half-width δ.
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Random circle pairs for the linking comparison.
    #[arg(long, global = true)]
    configurations: Option<usize>,
    /// Loops per degree audit.
    #[arg(long, global = true)]
    loops: Option<usize>,
    #[arg(long, global = true)]
    step: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    delta_pin: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Random lattice fields for the E ≥ GL check.
    #[arg(long, global = true)]
    instances: Option<usize>,
}

const AFTER_HELP: &str = "The seed can also be set with the FRACMASS_SEED environment variable; \
a --seed flag takes precedence over it, and it takes precedence over the config file.";

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// (1-s)² energy of the planar vortex against 2π².
    VortexLimit,
    /// Inner and cross energies of the slab vortex.
    Slab,
    /// Competitor energy over an s-grid against the limit constant.
    Mass,
    /// Lattice minimization from the competitor, with degree audits.
    Minimize,
    /// Gauss linking, intersection counts and competitor degrees.
    Link,
    /// Crofton line-intersection check in the plane.
    Crofton,
    /// Fourier constant of the fractional seminorm.
    FourierConst,
    /// Lattice energies, the E ≥ GL check and edge statistics.
    Discrete,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VortexLimit => "vortex-limit",
            Command::Slab => "slab",
            Command::Mass => "mass",
            Command::Minimize => "minimize",
            Command::Link => "link",
            Command::Crofton => "crofton",
            Command::FourierConst => "fourier-const",
            Command::Discrete => "discrete",
        }
    }
}

impl Cli {
    fn flags(&self) -> ExperimentConfig {
        ExperimentConfig {
            command: self.command.map(|c| c.name().to_string()),
            seed: self.seed,
            threads: self.threads,
            out_dir: self.out.clone(),
            s_grid: self.s_grid.clone(),
            samples: self.samples,
            h: self.h,
            r_cut: self.r_cut,
            truncation: self.truncation,
            tolerance: self.tolerance,
            degrees: self.degrees.clone(),
            delta: self.delta,
            dims: self.dims.clone(),
            alpha: self.alpha,
            configurations: self.configurations,
            loops: self.loops,
            step: self.step,
            max_iter: self.max_iter,
            tol: self.tol,
            delta_pin: self.delta_pin,
            eps: self.eps.clone(),
            instances: self.instances,
            ..ExperimentConfig::default()
        }
    }
}

fn usage() -> ExitCode {
    eprintln!("{}", Cli::command().render_help());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Err(e) = cfg.apply_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    cfg.overlay(&cli.flags());
    let Some(command) = cfg.command.clone() else {
        return usage();
    };
    if !commands::COMMANDS.contains(&command.as_str()) {
        eprintln!("error: invalid config: command: unknown command {command:?}");
        return ExitCode::from(2);
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let mut sink = match output::Sink::new(cfg.out_dir()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cfg, &mut sink) {
        Ok(()) => {
            for p in &sink.written {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
