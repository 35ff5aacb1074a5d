use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use trochoid_cli::experiment::{density_field, resolve_boundary, write_boundary, write_density};
use trochoid_cli::{
    calibrate_flip_prob, prepare_preset, render_svg_files, run_generate, run_moments, run_verify,
    CliError, ExperimentConfig, FigurePreset, Metadata, Result,
};

#[derive(Parser)]
#[command(name = "trochoid", version, about = "Spectra of random matrices with cyclic correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// JSON experiment config.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Seeds to run; replaces the config's list.
    #[arg(long = "seed", value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    inflation: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    /// Boundary sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Keep deterministic row-sum eigenvalues in the containment count.
    #[arg(long)]
    keep_outliers: bool,
    #[arg(long)]
    no_moments: bool,
    /// Directory for CSV and SVG artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write one SVG per seed into `--out`.
    #[arg(long)]
    svg: bool,
}

impl Overrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        if let Some(x) = self.inflation {
            cfg.inflation = x;
        }
        if let Some(x) = self.scale {
            cfg.scale = x;
        }
        if let Some(x) = self.samples {
            cfg.samples = x;
        }
        if self.keep_outliers {
            cfg.exclude_outliers = false;
        }
        if self.no_moments {
            cfg.moments = false;
        }
        if self.out.is_some() {
            cfg.outputs.dir = self.out.clone();
        }
        if self.report.is_some() {
            cfg.outputs.report = self.report.clone();
        }
        if self.svg {
            cfg.outputs.svg = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let path = self.config.as_ref().ok_or_else(|| CliError::config("--config is required"))?;
        self.apply(ExperimentConfig::load(path)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write Matrix Market files (and cycle sidecars) for every seed.
    Generate {
        #[command(flatten)]
        flags: Overrides,
    },
    /// Write the predicted boundary curve as `phi,re,im` CSV.
    Boundary {
        #[command(flatten)]
        flags: Overrides,
        /// Also write the interior density of a dense law as `re,im,mu` CSV.
        #[arg(long)]
        density: Option<PathBuf>,
        /// Density grid size per axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Generate, solve and check containment, symmetry and moments.
    Verify {
        #[command(flatten)]
        flags: Overrides,
    },
    /// Trace-moment comparisons without eigensolves.
    Moments {
        #[command(flatten)]
        flags: Overrides,
    },
    /// Render a spectrum CSV and boundary CSV to SVG.
    Render {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Find the flip probability giving a target mean `Tr M^k / n`.
    Calibrate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        #[arg(long = "seed", value_delimiter = ',', default_values_t = [0u64, 1])]
        seeds: Vec<u64>,
    },
    /// Run (or print) one of the figure presets.
    Preset {
        name: String,
        /// Print the preset config instead of running it.
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        flags: Overrides,
    },
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::file(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::file(Path::new("<stdout>"), e)),
    }
}

fn verify(cfg: &ExperimentConfig, meta: Metadata) -> Result<()> {
    let report = run_verify(cfg, meta)?;
    emit(&report, cfg.outputs.report.as_deref())?;
    if report.aggregate.seeds_ok == 0 {
        return Err(CliError::Core(trochoid::Error::GenerationFailure("every seed failed".into())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { flags } => {
            let cfg = flags.load()?;
            let dir = cfg.outputs.dir.clone().ok_or_else(|| CliError::config("--out is required"))?;
            emit(&run_generate(&cfg, &dir)?, None)
        }
        Command::Boundary { flags, density, grid } => {
            let cfg = flags.load()?;
            let (spec, curve) = resolve_boundary(&cfg)?;
            if let Some(path) = &density {
                write_density(&density_field(&spec, &curve, grid, grid)?, path)?;
            }
            match &flags.out {
                Some(path) => write_boundary(&curve, path),
                None => Ok(trochoid::io::write_curve_csv(&curve, std::io::stdout().lock())?),
            }
        }
        Command::Verify { flags } => verify(&flags.load()?, Metadata::default()),
        Command::Moments { flags } => {
            let cfg = flags.load()?;
            emit(&run_moments(&cfg)?, cfg.outputs.report.as_deref())
        }
        Command::Render { spectrum, boundary, out } => render_svg_files(&spectrum, boundary.as_deref(), &out),
        Command::Calibrate { n, k, target, seeds } => emit(&calibrate_flip_prob(n, k, target, &seeds)?, None),
        Command::Preset { name, print, flags } => {
            let preset: FigurePreset = name.parse()?;
            if print {
                let cfg = flags.apply(preset.config())?;
                return emit(&serde_json::json!({"preset": preset.name(), "description": preset.description(),
                    "calibration": preset.calibration(), "config": cfg}), None);
            }
            let (cfg, meta) = prepare_preset(preset, None)?;
            verify(&flags.apply(cfg)?, meta)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("TROCHOID_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::config(format!("TROCHOID_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(e.to_string().trim().to_string());
            eprintln!("{}", serde_json::to_string(&err.report()).unwrap_or_default());
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.report()).unwrap_or_default());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
