//! Experiment driver for the `trochoid` command: configs, figure presets,
//! flip-probability calibration, verification reports and SVG rendering.

pub mod calibrate;
pub mod config;
pub mod error;
pub mod experiment;
pub mod presets;
pub mod svg;

pub use calibrate::{calibrate_flip_prob, Calibration};
pub use config::{BoundarySelection, BoundarySpec, ExperimentConfig, Outputs};
pub use error::{CliError, Result};
pub use experiment::{run_generate, run_moments, run_verify, Metadata, SpectrumReport};
pub use presets::FigurePreset;
pub use svg::{render_svg, render_svg_files};

use trochoid::ensemble::EnsembleSpec;

/// Runs the preset's calibration, if any, and returns the ready config with
/// the calibrated flip probability filled in.
pub fn prepare_preset(
    preset: FigurePreset,
    seeds: Option<Vec<u64>>,
) -> Result<(ExperimentConfig, Metadata)> {
    let mut cfg = preset.config();
    if let Some(seeds) = seeds {
        cfg.seeds = seeds;
    }
    let mut meta = Metadata { preset: Some(preset.name().to_string()), calibration: None };
    if let (Some(target), EnsembleSpec::DenseCyclic(spec)) = (preset.calibration(), &mut cfg.ensemble) {
        let cal = calibrate_flip_prob(spec.n, target.k, target.rho, &target.seeds)?;
        spec.flip_prob = cal.flip_prob;
        meta.calibration = Some(cal);
    }
    Ok((cfg, meta))
}
