use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use trochoid::boundary::{interior_density, BoundaryCurve, BoundaryLaw, DensityField, GridSpec};
use trochoid::ensemble::{generate, EnsembleSpec, Sample};
use trochoid::io::{
    write_curve_csv, write_density_csv, write_matrix_market_dense, write_matrix_market_digraph,
    write_spectrum_csv, CycleSidecar,
};
use trochoid::spectra::{
    catalan_prefactor, compute_eigenvalues, conjugation_residual, containment,
    detect_deterministic_outliers, empirical_mixed_moment, fuss_catalan_prediction,
    printed_mixed_prefactor, pure_moment_from_spectrum, rotation_symmetry_residual, trace_moment,
    tree_walk_prediction, ContainmentReport, MomentOrder, MomentReport, Spectrum,
    MAX_MATCHING_SIZE,
};
use trochoid::{DenseMatrix, RandomSeed};

use crate::calibrate::Calibration;
use crate::config::{BoundarySelection, BoundarySpec, ExperimentConfig};
use crate::error::{CliError, ErrorReport, Result};

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CliError::file(path, e))?))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratedFiles {
    pub seed: u64,
    pub matrix: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
}

/// Writes `seed-S.mtx` for every seed, plus `seed-S.cycles.json` for
/// digraphs.
pub fn run_generate(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<GeneratedFiles>> {
    cfg.validate()?;
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for &seed in &cfg.seeds {
        let sample = generate(&cfg.ensemble, RandomSeed(seed))?;
        let matrix = dir.join(format!("seed-{seed}.mtx"));
        let mut sidecar = None;
        match &sample {
            Sample::Dense(m) => write_matrix_market_dense(m, create(&matrix)?)?,
            Sample::Digraph(g) => {
                write_matrix_market_digraph(g, create(&matrix)?)?;
                let path = dir.join(format!("seed-{seed}.cycles.json"));
                serde_json::to_writer(create(&path)?, &CycleSidecar::from(g))?;
                sidecar = Some(path);
            }
        }
        written.push(GeneratedFiles { seed, matrix, sidecar });
    }
    Ok(written)
}

/// How the predicted value of a moment is obtained.
#[derive(Clone, Debug, PartialEq)]
enum Prediction {
    Fixed { value: f64, alternative: Option<f64> },
    /// Fuss-Catalan term of order `l` at the mean measured `rho_3`.
    FussCatalan { l: usize },
}

#[derive(Clone, Debug, PartialEq)]
struct PlannedMoment {
    order: MomentOrder,
    prediction: Prediction,
}

fn catalan(l: usize) -> Result<PlannedMoment> {
    Ok(PlannedMoment {
        order: MomentOrder::Mixed { l },
        prediction: Prediction::Fixed {
            value: catalan_prefactor(l)?,
            alternative: Some(printed_mixed_prefactor(l)?),
        },
    })
}

fn fixed(order: MomentOrder, value: f64) -> PlannedMoment {
    PlannedMoment { order, prediction: Prediction::Fixed { value, alternative: None } }
}

fn moment_plan(cfg: &ExperimentConfig) -> Result<Vec<PlannedMoment>> {
    let s = cfg.scale;
    let mut plan = Vec::new();
    match &cfg.ensemble {
        EnsembleSpec::DenseElliptic(e) => {
            plan.push(fixed(MomentOrder::Pure { k: 2 }, e.rho));
            plan.push(fixed(MomentOrder::Mixed { l: 1 }, 1.0));
        }
        EnsembleSpec::DenseCyclic(e) => {
            plan.push(catalan(1)?);
            plan.push(catalan(2)?);
            if e.k == 3 {
                plan.push(PlannedMoment {
                    order: MomentOrder::Pure { k: 6 },
                    prediction: Prediction::FussCatalan { l: 2 },
                });
            }
        }
        EnsembleSpec::RegularCyclic(g) => {
            let (d, w) = (g.d as f64, s * g.weight);
            plan.push(fixed(MomentOrder::Pure { k: g.k }, d * w.powi(g.k as i32)));
            if g.k == 3 {
                let value = tree_walk_prediction(3, 2, d, d)? * w.powi(6);
                plan.push(fixed(MomentOrder::Pure { k: 6 }, value));
            }
            if g.k >= 3 {
                for l in 1..=2 {
                    let value = tree_walk_prediction(2, l, d, d)? * w.powi(2 * l as i32);
                    plan.push(fixed(MomentOrder::Mixed { l }, value));
                }
            }
        }
        EnsembleSpec::PoissonCyclic(g) => {
            plan.push(fixed(MomentOrder::Pure { k: g.k }, g.mean_degree * (s * g.weight).powi(g.k as i32)));
        }
        EnsembleSpec::MixedCyclic(g) => {
            let [a, b] = &g.species;
            if a.k % b.k != 0 && b.k % a.k != 0 {
                for sp in &g.species {
                    plan.push(fixed(MomentOrder::Pure { k: sp.k }, sp.d as f64 * (s * sp.weight).powi(sp.k as i32)));
                }
            }
            let row_sq: f64 = g.species.iter().map(|sp| sp.d as f64 * (s * sp.weight).powi(2)).sum();
            plan.push(fixed(MomentOrder::Mixed { l: 1 }, row_sq));
        }
    }
    Ok(plan)
}

fn rotation_order(ensemble: &EnsembleSpec<f64>, sample: &Sample<f64>) -> Option<usize> {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = match (ensemble, sample) {
        (EnsembleSpec::DenseElliptic(_), _) => 2,
        (EnsembleSpec::DenseCyclic(e), _) => e.k,
        (_, Sample::Digraph(g)) => g.cycle_lengths().fold(0, gcd),
        _ => 0,
    };
    (g > 1).then_some(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationCheck {
    pub order: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedMoments {
    /// `Tr M^k / n` keyed by `k`.
    pub pure: BTreeMap<usize, f64>,
    /// `Tr (M M^T)^l / n` keyed by `l`.
    pub mixed: BTreeMap<usize, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedResult {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_rho: Option<f64>,
    /// Present when the law depends on the sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryLaw<f64>>,
    pub containment: ContainmentReport<f64>,
    pub spectral_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjugation_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<SeedMoments>,
}

#[derive(Debug, Serialize)]
pub struct SeedReport {
    pub seed: u64,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub result: Option<SeedResult>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Aggregate {
    pub seeds_ok: usize,
    pub seeds_failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inside_fraction_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inside_fraction_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_violation_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_residual_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_rho_mean: Option<f64>,
    pub moments: Vec<MomentReport<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub ensemble: EnsembleSpec<f64>,
    pub inflation: f64,
    pub scale: f64,
    pub exclude_outliers: bool,
    /// Shared law; per-seed laws appear in the seed entries instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryLaw<f64>>,
    pub metadata: Metadata,
    pub seeds: Vec<SeedReport>,
    pub aggregate: Aggregate,
}

impl SpectrumReport {
    pub fn ok_results(&self) -> impl Iterator<Item = &SeedResult> {
        self.seeds.iter().filter_map(|s| s.result.as_ref())
    }
}

/// The law shared by every seed, or `None` when it needs each sample's
/// measured `rho_k`.
pub fn shared_boundary(cfg: &ExperimentConfig) -> Result<Option<BoundaryCurve<f64>>> {
    match &cfg.boundary {
        BoundarySelection::Explicit(spec) => Ok(Some(spec.curve(cfg.samples)?)),
        BoundarySelection::Auto(_) => match cfg.auto_boundary() {
            Some(spec) => {
                let curve = spec.curve(cfg.samples)?;
                Ok(Some(if cfg.scale != 1.0 { curve.scaled(cfg.scale) } else { curve }))
            }
            None => Ok(None),
        },
    }
}

fn measured_law(cfg: &ExperimentConfig, rho: f64) -> Result<BoundarySpec> {
    match &cfg.ensemble {
        EnsembleSpec::DenseCyclic(e) => Ok(BoundarySpec::DenseHypotrochoid { k: e.k, rho }),
        _ => Err(CliError::config("measured law only applies to dense-cyclic ensembles")),
    }
}

fn collect_moments(
    plan: &[PlannedMoment],
    m: &DenseMatrix<f64>,
    spectrum: Option<&Spectrum<f64>>,
) -> Result<SeedMoments> {
    let mut out = SeedMoments { pure: BTreeMap::new(), mixed: BTreeMap::new() };
    for p in plan {
        match p.order {
            MomentOrder::Pure { k } => {
                let v = match spectrum {
                    Some(s) => pure_moment_from_spectrum(s, k)?,
                    None => trace_moment(m, k)?,
                };
                out.pure.insert(k, v);
            }
            MomentOrder::Mixed { l } => {
                out.mixed.insert(l, empirical_mixed_moment(m, l)?);
            }
        }
    }
    Ok(out)
}

fn moment_reports(
    plan: &[PlannedMoment],
    per_seed: &[&SeedMoments],
    mean_rho: Option<f64>,
) -> Result<Vec<MomentReport<f64>>> {
    if per_seed.is_empty() {
        return Ok(Vec::new());
    }
    let mut reports = Vec::new();
    for p in plan {
        let samples: Vec<f64> = per_seed
            .iter()
            .map(|s| match p.order {
                MomentOrder::Pure { k } => s.pure[&k],
                MomentOrder::Mixed { l } => s.mixed[&l],
            })
            .collect();
        let report = match p.prediction {
            Prediction::Fixed { value, alternative } => {
                let r = MomentReport::from_samples(p.order, &samples, value)?;
                match alternative {
                    Some(a) => r.with_alternative(a),
                    None => r,
                }
            }
            Prediction::FussCatalan { l } => match mean_rho {
                Some(rho) => MomentReport::from_samples(p.order, &samples, fuss_catalan_prediction(l, rho)?)?,
                None => continue,
            },
        };
        reports.push(report);
    }
    Ok(reports)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn verify_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    shared: Option<&BoundaryCurve<f64>>,
    plan: &[PlannedMoment],
) -> Result<SeedResult> {
    let sample = generate(&cfg.ensemble, RandomSeed(seed))?;
    let m = sample.matrix(cfg.scale);
    let spectrum = compute_eigenvalues(&m)?.with_source(cfg.ensemble.clone(), RandomSeed(seed));

    let (measured_rho, own_curve) = match (&cfg.ensemble, shared) {
        (EnsembleSpec::DenseCyclic(e), None) => {
            let rho = pure_moment_from_spectrum(&spectrum, e.k)?;
            (Some(rho), Some(measured_law(cfg, rho)?.curve(cfg.samples)?))
        }
        (EnsembleSpec::DenseCyclic(e), Some(_)) => (Some(pure_moment_from_spectrum(&spectrum, e.k)?), None),
        _ => (None, None),
    };
    let curve = own_curve.as_ref().or(shared).expect("boundary resolved");

    let exclusions = match (&sample, cfg.exclude_outliers) {
        (Sample::Digraph(g), true) => detect_deterministic_outliers(&spectrum, g, cfg.scale),
        _ => Vec::new(),
    };
    let report = containment(&spectrum, curve, cfg.inflation, &exclusions)?;
    let small = spectrum.len() <= MAX_MATCHING_SIZE;
    let rotation = match rotation_order(&cfg.ensemble, &sample) {
        Some(order) if small => {
            Some(RotationCheck { order, residual: rotation_symmetry_residual(&spectrum, order)? })
        }
        _ => None,
    };
    let conjugation = if small { Some(conjugation_residual(&spectrum)?) } else { None };
    let moments = if cfg.moments { Some(collect_moments(plan, &m, Some(&spectrum))?) } else { None };

    if let Some(dir) = &cfg.outputs.dir {
        write_spectrum_csv(&spectrum, create(&dir.join(format!("spectrum-seed-{seed}.csv")))?)?;
        if let Some(c) = &own_curve {
            write_curve_csv(c, create(&dir.join(format!("boundary-seed-{seed}.csv")))?)?;
        }
        if cfg.outputs.svg {
            let svg = crate::svg::render_svg(&spectrum.eigenvalues, &curve.points())?;
            let path = dir.join(format!("verify-seed-{seed}.svg"));
            std::fs::write(&path, svg).map_err(|e| CliError::file(&path, e))?;
        }
    }

    Ok(SeedResult {
        n: spectrum.len(),
        measured_rho,
        boundary: own_curve.map(|c| c.law),
        containment: report,
        spectral_radius: spectrum.spectral_radius(),
        rotation,
        conjugation_residual: conjugation,
        moments,
    })
}

/// Generates, solves and checks every seed. A failing seed is reported in
/// place and does not stop the others; config and boundary errors abort.
pub fn run_verify(cfg: &ExperimentConfig, metadata: Metadata) -> Result<SpectrumReport> {
    cfg.validate_with_boundary()?;
    let shared = shared_boundary(cfg)?;
    let plan = moment_plan(cfg)?;
    if let Some(dir) = &cfg.outputs.dir {
        ensure_dir(dir)?;
        if let Some(c) = &shared {
            write_curve_csv(c, create(&dir.join("boundary.csv"))?)?;
        }
    }
    let seeds: Vec<SeedReport> = cfg
        .seeds
        .par_iter()
        .map(|&seed| match verify_seed(cfg, seed, shared.as_ref(), &plan) {
            Ok(r) => SeedReport { seed, status: "ok", error: None, result: Some(r) },
            Err(e) => SeedReport { seed, status: "failed", error: Some(e.report()), result: None },
        })
        .collect();

    let ok: Vec<&SeedResult> = seeds.iter().filter_map(|s| s.result.as_ref()).collect();
    let measured_rho_mean = mean(ok.iter().filter_map(|r| r.measured_rho));
    let seed_moments: Vec<&SeedMoments> = ok.iter().filter_map(|r| r.moments.as_ref()).collect();
    let aggregate = Aggregate {
        seeds_ok: ok.len(),
        seeds_failed: seeds.len() - ok.len(),
        inside_fraction_mean: mean(ok.iter().map(|r| r.containment.inside_fraction())),
        inside_fraction_min: ok.iter().map(|r| r.containment.inside_fraction()).reduce(f64::min),
        worst_violation_max: ok.iter().map(|r| r.containment.worst_violation).reduce(f64::max),
        rotation_residual_max: ok.iter().filter_map(|r| r.rotation.as_ref()).map(|r| r.residual).reduce(f64::max),
        measured_rho_mean,
        moments: if cfg.moments { moment_reports(&plan, &seed_moments, measured_rho_mean)? } else { Vec::new() },
    };
    Ok(SpectrumReport {
        ensemble: cfg.ensemble.clone(),
        inflation: cfg.inflation,
        scale: cfg.scale,
        exclude_outliers: cfg.exclude_outliers,
        boundary: shared.map(|c| c.law),
        metadata,
        seeds,
        aggregate,
    })
}

#[derive(Debug, Serialize)]
pub struct MomentTable {
    pub ensemble: EnsembleSpec<f64>,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<SeedMoments>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_rho_mean: Option<f64>,
    pub moments: Vec<MomentReport<f64>>,
}

/// Moment comparisons by matrix powers only, without eigensolves.
pub fn run_moments(cfg: &ExperimentConfig) -> Result<MomentTable> {
    cfg.validate()?;
    let plan = moment_plan(cfg)?;
    let per_seed: Vec<(SeedMoments, Option<f64>)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let m = generate(&cfg.ensemble, RandomSeed(seed))?.matrix(cfg.scale);
            let rho = match &cfg.ensemble {
                EnsembleSpec::DenseCyclic(e) => Some(trace_moment(&m, e.k)?),
                _ => None,
            };
            Ok((collect_moments(&plan, &m, None)?, rho))
        })
        .collect::<Result<_>>()?;
    let measured_rho_mean = mean(per_seed.iter().filter_map(|(_, r)| *r));
    let refs: Vec<&SeedMoments> = per_seed.iter().map(|(m, _)| m).collect();
    let moments = moment_reports(&plan, &refs, measured_rho_mean)?;
    Ok(MomentTable {
        ensemble: cfg.ensemble.clone(),
        seeds: cfg.seeds.clone(),
        per_seed: per_seed.into_iter().map(|(m, _)| m).collect(),
        measured_rho_mean,
        moments,
    })
}

/// The configured law; dense-cyclic auto laws use `rho_k` measured on the
/// first seed.
pub fn resolve_boundary(cfg: &ExperimentConfig) -> Result<(BoundarySpec, BoundaryCurve<f64>)> {
    cfg.validate_with_boundary()?;
    let spec = match &cfg.boundary {
        BoundarySelection::Explicit(spec) => spec.clone(),
        BoundarySelection::Auto(_) => match cfg.auto_boundary() {
            Some(spec) => spec,
            None => {
                let EnsembleSpec::DenseCyclic(e) = &cfg.ensemble else { unreachable!() };
                let m = generate(&cfg.ensemble, RandomSeed(cfg.seeds[0]))?.matrix(1.0);
                measured_law(cfg, trace_moment(&m, e.k)?)?
            }
        },
    };
    let mut curve = spec.curve(cfg.samples)?;
    if cfg.boundary == BoundarySelection::default() && cfg.scale != 1.0 {
        curve = curve.scaled(cfg.scale);
    }
    Ok((spec, curve))
}

pub fn write_boundary(curve: &BoundaryCurve<f64>, out: &Path) -> Result<()> {
    Ok(write_curve_csv(curve, create(out)?)?)
}

/// Density on an `nx` by `ny` grid around a dense law's boundary.
pub fn density_field(spec: &BoundarySpec, curve: &BoundaryCurve<f64>, nx: usize, ny: usize) -> Result<DensityField<f64>> {
    let params = spec
        .polytrochoid()
        .ok_or_else(|| CliError::config("interior density is defined for dense laws only"))?;
    let grid = GridSpec::covering(curve, nx, ny, 0.05);
    Ok(interior_density(&params, &grid)?)
}

pub fn write_density(field: &DensityField<f64>, out: &Path) -> Result<()> {
    Ok(write_density_csv(field, create(out)?)?)
}
