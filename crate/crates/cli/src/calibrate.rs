use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trochoid::ensemble::{generate_dense_cyclic, BaseDistribution, CorrelationSign, DenseCyclicSpec};
use trochoid::spectra::trace_moment;
use trochoid::RandomSeed;

use crate::error::{CliError, Result};

pub const SWEEP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
/// Bisection stops once the mean is this close to the target, relatively.
const INNER_TOLERANCE: f64 = 0.02;
const ACCEPT_TOLERANCE: f64 = 0.1;
const MAX_BISECTIONS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub flip_prob: f64,
    pub mean_rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    pub k: usize,
    pub target: f64,
    pub flip_prob: f64,
    pub mean_rho: f64,
    pub seeds: Vec<u64>,
    /// Every evaluated point, sweep first.
    pub evaluations: Vec<CalibrationPoint>,
}

/// Mean of `Tr M^k / n` over `seeds` at flip probability `p`.
pub fn measure_rho(n: usize, k: usize, p: f64, sign: CorrelationSign, seeds: &[u64]) -> Result<f64> {
    let spec = DenseCyclicSpec { n, k, flip_prob: p, sign, base: BaseDistribution::Gaussian };
    let values: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let m = generate_dense_cyclic(&spec, RandomSeed(s))?;
            trace_moment(&m, k)
        })
        .collect::<trochoid::Result<_>>()?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Finds `p` whose mean measured `rho_k` is within 10% of `target`: a sweep
/// over [`SWEEP`] checks monotonicity and brackets the target, then bisection
/// refines. The sign of the target selects the correlation sign.
pub fn calibrate_flip_prob(n: usize, k: usize, target: f64, seeds: &[u64]) -> Result<Calibration> {
    if seeds.is_empty() {
        return Err(CliError::config("calibration needs at least one seed"));
    }
    if !target.is_finite() {
        return Err(CliError::config(format!("target must be finite, got {target}")));
    }
    DenseCyclicSpec { n, k, flip_prob: 0.0, sign: CorrelationSign::Positive, base: BaseDistribution::Gaussian }
        .validate()?;
    let done = |p: f64, rho: f64, evaluations: Vec<CalibrationPoint>| Calibration {
        n,
        k,
        target,
        flip_prob: p,
        mean_rho: rho,
        seeds: seeds.to_vec(),
        evaluations,
    };
    if target == 0.0 {
        return Ok(done(0.0, 0.0, Vec::new()));
    }
    let sign = if target > 0.0 { CorrelationSign::Positive } else { CorrelationSign::Negative };
    let s = target.signum();
    let mut evaluations = Vec::new();
    for &p in &SWEEP {
        let rho = measure_rho(n, k, p, sign, seeds)?;
        evaluations.push(CalibrationPoint { flip_prob: p, mean_rho: rho });
    }
    // Work with s * rho, which must grow with p.
    let ys: Vec<f64> = evaluations.iter().map(|e| s * e.mean_rho).collect();
    if ys.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Calibration {
            message: format!("measured rho_{k} is not monotone in p over the sweep: {ys:?}"),
            achievable: None,
        });
    }
    let interval = (evaluations[0].mean_rho.min(evaluations[4].mean_rho), evaluations[0].mean_rho.max(evaluations[4].mean_rho));
    let goal = s * target;
    if goal < ys[0] || goal > ys[4] {
        return Err(CliError::Calibration {
            message: format!("target {target} outside achievable range [{}, {}]", interval.0, interval.1),
            achievable: Some(interval),
        });
    }
    if let Some(i) = ys.iter().position(|y| (y - goal).abs() <= INNER_TOLERANCE * goal) {
        return Ok(done(SWEEP[i], evaluations[i].mean_rho, evaluations));
    }
    let i = ys.windows(2).position(|w| w[0] <= goal && goal <= w[1]).unwrap();
    let (mut lo, mut hi) = (SWEEP[i], SWEEP[i + 1]);
    let mut best = evaluations[i].clone();
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let rho = measure_rho(n, k, mid, sign, seeds)?;
        let point = CalibrationPoint { flip_prob: mid, mean_rho: rho };
        evaluations.push(point.clone());
        if (s * rho - goal).abs() < (s * best.mean_rho - goal).abs() {
            best = point;
        }
        if (s * rho - goal).abs() <= INNER_TOLERANCE * goal {
            break;
        }
        if s * rho < goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (s * best.mean_rho - goal).abs() > ACCEPT_TOLERANCE * goal {
        return Err(CliError::Calibration {
            message: format!(
                "bisection ended at p = {} with mean rho_{k} = {}, not within 10% of {target}",
                best.flip_prob, best.mean_rho
            ),
            achievable: Some(interval),
        });
    }
    Ok(done(best.flip_prob, best.mean_rho, evaluations))
}
