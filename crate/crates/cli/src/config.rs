use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trochoid::boundary::{
    dense_hypotrochoid, dense_polytrochoid, mixed_cycle_asymptotic, mixed_cycle_boundary,
    sparse_hypotrochoid, BoundaryCurve, HypotrochoidParams, MixedCycleParams, MixedSpecies,
    PolytrochoidParams, SparseCyclicParams,
};
use trochoid::ensemble::{CycleSpecies, EnsembleSpec};

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 2048;

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_inflation() -> f64 {
    0.03
}

fn default_true() -> bool {
    true
}

fn default_scale() -> f64 {
    1.0
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

/// `"auto"` or an explicit law.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BoundarySelection {
    Auto(AutoKeyword),
    Explicit(BoundarySpec),
}

impl<'de> Deserialize<'de> for BoundarySelection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "auto" => Ok(BoundarySelection::Auto(AutoKeyword::Auto)),
            serde_json::Value::String(s) => Err(D::Error::custom(format!(
                "boundary must be \"auto\" or a law object, got {s:?}"
            ))),
            v => serde_json::from_value(v).map(BoundarySelection::Explicit).map_err(D::Error::custom),
        }
    }
}

impl Default for BoundarySelection {
    fn default() -> Self {
        BoundarySelection::Auto(AutoKeyword::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSpec {
    pub d: f64,
    pub k: usize,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl From<&CycleSpecies<f64>> for SpeciesSpec {
    fn from(s: &CycleSpecies<f64>) -> Self {
        SpeciesSpec { d: s.d as f64, k: s.k, weight: s.weight }
    }
}

/// Map keys arrive as strings once the tagged enum has buffered them.
fn order_keys<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<usize, f64>, D::Error> {
    use serde::de::Error;
    BTreeMap::<String, f64>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| {
            k.trim().parse().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("correlation order {k:?} is not an integer")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum BoundarySpec {
    DenseHypotrochoid { k: usize, rho: f64 },
    DensePolytrochoid {
        #[serde(deserialize_with = "order_keys")]
        terms: BTreeMap<usize, f64>,
    },
    SparseHypotrochoid {
        d_hat: f64,
        k: usize,
        #[serde(default = "default_weight")]
        weight: f64,
    },
    MixedCycle { species: [SpeciesSpec; 2] },
    MixedAsymptotic { species: [SpeciesSpec; 2] },
}

impl BoundarySpec {
    fn mixed_params(species: &[SpeciesSpec; 2]) -> Result<MixedCycleParams<f64>> {
        let [a, b] = species.clone().map(|s| MixedSpecies { d: s.d, k: s.k, weight: s.weight });
        Ok(MixedCycleParams::new(a, b)?)
    }

    pub fn curve(&self, n_samples: usize) -> Result<BoundaryCurve<f64>> {
        Ok(match self {
            BoundarySpec::DenseHypotrochoid { k, rho } => {
                dense_hypotrochoid(&HypotrochoidParams::new(*k, *rho)?, n_samples)?
            }
            BoundarySpec::DensePolytrochoid { terms } => {
                dense_polytrochoid(&PolytrochoidParams::new(terms.clone())?, n_samples)?
            }
            BoundarySpec::SparseHypotrochoid { d_hat, k, weight } => {
                sparse_hypotrochoid(&SparseCyclicParams::new(*d_hat, *k, *weight)?, n_samples)?
            }
            BoundarySpec::MixedCycle { species } => {
                mixed_cycle_boundary(&Self::mixed_params(species)?, n_samples)?
            }
            BoundarySpec::MixedAsymptotic { species } => {
                mixed_cycle_asymptotic(&Self::mixed_params(species)?, n_samples)?
            }
        })
    }

    /// Dense laws, whose interior density is available.
    pub fn polytrochoid(&self) -> Option<PolytrochoidParams<f64>> {
        match self {
            BoundarySpec::DenseHypotrochoid { k, rho } => PolytrochoidParams::single(*k, *rho).ok(),
            BoundarySpec::DensePolytrochoid { terms } => PolytrochoidParams::new(terms.clone()).ok(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    /// Directory for per-seed CSV and SVG artifacts.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec<f64>,
    #[serde(default)]
    pub boundary: BoundarySelection,
    pub seeds: Vec<u64>,
    #[serde(default = "default_inflation")]
    pub inflation: f64,
    /// Adjacency scale for digraph ensembles; automatic boundaries are
    /// scaled to match.
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_true")]
    pub exclude_outliers: bool,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_true")]
    pub moments: bool,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(ensemble: EnsembleSpec<f64>, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            ensemble,
            boundary: BoundarySelection::default(),
            seeds,
            inflation: default_inflation(),
            scale: default_scale(),
            exclude_outliers: true,
            samples: DEFAULT_SAMPLES,
            moments: true,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.seeds.is_empty() {
            return Err(CliError::config("seed list is empty"));
        }
        if !(self.inflation >= 0.0) || !self.inflation.is_finite() {
            return Err(CliError::config(format!("inflation must be >= 0, got {}", self.inflation)));
        }
        if !self.scale.is_finite() || self.scale == 0.0 {
            return Err(CliError::config(format!("scale must be finite and nonzero, got {}", self.scale)));
        }
        if self.scale != 1.0 && !self.ensemble.is_digraph() {
            return Err(CliError::config("scale applies to digraph ensembles only"));
        }
        if self.samples < trochoid::boundary::MIN_SAMPLES {
            return Err(CliError::config(format!(
                "samples must be >= {}, got {}",
                trochoid::boundary::MIN_SAMPLES,
                self.samples
            )));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the checks needed before a boundary
    /// is derived from the ensemble.
    pub fn validate_with_boundary(&self) -> Result<()> {
        self.validate()?;
        if self.boundary != BoundarySelection::default() {
            return Ok(());
        }
        match &self.ensemble {
            EnsembleSpec::RegularCyclic(s) if s.d < 2 => Err(CliError::config(
                "automatic boundary needs d >= 2 for regular graphs (d = 1 is a union of disjoint cycles)",
            )),
            EnsembleSpec::MixedCyclic(s) if s.species[0].d + s.species[1].d < 2 => {
                Err(CliError::config("automatic mixed boundary needs d1 + d2 >= 2"))
            }
            _ => Ok(()),
        }
    }

    /// The law fixed by the ensemble alone; `None` for dense-cyclic
    /// ensembles, whose law needs the measured `rho_k`.
    pub fn auto_boundary(&self) -> Option<BoundarySpec> {
        Some(match &self.ensemble {
            EnsembleSpec::DenseElliptic(s) => BoundarySpec::DenseHypotrochoid { k: 2, rho: s.rho },
            EnsembleSpec::DenseCyclic(_) => return None,
            EnsembleSpec::RegularCyclic(s) => BoundarySpec::SparseHypotrochoid {
                d_hat: (s.d as f64 - 1.0),
                k: s.k,
                weight: s.weight,
            },
            EnsembleSpec::PoissonCyclic(s) => BoundarySpec::SparseHypotrochoid {
                d_hat: s.mean_degree,
                k: s.k,
                weight: s.weight,
            },
            EnsembleSpec::MixedCyclic(s) => BoundarySpec::MixedCycle {
                species: [SpeciesSpec::from(&s.species[0]), SpeciesSpec::from(&s.species[1])],
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_auto_and_explicit_boundaries() {
        let cfg = ExperimentConfig::from_json(
            r#"{"ensemble": {"kind": "regular-cyclic", "n": 9, "d": 2, "k": 3, "weight": 1.0},
                "boundary": "auto", "seeds": [1]}"#,
        )
        .unwrap();
        assert_eq!(cfg.boundary, BoundarySelection::default());
        assert_eq!(cfg.inflation, 0.03);
        assert!(matches!(cfg.auto_boundary(), Some(BoundarySpec::SparseHypotrochoid { d_hat, .. }) if d_hat == 1.0));

        let cfg = ExperimentConfig::from_json(
            r#"{"ensemble": {"kind": "dense-elliptic", "n": 4, "rho": 0.2},
                "boundary": {"law": "dense-polytrochoid", "terms": {"3": 0.2, "4": 0.1}},
                "seeds": [0]}"#,
        )
        .unwrap();
        let BoundarySelection::Explicit(spec) = &cfg.boundary else { panic!() };
        assert!((spec.curve(512).unwrap().samples[0].z.re - 1.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"ensemble": {"kind": "regular-cyclic", "n": 9, "d": 2, "k": 3, "weight": 1.0}, "seeds": []}"#,
            r#"{"ensemble": {"kind": "regular-cyclic", "n": 10, "d": 1, "k": 3, "weight": 1.0}, "seeds": [0]}"#,
            r#"{"ensemble": {"kind": "dense-elliptic", "n": 4, "rho": 0.2}, "seeds": [0], "scale": 0.5}"#,
            r#"{"ensemble": {"kind": "dense-elliptic", "n": 4, "rho": 0.2}, "seeds": [0], "inflation": -1}"#,
            r#"{"ensemble": {"kind": "dense-elliptic", "n": 4, "rho": 0.2}, "seeds": [0], "boundary": "manual"}"#,
        ];
        for text in bad {
            let err = ExperimentConfig::from_json(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
        let union_of_cycles = ExperimentConfig::from_json(
            r#"{"ensemble": {"kind": "regular-cyclic", "n": 9, "d": 1, "k": 3, "weight": 1.0}, "seeds": [0]}"#,
        )
        .unwrap();
        assert_eq!(union_of_cycles.validate_with_boundary().unwrap_err().exit_code(), 2);
    }
}
