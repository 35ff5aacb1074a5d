use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trochoid::ensemble::{
    BaseDistribution, CorrelationSign, CycleSpecies, DenseCyclicSpec, EnsembleSpec, MixedCyclicSpec,
    PoissonCyclicSpec, RegularCyclicSpec,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Seeds used to calibrate the flip probability, disjoint from run seeds.
pub const CALIBRATION_SEEDS: [u64; 2] = [1000, 1001];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigurePreset {
    Fig1Left,
    Fig1Right,
    Fig2,
    Fig3Top,
    Fig3Bottom,
    Fig4,
}

/// Correlation strength a dense preset must hit before it runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub k: usize,
    pub rho: f64,
    pub seeds: Vec<u64>,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 6] = [
        FigurePreset::Fig1Left,
        FigurePreset::Fig1Right,
        FigurePreset::Fig2,
        FigurePreset::Fig3Top,
        FigurePreset::Fig3Bottom,
        FigurePreset::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig1Left => "fig1-left",
            FigurePreset::Fig1Right => "fig1-right",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3Top => "fig3-top",
            FigurePreset::Fig3Bottom => "fig3-bottom",
            FigurePreset::Fig4 => "fig4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FigurePreset::Fig1Left => "dense matrix, N = 1000, Tr M^5 / N = 0.075",
            FigurePreset::Fig1Right => "regular digraph, every node in two directed 3-cycles",
            FigurePreset::Fig2 => "dense matrix, N = 1000, Tr M^3 / N = 0.2",
            FigurePreset::Fig3Top => "regular digraph, in- and out-degree 2, 4-cycles",
            FigurePreset::Fig3Bottom => "Poisson digraph, mean degree 8, 4-cycles",
            FigurePreset::Fig4 => "regular digraph, every node in four 3-cycles and four 4-cycles",
        }
    }

    fn dense(n: usize, k: usize) -> EnsembleSpec<f64> {
        // flip_prob is replaced by the calibrated value before a run.
        EnsembleSpec::DenseCyclic(DenseCyclicSpec {
            n,
            k,
            flip_prob: 0.0,
            sign: CorrelationSign::Positive,
            base: BaseDistribution::Gaussian,
        })
    }

    pub fn ensemble(self) -> EnsembleSpec<f64> {
        match self {
            FigurePreset::Fig1Left => Self::dense(1000, 5),
            // 1000 nodes admit no integral number of 3-cycles at d = 2.
            FigurePreset::Fig1Right => {
                EnsembleSpec::RegularCyclic(RegularCyclicSpec::new(999, 2, 3, 1.0).periodic())
            }
            FigurePreset::Fig2 => Self::dense(1000, 3),
            FigurePreset::Fig3Top => {
                EnsembleSpec::RegularCyclic(RegularCyclicSpec::new(1000, 2, 4, 1.0).periodic())
            }
            FigurePreset::Fig3Bottom => EnsembleSpec::PoissonCyclic(PoissonCyclicSpec {
                n: 1000,
                mean_degree: 8.0,
                k: 4,
                weight: 1.0,
            }),
            FigurePreset::Fig4 => EnsembleSpec::MixedCyclic(MixedCyclicSpec {
                n: 996,
                species: [
                    CycleSpecies { d: 4, k: 3, weight: 1.0 },
                    CycleSpecies { d: 4, k: 4, weight: 1.0 },
                ],
            }),
        }
    }

    pub fn calibration(self) -> Option<CalibrationTarget> {
        let seeds = CALIBRATION_SEEDS.to_vec();
        match self {
            FigurePreset::Fig1Left => Some(CalibrationTarget { k: 5, rho: 0.075, seeds }),
            FigurePreset::Fig2 => Some(CalibrationTarget { k: 3, rho: 0.2, seeds }),
            _ => None,
        }
    }

    pub fn inflation(self) -> f64 {
        match self {
            FigurePreset::Fig3Bottom | FigurePreset::Fig4 => 0.05,
            _ => 0.03,
        }
    }

    pub fn config(self) -> ExperimentConfig {
        ExperimentConfig { inflation: self.inflation(), ..ExperimentConfig::new(self.ensemble(), vec![0]) }
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePreset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
            CliError::config(format!("unknown preset {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in FigurePreset::ALL {
            assert_eq!(p.name().parse::<FigurePreset>().unwrap(), p);
            assert!(p.config().validate().is_ok(), "{p}");
        }
        assert_eq!("fig5".parse::<FigurePreset>().unwrap_err().exit_code(), 2);
    }
}
