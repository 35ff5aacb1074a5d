use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Distribution of the i.i.d. base entries, always scaled to variance `1/n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseDistribution {
    #[default]
    Gaussian,
    Uniform,
}

/// Target sign of the induced cycle correlations; serialized as `+1` / `-1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum CorrelationSign {
    #[default]
    Positive,
    Negative,
}

impl CorrelationSign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            CorrelationSign::Positive => T::one(),
            CorrelationSign::Negative => -T::one(),
        }
    }
}

impl TryFrom<i8> for CorrelationSign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(CorrelationSign::Positive),
            -1 => Ok(CorrelationSign::Negative),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<CorrelationSign> for i8 {
    fn from(s: CorrelationSign) -> i8 {
        match s {
            CorrelationSign::Positive => 1,
            CorrelationSign::Negative => -1,
        }
    }
}

/// Dense matrix with pairwise (`k = 2`) correlation `E[M_ij M_ji] = rho / n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseEllipticSpec<T> {
    pub n: usize,
    pub rho: T,
}

/// Dense matrix with order-`k` cycle correlations induced by sign flips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseCyclicSpec<T> {
    pub n: usize,
    pub k: usize,
    pub flip_prob: T,
    #[serde(default)]
    pub sign: CorrelationSign,
    #[serde(default)]
    pub base: BaseDistribution,
}

/// How cycle members are drawn for regular graphs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleLayout {
    /// Configuration-model shuffle over all nodes.
    #[default]
    Random,
    /// Nodes split into `k` classes by `i mod k`; position `p` of every cycle
    /// is drawn from class `p`. All edges run from class `c` to `c + 1`, so
    /// the spectrum is exactly invariant under rotation by `2 pi / k`.
    Periodic,
}

/// Every node sits in exactly `d` directed `k`-cycles of weight `weight`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularCyclicSpec<T> {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub weight: T,
    #[serde(default)]
    pub layout: CycleLayout,
}

/// `round(mean_degree * n / k)` cycles with uniformly drawn member nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonCyclicSpec<T> {
    pub n: usize,
    pub mean_degree: T,
    pub k: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSpecies<T> {
    /// Cycles of this species per node.
    pub d: usize,
    /// Cycle length.
    pub k: usize,
    pub weight: T,
}

/// Two cycle species on the same node set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedCyclicSpec<T> {
    pub n: usize,
    pub species: [CycleSpecies<T>; 2],
}

/// Parameter set for one of the five generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleSpec<T> {
    DenseElliptic(DenseEllipticSpec<T>),
    DenseCyclic(DenseCyclicSpec<T>),
    RegularCyclic(RegularCyclicSpec<T>),
    PoissonCyclic(PoissonCyclicSpec<T>),
    MixedCyclic(MixedCyclicSpec<T>),
}

impl<T: Scalar> EnsembleSpec<T> {
    pub fn n(&self) -> usize {
        match self {
            EnsembleSpec::DenseElliptic(s) => s.n,
            EnsembleSpec::DenseCyclic(s) => s.n,
            EnsembleSpec::RegularCyclic(s) => s.n,
            EnsembleSpec::PoissonCyclic(s) => s.n,
            EnsembleSpec::MixedCyclic(s) => s.n,
        }
    }

    pub fn is_digraph(&self) -> bool {
        matches!(
            self,
            EnsembleSpec::RegularCyclic(_)
                | EnsembleSpec::PoissonCyclic(_)
                | EnsembleSpec::MixedCyclic(_)
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnsembleSpec::DenseElliptic(s) => s.validate(),
            EnsembleSpec::DenseCyclic(s) => s.validate(),
            EnsembleSpec::RegularCyclic(s) => s.validate(),
            EnsembleSpec::PoissonCyclic(s) => s.validate(),
            EnsembleSpec::MixedCyclic(s) => s.validate(),
        }
    }
}

fn check_weight<T: Scalar>(w: T) -> Result<()> {
    if !w.is_finite() || w == T::zero() {
        return Err(Error::spec(format!("edge weight must be finite and nonzero, got {w}")));
    }
    Ok(())
}

impl<T: Scalar> DenseEllipticSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::spec("n must be positive"));
        }
        if !(self.rho.abs() <= T::one()) {
            return Err(Error::spec(format!("rho must lie in [-1, 1], got {}", self.rho)));
        }
        Ok(())
    }
}

impl<T: Scalar> DenseCyclicSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::spec(format!("correlation order k must be >= 3, got {}", self.k)));
        }
        if self.k >= self.n {
            return Err(Error::spec(format!("k = {} must be < n = {}", self.k, self.n)));
        }
        if !(self.flip_prob >= T::zero() && self.flip_prob <= T::one()) {
            return Err(Error::spec(format!(
                "flip probability must lie in [0, 1], got {}",
                self.flip_prob
            )));
        }
        Ok(())
    }
}

fn check_cycle_slots(n: usize, d: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::spec(format!("cycle length must be >= 2, got {k}")));
    }
    if d > 0 && n < k {
        return Err(Error::spec(format!("n = {n} too small for cycles of length {k}")));
    }
    if !(d * n).is_multiple_of(k) {
        return Err(Error::spec(format!(
            "d*n = {} is not divisible by k = {k}; cycle count would be {d}*{n}/{k}",
            d * n
        )));
    }
    Ok(())
}

impl<T: Scalar> RegularCyclicSpec<T> {
    pub fn new(n: usize, d: usize, k: usize, weight: T) -> Self {
        RegularCyclicSpec { n, d, k, weight, layout: CycleLayout::Random }
    }

    pub fn periodic(self) -> Self {
        RegularCyclicSpec { layout: CycleLayout::Periodic, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::spec("cycles per node d must be >= 1"));
        }
        check_cycle_slots(self.n, self.d, self.k)?;
        if self.layout == CycleLayout::Periodic && !self.n.is_multiple_of(self.k) {
            return Err(Error::spec(format!(
                "periodic layout needs n divisible by k, got n = {} and k = {}",
                self.n, self.k
            )));
        }
        check_weight(self.weight)
    }

    pub fn cycle_count(&self) -> usize {
        self.d * self.n / self.k
    }
}

impl<T: Scalar> PoissonCyclicSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::spec(format!("cycle length must be >= 2, got {}", self.k)));
        }
        if self.n < self.k {
            return Err(Error::spec(format!("n = {} too small for k = {}", self.n, self.k)));
        }
        if !(self.mean_degree > T::zero()) || !self.mean_degree.is_finite() {
            return Err(Error::spec(format!("mean degree must be > 0, got {}", self.mean_degree)));
        }
        if self.cycle_count() < 1 {
            return Err(Error::spec("round(mean_degree * n / k) must be >= 1"));
        }
        check_weight(self.weight)
    }

    pub fn cycle_count(&self) -> usize {
        let c = self.mean_degree.to_f64().unwrap_or(0.0) * self.n as f64 / self.k as f64;
        c.round().max(0.0) as usize
    }
}

impl<T: Scalar> MixedCyclicSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let [a, b] = &self.species;
        if a.k == b.k {
            return Err(Error::spec("the two cycle species must have different lengths"));
        }
        if a.d + b.d == 0 {
            return Err(Error::spec("at least one species needs d >= 1"));
        }
        for s in &self.species {
            check_cycle_slots(self.n, s.d, s.k)?;
            check_weight(s.weight)?;
        }
        Ok(())
    }
}
