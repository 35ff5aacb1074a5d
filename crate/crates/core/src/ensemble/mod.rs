//! Seeded generators for every ensemble studied: dense i.i.d., elliptic and
//! cycle-correlated matrices, and regular / Poisson / mixed cycle digraphs.

mod dense;
mod graph;
mod spec;

pub use dense::{
    combine_correlated, generate_base, generate_base_iid, generate_dense_cyclic,
    generate_dense_elliptic, induce_cyclic_correlations, induce_cyclic_correlations_reference,
};
pub use graph::{
    adjacency_matrix, generate_mixed_cyclic, generate_poisson_cyclic, generate_regular_cyclic,
    Edge, SparseDigraph,
};
pub use spec::{
    BaseDistribution, CorrelationSign, CycleLayout, CycleSpecies, DenseCyclicSpec, DenseEllipticSpec,
    EnsembleSpec, MixedCyclicSpec, PoissonCyclicSpec, RegularCyclicSpec,
};

use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::rng::RandomSeed;
use crate::scalar::Scalar;

/// A generated sample: either a dense matrix or a digraph.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample<T> {
    Dense(DenseMatrix<T>),
    Digraph(SparseDigraph<T>),
}

impl<T: Scalar> Sample<T> {
    /// The matrix whose spectrum is studied (`scale` applies to digraphs).
    pub fn matrix(&self, scale: T) -> DenseMatrix<T> {
        match self {
            Sample::Dense(m) => m.clone(),
            Sample::Digraph(g) => adjacency_matrix(g, scale),
        }
    }

    pub fn digraph(&self) -> Option<&SparseDigraph<T>> {
        match self {
            Sample::Digraph(g) => Some(g),
            Sample::Dense(_) => None,
        }
    }
}

/// Dispatches to the generator selected by `spec`.
pub fn generate<T: Scalar>(spec: &EnsembleSpec<T>, seed: RandomSeed) -> Result<Sample<T>> {
    Ok(match spec {
        EnsembleSpec::DenseElliptic(s) => {
            Sample::Dense(generate_dense_elliptic(s, BaseDistribution::Gaussian, seed)?)
        }
        EnsembleSpec::DenseCyclic(s) => Sample::Dense(generate_dense_cyclic(s, seed)?),
        EnsembleSpec::RegularCyclic(s) => Sample::Digraph(generate_regular_cyclic(s, seed)?),
        EnsembleSpec::PoissonCyclic(s) => Sample::Digraph(generate_poisson_cyclic(s, seed)?),
        EnsembleSpec::MixedCyclic(s) => Sample::Digraph(generate_mixed_cyclic(s, seed)?),
    })
}
