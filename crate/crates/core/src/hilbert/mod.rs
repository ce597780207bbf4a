//! Tensor-product bookkeeping and sparse operator algebra for qutrits and
//! truncated-Fock cavities.

mod layout;
mod operator;
mod state;

pub use layout::{NetworkLayout, SubsystemKind, SubsystemSpec, E, F, G, QUTRIT_DIM};
pub use operator::{
    embed, embed_dims, embed_product, local_annihilation, local_projector, local_transition, OperatorMatrix,
};
pub use state::{
    expectation, overlap, partial_trace, partial_trace_dims, reduce_pure, vector_norm, DenseMatrix, QuantumState,
    HERMITIAN_TOL, NORM_TOL, POSITIVITY_TOL,
};
