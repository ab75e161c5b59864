//! Coupling kernels on the product space: maximal, independent and hybrid.

mod doeblin;
mod joint;
mod kernel;
mod split;

pub use doeblin::{doeblin_set, select_doeblin, DoeblinSet};
pub use joint::JointDist;
pub use kernel::{hybrid_kernel, independent_kernel, CouplingKernel, KernelKind, EXACT_PAIR_CAP};
pub use split::{
    diagonal_part, maximal_coupling, maximal_coupling_row, residual_part, split, split_laws,
    SplittingParts,
};
