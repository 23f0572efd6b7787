//! Exact rational linear algebra: row reduction, kernels, and subspaces in canonical form.

mod mat;
mod subspace;

pub use mat::{
    clear_denominators, dot, is_reduced, parse_rat, rat, rat_to_f64, ratio, rref, solve, Mat, Rat,
    Rref,
};
pub use subspace::{kernel, random_int_matrix, random_subspace, Subspace, MAX_SUBSPACE_DRAWS};
