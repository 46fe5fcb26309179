//! 2×2 matrix potentials on the line: evaluation, norms, factorizations
//! and the dilated norms used for resonances.

mod catalog;
mod matrix;
mod norms;

pub use catalog::{read_table, DecayClass, GaussianTerm, Potential, PotentialKind, PotentialSpec, TableData};
pub use matrix::Matrix2;
pub use norms::{
    clip_decompose, diagonal_l1_norms, dilated_l1_norm, f_v, l1_norm, lp_norm, polar_factorize, v_theta,
    ClippedDecomposition, Factorization, SECTOR_MARGIN,
};
