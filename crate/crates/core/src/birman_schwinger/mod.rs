//! Numerical eigenvalue and resonance finder based on the
//! Birman–Schwinger principle: `z` is an eigenvalue of `H₀ + V` iff
//! `det(I + A R₀(z) B) = 0` with `V = B A`.

mod nystrom;
mod search;

pub use nystrom::{
    assemble, dilated_assemble, logdet, wrap_angle, KernelParams, NystromGrid, NystromOptions, NystromSystem,
};
pub use search::{
    check_theta_persistence, det_root_search, essential_distance, grid_root_search, resonance_search, FoundRoot,
    Persistence, Rect, SearchOptions, SpectrumSearchReport, SubregionWinding,
};
