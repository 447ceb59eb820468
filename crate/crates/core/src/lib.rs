//! Exact theta series, generalized theta series and sublattice-volume
//! hierarchies of lattices given by rational Gram matrices.
//!
//! Every invariant is computed from the Gram matrix `G` alone. Vectors are
//! integer coefficient rows `u`, with squared length `u G u^T`.

pub mod analytic;
pub mod codes;
pub mod dsp;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod gts;
pub mod lattice;
pub mod limits;
pub mod registry;
pub mod repro;

pub use analytic::{
    extremum_scan, ratio, ratio_scan, symmetry_check, theta_value, theta_zn, Extremum, ExtremumReport, RatioScan,
};
pub use codes::{builtin_code, LinearCode, WeightHierarchy};
pub use dsp::{
    check_scaling_law, is_stable, min_sublattice_det, norm_hierarchy, NormHierarchy, ScalingReport,
    StabilityCertificate, SublatticeMinimum,
};
pub use enumerate::{lambda_sequence, theta_spectrum, vectors_within, SpectrumTerm, ThetaSpectrum};
pub use error::{Error, Result};
pub use exact::{format_rational, parse_rational, IntRows, Rational, RationalMatrix};
pub use gts::{
    count_subsets_with_det, determinant_census, generalized_theta, generalized_theta_with, GtsOptions, GtsSeries, GtsTerm,
};
pub use lattice::{LatticeFile, LatticeVector, QuadraticLattice};
pub use limits::Limits;
pub use registry::builtin_lattice;
