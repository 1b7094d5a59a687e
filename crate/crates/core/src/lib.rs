//! Solution-count distributions for probabilistic Diophantine approximation.
//!
//! The crate computes the Erdős–Szüsz–Turán and Kesten count statistics two
//! independent ways and provides the machinery to compare them:
//!
//! - **Diophantine side**: exact integer counters for the number of good
//!   rational approximations to a random target at a finite scale N, in one
//!   dimension, for simultaneous approximation, for m x n systems of linear
//!   forms, for targets on the Veronese curve, and for circle averages over
//!   the integer lattice ([`counting`]).
//! - **Lattice side**: exact Haar sampling of unimodular 2-D lattices and
//!   enumeration of primitive lattice points in the corresponding wedge and
//!   box regions ([`lattice`], [`geometry`]).
//!
//! Both sides plug into the generic equivariant-process estimator
//! ([`process`]), and [`stats`] carries the closed forms (Siegel
//! expectation, positivity formula, Rogers–Schmidt variance bound) and the
//! distribution distances used to cross-validate them.

pub mod counting;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod process;
pub mod stats;

pub use counting::{
    count_circle, count_curve, count_est_1d, count_kesten_1d, count_md, is_primitive, CountSpec,
    CountVariant, CurveKind, CurveSpec, DEFAULT_BUDGET,
};
pub use error::{Error, Result};
pub use geometry::{
    diag_flow, rotation, shear, shear_1d, ExponentMode, GroupElement, NormKind, Region,
    RegionFamily, VolumeMethod, YSign,
};
pub use lattice::{
    enumerate_primitive, estimate_lattice_pmf, haar_lattice_process, lattice_count,
    sample_haar_lattice2, HaarSample2, LatticeBasis, Target,
};
pub use process::{
    estimate_distribution, make_sampler, sample_rng, DensityKind, EquivariantProcess, SamplerKind,
    SamplerSpec,
};
pub use stats::{
    compare, concentration_check, est_closed_form, moment_report, siegel_expectation,
    variance_bound_constant, zeta, Comparison, ConcentrationReport, EmpiricalDistribution,
    MomentReport,
};
