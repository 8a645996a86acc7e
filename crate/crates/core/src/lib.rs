//! Computational core for Bohr-Sommerfeld geometric quantization at desk scale.
//!
//! - [`verlinde`]: SU(2) Verlinde dimensions with a certified integer rounding.
//! - [`trigraph`]: trivalent dual graphs of pants decompositions.
//! - [`weights`]: admissible integer weights (Bohr-Sommerfeld fibers of the
//!   real polarization) and the moment polytope.
//! - [`theta`]: level-k theta functions with characteristics on an elliptic
//!   curve and the Bohr-Sommerfeld evaluation matrix.
//! - [`ucurve`]: the complexified Bohr-Sommerfeld locus over the circle base.

pub mod params;
pub mod sum;
pub mod theta;
pub mod trigraph;
pub mod ucurve;
pub mod verlinde;
pub mod weights;

pub use params::{Genus, Level, ParamError};
pub use theta::{
    bpu_matrix, bs_points, theta_series, theta_value, BsFiberPoint, HalfFormNormalization,
    ModularParameter, ThetaBasisMatrix, ThetaCharacteristic, ThetaError, ThetaSeries,
};
pub use trigraph::{
    bridges, generate_trivalent, is_isomorphic, EdgeSet, GraphError, TrivalentGraph,
};
pub use ucurve::{
    complex_bs_residual, deck_translate, trace_slice, zero_level_fiber, SWindow, SupercyclePoint,
    UCurveError, UCurveSlice,
};
pub use verlinde::{verlinde_dim, verlinde_dim_at, VerlindeError, VerlindeValue};
pub use weights::{
    count_admissible, count_admissible_in, enumerate_admissible, enumerate_admissible_in,
    is_admissible, polytope_contains, ActionPoint, AdmissibilityReport, LabelRange, Site,
    Violation, WeightError, WeightFunction,
};
