//! Conservative L-systems and F-systems in finite dimensions.
//!
//! The crate models an L-system by complex matrices `(A, K, J)` with
//! `Im A = K J K*`, evaluates transfer and impedance functions, forms
//! FF- and LF-couplings whose transfer functions multiply, classifies scalar
//! impedance functions into the (perturbed) Donoghue classes, and builds the
//! controllers that realize unimodular transformations by coupling.
//!
//! Module map:
//!
//! - [`numerics`]: dense complex matrices, pivoted solves, Hermitian eigen.
//! - [`systems`]: L-/F-system models, `W(z)`, `V(z)`, Cayley maps.
//! - [`coupling`]: FF- and LF-couplings, multiplication checks.
//! - [`herglotz`]: scalar Herglotz functions, classes, Möbius maps, oracles.
//! - [`control`]: controllers, constant J-unitary realizations, equivalence.
//! - [`timedomain`]: harmonic-input simulation and conservation audit.
//! - [`document`]: JSON system documents and class reports.

pub mod control;
pub mod coupling;
pub mod document;
pub mod error;
pub mod herglotz;
pub mod numerics;
pub mod random;
pub mod systems;
pub mod timedomain;

pub use error::{Error, Result};
pub use numerics::{c, Complex, ComplexMatrix, I};
pub use systems::{
    cayley_v_to_w, cayley_w_to_v, make_fsystem, make_lsystem, make_lsystem_random, DirectionChoice,
    FSystemModel, LSystemModel, TransferFunction, DEFAULT_TOLERANCE,
};
pub use coupling::{couple_ff, couple_lf, LFCoupling};
pub use herglotz::{classify, mobius, Alpha, ClassKind, ClassLabel, ScalarHerglotz};
pub use control::{make_controller, unimodular_transform, Controller};
