//! One-dimensional discrete-time quantum walks with position-dependent coins.
//!
//! The walk acts on a ring of `L` sites with a two-component (left/right)
//! internal state. Each step applies the rotation coin
//! `C(θ) = [[cosθ, sinθ], [−sinθ, cosθ]]` at every site and then shifts the
//! left component one site left and the right component one site right.
//!
//! - [`lattice`]: coin profiles, walker states and time evolution.
//! - [`bulk`]: dispersion `cos E = cosθ cos k`, Bloch vectors, chiral and
//!   particle-hole symmetry, and the winding number `m = sgn(sinθ)`.
//! - [`bound`]: closed-form Majorana modes at walls between regions of
//!   opposite winding, and the finite-wire energy conditions.
//! - [`spectral`]: dense diagonalization of the walk, localization scores,
//!   wire energies by bisection and splitting-decay fits.
//!
//! ```
//! use qwalk::bound::{single_boundary_mode, MajoranaEnergy};
//! use qwalk::lattice::CoinAngle;
//!
//! let left = CoinAngle::from_pi_units(0.25).unwrap();
//! let right = CoinAngle::from_pi_units(-0.25).unwrap();
//! let mode = single_boundary_mode(left, right, MajoranaEnergy::Zero, 128, None).unwrap();
//! assert!(mode.eigen_residual() < 1e-10);
//! ```

// `!(x > y)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bound;
pub mod bulk;
pub mod error;
pub mod lattice;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{CoinAngle, CoinProfile, ProfileKind, Spinor, WalkerState};
