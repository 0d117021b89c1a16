//! Numerics for the Ablowitz-Ladik (AL) integrable lattice hierarchy.
//!
//! The crate implements the discrete Zakharov-Shabat scattering problem, the
//! sum-difference operators that generate the AL hierarchy, the associated
//! conserved functionals and Poisson-type brackets, time integration of the
//! flows, and batch verification suites that check the defining identities
//! numerically on truncated lattices.
//!
//! The bi-infinite lattice is modeled by a finite window with zero extension;
//! potentials are required to vanish at the window edges so that scattering
//! quantities computed on the window agree with their infinite-lattice
//! counterparts to machine precision.

pub mod error;
pub mod flows;
pub mod functionals;
pub mod lattice;
pub mod operators;
pub mod scattering;
pub mod verify;

pub use error::AlError;
pub use lattice::{Field, LatticeState, Ordering, Window};

pub type C64 = num_complex::Complex<f64>;
