//! Lie algebras of planar vector fields and their Hamiltonian structure.
//!
//! The library encodes the local classification of finite-dimensional real
//! Lie algebras of vector fields on the plane (8 primitive + 20 imprimitive
//! classes), mechanically verifies which of them consist of Hamiltonian
//! vector fields with respect to a symplectic form `f dx∧dy`, constructs the
//! Hamiltonian functions and their Poisson bracket tables (detecting central
//! extensions), and integrates the nonautonomous systems built on those
//! algebras (planar Riccati, Milne-Pinney, Kummer-Schwarz, Buchdahl,
//! Lotka-Volterra, predator-prey and viral-infection models), including
//! solution transport through the explicit diffeomorphisms relating them.
//!
//! ```
//! use lieplane::expr::{EquivOptions, Expr};
//! use lieplane::symplectic::{bracket_table, find_integrating_factor, SymplecticForm};
//! use lieplane::vfield::VectorField;
//!
//! // the sl(2) realization on y != 0: a common integrating factor for its
//! // modular generators, then the Poisson bracket table of the Hamiltonians
//! let generators = [
//!     VectorField::parse("1", "0").unwrap(),
//!     VectorField::parse("x", "y").unwrap(),
//! ];
//! let ansatz = [Expr::parse("y").unwrap()];
//! let opts = EquivOptions::default();
//! let factor = find_integrating_factor(&generators, &ansatz, &opts)
//!     .unwrap()
//!     .expect("a symplectic form exists");
//! assert_eq!(factor.form.f.to_string(), "1/y^2");
//! assert_eq!(factor.homogeneous_dim, 0); // unique within the ansatz
//!
//! let hs = [
//!     Expr::parse("-1/y").unwrap(),
//!     Expr::parse("-x/y").unwrap(),
//!     Expr::parse("-(x^2 + y^2)/y").unwrap(),
//! ];
//! let table = bracket_table(&hs, &factor.form, &opts).unwrap();
//! assert!(!table.central_flag);
//! assert_eq!(table.name.to_string(), "sl(2)");
//! ```

pub mod catalog;
pub mod dynamics;
pub mod expr;
pub mod liealg;
pub mod linalg;
pub mod symplectic;
pub mod vfield;

pub use expr::{Bindings, Expr, Guard, GuardKind, Symbol};
pub use vfield::{PlanarMap, VectorField};
