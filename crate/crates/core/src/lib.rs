//! Numerical lab for multilinear pseudodifferential operators
//!
//! `T_a(u_1, ..., u_N)(x) = (2 pi)^{-nN} int a(x, Xi) prod_j u_j^(xi_j) e^{i x.(xi_1 + .. + xi_N)} dXi`
//! is realized on periodic lattices, together with the tools its boundedness
//! estimates are built from: Littlewood–Paley pieces, maximal functions,
//! Muckenhoupt weights, kernel decay and mixed norms. The [`verify`] module
//! turns each estimate into a seeded, refinement-ladder experiment.
//!
//! ```
//! use pdo_lab::grid::{Field, GridSpec, Sampled};
//! use pdo_lab::operators::apply_multilinear;
//! use pdo_lab::symbols::{constant_symbol, Arity};
//!
//! let grid = GridSpec::new(1, 2, 8.0, 64).unwrap();
//! let f = Field::from_real_fn(grid, |x| (-x[0] * x[0]).exp());
//! let g = Field::from_real_fn(grid, |x| (x[0] / 2.0).cos());
//! // a = 1 gives the pointwise product
//! let t = apply_multilinear(&constant_symbol(1.0, Arity::new(1, 2)).unwrap(), &[f.clone(), g.clone()]).unwrap();
//! for ((t, f), g) in t.values().iter().zip(f.values()).zip(g.values()) {
//!     assert!((t - f * g).norm() < 1e-10);
//! }
//! ```

pub mod error;
mod fft;
pub mod grid;
pub mod lp_decomp;
pub mod maximal;
pub mod operators;
pub mod suite;
pub mod symbols;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
pub use grid::{ExponentTriple, Field, GridSpec, MultiField, Sampled, Spectrum};
pub use symbols::{Arity, ClaimedClass, SymbolModel, SymbolSpec};
pub use verify::{BoundReport, Settings, Verdict};
