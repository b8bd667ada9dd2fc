//! Szász–Mirakyan–Laguerre–Durrmeyer operators on the half-line.
//!
//! The operator
//!
//! ```text
//! M_n f(x) = Σ_k c_k(f) ψ_{n,k}(x),   ψ_{n,k}(x) = (nx)^k e^{-nx} / k!
//! ```
//!
//! averages `f` against Gamma densities with shape `k+α+1` and rate `n−β`,
//! then recombines the averages with Poisson weights. This crate evaluates it
//! for symbolic and sampled functions, computes its moments several independent
//! ways, checks its two known eigenpairs, and measures convergence in sup,
//! weighted and `L_p` norms.

pub mod analysis;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod operator;
pub mod special_fn;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
