//! Applying `M_n^{(α,β)}` and the classical Szász operator.
//!
//! `M_n f(x) = Σ_k c_k(f) ψ_{n,k}(x)`, where `c_k(f)` is the mean of `f`
//! under a Gamma distribution with shape `k+α+1` and rate `n−β`.

mod apply;
mod function;
mod kernel;
mod params;
mod policy;
mod szasz;

pub use apply::{apply_operator, coefficient, growth_bound, validate, value_at_zero, Operator};
pub use function::{
    FnIntegrand, FunctionKind, Growth, Integrand, SampledFunction, TestFunction, DEFAULT_POLY_GROWTH,
};
pub use kernel::kernel;
pub use params::OperatorParams;
pub use policy::TruncationPolicy;
pub use szasz::apply_szasz;
