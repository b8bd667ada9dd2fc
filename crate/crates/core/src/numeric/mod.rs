//! Arithmetic and quadrature building blocks.

pub mod adaptive;
pub mod dd;
pub mod gauss;
pub mod par;
pub mod search;

pub use adaptive::{integrate, AdaptiveOptions, Quadrature};
pub use dd::{CompensatedSum, DoubleDouble};
pub use gauss::{gauss_laguerre, gauss_laguerre_cached, gauss_legendre, gauss_legendre_cached, GaussRule};
pub use par::par_map;
pub use search::golden_max;
