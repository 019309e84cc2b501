//! Shared numerical substrate: grids, quadratures, the discrete Fourier pair,
//! dense Hermitian eigensolves and the smooth cutoff.

mod cutoff;
pub(crate) mod dft;
mod eigen;
mod grid;
pub(crate) mod operator;
mod quadrature;
mod stats;

pub use cutoff::{chi_eval, CutoffProfile};
pub use dft::{dft_forward, dft_inverse, momenta, trig_eval, Spectrum, TrigInterpolant};
pub use eigen::{hermitian_eigs, symmetric_eigs, HermitianEigen, SymmetricEigen};
pub use grid::{UniformGrid, WaveField};
pub use operator::{HermitianOperatorDense, Symmetry};
pub use quadrature::{
    adaptive_gauss_kronrod, composite_gauss_legendre, disk_quadrature, gauss_legendre,
    BallQuadrature, CircleQuadrature, IntervalQuadrature,
};
pub use stats::{loglog_slope, spread_ratio};

/// Default Gauss–Legendre node count for parameter integrals.
pub const DEFAULT_GAUSS_NODES: usize = 64;
/// Default node count for circle quadratures.
pub const DEFAULT_CIRCLE_NODES: usize = 256;
/// Default (radial, angular) resolution of disk quadratures.
pub const DEFAULT_DISK_NODES: (usize, usize) = (48, 96);
