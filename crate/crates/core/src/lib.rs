//! Numerical laboratory for magnetically deformed Schrödinger eigenfunctions.
//!
//! An eigenfunction `phi` of `P_0(h)` is pushed through the magnetic propagator
//! `exp(-i t0 P_u(h) / h)` for every parameter `u` in a small ball, and the
//! pointwise intensity `|phi^(u)(x)|^2` is averaged over the ball. Three exactly
//! solvable models are provided:
//!
//! * [`flatmag`]: constant magnetic potentials on flat space, propagated by a
//!   Fourier multiplier, with a Weyl-quantization cross-check.
//! * [`oscillator`]: the one-dimensional magnetic harmonic oscillator, propagated
//!   by dense spectral decomposition, the Mehler kernel and a coherent-state
//!   closed form.
//! * [`zonal`]: zonal spherical harmonics near the pole and their deformed
//!   circle-integral surrogate, with a Bessel closed form.
//!
//! [`deformlab`] holds the model-independent pieces: admissibility of a
//! magnetic family, ball averaging, two-sided band statistics and the
//! restriction / Markov pipeline. [`numerics`] is the shared substrate.

pub mod deformlab;
pub mod error;
pub mod flatmag;
pub mod numerics;
pub mod oscillator;
pub mod zonal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{
    BallQuadrature, CircleQuadrature, CutoffProfile, HermitianOperatorDense, IntervalQuadrature,
    UniformGrid, WaveField,
};

/// Execution strategy for embarrassingly parallel sweeps.
///
/// Both modes evaluate every task independently and reduce in node-index
/// order, so results are bit-identical; `Serial` only avoids the thread pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

impl Execution {
    /// Applies `f` to every item and returns the results in input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        use rayon::prelude::*;
        match self {
            Execution::Serial => items.iter().map(f).collect(),
            Execution::Parallel => items.par_iter().map(f).collect(),
        }
    }
}
