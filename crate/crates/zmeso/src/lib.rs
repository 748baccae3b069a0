//! Linear statistics of Riemann zeta zeros over random mesoscopic windows,
//! checked against three independent predictions: the Gaussian limit with
//! variance `int |x| |etahat(x)|^2 dx`, the prime-sum (explicit formula)
//! route, and the random-matrix (CUE / sine-kernel) route.
//!
//! The crate is organized around five largely independent engines:
//!
//! * [`corpus`] — zero-ordinate tables, the smooth counting main term,
//!   `S(t)`, and the archimedean density `Omega`.
//! * [`testfn`] — the test-function algebra: closed-form transforms, the
//!   variance functional, Fourier-truncation smoothing, maximal envelopes.
//! * [`meso`] — the empirical engine: windowed linear statistics, `dS`
//!   integrals, Monte Carlo moments, the Selberg residual diagnostic, and
//!   a numerical explicit-formula verifier.
//! * [`arith`] — the prime-side prediction: von Mangoldt sieve, the prime
//!   number asymptotic, exact diagonal moment sums, and pairing (Wick) sums.
//! * [`rmt`] — the random-matrix comparison: Haar-unitary eigenangles,
//!   trace moments, counting and smoothed central limit statistics, and
//!   sine-kernel pairing moments.

pub mod arith;
pub mod corpus;
pub mod error;
pub mod meso;
pub mod quad;
pub mod rmt;
pub mod special;
pub mod testfn;

pub use corpus::{main_term, omega, ZeroCorpus};
pub use error::{Error, Result};
pub use testfn::{
    l1_distance, l1_log_distance, maximal_envelope, maximal_sum, pair_integral, smooth_truncate,
    variance_functional, SmoothingKernel, Spectrum, StepFunction, TestFunction,
};
