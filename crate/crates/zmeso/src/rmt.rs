//! The random-matrix comparison engine: Haar-unitary eigenangle sampling
//! (CUE), trace power moments, counting and smoothed central limit
//! statistics on the scaled eigenangle process, and sine-kernel pairing
//! moments.

use std::io::{Read, Write};

use faer::prelude::*;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad;
use crate::testfn::TestFunction;

const TAU: f64 = std::f64::consts::TAU;

const ENSEMBLE_MAGIC: &[u8; 4] = b"ZRM1";

/// Batches of eigenangles theta in [-1/2, 1/2), ascending within a batch.
#[derive(Debug, Clone)]
pub struct EnsembleSample {
    matrix_size: usize,
    batches: Vec<Vec<f64>>,
    seed: u64,
}

impl EnsembleSample {
    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn batches(&self) -> &[Vec<f64>] {
        &self.batches
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Cache format: magic "ZRM1", LE u32 n, LE u64 batch count, LE f64 angles.
    pub fn write_cache(&self, mut w: impl Write) -> Result<()> {
        w.write_all(ENSEMBLE_MAGIC)?;
        w.write_all(&(self.matrix_size as u32).to_le_bytes())?;
        w.write_all(&(self.batches.len() as u64).to_le_bytes())?;
        for b in &self.batches {
            for &a in b {
                w.write_all(&a.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_cache(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != ENSEMBLE_MAGIC {
            return Err(Error::InvalidInput("bad ensemble cache magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut batches = Vec::with_capacity(count);
        for _ in 0..count {
            let mut batch = Vec::with_capacity(n);
            for _ in 0..n {
                r.read_exact(&mut b8)?;
                batch.push(f64::from_le_bytes(b8));
            }
            batches.push(batch);
        }
        Ok(EnsembleSample { matrix_size: n, batches, seed: 0 })
    }
}

/// Eigenangles of one Haar-distributed unitary: complex Ginibre matrix, QR,
/// column phases fixed by the sign of the triangular factor's diagonal,
/// then eigenvalue extraction.
fn haar_eigenangles(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut data = vec![c64::new(0.0, 0.0); n * n];
    for v in data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = c64::new(re, im);
    }
    let a = Mat::from_fn(n, n, |i, j| data[i * n + j]);
    let qr = a.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let mut u = q.to_owned();
    for j in 0..n {
        let d = r[(j, j)];
        let scale = d.norm();
        let phase = if scale > 0.0 { d * c64::new(1.0 / scale, 0.0) } else { c64::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    let eigs = u.eigenvalues().expect("eigendecomposition of a unitary matrix");
    let mut angles: Vec<f64> = eigs
        .into_iter()
        .map(|z: c64| {
            let mut th = z.im.atan2(z.re) / TAU;
            if th >= 0.5 {
                th -= 1.0;
            }
            th
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles
}

/// Sample `batches` independent Haar unitaries of size n; deterministic per
/// seed (each batch owns RNG stream `seed`/batch-index).
pub fn sample_haar(n: usize, batches: usize, seed: u64) -> EnsembleSample {
    assert!(n >= 1);
    let out: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            haar_eigenangles(n, &mut rng)
        })
        .collect();
    EnsembleSample { matrix_size: n, batches: out, seed }
}

/// Trace power moments for one exponent.
#[derive(Debug, Clone, Copy)]
pub struct TraceMoments {
    pub exponent: i64,
    pub mean_trace: Complex64,
    pub mean_trace_stderr: f64,
    pub mean_abs2: f64,
    pub mean_abs2_stderr: f64,
}

/// `Tr(g^j) = sum_i e(j theta_i)` per batch, with ensemble means.
pub fn trace_power(sample: &EnsembleSample, j: i64) -> TraceMoments {
    assert!(j != 0, "exponent must be nonzero");
    let vals: Vec<Complex64> = sample
        .batches
        .iter()
        .map(|batch| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &th in batch {
                acc += Complex64::from_polar(1.0, TAU * j as f64 * th);
            }
            acc
        })
        .collect();
    let n = vals.len() as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
    let var_c: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / n;
    let abs2: Vec<f64> = vals.iter().map(|v| v.norm_sqr()).collect();
    let mean_abs2 = abs2.iter().sum::<f64>() / n;
    let var_abs2 = abs2.iter().map(|v| (v - mean_abs2) * (v - mean_abs2)).sum::<f64>() / n;
    TraceMoments {
        exponent: j,
        mean_trace: mean,
        mean_trace_stderr: (var_c / n).sqrt(),
        mean_abs2,
        mean_abs2_stderr: (var_abs2 / n).sqrt(),
    }
}

/// Mixed Haar moment `E prod_j Tr(g^j)^{a_j} conj(Tr(g^j))^{b_j}`.
pub fn mixed_trace_moment(
    sample: &EnsembleSample,
    a: &[(i64, u32)],
    b: &[(i64, u32)],
) -> (Complex64, f64) {
    let vals: Vec<Complex64> = sample
        .batches
        .iter()
        .map(|batch| {
            let tr = |j: i64| -> Complex64 {
                let mut acc = Complex64::new(0.0, 0.0);
                for &th in batch {
                    acc += Complex64::from_polar(1.0, TAU * j as f64 * th);
                }
                acc
            };
            let mut prod = Complex64::new(1.0, 0.0);
            for &(j, p) in a {
                prod *= tr(j).powu(p);
            }
            for &(j, p) in b {
                prod *= tr(j).conj().powu(p);
            }
            prod
        })
        .collect();
    let n = vals.len() as f64;
    let mean: Complex64 = vals.iter().sum::<Complex64>() / n;
    let var: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

/// Counting statistics of scaled points `n theta_i` in [0, L).
#[derive(Debug, Clone, Copy)]
pub struct CountingStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_stderr: f64,
    pub variance_stderr: f64,
}

/// Costin-Lebowitz counting experiment on the scaled eigenangle process.
pub fn scaled_counting_clt(n: usize, l: f64, batches: usize, seed: u64) -> Result<CountingStats> {
    if l > n as f64 / 2.0 {
        return Err(Error::WindowExceedsTorus { window: l, torus: n as f64 / 2.0 });
    }
    let sample = sample_haar(n, batches, seed);
    Ok(counting_stats_from(&sample, l))
}

/// Counting statistics computed from an existing ensemble.
pub fn counting_stats_from(sample: &EnsembleSample, l: f64) -> CountingStats {
    let n = sample.matrix_size as f64;
    let counts: Vec<f64> = sample
        .batches
        .iter()
        .map(|batch| batch.iter().filter(|&&th| th >= 0.0 && n * th < l).count() as f64)
        .collect();
    let b = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / b;
    let m2 = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / b;
    let m4 = counts.iter().map(|c| (c - mean).powi(4)).sum::<f64>() / b;
    CountingStats {
        mean,
        variance: m2,
        mean_stderr: (m2 / b).sqrt(),
        variance_stderr: ((m4 - m2 * m2).max(0.0) / b).sqrt(),
    }
}

/// Smoothed statistic `Delta_eta = sum_i eta(n theta_i / L)` with periodic
/// wrap, per batch.
///
/// Compactly supported forms must fit the torus; band-limited forms decay
/// like x^-4 and enter through their periodization, truncated at |k| <= 3.
pub fn smoothed_values(sample: &EnsembleSample, eta: &TestFunction, l: f64) -> Result<Vec<f64>> {
    let n = sample.matrix_size as f64;
    let radius = eta.support_radius();
    let wraps: i32 = if radius.is_finite() {
        if l * radius > n / 2.0 {
            return Err(Error::WindowExceedsTorus { window: l * radius, torus: n / 2.0 });
        }
        1
    } else {
        3
    };
    Ok(sample
        .batches
        .iter()
        .map(|batch| {
            batch
                .iter()
                .map(|&th| {
                    let xi = n * th;
                    // periodization sum_k eta((xi + n k)/L); at L w <= n/2 only
                    // k = 0 can contribute, but wrap anyway
                    (-wraps..=wraps)
                        .map(|k| eta.eval((xi + n * k as f64) / l))
                        .sum::<f64>()
                })
                .sum()
        })
        .collect())
}

/// Moment report for the smoothed CUE statistic (the rmt column).
pub fn smoothed_statistic_clt(
    n: usize,
    eta: &TestFunction,
    l: f64,
    batches: usize,
    seed: u64,
    k_max: usize,
) -> Result<crate::meso::MomentReport> {
    let sample = sample_haar(n, batches, seed);
    let values = smoothed_values(&sample, eta, l)?;
    Ok(crate::meso::MomentReport {
        rows: crate::meso::moments_with_jackknife(&values, k_max, 100),
        samples: batches,
        seed,
    })
}

/// Monte Carlo centered product moment `E prod_l (Delta_{eta_l} - E Delta)`
/// on the scaled eigenangle process, with exact centering `E Delta = int eta`.
pub struct PairingCheck {
    pub empirical: f64,
    pub stderr: f64,
    /// Sine-kernel prediction: the pairing sum of the same test functions.
    pub prediction: f64,
}

pub fn pairing_moment_check(
    etas: &[TestFunction],
    n: usize,
    batches: usize,
    seed: u64,
) -> Result<PairingCheck> {
    let budget: f64 = etas.iter().map(|e| e.natural_band()).sum();
    if budget > 2.0 + 1e-9 {
        return Err(Error::SupportBudgetExceeded { total: budget, budget: 2.0 });
    }
    let sample = sample_haar(n, batches, seed);
    let per_eta: Vec<Vec<f64>> = etas
        .iter()
        .map(|eta| smoothed_values(&sample, eta, 1.0))
        .collect::<Result<_>>()?;
    let centers: Vec<f64> = etas.iter().map(|e| e.integral()).collect();
    let prods: Vec<f64> = (0..batches)
        .map(|b| {
            etas.iter()
                .enumerate()
                .map(|(i, _)| per_eta[i][b] - centers[i])
                .product()
        })
        .collect();
    let m = prods.iter().sum::<f64>() / batches as f64;
    let var = prods.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / batches as f64;
    let idx: Vec<usize> = (0..etas.len()).collect();
    let prediction = crate::arith::pairing_sum(etas, &idx, None)?;
    Ok(PairingCheck { empirical: m, stderr: (var / batches as f64).sqrt(), prediction })
}

/// Oscillatory covariance on the scaled eigenangle process:
/// `Delta_alpha = sum_i r(xi_i / n_meso) e(alpha xi_i)` for `xi_i = n theta_i`.
pub struct OscillatoryRmt {
    pub alphas: Vec<f64>,
    pub means: Vec<Complex64>,
    /// cov[i][j] = E (D_i - m_i)(D_j - m_j), with stderr.
    pub cov: Vec<Vec<(Complex64, f64)>>,
}

pub fn oscillatory_rmt_statistic(
    r: &TestFunction,
    alphas: &[f64],
    n_meso: f64,
    n: usize,
    batches: usize,
    seed: u64,
) -> Result<OscillatoryRmt> {
    let a_sum: f64 = alphas.iter().map(|a| a.abs()).sum();
    if a_sum >= 2.0 {
        return Err(Error::SupportBudgetExceeded { total: a_sum, budget: 2.0 });
    }
    let sample = sample_haar(n, batches, seed);
    let nn = n as f64;
    let m = alphas.len();
    let rows: Vec<Vec<Complex64>> = sample
        .batches()
        .iter()
        .map(|batch| {
            alphas
                .iter()
                .map(|&alpha| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &th in batch {
                        let xi = nn * th;
                        let w = r.eval(xi / n_meso);
                        if w != 0.0 {
                            acc += Complex64::from_polar(w, TAU * alpha * xi);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // exact process means: E Delta_alpha = int r(xi/n_meso) e(alpha xi) dxi
    // over the torus; with compact r-hat this is n_meso rhat(alpha n_meso),
    // evaluated here by quadrature against the truncated torus window.
    let means_exact: Vec<Complex64> = alphas
        .iter()
        .map(|&alpha| {
            let half = nn / 2.0;
            let re = quad::integrate(
                &|xi: f64| r.eval(xi / n_meso) * (TAU * alpha * xi).cos(),
                -half,
                half,
                1e-9,
                1e-10,
            );
            let im = quad::integrate(
                &|xi: f64| r.eval(xi / n_meso) * (TAU * alpha * xi).sin(),
                -half,
                half,
                1e-9,
                1e-10,
            );
            Complex64::new(re, im)
        })
        .collect();
    let b = rows.len() as f64;
    let mut cov = vec![vec![(Complex64::new(0.0, 0.0), 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            let prods: Vec<Complex64> = rows
                .iter()
                .map(|row| (row[i] - means_exact[i]) * (row[j] - means_exact[j]))
                .collect();
            let mean: Complex64 = prods.iter().sum::<Complex64>() / b;
            let var: f64 = prods.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / b;
            cov[i][j] = (mean, (var / b).sqrt());
        }
    }
    Ok(OscillatoryRmt { alphas: alphas.to_vec(), means: means_exact, cov })
}

/// Sine-kernel prediction for the (alpha, -alpha) covariance of the
/// oscillatory statistic: `int |alpha + v/n_meso| |rhat(v)|^2 n_meso dv`.
pub fn oscillatory_pair_prediction(r: &TestFunction, alpha: f64, n_meso: f64) -> Result<f64> {
    let spec = r.fourier();
    let d = r
        .fourier_support()
        .ok_or_else(|| Error::Unsupported("oscillatory prediction needs compact r-hat".into()))?;
    Ok(quad::integrate_with_splits(
        &|v: f64| (alpha + v / n_meso).abs() * spec.eval(v).norm_sqr() * n_meso,
        -d,
        d,
        &[-alpha * n_meso],
        1e-9,
        1e-11,
    ))
}
