//! The empirical engine: windowed linear statistics of zeros, dS integrals,
//! Monte Carlo moment estimation with jackknife errors, the Selberg residual
//! diagnostic, oscillatory mesoscopic statistics, and a numerical check of
//! the explicit formula.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::SieveTable;
use crate::corpus::{omega, ZeroCorpus};
use crate::error::{Error, Result};
use crate::quad;
use crate::testfn::TestFunction;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

/// Absolute tail tolerance for truncating slowly decaying oscillatory sums.
const OSC_TAIL_TOL: f64 = 1e-7;

/// Distribution of window centers.
#[derive(Debug, Clone)]
pub enum AveragingWeight {
    /// t uniform on [T, 2T].
    UniformOnT2T,
    /// Smooth density proportional to sinc^4((t/T - 3/2)/s) with a compactly
    /// supported transform, sampled by an inverse-CDF table on [1.02 T, 1.98 T].
    SmoothCompactSpectrum { shape: f64 },
}

impl AveragingWeight {
    pub fn smooth_default() -> Self {
        AveragingWeight::SmoothCompactSpectrum { shape: 0.11 }
    }

    /// Draw `count` centers in [T, 2T] deterministically from the seed.
    fn draw(&self, t_height: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            AveragingWeight::UniformOnT2T => {
                (0..count).map(|_| t_height * (1.0 + rng.gen::<f64>())).collect()
            }
            AveragingWeight::SmoothCompactSpectrum { shape } => {
                let m = 4096;
                let lo = 1.02;
                let hi = 1.98;
                let dens = |v: f64| {
                    let u = (v - 1.5) / shape;
                    let s = crate::testfn::sinc(u);
                    s * s * s * s
                };
                let mut cdf = Vec::with_capacity(m + 1);
                let mut acc = 0.0;
                cdf.push(0.0);
                let h = (hi - lo) / m as f64;
                let mut prev = dens(lo);
                for i in 1..=m {
                    let v = dens(lo + i as f64 * h);
                    acc += 0.5 * (prev + v) * h;
                    cdf.push(acc);
                    prev = v;
                }
                let total = acc;
                (0..count)
                    .map(|_| {
                        let u = rng.gen::<f64>() * total;
                        let idx = cdf.partition_point(|&c| c < u).clamp(1, m);
                        let c0 = cdf[idx - 1];
                        let c1 = cdf[idx];
                        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
                        t_height * (lo + (idx as f64 - 1.0 + frac) * h)
                    })
                    .collect()
            }
        }
    }
}

/// Parameters of a mesoscopic window experiment.
#[derive(Debug, Clone)]
pub struct WindowConfig {
    /// Base height T.
    pub t_height: f64,
    /// Window parameter n(T): expected zero count per window.
    pub n_of_t: f64,
    pub weight: AveragingWeight,
    pub samples: usize,
    pub seed: u64,
}

impl WindowConfig {
    pub fn new(t_height: f64, n_of_t: f64, samples: usize, seed: u64) -> Self {
        WindowConfig {
            t_height,
            n_of_t,
            weight: AveragingWeight::UniformOnT2T,
            samples,
            seed,
        }
    }

    /// Argument dilation log T / (2 pi n(T)); recomputed, never cached.
    pub fn scale(&self) -> f64 {
        self.t_height.ln() / (TAU * self.n_of_t)
    }

    fn validate(&self, corpus: &ZeroCorpus, reach: f64) -> Result<()> {
        if self.n_of_t < 1.0 {
            return Err(Error::InvalidInput("n(T) must be at least 1".into()));
        }
        let top = 2.0 * self.t_height + reach;
        if top > corpus.max_height() {
            return Err(Error::OutOfTabulatedRange {
                requested: top,
                max_height: corpus.max_height(),
            });
        }
        Ok(())
    }
}

/// Window reach in ordinate units for a test function under this config.
fn window_reach(eta: &TestFunction, cfg: &WindowConfig) -> Result<f64> {
    let r = eta.support_radius();
    if !r.is_finite() {
        return Err(Error::Unsupported(
            "windowed statistics need compact spatial support".into(),
        ));
    }
    Ok(r / cfg.scale())
}

/// `Delta_eta(t) = sum_gamma eta(scale (gamma - t))`: exact finite sum over
/// the zeros in the dilated support.
pub fn linear_statistic(
    corpus: &ZeroCorpus,
    eta: &TestFunction,
    t: f64,
    cfg: &WindowConfig,
) -> Result<f64> {
    let reach = window_reach(eta, cfg)?;
    let s = cfg.scale();
    let zeros = corpus.zeros_in_window(t - reach, t + reach)?;
    Ok(zeros.iter().map(|&g| eta.eval(s * (g - t))).sum())
}

/// Density term `int eta(scale (xi - t)) Omega(xi)/2pi dxi` to 1e-8 absolute.
pub fn density_term(eta: &TestFunction, t: f64, cfg: &WindowConfig) -> Result<f64> {
    let reach = window_reach(eta, cfg)?;
    let s = cfg.scale();
    let f = |xi: f64| eta.eval(s * (xi - t)) * omega(xi) / TAU;
    // subdivide at the support edges and kinks mapped into xi-coordinates
    let mut splits = vec![t];
    let w = eta.support_radius();
    for edge in [-w, -0.5 * w, 0.5 * w, w] {
        splits.push(t + edge / s);
    }
    if let TestFunction::PiecewiseLinear { knots } = eta {
        // enough structure that per-knot splits pay off
        for &(x, _) in knots.iter().step_by(16) {
            splits.push(t + x / s);
        }
    }
    Ok(quad::integrate_with_splits(
        &f,
        t - reach,
        t + reach,
        &splits,
        1e-9,
        1e-8,
    ))
}

/// `int eta(scale (xi - t)) dS(xi)`: the linear statistic with the smooth
/// density subtracted.
pub fn ds_integral(
    corpus: &ZeroCorpus,
    eta: &TestFunction,
    t: f64,
    cfg: &WindowConfig,
) -> Result<f64> {
    Ok(linear_statistic(corpus, eta, t, cfg)? - density_term(eta, t, cfg)?)
}

/// One row of a moment report.
#[derive(Debug, Clone, Copy)]
pub struct MomentRow {
    pub k: usize,
    /// k = 1: the sample mean. k >= 2: the centered raw moment m_k.
    pub empirical_raw: f64,
    /// m_k / m_2^(k/2); zero for k = 1, one for k = 2 by construction.
    pub empirical_centered_normalized: f64,
    /// Jackknife standard error of the quantity each criterion reads:
    /// the mean for k = 1, the raw variance for k = 2, the normalized
    /// moment for k >= 3.
    pub mc_stderr: f64,
    /// Standard normal moment c_k = (k-1)!! for even k, 0 for odd k.
    pub gaussian_prediction: f64,
    /// Prime-sum route prediction (raw scale), when computed.
    pub arithmetic_prediction: Option<f64>,
    /// Random-matrix route prediction (raw scale), when computed.
    pub rmt_prediction: Option<f64>,
}

/// Moment table for one experiment, deterministic given the seed.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub samples: usize,
    pub seed: u64,
}

pub fn gaussian_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        let mut c = 1.0;
        let mut j = k as u64;
        while j > 1 {
            c *= (j - 1) as f64;
            j -= 2;
        }
        c
    }
}

/// Jackknife (leave-one-block-out, `blocks` blocks) moment estimation.
///
/// Returns rows for k = 1..=k_max from the raw sample values.
pub fn moments_with_jackknife(values: &[f64], k_max: usize, blocks: usize) -> Vec<MomentRow> {
    assert!(k_max >= 1 && k_max <= 8);
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    let blocks = blocks.min(n).max(2);
    let pilot = values.iter().sum::<f64>() / n as f64;

    // per-block power sums of y = x - pilot
    let block_len = (n + blocks - 1) / blocks;
    let nblocks = (n + block_len - 1) / block_len;
    let mut pow_sums = vec![[0.0f64; 9]; nblocks];
    let mut counts = vec![0usize; nblocks];
    for (i, &x) in values.iter().enumerate() {
        let b = i / block_len;
        let y = x - pilot;
        let mut p = 1.0;
        for j in 1..=8 {
            p *= y;
            pow_sums[b][j] += p;
        }
        counts[b] += 1;
    }
    let mut total = [0.0f64; 9];
    for b in 0..nblocks {
        for j in 1..=8 {
            total[j] += pow_sums[b][j];
        }
    }

    // centered moments from raw power sums of y with mean shift mu
    let centered = |raw: &[f64; 9], count: f64, k: usize| -> f64 {
        let mu = raw[1] / count;
        let mut acc = 0.0;
        for j in 0..=k {
            let raw_j = if j == 0 { count } else { raw[j] };
            acc += binomial(k, j) * (raw_j / count) * (-mu).powi((k - j) as i32);
        }
        acc
    };

    let estimate = |raw: &[f64; 9], count: f64| -> (f64, Vec<f64>, Vec<f64>) {
        let mean = pilot + raw[1] / count;
        let mut m = vec![0.0; k_max + 1];
        for k in 2..=k_max {
            m[k] = centered(raw, count, k);
        }
        let m2 = if k_max >= 2 { m[2] } else { 0.0 };
        let mut norm = vec![0.0; k_max + 1];
        for k in 3..=k_max {
            norm[k] = m[k] / m2.powf(k as f64 / 2.0);
        }
        (mean, m, norm)
    };

    let (mean_full, m_full, norm_full) = estimate(&total, n as f64);

    // leave-one-block-out replicates
    let mut reps: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(nblocks);
    for b in 0..nblocks {
        let mut raw = [0.0f64; 9];
        for j in 1..=8 {
            raw[j] = total[j] - pow_sums[b][j];
        }
        let cnt = (n - counts[b]) as f64;
        reps.push(estimate(&raw, cnt));
    }
    let g = nblocks as f64;
    let jack_se = |pick: &dyn Fn(&(f64, Vec<f64>, Vec<f64>)) -> f64| -> f64 {
        let vals: Vec<f64> = reps.iter().map(|r| pick(r)).collect();
        let mean = vals.iter().sum::<f64>() / g;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * (g - 1.0) / g;
        var.sqrt()
    };

    (1..=k_max)
        .map(|k| {
            let (raw, norm, se) = match k {
                1 => (mean_full, 0.0, jack_se(&|r| r.0)),
                2 => (m_full[2], 1.0, jack_se(&|r| r.1[2])),
                _ => (m_full[k], norm_full[k], jack_se(&move |r| r.2[k])),
            };
            MomentRow {
                k,
                empirical_raw: raw,
                empirical_centered_normalized: norm,
                mc_stderr: se,
                gaussian_prediction: gaussian_moment(k),
                arithmetic_prediction: None,
                rmt_prediction: None,
            }
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Window centers drawn from the configured weight, deterministic per seed.
pub fn draw_centers(cfg: &WindowConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    cfg.weight.draw(cfg.t_height, cfg.samples, &mut rng)
}

/// Draw window centers and return per-sample dS integrals, deterministic
/// given the seed; evaluation is parallel over the drawn centers.
pub fn sample_ds_values(
    corpus: &ZeroCorpus,
    eta: &TestFunction,
    cfg: &WindowConfig,
) -> Result<Vec<f64>> {
    let reach = window_reach(eta, cfg)?;
    cfg.validate(corpus, reach)?;
    if cfg.samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    let centers = draw_centers(cfg);
    centers
        .par_iter()
        .map(|&t| ds_integral(corpus, eta, t, cfg))
        .collect()
}

/// Raw linear-statistic values (no density subtraction) over the weight.
pub fn sample_linear_values(
    corpus: &ZeroCorpus,
    eta: &TestFunction,
    cfg: &WindowConfig,
) -> Result<Vec<f64>> {
    let reach = window_reach(eta, cfg)?;
    cfg.validate(corpus, reach)?;
    let centers = draw_centers(cfg);
    centers
        .par_iter()
        .map(|&t| linear_statistic(corpus, eta, t, cfg))
        .collect()
}

/// Monte Carlo moment report for the dS statistic.
pub fn sample_moments(
    corpus: &ZeroCorpus,
    eta: &TestFunction,
    cfg: &WindowConfig,
    k_max: usize,
) -> Result<MomentReport> {
    if k_max > 8 {
        return Err(Error::InvalidInput("k_max is capped at 8".into()));
    }
    let values = sample_ds_values(corpus, eta, cfg)?;
    Ok(MomentReport {
        rows: moments_with_jackknife(&values, k_max, 100),
        samples: cfg.samples,
        seed: cfg.seed,
    })
}

/// Selberg approximation residual
/// `S(t) + (1/pi) sum_{p <= T^(1/k)} sin(t log p)/sqrt(p)`.
pub fn selberg_residual(
    corpus: &ZeroCorpus,
    t: f64,
    k: usize,
    t_height: f64,
    sieve: &SieveTable,
) -> Result<f64> {
    let bound = t_height.powf(1.0 / k as f64);
    if bound > sieve.limit() as f64 {
        return Err(Error::SieveTooSmall { needed: bound.ceil() as u64, limit: sieve.limit() });
    }
    let mut prime_sum = 0.0;
    let mut p = 2u64;
    while (p as f64) <= bound {
        if sieve.is_prime(p) {
            prime_sum += (t * (p as f64).ln()).sin() / (p as f64).sqrt();
        }
        p += 1;
    }
    Ok(corpus.s_of(t)? + prime_sum / PI)
}

/// Oscillatory statistics `sum_i r(xi_i/n) e(alpha xi_i)` at rescaled points
/// `xi_i = (log T / 2 pi)(gamma - t)`, one value per alpha.
pub fn oscillatory_statistic(
    corpus: &ZeroCorpus,
    r: &TestFunction,
    alphas: &[f64],
    cfg: &WindowConfig,
    t: f64,
) -> Result<Vec<Complex64>> {
    let s_mic = cfg.t_height.ln() / TAU; // microscopic rescaling log T / 2 pi
    let n = cfg.n_of_t;
    // r has compact Fourier support, so spatially it decays like x^-4;
    // truncate where the summed tail drops below the Monte Carlo floor
    let reach_x = effective_spatial_radius(r, OSC_TAIL_TOL) * n;
    let lo = t - reach_x / s_mic;
    let hi = t + reach_x / s_mic;
    let zeros = corpus.zeros_in_window(lo, hi)?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut acc = Complex64::new(0.0, 0.0);
        for &g in zeros {
            let xi = s_mic * (g - t);
            let w = r.eval(xi / n);
            if w != 0.0 {
                acc += Complex64::from_polar(w, TAU * alpha * xi);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Radius beyond which the absolute spatial tail of `r` summed against the
/// local zero density stays below `tol`.
fn effective_spatial_radius(r: &TestFunction, tol: f64) -> f64 {
    let w = r.support_radius();
    if w.is_finite() {
        return w;
    }
    match r {
        TestFunction::BandlimitedBump { bandwidth } => {
            // |r(x)| <= 96 bandwidth / (tau bandwidth x)^4; sum against unit density
            let c = 96.0 * bandwidth / (TAU * bandwidth).powi(4);
            (3.0 * c / tol).powf(1.0 / 3.0).max(8.0)
        }
        _ => unreachable!(),
    }
}

/// Centered covariance table of oscillatory statistics over the weight.
pub struct OscillatoryCovariance {
    pub alphas: Vec<f64>,
    pub means: Vec<Complex64>,
    /// cov[i][j] = E (D_i - m_i)(D_j - m_j) (no conjugation), with stderr.
    pub cov: Vec<Vec<(Complex64, f64)>>,
}

pub fn oscillatory_covariance(
    corpus: &ZeroCorpus,
    r: &TestFunction,
    alphas: &[f64],
    cfg: &WindowConfig,
) -> Result<OscillatoryCovariance> {
    let a_sum: f64 = alphas.iter().map(|a| a.abs()).sum();
    if a_sum >= 2.0 {
        return Err(Error::SupportBudgetExceeded { total: a_sum, budget: 2.0 });
    }
    let reach_x = effective_spatial_radius(r, OSC_TAIL_TOL) * cfg.n_of_t;
    cfg.validate(corpus, reach_x / (cfg.t_height.ln() / TAU))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centers = cfg.weight.draw(cfg.t_height, cfg.samples, &mut rng);
    let rows: Vec<Vec<Complex64>> = centers
        .par_iter()
        .map(|&t| oscillatory_statistic(corpus, r, alphas, cfg, t))
        .collect::<Result<_>>()?;
    let m = alphas.len();
    let nn = rows.len() as f64;
    let mut means = vec![Complex64::new(0.0, 0.0); m];
    for row in &rows {
        for (i, v) in row.iter().enumerate() {
            means[i] += v;
        }
    }
    for v in means.iter_mut() {
        *v /= nn;
    }
    let mut cov = vec![vec![(Complex64::new(0.0, 0.0), 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            let prods: Vec<Complex64> = rows
                .iter()
                .map(|row| (row[i] - means[i]) * (row[j] - means[j]))
                .collect();
            let mean: Complex64 = prods.iter().sum::<Complex64>() / nn;
            let var: f64 = prods.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / nn;
            cov[i][j] = (mean, (var / nn).sqrt());
        }
    }
    Ok(OscillatoryCovariance { alphas: alphas.to_vec(), means, cov })
}

/// Numerical explicit-formula check with Gaussian test functions
/// `g(x) = exp(-(x/a)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitFormulaCheck {
    /// Zero-side: `sum_{|gamma| <= cutoff} ghat(gamma/2pi)
    ///  - int_{|xi| <= cutoff} ghat(xi/2pi) Omega(xi)/2pi dxi`.
    pub lhs: f64,
    /// Prime-side: `int [g(x)+g(-x)] e^{x/2} dx
    ///  - sum_{n <= cutoff} Lambda(n)/sqrt(n) [g(log n)+g(-log n)]`.
    pub rhs: f64,
    pub residual: f64,
}

pub fn verify_explicit_formula(
    corpus: &ZeroCorpus,
    sieve: &SieveTable,
    a: f64,
    zero_cutoff: f64,
    prime_cutoff: u64,
) -> Result<ExplicitFormulaCheck> {
    if !(a > 0.0 && a <= 2.0) {
        return Err(Error::Unsupported(
            "gaussian width must satisfy 0 < a <= 2 for the growth conditions".into(),
        ));
    }
    if zero_cutoff > corpus.max_height() {
        return Err(Error::OutOfTabulatedRange {
            requested: zero_cutoff,
            max_height: corpus.max_height(),
        });
    }
    if prime_cutoff > sieve.limit() {
        return Err(Error::SieveTooSmall { needed: prime_cutoff, limit: sieve.limit() });
    }
    // ghat(xi/2pi) = a sqrt(pi) exp(-a^2 xi^2 / 4), symmetrized over +-gamma
    let ghat = |xi: f64| a * PI.sqrt() * (-0.25 * a * a * xi * xi).exp();
    let upto = corpus.count_upto(zero_cutoff)?;
    let zero_sum: f64 = 2.0 * corpus.ordinates()[..upto].iter().map(|&g| ghat(g)).sum::<f64>();
    let upper = zero_cutoff.min(80.0 / a);
    let splits: Vec<f64> = (1..12).map(|i| i as f64 * upper / 12.0).collect();
    let om_int =
        2.0 * quad::integrate_with_splits(&|xi| ghat(xi) * omega(xi) / TAU, 0.0, upper, &splits, 1e-10, 1e-11);
    let lhs = zero_sum - om_int;

    let continuous = 2.0 * a * PI.sqrt() * (a * a / 16.0).exp();
    let mut prime_sum = 0.0;
    for n in 2..=prime_cutoff {
        let lam = sieve.lambda(n);
        if lam > 0.0 {
            let ln_n = (n as f64).ln();
            let g_val = (-(ln_n / a) * (ln_n / a)).exp();
            prime_sum += lam / (n as f64).sqrt() * 2.0 * g_val;
            if ln_n / a > 9.0 {
                break;
            }
        }
    }
    let rhs = continuous - prime_sum;
    Ok(ExplicitFormulaCheck { lhs, rhs, residual: lhs - rhs })
}
