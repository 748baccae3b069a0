//! Test functions, their Fourier transforms, the variance functional,
//! Fourier-truncation smoothing, and maximal envelopes.
//!
//! Transform convention: `etahat(xi) = integral e(-x xi) eta(x) dx` with
//! `e(x) = exp(2 pi i x)`. All closed forms below are real and even except
//! piecewise-linear input, whose transform is complex Hermitian.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

/// sin(pi u)/(pi u), the transform of the unit indicator.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        let v = PI * u;
        1.0 - v * v / 6.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// Transform of the unit-width C^2 bump `(1-u^2)^3` on [-1, 1]:
/// `J(a) = int_{-1}^{1} (1-u^2)^3 cos(a u) du`.
///
/// Series for small |a|, closed form beyond; both branches agree to ~1e-12
/// at the seam.
pub fn bump_transform_kernel(a: f64) -> f64 {
    let a = a.abs();
    if a < 2.0 {
        let a2 = a * a;
        let mut term = 1.0 / 105.0;
        let mut sum = term;
        for k in 1..=14u32 {
            let k = k as f64;
            term *= -a2 / (2.0 * k * (2.0 * k + 7.0));
            sum += term;
        }
        96.0 * sum
    } else {
        let (s, c) = a.sin_cos();
        let a4 = a.powi(4);
        let a5 = a4 * a;
        let a6 = a5 * a;
        let a7 = a6 * a;
        96.0 * (c / a4 - 6.0 * s / a5 - 15.0 * c / a6 + 15.0 * s / a7)
    }
}

/// A real test function eta.
///
/// The first four forms are compactly supported in space. `BandlimitedBump`
/// is the dual object: its transform is the compactly supported C^2 bump,
/// which the prime-sum operations require; in space it decays like x^-4.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// 1 on [-w, w), 0 elsewhere.
    Indicator { half_width: f64 },
    /// Triangle (1 - |x|/w)+ .
    Hat { half_width: f64 },
    /// C^2 polynomial bump (1 - (x/w)^2)^3 on [-w, w].
    SmoothBump { half_width: f64 },
    /// Linear interpolation through ascending knots, zero outside.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// eta(x) = delta * J(2 pi delta x); transform (1 - (xi/delta)^2)^3 on [-delta, delta].
    BandlimitedBump { bandwidth: f64 },
}

impl TestFunction {
    pub fn indicator(half_width: f64) -> Self {
        assert!(half_width > 0.0);
        TestFunction::Indicator { half_width }
    }

    pub fn hat(half_width: f64) -> Self {
        assert!(half_width > 0.0);
        TestFunction::Hat { half_width }
    }

    pub fn smooth_bump(half_width: f64) -> Self {
        assert!(half_width > 0.0);
        TestFunction::SmoothBump { half_width }
    }

    pub fn bandlimited_bump(bandwidth: f64) -> Self {
        assert!(bandwidth > 0.0);
        TestFunction::BandlimitedBump { bandwidth }
    }

    /// Knots must be strictly ascending with zero boundary values.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("piecewise-linear needs at least 2 knots".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput("knots not strictly ascending".into()));
            }
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 0.0 {
            return Err(Error::InvalidInput("boundary knot values must be zero".into()));
        }
        Ok(TestFunction::PiecewiseLinear { knots })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Indicator { half_width } => {
                // half-open support [-w, w), matching the window convention
                if x >= -half_width && x < *half_width {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Hat { half_width } => (1.0 - (x / half_width).abs()).max(0.0),
            TestFunction::SmoothBump { half_width } => {
                let u = x / half_width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let v = 1.0 - u * u;
                    v * v * v
                }
            }
            TestFunction::PiecewiseLinear { knots } => {
                let n = knots.len();
                if x < knots[0].0 || x > knots[n - 1].0 {
                    return 0.0;
                }
                let i = knots.partition_point(|k| k.0 <= x).min(n - 1);
                if i == 0 {
                    return knots[0].1;
                }
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
            TestFunction::BandlimitedBump { bandwidth } => {
                bandwidth * bump_transform_kernel(TAU * bandwidth * x)
            }
        }
    }

    /// Spatial support radius; infinite for the band-limited form.
    pub fn support_radius(&self) -> f64 {
        match self {
            TestFunction::Indicator { half_width }
            | TestFunction::Hat { half_width }
            | TestFunction::SmoothBump { half_width } => *half_width,
            TestFunction::PiecewiseLinear { knots } => {
                knots[0].0.abs().max(knots[knots.len() - 1].0.abs())
            }
            TestFunction::BandlimitedBump { .. } => f64::INFINITY,
        }
    }

    /// Exact Fourier support radius, when the transform is compactly supported.
    pub fn fourier_support(&self) -> Option<f64> {
        match self {
            TestFunction::BandlimitedBump { bandwidth } => Some(*bandwidth),
            _ => None,
        }
    }

    /// Natural spectral band: the exact Fourier support when one exists,
    /// else the first-lobe bandwidth of the closed form. Matches the
    /// convention that Hat(1) is treated as band-limited to [-1, 1].
    pub fn natural_band(&self) -> f64 {
        match self {
            TestFunction::BandlimitedBump { bandwidth } => *bandwidth,
            TestFunction::Hat { half_width } => 1.0 / half_width,
            TestFunction::SmoothBump { half_width } => 1.0 / half_width,
            TestFunction::Indicator { .. } => f64::INFINITY,
            TestFunction::PiecewiseLinear { knots } => {
                let span = knots[knots.len() - 1].0 - knots[0].0;
                2.0 / span.max(1e-9)
            }
        }
    }

    /// Radius containing all but `tail` of the transform's pair-integral mass;
    /// exact support when available.
    pub fn effective_fourier_radius(&self, tail: f64) -> f64 {
        match self {
            TestFunction::BandlimitedBump { bandwidth } => *bandwidth,
            TestFunction::Indicator { .. } => {
                // |etahat| ~ 1/(pi x): the pair integral diverges
                // logarithmically, so a window is mandatory.
                f64::INFINITY
            }
            TestFunction::Hat { half_width } => {
                // |etahat| <= 1/(pi^2 w x^2): pair tail ~ 1/(2 pi^4 w^2 R^2)
                (1.0 / (2.0 * PI.powi(4) * half_width * half_width * tail)).sqrt().max(2.0 / half_width)
            }
            TestFunction::SmoothBump { half_width } => {
                // transform decays like x^-4; x^-7 pair tail
                let w = half_width;
                (200.0 / (TAU * w).powi(4) / tail).powf(1.0 / 6.0).max(2.0 / w) / 1.0
            }
            TestFunction::PiecewiseLinear { knots } => {
                // jump-free PWL transform decays like x^-2 (same as Hat)
                let span = knots[knots.len() - 1].0 - knots[0].0;
                (1.0 / (2.0 * PI.powi(4) * span.max(1e-6) * tail)).sqrt().max(4.0 / span.max(1e-6))
            }
        }
    }

    /// Total variation: exact for closed forms, knot-sum for piecewise
    /// linear, numerical extremum scan for the band-limited form.
    pub fn total_variation(&self) -> f64 {
        match self {
            TestFunction::Indicator { .. } => 2.0,
            TestFunction::Hat { .. } => 2.0,
            TestFunction::SmoothBump { .. } => 2.0,
            TestFunction::PiecewiseLinear { knots } => {
                knots.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum()
            }
            TestFunction::BandlimitedBump { bandwidth } => {
                // scan |eta| extrema out to where the x^-4 envelope is dead
                let d = *bandwidth;
                let xmax = (96.0 / (TAU * d).powi(4) / 1e-12).powf(1.0 / 4.0) / d.min(1.0).max(1e-9);
                let n = 400_000usize;
                let h = 2.0 * xmax / n as f64;
                let mut tv = 0.0;
                let mut prev = self.eval(-xmax);
                for i in 1..=n {
                    let v = self.eval(-xmax + i as f64 * h);
                    tv += (v - prev).abs();
                    prev = v;
                }
                tv
            }
        }
    }

    /// integral of eta over the line.
    pub fn integral(&self) -> f64 {
        match self {
            TestFunction::Indicator { half_width } => 2.0 * half_width,
            TestFunction::Hat { half_width } => *half_width,
            TestFunction::SmoothBump { half_width } => 32.0 * half_width / 35.0,
            TestFunction::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| 0.5 * (w[1].1 + w[0].1) * (w[1].0 - w[0].0))
                .sum(),
            TestFunction::BandlimitedBump { .. } => 1.0,
        }
    }

    /// Whether the form has a bounded second derivative.
    pub fn is_c2(&self) -> bool {
        matches!(
            self,
            TestFunction::SmoothBump { .. } | TestFunction::BandlimitedBump { .. }
        )
    }

    /// The transform evaluator.
    pub fn fourier(&self) -> Spectrum {
        Spectrum { form: self.clone() }
    }
}

/// Evaluator for the Fourier transform of a [`TestFunction`].
///
/// Closed forms throughout; the piecewise-linear transform is an exact
/// segment sum, stable at small frequencies through a series branch.
#[derive(Debug, Clone)]
pub struct Spectrum {
    form: TestFunction,
}

impl Spectrum {
    pub fn eval(&self, xi: f64) -> Complex64 {
        match &self.form {
            TestFunction::Indicator { half_width } => {
                Complex64::new(2.0 * half_width * sinc(2.0 * half_width * xi), 0.0)
            }
            TestFunction::Hat { half_width } => {
                let s = sinc(half_width * xi);
                Complex64::new(half_width * s * s, 0.0)
            }
            TestFunction::SmoothBump { half_width } => Complex64::new(
                half_width * bump_transform_kernel(TAU * half_width * xi),
                0.0,
            ),
            TestFunction::BandlimitedBump { bandwidth } => {
                let u = xi / bandwidth;
                if u.abs() >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let v = 1.0 - u * u;
                    Complex64::new(v * v * v, 0.0)
                }
            }
            TestFunction::PiecewiseLinear { knots } => pwl_transform(knots, xi),
        }
    }

    pub fn abs2(&self, xi: f64) -> f64 {
        self.eval(xi).norm_sqr()
    }

    /// Exact Fourier support radius, when one exists.
    pub fn support_radius(&self) -> Option<f64> {
        self.form.fourier_support()
    }

    /// Spacing of the transform's known zero lattice, used as quadrature splits.
    fn split_period(&self) -> f64 {
        match &self.form {
            TestFunction::Indicator { half_width } => 0.5 / half_width,
            TestFunction::Hat { half_width } => 1.0 / half_width,
            TestFunction::SmoothBump { half_width } => 0.5 / half_width,
            TestFunction::BandlimitedBump { bandwidth } => *bandwidth,
            TestFunction::PiecewiseLinear { knots } => {
                let span = knots[knots.len() - 1].0 - knots[0].0;
                (1.0 / span).min(1.0)
            }
        }
    }
}

fn phi01(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 0.5 {
        let z = Complex64::new(0.0, -theta);
        let mut p0 = Complex64::new(0.0, 0.0);
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..=14u32 {
            let kf = k as f64;
            if k > 0 {
                fact *= kf;
                pw *= z;
            }
            p0 += pw / (fact * (kf + 1.0));
            p1 += pw / (fact * (kf + 2.0));
        }
        (p0, p1)
    } else {
        let it = Complex64::new(0.0, theta);
        let e = (-it).exp();
        let p0 = (Complex64::new(1.0, 0.0) - e) / it;
        let p1 = (p0 - e) / it;
        (p0, p1)
    }
}

/// Exact transform of a piecewise-linear function via per-segment antiderivatives.
fn pwl_transform(knots: &[(f64, f64)], xi: f64) -> Complex64 {
    let omega = TAU * xi;
    let mut acc = Complex64::new(0.0, 0.0);
    for w in knots.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let len = x1 - x0;
        let slope = (y1 - y0) / len;
        let theta = omega * len;
        let (p0, p1) = phi01(theta);
        let seg = p0 * (y0 * len) + p1 * (slope * len * len);
        let phase = Complex64::new(0.0, -omega * x0).exp();
        acc += phase * seg;
    }
    acc
}

/// Variance functional: `int_{-n}^{n} |x| |etahat(x)|^2 dx`.
pub fn variance_functional(eta: &TestFunction, n: f64) -> f64 {
    assert!(n > 0.0, "window must be positive");
    let spec = eta.fourier();
    let upper = match spec.support_radius() {
        Some(d) => n.min(d),
        None => n,
    };
    let period = spec.split_period();
    let splits: Vec<f64> = (1..)
        .map(|k| k as f64 * period)
        .take_while(|x| *x < upper)
        .take(100_000)
        .collect();
    let f = |x: f64| x * spec.abs2(x);
    2.0 * quad::integrate_with_splits(&f, 0.0, upper, &splits, 1e-8, 1e-12)
}

/// Pair integral `int_{-R}^{R} |x| etahat_i(x) etahat_j(-x) dx`.
///
/// R is the common exact Fourier support when both sides have one,
/// otherwise a tail-controlled effective radius, optionally clipped by a
/// caller window. Pairs without spectral decay (indicators) need a window:
/// the full-line integral diverges.
pub fn pair_integral(a: &TestFunction, b: &TestFunction, window: Option<f64>) -> Result<f64> {
    let sa = a.fourier();
    let sb = b.fourier();
    let ra = a.effective_fourier_radius(1e-9);
    let rb = b.effective_fourier_radius(1e-9);
    let mut upper = ra.min(rb);
    if let Some(w) = window {
        upper = upper.min(w);
    }
    if !upper.is_finite() {
        return Err(Error::Unsupported(
            "divergent pair integral: supply a finite window".into(),
        ));
    }
    let period = sa.split_period().min(sb.split_period());
    let splits: Vec<f64> = (1..)
        .map(|k| k as f64 * period)
        .take_while(|x| *x < upper)
        .take(200_000)
        .collect();
    let f = |x: f64| {
        let v = sa.eval(x) * sb.eval(-x) + sa.eval(-x) * sb.eval(x);
        debug_assert!(v.im.abs() < 1e-9 * (1.0 + v.re.abs()));
        x * v.re
    };
    Ok(quad::integrate_with_splits(&f, 0.0, upper, &splits, 1e-8, 1e-12))
}

/// Fourier-side smoothing kernel: `K` is the rescaled self-convolution of a
/// triangle (a cubic B-spline), so `K(0) = 1`, `K` is supported in
/// `[-rho, rho]`, and the spatial side is the nonnegative squared-Fejer shape
/// `(3 rho / 4) sinc^4(rho x / 2)` decaying like x^-4.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingKernel {
    rho: f64,
}

impl SmoothingKernel {
    pub fn new(rho: f64) -> Self {
        assert!(rho > 0.0 && rho < 1.0);
        SmoothingKernel { rho }
    }

    /// Support radius 1/(k+1), strictly inside the (-1/k, 1/k) requirement
    /// for order-k moment experiments.
    pub fn for_order(k: usize) -> Self {
        SmoothingKernel::new(1.0 / (k as f64 + 1.0))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// K(xi): 1 at 0, supported in [-rho, rho].
    pub fn profile(&self, xi: f64) -> f64 {
        let u = 2.0 * xi.abs() / self.rho;
        if u >= 2.0 {
            0.0
        } else if u <= 1.0 {
            (4.0 - 6.0 * u * u + 3.0 * u * u * u) / 4.0
        } else {
            let v = 2.0 - u;
            v * v * v / 4.0
        }
    }

    /// Spatial side: inverse transform of `profile`, nonnegative.
    pub fn spatial(&self, x: f64) -> f64 {
        let s = sinc(0.5 * self.rho * x);
        0.75 * self.rho * s * s * s * s
    }

    /// `int |K_check(x)| dx` = 1 exactly: the spatial side is nonnegative
    /// with total mass K(0).
    pub fn spatial_l1(&self) -> f64 {
        1.0
    }
}

/// Fourier truncation: returns a piecewise-linear approximation of
/// `K_check_H * eta`, sampled finely enough that the L^1 gap to the exact
/// convolution is below ~1e-6. The transform of the result tracks
/// `K(xi/H) etahat(xi)` to the same order.
pub fn smooth_truncate(eta: &TestFunction, h: f64, kernel: &SmoothingKernel) -> TestFunction {
    assert!(h > 0.0);
    let spec = eta.fourier();
    let a = match spec.support_radius() {
        Some(d) => d.min(kernel.rho * h),
        None => kernel.rho * h,
    };
    let w = eta.support_radius().min(1e3);

    // spatial grid: fine core, coarse x^-4 tail
    let core = w + 3.0;
    let l1_mass: f64 = eta.integral().abs().max(eta.total_variation());
    let tail_budget = 3e-7;
    let d_tail = (8.0 * l1_mass / (tail_budget * PI.powi(4) * (kernel.rho * h).powi(3)))
        .powf(1.0 / 3.0)
        .max(2.0);
    let x_end = (w + d_tail).max(core + 0.5);

    // curvature-based core step from int (2 pi xi)^2 K |etahat| dxi
    let probe = 256;
    let mut c2 = 0.0;
    for i in 0..=probe {
        let xi = a * i as f64 / probe as f64;
        let weight = if i == 0 || i == probe { 0.5 } else { 1.0 };
        c2 += weight * (TAU * xi).powi(2) * kernel.profile(xi / h) * spec.eval(xi).norm();
    }
    c2 *= 2.0 * a / probe as f64;
    let hc = (8.0 * 2e-7 / c2.max(1e-9)).sqrt().clamp(5e-5, 0.02);

    let mut xs: Vec<f64> = Vec::new();
    let mut x = -x_end;
    while x < -core {
        xs.push(x);
        x += 0.25;
    }
    x = -core;
    while x <= core {
        xs.push(x);
        x += hc;
    }
    x = core + 0.25;
    while x <= x_end {
        xs.push(x);
        x += 0.25;
    }
    xs.push(x_end + 0.25);

    // Simpson nodes in xi, shared across all x evaluations
    let xmax = x_end + 0.25;
    let h_xi = (180.0 * 1e-9 / (a.max(1e-9) * (TAU * (xmax + w + 1.0)).powi(4)))
        .powf(0.25)
        .clamp(1e-5, 0.05);
    let mut m = (a / h_xi).ceil() as usize;
    m = m.clamp(512, 60_000);
    if m % 2 == 1 {
        m += 1;
    }
    let dxi = a / m as f64;
    let mut wre = Vec::with_capacity(m + 1);
    let mut wim = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let xi = j as f64 * dxi;
        let sw = if j == 0 || j == m {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let v = spec.eval(xi) * (kernel.profile(xi / h) * sw * dxi / 3.0);
        wre.push(v.re);
        wim.push(v.im);
    }

    // conv(x) = 2 int_0^A Re[K etahat e(x xi)] dxi, phase by rotation recurrence
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for &xv in &xs {
        let (dsin, dcos) = (TAU * xv * dxi).sin_cos();
        let mut cosv = 1.0;
        let mut sinv = 0.0;
        let mut sum = 0.0;
        for j in 0..=m {
            sum += wre[j] * cosv - wim[j] * sinv;
            let c = cosv * dcos - sinv * dsin;
            sinv = sinv * dcos + cosv * dsin;
            cosv = c;
        }
        knots.push((xv, 2.0 * sum));
    }
    let last = knots.len() - 1;
    knots[0].1 = 0.0;
    knots[last].1 = 0.0;
    TestFunction::piecewise_linear(knots).expect("grid is ascending")
}

/// Step-function majorant of |eta| on the interval lattice
/// `I_k(nu) = [k nu - k/2, k nu + k/2)`.
#[derive(Debug, Clone)]
pub struct StepFunction {
    width: f64,
    first_nu: i64,
    sups: Vec<f64>,
}

impl StepFunction {
    pub fn width(&self) -> f64 {
        self.width
    }

    /// (nu, sup) pairs with nonzero sup.
    pub fn steps(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.sups
            .iter()
            .enumerate()
            .map(move |(i, &s)| (self.first_nu + i as i64, s))
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let nu = (xi / self.width + 0.5).floor() as i64;
        if nu < self.first_nu || nu >= self.first_nu + self.sups.len() as i64 {
            0.0
        } else {
            self.sups[(nu - self.first_nu) as usize]
        }
    }

    /// `width * sum of sups`, the L^1 mass of the majorant.
    pub fn mass(&self) -> f64 {
        self.width * self.sups.iter().sum::<f64>()
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// sup of |eta| over [a, b) (continuity makes the open end moot except for
/// the indicator, which is handled by interval intersection).
pub fn sup_on_interval(eta: &TestFunction, a: f64, b: f64) -> f64 {
    match eta {
        TestFunction::Indicator { half_width } => {
            if a < *half_width && b > -*half_width {
                1.0
            } else {
                0.0
            }
        }
        TestFunction::Hat { .. } | TestFunction::SmoothBump { .. } => {
            // even and unimodal: closest point to the origin
            let x = if a <= 0.0 && b >= 0.0 {
                0.0
            } else if a > 0.0 {
                a
            } else {
                b
            };
            eta.eval(x).abs()
        }
        TestFunction::PiecewiseLinear { knots } => {
            let mut best = eta.eval(a).abs().max(eta.eval(b).abs());
            for &(x, y) in knots {
                if x >= a && x <= b {
                    best = best.max(y.abs());
                }
            }
            best
        }
        TestFunction::BandlimitedBump { .. } => {
            let n = 256;
            let h = (b - a) / n as f64;
            let mut best_i: usize = 0;
            let mut best = f64::MIN;
            for i in 0..=n {
                let v = eta.eval(a + i as f64 * h).abs();
                if v > best {
                    best = v;
                    best_i = i;
                }
            }
            let lo = a + (best_i.saturating_sub(1)) as f64 * h;
            let hi = (a + (best_i + 1) as f64 * h).min(b);
            golden_max(&|x| eta.eval(x).abs(), lo, hi).max(best)
        }
    }
}

/// Maximal envelope `M_k eta`: on each `I_k(nu)` the sup of |eta| there.
pub fn maximal_envelope(eta: &TestFunction, k: u32) -> StepFunction {
    assert!(k >= 1);
    maximal_envelope_scaled(eta, k as f64)
}

/// Same construction on intervals of arbitrary positive width.
pub fn maximal_envelope_scaled(eta: &TestFunction, width: f64) -> StepFunction {
    assert!(width > 0.0);
    let radius = if eta.support_radius().is_finite() {
        eta.support_radius()
    } else {
        // x^-4 decay: beyond this the sup is below 1e-12
        match eta {
            TestFunction::BandlimitedBump { bandwidth } => {
                (96.0 * bandwidth / 1e-12).powf(0.25) / (TAU * bandwidth)
            }
            _ => unreachable!("only the band-limited form has infinite support"),
        }
    };
    let lo = ((-radius - 0.5 * width) / width).ceil() as i64;
    let hi = ((radius + 0.5 * width) / width).floor() as i64;
    let mut sups = Vec::new();
    for nu in lo..=hi {
        let a = width * nu as f64 - 0.5 * width;
        let b = width * nu as f64 + 0.5 * width;
        sups.push(sup_on_interval(eta, a, b));
    }
    // trim zero-fringe
    let mut first = lo;
    while !sups.is_empty() && sups[0] == 0.0 {
        sups.remove(0);
        first += 1;
    }
    while sups.last() == Some(&0.0) {
        sups.pop();
    }
    StepFunction { width, first_nu: first, sups }
}

/// Left side of the maximal-sum inequality:
/// `sum_nu eps * sup of |eta| on eps [nu - 1/2, nu + 1/2)`.
pub fn maximal_sum(eta: &TestFunction, eps: f64) -> f64 {
    maximal_envelope_scaled(eta, eps).mass()
}

/// `int |f - g|(t) weight(t) dt` by split-aware quadrature.
fn weighted_l1<W: Fn(f64) -> f64>(f: &TestFunction, g: &TestFunction, weight: W) -> f64 {
    let r = f
        .support_radius()
        .max(g.support_radius())
        .min(1e4);
    let mut splits = vec![0.0];
    for t in [f, g] {
        match t {
            TestFunction::PiecewiseLinear { knots } => {
                splits.extend(knots.iter().map(|k| k.0));
            }
            _ => {
                let w = t.support_radius();
                if w.is_finite() {
                    splits.push(-w);
                    splits.push(w);
                }
            }
        }
    }
    let fun = |x: f64| (f.eval(x) - g.eval(x)).abs() * weight(x);
    quad::integrate_with_splits(&fun, -r, r, &splits, 1e-7, 1e-10)
}

/// `int |f - g|(t) log(|t| + 2) dt`.
pub fn l1_log_distance(f: &TestFunction, g: &TestFunction) -> f64 {
    weighted_l1(f, g, |t| (t.abs() + 2.0).ln())
}

/// Plain L^1 distance.
pub fn l1_distance(f: &TestFunction, g: &TestFunction) -> f64 {
    weighted_l1(f, g, |_| 1.0)
}
