//! Adaptive Gauss–Kronrod quadrature, principal-value integrals with
//! analytic pole handling, and Gauss–Legendre node generation.
//!
//! All η → 0⁺ prescriptions in this crate are evaluated by splitting the
//! kernel 1/(K ± i0⁺) analytically into a principal value plus a delta term
//! (Sokhotski–Plemelj); no small finite η is ever fed to the quadrature.

use crate::error::{Error, Result};
use crate::{Complex, I};

/// Controls for adaptive quadrature and principal-value pole subtraction.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct QuadraturePolicy {
    /// Absolute tolerance of the integral estimate.
    pub abs_tol: f64,
    /// Relative tolerance of the integral estimate.
    pub rel_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
    /// Half-width of the symmetric window used for pole subtraction.
    pub pv_window: f64,
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.pv_window > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "quadrature tolerances and pv_window must be positive".into(),
            ))
        }
    }
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            pv_window: 0.5,
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations performed.
    pub evaluations: usize,
    /// Number of interval bisections performed.
    pub subdivisions: usize,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult { value: Complex::new(0.0, 0.0), error: 0.0, evaluations: 0, subdivisions: 0 }
    }

    fn merge(&mut self, other: &QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
        self.subdivisions += other.subdivisions;
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One Gauss–Kronrod 15(7) panel; returns (kronrod estimate, error estimate).
fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64, usize) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fl = f(center - x);
        let fr = f(center + x);
        kronrod += WGK[j] * (fl + fr);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fl + fr);
        }
    }
    kronrod *= half;
    gauss *= half;
    // The Gauss/Kronrod discrepancy as the error estimate; adaptive
    // bisection compensates for its occasional optimism.
    let err = (kronrod - gauss).norm();
    (kronrod, err, 15)
}

/// Adaptive integral of a complex-valued function over a finite interval.
pub fn integrate<F: Fn(f64) -> Complex>(
    f: &F,
    a: f64,
    b: f64,
    policy: &QuadraturePolicy,
) -> Result<QuadResult> {
    policy.validate()?;
    if a == b {
        return Ok(QuadResult::zero());
    }
    struct Interval {
        a: f64,
        b: f64,
        value: Complex,
        error: f64,
    }
    let (v0, e0, n0) = gk15(f, a, b);
    let mut evals = n0;
    let mut intervals = vec![Interval { a, b, value: v0, error: e0 }];
    let mut subdivisions = 0usize;
    loop {
        let total: Complex = intervals.iter().map(|iv| iv.value).sum();
        let err: f64 = intervals.iter().map(|iv| iv.error).sum();
        let target = policy.abs_tol.max(policy.rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult { value: total, error: err, evaluations: evals, subdivisions });
        }
        if subdivisions >= policy.max_subdivisions {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {err:.3e} above target {target:.3e} after {subdivisions} subdivisions"
            )));
        }
        // Split the interval with the largest error estimate.
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty interval list");
        let iv = intervals.swap_remove(worst);
        let mid = 0.5 * (iv.a + iv.b);
        if mid <= iv.a || mid >= iv.b {
            return Err(Error::QuadratureFailure(
                "interval too small to bisect further".into(),
            ));
        }
        let (vl, el, nl) = gk15(f, iv.a, mid);
        let (vr, er, nr) = gk15(f, mid, iv.b);
        evals += nl + nr;
        subdivisions += 1;
        intervals.push(Interval { a: iv.a, b: mid, value: vl, error: el });
        intervals.push(Interval { a: mid, b: iv.b, value: vr, error: er });
    }
}

/// Adaptive integral over [a, ∞) via the rational substitution
/// Ω = a + s·u/(1−u), u ∈ [0, 1), with scale s.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex>(
    f: &F,
    a: f64,
    scale: f64,
    policy: &QuadraturePolicy,
) -> Result<QuadResult> {
    let s = if scale > 0.0 { scale } else { 1.0 };
    let g = |u: f64| -> Complex {
        if u >= 1.0 {
            return Complex::new(0.0, 0.0);
        }
        let om = a + s * u / (1.0 - u);
        let jac = s / ((1.0 - u) * (1.0 - u));
        f(om) * jac
    };
    integrate(&g, 0.0, 1.0, policy)
}

/// Principal value of ∫₀^∞ f(Ω)/(Ω² − p²) dΩ for a simple pole at Ω = p > 0.
///
/// The pole is subtracted on the symmetric window [p−w, p+w]: with
/// h(Ω) = f(Ω)/(Ω+p), the window integral of (h(Ω) − h(p))/(Ω−p) is regular
/// while the symmetric PV of the subtracted term vanishes identically.
/// `f` must be smooth across the window.
pub fn pv_half_line<F: Fn(f64) -> Complex>(
    f: &F,
    pole: f64,
    policy: &QuadraturePolicy,
) -> Result<QuadResult> {
    if pole <= 0.0 {
        return Err(Error::InvalidInput("pv_half_line requires pole > 0".into()));
    }
    let w = policy.pv_window.min(0.9 * pole);
    let h = |om: f64| f(om) / Complex::new(om + pole, 0.0);
    let h_at_pole = h(pole);
    // Derivative of h at the pole, for evaluations that land exactly on it.
    let d = 1e-5 * w;
    let h_slope = (h(pole + d) - h(pole - d)) / (2.0 * d);
    let window = |om: f64| -> Complex {
        let t = om - pole;
        if t.abs() < 1e-9 * w {
            h_slope
        } else {
            (h(om) - h_at_pole) / t
        }
    };
    let mut total = integrate(&window, pole - w, pole + w, policy)?;
    let kernel = |om: f64| f(om) / Complex::new(om * om - pole * pole, 0.0);
    total.merge(&integrate(&kernel, 0.0, pole - w, policy)?);
    // Split the outer range once more so the tail substitution starts in a
    // region where the integrand is already smooth and decaying.
    let far = pole + w + 10.0 * (1.0 + pole);
    total.merge(&integrate(&kernel, pole + w, far, policy)?);
    total.merge(&integrate_to_infinity(&kernel, far, 1.0 + pole, policy)?);
    Ok(total)
}

/// Plemelj evaluation of ∫₀^∞ f(Ω)/(Ω² − (p + iσ·0⁺)²) dΩ
/// = PV ∫₀^∞ f/(Ω²−p²) + iπσ·f(p)/(2p).
pub fn single_pole_integral<F: Fn(f64) -> Complex>(
    f: &F,
    pole: f64,
    sigma: i32,
    policy: &QuadraturePolicy,
) -> Result<QuadResult> {
    let mut pv = pv_half_line(f, pole, policy)?;
    pv.value += I * std::f64::consts::PI * (sigma as f64) * f(pole) / (2.0 * pole);
    Ok(pv)
}

/// Plemelj evaluation of the double-pole half-line integral
/// ∫₀^∞ f(Ω) / [(Ω² − (p + iσ·0⁺)²)(Ω² − (p′ + iσ′·0⁺)²)] dΩ
/// for distinct poles p ≠ p′, via partial fractions on the PV part and
/// analytic delta terms. `f` must be smooth on (0, ∞).
pub fn double_pole_integral<F: Fn(f64) -> Complex>(
    f: &F,
    pole: f64,
    sigma: i32,
    pole_prime: f64,
    sigma_prime: i32,
    policy: &QuadraturePolicy,
) -> Result<QuadResult> {
    if pole <= 0.0 || pole_prime <= 0.0 {
        return Err(Error::InvalidInput("poles must be positive".into()));
    }
    let denom = pole * pole - pole_prime * pole_prime;
    if denom == 0.0 {
        return Err(Error::CoincidentFrequencies(
            "double_pole_integral requires distinct poles".into(),
        ));
    }
    // Keep the subtraction windows away from the other pole.
    let gap = 0.45 * (pole - pole_prime).abs();
    let narrowed = QuadraturePolicy { pv_window: policy.pv_window.min(gap), ..*policy };
    let mut a = pv_half_line(f, pole, &narrowed)?;
    let b = pv_half_line(f, pole_prime, &narrowed)?;
    a.value = (a.value - b.value) / denom;
    a.error = (a.error + b.error) / denom.abs();
    a.evaluations += b.evaluations;
    a.subdivisions += b.subdivisions;
    let pi = std::f64::consts::PI;
    // Delta term at each pole, weighted by the remaining PV kernel there.
    a.value += I * pi * (sigma as f64) * f(pole) / (2.0 * pole) / denom;
    a.value += I * pi * (sigma_prime as f64) * f(pole_prime) / (2.0 * pole_prime) / (-denom);
    Ok(a)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of a composite Gauss–Legendre rule over [a, b] with
/// `panels` equal panels of `order` points each.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        for j in 0..order {
            nodes.push(c + 0.5 * h * x[j]);
            weights.push(0.5 * h * w[j]);
        }
    }
    (nodes, weights)
}
