//! Hardy-space numerics on `U`: line means, `H^p` norms, membership, the
//! growth bound `|f(z)|^p <= ||f||_p^p / (4 pi Im z)`, reproducing kernels and
//! the named test functions.
//!
//! A line mean `M(y) = int |f(x+iy)|^p dx` is computed by adaptive quadrature
//! on `[-X, X]` plus a power-law tail on each side. The norm is the supremum of
//! `M(y)^{1/p}` over `y > 0`, which for members of `H^p` is the limit `y -> 0`;
//! monotonicity in `y` is checked on every run rather than assumed.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{AnalyticMap, Domain};
use crate::quad::{integrate, Integrand, QuadOptions};
use crate::{C64, I};

/// First truncation point of a line integral.
pub const X_START: f64 = 1e3;
/// Largest truncation point.
pub const X_CAP: f64 = 1e8;
/// The tail uncertainty must fall below this fraction of the total.
pub const TAIL_TOLERANCE: f64 = 1e-6;
/// Decay exponents at or below `1 + DIVERGENCE_MARGIN` mean divergence.
pub const DIVERGENCE_MARGIN: f64 = 1e-3;
/// Decay exponents at or below this value stop the integration at once.
pub const EARLY_DIVERGENCE_ALPHA: f64 = 0.5;
/// Heights of the sampled line means, from the top down.
pub const HEIGHTS: [f64; 5] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4];
/// Relative slack of the monotonicity check.
pub const MONOTONICITY_SLACK: f64 = 1e-6;
/// Relative uncertainty below which a norm counts as converged.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// An analytic function on `U` evaluated for norm and membership queries.
#[derive(Clone, Debug)]
pub struct HardyFunction {
    map: AnalyticMap,
    label: String,
}

impl HardyFunction {
    pub fn new(label: impl Into<String>, f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        let label = label.into();
        HardyFunction {
            map: AnalyticMap::new(label.clone(), Domain::HalfPlane, f),
            label,
        }
    }

    pub fn from_map(label: impl Into<String>, map: AnalyticMap) -> Result<Self> {
        if map.domain() != Domain::HalfPlane {
            return Err(Error::Param(format!(
                "Hardy functions live on the half-plane, `{}` does not",
                map.name()
            )));
        }
        Ok(HardyFunction {
            map,
            label: label.into(),
        })
    }

    pub fn with_derivative(mut self, d: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        self.map = self.map.with_derivative(d);
        self
    }

    pub fn constant(value: C64) -> Self {
        HardyFunction::new(format!("constant({value})"), move |_| value)
            .with_derivative(|_| C64::new(0.0, 0.0))
    }

    pub fn zero() -> Self {
        HardyFunction::new("zero", |_| C64::new(0.0, 0.0)).with_derivative(|_| C64::new(0.0, 0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn map(&self) -> &AnalyticMap {
        &self.map
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.map.eval(z)
    }

    #[inline]
    pub fn value(&self, z: C64) -> C64 {
        self.map.value(z)
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        self.map.derivative(z)
    }
}

/// Result of a whole-line integral.
#[derive(Clone, Copy, Debug)]
pub struct LineIntegral<T> {
    pub value: T,
    /// Spread between two independent tail fits, summed over both sides.
    pub tail_uncertainty: f64,
    pub quad_error: f64,
    /// Fitted decay exponents on the negative and positive sides.
    pub alpha: [f64; 2],
    pub x_max: f64,
    /// Whether the tail uncertainty met its tolerance before the cap.
    pub settled: bool,
}

impl<T: Integrand> LineIntegral<T> {
    pub fn uncertainty(&self) -> f64 {
        self.tail_uncertainty + self.quad_error
    }
}

struct TailFit<T> {
    alpha: f64,
    tail: T,
    uncertainty: f64,
}

/// Power-law fit `|g| ~ C |x|^{-alpha}` on one side from `|x| in {X/2, X}`,
/// with a second fit from `{X/4, X/2}` to measure its reliability.
fn fit_tail<T: Integrand, F: Fn(f64) -> T>(g: &F, sign: f64, x: f64) -> Result<TailFit<T>> {
    let v0 = g(sign * x / 4.0);
    let v1 = g(sign * x / 2.0);
    let v2 = g(sign * x);
    if !(v0.finite() && v1.finite() && v2.finite()) {
        return Err(Error::DivergentIntegral {
            alpha: f64::NEG_INFINITY,
        });
    }
    let (m0, m1, m2) = (v0.magnitude(), v1.magnitude(), v2.magnitude());
    if m1 == 0.0 && m2 == 0.0 {
        return Ok(TailFit {
            alpha: f64::INFINITY,
            tail: T::default(),
            uncertainty: 0.0,
        });
    }
    let alpha = (m1 / m2).ln() / std::f64::consts::LN_2;
    let alpha_prev = (m0 / m1).ln() / std::f64::consts::LN_2;
    if alpha.is_nan() {
        return Err(Error::DivergentIntegral { alpha });
    }
    if !(alpha > 1.0 + DIVERGENCE_MARGIN) {
        return Ok(TailFit {
            alpha,
            tail: T::default(),
            uncertainty: f64::INFINITY,
        });
    }
    let tail = if alpha.is_infinite() {
        T::default()
    } else {
        v2 * (x / (alpha - 1.0))
    };
    let prev = if alpha_prev > 1.0 && alpha_prev.is_finite() {
        v1 * (x / 2.0 * 2f64.powf(1.0 - alpha_prev) / (alpha_prev - 1.0))
    } else if alpha_prev.is_infinite() && alpha_prev > 0.0 {
        T::default()
    } else {
        return Ok(TailFit {
            alpha,
            tail,
            uncertainty: f64::INFINITY,
        });
    };
    Ok(TailFit {
        alpha,
        tail,
        uncertainty: (tail - prev).magnitude(),
    })
}

fn decade_breakpoints(x: f64) -> Vec<f64> {
    let mut pos = vec![0.0];
    let mut b = 1.0;
    while b < x {
        pos.push(b);
        b *= 10.0;
    }
    pos.push(x);
    let mut all: Vec<f64> = pos.iter().skip(1).rev().map(|v| -v).collect();
    all.extend(pos);
    all
}

fn line_quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// `int_R g(x) dx` for integrands decaying like a power of `|x|`, extending
/// the range until the tail uncertainty is below [`TAIL_TOLERANCE`] of the
/// total.
pub fn integrate_line<T: Integrand, F: Fn(f64) -> T>(g: F) -> Result<LineIntegral<T>> {
    integrate_line_to(g, TAIL_TOLERANCE)
}

/// As [`integrate_line`] with a relative tail tolerance `rel_tol`.
pub fn integrate_line_to<T: Integrand, F: Fn(f64) -> T>(g: F, rel_tol: f64) -> Result<LineIntegral<T>> {
    let opts = line_quad_options();
    let mut x = X_START;
    let mut bulk: Option<(T, f64)> = None;
    loop {
        let left = fit_tail(&g, -1.0, x)?;
        let right = fit_tail(&g, 1.0, x)?;
        let alpha = [left.alpha, right.alpha];
        let min_alpha = left.alpha.min(right.alpha);
        if min_alpha <= EARLY_DIVERGENCE_ALPHA {
            return Err(Error::DivergentIntegral { alpha: min_alpha });
        }
        let (body, quad_error) = match bulk {
            Some(b) => b,
            None => {
                let r = integrate(&g, &decade_breakpoints(x), opts)?;
                if !r.value.finite() {
                    return Err(Error::DivergentIntegral {
                        alpha: f64::NEG_INFINITY,
                    });
                }
                (r.value, r.error)
            }
        };
        let converging = min_alpha > 1.0 + DIVERGENCE_MARGIN;
        let total = body + left.tail + right.tail;
        let tail_uncertainty = left.uncertainty + right.uncertainty;
        let result = LineIntegral {
            value: total,
            tail_uncertainty,
            quad_error,
            alpha,
            x_max: x,
            settled: true,
        };
        if converging && tail_uncertainty <= rel_tol * total.magnitude() {
            return Ok(result);
        }
        if converging && total.magnitude() == 0.0 && tail_uncertainty == 0.0 {
            return Ok(result);
        }
        if x >= X_CAP {
            if !converging {
                return Err(Error::DivergentIntegral { alpha: min_alpha });
            }
            return Ok(LineIntegral {
                settled: false,
                ..result
            });
        }
        let next = 10.0 * x;
        let r = integrate(&g, &[x, next], opts)?;
        let l = integrate(&g, &[-next, -x], opts)?;
        if !r.value.finite() || !l.value.finite() {
            return Err(Error::DivergentIntegral {
                alpha: f64::NEG_INFINITY,
            });
        }
        bulk = Some((body + r.value + l.value, quad_error + r.error + l.error));
        x = next;
    }
}

/// Detailed line mean `int |f(x+iy)|^p dx`.
pub fn line_mean_detailed(f: &HardyFunction, y: f64, p: f64) -> Result<LineIntegral<f64>> {
    if !(y > 0.0) || !(p > 0.0) {
        return Err(Error::Param(format!("line mean needs y > 0 and p > 0, got y = {y}, p = {p}")));
    }
    let map = f.map.eval_fn();
    // The norm is M^{1/p} and the extrapolation weights sum to about 1.2, so
    // small p needs proportionally tighter line means.
    let tol = TAIL_TOLERANCE * p.min(1.0) / 2.0;
    integrate_line_to(move |x: f64| map(C64::new(x, y)).norm().powf(p), tol)
}

/// `int |f(x+iy)|^p dx`.
pub fn line_mean(f: &HardyFunction, y: f64, p: f64) -> Result<f64> {
    line_mean_detailed(f, y, p).map(|r| r.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormVerdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    /// `||f||_p`; `+inf` when the verdict is `Diverged`.
    pub value: f64,
    pub p: f64,
    /// Height of the line attaining the supremum; 0 for the extrapolated limit.
    pub y_used: f64,
    /// Uncertainty of `value`, in norm units.
    pub tail_bound: f64,
    pub verdict: NormVerdict,
    /// Sampled `(y, M(y))` pairs, top down.
    pub means: Vec<(f64, f64)>,
    /// Why the verdict is not `Converged`, if it is not.
    pub note: Option<String>,
}

impl NormEstimate {
    fn diverged(p: f64, means: Vec<(f64, f64)>, note: String) -> Self {
        NormEstimate {
            value: f64::INFINITY,
            p,
            y_used: 0.0,
            tail_bound: f64::INFINITY,
            verdict: NormVerdict::Diverged,
            means,
            note: Some(note),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// `||f||_p^p`.
    pub fn pth_power(&self) -> f64 {
        self.value.powf(self.p)
    }
}

/// Lagrange weights extrapolating values at `ys` to 0.
fn extrapolation_weights(ys: [f64; 3]) -> [f64; 3] {
    let [a, b, c] = ys;
    [
        b * c / ((a - b) * (a - c)),
        a * c / ((b - a) * (b - c)),
        a * b / ((c - a) * (c - b)),
    ]
}

/// Quadratic extrapolation to 0 and its spread against the linear one.
pub(crate) fn richardson_to_zero<T: Integrand>(ys: [f64; 3], vals: [T; 3]) -> (T, f64) {
    let w = extrapolation_weights(ys);
    let quadratic = vals[0] * w[0] + vals[1] * w[1] + vals[2] * w[2];
    let linear = (vals[2] * ys[1] - vals[1] * ys[2]) * (1.0 / (ys[1] - ys[2]));
    (quadratic, (quadratic - linear).magnitude())
}

/// Value at 0 of the polynomial through `(ys[k], vals[k])`.
fn lagrange_at_zero(ys: &[f64], vals: &[f64]) -> f64 {
    (0..ys.len())
        .map(|j| {
            let w: f64 = (0..ys.len())
                .filter(|&k| k != j)
                .map(|k| ys[k] / (ys[k] - ys[j]))
                .product();
            w * vals[j]
        })
        .sum()
}

/// `||f||_p = sup_y M(y)^{1/p}`, from line means at [`HEIGHTS`] and a
/// quadratic extrapolation to `y = 0` on the last three, whose error is
/// estimated against the cubic through the last four.
pub fn hardy_norm(f: &HardyFunction, p: f64) -> Result<NormEstimate> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Param(format!("exponent p must be positive, got {p}")));
    }
    let mut means = Vec::with_capacity(HEIGHTS.len());
    let mut uncertainties = Vec::with_capacity(HEIGHTS.len());
    let mut settled = true;
    for &y in &HEIGHTS {
        match line_mean_detailed(f, y, p) {
            Ok(r) => {
                means.push((y, r.value));
                uncertainties.push(r.uncertainty());
                settled &= r.settled;
            }
            Err(Error::DivergentIntegral { alpha }) => {
                return Ok(NormEstimate::diverged(
                    p,
                    means,
                    format!("line mean at y = {y} diverges (tail exponent {alpha:.4})"),
                ));
            }
            Err(Error::Quadrature { a, b, error }) => {
                return Ok(NormEstimate {
                    value: f64::NAN,
                    p,
                    y_used: y,
                    tail_bound: f64::INFINITY,
                    verdict: NormVerdict::Inconclusive,
                    means,
                    note: Some(format!(
                        "quadrature stalled at y = {y} on [{a:e}, {b:e}] (error {error:e})"
                    )),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let m: Vec<f64> = means.iter().map(|(_, v)| *v).collect();
    let top = m.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(NormEstimate {
            value: 0.0,
            p,
            y_used: HEIGHTS[0],
            tail_bound: 0.0,
            verdict: NormVerdict::Converged,
            means,
            note: None,
        });
    }
    let n = m.len();
    let mut note = None;
    let mut verdict = NormVerdict::Converged;
    if let Some(k) = (1..n).find(|&k| m[k] < m[k - 1] * (1.0 - MONOTONICITY_SLACK)) {
        verdict = NormVerdict::Inconclusive;
        note = Some(
            Error::MonotonicityViolation(format!(
                "M({}) = {:e} < M({}) = {:e}",
                HEIGHTS[k],
                m[k],
                HEIGHTS[k - 1],
                m[k - 1]
            ))
            .to_string(),
        );
    }
    let (d_prev, d_last) = (m[n - 2] - m[n - 3], m[n - 1] - m[n - 2]);
    if d_prev > NORM_TOLERANCE * m[n - 1] && d_last > 0.0 {
        let ratio = d_last / d_prev;
        if ratio > 0.9 {
            return Ok(NormEstimate::diverged(
                p,
                means,
                format!("line means blow up as y -> 0 (increment ratio {ratio:.3})"),
            ));
        }
        if ratio > 0.5 {
            verdict = NormVerdict::Inconclusive;
            note = Some(format!("line means grow slowly as y -> 0 (increment ratio {ratio:.3})"));
        }
    }
    let ys = [HEIGHTS[n - 3], HEIGHTS[n - 2], HEIGHTS[n - 1]];
    let limit = lagrange_at_zero(&ys, &m[n - 3..]);
    let spread = (lagrange_at_zero(&HEIGHTS[n - 4..], &m[n - 4..]) - limit).abs();
    let w = extrapolation_weights(ys);
    let propagated: f64 = (0..3).map(|k| w[k].abs() * uncertainties[n - 3 + k]).sum();
    let (sup, y_used) = m
        .iter()
        .zip(HEIGHTS)
        .fold((limit, 0.0), |(s, y0), (&v, y)| if v > s { (v, y) } else { (s, y0) });
    let uncertainty = spread + propagated;
    let value = sup.powf(1.0 / p);
    let tail_bound = value * uncertainty / (p * sup);
    if verdict == NormVerdict::Converged && (!settled || !(tail_bound < NORM_TOLERANCE * value)) {
        verdict = NormVerdict::Inconclusive;
        note = Some(format!(
            "relative uncertainty {:e} above {NORM_TOLERANCE:e}",
            tail_bound / value
        ));
    }
    Ok(NormEstimate {
        value,
        p,
        y_used,
        tail_bound,
        verdict,
        means,
        note,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

impl From<NormVerdict> for Membership {
    fn from(v: NormVerdict) -> Self {
        match v {
            NormVerdict::Converged => Membership::Member,
            NormVerdict::Diverged => Membership::NonMember,
            NormVerdict::Inconclusive => Membership::Inconclusive,
        }
    }
}

/// Membership in `H^p`; failures of the numerics become `Inconclusive`.
pub fn membership(f: &HardyFunction, p: f64) -> Membership {
    match hardy_norm(f, p) {
        Ok(est) => est.verdict.into(),
        Err(_) => Membership::Inconclusive,
    }
}

/// `|f(z)|^p 4 pi Im z / ||f||_p^p`, which never exceeds 1 for members.
pub fn growth_bound_ratio(f: &HardyFunction, p: f64, z: C64) -> Result<f64> {
    let est = hardy_norm(f, p)?;
    if est.verdict != NormVerdict::Converged {
        return Err(Error::NotMember(f.label().to_string()));
    }
    growth_bound_ratio_with_norm(f, &est, z)
}

/// As [`growth_bound_ratio`], reusing a norm computed earlier.
pub fn growth_bound_ratio_with_norm(f: &HardyFunction, norm: &NormEstimate, z: C64) -> Result<f64> {
    if norm.verdict != NormVerdict::Converged {
        return Err(Error::NotMember(f.label().to_string()));
    }
    let v = f.eval(z)?.norm().powf(norm.p);
    let denom = norm.pth_power();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(v * 4.0 * PI * z.im / denom)
}

/// `k_z(w) = i / (2 pi (w - conj z))`, the reproducing kernel of `H^2`.
pub fn reproducing_kernel(z: C64) -> Result<HardyFunction> {
    Domain::HalfPlane.check(z)?;
    let zb = z.conj();
    Ok(HardyFunction::new(format!("k({z})"), move |w| I / (2.0 * PI * (w - zb)))
        .with_derivative(move |w| -I / (2.0 * PI * (w - zb) * (w - zb))))
}

/// Boundary inner product `<f, g> = int f(x) conj(g(x)) dx`, extrapolated to
/// the real line from heights `1e-2, 1e-3, 1e-4`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InnerProduct {
    pub value: C64,
    pub uncertainty: f64,
}

pub fn inner_product(f: &HardyFunction, g: &HardyFunction) -> Result<InnerProduct> {
    let ys = [1e-2, 1e-3, 1e-4];
    let mut vals = [C64::new(0.0, 0.0); 3];
    let mut unc = 0.0;
    for (k, &y) in ys.iter().enumerate() {
        let (ff, gg) = (f.map.eval_fn(), g.map.eval_fn());
        let r = integrate_line(move |x: f64| {
            let z = C64::new(x, y);
            ff(z) * gg(z).conj()
        })?;
        vals[k] = r.value;
        unc += r.uncertainty();
    }
    let (value, spread) = richardson_to_zero(ys, vals);
    Ok(InnerProduct {
        value,
        uncertainty: spread + 1.2 * unc,
    })
}

/// The named test functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    /// `h_lambda(z) = (z+i)^lambda`.
    HLambda(C64),
    /// `e_n(z) = pi^{-1/p} gamma^{-1}(z)^n (z+i)^{-2/p}`, of unit norm.
    En { n: u32, p: f64 },
    /// `omega(z) = -p/(p+2) (z+i)^{-2/p-1}`, with `omega' = (z+i)^{-2/p-2}`.
    Omega { p: f64 },
    /// The reproducing kernel `k_z`.
    Kernel(C64),
    /// `pi^{-1/2} (z+i)^{-1}`, of unit `H^2` norm.
    UnitH,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Param(format!("exponent p must be positive, got {p}")));
    }
    Ok(())
}

/// `(z+i)^a`, through the real power when `a` is real.
#[inline]
fn shifted_pow(z: C64, a: C64) -> C64 {
    let s = z + I;
    if a.im == 0.0 {
        s.powf(a.re)
    } else {
        s.powc(a)
    }
}

pub fn h_lambda(lambda: impl Into<C64>) -> HardyFunction {
    let l: C64 = lambda.into();
    let label = if l.im == 0.0 {
        format!("h_lambda({})", l.re)
    } else {
        format!("h_lambda({l})")
    };
    HardyFunction::new(label, move |z| shifted_pow(z, l))
        .with_derivative(move |z| l * shifted_pow(z, l - 1.0))
}

pub fn test_function(kind: TestFunction) -> Result<HardyFunction> {
    Ok(match kind {
        TestFunction::HLambda(l) => {
            if !l.is_finite() {
                return Err(Error::Param(format!("lambda must be finite, got {l}")));
            }
            h_lambda(l)
        }
        TestFunction::En { n, p } => {
            check_p(p)?;
            let c = PI.powf(-1.0 / p);
            let a = 2.0 / p;
            let ni = n as i32;
            HardyFunction::new(format!("e_{n}(p={p})"), move |z| {
                c * ((z - I) / (z + I)).powi(ni) * (z + I).powf(-a)
            })
            .with_derivative(move |z| {
                if ni == 0 {
                    -a * c * (z + I).powf(-a - 1.0)
                } else {
                    let bracket = -a * z + I * (2.0 * n as f64 + a);
                    c * ((z - I) / (z + I)).powi(ni - 1) * (z + I).powf(-a - 2.0) * bracket
                }
            })
        }
        TestFunction::Omega { p } => {
            check_p(p)?;
            let a = 2.0 / p;
            let k = -p / (p + 2.0);
            HardyFunction::new(format!("omega(p={p})"), move |z| k * (z + I).powf(-a - 1.0))
                .with_derivative(move |z| (z + I).powf(-a - 2.0))
        }
        TestFunction::Kernel(z) => reproducing_kernel(z)?,
        TestFunction::UnitH => {
            let c = 1.0 / PI.sqrt();
            HardyFunction::new("unit_h", move |z| c / (z + I))
                .with_derivative(move |z| -c / ((z + I) * (z + I)))
        }
    })
}
