//! One-parameter semigroups `phi_t` of self-maps of `U`: the semigroup law,
//! generators, Denjoy-Wolff points, angular derivatives at infinity, the limit
//! `delta` and the model (Koenigs or Abel) function.

use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::cayley::{gamma_inv, nt_path, nt_ray, NtTarget};
use crate::error::{Error, Result};
use crate::hardy::richardson_to_zero;
use crate::maps::{
    disc_contraction_conjugate, disc_contraction_conjugate_derivative, sqrt_parabolic_value,
    AnalyticMap, Domain, EvalFn, Params,
};
use crate::quad::{integrate, QuadOptions};
use crate::sampling;
use crate::{chordal, chordal_to_infinity, C64, I};

pub type FlowFn = Arc<dyn Fn(f64, C64) -> C64 + Send + Sync>;

/// Time steps of the forward differences behind a numeric generator.
pub const GENERATOR_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Largest allowed spread between Richardson levels, relative to `max(1, |G|)`.
pub const RICHARDSON_TOLERANCE: f64 = 1e-4;
/// Agreement required between numeric and closed-form generators.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-6;
/// Agreement required in `G(phi_t(z)) = d phi_t(z) / dt`.
pub const FLOW_IDENTITY_TOLERANCE: f64 = 1e-5;
/// Chordal displacement at which the Denjoy-Wolff iteration stops.
pub const DW_DISPLACEMENT: f64 = 1e-8;
pub const DW_MAX_STEPS: usize = 1000;
/// Chordal distance below which a limit counts as `infinity` or real.
pub const DW_CLASSIFY: f64 = 1e-6;
/// Relative tolerance shared by the ray-limit checks.
pub const RAY_TOLERANCE: f64 = 1e-3;
/// Points per approach ray.
pub const RAY_POINTS: usize = 6;
/// Tolerance of the model-function normalization `h(b) = 0`, `h'(b) = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
/// Tolerance of the model-function functional equation.
pub const FUNCTIONAL_TOLERANCE: f64 = 1e-6;
/// Generator magnitude treated as a zero on an integration path.
pub const PATH_ZERO: f64 = 1e-6;
pub const DEGENERATE_MULTIPLIER: f64 = 1e-10;
/// Lower bound of the Berkson-Porta sign checks.
pub const SIGN_TOLERANCE: f64 = 1e-9;

/// A point of `U`, a boundary point on the real line, or `infinity`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedPoint {
    Interior(C64),
    Real(f64),
    Infinity,
}

impl ExtendedPoint {
    pub fn label(&self) -> String {
        match self {
            ExtendedPoint::Interior(z) => format!("interior({z})"),
            ExtendedPoint::Real(x) => format!("real({x})"),
            ExtendedPoint::Infinity => "infinity".to_string(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, ExtendedPoint::Interior(_))
    }

    /// Chordal distance between two extended points.
    pub fn distance(&self, other: &ExtendedPoint) -> f64 {
        let finite = |p: &ExtendedPoint| match *p {
            ExtendedPoint::Interior(z) => Some(z),
            ExtendedPoint::Real(x) => Some(C64::new(x, 0.0)),
            ExtendedPoint::Infinity => None,
        };
        match (finite(self), finite(other)) {
            (Some(a), Some(b)) => chordal(a, b),
            (Some(a), None) | (None, Some(a)) => chordal_to_infinity(a),
            (None, None) => 0.0,
        }
    }
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            ExtendedPoint::Infinity => serializer.serialize_str("infinity"),
            ExtendedPoint::Real(x) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("real", x)?;
                m.end()
            }
            ExtendedPoint::Interior(z) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("interior", &[z.re, z.im])?;
                m.end()
            }
        }
    }
}

/// A family `t -> phi_t` of self-maps of `U` with whatever closed forms are
/// known about it.
#[derive(Clone)]
pub struct SemigroupFamily {
    name: String,
    params: Params,
    flow: FlowFn,
    flow_derivative: Option<FlowFn>,
    generator: Option<(EvalFn, EvalFn)>,
    dw: Option<ExtendedPoint>,
    phi1_inf: Option<f64>,
    trivial: bool,
}

impl std::fmt::Debug for SemigroupFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SemigroupFamily")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("closed_form_generator", &self.generator.is_some())
            .field("closed_form_dw", &self.dw)
            .field("closed_form_phi1_inf", &self.phi1_inf)
            .finish()
    }
}

/// Family names accepted by [`family_lookup`].
pub const FAMILIES: &[&str] = &[
    "trivial",
    "dilation",
    "translation",
    "example1",
    "example2",
    "sqrt_parabolic",
    "mobius_elliptic",
];

impl SemigroupFamily {
    /// A family given only by its flow; nothing about it is assumed.
    pub fn custom(
        name: impl Into<String>,
        flow: impl Fn(f64, C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        SemigroupFamily {
            name: name.into(),
            params: Params::new(),
            flow: Arc::new(flow),
            flow_derivative: None,
            generator: None,
            dw: None,
            phi1_inf: None,
            trivial: false,
        }
    }

    fn with_flow_derivative(mut self, d: impl Fn(f64, C64) -> C64 + Send + Sync + 'static) -> Self {
        self.flow_derivative = Some(Arc::new(d));
        self
    }

    fn with_generator(
        mut self,
        g: impl Fn(C64) -> C64 + Send + Sync + 'static,
        dg: impl Fn(C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        self.generator = Some((Arc::new(g), Arc::new(dg)));
        self
    }

    fn with_dw(mut self, dw: ExtendedPoint, phi1_inf: f64) -> Self {
        self.dw = Some(dw);
        self.phi1_inf = Some(phi1_inf);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// `phi_t(z)` without checks.
    #[inline]
    pub fn flow(&self, t: f64, z: C64) -> C64 {
        (self.flow)(t, z)
    }

    /// The map `phi_t`.
    pub fn at(&self, t: f64) -> Result<AnalyticMap> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Param(format!("time t must be finite and nonnegative, got {t}")));
        }
        let flow = Arc::clone(&self.flow);
        let map = AnalyticMap::new(format!("{}@{t}", self.name), Domain::HalfPlane, move |z| {
            flow(t, z)
        })
        .with_params(self.params.clone().with("t", t))
        .into_self_map();
        Ok(match &self.flow_derivative {
            Some(d) => {
                let d = Arc::clone(d);
                map.with_derivative(move |z| d(t, z))
            }
            None => map,
        })
    }

    pub fn closed_form_generator(&self) -> Option<AnalyticMap> {
        self.generator.as_ref().map(|(g, dg)| {
            let dg = Arc::clone(dg);
            AnalyticMap::from_arc(format!("G[{}]", self.name), Domain::HalfPlane, Arc::clone(g))
                .with_derivative(move |z| dg(z))
        })
    }

    pub fn closed_form_dw(&self) -> Option<ExtendedPoint> {
        self.dw
    }

    pub fn closed_form_phi1_inf(&self) -> Option<f64> {
        self.phi1_inf
    }
}

fn no_params(params: &Params) -> Result<()> {
    params.expect_only(&[])
}

/// Looks up a catalog semigroup.
///
/// `dilation(c)`: `e^{ct} z`, `c` real and nonzero. `translation(b)`: `z + bt`,
/// `Im b >= 0`, `b != 0`. `mobius_elliptic(c)`: the half-plane image of
/// `w -> e^{-ct} w`, `c > 0`. `example1` is `mobius_elliptic(1)`;
/// `example2` is `(z+1)^{e^{-t}} - 1`; `sqrt_parabolic` is `(z^2 - t)^{1/2}`.
pub fn family_lookup(name: &str, params: &Params) -> Result<SemigroupFamily> {
    let one = C64::new(1.0, 0.0);
    let fam = match name {
        "trivial" => {
            no_params(params)?;
            let mut f = SemigroupFamily::custom("trivial", |_, z| z)
                .with_flow_derivative(move |_, _| one)
                .with_generator(|_| C64::new(0.0, 0.0), |_| C64::new(0.0, 0.0));
            f.phi1_inf = Some(1.0);
            f.trivial = true;
            f
        }
        "dilation" => {
            params.expect_only(&["c"])?;
            let c = params.real("c")?;
            if c == 0.0 || !c.is_finite() {
                return Err(Error::Param(format!(
                    "dilation needs a finite nonzero c (c = 0 is the trivial family), got {c}"
                )));
            }
            let dw = if c > 0.0 {
                ExtendedPoint::Infinity
            } else {
                ExtendedPoint::Real(0.0)
            };
            SemigroupFamily::custom("dilation", move |t, z| z * (c * t).exp())
                .with_flow_derivative(move |t, _| C64::new((c * t).exp(), 0.0))
                .with_generator(move |z| z * c, move |_| C64::new(c, 0.0))
                .with_dw(dw, c.exp())
        }
        "translation" => {
            params.expect_only(&["b"])?;
            let b = params.complex("b")?;
            if b.im < 0.0 || b == C64::new(0.0, 0.0) || !b.is_finite() {
                return Err(Error::Param(format!(
                    "translation needs b != 0 with Im b >= 0, got {b}"
                )));
            }
            SemigroupFamily::custom("translation", move |t, z| z + b * t)
                .with_flow_derivative(move |_, _| one)
                .with_generator(move |_| b, |_| C64::new(0.0, 0.0))
                .with_dw(ExtendedPoint::Infinity, 1.0)
        }
        "example1" | "mobius_elliptic" => {
            let c = if name == "example1" {
                no_params(params)?;
                1.0
            } else {
                params.expect_only(&["c"])?;
                let c = params.real("c")?;
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::Param(format!("mobius_elliptic needs c > 0, got {c}")));
                }
                c
            };
            SemigroupFamily::custom(name, move |t, z| disc_contraction_conjugate((-c * t).exp(), z))
                .with_flow_derivative(move |t, z| {
                    disc_contraction_conjugate_derivative((-c * t).exp(), z)
                })
                .with_generator(move |z| I * c * (z * z + 1.0) / 2.0, move |z| I * c * z)
                .with_dw(ExtendedPoint::Interior(I), 0.0)
        }
        "example2" => {
            no_params(params)?;
            SemigroupFamily::custom("example2", |t, z| (z + 1.0).powf((-t).exp()) - 1.0)
                .with_flow_derivative(|t, z| {
                    let q = (-t).exp();
                    (z + 1.0).powf(q - 1.0) * q
                })
                .with_generator(
                    |z| -(z + 1.0) * (z + 1.0).ln(),
                    |z| -((z + 1.0).ln() + 1.0),
                )
                .with_dw(ExtendedPoint::Real(0.0), 0.0)
        }
        "sqrt_parabolic" => {
            no_params(params)?;
            SemigroupFamily::custom("sqrt_parabolic", sqrt_parabolic_value)
                .with_flow_derivative(|t, z| z / sqrt_parabolic_value(t, z))
                .with_generator(|z| -1.0 / (2.0 * z), |z| 1.0 / (2.0 * z * z))
                .with_dw(ExtendedPoint::Infinity, 1.0)
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(SemigroupFamily {
        params: params.clone(),
        ..fam
    })
}

/// `max |phi_{t+s}(z) - phi_t(phi_s(z))|` over `grid` and `times`.
pub fn verify_semigroup_law(fam: &SemigroupFamily, grid: &[C64], times: &[(f64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for &(t, s) in times {
        for &z in grid {
            let r = (fam.flow(t + s, z) - fam.flow(t, fam.flow(s, z))).norm();
            if !r.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(r);
        }
    }
    worst
}

/// The `(t, s)` pairs `{0.1, 0.5, 1}^2`.
pub fn standard_times() -> Vec<(f64, f64)> {
    let ts = [0.1, 0.5, 1.0];
    ts.iter().flat_map(|&t| ts.iter().map(move |&s| (t, s))).collect()
}

/// `max |phi_0(z) - z|` over `grid`.
pub fn identity_residual(fam: &SemigroupFamily, grid: &[C64]) -> f64 {
    grid.iter().map(|&z| (fam.flow(0.0, z) - z).norm()).fold(0.0, f64::max)
}

/// Largest jump `|phi_{t+dt}(z) - phi_t(z)|` over `t in [0, 2]` and `grid`.
pub fn continuity_jump(fam: &SemigroupFamily, grid: &[C64], dt: f64) -> f64 {
    let steps = (2.0 / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for &z in grid {
        let mut prev = fam.flow(0.0, z);
        for k in 1..=steps {
            let next = fam.flow(k as f64 * dt, z);
            worst = worst.max((next - prev).norm());
            prev = next;
        }
    }
    worst
}

/// Richardson limit of `(phi_t(z) - z)/t` and the spread between levels.
pub fn numeric_generator_at(fam: &SemigroupFamily, z: C64) -> (C64, f64) {
    let d = GENERATOR_STEPS.map(|t| (fam.flow(t, z) - z) / t);
    richardson_to_zero(GENERATOR_STEPS, d)
}

fn numeric_generator_checked(fam: &SemigroupFamily, z: C64) -> Result<C64> {
    let (g, spread) = numeric_generator_at(fam, z);
    let tolerance = RICHARDSON_TOLERANCE * g.norm().max(1.0);
    if !(spread <= tolerance) {
        return Err(Error::Convergence {
            what: "generator Richardson extrapolation",
            change: spread,
            tolerance,
        });
    }
    Ok(g)
}

/// `d phi_t(z) / dt` by central differences, Richardson-combined.
fn time_derivative(fam: &SemigroupFamily, t: f64, z: C64) -> C64 {
    let central = |h: f64| (fam.flow(t + h, z) - fam.flow(t - h, z)) / (2.0 * h);
    let (coarse, fine) = (central(1e-2), central(5e-3));
    (fine * 4.0 - coarse) / 3.0
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorDiagnostics {
    pub semigroup_residual: f64,
    pub richardson_spread: f64,
    pub closed_form_residual: Option<f64>,
    pub flow_identity_residual: f64,
}

/// The generator of a family together with its Denjoy-Wolff point and, once
/// [`delta_limit`] has run, the limit `delta`.
#[derive(Clone, Debug)]
pub struct GeneratorInfo {
    pub g: AnalyticMap,
    pub closed_form: bool,
    pub delta: Option<f64>,
    /// `None` only for the trivial family.
    pub dw: Option<ExtendedPoint>,
    pub diagnostics: GeneratorDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignCheck {
    pub condition: &'static str,
    pub min_imag: f64,
    pub samples: usize,
    pub passed: bool,
}

impl GeneratorInfo {
    /// `F(z) = G(z) / ((z - conj d)(z - d))`, defined for an interior `d`.
    pub fn berkson_porta_f(&self, z: C64) -> Option<C64> {
        match self.dw {
            Some(ExtendedPoint::Interior(d)) => Some(self.g.value(z) / ((z - d.conj()) * (z - d))),
            _ => None,
        }
    }

    /// `Im G >= 0` when `d = infinity`, `Im F >= 0` when `d` is interior,
    /// over 1e3 seeded points; `None` for boundary points on the real line.
    pub fn sign_check(&self) -> Option<SignCheck> {
        let samples = 1000;
        let mut rng = sampling::rng(sampling::seed(), 11);
        let pts = sampling::halfplane_points(&mut rng, samples, (-10.0, 10.0), (1e-2, 1e2));
        let (condition, values): (&'static str, Vec<f64>) = match self.dw {
            Some(ExtendedPoint::Infinity) => {
                ("Im G >= 0", pts.iter().map(|&z| self.g.value(z).im).collect())
            }
            Some(ExtendedPoint::Interior(_)) => (
                "Im F >= 0",
                pts.iter()
                    .map(|&z| self.berkson_porta_f(z).map_or(f64::NAN, |f| f.im))
                    .collect(),
            ),
            _ => return None,
        };
        let min_imag = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(SignCheck {
            condition,
            min_imag,
            samples,
            passed: min_imag >= -SIGN_TOLERANCE,
        })
    }
}

/// Extracts the generator `G = d phi_t / dt |_{t=0}`.
///
/// The numeric Richardson limit is always computed; a closed form, when the
/// family has one, must agree with it and is then used as `G`. The flow
/// identity `G(phi_t) = d phi_t / dt` is checked at `t = 0.5`.
pub fn generator(fam: &SemigroupFamily) -> Result<GeneratorInfo> {
    let law_grid = sampling::grid(5, 5, (-3.0, 3.0), (0.1, 5.0));
    let semigroup_residual = verify_semigroup_law(fam, &law_grid, &[(0.1, 0.5), (0.5, 0.5), (1.0, 0.1)]);
    if !(semigroup_residual <= 1e-8) {
        return Err(Error::ContractViolation {
            what: format!("semigroup law for `{}`", fam.name()),
            measured: semigroup_residual,
            tolerance: 1e-8,
        });
    }
    let grid = sampling::interior_grid(25);
    let mut spread_max: f64 = 0.0;
    let mut numeric = Vec::with_capacity(grid.len());
    for &z in &grid {
        let (g, spread) = numeric_generator_at(fam, z);
        let tolerance = RICHARDSON_TOLERANCE * g.norm().max(1.0);
        if !(spread <= tolerance) {
            return Err(Error::Convergence {
                what: "generator Richardson extrapolation",
                change: spread,
                tolerance,
            });
        }
        spread_max = spread_max.max(spread / g.norm().max(1.0));
        numeric.push(g);
    }
    let closed = fam.closed_form_generator();
    let closed_form_residual = match &closed {
        Some(g) => {
            let r = grid
                .iter()
                .zip(&numeric)
                .map(|(&z, &n)| {
                    let c = g.value(z);
                    (c - n).norm() / c.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            if !(r <= CLOSED_FORM_TOLERANCE) {
                return Err(Error::ContractViolation {
                    what: format!("numeric vs closed-form generator for `{}`", fam.name()),
                    measured: r,
                    tolerance: CLOSED_FORM_TOLERANCE,
                });
            }
            Some(r)
        }
        None => None,
    };
    let g = match closed {
        Some(g) => g,
        None => {
            let f = fam.clone();
            AnalyticMap::new(format!("G[{}]", fam.name()), Domain::HalfPlane, move |z| {
                numeric_generator_at(&f, z).0
            })
        }
    };
    let flow_identity_residual = grid
        .iter()
        .map(|&z| {
            let lhs = g.value(fam.flow(0.5, z));
            let rhs = time_derivative(fam, 0.5, z);
            (lhs - rhs).norm() / rhs.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    if !(flow_identity_residual <= FLOW_IDENTITY_TOLERANCE) {
        return Err(Error::ContractViolation {
            what: format!("flow identity G(phi_t) = d phi_t/dt for `{}`", fam.name()),
            measured: flow_identity_residual,
            tolerance: FLOW_IDENTITY_TOLERANCE,
        });
    }
    let dw = if fam.is_trivial() {
        None
    } else {
        Some(dw_point(fam)?)
    };
    Ok(GeneratorInfo {
        closed_form: fam.closed_form_generator().is_some(),
        g,
        delta: None,
        dw,
        diagnostics: GeneratorDiagnostics {
            semigroup_residual,
            richardson_spread: spread_max,
            closed_form_residual,
            flow_identity_residual,
        },
    })
}

fn classify_limit(z: C64) -> ExtendedPoint {
    if !z.is_finite() || chordal_to_infinity(z) < DW_CLASSIFY {
        ExtendedPoint::Infinity
    } else if chordal(z, C64::new(z.re, 0.0)) < DW_CLASSIFY {
        ExtendedPoint::Real(z.re)
    } else {
        ExtendedPoint::Interior(z)
    }
}

fn as_extended(z: C64) -> ExtendedPoint {
    if z.is_finite() {
        ExtendedPoint::Interior(z)
    } else {
        ExtendedPoint::Infinity
    }
}

/// Denjoy-Wolff point: the limit of the orbit of `i` under `phi_1`.
///
/// The orbit is sampled at the dyadic iterates `phi_1^{2^k}(i) = phi_{2^k}(i)`
/// until the chordal displacement drops below [`DW_DISPLACEMENT`], so that
/// slowly converging parabolic orbits are reached in a few dozen steps.
pub fn dw_point(fam: &SemigroupFamily) -> Result<ExtendedPoint> {
    if fam.is_trivial() {
        return Err(Error::TrivialSemigroup);
    }
    let mut t = 1.0;
    let mut z = fam.flow(t, I);
    let mut displacement = f64::INFINITY;
    for _ in 0..DW_MAX_STEPS {
        t *= 2.0;
        if !t.is_finite() {
            break;
        }
        let next = fam.flow(t, I);
        displacement = as_extended(z).distance(&as_extended(next));
        z = next;
        if displacement < DW_DISPLACEMENT {
            let found = classify_limit(z);
            if let Some(expected) = fam.closed_form_dw() {
                let gap = found.distance(&expected);
                if gap > DW_CLASSIFY {
                    return Err(Error::ContractViolation {
                        what: format!(
                            "Denjoy-Wolff point of `{}`: found {}, expected {}",
                            fam.name(),
                            found.label(),
                            expected.label()
                        ),
                        measured: gap,
                        tolerance: DW_CLASSIFY,
                    });
                }
            }
            return Ok(found);
        }
    }
    Err(Error::NoConvergence {
        steps: DW_MAX_STEPS,
        displacement,
    })
}

/// Estimate of `phi'(infinity) = angle-lim phi(z)/z`.
#[derive(Clone, Debug, Serialize)]
pub struct AngularDerivative {
    pub value: f64,
    /// `phi(z)/z` along the vertical ray.
    pub vertical: Vec<C64>,
    /// `phi(z)/z` along the slanted ray.
    pub slanted: Vec<C64>,
    /// Sampled `inf Im phi(z) / Im z`.
    pub sampled_infimum: f64,
    /// `|phi(z)/z|` decreases over the last three vertical radii.
    pub decreasing: bool,
}

fn ray_disagreement(a: C64, b: C64) -> bool {
    (a - b).norm() > RAY_TOLERANCE * 1f64.max(a.norm()).max(b.norm())
}

/// `phi'(infinity)` from two non-tangential rays, cross-checked against the
/// sampled Julia-Caratheodory infimum `inf Im phi(z) / Im z`.
pub fn angular_derivative_at_infinity(phi: &AnalyticMap) -> Result<AngularDerivative> {
    let ratios = |pts: Vec<C64>| -> Vec<C64> { pts.into_iter().map(|z| phi.value(z) / z).collect() };
    let vertical = ratios(nt_path(NtTarget::InfinityInU, 1.0, RAY_POINTS)?);
    let slanted = ratios(nt_ray(NtTarget::InfinityInU, 1.0, RAY_POINTS)?);
    let (a, b) = (vertical[RAY_POINTS - 1], slanted[RAY_POINTS - 1]);
    if ray_disagreement(a, b) {
        return Err(Error::RayDisagreement { first: a, second: b });
    }
    let value = a.re.max(0.0);
    let mut rng = sampling::rng(sampling::seed(), 7);
    let pts = sampling::halfplane_points(&mut rng, 1000, (-10.0, 10.0), (1e-2, 1e3));
    let sampled_infimum = pts
        .iter()
        .map(|&z| phi.value(z).im / z.im)
        .fold(f64::INFINITY, f64::min);
    if sampled_infimum < value - RAY_TOLERANCE * value.max(1.0) {
        return Err(Error::InfimumMismatch {
            infimum: sampled_infimum,
            limit: value,
        });
    }
    let n = vertical.len();
    let decreasing = vertical[n - 1].norm() < vertical[n - 2].norm()
        && vertical[n - 2].norm() < vertical[n - 3].norm();
    Ok(AngularDerivative {
        value,
        vertical,
        slanted,
        sampled_infimum,
        decreasing,
    })
}

/// `psi'(1) = angle-lim (1 - psi(w)) / (1 - w)` for a self-map of the disc,
/// from two rays inside `S_8(1)`.
pub fn angular_derivative_at_one(psi: &AnalyticMap) -> Result<f64> {
    let ratio = |w: C64| (1.0 - psi.value(w)) / (1.0 - w);
    let a = ratio(*nt_path(NtTarget::OneInD, 8.0, RAY_POINTS)?.last().expect("nonempty"));
    let b = ratio(*nt_ray(NtTarget::OneInD, 8.0, RAY_POINTS)?.last().expect("nonempty"));
    if ray_disagreement(a, b) {
        return Err(Error::RayDisagreement { first: a, second: b });
    }
    Ok(a.re.max(0.0))
}

/// Ray estimates behind `delta`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub ratio_vertical: C64,
    pub ratio_slanted: C64,
    pub derivative_vertical: C64,
    pub derivative_slanted: C64,
}

fn grows(values: &[C64]) -> Option<f64> {
    let n = values.len();
    let (prev, last) = (values[n - 2].norm(), values[n - 1].norm());
    if last > prev * (1.0 + RAY_TOLERANCE) && last - prev > RAY_TOLERANCE {
        Some(last)
    } else {
        None
    }
}

/// `delta = angle-lim G(z)/z`, checked against `angle-lim G'(z)` on two rays
/// and for being real; stores the value in `info`.
pub fn delta_limit(info: &mut GeneratorInfo) -> Result<DeltaEstimate> {
    let vertical = nt_path(NtTarget::InfinityInU, 1.0, RAY_POINTS)?;
    let slanted = nt_ray(NtTarget::InfinityInU, 1.0, RAY_POINTS)?;
    let g = &info.g;
    let q_v: Vec<C64> = vertical.iter().map(|&z| g.value(z) / z).collect();
    let q_s: Vec<C64> = slanted.iter().map(|&z| g.value(z) / z).collect();
    if let Some(m) = grows(&q_v).or_else(|| grows(&q_s)) {
        return Err(Error::DivergenceDetected(m));
    }
    let last = |pts: &[C64]| *pts.last().expect("nonempty");
    let d_v = g.derivative(last(&vertical))?;
    let d_s = g.derivative(last(&slanted))?;
    let (a, b) = (last(&q_v), last(&q_s));
    let values = [a, b, d_v, d_s];
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let spread = values
        .iter()
        .flat_map(|x| values.iter().map(move |y| (x - y).norm()))
        .fold(0.0, f64::max);
    if spread > RAY_TOLERANCE * scale {
        return Err(Error::ContractViolation {
            what: format!("ray limits of G(z)/z and G'(z) disagree ({a}, {b}, {d_v}, {d_s})"),
            measured: spread,
            tolerance: RAY_TOLERANCE * scale,
        });
    }
    if a.im.abs() > RAY_TOLERANCE {
        return Err(Error::ContractViolation {
            what: format!("delta = {a} is not real"),
            measured: a.im.abs(),
            tolerance: RAY_TOLERANCE,
        });
    }
    info.delta = Some(a.re);
    Ok(DeltaEstimate {
        delta: a.re,
        ratio_vertical: a,
        ratio_slanted: b,
        derivative_vertical: d_v,
        derivative_slanted: d_s,
    })
}

/// `max |G~(gamma^{-1} z) - 2i/(z+i)^2 G(z)|` over `grid`, where `G~` is the
/// Richardson generator of the disc family `gamma^{-1} o phi_t o gamma`.
pub fn conjugate_generator_residual(fam: &SemigroupFamily, grid: &[C64]) -> Result<f64> {
    let closed = fam.closed_form_generator();
    let mut worst: f64 = 0.0;
    for &z in grid {
        Domain::HalfPlane.check(z)?;
        let w = gamma_inv(z);
        let d = GENERATOR_STEPS.map(|t| (gamma_inv(fam.flow(t, z)) - w) / t);
        let (disc_g, spread) = richardson_to_zero(GENERATOR_STEPS, d);
        let tolerance = RICHARDSON_TOLERANCE * disc_g.norm().max(1.0);
        if !(spread <= tolerance) {
            return Err(Error::Convergence {
                what: "disc-side generator Richardson extrapolation",
                change: spread,
                tolerance,
            });
        }
        let g = match &closed {
            Some(g) => g.value(z),
            None => numeric_generator_checked(fam, z)?,
        };
        let rhs = 2.0 * I / ((z + I) * (z + I)) * g;
        worst = worst.max((disc_g - rhs).norm());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ModelKind {
    /// Interior Denjoy-Wolff point: `h(phi_t) = e^{G'(d) t} h`.
    Koenigs { multiplier: C64 },
    /// Boundary Denjoy-Wolff point: `h(phi_t) = h + G(i) t`.
    Abel { step: C64 },
}

/// The model function `h` with its normalization and equation residuals.
#[derive(Clone, Debug)]
pub struct ModelFunction {
    pub h: AnalyticMap,
    pub kind: ModelKind,
    /// `d` for Koenigs, `i` for Abel.
    pub base: C64,
    pub value_at_base: C64,
    pub derivative_at_base: C64,
    pub functional_residual: f64,
}

#[derive(Clone)]
struct ModelCore {
    g: EvalFn,
    kind: ModelKind,
    base: C64,
}

fn model_quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 500,
    }
}

impl ModelCore {
    /// Smallest `|G|` (Abel) or `|G(zeta)/(zeta - d)|` (Koenigs) on the
    /// straight path from the base point to `z`.
    fn path_clearance(&self, z: C64) -> f64 {
        let n = 64;
        (1..=n)
            .map(|k| {
                let s = k as f64 / n as f64;
                let zeta = self.base + (z - self.base) * s;
                match self.kind {
                    ModelKind::Abel { .. } => (self.g)(zeta).norm(),
                    ModelKind::Koenigs { .. } => (self.g)(zeta).norm() / (zeta - self.base).norm(),
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn value(&self, z: C64) -> Result<C64> {
        let dz = z - self.base;
        if dz == C64::new(0.0, 0.0) {
            return Ok(dz);
        }
        let clearance = self.path_clearance(z);
        if !(clearance >= PATH_ZERO) {
            return Err(Error::PathThroughZero { distance: clearance });
        }
        let (g, base) = (&self.g, self.base);
        match self.kind {
            ModelKind::Abel { step } => {
                let r = integrate(|s: f64| step / g(base + dz * s), &[0.0, 1.0], model_quad())?;
                Ok(dz * r.value)
            }
            ModelKind::Koenigs { multiplier } => {
                let r = integrate(
                    |s: f64| dz * multiplier / g(base + dz * s) - 1.0 / s,
                    &[0.0, 1.0],
                    model_quad(),
                )?;
                Ok(dz * r.value.exp())
            }
        }
    }
}

fn refine_interior_point(g: &AnalyticMap, d0: C64) -> Result<C64> {
    let mut d = d0;
    for _ in 0..8 {
        let step = g.value(d) / g.derivative(d)?;
        d -= step;
        if step.norm() < 1e-15 * d.norm().max(1.0) {
            break;
        }
    }
    Domain::HalfPlane.check(d)?;
    Ok(d)
}

/// The model function of a nontrivial family by path integration of
/// `G(i)/G` (boundary Denjoy-Wolff point) or `G'(d)/G - 1/(z-d)` (interior).
pub fn model_function(fam: &SemigroupFamily) -> Result<ModelFunction> {
    if fam.is_trivial() {
        return Err(Error::TrivialSemigroup);
    }
    let info = generator(fam)?;
    let dw = info.dw.ok_or(Error::TrivialSemigroup)?;
    let core = match dw {
        ExtendedPoint::Interior(d0) => {
            let d = refine_interior_point(&info.g, d0)?;
            let multiplier = info.g.derivative(d)?;
            if multiplier.norm() < DEGENERATE_MULTIPLIER {
                return Err(Error::DegenerateMultiplier(multiplier));
            }
            ModelCore {
                g: info.g.eval_fn(),
                kind: ModelKind::Koenigs { multiplier },
                base: d,
            }
        }
        ExtendedPoint::Real(_) | ExtendedPoint::Infinity => ModelCore {
            g: info.g.eval_fn(),
            kind: ModelKind::Abel { step: info.g.value(I) },
            base: I,
        },
    };
    let grid = sampling::interior_grid(25);
    let times = [0.25, 1.0];
    let mut functional_residual: f64 = 0.0;
    for &z in &grid {
        let hz = core.value(z)?;
        for &t in &times {
            let moved = core.value(fam.flow(t, z))?;
            let expected = match core.kind {
                ModelKind::Koenigs { multiplier } => (multiplier * t).exp() * hz,
                ModelKind::Abel { step } => hz + step * t,
            };
            functional_residual = functional_residual.max((moved - expected).norm());
        }
    }
    let eval_core = core.clone();
    let h = AnalyticMap::new(format!("h[{}]", fam.name()), Domain::HalfPlane, move |z| {
        eval_core.value(z).unwrap_or(C64::new(f64::NAN, f64::NAN))
    });
    let value_at_base = core.value(core.base)?;
    let derivative_at_base = h.cauchy_derivative(core.base)?;
    let normalization = value_at_base.norm().max((derivative_at_base - 1.0).norm());
    if !(normalization <= NORMALIZATION_TOLERANCE) {
        return Err(Error::ContractViolation {
            what: format!("model function normalization for `{}`", fam.name()),
            measured: normalization,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }
    if !(functional_residual < FUNCTIONAL_TOLERANCE) {
        return Err(Error::ContractViolation {
            what: format!("model function equation for `{}`", fam.name()),
            measured: functional_residual,
            tolerance: FUNCTIONAL_TOLERANCE,
        });
    }
    Ok(ModelFunction {
        h,
        kind: core.kind,
        base: core.base,
        value_at_base,
        derivative_at_base,
        functional_residual,
    })
}

/// `phi_t'(infinity)` against `phi_1'(infinity)^t`, as `(measured, predicted)`.
pub fn angular_power_law(fam: &SemigroupFamily, t: f64) -> Result<(f64, f64)> {
    let one = angular_derivative_at_infinity(&fam.at(1.0)?)?.value;
    let at_t = angular_derivative_at_infinity(&fam.at(t)?)?.value;
    Ok((at_t, one.powf(t)))
}

/// Ratio of the continuity jump at step `dt/2` to the one at step `dt`.
pub fn continuity_halving_ratio(fam: &SemigroupFamily, grid: &[C64], dt: f64) -> f64 {
    let coarse = continuity_jump(fam, grid, dt);
    let fine = continuity_jump(fam, grid, dt / 2.0);
    if coarse == 0.0 {
        return 0.5;
    }
    fine / coarse
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fam(name: &str) -> SemigroupFamily {
        let params = match name {
            "dilation" | "mobius_elliptic" => Params::new().with("c", 1.0),
            "translation" => Params::new().with("b", 1.0),
            _ => Params::new(),
        };
        family_lookup(name, &params).unwrap()
    }

    #[test]
    fn closed_forms_attached() {
        let d = fam("dilation");
        let g = d.closed_form_generator().unwrap();
        assert_eq!(g.value(c(2.0, 3.0)), c(2.0, 3.0));
        assert_eq!(d.closed_form_dw(), Some(ExtendedPoint::Infinity));
        assert!((d.closed_form_phi1_inf().unwrap() - std::f64::consts::E).abs() < 1e-15);
        let t = fam("translation");
        assert_eq!(t.closed_form_generator().unwrap().value(I), c(1.0, 0.0));
        assert_eq!(t.closed_form_phi1_inf(), Some(1.0));
        assert_eq!(fam("example2").closed_form_phi1_inf(), Some(0.0));
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(family_lookup("spiral", &Params::new()), Err(Error::UnknownFamily(_))));
        assert!(matches!(
            family_lookup("dilation", &Params::new().with("c", 0.0)),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            family_lookup("translation", &Params::new().with("b", c(0.0, -1.0))),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            family_lookup("example1", &Params::new().with("c", 1.0)),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn semigroup_law() {
        let grid = sampling::standard_grid();
        let times = standard_times();
        assert_eq!(verify_semigroup_law(&fam("trivial"), &grid, &times), 0.0);
        assert!(verify_semigroup_law(&fam("example2"), &grid, &times) < 1e-10);
        let corrupted = SemigroupFamily::custom("corrupted", |t, z| z + t * t);
        assert!(verify_semigroup_law(&corrupted, &[I], &[(0.5, 0.5)]) > 0.1);
    }

    #[test]
    fn identity_at_time_zero() {
        let grid = sampling::standard_grid();
        for name in FAMILIES {
            assert!(identity_residual(&fam(name), &grid) < 1e-12, "{name}");
        }
    }

    #[test]
    fn generators() {
        let info = generator(&fam("dilation")).unwrap();
        assert!((info.g.value(c(1.0, 2.0)) - c(1.0, 2.0)).norm() < 1e-15);
        assert!(info.diagnostics.closed_form_residual.unwrap() < 1e-6);
        let info = generator(&fam("sqrt_parabolic")).unwrap();
        let z = c(0.5, 1.5);
        assert!((info.g.value(z) + 1.0 / (2.0 * z)).norm() < 1e-15);
        assert!((info.g.value(z).im - z.im / (2.0 * z.norm_sqr())).abs() < 1e-15);
        let info = generator(&fam("trivial")).unwrap();
        assert_eq!(info.g.value(I), c(0.0, 0.0));
        assert_eq!(info.dw, None);
    }

    #[test]
    fn numeric_generator_without_closed_form() {
        let f = SemigroupFamily::custom("dilation-numeric", |t, z| z * t.exp());
        let info = generator(&f).unwrap();
        assert!(!info.closed_form);
        assert!((info.g.value(c(1.0, 1.0)) - c(1.0, 1.0)).norm() < 1e-6);
        assert_eq!(info.dw, Some(ExtendedPoint::Infinity));
    }

    #[test]
    fn corrupted_family_has_no_generator() {
        let f = SemigroupFamily::custom("corrupted", |t, z| z + t * t);
        assert!(matches!(generator(&f), Err(Error::ContractViolation { .. })));
    }

    #[test]
    fn dw_points() {
        assert_eq!(dw_point(&fam("dilation")).unwrap(), ExtendedPoint::Infinity);
        match dw_point(&fam("example1")).unwrap() {
            ExtendedPoint::Interior(d) => assert!((d - I).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(dw_point(&fam("sqrt_parabolic")).unwrap(), ExtendedPoint::Infinity);
        assert_eq!(dw_point(&fam("translation")).unwrap(), ExtendedPoint::Infinity);
        assert!(matches!(dw_point(&fam("example2")).unwrap(), ExtendedPoint::Real(x) if x.abs() < 1e-6));
        assert!(matches!(dw_point(&fam("trivial")), Err(Error::TrivialSemigroup)));
        let contracting = family_lookup("dilation", &Params::new().with("c", -1.0)).unwrap();
        assert!(matches!(dw_point(&contracting).unwrap(), ExtendedPoint::Real(x) if x.abs() < 1e-6));
    }

    #[test]
    fn rotation_never_settles() {
        // Elliptic automorphism: w -> e^{it} w conjugated to U, started off the fixed point.
        let f = SemigroupFamily::custom("rotation", |t, z| {
            let w = C64::from_polar(1.0, t) * gamma_inv(z + 1.0);
            crate::cayley::gamma(w)
        });
        assert!(matches!(dw_point(&f), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn angular_derivatives() {
        let dil = crate::maps::catalog_lookup("dilation", &Params::new().with("c", 2.0)).unwrap();
        assert!((angular_derivative_at_infinity(&dil).unwrap().value - 2.0).abs() < 1e-12);
        let tr = crate::maps::catalog_lookup("translation", &Params::new().with("b", 1.0)).unwrap();
        assert!((angular_derivative_at_infinity(&tr).unwrap().value - 1.0).abs() < 1e-5);
        let e1 = fam("example1").at(1.0).unwrap();
        let a = angular_derivative_at_infinity(&e1).unwrap();
        assert!(a.value < 1e-5 && a.decreasing);
    }

    #[test]
    fn disc_angular_derivative_is_reciprocal() {
        let dil = crate::maps::catalog_lookup("dilation", &Params::new().with("c", 2.0)).unwrap();
        let psi = crate::cayley::conjugate_map(&dil).unwrap();
        assert!((angular_derivative_at_one(&psi).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn deltas() {
        for (name, expected) in [("dilation", 1.0), ("translation", 0.0), ("sqrt_parabolic", 0.0)] {
            let mut info = generator(&fam(name)).unwrap();
            let est = delta_limit(&mut info).unwrap();
            assert!((est.delta - expected).abs() < 1e-3, "{name}");
            assert_eq!(info.delta, Some(est.delta));
        }
        let mut info = generator(&fam("example1")).unwrap();
        assert!(matches!(delta_limit(&mut info), Err(Error::DivergenceDetected(_))));
    }

    #[test]
    fn conjugate_generator() {
        let grid = sampling::interior_grid(50);
        assert!(conjugate_generator_residual(&fam("example1"), &grid).unwrap() < 1e-6);
        assert_eq!(conjugate_generator_residual(&fam("trivial"), &grid).unwrap(), 0.0);
        assert!(conjugate_generator_residual(&fam("dilation"), &grid).unwrap() < 1e-6);
        // disc-side generator of the dilation family at 0 is (2i/(2i)^2) i = 1/2
        let d = GENERATOR_STEPS.map(|t| gamma_inv(fam("dilation").flow(t, I)) / t);
        let (g0, _) = richardson_to_zero(GENERATOR_STEPS, d);
        assert!((g0 - c(0.5, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn berkson_porta_signs() {
        for name in ["dilation", "translation", "sqrt_parabolic", "example1", "mobius_elliptic"] {
            let info = generator(&fam(name)).unwrap();
            let check = info.sign_check().unwrap();
            assert!(check.passed, "{name}: {}", check.min_imag);
        }
        let info = generator(&fam("example1")).unwrap();
        assert!((info.berkson_porta_f(c(0.3, 2.0)).unwrap() - c(0.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn model_functions() {
        let m = model_function(&fam("translation")).unwrap();
        assert_eq!(m.kind, ModelKind::Abel { step: c(1.0, 0.0) });
        for z in [c(0.4, 0.7), c(-2.0, 3.0)] {
            assert!((m.h.value(z) - (z - I)).norm() < 1e-8);
        }
        let m = model_function(&fam("sqrt_parabolic")).unwrap();
        for z in [c(0.4, 0.7), c(-2.0, 3.0)] {
            assert!((m.h.value(z) + I * (z * z + 1.0) / 2.0).norm() < 1e-6);
        }
        let m = model_function(&fam("example1")).unwrap();
        match m.kind {
            ModelKind::Koenigs { multiplier } => assert!((multiplier + 1.0).norm() < 1e-10),
            other => panic!("{other:?}"),
        }
        for z in [c(0.4, 0.7), c(-2.0, 3.0)] {
            let expected = 2.0 * I * (z - I) / (z + I);
            assert!((m.h.value(z) - expected).norm() < 1e-8);
        }
        assert!(m.functional_residual < 1e-6);
        assert!(matches!(model_function(&fam("trivial")), Err(Error::TrivialSemigroup)));
    }

    #[test]
    fn continuity_jumps_halve() {
        let grid = sampling::grid(4, 4, (-2.0, 2.0), (0.2, 3.0));
        for name in ["dilation", "example1", "example2", "sqrt_parabolic"] {
            let r = continuity_halving_ratio(&fam(name), &grid, 0.01);
            assert!((r - 0.5).abs() < 0.05, "{name}: {r}");
        }
    }

    #[test]
    fn power_law_for_dilation() {
        for t in [0.5, 2.0] {
            let (m, p) = angular_power_law(&fam("dilation"), t).unwrap();
            assert!((m - p).abs() < 1e-3 * p);
        }
    }
}
