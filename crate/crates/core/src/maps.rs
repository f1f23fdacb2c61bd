//! Evaluable holomorphic maps on the half-plane `U = {Im z > 0}` and the unit
//! disc `D`, their derivatives, and the catalog of concrete self-maps of `U`.
//!
//! Maps are evaluation contracts plus metadata. All fractional powers use the
//! principal logarithm, `Arg` in `(-pi, pi]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{C64, I};

pub type EvalFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Nodes used by the Cauchy-integral derivative; the check level doubles it.
pub const CAUCHY_NODES: usize = 64;
/// Allowed change between the 64- and 128-node Cauchy estimates.
pub const CAUCHY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    HalfPlane,
    Disc,
}

impl Domain {
    pub fn contains(self, z: C64) -> bool {
        match self {
            Domain::HalfPlane => z.im > 0.0 && z.re.is_finite() && z.im.is_finite(),
            Domain::Disc => z.norm() < 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::HalfPlane => "half-plane",
            Domain::Disc => "disc",
        }
    }

    pub fn check(self, z: C64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::Domain {
                point: z,
                domain: self.name(),
            })
        }
    }

    /// Radius of the circle used for Cauchy-integral derivatives at `z`.
    fn cauchy_radius(self, z: C64) -> f64 {
        match self {
            Domain::HalfPlane => z.im.min(1.0) / 2.0,
            Domain::Disc => (1.0 - z.norm()).min(1.0) / 2.0,
        }
    }
}

/// Named real or complex scalars attached to a map or family.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, C64>);

impl Params {
    pub fn new() -> Self {
        Params(BTreeMap::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<C64>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn insert(&mut self, key: &str, value: C64) {
        self.0.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<C64> {
        self.0.get(key).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, C64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Required complex parameter.
    pub fn complex(&self, key: &str) -> Result<C64> {
        self.get(key)
            .ok_or_else(|| Error::Param(format!("missing parameter `{key}`")))
    }

    /// Required real parameter; a nonzero imaginary part is rejected.
    pub fn real(&self, key: &str) -> Result<f64> {
        let v = self.complex(key)?;
        if v.im != 0.0 {
            return Err(Error::Param(format!("parameter `{key}` must be real, got {v}")));
        }
        Ok(v.re)
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.get(key).is_some() {
            self.real(key)
        } else {
            Ok(default)
        }
    }

    /// Rejects keys outside `allowed`.
    pub fn expect_only(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Param(format!(
                "unexpected parameter `{k}` (allowed: {allowed:?})"
            ))),
            None => Ok(()),
        }
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            if v.im == 0.0 {
                map.serialize_entry(k, &v.re)?;
            } else {
                map.serialize_entry(k, &[v.re, v.im])?;
            }
        }
        map.end()
    }
}

/// Parses `1.5`, `2i`, `-i`, `1+2i` or `1e-3-0.5i` into a complex scalar.
pub fn parse_scalar(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Param(format!("cannot parse scalar `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// An evaluable holomorphic function on the half-plane or the disc.
#[derive(Clone)]
pub struct AnalyticMap {
    name: String,
    params: Params,
    domain: Domain,
    self_map: bool,
    eval: EvalFn,
    derivative: Option<EvalFn>,
}

impl fmt::Debug for AnalyticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticMap")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("self_map", &self.self_map)
            .field("closed_form_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl AnalyticMap {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        eval: impl Fn(C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        AnalyticMap {
            name: name.into(),
            params: Params::new(),
            domain,
            self_map: false,
            eval: Arc::new(eval),
            derivative: None,
        }
    }

    pub fn from_arc(name: impl Into<String>, domain: Domain, eval: EvalFn) -> Self {
        AnalyticMap {
            name: name.into(),
            params: Params::new(),
            domain,
            self_map: false,
            eval,
            derivative: None,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_derivative_arc(mut self, d: Option<EvalFn>) -> Self {
        self.derivative = d;
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    /// Flags the map as a self-map of its domain.
    pub fn into_self_map(mut self) -> Self {
        self.self_map = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_self_map(&self) -> bool {
        self.self_map
    }

    pub fn has_closed_form_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval_fn(&self) -> EvalFn {
        Arc::clone(&self.eval)
    }

    pub fn derivative_fn(&self) -> Option<EvalFn> {
        self.derivative.clone()
    }

    /// Checked evaluation.
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.domain.check(z)?;
        Ok((self.eval)(z))
    }

    /// Evaluation without the domain check, for inner loops whose points are
    /// known to lie in the domain.
    #[inline]
    pub fn value(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    /// Closed-form derivative when attached, otherwise the Cauchy-integral one.
    pub fn derivative(&self, z: C64) -> Result<C64> {
        self.domain.check(z)?;
        match &self.derivative {
            Some(d) => Ok(d(z)),
            None => self.cauchy_derivative(z),
        }
    }

    /// Derivative from the trapezoid rule on the Cauchy integral over the circle
    /// of radius `min(Im z, 1)/2` (half-plane) or `(1-|w|)/2` (disc), with one
    /// doubling check from 64 to 128 nodes.
    pub fn cauchy_derivative(&self, z: C64) -> Result<C64> {
        self.domain.check(z)?;
        let r = self.domain.cauchy_radius(z);
        let n = 2 * CAUCHY_NODES;
        let mut even = C64::new(0.0, 0.0);
        let mut odd = C64::new(0.0, 0.0);
        for k in 0..n {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let e = C64::from_polar(1.0, theta);
            let term = (self.eval)(z + e * r) / e;
            if k % 2 == 0 {
                even += term;
            } else {
                odd += term;
            }
        }
        let coarse = even / (CAUCHY_NODES as f64 * r);
        let fine = (even + odd) / (n as f64 * r);
        let change = (fine - coarse).norm();
        let tolerance = CAUCHY_TOLERANCE * fine.norm().max(1.0);
        if !(change <= tolerance) {
            return Err(Error::Convergence {
                what: "Cauchy-integral derivative",
                change,
                tolerance,
            });
        }
        Ok(fine)
    }

    /// Relative Cauchy-Riemann residual `|f_y - i f_x| / max(1, |f_x|)` from
    /// fourth-order central differences.
    pub fn cauchy_riemann_residual(&self, z: C64) -> Result<f64> {
        self.domain.check(z)?;
        let h = 1e-3 * self.domain.cauchy_radius(z);
        let f = |w: C64| (self.eval)(w);
        let stencil = |dir: C64| {
            (-f(z + dir * (2.0 * h)) + f(z + dir * h) * 8.0 - f(z - dir * h) * 8.0
                + f(z - dir * (2.0 * h)))
                / (12.0 * h)
        };
        let fx = stencil(C64::new(1.0, 0.0));
        let fy = stencil(I);
        Ok((fy - I * fx).norm() / fx.norm().max(1.0))
    }
}

/// Checked evaluation of `map` at `z`.
pub fn eval_map(map: &AnalyticMap, z: C64) -> Result<C64> {
    map.eval(z)
}

/// `map'(z)`: closed form when present, otherwise the Cauchy integral.
pub fn derivative(map: &AnalyticMap, z: C64) -> Result<C64> {
    map.derivative(z)
}

/// Names accepted by [`catalog_lookup`].
pub const CATALOG: &[&str] = &[
    "identity",
    "dilation",
    "translation",
    "mobius",
    "example1",
    "example2",
    "sqrt_parabolic",
];

fn nonnegative_time(params: &Params) -> Result<f64> {
    let t = params.real("t")?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Param(format!("time t must be finite and nonnegative, got {t}")));
    }
    Ok(t)
}

/// `z -> i (z+i + q(z-i)) / (z+i - q(z-i))`, the half-plane image of `w -> q w`.
pub(crate) fn disc_contraction_conjugate(q: f64, z: C64) -> C64 {
    let a = z + I;
    let b = (z - I) * q;
    I * (a + b) / (a - b)
}

pub(crate) fn disc_contraction_conjugate_derivative(q: f64, z: C64) -> C64 {
    let den = z + I - (z - I) * q;
    -4.0 * q / (den * den)
}

/// `(z^2 - t)^{1/2}` on the branch with values in `U`.
pub(crate) fn sqrt_parabolic_value(t: f64, z: C64) -> C64 {
    I * (C64::new(t, 0.0) - z * z).sqrt()
}

/// Looks up a catalog self-map of `U`.
///
/// Parameter keys: `dilation(c)`, `translation(b)`, `mobius(a,b,c,d)`,
/// `example1(t)`, `example2(t)`, `sqrt_parabolic(t)`.
pub fn catalog_lookup(name: &str, params: &Params) -> Result<AnalyticMap> {
    let map = match name {
        "identity" => {
            params.expect_only(&[])?;
            AnalyticMap::new("identity", Domain::HalfPlane, |z| z)
                .with_derivative(|_| C64::new(1.0, 0.0))
        }
        "dilation" => {
            params.expect_only(&["c"])?;
            let c = params.real("c")?;
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::Param(format!("dilation needs c > 0, got {c}")));
            }
            AnalyticMap::new("dilation", Domain::HalfPlane, move |z| z * c)
                .with_derivative(move |_| C64::new(c, 0.0))
        }
        "translation" => {
            params.expect_only(&["b"])?;
            let b = params.complex("b")?;
            if b.im < 0.0 || !b.is_finite() {
                return Err(Error::Param(format!("translation needs Im b >= 0, got {b}")));
            }
            AnalyticMap::new("translation", Domain::HalfPlane, move |z| z + b)
                .with_derivative(|_| C64::new(1.0, 0.0))
        }
        "mobius" => {
            params.expect_only(&["a", "b", "c", "d"])?;
            let (a, b, c, d) = (
                params.real("a")?,
                params.real("b")?,
                params.real("c")?,
                params.real("d")?,
            );
            let det = a * d - b * c;
            if !(det > 0.0) {
                return Err(Error::Param(format!(
                    "mobius needs real coefficients with ad - bc > 0, got {det}"
                )));
            }
            AnalyticMap::new("mobius", Domain::HalfPlane, move |z| (z * a + b) / (z * c + d))
                .with_derivative(move |z| {
                    let den = z * c + d;
                    det / (den * den)
                })
        }
        "example1" => {
            params.expect_only(&["t"])?;
            let q = (-nonnegative_time(params)?).exp();
            AnalyticMap::new("example1", Domain::HalfPlane, move |z| {
                disc_contraction_conjugate(q, z)
            })
            .with_derivative(move |z| disc_contraction_conjugate_derivative(q, z))
        }
        "example2" => {
            params.expect_only(&["t"])?;
            let q = (-nonnegative_time(params)?).exp();
            AnalyticMap::new("example2", Domain::HalfPlane, move |z| (z + 1.0).powf(q) - 1.0)
                .with_derivative(move |z| (z + 1.0).powf(q - 1.0) * q)
        }
        "sqrt_parabolic" => {
            params.expect_only(&["t"])?;
            let t = nonnegative_time(params)?;
            AnalyticMap::new("sqrt_parabolic", Domain::HalfPlane, move |z| {
                sqrt_parabolic_value(t, z)
            })
            .with_derivative(move |z| z / sqrt_parabolic_value(t, z))
        }
        other => return Err(Error::UnknownCatalogEntry(other.to_string())),
    };
    Ok(map.with_params(params.clone()).into_self_map())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn p(pairs: &[(&str, C64)]) -> Params {
        pairs.iter().fold(Params::new(), |acc, (k, v)| acc.with(k, *v))
    }

    #[test]
    fn identity_evaluates_to_its_argument() {
        let id = catalog_lookup("identity", &Params::new()).unwrap();
        assert_eq!(eval_map(&id, c(2.0, 3.0)).unwrap(), c(2.0, 3.0));
    }

    #[test]
    fn example1_fixes_i() {
        let m = catalog_lookup("example1", &p(&[("t", c(1.0, 0.0))])).unwrap();
        assert!((m.eval(I).unwrap() - I).norm() < 1e-15);
    }

    #[test]
    fn example2_at_time_zero_is_identity() {
        let m = catalog_lookup("example2", &p(&[("t", c(0.0, 0.0))])).unwrap();
        assert!((m.eval(c(0.0, 5.0)).unwrap() - c(0.0, 5.0)).norm() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        let id = catalog_lookup("identity", &Params::new()).unwrap();
        assert!(matches!(id.eval(c(1.0, 0.0)), Err(Error::Domain { .. })));
        assert!(matches!(id.eval(c(1.0, -1.0)), Err(Error::Domain { .. })));
        let disc = AnalyticMap::new("w", Domain::Disc, |w| w);
        assert!(matches!(disc.eval(c(1.0, 0.0)), Err(Error::Domain { .. })));
        assert!(disc.eval(c(0.5, 0.5)).is_ok());
    }

    #[test]
    fn polynomial_derivative_by_cauchy_integral() {
        let sq = AnalyticMap::new("square", Domain::HalfPlane, |z| z * z);
        let d = derivative(&sq, c(1.0, 1.0)).unwrap();
        assert!((d - c(2.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn dilation_derivative_is_constant() {
        let m = catalog_lookup("dilation", &p(&[("c", c(2.0, 0.0))])).unwrap();
        for z in [c(0.0, 1.0), c(-3.0, 0.2), c(10.0, 4.0)] {
            assert_eq!(m.derivative(z).unwrap(), c(2.0, 0.0));
            assert!((m.cauchy_derivative(z).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn example2_derivative_matches_cauchy_integral() {
        let m = catalog_lookup("example2", &p(&[("t", c(1.0, 0.0))])).unwrap();
        let closed = m.derivative(I).unwrap();
        let q = (-1.0f64).exp();
        let formula = (I + 1.0).powf(q - 1.0) * q;
        assert!((closed - formula).norm() < 1e-15);
        assert!((m.cauchy_derivative(I).unwrap() - closed).norm() < 1e-8);
    }

    #[test]
    fn example1_boundary_value_at_infinity() {
        let m = catalog_lookup("example1", &p(&[("t", c(1.0, 0.0))])).unwrap();
        let q = (-1.0f64).exp();
        let limit = (1.0 + q) / (1.0 - q);
        assert!((limit - 2.163953413738653).abs() < 1e-12);
        let far = m.eval(c(0.0, 1e9)).unwrap();
        assert!((far - c(0.0, limit)).norm() < 1e-6);
    }

    #[test]
    fn zero_translation_is_identity() {
        let m = catalog_lookup("translation", &p(&[("b", c(0.0, 0.0))])).unwrap();
        for z in [c(0.3, 0.1), c(-7.0, 2.0)] {
            assert_eq!(m.eval(z).unwrap(), z);
        }
    }

    #[test]
    fn sqrt_parabolic_branch_lies_in_upper_half_plane() {
        let m = catalog_lookup("sqrt_parabolic", &p(&[("t", c(1.0, 0.0))])).unwrap();
        let v = m.eval(I).unwrap();
        assert!((v - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        // (z^2 - t)^{1/2} squares back to z^2 - t
        let z = c(0.7, 0.05);
        let w = m.eval(z).unwrap();
        assert!(w.im > 0.0);
        assert!((w * w - (z * z - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn catalog_parameter_errors() {
        assert!(matches!(
            catalog_lookup("dilation", &p(&[("c", c(-1.0, 0.0))])),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            catalog_lookup("dilation", &p(&[("c", c(0.0, 0.0))])),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            catalog_lookup("translation", &p(&[("b", c(0.0, -1.0))])),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            catalog_lookup(
                "mobius",
                &p(&[("a", c(0.0, 0.0)), ("b", c(1.0, 0.0)), ("c", c(1.0, 0.0)), ("d", c(0.0, 0.0))])
            ),
            Err(Error::Param(_))
        ));
        assert!(matches!(
            catalog_lookup("example1", &p(&[("t", c(-1.0, 0.0))])),
            Err(Error::Param(_))
        ));
        assert!(matches!(catalog_lookup("dilation", &Params::new()), Err(Error::Param(_))));
        assert!(matches!(
            catalog_lookup("spiral", &Params::new()),
            Err(Error::UnknownCatalogEntry(_))
        ));
    }

    #[test]
    fn mobius_derivative_matches_cauchy() {
        let m = catalog_lookup(
            "mobius",
            &p(&[("a", c(2.0, 0.0)), ("b", c(1.0, 0.0)), ("c", c(-1.0, 0.0)), ("d", c(3.0, 0.0))]),
        )
        .unwrap();
        let z = c(0.4, 0.9);
        assert!((m.derivative(z).unwrap() - m.cauchy_derivative(z).unwrap()).norm() < 1e-10);
        assert!(m.eval(z).unwrap().im > 0.0);
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(parse_scalar("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_scalar("-2").unwrap(), c(-2.0, 0.0));
        assert_eq!(parse_scalar("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_scalar("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_scalar("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_scalar("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_scalar("1-0.5i").unwrap(), c(1.0, -0.5));
        assert_eq!(parse_scalar("1e-3+2e-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_scalar("-1e+2-i").unwrap(), c(-100.0, -1.0));
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
    }
}
