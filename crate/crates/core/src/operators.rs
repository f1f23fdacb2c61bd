//! Composition operators `T_t f = f o phi_t` on `H^p(U)`: application, the
//! norm `phi_1'(infinity)^{-t/p}`, boundedness, strong-continuity probes, the
//! generator `Gamma f = G f'` and the witness against uniform continuity.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{hardy_norm, membership, test_function, HardyFunction, Membership, NormVerdict, TestFunction};
use crate::maps::{AnalyticMap, Domain};
use crate::semigroup::{angular_derivative_at_infinity, delta_limit, generator, GeneratorInfo, SemigroupFamily};
use crate::C64;

/// `phi_1'(infinity)` below this value is not trusted to be positive.
pub const BOUNDEDNESS_BAND: f64 = 1e-2;
/// Agreement required between `phi_1'(infinity)` and `e^delta`.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-3;

/// `f o phi`.
pub fn compose_apply(f: &HardyFunction, phi: &AnalyticMap) -> Result<HardyFunction> {
    if phi.domain() != Domain::HalfPlane || !phi.is_self_map() {
        return Err(Error::Param(format!(
            "`{}` is not a self-map of the half-plane",
            phi.name()
        )));
    }
    let (fv, pv) = (f.map().eval_fn(), phi.eval_fn());
    let label = format!("{} o {}", f.label(), phi.name());
    let composed = HardyFunction::new(label, move |z| fv(pv(z)));
    Ok(match (f.map().derivative_fn(), phi.derivative_fn()) {
        (Some(df), Some(dp)) => {
            let pv = phi.eval_fn();
            composed.with_derivative(move |z| df(pv(z)) * dp(z))
        }
        _ => composed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessVerdict {
    pub verdict: Boundedness,
    /// Ray estimate of `phi_1'(infinity)`.
    pub phi1_inf: Option<f64>,
    /// Closed form of `phi_1'(infinity)`, when the family carries one.
    pub phi1_inf_closed_form: Option<f64>,
    pub delta: Option<f64>,
    /// `|phi_1'(infinity) - e^delta| / phi_1'(infinity)`.
    pub consistency: Option<f64>,
    pub note: Option<String>,
}

impl BoundednessVerdict {
    /// The `phi_1'(infinity)` used for norms: closed form first.
    pub fn phi1(&self) -> Option<f64> {
        self.phi1_inf_closed_form.or(self.phi1_inf)
    }

    /// `||T_t|| = phi_1'(infinity)^{-t/p}`; `None` unless bounded.
    pub fn norm_at(&self, t: f64, p: f64) -> Option<f64> {
        if self.verdict != Boundedness::Bounded {
            return None;
        }
        self.phi1().map(|a| a.powf(-t / p))
    }

    /// `e^{-delta t / p}`, when `delta` is known.
    pub fn norm_from_delta(&self, t: f64, p: f64) -> Option<f64> {
        self.delta.map(|d| (-d * t / p).exp())
    }
}

fn check_p(p: f64, min: f64) -> Result<()> {
    if !(p >= min) || !p.is_finite() || !(p > 0.0) {
        return Err(Error::Param(format!("exponent p must be finite and at least {min}, got {p}")));
    }
    Ok(())
}

/// Bounded iff `phi_1'(infinity) > 0`, with a band of [`BOUNDEDNESS_BAND`]
/// below which only a decreasing ray trend certifies `Unbounded`.
pub fn classify_boundedness(fam: &SemigroupFamily, p: f64) -> Result<BoundednessVerdict> {
    check_p(p, f64::MIN_POSITIVE)?;
    let mut out = BoundednessVerdict {
        verdict: Boundedness::Inconclusive,
        phi1_inf: None,
        phi1_inf_closed_form: fam.closed_form_phi1_inf(),
        delta: None,
        consistency: None,
        note: None,
    };
    let ang = match fam.at(1.0).and_then(|m| angular_derivative_at_infinity(&m)) {
        Ok(a) => a,
        Err(e) => {
            out.note = Some(e.to_string());
            return Ok(out);
        }
    };
    out.phi1_inf = Some(ang.value);
    if let Ok(mut info) = generator(fam) {
        if let Ok(d) = delta_limit(&mut info) {
            out.delta = Some(d.delta);
        }
    }
    if ang.value < BOUNDEDNESS_BAND {
        if ang.decreasing || ang.value == 0.0 {
            out.verdict = Boundedness::Unbounded;
        } else {
            out.note = Some(format!("phi_1'(inf) = {:e} without a decreasing trend", ang.value));
        }
        return Ok(out);
    }
    out.verdict = Boundedness::Bounded;
    if let Some(d) = out.delta {
        let c = (ang.value - d.exp()).abs() / ang.value;
        out.consistency = Some(c);
        if c > CONSISTENCY_TOLERANCE {
            out.verdict = Boundedness::Inconclusive;
            out.note = Some(format!(
                "phi_1'(inf) = {} disagrees with e^delta = {}",
                ang.value,
                d.exp()
            ));
        }
    }
    Ok(out)
}

/// `||T_t|| = phi_1'(infinity)^{-t/p}`.
pub fn operator_norm(fam: &SemigroupFamily, p: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Param(format!("time t must be nonnegative, got {t}")));
    }
    let v = classify_boundedness(fam, p)?;
    v.norm_at(t, p).ok_or(Error::UnboundedOperator)
}

fn require_bounded(fam: &SemigroupFamily, p: f64) -> Result<BoundednessVerdict> {
    let v = classify_boundedness(fam, p)?;
    if v.verdict != Boundedness::Bounded {
        return Err(Error::UnboundedOperator);
    }
    Ok(v)
}

/// `||f||_p`, accepting an estimate that misses the convergence tolerance as
/// long as it is finite.
pub fn norm_value(f: &HardyFunction, p: f64) -> Result<f64> {
    let est = hardy_norm(f, p)?;
    match est.verdict {
        NormVerdict::Diverged => Err(Error::NotMember(f.label().to_string())),
        _ if est.value.is_finite() => Ok(est.value),
        _ => Err(Error::ContractViolation {
            what: format!(
                "norm of `{}`: {}",
                f.label(),
                est.note.unwrap_or_else(|| "not finite".to_string())
            ),
            measured: est.value,
            tolerance: 0.0,
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalNorm {
    /// `(label, ||f o phi_t||_p / ||f||_p)`.
    pub ratios: Vec<(String, f64)>,
    pub max_ratio: f64,
}

/// `max ||f o phi_t||_p / ||f||_p` over `testset`, a lower bound for `||T_t||`.
pub fn empirical_norm_lower_bound(
    fam: &SemigroupFamily,
    p: f64,
    t: f64,
    testset: &[HardyFunction],
) -> Result<EmpiricalNorm> {
    require_bounded(fam, p)?;
    let phi = fam.at(t)?;
    let mut ratios = Vec::with_capacity(testset.len());
    for f in testset {
        let base = norm_value(f, p)?;
        let moved = norm_value(&compose_apply(f, &phi)?, p)?;
        ratios.push((f.label().to_string(), moved / base));
    }
    let max_ratio = ratios.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    Ok(EmpiricalNorm { ratios, max_ratio })
}

/// `||T_t f - f||_p` for each `t` in `t_seq`.
pub fn strong_continuity_probe(
    fam: &SemigroupFamily,
    f: &HardyFunction,
    p: f64,
    t_seq: &[f64],
) -> Result<Vec<f64>> {
    check_p(p, 1.0)?;
    require_bounded(fam, p)?;
    t_seq
        .iter()
        .map(|&t| {
            let moved = compose_apply(f, &fam.at(t)?)?;
            let base = f.map().eval_fn();
            let diff = HardyFunction::new(format!("T_{t} {0} - {0}", f.label()), move |z| {
                moved.value(z) - base(z)
            });
            norm_value(&diff, p)
        })
        .collect()
}

fn derivative_or_nan(f: &HardyFunction, z: C64) -> C64 {
    f.derivative(z).unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// `Gamma f = G f'`.
pub fn gamma_apply(info: &GeneratorInfo, f: &HardyFunction) -> HardyFunction {
    let g = info.g.eval_fn();
    let f = f.clone();
    HardyFunction::new(format!("G {}'", f.label()), move |z| g(z) * derivative_or_nan(&f, z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainVerdict {
    InDomain,
    NotInDomain,
    Inconclusive,
}

/// Whether `f` lies in the domain `{f : G f' in H^p}` of `Gamma`.
pub fn domain_check(info: &GeneratorInfo, f: &HardyFunction, p: f64) -> DomainVerdict {
    match membership(&gamma_apply(info, f), p) {
        Membership::Member => DomainVerdict::InDomain,
        Membership::NonMember => DomainVerdict::NotInDomain,
        Membership::Inconclusive => DomainVerdict::Inconclusive,
    }
}

/// `||(T_t f - f)/t - G f'||_p`, which is `O(t)` for `f` in the domain.
pub fn generator_residual(
    fam: &SemigroupFamily,
    info: &GeneratorInfo,
    f: &HardyFunction,
    p: f64,
    t: f64,
) -> Result<f64> {
    check_p(p, 1.0)?;
    if !(t > 0.0) {
        return Err(Error::Param(format!("time t must be positive, got {t}")));
    }
    let phi = fam.at(t)?.eval_fn();
    let g = info.g.eval_fn();
    let f = f.clone();
    let label = format!("(T_{t} {0} - {0})/t - G {0}'", f.label());
    let residual = HardyFunction::new(label, move |z| {
        (f.value(phi(z)) - f.value(z)) / t - g(z) * derivative_or_nan(&f, z)
    });
    norm_value(&residual, p)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProbe {
    /// `L_n = ||G e_n'||_p` for `n = 1..=n_max`.
    pub lower_bounds: Vec<f64>,
    /// `(n / pi^{1/p}) ||G omega'||_p`.
    pub floors: Vec<f64>,
    pub g_omega_norm: f64,
}

/// Lower bounds `||Gamma e_n|| = ||G e_n'||_p` growing linearly in `n`, so
/// that `Gamma` is unbounded unless `G = 0`.
pub fn nonuniform_growth_probe(
    fam: &SemigroupFamily,
    info: &GeneratorInfo,
    p: f64,
    n_max: u32,
) -> Result<GrowthProbe> {
    check_p(p, 1.0)?;
    if !fam.is_trivial() {
        require_bounded(fam, p)?;
    }
    let omega = test_function(TestFunction::Omega { p })?;
    let g_omega = hardy_norm(&gamma_apply(info, &omega), p)?;
    if g_omega.verdict != NormVerdict::Converged {
        return Err(Error::NotApplicable(format!(
            "G omega' is not a confirmed member of H^{p}: {}",
            g_omega.note.unwrap_or_default()
        )));
    }
    let mut lower_bounds = Vec::with_capacity(n_max as usize);
    let mut floors = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let e = test_function(TestFunction::En { n, p })?;
        lower_bounds.push(norm_value(&gamma_apply(info, &e), p)?);
        floors.push(n as f64 / PI.powf(1.0 / p) * g_omega.value);
    }
    Ok(GrowthProbe {
        lower_bounds,
        floors,
        g_omega_norm: g_omega.value,
    })
}
