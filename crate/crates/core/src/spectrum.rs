//! Point spectrum of `Gamma f = G f'` through the model function `h`: the
//! candidates are `h^k` with eigenvalue `G'(d) k` (interior Denjoy-Wolff
//! point) or `e^{nu h}` with eigenvalue `G(i) nu` (boundary point), and `H^p`
//! membership decides which of them are eigenfunctions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{membership, HardyFunction, Membership};
use crate::operators::{classify_boundedness, Boundedness};
use crate::sampling;
use crate::semigroup::{generator, model_function, ModelFunction, ModelKind, SemigroupFamily};
use crate::{C64, I};

pub const DEFAULT_K_MAX: u32 = 20;
/// Residual tolerance for eigenfunctions found in the spectrum.
pub const EIGEN_TOLERANCE: f64 = 1e-6;
/// `|h|` above this value at every far sample counts as bounded below.
pub const BOUNDED_BELOW: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DwKind {
    Interior,
    Boundary,
}

/// A rectangular lattice of `nu` values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NuGrid {
    pub re: (f64, f64, usize),
    pub im: (f64, f64, usize),
}

impl Default for NuGrid {
    fn default() -> Self {
        NuGrid {
            re: (-2.0, 2.0, 9),
            im: (-2.0, 2.0, 9),
        }
    }
}

impl fmt::Display for NuGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.re.0, self.re.1, self.re.2, self.im.0, self.im.1, self.im.2
        )
    }
}

impl NuGrid {
    /// Parses `re_min:re_max:n,im_min:im_max:n`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Config(format!("nu grid `{text}` is not `re_min:re_max:n,im_min:im_max:n`"));
        let axis = |part: &str| -> Result<(f64, f64, usize)> {
            let f: Vec<&str> = part.split(':').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            let lo = f[0].trim().parse::<f64>().map_err(|_| bad())?;
            let hi = f[1].trim().parse::<f64>().map_err(|_| bad())?;
            let n = f[2].trim().parse::<usize>().map_err(|_| bad())?;
            if n == 0 || !(lo <= hi) || (n == 1 && lo != hi) {
                return Err(bad());
            }
            Ok((lo, hi, n))
        };
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        Ok(NuGrid {
            re: axis(parts[0])?,
            im: axis(parts[1])?,
        })
    }

    fn axis_values((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    pub fn points(&self) -> Vec<C64> {
        let im = Self::axis_values(self.im);
        Self::axis_values(self.re)
            .into_iter()
            .flat_map(|re| im.iter().map(move |&i| C64::new(re, i)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Scan {
    KMax(u32),
    Nu(NuGrid),
    /// `h^k` up to [`DEFAULT_K_MAX`] or the default `nu` lattice.
    Default,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub eigenvalue: C64,
    pub label: String,
    pub membership: Membership,
    /// Decided by the lower bound on `|h|` rather than by quadrature.
    pub short_circuited: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigenResidual {
    /// `max |G f' - lambda f|`.
    pub ode: f64,
    /// `max |f(phi_t) - e^{lambda t} f|`.
    pub flow: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub dw_kind: DwKind,
    pub model: ModelKind,
    pub candidates: Vec<Candidate>,
    pub sigma_pi: Vec<C64>,
    /// Residual checks of the `sigma_pi` entries, in the same order.
    pub residuals: Vec<EigenResidual>,
    pub scan_bounds: String,
}

/// `h^k` as a function on `U`.
pub fn model_power(model: &ModelFunction, k: u32) -> HardyFunction {
    let h = model.h.eval_fn();
    let ki = k as i32;
    HardyFunction::new(format!("h^{k}"), move |z| h(z).powi(ki))
}

/// `e^{nu h}` as a function on `U`.
pub fn model_exponential(model: &ModelFunction, nu: C64) -> HardyFunction {
    let h = model.h.eval_fn();
    HardyFunction::new(format!("exp({nu} h)"), move |z| (nu * h(z)).exp())
}

/// Whether `|h|` stays above [`BOUNDED_BELOW`] far out in `U` and near the
/// real line at large `|x|`.
pub fn bounded_below_at_infinity(model: &ModelFunction) -> bool {
    let far = [1e3, 1e4, 1e5];
    far.iter()
        .flat_map(|&r| [C64::new(0.0, r), C64::new(r, 1e-3), C64::new(-r, 1e-3), C64::new(r, r)])
        .all(|z| model.h.value(z).norm() > BOUNDED_BELOW)
}

/// Candidates `h^k`, `k = 0..=k_max`, with eigenvalues `multiplier * k`.
pub fn scan_interior(model: &ModelFunction, p: f64, k_max: u32) -> Result<Vec<Candidate>> {
    let ModelKind::Koenigs { multiplier } = model.kind else {
        return Err(Error::NotApplicable("interior scan needs a Koenigs function".into()));
    };
    let floor = bounded_below_at_infinity(model);
    Ok((0..=k_max)
        .map(|k| {
            let f = model_power(model, k);
            let (verdict, short) = if k > 0 && floor {
                (Membership::NonMember, true)
            } else {
                (membership(&f, p), false)
            };
            Candidate {
                eigenvalue: multiplier * k as f64,
                label: f.label().to_string(),
                membership: verdict,
                short_circuited: short,
            }
        })
        .collect())
}

/// Candidates `e^{nu h}` over `grid`, with eigenvalues `step * nu`.
pub fn scan_boundary(model: &ModelFunction, p: f64, grid: &NuGrid) -> Result<Vec<Candidate>> {
    let ModelKind::Abel { step } = model.kind else {
        return Err(Error::NotApplicable("boundary scan needs an Abel function".into()));
    };
    Ok(grid
        .points()
        .into_iter()
        .map(|nu| {
            let f = model_exponential(model, nu);
            Candidate {
                eigenvalue: step * nu,
                label: f.label().to_string(),
                membership: membership(&f, p),
                short_circuited: false,
            }
        })
        .collect())
}

/// Point spectrum of the generator of a bounded semigroup on `H^p`.
pub fn point_spectrum(fam: &SemigroupFamily, p: f64, scan: &Scan) -> Result<SpectrumReport> {
    let verdict = classify_boundedness(fam, p)?;
    match verdict.verdict {
        Boundedness::Bounded => {}
        Boundedness::Unbounded => return Err(Error::UnboundedOperator),
        Boundedness::Inconclusive => {
            return Err(Error::NotApplicable(format!(
                "boundedness is inconclusive: {}",
                verdict.note.unwrap_or_default()
            )))
        }
    }
    let model = model_function(fam).map_err(|e| Error::ModelUnavailable(e.to_string()))?;
    spectrum_from_model(fam, &model, p, scan)
}

/// The scan and residual checks of [`point_spectrum`] for a given model
/// function, without the boundedness precondition.
pub fn spectrum_from_model(
    fam: &SemigroupFamily,
    model: &ModelFunction,
    p: f64,
    scan: &Scan,
) -> Result<SpectrumReport> {
    let (dw_kind, candidates, scan_bounds) = match (model.kind, scan) {
        (ModelKind::Koenigs { .. }, Scan::KMax(_)) | (ModelKind::Koenigs { .. }, &Scan::Default) => {
            let k = match scan {
                Scan::KMax(k) => *k,
                _ => DEFAULT_K_MAX,
            };
            (DwKind::Interior, scan_interior(model, p, k)?, format!("k_max={k}"))
        }
        (ModelKind::Abel { .. }, Scan::Nu(g)) => {
            (DwKind::Boundary, scan_boundary(model, p, g)?, format!("nu_grid={g}"))
        }
        (ModelKind::Abel { .. }, Scan::Default) => {
            let g = NuGrid::default();
            (DwKind::Boundary, scan_boundary(model, p, &g)?, format!("nu_grid={g}"))
        }
        (kind, scan) => {
            return Err(Error::Config(format!(
                "scan {scan:?} does not fit a model function of kind {kind:?}"
            )))
        }
    };
    let grid = sampling::interior_grid(9);
    let mut sigma_pi = Vec::new();
    let mut residuals = Vec::new();
    for (k, cand) in candidates.iter().enumerate() {
        if cand.membership != Membership::Member {
            continue;
        }
        let f = match (model.kind, dw_kind) {
            (ModelKind::Koenigs { .. }, _) => model_power(model, k as u32),
            _ => {
                let nu = grid_nu(scan, k);
                model_exponential(model, nu)
            }
        };
        let r = eigen_residual(fam, &f, cand.eigenvalue, &grid, &[0.25, 1.0])?;
        if !(r.ode < EIGEN_TOLERANCE && r.flow < EIGEN_TOLERANCE) {
            return Err(Error::ContractViolation {
                what: format!("eigen equation for `{}`", cand.label),
                measured: r.ode.max(r.flow),
                tolerance: EIGEN_TOLERANCE,
            });
        }
        sigma_pi.push(cand.eigenvalue);
        residuals.push(r);
    }
    Ok(SpectrumReport {
        dw_kind,
        model: model.kind,
        candidates,
        sigma_pi,
        residuals,
        scan_bounds,
    })
}

fn grid_nu(scan: &Scan, k: usize) -> C64 {
    match scan {
        Scan::Nu(g) => g.points()[k],
        _ => NuGrid::default().points()[k],
    }
}

/// Residuals of `G f' = lambda f` on `grid` and of `f o phi_t = e^{lambda t} f`
/// on `grid x t_list`.
pub fn eigen_residual(
    fam: &SemigroupFamily,
    f: &HardyFunction,
    lambda: C64,
    grid: &[C64],
    t_list: &[f64],
) -> Result<EigenResidual> {
    let g = match fam.closed_form_generator() {
        Some(g) => g,
        None => generator(fam)?.g,
    };
    let mut ode: f64 = 0.0;
    let mut flow: f64 = 0.0;
    for &z in grid {
        let fz = f.eval(z)?;
        ode = ode.max((g.value(z) * f.derivative(z)? - lambda * fz).norm());
        for &t in t_list {
            let moved = f.eval(fam.flow(t, z))?;
            flow = flow.max((moved - (lambda * t).exp() * fz).norm());
        }
    }
    Ok(EigenResidual { ode, flow })
}

/// Largest distance of `(lambda_j - lambda_0) / multiplier` from an integer.
pub fn lattice_defect(multiplier: C64, eigenvalues: &[C64]) -> f64 {
    let Some(&first) = eigenvalues.first() else {
        return 0.0;
    };
    eigenvalues
        .iter()
        .map(|&l| {
            let q = (l - first) / multiplier;
            (q.re - q.re.round()).abs().max(q.im.abs())
        })
        .fold(0.0, f64::max)
}

/// `e^{nu z}` with its derivative, an eigenfunction of translation pointwise.
pub fn exponential(nu: C64) -> HardyFunction {
    HardyFunction::new(format!("exp({nu} z)"), move |z| (nu * z).exp())
        .with_derivative(move |z| nu * (nu * z).exp())
}

/// `e^{nu (z - i)}`, the same up to the constant `e^{-i nu}`.
pub fn shifted_exponential(nu: C64) -> HardyFunction {
    HardyFunction::new(format!("exp({nu} (z-i))"), move |z| (nu * (z - I)).exp())
        .with_derivative(move |z| nu * (nu * (z - I)).exp())
}
