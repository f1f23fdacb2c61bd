//! Cayley transform between `U` and `D`, sectors at `infinity` and at `1`, and
//! non-tangential approach paths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{AnalyticMap, Domain};
use crate::{C64, I};

/// Innermost radius of a half-plane approach path.
pub const PATH_RADIUS_MIN: f64 = 10.0;
/// Outermost radius; beyond it `(z-i)/(z+i)` loses too many digits.
pub const PATH_RADIUS_MAX: f64 = 1e6;

/// `gamma^{-1}(z) = (z-i)/(z+i)` without a domain check.
#[inline]
pub fn gamma_inv(z: C64) -> C64 {
    (z - I) / (z + I)
}

/// `gamma(w) = i(1+w)/(1-w)` without a domain check.
#[inline]
pub fn gamma(w: C64) -> C64 {
    I * (1.0 + w) / (1.0 - w)
}

pub fn to_disc(z: C64) -> Result<C64> {
    Domain::HalfPlane.check(z)?;
    Ok(gamma_inv(z))
}

pub fn to_halfplane(w: C64) -> Result<C64> {
    Domain::Disc.check(w)?;
    Ok(gamma(w))
}

/// `psi = gamma^{-1} o phi o gamma` as a map on the disc. The chain-rule
/// derivative is attached when `phi` carries a closed form.
pub fn conjugate_map(phi: &AnalyticMap) -> Result<AnalyticMap> {
    if phi.domain() != Domain::HalfPlane {
        return Err(Error::Param(format!(
            "conjugate_map needs a half-plane map, `{}` lives on the disc",
            phi.name()
        )));
    }
    let f = phi.eval_fn();
    let psi = AnalyticMap::new(format!("conj({})", phi.name()), Domain::Disc, move |w| {
        gamma_inv(f(gamma(w)))
    })
    .with_params(phi.params().clone());
    let psi = match phi.derivative_fn() {
        Some(df) => {
            let f = phi.eval_fn();
            psi.with_derivative(move |w| {
                let z = gamma(w);
                let v = f(z);
                let one_minus = 1.0 - w;
                let dgamma = 2.0 * I / (one_minus * one_minus);
                let dgamma_inv = 2.0 * I / ((v + I) * (v + I));
                dgamma_inv * df(z) * dgamma
            })
        }
        None => psi,
    };
    Ok(if phi.is_self_map() { psi.into_self_map() } else { psi })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Sector {
    /// `T_u(inf) = {x+iy in U : |x| < u y}`.
    HalfPlaneAtInfinity(f64),
    /// `S_a(1) = {w in D : |w-1| < a(1-|w|)}`.
    DiscAtOne(f64),
}

impl Sector {
    pub fn contains(&self, point: C64) -> bool {
        match *self {
            Sector::HalfPlaneAtInfinity(u) => point.im > 0.0 && point.re.abs() < u * point.im,
            Sector::DiscAtOne(a) => {
                let r = point.norm();
                r < 1.0 && (point - 1.0).norm() < a * (1.0 - r)
            }
        }
    }
}

pub fn sector_contains(s: Sector, point: C64) -> bool {
    s.contains(point)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NtTarget {
    InfinityInU,
    OneInD,
}

fn check_opening(target: NtTarget, opening: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Param(format!("approach path needs n >= 2, got {n}")));
    }
    let ok = match target {
        NtTarget::InfinityInU => opening > 0.0,
        NtTarget::OneInD => opening > 1.0,
    };
    if !ok || !opening.is_finite() {
        return Err(Error::Param(format!(
            "sector opening {opening} is out of range for {target:?}"
        )));
    }
    Ok(())
}

fn radii(n: usize) -> impl Iterator<Item = f64> {
    let ratio = (PATH_RADIUS_MAX / PATH_RADIUS_MIN).ln();
    (0..n).map(move |k| {
        if k + 1 == n {
            PATH_RADIUS_MAX
        } else {
            PATH_RADIUS_MIN * (ratio * k as f64 / (n - 1) as f64).exp()
        }
    })
}

fn ray(target: NtTarget, opening: f64, n: usize, slope: f64) -> Result<Vec<C64>> {
    let dir = C64::new(slope, 1.0) / slope.hypot(1.0);
    let points: Vec<C64> = radii(n)
        .map(|r| {
            let z = dir * r;
            match target {
                NtTarget::InfinityInU => z,
                NtTarget::OneInD => gamma_inv(z),
            }
        })
        .collect();
    let sector = match target {
        NtTarget::InfinityInU => Sector::HalfPlaneAtInfinity(opening),
        NtTarget::OneInD => Sector::DiscAtOne(opening),
    };
    if let Some(bad) = points.iter().find(|p| !sector.contains(**p)) {
        return Err(Error::Domain {
            point: *bad,
            domain: "approach sector",
        });
    }
    Ok(points)
}

/// Points on the vertical ray `iR` (half-plane) or its image `(R-1)/(R+1)`
/// (disc), `R` geometric from 10 to 1e6. The vertical ray lies in every sector.
pub fn nt_path(target: NtTarget, opening: f64, n: usize) -> Result<Vec<C64>> {
    check_opening(target, opening, n)?;
    ray(target, opening, n, 0.0)
}

/// A second, slanted approach ray well inside the same sector: `|x|/y = u/2`
/// in `U`, and for `S_a(1)` the slope `s` with `sqrt(1+s^2) = (1+a)/2`.
pub fn nt_ray(target: NtTarget, opening: f64, n: usize) -> Result<Vec<C64>> {
    check_opening(target, opening, n)?;
    let slope = match target {
        NtTarget::InfinityInU => opening / 2.0,
        NtTarget::OneInD => {
            let h = (1.0 + opening) / 2.0;
            (h * h - 1.0).sqrt()
        }
    };
    ray(target, opening, n, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{catalog_lookup, Params};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn to_disc_values() {
        assert_eq!(to_disc(I).unwrap(), c(0.0, 0.0));
        assert!((to_disc(c(0.0, 3.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((to_disc(c(1.0, 1.0)).unwrap() - c(0.2, -0.4)).norm() < 1e-15);
        assert!(matches!(to_disc(c(1.0, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn to_halfplane_values() {
        assert_eq!(to_halfplane(c(0.0, 0.0)).unwrap(), I);
        assert!((to_halfplane(c(0.5, 0.0)).unwrap() - c(0.0, 3.0)).norm() < 1e-15);
        assert!((to_halfplane(c(-0.5, 0.0)).unwrap() - c(0.0, 1.0 / 3.0)).norm() < 1e-15);
        assert!(matches!(to_halfplane(c(0.0, 1.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn round_trip() {
        for z in [c(0.3, 0.01), c(-40.0, 2.0), c(1.0, 1.0), c(0.0, 100.0)] {
            let back = to_halfplane(to_disc(z).unwrap()).unwrap();
            assert!((back - z).norm() < 1e-12 * z.norm().max(1.0));
        }
    }

    #[test]
    fn conjugate_of_identity_is_identity() {
        let id = catalog_lookup("identity", &Params::new()).unwrap();
        let psi = conjugate_map(&id).unwrap();
        for w in [c(0.0, 0.0), c(0.3, -0.2), c(-0.9, 0.1)] {
            assert!((psi.eval(w).unwrap() - w).norm() < 1e-14);
        }
    }

    #[test]
    fn conjugate_of_example1_is_a_contraction() {
        let t = 0.7;
        let phi = catalog_lookup("example1", &Params::new().with("t", t)).unwrap();
        let psi = conjugate_map(&phi).unwrap();
        let q = (-t as f64).exp();
        for k in 0..100 {
            let r = 0.95 * (k % 10) as f64 / 10.0;
            let theta = 0.6283 * (k / 10) as f64;
            let w = C64::from_polar(r, theta);
            assert!((psi.eval(w).unwrap() - w * q).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_of_dilation_at_origin() {
        let phi = catalog_lookup("dilation", &Params::new().with("c", 2.0)).unwrap();
        let psi = conjugate_map(&phi).unwrap();
        assert!((psi.eval(c(0.0, 0.0)).unwrap() - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let w = c(0.2, 0.3);
        assert!((psi.derivative(w).unwrap() - psi.cauchy_derivative(w).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn sector_membership() {
        assert!(sector_contains(Sector::HalfPlaneAtInfinity(1.0), c(1.0, 2.0)));
        assert!(!sector_contains(Sector::HalfPlaneAtInfinity(1.0), c(3.0, 2.0)));
        assert!(!sector_contains(Sector::HalfPlaneAtInfinity(1.0), c(1.0, 1.0)));
        assert!(sector_contains(Sector::DiscAtOne(2.0), c(0.9, 0.0)));
        assert!(!sector_contains(Sector::DiscAtOne(2.0), c(0.0, 0.99)));
    }

    #[test]
    fn vertical_path() {
        let pts = nt_path(NtTarget::InfinityInU, 1.0, 3).unwrap();
        assert_eq!(pts.len(), 3);
        for (p, r) in pts.iter().zip([10.0, 3162.2776601683795, 1e6]) {
            assert_eq!(p.re, 0.0);
            assert!((p.im - r).abs() < 1e-9 * r);
        }
    }

    #[test]
    fn disc_path_inside_stolz_region() {
        let pts = nt_path(NtTarget::OneInD, 8.0, 2).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert!(Sector::DiscAtOne(8.0).contains(*p));
        }
        assert!((pts[1] - 1.0).norm() < (pts[0] - 1.0).norm());
    }

    #[test]
    fn slanted_rays_stay_in_sector() {
        for u in [0.5, 1.0, 3.0] {
            let pts = nt_ray(NtTarget::InfinityInU, u, 6).unwrap();
            assert!(pts.iter().all(|p| Sector::HalfPlaneAtInfinity(u).contains(*p)));
            assert!(pts[0].re > 0.0);
        }
        for a in [1.5, 2.0, 8.0] {
            let pts = nt_ray(NtTarget::OneInD, a, 6).unwrap();
            assert!(pts.iter().all(|p| Sector::DiscAtOne(a).contains(*p)));
        }
    }

    #[test]
    fn bad_openings() {
        assert!(matches!(nt_path(NtTarget::InfinityInU, 0.0, 3), Err(Error::Param(_))));
        assert!(matches!(nt_path(NtTarget::OneInD, 1.0, 3), Err(Error::Param(_))));
        assert!(matches!(nt_path(NtTarget::InfinityInU, 1.0, 1), Err(Error::Param(_))));
    }
}
