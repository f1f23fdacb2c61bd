//! Randomized invariants.

use std::sync::OnceLock;

use hardylab::cayley::{gamma, gamma_inv, Sector};
use hardylab::hardy::{growth_bound_ratio_with_norm, h_lambda, hardy_norm, NormEstimate};
use hardylab::maps::{catalog_lookup, parse_scalar, AnalyticMap, Params};
use hardylab::report::{format_float, to_canonical_json};
use hardylab::semigroup::{family_lookup, verify_semigroup_law};
use hardylab::C64;
use proptest::prelude::*;

fn upper() -> impl Strategy<Value = C64> {
    (-50.0f64..50.0, -3.0f64..2.0).prop_map(|(x, ly)| C64::new(x, 10f64.powf(ly)))
}

fn catalog(t: f64) -> Vec<AnalyticMap> {
    let entry = |name: &str, params: Params| catalog_lookup(name, &params).unwrap();
    vec![
        entry("identity", Params::new()),
        entry("dilation", Params::new().with("c", 2.5)),
        entry("translation", Params::new().with("b", C64::new(-1.0, 0.5))),
        entry(
            "mobius",
            Params::new().with("a", 2.0).with("b", 1.0).with("c", -1.0).with("d", 3.0),
        ),
        entry("example1", Params::new().with("t", t)),
        entry("example2", Params::new().with("t", t)),
        entry("sqrt_parabolic", Params::new().with("t", t)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cayley_round_trip(z in upper()) {
        let back = gamma(gamma_inv(z));
        let scale = z.norm().max(1.0);
        prop_assert!((back - z).norm() <= 1e-12 * scale * scale, "{z} -> {back}");
        let w = gamma_inv(z);
        prop_assert!(w.norm() < 1.0);
    }

    #[test]
    fn disc_sectors_map_into_halfplane_sectors(
        a in prop::sample::select(vec![2.0, 5.0, 10.0]),
        lr in -6.0f64..-0.01,
        theta in -1.5f64..1.5,
    ) {
        let w = 1.0 - C64::from_polar(10f64.powf(lr), theta);
        prop_assume!(w.norm() < 1.0 && Sector::DiscAtOne(a).contains(w));
        prop_assert!(Sector::HalfPlaneAtInfinity(a).contains(gamma(w)), "w = {w}");
    }

    #[test]
    fn halfplane_sectors_map_into_disc_sectors(
        u in prop::sample::select(vec![1.0, 3.0]),
        s in -0.999f64..0.999,
        ly in 0.001f64..6.0,
    ) {
        let y = 10f64.powf(ly);
        let z = C64::new(s * u * y, y);
        prop_assert!(Sector::DiscAtOne(4.0 * (u + 1.0)).contains(gamma_inv(z)), "z = {z}");
    }

    #[test]
    fn catalog_maps_are_self_maps(z in upper(), t in 0.0f64..5.0) {
        for m in catalog(t) {
            prop_assert!(m.is_self_map());
            let v = m.eval(z).unwrap();
            prop_assert!(v.im > 0.0, "{} at {z}: {v}", m.name());
        }
    }

    #[test]
    fn cauchy_derivative_matches_closed_forms(
        x in -5.0f64..5.0,
        y in 0.05f64..5.0,
        t in 0.0f64..3.0,
    ) {
        let z = C64::new(x, y);
        for m in catalog(t) {
            let closed = m.derivative(z).unwrap();
            let numeric = m.cauchy_derivative(z).unwrap();
            prop_assert!(
                (closed - numeric).norm() <= 1e-8 * closed.norm().max(1.0),
                "{} at {z}: {closed} vs {numeric}", m.name()
            );
        }
    }

    #[test]
    fn example2_imaginary_part(z in upper(), t in 0.0f64..5.0) {
        let m = catalog_lookup("example2", &Params::new().with("t", t)).unwrap();
        let q = (-t).exp();
        let expected = (z + 1.0).norm().powf(q) * (q * (z + 1.0).arg()).sin();
        prop_assert!((m.value(z).im - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn semigroup_law_on_random_points(
        z in upper(),
        t in 0.0f64..2.0,
        s in 0.0f64..2.0,
        k in 0usize..6,
    ) {
        let families = [
            ("dilation", Params::new().with("c", 0.7)),
            ("translation", Params::new().with("b", C64::new(1.0, 0.3))),
            ("example1", Params::new()),
            ("example2", Params::new()),
            ("sqrt_parabolic", Params::new()),
            ("mobius_elliptic", Params::new().with("c", 1.5)),
        ];
        let (name, params) = &families[k];
        let fam = family_lookup(name, params).unwrap();
        let r = verify_semigroup_law(&fam, &[z], &[(t, s)]);
        let scale = fam.flow(t + s, z).norm().max(1.0);
        prop_assert!(r <= 1e-9 * scale, "{name} at {z}, t = {t}, s = {s}: {r}");
    }

    #[test]
    fn growth_bound_holds(z in upper()) {
        static NORM: OnceLock<NormEstimate> = OnceLock::new();
        let f = h_lambda(-1.0);
        let norm = NORM.get_or_init(|| hardy_norm(&f, 2.0).unwrap());
        let r = growth_bound_ratio_with_norm(&f, norm, z).unwrap();
        prop_assert!((0.0..=1.0 + 1e-6).contains(&r), "{z}: {r}");
    }

    #[test]
    fn scalars_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let text = format!("{}{:+}i", format_float(re), im);
        prop_assert_eq!(parse_scalar(&text).unwrap(), C64::new(re, im));
    }

    #[test]
    fn canonical_json_is_stable(xs in prop::collection::vec(-1e300f64..1e300, 0..20)) {
        let a = to_canonical_json(&xs).unwrap();
        let b = to_canonical_json(&xs).unwrap();
        prop_assert_eq!(&a, &b);
        let back: Vec<f64> = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(back, xs);
    }
}
