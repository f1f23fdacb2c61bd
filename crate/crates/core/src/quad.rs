//! Global adaptive Gauss-Kronrod (10/21-point) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::C64;

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Integrand for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Integrand for C64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

// Kronrod abscissae in descending order; odd entries are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = T::default();
    let mut samples = [(T::default(), T::default()); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kron = kron + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        resasc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let value = kron * half;
    let resasc = resasc * half.abs();
    let mut error = ((kron - gauss) * half).magnitude();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * value.magnitude();
    Panel {
        a,
        b,
        value,
        error: error.max(floor),
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from one panel per
/// consecutive pair of `points`.
///
/// A non-finite panel value is returned as is, without error. Refinement that
/// exhausts `max_intervals` while the error is still above a thousand times
/// the requested tolerance is a [`Error::Quadrature`].
pub fn integrate<T: Integrand, F: Fn(f64) -> T>(
    f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult<T>> {
    assert!(points.len() >= 2, "integration needs at least two breakpoints");
    let mut heap = BinaryHeap::new();
    let mut total = T::default();
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let panel = kronrod(&f, w[0], w[1]);
        evaluations += 21;
        if !panel.value.finite() {
            return Ok(QuadResult {
                value: panel.value,
                error: f64::INFINITY,
                evaluations,
            });
        }
        total = total + panel.value;
        error += panel.error;
        heap.push(panel);
    }
    let target = |total: T| opts.abs_tol.max(opts.rel_tol * total.magnitude());
    while error > target(total) {
        if heap.len() >= opts.max_intervals {
            if error > 1e3 * target(total) {
                let worst = heap.peek().expect("nonempty heap");
                return Err(Error::Quadrature {
                    a: worst.a,
                    b: worst.b,
                    error,
                });
            }
            break;
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel too narrow to split further.
            heap.push(worst);
            if error > 1e3 * target(total) {
                return Err(Error::Quadrature {
                    a: points[0],
                    b: points[points.len() - 1],
                    error,
                });
            }
            break;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        evaluations += 42;
        if !left.value.finite() || !right.value.finite() {
            let value = if left.value.finite() { right.value } else { left.value };
            return Ok(QuadResult {
                value,
                error: f64::INFINITY,
                evaluations,
            });
        }
        total = total - worst.value + left.value + right.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap
        .iter()
        .fold((T::default(), 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let kron: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let gauss: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((kron - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_exact_on_monomials() {
        // Gauss 10-point integrates degree 19 exactly, Kronrod 21-point degree 31.
        for k in 0..32 {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let mut kron = if k == 0 { WGK[10] } else { 0.0 };
            let mut gauss = 0.0;
            for j in 0..10 {
                let x = XGK[j];
                let s = x.powi(k) + (-x).powi(k);
                kron += WGK[j] * s;
                if j % 2 == 1 {
                    gauss += WG[j / 2] * s;
                }
            }
            assert!((kron - exact).abs() < 1e-14, "kronrod degree {k}");
            if k < 20 {
                assert!((gauss - exact).abs() < 1e-14, "gauss degree {k}");
            }
        }
    }

    #[test]
    fn smooth_real_integral() {
        let r = integrate(|x: f64| 1.0 / (x * x + 4.0), &[-1e3, 0.0, 1e3], QuadOptions::default())
            .unwrap();
        let exact = 2.0 * (500.0f64).atan() / 2.0;
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn complex_integral() {
        let r = integrate(|x: f64| C64::new(0.0, x).exp(), &[0.0, std::f64::consts::PI], QuadOptions::default())
            .unwrap();
        assert!((r.value - C64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn sharp_peak_is_refined() {
        let eps = 1e-4;
        let r = integrate(|x: f64| eps / (x * x + eps * eps), &[-1.0, 0.3, 1.0], QuadOptions::default())
            .unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((r.value - exact).abs() < 1e-9);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let r = integrate(|x: f64| if x > 0.5 { f64::INFINITY } else { 1.0 }, &[0.0, 1.0], QuadOptions::default())
            .unwrap();
        assert!(!r.value.is_finite());
    }

    #[test]
    fn stalled_refinement_is_an_error() {
        let opts = QuadOptions {
            max_intervals: 8,
            ..QuadOptions::default()
        };
        let r = integrate(|x: f64| 1.0 / (x - 0.3).abs().sqrt(), &[0.0, 1.0], opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })), "{r:?}");
    }
}
