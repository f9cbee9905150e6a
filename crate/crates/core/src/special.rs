//! Constants, harmonic-type sums and the exponential integral.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Euler-Mascheroni constant to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// `Σ_{k=1}^{n} 1/k`, by direct summation (smallest terms first).
pub fn harmonic(n: u64) -> f64 {
    sum_inverse_powers(1, n, 1)
}

/// `Σ_{k=lo}^{hi} k^{-p}` summed from `hi` down to `lo`. Empty when `lo > hi`.
pub fn sum_inverse_powers(lo: u64, hi: u64, p: i32) -> f64 {
    let lo = lo.max(1);
    if lo > hi {
        return 0.0;
    }
    (lo..=hi).rev().map(|k| 1.0 / pow_i(k as f64, p)).sum()
}

/// `Σ_{k=1}^{m} (2k-1)^{-p}`.
pub fn sum_inverse_odd_powers(m: u64, p: i32) -> f64 {
    (1..=m).rev().map(|k| 1.0 / pow_i((2 * k - 1) as f64, p)).sum()
}

fn pow_i(x: f64, p: i32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..p {
        acc *= x;
    }
    acc
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    math::ln_gamma(x)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK_KRONROD: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const GK_GAUSS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * GK_KRONROD[7];
    let mut gauss = fc * GK_GAUSS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += GK_KRONROD[i] * pair;
        if i % 2 == 1 {
            gauss += GK_GAUSS[i / 2] * pair;
        }
    }
    (kronrod * half, math::abs((kronrod - gauss) * half))
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on `[a, b]` to absolute
/// tolerance `tol`. Intervals are bisected until each one's error estimate
/// is below its share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let width = b - a;
    let mut stack: Vec<(f64, f64, u32)> = Vec::new();
    stack.push((a, b, 0));
    let mut total = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod_15(&f, lo, hi);
        let share = tol * (hi - lo) / width;
        if err <= share || depth >= 50 {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}

/// Upper argument bound for the series cross-check; beyond it the
/// alternating series loses too many digits to cancellation.
pub const E1_SERIES_LIMIT: f64 = 15.0;

/// `E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k · k!)`.
pub fn e1_series(x: f64) -> Result<f64> {
    if !(x > 0.0) || x > E1_SERIES_LIMIT {
        return Err(Error::OutOfRange {
            what: "series argument",
            value: x,
        });
    }
    let mut term = 1.0; // (-x)^k / k!
    let mut sum = 0.0;
    let mut k = 1u32;
    loop {
        term *= -x / k as f64;
        let contribution = term / k as f64;
        sum += contribution;
        if k as f64 > x && math::abs(contribution) < 1e-18 {
            break;
        }
        k += 1;
    }
    Ok(-EULER_GAMMA - math::ln(x) - sum)
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
///
/// Computed by adaptive quadrature of `∫_0^1 e^{-x/u}/u du` (the substitution
/// `t = x/u`) to absolute tolerance `1e-10`. For `x ≤ 15` the result is
/// checked against [`e1_series`]; a disagreement above `1e-9` is an error.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange {
            what: "E1 argument",
            value: x,
        });
    }
    let integrand = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            math::exp(-x / u) / u
        }
    };
    let quadrature = integrate(integrand, 0.0, 1.0, 1e-12);
    if x <= E1_SERIES_LIMIT {
        let series = e1_series(x)?;
        if math::abs(series - quadrature) > 1e-9 {
            return Err(Error::QuadratureMismatch { quadrature, series });
        }
    }
    Ok(quadrature)
}

/// `e · E1(1)`, the limiting probability that a vertex uses its cheapest edge.
pub fn rank_one_probability() -> f64 {
    core::f64::consts::E * exp_integral_e1(1.0).expect("E1(1) is in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_small() {
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(harmonic(0), 0.0);
    }

    #[test]
    fn e1_at_one_matches_series_and_constant() {
        let q = exp_integral_e1(1.0).unwrap();
        let s = e1_series(1.0).unwrap();
        assert!((q - s).abs() < 1e-10);
        // Independent reference digits of E1(1).
        assert!((q - 0.219_383_934_395_520_27).abs() < 1e-10);
        assert!((rank_one_probability() - 0.596_347_362_323_194_1).abs() < 1e-9);
    }

    #[test]
    fn e1_at_ten() {
        let q = exp_integral_e1(10.0).unwrap();
        let s = e1_series(10.0).unwrap();
        assert!((q - s).abs() < 1e-9);
        assert!((q - 4.156_968_929_685_324e-6).abs() < 1e-9);
    }

    #[test]
    fn e1_below_integrand_bound() {
        for &x in &[1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 40.0] {
            let q = exp_integral_e1(x).unwrap();
            assert!(q < (-x).exp() / x, "x = {x}");
            assert!(q > 0.0);
        }
    }

    #[test]
    fn e1_domain() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(e1_series(20.0).is_err());
    }

    #[test]
    fn quadrature_polynomial_exact() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }
}
