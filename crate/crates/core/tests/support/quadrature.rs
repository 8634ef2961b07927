//! Adaptive Gauss–Kronrod (7/15) quadrature, used only as an independent
//! oracle for closed-form phases.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// `∫_a^b f` to roughly `tol` absolute. An interval is accepted when its
/// GK15 value agrees with the sum over its two halves and
/// both halves' Gauss/Kronrod estimates agree (starting from 128 equal
/// pieces); intervals narrower
/// than `1e-14` relative are accepted as-is, which bounds the error from
/// jump discontinuities by (jump)·(width).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let length = b - a;
    const PIECES: usize = 128;
    let h = length / PIECES as f64;
    let mut stack: Vec<(f64, f64, f64)> = (0..PIECES)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == PIECES { b } else { lo + h };
            (lo, hi, gk15(&f, lo, hi).0)
        })
        .collect();
    let mut total = 0.0;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = gk15(&f, lo, mid);
        let (right, right_err) = gk15(&f, mid, hi);
        let local_tol = (tol * (hi - lo) / length).max(1e-18);
        let err = (whole - (left + right)).abs().max(left_err + right_err);
        if err <= local_tol || (hi - lo) <= 1e-14 * (1.0 + hi.abs()) {
            total += left + right;
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
    }
    total
}

/// Like [`integrate`] for integrands that are identically zero up to an
/// unknown onset and nonzero after it. The onset is located by bisection on
/// `f` itself, then each side is integrated separately.
pub fn integrate_with_onset(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b || f(a) != 0.0 || f(b) == 0.0 {
        return integrate(f, a, b, tol);
    }
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) == 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    integrate(&f, a, hi, tol) + integrate(&f, hi, b, tol)
}

#[cfg(test)]
mod self_check {
    use super::{integrate, integrate_with_onset};

    #[test]
    fn integrates_polynomials_and_jumps() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-14) - 9.0).abs() < 1e-12);
        let step = |x: f64| if x >= 0.3 { 2.0 } else { 0.0 };
        assert!((integrate(step, 0.0, 1.0, 1e-13) - 1.4).abs() < 1e-12);
        let late = |x: f64| if x >= 0.549_841_650_364_41 { 1.0 / x } else { 0.0 };
        let exact = (9.1f64 / 0.549_841_650_364_41).ln();
        assert!((integrate_with_onset(late, 0.0, 9.1, 1e-13) - exact).abs() < 1e-12);
    }
}
