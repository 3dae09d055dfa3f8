//! Scalar special functions: gamma, incomplete gamma, the Gaussian tail
//! function `Q`, its inverse, and the FM0 error map `R(x) = 2 Q(x) (1 - Q(x))`.
//!
//! The checked entry points return [`Result`]; the crate uses the unchecked
//! variants internally inside hot loops where arguments are known valid.

use crate::error::{domain, Result};
use std::f64::consts::{PI, SQRT_2};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let p = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * p * (p * (-t).exp()) * lanczos_sum(z)
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < 20.0 {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// The gamma function for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Series for the lower regularized gamma without the prefactor.
fn lower_series(a: f64, z: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

/// Continued fraction for the upper incomplete gamma without the prefactor,
/// evaluated with the modified Lentz method.
fn upper_fraction(a: f64, z: f64) -> f64 {
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

pub(crate) fn reg_lower_unchecked(a: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return 1.0;
    }
    if z < a + 1.0 {
        (a * z.ln() - z - ln_gamma_unchecked(a)).exp() * lower_series(a, z)
    } else {
        1.0 - reg_upper_unchecked(a, z)
    }
}

pub(crate) fn reg_upper_unchecked(a: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z.is_infinite() {
        return 0.0;
    }
    if z < a + 1.0 {
        1.0 - reg_lower_unchecked(a, z)
    } else {
        (a * z.ln() - z - ln_gamma_unchecked(a)).exp() * upper_fraction(a, z)
    }
}

/// `Q(a, z1) - Q(a, z2)` for `z1 <= z2`, choosing the representation that
/// avoids subtracting two numbers close to one.
pub(crate) fn reg_upper_diff_unchecked(a: f64, z1: f64, z2: f64) -> f64 {
    if z2 <= z1 {
        return 0.0;
    }
    let q1 = reg_upper_unchecked(a, z1);
    if q1 > 0.5 {
        reg_lower_unchecked(a, z2) - reg_lower_unchecked(a, z1)
    } else {
        q1 - reg_upper_unchecked(a, z2)
    }
}

fn check_incomplete(a: f64, z: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("incomplete gamma requires alpha > 0, got {a}"));
    }
    if !(z >= 0.0) {
        return domain(format!("incomplete gamma requires z >= 0, got {z}"));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(a, z) = gamma(a, z) / Gamma(a)`.
pub fn regularized_lower_gamma(a: f64, z: f64) -> Result<f64> {
    check_incomplete(a, z)?;
    Ok(reg_lower_unchecked(a, z))
}

/// Regularized upper incomplete gamma `Q(a, z) = Gamma(a, z) / Gamma(a)`.
pub fn regularized_upper_gamma(a: f64, z: f64) -> Result<f64> {
    check_incomplete(a, z)?;
    Ok(reg_upper_unchecked(a, z))
}

pub(crate) fn upper_incomplete_gamma_unchecked(a: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return gamma_unchecked(a);
    }
    if z < a + 1.0 {
        gamma_unchecked(a) * (1.0 - reg_lower_unchecked(a, z))
    } else {
        (a * z.ln() - z).exp() * upper_fraction(a, z)
    }
}

/// Upper incomplete gamma `Gamma(a, z) = int_z^inf t^(a-1) e^(-t) dt`.
pub fn upper_incomplete_gamma(a: f64, z: f64) -> Result<f64> {
    check_incomplete(a, z)?;
    Ok(upper_incomplete_gamma_unchecked(a, z))
}

const ERX: f64 = 8.450_629_115_104_675_292_97e-01;
const PP: [f64; 5] = [
    1.283_791_670_955_125_585_61e-01,
    -3.250_421_072_470_014_993_70e-01,
    -2.848_174_957_559_851_047_66e-02,
    -5.770_270_296_489_441_591_57e-03,
    -2.376_301_665_665_016_260_84e-05,
];
const QQ: [f64; 5] = [
    3.979_172_239_591_553_528_19e-01,
    6.502_224_998_876_729_444_85e-02,
    5.081_306_281_875_765_627_76e-03,
    1.324_947_380_043_216_445_26e-04,
    -3.960_228_278_775_368_123_20e-06,
];
const PA: [f64; 7] = [
    -2.362_118_560_752_659_440_77e-03,
    4.148_561_186_837_483_316_66e-01,
    -3.722_078_760_357_013_238_47e-01,
    3.183_466_199_011_617_536_74e-01,
    -1.108_946_942_823_966_774_76e-01,
    3.547_830_432_561_823_593_71e-02,
    -2.166_375_594_868_790_843_00e-03,
];
const QA: [f64; 6] = [
    1.064_208_804_008_442_282_86e-01,
    5.403_979_177_021_710_489_37e-01,
    7.182_865_441_419_626_628_68e-02,
    1.261_712_198_087_616_421_12e-01,
    1.363_708_391_202_905_073_62e-02,
    1.198_449_984_679_910_741_70e-02,
];
const RA: [f64; 8] = [
    -9.864_944_034_847_148_227_05e-03,
    -6.938_585_727_071_817_643_72e-01,
    -1.055_862_622_532_329_098_14e+01,
    -6.237_533_245_032_600_603_96e+01,
    -1.623_966_694_625_734_703_55e+02,
    -1.846_050_929_067_110_359_94e+02,
    -8.128_743_550_630_659_342_46e+01,
    -9.814_329_344_169_145_485_92e+00,
];
const SA: [f64; 8] = [
    1.965_127_166_743_925_712_92e+01,
    1.376_577_541_435_190_426_00e+02,
    4.345_658_774_752_292_288_21e+02,
    6.453_872_717_332_678_803_36e+02,
    4.290_081_400_275_678_333_86e+02,
    1.086_350_055_417_794_351_34e+02,
    6.570_249_770_319_281_701_35e+00,
    -6.042_441_521_485_809_874_38e-02,
];
const RB: [f64; 7] = [
    -9.864_942_924_700_099_285_97e-03,
    -7.992_832_376_805_230_065_74e-01,
    -1.775_795_491_775_475_198_89e+01,
    -1.606_363_848_558_219_160_62e+02,
    -6.375_664_433_683_896_277_22e+02,
    -1.025_095_131_611_077_249_54e+03,
    -4.835_191_916_086_513_970_19e+02,
];
const SB: [f64; 7] = [
    3.033_806_074_348_245_829_24e+01,
    3.257_925_129_965_739_188_26e+02,
    1.536_729_586_084_436_959_94e+03,
    3.199_858_219_508_595_539_08e+03,
    2.553_050_406_433_164_425_83e+03,
    4.745_285_412_069_553_672_15e+02,
    -2.244_095_244_658_581_833_62e+01,
];

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Complementary error function (fdlibm algorithm).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let neg = x < 0.0;
    if ax < 0.843_75 {
        let t = if ax < 1.387_778_780_781_445_7e-17 {
            ax
        } else {
            let z = ax * ax;
            let y = horner(&PP, z) / (1.0 + z * horner(&QQ, z));
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if neg { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let p = horner(&PA, s);
        let q = 1.0 + s * horner(&QA, s);
        return if neg { 1.0 + ERX + p / q } else { 1.0 - ERX - p / q };
    }
    if ax < 28.0 {
        let s = 1.0 / (ax * ax);
        let (r, ss) = if ax < 1.0 / 0.35 {
            (horner(&RA, s), 1.0 + s * horner(&SA, s))
        } else {
            if neg && ax > 6.0 {
                return 2.0;
            }
            (horner(&RB, s), 1.0 + s * horner(&SB, s))
        };
        let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
        let r = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / ss).exp();
        return if neg { 2.0 - r / ax } else { r / ax };
    }
    if neg {
        2.0
    } else {
        0.0
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e+01,
    2.209_460_984_245_205e+02,
    -2.759_285_104_469_687e+02,
    1.383_577_518_672_690e+02,
    -3.066_479_806_614_716e+01,
    2.506_628_277_459_239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e+01,
    1.615_858_368_580_409e+02,
    -1.556_989_798_598_866e+02,
    6.680_131_188_771_972e+01,
    -1.328_068_155_288_572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-03,
    -3.223_964_580_411_365e-01,
    -2.400_758_277_161_838e+00,
    -2.549_732_539_343_734e+00,
    4.374_664_141_464_968e+00,
    2.938_163_982_698_783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-03,
    3.224_671_290_700_398e-01,
    2.445_134_137_142_996e+00,
    3.754_408_661_907_416e+00,
];

fn forward(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Rational approximation to the upper-tail quantile for `p <= 0.5`.
fn acklam_upper(p: f64) -> f64 {
    if p < 0.024_25 {
        let q = (-2.0 * p.ln()).sqrt();
        -forward(&ACKLAM_C, q) / (forward(&ACKLAM_D, q) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        -forward(&ACKLAM_A, r) * q / (forward(&ACKLAM_B, r) * r + 1.0)
    }
}

pub(crate) fn q_inverse_unchecked(p: f64) -> f64 {
    if p > 0.5 {
        return -q_inverse_unchecked(1.0 - p);
    }
    if p == 0.5 {
        return 0.0;
    }
    let mut x = acklam_upper(p);
    for _ in 0..6 {
        let t = (q_function(x) - p) / normal_pdf(x);
        let step = t / (1.0 + 0.5 * x * t);
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Inverse of [`q_function`] for `p` in `(0, 1)`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("q_inverse requires 0 < p < 1, got {p}"));
    }
    Ok(q_inverse_unchecked(p))
}

pub(crate) fn r_unchecked(x: f64) -> f64 {
    let q = q_function(x);
    2.0 * q * (1.0 - q)
}

/// `R(x) = 2 Q(x) (1 - Q(x))`, strictly decreasing on `x > 0`.
pub fn r_function(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("r_function requires x > 0, got {x}"));
    }
    Ok(r_unchecked(x))
}

pub(crate) fn r_inverse_unchecked(y: f64) -> f64 {
    // (1 - sqrt(1 - 2y)) / 2 rewritten without cancellation.
    let s = y / (1.0 + (1.0 - 2.0 * y).sqrt());
    q_inverse_unchecked(s)
}

/// Inverse of [`r_function`] for `y` in `(0, 0.5)`.
pub fn r_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 0.5) {
        return domain(format!("r_inverse requires 0 < y < 0.5, got {y}"));
    }
    Ok(r_inverse_unchecked(y))
}
