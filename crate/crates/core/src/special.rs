//! Branch-aware elementary and classical special functions.
//!
//! Every multivalued function here uses its principal determination: the
//! logarithm has imaginary part in `(-pi, pi]`, the dilogarithm has its cut on
//! `[1, inf)`. [`log_gamma`] is the exception: it returns the analytic
//! continuation of `ln Gamma` from the positive axis (cut along the negative
//! axis), which differs from the principal log of `Gamma(z)` by a multiple of
//! `2 pi i`. That is the determination that makes the Stirling remainder
//! `G(tau, xi)` analytic.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{self, c, is_finite, ONE, ZERO};
use crate::{Error, Result};

const PI2_OVER_6: f64 = PI * PI / 6.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_2, B_4, ..., B_60`, exact rationals rounded to double precision.
#[allow(clippy::excessive_precision)]
const BERNOULLI_EVEN: [f64; 30] = [
    0.16666666666666666,     // B_2 = 1/6
    -0.03333333333333333,    // B_4 = -1/30
    0.023809523809523808,    // B_6 = 1/42
    -0.03333333333333333,    // B_8 = -1/30
    0.07575757575757576,     // B_10 = 5/66
    -0.2531135531135531,     // B_12 = -691/2730
    1.1666666666666667,      // B_14 = 7/6
    -7.092156862745098,      // B_16 = -3617/510
    54.971177944862156,      // B_18 = 43867/798
    -529.1242424242424,      // B_20 = -174611/330
    6192.123188405797,       // B_22 = 854513/138
    -86580.25311355312,      // B_24 = -236364091/2730
    1425517.1666666667,      // B_26 = 8553103/6
    -27298231.067816094,     // B_28 = -23749461029/870
    601580873.9006424,       // B_30 = 8615841276005/14322
    -15116315767.092157,     // B_32 = -7709321041217/510
    429614643061.1667,       // B_34 = 2577687858367/6
    -13711655205088.332,     // B_36 = -26315271553053477373/1919190
    488332318973593.2,       // B_38 = 2929993913841559/6
    -1.9296579341940068e+16, // B_40 = -261082718496449122051/13530
    8.416930475736826e+17,   // B_42 = 1520097643918070802691/1806
    -4.0338071854059454e+19, // B_44 = -27833269579301024235023/690
    2.1150748638081993e+21,  // B_46 = 596451111593912163277961/282
    -1.2086626522296526e+23, // B_48 = -5609403368997817686249127547/46410
    7.500866746076964e+24,   // B_50 = 495057205241079648212477525/66
    -5.038778101481069e+26,  // B_52 = -801165718135489957347924991853/1590
    3.6528776484818122e+28,  // B_54 = 29149963634884862421418123812691/798
    -2.849876930245088e+30,  // B_56 = -2479392929313226753685415739663229/870
    2.3865427499683627e+32,  // B_58 = 84483613348880041862046775994036021/354
    -2.1399949257225335e+34, // B_60 = -1215233140483755572040304994079820246041491/56786730
];

/// A logarithm value known to lie on the principal sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedLog {
    value: Complex64,
}

impl BranchedLog {
    pub fn of(z: Complex64) -> Result<Self> {
        principal_log(z).map(|value| BranchedLog { value })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }
}

/// Principal logarithm with imaginary part in `(-pi, pi]`.
pub fn principal_log(z: Complex64) -> Result<Complex64> {
    if !is_finite(z) {
        return Err(Error::Domain("principal_log of a non-finite value"));
    }
    if z == ZERO {
        return Err(Error::Domain("principal_log(0)"));
    }
    Ok(cmath::ln(z))
}

/// Exact even-index Bernoulli numbers `B_k` for `k = 2, 4, ..., 60`.
pub fn bernoulli(k: u32) -> Result<f64> {
    if !(2..=60).contains(&k) || k % 2 == 1 {
        return Err(Error::Domain("bernoulli index must be even and in 2..=60"));
    }
    Ok(BERNOULLI_EVEN[(k / 2 - 1) as usize])
}

#[inline]
pub(crate) fn bernoulli_even(k: usize) -> f64 {
    BERNOULLI_EVEN[k - 1]
}

/// Dilogarithm `Li2(z) = sum_{n>=1} z^n / n^2`, principal branch.
///
/// `z = 1` returns the boundary value `pi^2/6`; the rest of `[1, inf)` is
/// rejected.
pub fn li2(z: Complex64) -> Result<Complex64> {
    if !is_finite(z) {
        return Err(Error::Domain("li2 of a non-finite value"));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        if z.re == 1.0 {
            return Ok(c(PI2_OVER_6, 0.0));
        }
        return Err(Error::BranchCut("li2 argument on [1, inf)"));
    }
    Ok(li2_continued(z))
}

fn li2_continued(z: Complex64) -> Complex64 {
    if z.norm() <= 0.5 {
        return li2_power_series(z);
    }
    if z.norm() > 1.0 {
        // Li2(z) + Li2(1/z) = -pi^2/6 - log^2(-z)/2
        let l = cmath::ln(-z);
        return -li2_continued(z.inv()) - PI2_OVER_6 - 0.5 * l * l;
    }
    if z.re > 0.5 {
        // Li2(z) + Li2(1-z) = pi^2/6 - log z log(1-z)
        let w = ONE - z;
        return -li2_continued(w) + PI2_OVER_6 - cmath::ln(z) * cmath::ln(w);
    }
    li2_bernoulli_series(z)
}

fn li2_power_series(z: Complex64) -> Complex64 {
    let mut sum = ZERO;
    let mut power = z;
    for n in 1..200 {
        let term = power / (n * n) as f64;
        sum += term;
        if term.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
        power *= z;
    }
    sum
}

/// `Li2(z) = sum_n B_n u^{n+1} / (n+1)!` with `u = -log(1-z)`; converges for
/// `|u| < 2 pi`, used on the part of the unit disk with `Re z <= 1/2`.
fn li2_bernoulli_series(z: Complex64) -> Complex64 {
    let u = -cmath::ln(ONE - z);
    let u2 = u * u;
    let mut sum = u - 0.25 * u2;
    // u^{2k+1} / (2k+1)!
    let mut power = u;
    for k in 1..=30usize {
        power = power * u2 / ((2 * k) * (2 * k + 1)) as f64;
        let term = power * bernoulli_even(k);
        sum += term;
        if term.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
    }
    sum
}

/// `ln Gamma(z)`, analytic continuation from the positive real axis.
///
/// The argument is shifted up with the recurrence until `Re z >= 10`, then
/// the Stirling series is applied. Summing principal logs of the shifted
/// factors keeps the result on the analytic sheet off the real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !is_finite(z) {
        return Err(Error::Domain("log_gamma of a non-finite value"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole("log_gamma at a non-positive integer"));
    }
    Ok(log_gamma_unchecked(z))
}

pub(crate) fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    let mut shift = ZERO;
    let mut w = z;
    while w.re < 10.0 {
        shift += cmath::ln(w);
        w += 1.0;
    }
    stirling(w) - shift
}

/// Sum of the Stirling correction terms `sum_k B_2k / (2k (2k-1) z^{2k-1})`.
pub(crate) fn stirling_correction(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut power = inv;
    let mut sum = ZERO;
    for k in 1..=15usize {
        let term = power * (bernoulli_even(k) / ((2 * k) * (2 * k - 1)) as f64);
        sum += term;
        if term.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
        power *= inv2;
    }
    sum
}

fn stirling(z: Complex64) -> Complex64 {
    (z - 0.5) * cmath::ln(z) - z + LN_SQRT_2PI + stirling_correction(z)
}

/// `B(t) = 1/(exp(2 pi t) - 1) - 1/(2 pi t) + 1/2`.
///
/// For `|2 pi t| < 1/4` the odd Taylor series (15 terms) is used, otherwise
/// the closed form.
pub fn stieltjes_b(t: Complex64) -> Result<Complex64> {
    if !is_finite(t) {
        return Err(Error::Domain("stieltjes_b of a non-finite value"));
    }
    if t.re == 0.0 && t.im != 0.0 && t.im == t.im.round() {
        return Err(Error::Pole("stieltjes_b at a nonzero imaginary integer"));
    }
    Ok(stieltjes_b_unchecked(t))
}

pub(crate) fn stieltjes_b_unchecked(t: Complex64) -> Complex64 {
    let w = 2.0 * PI * t;
    if w.norm() < 0.25 {
        stieltjes_b_series(t)
    } else {
        cmath::inv_expm1(w) - w.inv() + 0.5
    }
}

/// `B(t) / t` from the Taylor series; valid for `|2 pi t| < 1/4`.
pub(crate) fn stieltjes_b_series_over_t(t: Complex64) -> Complex64 {
    let w = 2.0 * PI * t;
    let w2 = w * w;
    // B_{2k} (2 pi)^{2k-1} t^{2k-2} / (2k)!
    let mut power = c(2.0 * PI, 0.0);
    let mut fact = 1.0;
    let mut sum = ZERO;
    for k in 1..=15usize {
        fact *= ((2 * k - 1) * (2 * k)) as f64;
        sum += power * (bernoulli_even(k) / fact);
        power *= w2;
    }
    sum
}

fn stieltjes_b_series(t: Complex64) -> Complex64 {
    stieltjes_b_series_over_t(t) * t
}

/// `(cot(t/2) - 2/t) / t`, with the removable singularity at 0 filled in.
pub fn cot_kernel(t: Complex64) -> Result<Complex64> {
    if !is_finite(t) {
        return Err(Error::Domain("cot_kernel of a non-finite value"));
    }
    if t.im == 0.0 {
        let k = (t.re / (2.0 * PI)).round();
        if k != 0.0 && (t.re - 2.0 * PI * k).abs() <= 8.0 * f64::EPSILON * t.re.abs() {
            return Err(Error::Pole("cot_kernel at 2 pi k"));
        }
    }
    Ok(cot_kernel_unchecked(t))
}

pub(crate) fn cot_kernel_unchecked(t: Complex64) -> Complex64 {
    if t.norm() < 0.5 {
        // sum_{n>=1} (-1)^n 2 B_2n t^{2n-2} / (2n)!
        let t2 = t * t;
        let mut power = ONE;
        let mut fact = 1.0;
        let mut sum = ZERO;
        for n in 1..=12usize {
            fact *= ((2 * n - 1) * (2 * n)) as f64;
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            sum += power * (sign * bernoulli_even(n) / fact);
            power *= t2;
        }
        sum
    } else {
        (cmath::cot(0.5 * t) - 2.0 / t) / t
    }
}

/// Hurwitz zeta `sum_{n>=0} (n + a)^{-s}` for real `s > 1`, `a >= 1`.
pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    // direct terms until the base is large, then Euler-Maclaurin
    let mut sum = 0.0;
    let mut base = a;
    while base < 20.0 + s {
        sum += base.powf(-s);
        base += 1.0;
    }
    let mut tail = base.powf(1.0 - s) / (s - 1.0) + 0.5 * base.powf(-s);
    // B_2j/(2j)! s(s+1)...(s+2j-2) base^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = base.powf(-s - 1.0);
    for j in 1..=12usize {
        let term = bernoulli_even(j) / fact * rising * power;
        tail += term;
        if term.abs() <= 1e-18 * tail.abs() {
            break;
        }
        let m = (2 * j) as f64;
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        power /= base * base;
    }
    sum + tail
}

/// `ln |B_2k|` for any `k >= 1`, via `|B_2k| = 2 (2k)! zeta(2k) / (2 pi)^{2k}`
/// beyond the exact table.
pub(crate) fn ln_abs_bernoulli_even(k: usize) -> f64 {
    if k <= 30 {
        return bernoulli_even(k).abs().ln();
    }
    let s = (2 * k) as f64;
    let zeta = 1.0 + 2f64.powf(-s) + 3f64.powf(-s) + 4f64.powf(-s);
    core::f64::consts::LN_2 + libm::lgamma(s + 1.0) + zeta.ln() - s * (2.0 * PI).ln()
}
