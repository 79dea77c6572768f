//! Complex elementary functions with the branch and overflow behaviour the
//! rest of the crate relies on.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Principal logarithm, imaginary part in (-pi, pi]. A negative real input
/// carrying a negative zero imaginary part still maps to `+i pi`.
pub(crate) fn ln(z: Complex64) -> Complex64 {
    let arg = if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    };
    c(z.re.hypot(z.im).ln(), arg)
}

/// Principal square root `exp(log(z) / 2)`.
pub(crate) fn sqrt(z: Complex64) -> Complex64 {
    if z == ZERO {
        return ZERO;
    }
    (ln(z) * 0.5).exp()
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let (s, co) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    c(z.re.exp_m1() * co - 2.0 * half * half, z.re.exp() * s)
}

/// `1 / (exp(w) - 1)`, overflow-free for large `Re w`.
pub(crate) fn inv_expm1(w: Complex64) -> Complex64 {
    if w.re > 0.0 {
        let e = (-w).exp();
        e / (-expm1(-w))
    } else {
        expm1(w).inv()
    }
}

/// `sin(a) / (exp(b) - 1)`. When `|Im a|` is large and `Re b > 0` the two
/// exponentials are combined first so that neither factor overflows.
pub(crate) fn sin_over_expm1(a: Complex64, b: Complex64) -> Complex64 {
    if a.im.abs() < 20.0 || b.re <= 0.0 {
        return a.sin() * inv_expm1(b);
    }
    let num = (I * a - b).exp() - (-I * a - b).exp();
    num / (2.0 * I * (-expm1(-b)))
}

/// `cot(z)` via the exponential of whichever sign keeps `|exp| <= 1`.
pub(crate) fn cot(z: Complex64) -> Complex64 {
    if z.im > 0.0 {
        let w = 2.0 * I * z;
        // i (e^{2iz} + 1) / (e^{2iz} - 1)
        I * (w.exp() + ONE) / expm1(w)
    } else {
        let w = -2.0 * I * z;
        -I * (w.exp() + ONE) / expm1(w)
    }
}
