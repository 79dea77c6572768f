//! q-products and q-series: `(x;q)_inf`, finite products, Euler's series,
//! the logarithmic oracle, Lambert series, Dedekind eta and the Jacobi
//! triple product.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{c, is_finite, I, ONE, ZERO};
use crate::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Raw products beyond this many factors are refused.
pub const MAX_FACTORS: u64 = 10_000_000;

/// Modular coordinates `(tau, xi)` with the derived quantities
/// `q = e^{2 pi i tau}`, `x = e^{2 pi i xi}`, `q* = e^{-2 pi i / tau}` and
/// `x* = e^{2 pi i xi / tau}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularPoint {
    pub tau: Complex64,
    pub xi: Complex64,
    pub q: Complex64,
    pub x: Complex64,
    pub qstar: Complex64,
    pub xstar: Complex64,
    /// `2 pi i tau`, never the principal log of `q`.
    pub log_q: Complex64,
    /// `xi / tau`.
    pub ratio: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64, xi: Complex64) -> Result<Self> {
        if !(is_finite(tau) && is_finite(xi)) {
            return Err(Error::Domain("tau and xi must be finite"));
        }
        if !(tau.im > 0.0) {
            return Err(Error::Domain("Im tau must be positive"));
        }
        let two_pi_i = c(0.0, 2.0 * PI);
        let ratio = xi / tau;
        Ok(ModularPoint {
            tau,
            xi,
            q: (two_pi_i * tau).exp(),
            x: (two_pi_i * xi).exp(),
            qstar: (-two_pi_i / tau).exp(),
            xstar: (two_pi_i * ratio).exp(),
            log_q: two_pi_i * tau,
            ratio,
        })
    }

    /// `xi` lies on `(-inf, -1] U [1, inf)`.
    pub fn xi_on_cut(&self) -> bool {
        self.xi.im == 0.0 && self.xi.re.abs() >= 1.0
    }

    /// `xi / tau` lies on `(-inf, 0]`.
    pub fn ratio_on_cut(&self) -> bool {
        self.ratio.im == 0.0 && self.ratio.re <= 0.0
    }

    /// Sign of `Im(xi / tau)`: 1, -1 or 0.
    pub fn ratio_side(&self) -> i8 {
        if self.ratio.im > 0.0 {
            1
        } else if self.ratio.im < 0.0 {
            -1
        } else {
            0
        }
    }
}

/// How a series or product was cut off.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesTruncation {
    pub terms_used: usize,
    /// Bound on the absolute error of the omitted tail.
    pub tail_bound: f64,
}

fn check_q(q: Complex64) -> Result<()> {
    if !is_finite(q) {
        return Err(Error::Domain("q must be finite"));
    }
    if !(q.norm() < 1.0) {
        return Err(Error::Domain("|q| must be below 1"));
    }
    Ok(())
}

/// Bound on `|prod_{m >= 0} (1 - a_m) - 1|` given `sum |a_m| <= s`, `s < 1`.
fn product_tail(s: f64) -> f64 {
    if s >= 0.5 {
        return f64::INFINITY;
    }
    // |log(1 - a)| <= |a| / (1 - |a|)
    let l = s / (1.0 - s);
    l.exp_m1()
}

/// `(x;q)_inf = prod_{n >= 0} (1 - x q^n)`.
///
/// Stops once the bound on the remaining factors is below machine precision
/// relative to the partial product.
pub fn pochhammer_inf(x: Complex64, q: Complex64) -> Result<(Complex64, SeriesTruncation)> {
    check_q(q)?;
    if !is_finite(x) {
        return Err(Error::Domain("x must be finite"));
    }
    let aq = q.norm();
    let ax = x.norm();
    if ax == 0.0 || aq == 0.0 {
        return Ok((
            ONE - x,
            SeriesTruncation {
                terms_used: 1,
                tail_bound: 0.0,
            },
        ));
    }
    // factors needed until |x| |q|^n (1-|q|)^-1 < eps
    let needed = ((EPS * (1.0 - aq) / ax).ln() / aq.ln()).max(0.0);
    if needed > MAX_FACTORS as f64 {
        return Err(Error::UseModularRoute {
            factors: needed.min(u64::MAX as f64) as u64,
        });
    }
    let mut partial = ONE;
    let mut xqn = x;
    let mut n = 0usize;
    loop {
        partial *= ONE - xqn;
        n += 1;
        xqn *= q;
        if partial == ZERO {
            return Ok((
                ZERO,
                SeriesTruncation {
                    terms_used: n,
                    tail_bound: 0.0,
                },
            ));
        }
        let rest = xqn.norm() / (1.0 - aq);
        if rest < 0.5 {
            let tail = partial.norm() * product_tail(rest);
            if tail <= EPS * partial.norm() {
                return Ok((
                    partial,
                    SeriesTruncation {
                        terms_used: n,
                        tail_bound: tail,
                    },
                ));
            }
        }
        if n as u64 > MAX_FACTORS {
            return Err(Error::UseModularRoute { factors: n as u64 });
        }
    }
}

/// `(x;q)_n = prod_{k < n} (1 - x q^k)`.
pub fn pochhammer_n(x: Complex64, q: Complex64, n: i64) -> Result<Complex64> {
    if n < 0 {
        return Err(Error::Domain("n must be non-negative"));
    }
    if !(is_finite(x) && is_finite(q)) {
        return Err(Error::Domain("x and q must be finite"));
    }
    let mut p = ONE;
    let mut xqk = x;
    for _ in 0..n {
        p *= ONE - xqk;
        xqk *= q;
    }
    Ok(p)
}

/// Euler's series `sum_n q^{n(n-1)/2} (-x)^n / (q;q)_n`.
///
/// Stops after three consecutive terms below machine precision relative to
/// the partial sum (or to the largest term when the sum cancels to zero).
pub fn euler_series(x: Complex64, q: Complex64) -> Result<Complex64> {
    check_q(q)?;
    if !is_finite(x) {
        return Err(Error::Domain("x must be finite"));
    }
    let mut term = ONE;
    let mut sum = ONE;
    let mut qn = ONE;
    let mut largest: f64 = 1.0;
    let mut small = 0;
    for _ in 0..1_000_000 {
        // term_{n+1} = term_n * q^n * (-x) / (1 - q^{n+1})
        let next_qn = qn * q;
        term = term * qn * (-x) / (ONE - next_qn);
        qn = next_qn;
        sum += term;
        let t = term.norm();
        largest = largest.max(t);
        if t <= EPS * sum.norm().max(EPS * largest) {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        if !is_finite(sum) {
            break;
        }
    }
    Err(Error::Accuracy {
        estimate: sum,
        error: f64::INFINITY,
    })
}

/// `log (x;q)_inf` through `-sum_{m >= 1} x^m / (m (1 - q^m))`, valid for
/// `|x| < 1`. The tail is truncated below `1e-16`.
pub fn log_pochhammer_oracle(x: Complex64, q: Complex64) -> Result<Complex64> {
    check_q(q)?;
    if !is_finite(x) || !(x.norm() < 1.0) {
        return Err(Error::Domain("oracle requires |x| < 1"));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return Ok(ZERO);
    }
    let aq = q.norm();
    let mut sum = ZERO;
    let mut xm = ONE;
    let mut qm = ONE;
    let mut m = 0usize;
    loop {
        m += 1;
        xm *= x;
        qm *= q;
        sum -= xm / ((ONE - qm) * m as f64);
        // remaining terms bounded by |x|^{m+1} / ((m+1)(1-|q|)(1-|x|))
        let tail = xm.norm() * ax / ((m + 1) as f64 * (1.0 - aq) * (1.0 - ax));
        if tail <= 1e-16 * sum.norm().max(1.0) * 0.5 || xm == ZERO {
            return Ok(sum);
        }
        if m > 50_000_000 {
            return Err(Error::Accuracy {
                estimate: sum,
                error: tail,
            });
        }
    }
}

/// Lambert series `sum_{n >= 0} x q^n / (1 - x q^n)`, equal to
/// `-x d/dx log (x;q)_inf`.
pub fn lambert_series(x: Complex64, q: Complex64) -> Result<Complex64> {
    check_q(q)?;
    if !is_finite(x) {
        return Err(Error::Domain("x must be finite"));
    }
    let aq = q.norm();
    let mut sum = ZERO;
    let mut xqn = x;
    for _ in 0..MAX_FACTORS {
        if xqn == ZERO {
            return Ok(sum);
        }
        let den = ONE - xqn;
        if den.norm() <= 4.0 * EPS {
            return Err(Error::Pole("x q^n = 1"));
        }
        sum += xqn / den;
        xqn *= q;
        let a = xqn.norm();
        if a < 0.5 {
            let tail = a / ((1.0 - aq) * (1.0 - a));
            if tail <= EPS * sum.norm().max(EPS) {
                return Ok(sum);
            }
        }
    }
    Err(Error::UseModularRoute {
        factors: MAX_FACTORS,
    })
}

/// `eta(tau) = q^{1/24} (q;q)_inf` with `q^{1/24} = e^{2 pi i tau / 24}`.
pub fn dedekind_eta(tau: Complex64) -> Result<Complex64> {
    if !is_finite(tau) || !(tau.im > 0.0) {
        return Err(Error::Domain("Im tau must be positive"));
    }
    let q = (2.0 * PI * I * tau).exp();
    let (prod, _) = pochhammer_inf(q, q)?;
    Ok((2.0 * PI * I * tau / 24.0).exp() * prod)
}

/// Triple product `(q;q)_inf (sqrt(q) x;q)_inf (sqrt(q)/x;q)_inf` with
/// `x = e^{2 pi i xi}` and `sqrt(q) = e^{pi i tau}`.
pub fn jacobi_theta(xi: Complex64, tau: Complex64) -> Result<Complex64> {
    if !is_finite(tau) || !(tau.im > 0.0) {
        return Err(Error::Domain("Im tau must be positive"));
    }
    if !is_finite(xi) {
        return Err(Error::Domain("xi must be finite"));
    }
    let q = (2.0 * PI * I * tau).exp();
    let sq = (PI * I * tau).exp();
    let x = (2.0 * PI * I * xi).exp();
    let xinv = (-2.0 * PI * I * xi).exp();
    let (a, _) = pochhammer_inf(q, q)?;
    let (b, _) = pochhammer_inf(sq * x, q)?;
    let (d, _) = pochhammer_inf(sq * xinv, q)?;
    Ok(a * (b * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer_inf(ZERO, c(0.3, 0.2)).unwrap().0, ONE);
        assert_eq!(pochhammer_inf(c(0.4, 0.1), ZERO).unwrap().0, c(0.6, -0.1));
        let (v, t) = pochhammer_inf(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        // frozen from the log-series oracle evaluated in extended precision
        assert!((v.re - 0.288_788_095_086_602_42).abs() < 1e-15);
        assert!(t.terms_used > 40 && t.tail_bound < 1e-16);
        assert!(matches!(
            pochhammer_inf(ONE, c(1.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert_eq!(pochhammer_inf(ONE, c(0.5, 0.0)).unwrap().0, ZERO);
    }

    #[test]
    fn pochhammer_cost_guard() {
        let r = pochhammer_inf(c(0.5, 0.0), c(1.0 - 1e-7, 0.0));
        assert!(matches!(r, Err(Error::UseModularRoute { .. })));
        assert!(pochhammer_inf(c(0.5, 0.0), c(0.999, 0.0)).is_ok());
    }

    #[test]
    fn pochhammer_near_one_matches_oracle() {
        let x = c(0.5, 0.1);
        for q in [0.9, 0.99] {
            let (v, _) = pochhammer_inf(x, c(q, 0.0)).unwrap();
            let o = log_pochhammer_oracle(x, c(q, 0.0)).unwrap().exp();
            assert!(rel(v, o) < 1e-13, "{q}");
        }
    }

    #[test]
    fn tail_bound_is_honest() {
        for (x, q) in [
            (c(0.5, 0.0), c(0.5, 0.0)),
            (c(1.5, -0.5), c(0.3, 0.8)),
            (c(-2.0, 0.0), c(0.9, 0.0)),
        ] {
            let (v, t) = pochhammer_inf(x, q).unwrap();
            // extend by many more factors
            let mut ext = v;
            let mut xqn = x * q.powu(t.terms_used as u32);
            for _ in 0..2000 {
                ext *= ONE - xqn;
                xqn *= q;
            }
            assert!(
                (ext - v).norm() <= t.tail_bound + 4.0 * EPS * v.norm(),
                "{x} {q}"
            );
        }
    }

    #[test]
    fn pochhammer_n_examples() {
        assert_eq!(pochhammer_n(c(0.3, 0.0), c(0.3, 0.0), 0).unwrap(), ONE);
        let v = pochhammer_n(c(0.3, 0.0), c(0.3, 0.0), 2).unwrap();
        assert!((v.re - 0.637).abs() < 1e-15);
        assert!(pochhammer_n(ONE, ONE, -1).is_err());
        let q = c(0.4, 0.0);
        let n = 5;
        let direct = pochhammer_n(q, q, n).unwrap();
        let num = pochhammer_inf(q, q).unwrap().0;
        let den = pochhammer_inf(q.powi(n as i32 + 1), q).unwrap().0;
        assert!(rel(direct, num / den) < 1e-12);
    }

    #[test]
    fn euler_examples() {
        let q = c(0.3, 0.4);
        assert_eq!(euler_series(ZERO, q).unwrap(), ONE);
        assert!(euler_series(ONE, q).unwrap().norm() < 1e-13);
        let x = c(0.7, 0.2);
        let q = c(0.0, 0.6);
        let e = euler_series(x, q).unwrap();
        let p = pochhammer_inf(x, q).unwrap().0;
        assert!(rel(e, p) < 1e-11);
        // frozen from an independent extended-precision product
        assert!((e - c(0.346_613_812_181_081_4, -0.352_340_184_787_378_8)).norm() < 1e-13);
        assert!(euler_series(x, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn oracle_examples() {
        let q = c(0.2, -0.5);
        assert_eq!(log_pochhammer_oracle(ZERO, q).unwrap(), ZERO);
        let x = c(0.3, 0.6);
        let v = log_pochhammer_oracle(x, ZERO).unwrap();
        assert!((v - (ONE - x).ln()).norm() < 1e-15);
        let x = c(0.3, -0.4);
        let q = c(0.5, 0.3);
        let v = log_pochhammer_oracle(x, q).unwrap();
        assert!(rel(v.exp(), pochhammer_inf(x, q).unwrap().0) < 1e-13);
        assert!((v - c(-0.757_322_422_067_926_97, 0.471_312_154_372_809_27)).norm() < 1e-14);
        assert!(matches!(
            log_pochhammer_oracle(c(1.0, 0.0), q),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lambert_examples() {
        let q = c(0.5, 0.2);
        assert_eq!(lambert_series(ZERO, q).unwrap(), ZERO);
        let x = c(0.3, 0.1);
        assert!((lambert_series(x, ZERO).unwrap() - x / (ONE - x)).norm() < 1e-15);
        let x = c(0.4, 0.0);
        let q = c(0.5, 0.0);
        let l = lambert_series(x, q).unwrap();
        assert!((l.re - 1.131_260_974_202_973_1).abs() < 1e-14);
        let h = 1e-6;
        let fd = -x
            * (log_pochhammer_oracle(x + h, q).unwrap() - log_pochhammer_oracle(x - h, q).unwrap())
            / (2.0 * h);
        assert!((l - fd).norm() < 1e-8);
        assert!(matches!(
            lambert_series(c(2.0, 0.0), q),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn eta_examples() {
        let e = dedekind_eta(I).unwrap();
        assert!((e.re - 0.768_225_422_326_056_66).abs() < 1e-14);
        assert!(e.im.abs() < 1e-15);
        let tau = c(0.3, 0.7);
        let lhs = dedekind_eta(-tau.inv()).unwrap();
        let rhs = (-I * tau).sqrt() * dedekind_eta(tau).unwrap();
        assert!(rel(lhs, rhs) < 1e-12);
        let lhs = dedekind_eta(I + 1.0).unwrap();
        let rhs = c(0.0, PI / 12.0).exp() * e;
        assert!(rel(lhs, rhs) < 1e-13);
        assert!(dedekind_eta(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn theta_examples() {
        let xi = c(0.2, 0.1);
        let a = jacobi_theta(xi, I).unwrap();
        let b = jacobi_theta(-xi, I).unwrap();
        assert!(rel(a, b) < 1e-13);
        // x = sqrt(q) makes sqrt(q)/x = 1
        let tau = c(0.1, 0.9);
        assert!(jacobi_theta(tau / 2.0, tau).unwrap().norm() < 1e-14);
        assert!(jacobi_theta(xi, c(0.0, -1.0)).is_err());
    }

    #[test]
    fn modular_point_flags() {
        let p = ModularPoint::new(I, c(1.5, 0.0)).unwrap();
        assert!(p.xi_on_cut());
        assert!(!p.ratio_on_cut());
        assert_eq!(p.ratio_side(), -1);
        let p = ModularPoint::new(I, c(0.0, -0.5)).unwrap();
        assert!(p.ratio_on_cut());
        let p = ModularPoint::new(c(0.3, 0.4), c(0.2, 0.0)).unwrap();
        assert!((p.q - (2.0 * PI * I * p.tau).exp()).norm() < 1e-16);
        assert!((p.qstar.norm() - (-2.0 * PI * (p.tau.inv() * -1.0).im).exp()).abs() < 1e-15);
        assert!(ModularPoint::new(c(1.0, 0.0), ZERO).is_err());
    }

    fn cpx(r: f64) -> impl Strategy<Value = Complex64> {
        (0.0..r, -PI..PI).prop_map(|(m, a)| Complex64::from_polar(m, a))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn functional_equation(x in cpx(2.0), q in cpx(0.9)) {
            let lhs = pochhammer_inf(x, q).unwrap().0;
            let rhs = (ONE - x) * pochhammer_inf(x * q, q).unwrap().0;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }

        #[test]
        fn euler_identity(x in cpx(2.0), q in cpx(0.9)) {
            let e = euler_series(x, q).unwrap();
            let p = pochhammer_inf(x, q).unwrap().0;
            prop_assert!((e - p).norm() <= 1e-11 * p.norm().max(1.0));
        }

        #[test]
        fn oracle_consistency(x in cpx(0.9), q in cpx(0.9)) {
            let o = log_pochhammer_oracle(x, q).unwrap().exp();
            let p = pochhammer_inf(x, q).unwrap().0;
            prop_assert!(rel(o, p) <= 1e-12);
        }

        #[test]
        fn lambert_consistency(x in cpx(0.8), q in cpx(0.8)) {
            prop_assume!(x.norm() > 1e-3);
            // fourth-order central difference
            let f = |z: Complex64| log_pochhammer_oracle(z, q).unwrap();
            let h = 1e-3;
            let d = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            let l = lambert_series(x, q).unwrap();
            prop_assert!((l + x * d).norm() <= 1e-9 * l.norm().max(1.0));
        }
    }
}
