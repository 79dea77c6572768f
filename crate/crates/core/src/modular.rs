//! The modular transform of `(x;q)_inf` and its correction terms.
//!
//! Notation: `z = xi / tau`. The Stirling remainder is
//! `G(tau, xi) = -ln Gamma(z + 1) + (z + 1/2) ln z - z + ln sqrt(2 pi)` and
//! `G*` is its odd part in `xi`. The ray integral is
//!
//! ```text
//! P^d(tau, xi) = int_{arg t = d} sin(xi t / tau) / (e^{i t / tau} - 1) * (cot(t/2) - 2/t) / t dt
//! ```
//!
//! which converges when `sin(s) > |Im(xi e^{-i s})|` with `s = arg tau - d`.
//! `P_-` uses a direction in `(-pi, 0)`, `P_+` one in `(0, pi)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{self, c, is_finite, I, ONE, ZERO};
use crate::qseries::{log_pochhammer_oracle, pochhammer_inf, ModularPoint, SeriesTruncation};
use crate::quad::{
    contour_ell, integrate_ray, integrate_segment, pv_integral_unit, QuadratureSettings, Side,
};
use crate::special::{
    cot_kernel_unchecked, hurwitz_zeta, li2, ln_abs_bernoulli_even, log_gamma_unchecked,
    stieltjes_b_series_over_t, stieltjes_b_unchecked, stirling_correction,
};
use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Number of directions scanned by [`choose_ray`].
pub const RAY_GRID: usize = 256;

/// Directions closer than this to the real axis are avoided when possible,
/// since the kernel has poles at `2 pi k`.
const AXIS_GUARD: f64 = PI / 16.0;

/// A point of the universal cover of the punctured plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    modulus: f64,
    argument: f64,
}

impl SectorPoint {
    pub fn new(modulus: f64, argument: f64) -> Result<Self> {
        if !(modulus > 0.0 && modulus.is_finite() && argument.is_finite()) {
            return Err(Error::Domain("sector point needs a positive modulus"));
        }
        Ok(SectorPoint { modulus, argument })
    }

    /// Lifts a nonzero complex number to the principal sheet.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z == ZERO || !is_finite(z) {
            return Err(Error::Domain("sector point of zero"));
        }
        let l = cmath::ln(z);
        SectorPoint::new(z.norm(), l.im)
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.argument)
    }

    /// The logarithm on this sheet.
    pub fn log(&self) -> Complex64 {
        c(self.modulus.ln(), self.argument)
    }

    /// Whether the argument lies in the open sector `(a, b)`.
    pub fn in_sector(&self, a: f64, b: f64) -> bool {
        a < self.argument && self.argument < b
    }
}

/// Which lateral ray integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Minus,
    Plus,
}

/// A ray direction `d = arg tau - sigma` together with its convergence margin
/// `sin(sigma) - |Im(xi e^{-i sigma})|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayChoice {
    pub d: f64,
    pub sigma: f64,
    pub margin: f64,
}

impl RayChoice {
    /// Builds the choice for an explicit direction `d`.
    pub fn for_direction(tau: Complex64, xi: Complex64, d: f64) -> RayChoice {
        let sigma = cmath::ln(tau).im - d;
        RayChoice {
            d,
            sigma,
            margin: margin(xi, sigma),
        }
    }
}

fn margin(xi: Complex64, sigma: f64) -> f64 {
    sigma.sin() - (xi * c(sigma.cos(), -sigma.sin())).im.abs()
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !is_finite(tau) || !(tau.im > 0.0) {
        return Err(Error::Domain("Im tau must be positive"));
    }
    Ok(())
}

/// Stirling remainder `G(tau, xi)`.
///
/// Uses principal branches; `xi / tau` must avoid `(-inf, 0]`.
pub fn g_term(tau: Complex64, xi: Complex64) -> Result<Complex64> {
    if !(is_finite(tau) && is_finite(xi)) || tau == ZERO {
        return Err(Error::Domain("tau and xi must be finite, tau nonzero"));
    }
    let z = xi / tau;
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain("xi / tau lies on (-inf, 0]"));
    }
    Ok(g_of_ratio(z))
}

fn g_of_ratio(z: Complex64) -> Complex64 {
    if z.re >= 10.0 {
        // ln Gamma(z + 1) = ln Gamma(z) + ln z leaves only the Stirling tail
        return -stirling_correction(z);
    }
    -log_gamma_unchecked(z + 1.0) + (z + 0.5) * cmath::ln(z) - z + LN_SQRT_2PI
}

/// `G*(tau, xi) = (G(tau, xi) - G(tau, -xi)) / 2`.
pub fn g_star(tau: Complex64, xi: Complex64) -> Result<Complex64> {
    let a = g_term(tau, xi)?;
    let b = g_term(tau, -xi)?;
    Ok(0.5 * (a - b))
}

/// Picks the ray direction for `P_-` or `P_+` maximizing the convergence
/// margin over `sigma_j = pi (j + 1) / 257`, `j < 256`. Ties go to the
/// smaller `sigma`. Directions within `pi / 16` of the real axis are used
/// only when nothing else is admissible.
pub fn choose_ray(tau: Complex64, xi: Complex64, branch: Branch) -> Result<RayChoice> {
    check_tau(tau)?;
    if !is_finite(xi) {
        return Err(Error::Domain("xi must be finite"));
    }
    let theta = cmath::ln(tau).im;
    let pick = |guarded: bool| {
        let mut best: Option<RayChoice> = None;
        for j in 0..RAY_GRID {
            let sigma = PI * (j + 1) as f64 / (RAY_GRID + 1) as f64;
            let d = theta - sigma;
            let in_half = match branch {
                Branch::Minus => d > -PI && d < 0.0,
                Branch::Plus => d > 0.0 && d < PI,
            };
            if !in_half {
                continue;
            }
            if guarded && (d.abs() < AXIS_GUARD || PI - d.abs() < AXIS_GUARD) {
                continue;
            }
            let m = margin(xi, sigma);
            if m > 0.0 && best.is_none_or(|b| m > b.margin) {
                best = Some(RayChoice {
                    d,
                    sigma,
                    margin: m,
                });
            }
        }
        best
    };
    pick(true).or_else(|| pick(false)).ok_or(Error::Domain(
        "no admissible ray direction: (tau, xi) outside the domain of P",
    ))
}

fn ray_integrand(tau: Complex64, xi: Complex64) -> impl Fn(Complex64) -> Complex64 {
    let a = xi / tau;
    let b = I / tau;
    move |t| cmath::sin_over_expm1(a * t, b * t) * cot_kernel_unchecked(t)
}

/// `P^d(tau, xi)` along the direction of `choice`.
pub fn p_ray(
    tau: Complex64,
    xi: Complex64,
    choice: RayChoice,
    s: &QuadratureSettings,
) -> Result<Complex64> {
    check_tau(tau)?;
    if !is_finite(xi) {
        return Err(Error::Domain("xi must be finite"));
    }
    if !(choice.margin > 0.0) || !(choice.d.abs() < PI) {
        return Err(Error::Domain("ray choice is not admissible"));
    }
    if xi == ZERO {
        return Ok(ZERO);
    }
    Ok(integrate_ray(ray_integrand(tau, xi), choice.d, s)?.value)
}

/// `P_-(tau, xi)`: the ray integral with a direction in `(-pi, 0)`.
pub fn p_minus(tau: Complex64, xi: Complex64, s: &QuadratureSettings) -> Result<Complex64> {
    let choice = choose_ray(tau, xi, Branch::Minus)?;
    p_ray(tau, xi, choice, s)
}

/// `P_+(tau, xi)`: the ray integral with a direction in `(0, pi)`.
pub fn p_plus(tau: Complex64, xi: Complex64, s: &QuadratureSettings) -> Result<Complex64> {
    let choice = choose_ray(tau, xi, Branch::Plus)?;
    p_ray(tau, xi, choice, s)
}

/// Real-parameter form
/// `int_{l} sin(nu t) / (e^{t/alpha} - 1) (cot(t/2) - 2/t) / t dt`
/// over the half-line `l` with semicircles of radius `r` around the poles
/// `2 pi k`, below the axis for [`Side::Minus`].
pub fn p_contour_real(
    alpha: f64,
    nu: f64,
    r: f64,
    side: Side,
    s: &QuadratureSettings,
) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha.is_finite() && nu.is_finite()) {
        return Err(Error::Domain("alpha must be positive and nu finite"));
    }
    if !(r > 0.0 && r < PI) {
        return Err(Error::Geometry("detour radius must lie in (0, pi)"));
    }
    if nu == 0.0 {
        return Ok(ZERO);
    }
    // beyond 45 alpha the exponential has decayed past 1e-19
    let count = (45.0 * alpha / (2.0 * PI)).ceil() as usize + 1;
    let poles: Vec<f64> = (1..=count).map(|k| 2.0 * PI * k as f64).collect();
    let inv_alpha = 1.0 / alpha;
    let f =
        move |t: Complex64| cmath::sin_over_expm1(t * nu, t * inv_alpha) * cot_kernel_unchecked(t);
    Ok(contour_ell(f, r, &poles, side, s)?.value)
}

/// `1 / (e^w - 1)` for real `w > 0` without overflow.
fn inv_expm1_real(w: f64) -> f64 {
    let e = (-w).exp();
    e / (-(-w).exp_m1())
}

/// The Stieltjes term
/// `M(alpha, nu) = -sum_n cos(2 n pi nu) / (n (e^{2 n pi / alpha} - 1))
///   - (2/pi) PV int_0^inf sum_n sin(2 n nu pi t) / (n (e^{2 n pi t / alpha} - 1)) dt / (1 - t^2)`.
///
/// The sum and the principal value are exchanged: the first
/// `max(40, 16 alpha)` principal values are computed one by one, and the rest
/// through the expansion `1/(1 - t^2) = sum t^{2k}`, which turns their sum
/// into Hurwitz zeta values.
pub fn m_stieltjes(alpha: f64, nu: f64, s: &QuadratureSettings) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha.is_finite() && nu.is_finite()) {
        return Err(Error::Domain("alpha must be positive and nu finite"));
    }
    let ratio = (-2.0 * PI / alpha).exp();
    let mut cos_sum = 0.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        cos_sum -= (2.0 * PI * nf * nu).cos() / nf * inv_expm1_real(2.0 * PI * nf / alpha);
        let tail = ratio.powf(nf + 1.0) / ((nf + 1.0) * (1.0 - ratio) * (1.0 - ratio));
        if tail < 1e-18 || n > 10_000_000 {
            break;
        }
        n += 1;
    }
    if nu == 0.0 {
        return Ok(c(cos_sum, 0.0));
    }

    let n0 = 40usize.max((16.0 * alpha).ceil() as usize);
    let mut pv_sum = 0.0;
    for n in 1..=n0 {
        let w = 2.0 * PI * n as f64 / alpha;
        let omega = 2.0 * PI * n as f64 * nu;
        let f = move |t: Complex64| {
            let e = cmath::inv_expm1(t * w);
            (t * omega).sin() * e
        };
        pv_sum += pv_integral_unit(f, s)?.value.re / n as f64;
    }

    // sum_{n > n0} J_n / n = sum_k c_k (alpha / 2 pi)^{2k+1} zeta(2k + 2, n0 + 1)
    // with c_k = int_0^inf sin(nu alpha s) s^{2k} / (e^s - 1) ds
    let a = alpha / (2.0 * PI);
    let na = nu * alpha;
    let mut tail_sum = 0.0;
    for k in 0..40usize {
        let upper = (2 * k) as f64 + 100.0;
        let ck = integrate_segment(
            |u: Complex64| (u * na).sin() * u.powi(2 * k as i32) * cmath::inv_expm1(u),
            ZERO,
            c(upper, 0.0),
            s,
        )?
        .value
        .re;
        let term =
            ck * a.powi(2 * k as i32 + 1) * hurwitz_zeta((2 * k + 2) as f64, (n0 + 1) as f64);
        tail_sum += term;
        if term.abs() < 1e-19 {
            break;
        }
    }
    Ok(c(cos_sum - 2.0 / PI * (pv_sum + tail_sum), 0.0))
}

fn check_unit_interval(v: f64, what: &'static str) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(what))
    }
}

/// `int_0^inf B(eps t) x^t dt / t` with `eps = -ln q / (2 pi)`.
pub fn b_integral(q: f64, x: f64, s: &QuadratureSettings) -> Result<f64> {
    check_unit_interval(q, "q must lie in (0, 1)")?;
    check_unit_interval(x, "x must lie in (0, 1)")?;
    let eps = -q.ln() / (2.0 * PI);
    let lx = x.ln();
    let f = move |t: Complex64| {
        let u = t * eps;
        let b_over_t = if (2.0 * PI * u).norm() < 0.25 {
            stieltjes_b_series_over_t(u) * eps
        } else {
            stieltjes_b_unchecked(u) / t
        };
        b_over_t * (t * lx).exp()
    };
    Ok(integrate_ray(f, 0.0, s)?.value.re)
}

/// Terms of the divergent expansion of [`b_integral`] in powers of `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticSeries {
    /// `coefficients[k - 1]` is the `k`-th term (may underflow to zero).
    pub coefficients: Vec<f64>,
    /// `ln |term_k|`, exact even where the term itself underflows.
    pub log_magnitudes: Vec<f64>,
    /// 1-based index `k` of the smallest term.
    pub optimal_index: usize,
    /// Magnitude of the smallest term, the first one left out of
    /// [`AsymptoticSeries::optimal_partial_sum`].
    pub optimal_error: f64,
}

impl AsymptoticSeries {
    /// Sum of the first `n` terms.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.coefficients.iter().take(n).sum()
    }

    /// Sum of the terms before the smallest one.
    pub fn optimal_partial_sum(&self) -> f64 {
        self.partial_sum(self.optimal_index - 1)
    }

    /// Magnitudes strictly decrease up to the optimal index and strictly
    /// increase after it, with both runs non-empty.
    pub fn decreases_then_increases(&self) -> bool {
        let m = &self.log_magnitudes;
        let k = self.optimal_index - 1;
        if k == 0 || k + 1 >= m.len() {
            return false;
        }
        m[..=k].windows(2).all(|w| w[1] < w[0]) && m[k..].windows(2).all(|w| w[1] > w[0])
    }
}

/// Largest accepted `k_max` for [`asymptotic_b_series`].
pub const ASYMPTOTIC_MAX_TERMS: usize = 20_000;

/// Watson-lemma expansion of [`b_integral`]:
/// `term_k = B_2k (2 pi eps)^{2k-1} Gamma(2k - 1) / ((2k)! (-ln x)^{2k-1})`
/// for `k = 1..=k_max`.
pub fn asymptotic_b_series(q: f64, x: f64, k_max: usize) -> Result<AsymptoticSeries> {
    check_unit_interval(q, "q must lie in (0, 1)")?;
    check_unit_interval(x, "x must lie in (0, 1)")?;
    if !(1..=ASYMPTOTIC_MAX_TERMS).contains(&k_max) {
        return Err(Error::Domain("k_max must lie in 1..=20000"));
    }
    let eps = -q.ln() / (2.0 * PI);
    let ln_ratio = (2.0 * PI * eps).ln() - (-x.ln()).ln();
    let mut coefficients = Vec::with_capacity(k_max);
    let mut log_magnitudes = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let m = (2 * k) as f64;
        let lm = ln_abs_bernoulli_even(k) + (m - 1.0) * ln_ratio + libm::lgamma(m - 1.0)
            - libm::lgamma(m + 1.0);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        coefficients.push(sign * lm.exp());
        log_magnitudes.push(lm);
    }
    let (idx, lm) = log_magnitudes
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    Ok(AsymptoticSeries {
        coefficients,
        log_magnitudes,
        optimal_index: idx + 1,
        optimal_error: lm.exp(),
    })
}

/// Remainder of the expansion after `n` terms, `b_integral - partial_sum(n)`,
/// as `(sign, ln |remainder|)`.
///
/// Uses `B(eps t)/t = (eps/pi) sum_j 1/(j^2 + eps^2 t^2)`: with
/// `lambda = -ln x`, `m = 2n + 1` and `T ~ Gamma(m, lambda)`,
/// `remainder = (-1)^n (eps/pi) eps^{2n} Gamma(m) lambda^{-m}
/// sum_j j^{-2n-2} E[1/(1 + eps^2 T^2/j^2)]`.
/// No cancellation occurs, so the logarithm stays accurate where the
/// remainder itself is far below the `f64` range.
pub fn asymptotic_remainder(
    q: f64,
    x: f64,
    n: usize,
    s: &QuadratureSettings,
) -> Result<(f64, f64)> {
    check_unit_interval(q, "q must lie in (0, 1)")?;
    check_unit_interval(x, "x must lie in (0, 1)")?;
    if n >= ASYMPTOTIC_MAX_TERMS {
        return Err(Error::Domain("n must lie below 20000"));
    }
    let eps = -q.ln() / (2.0 * PI);
    let lambda = -x.ln();
    let m = (2 * n + 1) as f64;
    let ln_norm = m * lambda.ln() - libm::lgamma(m);
    let density = move |t: f64| {
        let power = if n == 0 { 0.0 } else { (m - 1.0) * t.ln() };
        (power - lambda * t + ln_norm).exp()
    };
    let mean = m / lambda;
    let sd = m.sqrt() / lambda;
    let lo = (mean - 40.0 * sd).max(0.0);
    let hi = mean + 40.0 * sd + 60.0 / lambda;
    let e2 = eps * eps;
    let moment2 = m * (m + 1.0) / (lambda * lambda);
    let moment4 = moment2 * (m + 2.0) * (m + 3.0) / (lambda * lambda);
    let s2 = m + 1.0;
    let zeta = hurwitz_zeta(s2, 1.0);
    let mut avg = 0.0;
    let mut j = 0usize;
    loop {
        j += 1;
        if j > 10_000 {
            let rest = hurwitz_zeta(s2, j as f64) / zeta;
            return Err(Error::Accuracy {
                estimate: c(avg, 0.0),
                error: rest,
            });
        }
        let jf = j as f64;
        let weight = (-s2 * jf.ln()).exp() / zeta;
        let rho = integrate_segment(
            |t: Complex64| c(density(t.re) / (1.0 + e2 * t.re * t.re / (jf * jf)), 0.0),
            c(lo, 0.0),
            c(hi, 0.0),
            s,
        )?
        .value
        .re;
        avg += weight * rho;
        let a = jf + 1.0;
        let rest = hurwitz_zeta(s2, a) / zeta;
        if rest <= 1e-17 * avg {
            break;
        }
        // 1/(1 + y) = 1 - y + O(y^2) for the remaining j
        if e2 * e2 * moment4 * hurwitz_zeta(s2 + 4.0, a) / zeta <= 1e-16 * avg {
            avg += rest - e2 * moment2 * hurwitz_zeta(s2 + 2.0, a) / zeta;
            break;
        }
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let ln_abs = (eps / PI).ln() + 2.0 * (n as f64) * eps.ln() - ln_norm + zeta.ln() + avg.ln();
    Ok((sign, ln_abs))
}

/// `2i sum_{n >= 1} sin(2 n pi xi / tau) / (n (e^{2 n pi i / tau} - 1))`,
/// convergent when `|Im(xi / tau)| < -Im(1 / tau)`.
pub fn stokes_sum(tau: Complex64, xi: Complex64) -> Result<(Complex64, SeriesTruncation)> {
    check_tau(tau)?;
    if !is_finite(xi) {
        return Err(Error::Domain("xi must be finite"));
    }
    let z = xi / tau;
    let gap = -tau.inv().im - z.im.abs();
    if !(gap > 0.0) {
        return Err(Error::Domain(
            "Stokes series needs |Im(xi/tau)| < -Im(1/tau)",
        ));
    }
    if xi == ZERO {
        return Ok((ZERO, SeriesTruncation::default()));
    }
    let ratio = (-2.0 * PI * gap).exp();
    let lead = 1.0 / (-(-2.0 * PI * (-tau.inv().im)).exp_m1());
    let mut sum = ZERO;
    let mut n = 0usize;
    loop {
        n += 1;
        let nf = n as f64;
        sum += cmath::sin_over_expm1(2.0 * PI * nf * z, c(0.0, 2.0 * PI * nf) / tau) / nf;
        // |term_m| <= ratio^m / (m (1 - e^{-2 pi c}))
        let tail = ratio.powf(nf + 1.0) * lead / ((nf + 1.0) * (1.0 - ratio));
        if tail <= 1e-17 * sum.norm().max(1e-300) || tail < 1e-300 {
            return Ok((
                2.0 * I * sum,
                SeriesTruncation {
                    terms_used: n,
                    tail_bound: 2.0 * tail,
                },
            ));
        }
        if n > 10_000_000 {
            return Err(Error::Accuracy {
                estimate: 2.0 * I * sum,
                error: 2.0 * tail,
            });
        }
    }
}

fn check_theorem_domain(p: &ModularPoint) -> Result<()> {
    if p.xi_on_cut() {
        return Err(Error::Domain("xi lies on (-inf, -1] U [1, inf)"));
    }
    if p.ratio_on_cut() {
        return Err(Error::Domain("xi / tau lies on (-inf, 0]"));
    }
    Ok(())
}

/// The factor `K(q, x)` with `(x;q)_inf = K (x*;q*)_inf`.
///
/// For `Im(xi/tau) > 0`:
/// `K = q^{-1/24} sqrt(1-x) / sqrt(1-x*) exp(li2(x)/log q + G* + P_-)`;
/// for `Im(xi/tau) < 0` the radical is `sqrt(1-x) sqrt(1-1/x*) / (1-x*)`.
/// Square roots are principal and applied to each factor separately.
pub fn k_factor(p: &ModularPoint, s: &QuadratureSettings) -> Result<Complex64> {
    check_theorem_domain(p)?;
    let radical = match p.ratio_side() {
        1 => cmath::sqrt(ONE - p.x) / cmath::sqrt(ONE - p.xstar),
        -1 => cmath::sqrt(ONE - p.x) * cmath::sqrt(ONE - p.xstar.inv()) / (ONE - p.xstar),
        _ => return Err(Error::Domain("Im(xi / tau) = 0 selects no branch of K")),
    };
    let exponent = li2(p.x)? / p.log_q + g_star(p.tau, p.xi)? + p_minus(p.tau, p.xi, s)?;
    Ok((-p.log_q / 24.0).exp() * radical * exponent.exp())
}

/// Modular right-hand side
/// `q^{-1/24} sqrt(1-x) (x* q*; q*)_inf exp(li2(x)/log q + G + P_-)`
/// with `log q = 2 pi i tau`.
pub fn xqmain_rhs(p: &ModularPoint, s: &QuadratureSettings) -> Result<Complex64> {
    check_theorem_domain(p)?;
    let (prod, _) = pochhammer_inf(p.xstar * p.qstar, p.qstar)?;
    let exponent = li2(p.x)? / p.log_q + g_term(p.tau, p.xi)? + p_minus(p.tau, p.xi, s)?;
    Ok((-p.log_q / 24.0).exp() * cmath::sqrt(ONE - p.x) * prod * exponent.exp())
}

/// `log (e^{2 pi i nu} q*; q*)_inf` with `q* = e^{-2 pi / alpha}`, the product
/// term of the real-parameter modular relation for `M`.
pub fn mp_log_product(alpha: f64, nu: f64) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha.is_finite() && nu.is_finite()) {
        return Err(Error::Domain("alpha must be positive and nu finite"));
    }
    let qs = (-2.0 * PI / alpha).exp();
    let x = Complex64::from_polar(qs, 2.0 * PI * nu);
    log_pochhammer_oracle(x, c(qs, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::log_gamma;

    fn s() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
    }

    #[test]
    fn g_examples() {
        let tau = c(0.3, 0.8);
        let g = g_term(tau, tau).unwrap();
        assert!((g - c(LN_SQRT_2PI - 1.0, 0.0)).norm() < 1e-14);
        assert!((g.re + 0.081_061_466_795_327_26).abs() < 1e-14);
        let z = c(0.0, PI / 4.0).exp();
        let sum = g_term(ONE, z).unwrap() + g_term(ONE, -z).unwrap();
        let want = cmath::ln(ONE - (2.0 * PI * I * z).exp());
        assert!(close(sum, want, 1e-12), "{sum} {want}");
        assert!(g_term(I, -I).is_err());
        assert!(g_term(I, ZERO).is_err());
    }

    #[test]
    fn g_decays_like_inverse() {
        let mut prev = f64::INFINITY;
        for r in [10.0, 20.0, 40.0] {
            let g = g_term(ONE, c(r, 0.0)).unwrap().norm();
            assert!(g < prev);
            assert!((g * 12.0 * r - 1.0).abs() < 0.01);
            prev = g;
        }
    }

    #[test]
    fn g_branches_match_across_regimes() {
        // the Stirling shortcut and the direct formula agree around Re z = 10
        for z in [c(10.0, 3.0), c(10.5, -7.0), c(12.0, 0.5)] {
            let direct = -log_gamma(z + 1.0).unwrap() + (z + 0.5) * cmath::ln(z) - z + LN_SQRT_2PI;
            assert!((direct - g_of_ratio(z)).norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn g_star_is_odd() {
        let tau = c(0.2, 0.9);
        let xi = c(0.3, 0.1);
        let a = g_star(tau, xi).unwrap();
        let b = g_star(tau, -xi).unwrap();
        assert_eq!(a + b, ZERO);
        let xi = c(0.1, 0.1);
        let direct = 0.5 * (g_term(I, xi).unwrap() - g_term(I, -xi).unwrap());
        assert_eq!(g_star(I, xi).unwrap(), direct);
        // on the real slice -xi / tau sits on the cut
        assert!(g_star(I, c(0.0, 0.1)).is_err());
    }

    #[test]
    fn ray_choice_examples() {
        let ch = choose_ray(I, c(0.2, 0.0), Branch::Minus).unwrap();
        assert!(ch.d < 0.0 && ch.d > -PI && ch.margin > 0.0);
        assert!((ch.sigma - (PI / 2.0 - ch.d)).abs() < 1e-15);
        let a = choose_ray(c(0.3, 0.7), c(0.4, 0.2), Branch::Minus).unwrap();
        let b = choose_ray(c(0.3, 0.7), c(-0.4, -0.2), Branch::Minus).unwrap();
        assert_eq!(a, b);
        let p = choose_ray(I, c(0.2, 0.0), Branch::Plus).unwrap();
        assert!(p.d > 0.0);
        // xi = 2i is admissible for sigma with tan(sigma) > 2 beyond pi/2
        let ch = choose_ray(I, c(0.0, 2.0), Branch::Minus).unwrap();
        assert!(ch.sigma > PI / 2.0 && ch.sigma.tan().abs() > 2.0 && ch.margin > 0.0);
        // real xi beyond 1 violates the strip for every sigma
        assert!(matches!(
            choose_ray(I, c(3.0, 0.0), Branch::Minus),
            Err(Error::Domain(_))
        ));
        assert!(choose_ray(c(1.0, 0.0), ONE, Branch::Minus).is_err());
    }

    #[test]
    fn p_ray_examples() {
        let tau = I;
        let xi = c(0.3, 0.0);
        assert_eq!(p_minus(tau, ZERO, &s()).unwrap(), ZERO);
        let d1 = RayChoice::for_direction(tau, xi, -0.5);
        let d2 = RayChoice::for_direction(tau, xi, -1.2);
        let a = p_ray(tau, xi, d1, &s()).unwrap();
        let b = p_ray(tau, xi, d2, &s()).unwrap();
        assert!((a - b).norm() < 1e-10, "{a} {b}");
        let m = p_minus(tau, -xi, &s()).unwrap();
        assert!((m + p_minus(tau, xi, &s()).unwrap()).norm() < 1e-12);
        let bad = RayChoice {
            d: -0.5,
            sigma: 2.07,
            margin: 0.0,
        };
        assert!(p_ray(tau, xi, bad, &s()).is_err());
    }

    #[test]
    fn slice_matches_contour() {
        for (alpha, nu) in [(1.0, 0.3), (0.5, 0.7), (2.0, 0.1)] {
            let tau = c(0.0, alpha);
            let ray = p_minus(tau, tau * nu, &s()).unwrap();
            let contour = p_contour_real(alpha, nu, 0.5, Side::Minus, &s()).unwrap();
            assert!(
                (ray - contour).norm() < 1e-9,
                "{alpha} {nu}: {ray} {contour}"
            );
        }
    }

    #[test]
    fn contour_examples() {
        assert_eq!(
            p_contour_real(1.0, 0.0, 0.5, Side::Minus, &s()).unwrap(),
            ZERO
        );
        let a = p_contour_real(1.0, 0.5, 0.3, Side::Minus, &s()).unwrap();
        let b = p_contour_real(1.0, 0.5, 0.6, Side::Minus, &s()).unwrap();
        assert!((a - b).norm() < 1e-10);
        // residue of the integrand at 2 pi k is 2 sin(2 pi k nu) / (2 pi k (e^{2 pi k / alpha} - 1))
        let (alpha, nu) = (1.0, 0.3);
        let minus = p_contour_real(alpha, nu, 0.5, Side::Minus, &s()).unwrap();
        let plus = p_contour_real(alpha, nu, 0.5, Side::Plus, &s()).unwrap();
        let mut res = 0.0;
        for k in 1..40 {
            let t = 2.0 * PI * k as f64;
            res += 2.0 * (nu * t).sin() / (t * (t / alpha).exp_m1());
        }
        assert!((minus - plus - 2.0 * PI * I * res).norm() < 1e-10);
        assert!(matches!(
            p_contour_real(1.0, 0.3, 3.5, Side::Minus, &s()),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn m_at_zero_is_log_product() {
        let qs = (-2.0 * PI).exp();
        let m = m_stieltjes(1.0, 0.0, &s()).unwrap();
        let o = log_pochhammer_oracle(c(qs, 0.0), c(qs, 0.0)).unwrap();
        assert!((m - o).norm() < 1e-10);
    }

    #[test]
    fn m_relation_with_contour() {
        let (alpha, nu) = (1.0, 0.3);
        let m = m_stieltjes(alpha, nu, &s()).unwrap();
        assert_eq!(m.im, 0.0);
        let rhs = mp_log_product(alpha, nu).unwrap()
            + p_contour_real(alpha, nu, 0.5, Side::Minus, &s()).unwrap();
        assert!(close(m, rhs, 1e-8), "{m} {rhs}");
    }

    #[test]
    fn b_integral_behaviour() {
        let mut prev = f64::INFINITY;
        for x in [0.1, 0.01, 0.001] {
            let v = b_integral(0.5, x, &s()).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
        let (q, x) = (0.999f64, 0.5f64);
        let eps = -q.ln() / (2.0 * PI);
        let lead = PI * eps / (6.0 * -x.ln());
        let v = b_integral(q, x, &s()).unwrap();
        assert!(((v - lead) / lead).abs() < 5e-3);
        assert!(b_integral(1.0, 0.5, &s()).is_err());
    }

    #[test]
    fn asymptotic_shape() {
        let a = asymptotic_b_series(0.99, 0.5, 1000).unwrap();
        assert!(a.decreases_then_increases());
        let mut prev = 0;
        for q in [0.9, 0.99, 0.999] {
            let k = asymptotic_b_series(q, 0.5, ASYMPTOTIC_MAX_TERMS)
                .unwrap()
                .optimal_index;
            assert!(k > prev);
            prev = k;
        }
        assert!(asymptotic_b_series(0.9, 0.5, 0).is_err());
        assert!(asymptotic_b_series(0.9, 0.5, ASYMPTOTIC_MAX_TERMS + 1).is_err());
    }

    #[test]
    fn m_stieltjes_small_alpha() {
        // boundary layer of width alpha / (2 pi n) at t = 0; mpmath reference
        let alpha = -(0.9f64).ln() / (2.0 * PI);
        let nu = (0.5f64).ln() / (0.9f64).ln();
        let m = m_stieltjes(alpha, nu, &s()).unwrap();
        assert!((m.re - -5.031490386919588766e-4).abs() < 1e-15, "{m}");
    }

    #[test]
    fn remainder_matches_direct_difference() {
        for (q, x) in [(0.5, 0.5), (0.7, 0.3), (0.9, 0.5), (0.6, 0.8)] {
            let b = b_integral(q, x, &s()).unwrap();
            let (sign, ln_abs) = asymptotic_remainder(q, x, 0, &s()).unwrap();
            assert!((sign * ln_abs.exp() - b).abs() < 1e-12 * b, "{q} {x}");
            let series = asymptotic_b_series(q, x, 40).unwrap();
            for n in 1..4 {
                let direct = b - series.partial_sum(n);
                let (sign, ln_abs) = asymptotic_remainder(q, x, n, &s()).unwrap();
                let r = sign * ln_abs.exp();
                assert!(
                    (r - direct).abs() < 1e-12 * b + 1e-15 * r.abs(),
                    "{q} {x} {n}: {r} {direct}"
                );
            }
        }
    }

    #[test]
    fn remainder_below_first_omitted_term() {
        for q in [0.9, 0.99, 0.999] {
            let a = asymptotic_b_series(q, 0.5, ASYMPTOTIC_MAX_TERMS).unwrap();
            let n = a.optimal_index - 1;
            let (sign, ln_abs) = asymptotic_remainder(q, 0.5, n, &s()).unwrap();
            let ln_omitted = a.log_magnitudes[n];
            assert!(
                ln_abs <= ln_omitted && ln_abs > ln_omitted - 3.0,
                "{q}: {ln_abs} {ln_omitted}"
            );
            // same sign as the first omitted term
            assert_eq!(sign, if (n + 1) % 2 == 1 { 1.0 } else { -1.0 });
        }
        assert!(asymptotic_remainder(0.9, 1.5, 1, &s()).is_err());
    }

    #[test]
    fn asymptotic_sandwich_moderate_q() {
        for (q, x) in [(0.5, 0.5), (0.6, 0.3), (0.7, 0.5), (0.7, 0.7)] {
            let a = asymptotic_b_series(q, x, 200).unwrap();
            let v = b_integral(q, x, &s()).unwrap();
            let err = (a.optimal_partial_sum() - v).abs();
            assert!(
                err <= 2.0 * a.optimal_error,
                "{q} {x}: {err} {}",
                a.optimal_error
            );
        }
    }

    #[test]
    fn stokes_examples() {
        let tau = c(0.2, 0.8);
        assert_eq!(stokes_sum(tau, ZERO).unwrap().0, ZERO);
        let xi = c(0.1, 0.02);
        let (a, t) = stokes_sum(tau, xi).unwrap();
        let (b, _) = stokes_sum(tau, -xi).unwrap();
        assert!((a + b).norm() < 1e-15);
        assert!(t.terms_used > 0);
        let jump =
            p_minus(tau, c(0.1, 0.0), &s()).unwrap() - p_plus(tau, c(0.1, 0.0), &s()).unwrap();
        let (st, _) = stokes_sum(tau, c(0.1, 0.0)).unwrap();
        assert!((jump - st).norm() < 1e-9, "{jump} {st}");
        assert!(matches!(
            stokes_sum(tau, c(3.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn xqmain_examples() {
        let p = ModularPoint::new(I, c(0.25, 0.0)).unwrap();
        let lhs = pochhammer_inf(p.x, p.q).unwrap().0;
        let rhs = xqmain_rhs(&p, &s()).unwrap();
        assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
        let tau = c(0.0, 0.8);
        let p = ModularPoint::new(tau, tau).unwrap();
        let lhs = pochhammer_inf(p.q, p.q).unwrap().0;
        assert!(close(lhs, xqmain_rhs(&p, &s()).unwrap(), 1e-8));
        let (alpha, nu) = (0.5, 0.2);
        let p = ModularPoint::new(c(0.0, alpha), c(0.0, (1.0 + nu) * alpha)).unwrap();
        let v = xqmain_rhs(&p, &s()).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-12 * v.re);
        let p = ModularPoint::new(I, c(1.5, 0.0)).unwrap();
        assert!(matches!(xqmain_rhs(&p, &s()), Err(Error::Domain(_))));
    }

    #[test]
    fn k_factor_examples() {
        let p = ModularPoint::new(c(0.1, 0.9), c(0.2, 0.05)).unwrap();
        let k = k_factor(&p, &s()).unwrap();
        let lhs = pochhammer_inf(p.x, p.q).unwrap().0;
        let rhs = k * pochhammer_inf(p.xstar, p.qstar).unwrap().0;
        assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
        let p = ModularPoint::new(c(0.3, 0.7), c(0.4, -0.2)).unwrap();
        assert_eq!(p.ratio_side(), -1);
        let k = k_factor(&p, &s()).unwrap();
        let lhs = pochhammer_inf(p.x, p.q).unwrap().0;
        let rhs = k * pochhammer_inf(p.xstar, p.qstar).unwrap().0;
        assert!(close(lhs, rhs, 1e-8), "{lhs} {rhs}");
        let p = ModularPoint::new(I, I * 0.3).unwrap();
        assert!(k_factor(&p, &s()).is_err());
        // q^{-1/24} at tau = i
        let p = ModularPoint::new(I, c(0.2, 0.0)).unwrap();
        assert!(((-p.log_q / 24.0).exp() - c((PI / 12.0).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sector_point_roundtrip() {
        let z = c(-1.0, 1.0);
        let p = SectorPoint::from_complex(z).unwrap();
        assert!((p.to_complex() - z).norm() < 1e-15);
        assert!(p.in_sector(0.0, PI));
        let lifted = SectorPoint::new(2.0, 5.0 * PI / 2.0).unwrap();
        assert_eq!(lifted.argument(), 5.0 * PI / 2.0);
        assert!((lifted.to_complex() - c(0.0, 2.0)).norm() < 1e-15);
        assert!(SectorPoint::new(0.0, 1.0).is_err());
    }
}
