//! Integration machinery: adaptive Gauss-Kronrod (7/15) quadrature along
//! complex segments, rays to infinity with geometrically growing panels,
//! Cauchy principal values across `t = 1`, and the half-line with
//! semicircular detours around real poles.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{c, is_finite, I, ZERO};
use crate::{Error, Result};

/// Tolerances, subdivision limits and truncation radii for every integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// Ratio between consecutive ray panel end points.
    pub ray_panel_growth: f64,
    /// A ray stops once a panel's `int |f|` falls below this.
    pub ray_cutoff_magnitude: f64,
    /// Half-width `h` of the symmetric window around the principal-value pole.
    pub pv_window: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 60,
            ray_panel_growth: 2.0,
            ray_cutoff_magnitude: 1e-18,
            pv_window: 0.5,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.ray_cutoff_magnitude > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive"));
        }
        if self.max_depth < 10 {
            return Err(Error::Domain("max_depth must be at least 10"));
        }
        if !(self.ray_panel_growth > 1.0) {
            return Err(Error::Domain("ray_panel_growth must exceed 1"));
        }
        if !(self.pv_window > 0.0 && self.pv_window < 1.0) {
            return Err(Error::Domain("pv_window must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self.rel_tol = tol;
        self
    }
}

/// Which side of a real pole a detour passes on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Arc in the lower half-plane (the pole is passed on the right when
    /// travelling towards `+inf`).
    Minus,
    /// Arc in the upper half-plane.
    Plus,
}

/// Description of an integration path.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    /// Half-line from the origin with argument `direction`.
    Ray {
        direction: f64,
    },
    /// `[0, inf)` with semicircles of radius `radius` around every pole.
    DetouredHalfLine {
        radius: f64,
        side: Side,
        poles: Vec<f64>,
    },
}

impl PathSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PathSpec::Segment { a, b } => {
                if is_finite(*a) && is_finite(*b) {
                    Ok(())
                } else {
                    Err(Error::Geometry("segment endpoints must be finite"))
                }
            }
            PathSpec::Ray { direction } => {
                if direction.abs() < PI {
                    Ok(())
                } else {
                    Err(Error::Geometry("ray direction must satisfy |d| < pi"))
                }
            }
            PathSpec::DetouredHalfLine { radius, poles, .. } => check_detours(*radius, poles),
        }
    }

    /// Integrates `f` along the path.
    pub fn integrate<F>(&self, f: F, s: &QuadratureSettings) -> Result<Estimate>
    where
        F: FnMut(Complex64) -> Complex64,
    {
        match self {
            PathSpec::Segment { a, b } => integrate_segment(f, *a, *b, s),
            PathSpec::Ray { direction } => integrate_ray(f, *direction, s),
            PathSpec::DetouredHalfLine {
                radius,
                side,
                poles,
            } => contour_ell(f, *radius, poles, *side, s),
        }
    }
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    /// Estimate of `int |f(t)| |dt|` over the path.
    pub l1: f64,
    pub evaluations: usize,
}

impl Estimate {
    fn zero() -> Self {
        Estimate {
            value: ZERO,
            error: 0.0,
            l1: 0.0,
            evaluations: 0,
        }
    }

    fn add(&mut self, other: &Estimate) {
        self.value += other.value;
        self.error += other.error;
        self.l1 += other.l1;
        self.evaluations += other.evaluations;
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Hard cap on the number of subintervals of a single segment.
const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    // parameter interval in [0, 1] along the segment
    lo: f64,
    hi: f64,
    depth: u32,
    value: Complex64,
    error: f64,
    l1: f64,
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod evaluation of `g` over `[lo, hi]` (real parameter),
/// where `g` already includes the Jacobian of the path.
fn kronrod15<F>(g: &mut F, lo: f64, hi: f64, depth: u32) -> Panel
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = g(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = WGK[7] * f_center.norm();
    let mut fv1 = [ZERO; 7];
    let mut fv2 = [ZERO; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = g(center - x);
        let f2 = g(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        error = f64::INFINITY;
    }
    Panel {
        lo,
        hi,
        depth,
        value,
        error,
        l1: res_abs,
        floor,
    }
}

/// Globally adaptive integration of `g` over the real parameter interval
/// `[lo, hi]`.
fn adaptive<F>(mut g: F, lo: f64, hi: f64, s: &QuadratureSettings) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    let first = kronrod15(&mut g, lo, hi, 0);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);
    let mut exhausted = false;

    loop {
        let tol = s.abs_tol.max(s.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let too_deep = worst.depth >= s.max_depth;
        let at_floor = worst.error <= worst.floor * 1.000_001;
        if too_deep || at_floor || heap.len() + settled.len() >= MAX_INTERVALS {
            if !at_floor {
                exhausted = true;
            }
            settled.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = kronrod15(&mut g, worst.lo, mid, worst.depth + 1);
        let right = kronrod15(&mut g, mid, worst.hi, worst.depth + 1);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to avoid drift from the running updates
    let mut value = ZERO;
    let mut error = 0.0;
    let mut l1 = 0.0;
    for p in heap.iter().chain(settled.iter()) {
        value += p.value;
        error += p.error;
        l1 += p.l1;
    }
    let tol = s.abs_tol.max(s.rel_tol * value.norm());
    let floor: f64 = heap.iter().chain(settled.iter()).map(|p| p.floor).sum();
    if !is_finite(value) || !error.is_finite() {
        return Err(Error::Accuracy {
            estimate: value,
            error,
        });
    }
    if exhausted && error > tol.max(floor) {
        return Err(Error::Accuracy {
            estimate: value,
            error,
        });
    }
    Ok(Estimate {
        value,
        error,
        l1,
        evaluations,
    })
}

/// Integrates `f` along the straight segment from `a` to `b`.
pub fn integrate_segment<F>(
    mut f: F,
    a: Complex64,
    b: Complex64,
    s: &QuadratureSettings,
) -> Result<Estimate>
where
    F: FnMut(Complex64) -> Complex64,
{
    s.validate()?;
    if !(is_finite(a) && is_finite(b)) {
        return Err(Error::Geometry("segment endpoints must be finite"));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    let delta = b - a;
    adaptive(|u| f(a + delta * u) * delta, 0.0, 1.0, s)
}

/// Integrates `f` along the half-line from the origin with argument `d`.
pub fn integrate_ray<F>(f: F, d: f64, s: &QuadratureSettings) -> Result<Estimate>
where
    F: FnMut(Complex64) -> Complex64,
{
    integrate_ray_from(f, ZERO, d, s)
}

/// Integrates `f` along `origin + r e^{i d}`, `r` in `[0, inf)`.
///
/// Panels are `[0, 1]`, `[1, g]`, `[g, g^2]`, ... with `g` the panel growth.
/// Integration stops when a panel's `int |f|` drops below the cutoff; the
/// last panel's magnitude is added to the error as the tail bound. Three
/// consecutive panels whose mean `|f|` does not shrink signal divergence.
pub fn integrate_ray_from<F>(
    mut f: F,
    origin: Complex64,
    d: f64,
    s: &QuadratureSettings,
) -> Result<Estimate>
where
    F: FnMut(Complex64) -> Complex64,
{
    s.validate()?;
    if !d.is_finite() || !is_finite(origin) {
        return Err(Error::Geometry("ray origin and direction must be finite"));
    }
    let dir = c(d.cos(), d.sin());
    let mut total = Estimate::zero();
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut last_density = f64::INFINITY;
    let mut non_shrinking = 0;
    for _ in 0..400 {
        let panel = integrate_segment(&mut f, origin + dir * lo, origin + dir * hi, s)?;
        total.add(&panel);
        if panel.l1 < s.ray_cutoff_magnitude {
            total.error += panel.l1;
            return Ok(total);
        }
        let density = panel.l1 / (hi - lo);
        if density >= last_density {
            non_shrinking += 1;
            if non_shrinking >= 3 {
                return Err(Error::Divergence("ray integrand does not decay"));
            }
        } else {
            non_shrinking = 0;
        }
        last_density = density;
        lo = hi;
        hi *= s.ray_panel_growth;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Divergence("ray integrand did not reach the cutoff"))
}

const GRADED_LEVELS: usize = 40;

/// Principal value `PV int_0^inf f(t) / (1 - t^2) dt` with the simple pole at
/// `t = 1`.
///
/// The window `[1 - h, 1 + h]` is integrated as `int_0^h [g(1+u) + g(1-u)] du`
/// with `g = f / (1 - t^2)`, which is finite at `u = 0`.
pub fn pv_integral_unit<F>(mut f: F, s: &QuadratureSettings) -> Result<Estimate>
where
    F: FnMut(Complex64) -> Complex64,
{
    s.validate()?;
    if !is_finite(f(c(1.0, 0.0))) {
        return Err(Error::Domain(
            "principal-value integrand is singular at t = 1",
        ));
    }
    let h = s.pv_window;
    let mut g = |t: Complex64| f(t) / (1.0 - t * t);
    // dyadic panels toward 0 resolve boundary layers much thinner than 1 - h
    let mut total = Estimate::zero();
    let mut hi = 1.0 - h;
    for _ in 0..GRADED_LEVELS {
        total.add(&integrate_segment(&mut g, c(0.5 * hi, 0.0), c(hi, 0.0), s)?);
        hi *= 0.5;
    }
    total.add(&integrate_segment(&mut g, ZERO, c(hi, 0.0), s)?);
    let window = integrate_segment(|u: Complex64| g(1.0 + u) + g(1.0 - u), ZERO, c(h, 0.0), s)?;
    total.add(&window);
    let tail = integrate_ray_from(&mut g, c(1.0 + h, 0.0), 0.0, s)?;
    total.add(&tail);
    Ok(total)
}

fn check_detours(r: f64, poles: &[f64]) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Geometry("detour radius must be positive"));
    }
    if let Some(&first) = poles.first() {
        if first <= r {
            return Err(Error::Geometry(
                "first pole must lie beyond the detour radius",
            ));
        }
    }
    for w in poles.windows(2) {
        if !(w[1] - w[0] > 2.0 * r) {
            return Err(Error::Geometry(
                "pole spacing must exceed twice the detour radius",
            ));
        }
    }
    Ok(())
}

/// Integrates `f` over `[0, inf)` with semicircular detours of radius `r`
/// around each listed real pole: below the axis for [`Side::Minus`], above
/// for [`Side::Plus`]. After the last pole the path continues as a ray; if
/// a straight piece between poles falls below the ray cutoff the remaining
/// path is dropped.
pub fn contour_ell<F>(
    mut f: F,
    r: f64,
    poles: &[f64],
    side: Side,
    s: &QuadratureSettings,
) -> Result<Estimate>
where
    F: FnMut(Complex64) -> Complex64,
{
    s.validate()?;
    check_detours(r, poles)?;
    let mut total = Estimate::zero();
    let mut pos = 0.0;
    for &p in poles {
        let seg = integrate_segment(&mut f, c(pos, 0.0), c(p - r, 0.0), s)?;
        total.add(&seg);
        if seg.l1 < s.ray_cutoff_magnitude && pos > 0.0 {
            total.error += seg.l1;
            return Ok(total);
        }
        // t = p + r e^{i phi}, phi from pi to 0 through -pi/2 (Minus) or +pi/2 (Plus)
        let (start, end) = match side {
            Side::Minus => (-PI, 0.0),
            Side::Plus => (PI, 0.0),
        };
        let arc = adaptive(
            |phi| {
                let e = c(phi.cos(), phi.sin());
                f(p + r * e) * (I * r * e)
            },
            start,
            end,
            s,
        )?;
        total.add(&arc);
        pos = p + r;
    }
    let tail = integrate_ray_from(&mut f, c(pos, 0.0), 0.0, s)?;
    total.add(&tail);
    Ok(total)
}
