//! Numerical certification of the identities: both sides are computed
//! through separate call graphs that share only the `special` primitives.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use qmod_core::{
    asymptotic_b_series, asymptotic_remainder, b_integral, dedekind_eta, euler_series, g_star,
    g_term, integrate_segment, jacobi_theta, lambert_series, li2, log_gamma, log_pochhammer_oracle,
    m_stieltjes, modular::mp_log_product, p_contour_real, p_minus, p_plus, pochhammer_inf,
    stieltjes_b, stokes_sum, xqmain_rhs, Complex64, Error, ModularPoint, QuadratureSettings, Side,
};
use rand::Rng;
use rayon::prelude::*;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Detour radius used for the real-parameter contour.
pub const CONTOUR_RADIUS: f64 = 0.5;

/// Number of terms used for the divergent expansion.
pub const ASYMPTOTIC_TERMS: usize = qmod_core::modular::ASYMPTOTIC_MAX_TERMS;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    Main,
    MainBis,
    MainTer,
    Mp,
    PpSlice,
    Stokes,
    XqMain,
    GPlus,
    Oddness,
    Landen,
    Euler,
    EtaModular,
    ThetaModular,
    LambertModular,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Complex,
}

impl Identity {
    pub const ALL: [Identity; 15] = [
        Identity::Main,
        Identity::MainBis,
        Identity::MainTer,
        Identity::Mp,
        Identity::PpSlice,
        Identity::Stokes,
        Identity::XqMain,
        Identity::GPlus,
        Identity::Oddness,
        Identity::Landen,
        Identity::Euler,
        Identity::EtaModular,
        Identity::ThetaModular,
        Identity::LambertModular,
        Identity::Asymptotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Main => "MAIN",
            Identity::MainBis => "MAINBIS",
            Identity::MainTer => "MAINTER",
            Identity::Mp => "MP",
            Identity::PpSlice => "PP_SLICE",
            Identity::Stokes => "STOKES",
            Identity::XqMain => "XQMAIN",
            Identity::GPlus => "G_PLUS",
            Identity::Oddness => "ODDNESS",
            Identity::Landen => "LANDEN",
            Identity::Euler => "EULER",
            Identity::EtaModular => "ETA_MODULAR",
            Identity::ThetaModular => "THETA_MODULAR",
            Identity::LambertModular => "LAMBERT_MODULAR",
            Identity::Asymptotic => "ASYMPTOTIC",
        }
    }

    pub fn parse(s: &str) -> Option<Identity> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        Identity::ALL.into_iter().find(|id| id.name() == up)
    }

    /// Parameter names and kinds, in declaration order.
    pub fn parameters(self) -> &'static [(&'static str, ParamKind)] {
        use ParamKind::*;
        match self {
            Identity::Main | Identity::MainBis | Identity::Mp | Identity::PpSlice => {
                &[("alpha", Real), ("nu", Real)]
            }
            Identity::MainTer | Identity::Asymptotic => &[("q", Real), ("x", Real)],
            Identity::Euler => &[("q", Complex), ("x", Complex)],
            Identity::Landen => &[("x", Real)],
            Identity::EtaModular => &[("tau", Complex)],
            Identity::Stokes
            | Identity::XqMain
            | Identity::GPlus
            | Identity::Oddness
            | Identity::ThetaModular
            | Identity::LambertModular => &[("tau", Complex), ("xi", Complex)],
        }
    }

    /// Relative tolerance for a pass.
    pub fn tolerance(self) -> f64 {
        match self {
            Identity::Euler | Identity::Landen | Identity::GPlus | Identity::Oddness => 1e-11,
            Identity::Main
            | Identity::MainTer
            | Identity::XqMain
            | Identity::PpSlice
            | Identity::Stokes
            | Identity::LambertModular => 1e-8,
            Identity::Mp | Identity::MainBis => 1e-7,
            Identity::EtaModular | Identity::ThetaModular => 1e-10,
            // judged by the optimal-truncation bound instead
            Identity::Asymptotic => f64::INFINITY,
        }
    }

    /// Identities between logarithms, where a `2 pi i k` offset is possible.
    pub fn log_form(self) -> bool {
        matches!(
            self,
            Identity::Main | Identity::MainBis | Identity::MainTer | Identity::Mp | Identity::GPlus
        )
    }

    /// The standard grid for this identity.
    pub fn default_grid(self) -> Grid {
        let g = |spec: &str| Grid::parse(spec).expect("built-in grid");
        match self {
            Identity::Main => g("alpha=0.5,1,2;nu=-0.5,0,0.5,1.5"),
            Identity::MainBis => g("alpha=0.5,1;nu=-0.5,0,0.5,1.5"),
            Identity::MainTer => g("q=0.3,0.6,0.9;x=0.2,0.5,0.8"),
            Identity::Mp | Identity::PpSlice => g("alpha=0.5,1,2;nu=0.1,0.3,0.7"),
            Identity::Stokes => g("tau=0.2+0.8i,i,-0.3+0.9i;xi=0.1,0.3+0.1i,-0.2+0.05i"),
            Identity::XqMain => {
                let mut grid = g("tau=i,0.1+0.9i,0.8i;xi=0.25,0.2+0.05i");
                for tau in [c(0.0, 1.0), c(0.1, 0.9), c(0.0, 0.8)] {
                    grid.points
                        .push(Params::new(vec![("tau".into(), tau), ("xi".into(), tau)]));
                }
                grid
            }
            Identity::GPlus => g("tau=i,0.3+0.7i;xi=0.2+0.3i,-0.5+0.1i,1+i"),
            Identity::Oddness => g("tau=i,0.3+0.7i,-0.2+0.9i;xi=0.2,0.3+0.1i"),
            Identity::Landen => g("x=0.1,0.5,2,7.5"),
            Identity::Euler => g(
                "q=0.1,0.3i,-0.5+0.2i,0.378+0.589i,-0.37-0.82i;x=0.5,-1.2+0.3i,1.8i,1.5-i,0.3+0.2i",
            ),
            Identity::EtaModular => g("tau=i,0.3+0.7i,2i"),
            Identity::ThetaModular => g("tau=i,0.3+0.7i,2i;xi=0.2,0.1+0.05i"),
            Identity::LambertModular => g("tau=i,0.1+0.9i;xi=0.25,0.2+0.05i"),
            Identity::Asymptotic => g("q=0.9,0.99,0.999;x=0.5"),
        }
    }

    /// A random admissible-looking point for property runs.
    pub fn sample<R: Rng>(self, rng: &mut R) -> Params {
        let mut polar =
            |r: f64| Complex64::from_polar(rng.gen_range(0.0..r), rng.gen_range(-PI..PI));
        let values: Vec<Complex64> = match self {
            Identity::Euler => vec![polar(0.9), polar(2.0)],
            _ => {
                let specs = self.parameters();
                specs
                    .iter()
                    .map(|(name, _)| match (self, *name) {
                        (Identity::Mp | Identity::PpSlice, "nu") => {
                            c(rng.gen_range(0.05..0.9), 0.0)
                        }
                        (_, "alpha") => c(rng.gen_range(0.5..2.0), 0.0),
                        (_, "nu") => c(rng.gen_range(-0.5..1.5), 0.0),
                        (Identity::Asymptotic, "q") => c(rng.gen_range(0.5..0.8), 0.0),
                        (Identity::Asymptotic, "x") => c(rng.gen_range(0.3..0.7), 0.0),
                        (_, "q") | (_, "x") if self != Identity::Landen => {
                            c(rng.gen_range(0.2..0.9), 0.0)
                        }
                        (_, "x") => c(rng.gen_range(0.1..10.0), 0.0),
                        (_, "tau") => c(rng.gen_range(-0.4..0.4), rng.gen_range(0.6..1.5)),
                        _ => c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.2..0.2)),
                    })
                    .collect()
            }
        };
        Params::new(
            self.parameters()
                .iter()
                .zip(values)
                .map(|((n, _), v)| (n.to_string(), v))
                .collect(),
        )
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Named parameter values in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Params(Vec<(String, Complex64)>);

impl Params {
    pub fn new(values: Vec<(String, Complex64)>) -> Params {
        Params(values)
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Complex64)> {
        self.0.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Checks that exactly the identity's parameters are present.
    pub fn check(&self, id: Identity) -> Result<(), ConfigError> {
        for (name, _) in id.parameters() {
            if self.get(name).is_none() {
                return Err(ConfigError(format!("{id} needs parameter `{name}`")));
            }
        }
        for (name, _) in &self.0 {
            if !id.parameters().iter().any(|(n, _)| n == name) {
                return Err(ConfigError(format!(
                    "{id} does not take parameter `{name}`"
                )));
            }
        }
        Ok(())
    }

    fn complex(&self, name: &str) -> Complex64 {
        self.get(name).expect("parameters checked")
    }

    fn real(&self, name: &str) -> Result<f64, Skip> {
        let v = self.complex(name);
        if v.im != 0.0 {
            return Err(Skip::Domain(format!("{name} must be real")));
        }
        Ok(v.re)
    }
}

/// A parameter grid: an ordered list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<Params>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("configuration error: {0}")]
pub struct ConfigError(pub String);

impl Grid {
    /// Parses `name=v1,v2;name2=w1,w2` into the Cartesian product, varying the
    /// last name fastest.
    pub fn parse(spec: &str) -> Result<Grid, ConfigError> {
        let mut axes: Vec<(String, Vec<Complex64>)> = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, values) = part
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("grid axis `{part}` lacks `=`")))?;
            let name = name.trim().to_string();
            if axes.iter().any(|(n, _)| *n == name) {
                return Err(ConfigError(format!("grid axis `{name}` repeated")));
            }
            let mut list = Vec::new();
            for v in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                list.push(
                    crate::complex::parse_complex(v).map_err(|e| ConfigError(e.to_string()))?,
                );
            }
            axes.push((name, list));
        }
        let mut points = vec![Vec::new()];
        for (name, values) in &axes {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for v in values {
                    let mut q: Vec<(String, Complex64)> = p.clone();
                    q.push((name.clone(), *v));
                    next.push(q);
                }
            }
            points = next;
        }
        if axes.is_empty() {
            points.clear();
        }
        Ok(Grid {
            points: points.into_iter().map(Params::new).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Outside the identity's domain.
    Skipped,
    /// A quadrature or series did not reach its accuracy target.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub identity: Identity,
    pub params: Params,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub offset_2pik: i64,
    pub outcome: Outcome,
    pub tolerance: f64,
    pub elapsed: Duration,
    /// Identity-specific extra columns.
    pub extra: Vec<(String, f64)>,
    /// Reason for a skip or an inconclusive result.
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn skipped(&self) -> bool {
        self.outcome == Outcome::Skipped
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

pub fn rel_err(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300)
}

/// Aggregate over the non-skipped reports of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub identity: Identity,
    pub points: usize,
    pub evaluated: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub skipped: usize,
    pub max_rel_err: f64,
    pub max_abs_err: f64,
    pub nonzero_offsets: usize,
}

impl Summary {
    pub fn of(identity: Identity, reports: &[VerificationReport]) -> Summary {
        let mut s = Summary {
            identity,
            points: reports.len(),
            evaluated: 0,
            passed: 0,
            failed: 0,
            inconclusive: 0,
            skipped: 0,
            max_rel_err: 0.0,
            max_abs_err: 0.0,
            nonzero_offsets: 0,
        };
        for r in reports {
            match r.outcome {
                Outcome::Skipped => {
                    s.skipped += 1;
                    continue;
                }
                Outcome::Pass => s.passed += 1,
                Outcome::Fail => s.failed += 1,
                Outcome::Inconclusive => s.inconclusive += 1,
            }
            s.evaluated += 1;
            if r.outcome != Outcome::Inconclusive {
                s.max_rel_err = s.max_rel_err.max(r.rel_err);
                s.max_abs_err = s.max_abs_err.max(r.abs_err);
            }
            if r.offset_2pik != 0 {
                s.nonzero_offsets += 1;
            }
        }
        s
    }

    pub fn pass_rate(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.passed as f64 / self.evaluated as f64
        }
    }

    pub fn all_passed(&self) -> bool {
        self.evaluated > 0 && self.passed == self.evaluated
    }
}

/// Why a point produced no verdict.
#[derive(Debug, Clone)]
enum Skip {
    Domain(String),
    Inconclusive(String),
}

impl From<Error> for Skip {
    fn from(e: Error) -> Skip {
        if e.is_domain_like() {
            Skip::Domain(e.to_string())
        } else {
            Skip::Inconclusive(e.to_string())
        }
    }
}

struct Sides {
    lhs: Complex64,
    rhs: Complex64,
    extra: Vec<(String, f64)>,
    verdict: Option<bool>,
}

impl Sides {
    fn new(lhs: Complex64, rhs: Complex64) -> Sides {
        Sides {
            lhs,
            rhs,
            extra: Vec::new(),
            verdict: None,
        }
    }
}

/// Kernel for `(x;q)_inf` used on the product side of EULER and XQMAIN.
pub type ProductKernel = fn(Complex64, Complex64) -> Result<Complex64, Error>;

fn default_product(x: Complex64, q: Complex64) -> Result<Complex64, Error> {
    pochhammer_inf(x, q).map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    pub settings: QuadratureSettings,
    pub product: ProductKernel,
    /// Replaces every identity's tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier::new(QuadratureSettings::default())
    }
}

impl Verifier {
    pub fn new(settings: QuadratureSettings) -> Verifier {
        Verifier {
            settings,
            product: default_product,
            tolerance: None,
        }
    }

    pub fn with_product(mut self, product: ProductKernel) -> Verifier {
        self.product = product;
        self
    }

    pub fn tolerance_for(&self, id: Identity) -> f64 {
        match (id, self.tolerance) {
            (Identity::Asymptotic, _) => id.tolerance(),
            (_, Some(t)) => t,
            (_, None) => id.tolerance(),
        }
    }

    /// Verifies one point. Parameter names must already match the identity.
    pub fn verify(&self, id: Identity, params: &Params) -> VerificationReport {
        let start = Instant::now();
        let tolerance = self.tolerance_for(id);
        let result = self.sides(id, params);
        let elapsed = start.elapsed();
        let mut report = VerificationReport {
            identity: id,
            params: params.clone(),
            lhs: c(f64::NAN, f64::NAN),
            rhs: c(f64::NAN, f64::NAN),
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            offset_2pik: 0,
            outcome: Outcome::Skipped,
            tolerance,
            elapsed,
            extra: Vec::new(),
            note: None,
        };
        match result {
            Ok(sides) => {
                let abs_err = (sides.lhs - sides.rhs).norm();
                let rel = rel_err(sides.lhs, sides.rhs);
                report.offset_2pik = if id.log_form() {
                    ((sides.lhs.im - sides.rhs.im) / (2.0 * PI)).round() as i64
                } else {
                    0
                };
                let pass = sides.verdict.unwrap_or(rel <= tolerance);
                report.lhs = sides.lhs;
                report.rhs = sides.rhs;
                report.abs_err = abs_err;
                report.rel_err = rel;
                report.extra = sides.extra;
                report.outcome = if !(abs_err.is_finite()) {
                    Outcome::Inconclusive
                } else if pass {
                    Outcome::Pass
                } else {
                    Outcome::Fail
                };
            }
            Err(Skip::Domain(why)) => report.note = Some(why),
            Err(Skip::Inconclusive(why)) => {
                report.outcome = Outcome::Inconclusive;
                report.note = Some(why);
            }
        }
        report
    }

    fn sides(&self, id: Identity, p: &Params) -> Result<Sides, Skip> {
        let s = &self.settings;
        match id {
            Identity::Main => {
                let (alpha, nu) = alpha_nu(p, -1.0)?;
                let lhs = main_lhs(alpha, nu)?;
                let rhs = main_rhs(alpha, nu, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::MainBis => {
                let (alpha, nu) = alpha_nu(p, -1.0)?;
                let lhs = main_lhs(alpha, nu)?;
                let rhs = mainbis_rhs(alpha, nu, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::MainTer => {
                let (q, x) = unit_pair(p)?;
                let lhs = log_pochhammer_oracle(c(x, 0.0), c(q, 0.0))?;
                let lq = q.ln();
                let eps = -lq / (2.0 * PI);
                let rhs =
                    li2(c(x, 0.0))? / lq + 0.5 * (1.0 - x).ln() - lq / 24.0 - b_integral(q, x, s)?
                        + m_stieltjes(eps, x.ln() / lq, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Mp => {
                let (alpha, nu) = alpha_nu(p, f64::NEG_INFINITY)?;
                let lhs = m_stieltjes(alpha, nu, s)?;
                let rhs = mp_log_product(alpha, nu)?
                    + p_contour_real(alpha, nu, CONTOUR_RADIUS, Side::Minus, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::PpSlice => {
                let (alpha, nu) = alpha_nu(p, f64::NEG_INFINITY)?;
                let tau = c(0.0, alpha);
                let lhs = p_minus(tau, tau * nu, s)?;
                let rhs = p_contour_real(alpha, nu, CONTOUR_RADIUS, Side::Minus, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Stokes => {
                let (tau, xi) = (p.complex("tau"), p.complex("xi"));
                let (jump, _) = stokes_sum(tau, xi)?;
                // P- = P+ + 2i sum keeps a scale for rel_err where the jump vanishes
                let lhs = p_minus(tau, xi, s)?;
                let rhs = p_plus(tau, xi, s)? + jump;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::XqMain => {
                let point = theorem_point(p)?;
                let lhs = (self.product)(point.x, point.q)?;
                let rhs = xqmain_rhs(&point, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::GPlus => {
                let (tau, xi) = (p.complex("tau"), p.complex("xi"));
                if tau == c(0.0, 0.0) {
                    return Err(Skip::Domain("tau must be nonzero".into()));
                }
                let z = xi / tau;
                let e = if z.im > 0.0 {
                    (2.0 * PI * c(0.0, 1.0) * z).exp()
                } else if z.im < 0.0 {
                    (-2.0 * PI * c(0.0, 1.0) * z).exp()
                } else {
                    return Err(Skip::Domain("Im(xi / tau) = 0".into()));
                };
                let lhs = g_term(tau, xi)? + g_term(tau, -xi)?;
                let rhs = qmod_core::principal_log(c(1.0, 0.0) - e)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Oddness => {
                let (tau, xi) = (p.complex("tau"), p.complex("xi"));
                let lhs = g_star(tau, -xi)? + p_minus(tau, -xi, s)?;
                let rhs = -(g_star(tau, xi)? + p_minus(tau, xi, s)?);
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Landen => {
                let x = p.real("x")?;
                if !(x > 0.0) || x == 1.0 {
                    return Err(Skip::Domain("x must be positive and not 1".into()));
                }
                let lhs = li2(c(1.0 - x, 0.0))? + li2(c(1.0 - 1.0 / x, 0.0))?;
                let rhs = c(-0.5 * x.ln() * x.ln(), 0.0);
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Euler => {
                let (q, x) = (p.complex("q"), p.complex("x"));
                if !(q.norm() < 1.0) {
                    return Err(Skip::Domain("|q| must be below 1".into()));
                }
                let lhs = (self.product)(x, q)?;
                let rhs = euler_series(x, q)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::EtaModular => {
                let tau = p.complex("tau");
                let lhs = dedekind_eta(-tau.inv())?;
                let rhs = (c(0.0, -1.0) * tau).sqrt() * dedekind_eta(tau)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::ThetaModular => {
                let (tau, xi) = (p.complex("tau"), p.complex("xi"));
                let lhs = jacobi_theta(xi, tau)?;
                let rest = theta_transform(tau, xi)?;
                let root = (c(0.0, -1.0) * tau).sqrt();
                let mut sides = Sides::new(lhs, rest / root);
                let normalized = lhs / rest * root;
                sides.extra.push(("multiplier_re".into(), normalized.re));
                sides.extra.push(("multiplier_im".into(), normalized.im));
                Ok(sides)
            }
            Identity::LambertModular => {
                let point = theorem_point(p)?;
                let lhs = lambert_series(point.x, point.q)?;
                let rhs = lambert_rhs(point.tau, point.xi, s)?;
                Ok(Sides::new(lhs, rhs))
            }
            Identity::Asymptotic => {
                let (q, x) = unit_pair(p)?;
                let lhs = b_integral(q, x, s)?;
                let series = asymptotic_b_series(q, x, ASYMPTOTIC_TERMS)?;
                let n = series.optimal_index - 1;
                let rhs = series.optimal_partial_sum();
                let direct = lhs - rhs;
                let (sign, ln_actual) = asymptotic_remainder(q, x, n, s)?;
                let remainder = sign * ln_actual.exp();
                // the direct difference carries the rounding of b and of the sum
                let scale: f64 = series.coefficients[..n]
                    .iter()
                    .map(|t| t.abs())
                    .sum::<f64>()
                    + lhs.abs();
                let consistent = (direct - remainder).abs() <= 1e-11 * scale;
                let ln_optimal = series.log_magnitudes[n];
                let mut sides = Sides::new(c(lhs, 0.0), c(rhs, 0.0));
                sides.verdict =
                    Some(consistent && ln_actual <= std::f64::consts::LN_2 + ln_optimal);
                sides
                    .extra
                    .push(("optimal_index".into(), series.optimal_index as f64));
                sides
                    .extra
                    .push(("optimal_error".into(), series.optimal_error));
                sides.extra.push(("actual_error".into(), remainder.abs()));
                sides.extra.push(("ln_optimal_error".into(), ln_optimal));
                sides.extra.push(("ln_actual_error".into(), ln_actual));
                sides.extra.push(("direct_difference".into(), direct));
                Ok(sides)
            }
        }
    }

    /// Verifies every point in parallel; the output keeps the input order.
    pub fn verify_all(&self, id: Identity, points: &[Params]) -> Vec<VerificationReport> {
        points.par_iter().map(|p| self.verify(id, p)).collect()
    }

    /// Verifies every grid point, in parallel, keeping grid order. Fails on
    /// an empty grid or when every point is outside the domain.
    pub fn sweep(&self, id: Identity, grid: &Grid) -> Result<SweepResult, ConfigError> {
        if grid.is_empty() {
            return Err(ConfigError("empty grid".into()));
        }
        for p in &grid.points {
            p.check(id)?;
        }
        let reports = self.verify_all(id, &grid.points);
        let summary = Summary::of(id, &reports);
        if summary.evaluated == 0 {
            return Err(ConfigError(format!(
                "no admissible point in the {id} grid ({} skipped)",
                summary.skipped
            )));
        }
        Ok(SweepResult { reports, summary })
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub reports: Vec<VerificationReport>,
    pub summary: Summary,
}

fn alpha_nu(p: &Params, nu_min: f64) -> Result<(f64, f64), Skip> {
    let alpha = p.real("alpha")?;
    let nu = p.real("nu")?;
    if !(alpha > 0.0) {
        return Err(Skip::Domain("alpha must be positive".into()));
    }
    if !(nu > nu_min) || !nu.is_finite() {
        return Err(Skip::Domain("nu outside the identity's range".into()));
    }
    Ok((alpha, nu))
}

fn unit_pair(p: &Params) -> Result<(f64, f64), Skip> {
    let q = p.real("q")?;
    let x = p.real("x")?;
    if !(q > 0.0 && q < 1.0 && x > 0.0 && x < 1.0) {
        return Err(Skip::Domain("q and x must lie in (0, 1)".into()));
    }
    Ok((q, x))
}

fn theorem_point(p: &Params) -> Result<ModularPoint, Skip> {
    let point = ModularPoint::new(p.complex("tau"), p.complex("xi"))?;
    if point.xi_on_cut() {
        return Err(Skip::Domain("xi lies on (-inf, -1] U [1, inf)".into()));
    }
    if point.ratio_on_cut() {
        return Err(Skip::Domain("xi / tau lies on (-inf, 0]".into()));
    }
    Ok(point)
}

/// `log (x;q)_inf` at `q = e^{-2 pi alpha}`, `x = e^{-2 pi (1 + nu) alpha}`.
fn main_lhs(alpha: f64, nu: f64) -> Result<Complex64, Skip> {
    let q = (-2.0 * PI * alpha).exp();
    let x = (-2.0 * PI * (1.0 + nu) * alpha).exp();
    Ok(log_pochhammer_oracle(c(x, 0.0), c(q, 0.0))?)
}

fn ln_gamma_real(v: f64) -> Result<f64, Skip> {
    Ok(log_gamma(c(v, 0.0))?.re)
}

fn main_rhs(alpha: f64, nu: f64, s: &QuadratureSettings) -> Result<Complex64, Skip> {
    let a = 2.0 * PI * alpha;
    // (1 - e^{-2 pi nu alpha}) / nu, with its limit 2 pi alpha at nu = 0
    let log_ratio = if nu == 0.0 {
        a.ln()
    } else {
        (-(-a * nu).exp_m1() / nu).ln()
    };
    let integral = integrate_segment(
        |t: Complex64| {
            let w = a * t.re;
            let v = if w == 0.0 { 0.0 } else { w / w.exp_m1() - 1.0 };
            c(v, 0.0)
        },
        c(0.0, 0.0),
        c(nu, 0.0),
        s,
    )
    .map_err(Skip::from)?
    .value;
    let m = m_stieltjes(alpha, nu, s)?;
    Ok(c(
        -PI / (12.0 * alpha) + LN_SQRT_2PI - ln_gamma_real(nu + 1.0)? + PI * alpha / 12.0
            - (nu + 0.5) * log_ratio,
        0.0,
    ) + integral
        + m)
}

fn mainbis_rhs(alpha: f64, nu: f64, s: &QuadratureSettings) -> Result<Complex64, Skip> {
    let integral = integrate_segment(
        |t: Complex64| (t - nu - 0.5) * stieltjes_b(t * alpha).unwrap_or(c(f64::NAN, 0.0)),
        c(0.0, 0.0),
        c(nu, 0.0),
        s,
    )
    .map_err(Skip::from)?
    .value;
    let m = m_stieltjes(alpha, nu, s)?;
    Ok(c(
        -PI / (12.0 * alpha) - (nu + 0.5) * (2.0 * PI * alpha).ln() + LN_SQRT_2PI
            - ln_gamma_real(nu + 1.0)?
            + 0.5 * PI * (nu + 1.0) * nu * alpha
            + PI * alpha / 12.0,
        0.0,
    ) + 2.0 * PI * alpha * integral
        + m)
}

/// `e^{-pi i xi^2/tau - pi i/(4 tau) - pi i xi/tau} (q*;q*)(-x*;q*)(-q*/x*;q*)`.
fn theta_transform(tau: Complex64, xi: Complex64) -> Result<Complex64, Skip> {
    let i = c(0.0, 1.0);
    let qs = (-2.0 * PI * i / tau).exp();
    let xs = (2.0 * PI * i * xi / tau).exp();
    let phase = (-PI * i * xi * xi / tau - PI * i / (4.0 * tau) - PI * i * xi / tau).exp();
    let (a, _) = pochhammer_inf(qs, qs)?;
    let (b, _) = pochhammer_inf(-xs, qs)?;
    let (d, _) = pochhammer_inf(-qs / xs, qs)?;
    Ok(phase * a * b * d)
}

/// `-x d/dx log` of the modular right-hand side, i.e. `-F'(xi) / (2 pi i F)`,
/// with the derivative from a 16-point Cauchy circle of radius 0.02.
fn lambert_rhs(tau: Complex64, xi: Complex64, s: &QuadratureSettings) -> Result<Complex64, Skip> {
    const N: usize = 16;
    const H: f64 = 0.02;
    let center = xqmain_rhs(&ModularPoint::new(tau, xi)?, s)?;
    let mut deriv = c(0.0, 0.0);
    for j in 0..N {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / N as f64);
        let point = ModularPoint::new(tau, xi + w * H)?;
        if point.xi_on_cut() || point.ratio_on_cut() {
            return Err(Skip::Domain("derivative circle leaves the domain".into()));
        }
        deriv += xqmain_rhs(&point, s)? / w;
    }
    deriv /= N as f64 * H;
    Ok(-deriv / (2.0 * PI * c(0.0, 1.0) * center))
}
