//! The `qmod` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 domain error,
//! 3 accuracy error or inconclusive verification, 4 verification failed.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use qmod_core::{self as core, Complex64, Error, ModularPoint, QuadratureSettings, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{format_complex, format_complex_sig, format_f64, format_sig, parse_complex};
use crate::config::{Format, RunConfig};
use crate::report;
use crate::verify::{
    ConfigError, Grid, Identity, Outcome, Params, Summary, VerificationReport, Verifier,
};

#[derive(Parser, Debug)]
#[command(
    name = "qmod",
    version,
    about = "Evaluate and verify the modular transform of (x;q)_inf"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file with key=value lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Configuration override (repeatable), e.g. --set abs_tol=1e-10.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one operation at a point.
    Eval {
        op: String,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Verify an identity at a point, on its standard grid, or at random points.
    Verify {
        identity: String,
        #[command(flatten)]
        point: PointArgs,
        /// Number of random points instead of the standard grid.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Pass tolerance replacing the identity's default.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify an identity over a Cartesian grid and emit CSV or JSON.
    Sweep {
        identity: String,
        /// Grid such as "tau=i,0.5+0.5i;xi=0.1,0.2,0.3".
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Optimal truncation of the divergent expansion of the B-integral.
    Asymptotic {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = core::modular::ASYMPTOTIC_MAX_TERMS)]
        k_max: usize,
        /// Write the terms (k, term, ln|term|) as CSV here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List operations and identities.
    List,
}

#[derive(Args, Debug, Default)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Detour radius.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Ray direction.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k_max: Option<String>,
    /// minus or plus.
    #[arg(long)]
    side: Option<String>,
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl PointArgs {
    fn provided(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("x", &self.x),
            ("q", &self.q),
            ("z", &self.z),
            ("t", &self.t),
            ("tau", &self.tau),
            ("xi", &self.xi),
            ("alpha", &self.alpha),
            ("nu", &self.nu),
            ("r", &self.r),
            ("d", &self.d),
            ("n", &self.n),
            ("k_max", &self.k_max),
            ("side", &self.side),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    fn raw(&self, name: &str) -> Result<&str, Failure> {
        self.provided()
            .into_iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Failure::Usage(format!("missing --{}", name.replace('_', "-"))))
    }

    fn complex(&self, name: &str) -> Result<Complex64, Failure> {
        parse_complex(self.raw(name)?).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn real(&self, name: &str) -> Result<f64, Failure> {
        let v = self.complex(name)?;
        if v.im != 0.0 {
            return Err(Failure::Usage(format!("--{name} must be real")));
        }
        Ok(v.re)
    }

    fn integer<T: std::str::FromStr>(&self, name: &str) -> Result<T, Failure> {
        let raw = self.raw(name)?;
        raw.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "--{} expects an integer, got `{raw}`",
                name.replace('_', "-")
            ))
        })
    }

    fn side(&self) -> Result<Side, Failure> {
        match self.side.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None | Some("minus") | Some("-") => Ok(Side::Minus),
            Some("plus") | Some("+") => Ok(Side::Plus),
            Some(other) => Err(Failure::Usage(format!("unknown side `{other}`"))),
        }
    }

    /// Rejects flags the target does not use.
    fn only(&self, target: &str, allowed: &[&str]) -> Result<(), Failure> {
        for (k, _) in self.provided() {
            if !allowed.contains(&k) {
                return Err(Failure::Usage(format!(
                    "{target} does not take --{}",
                    k.replace('_', "-")
                )));
            }
        }
        Ok(())
    }
}

/// A run that did not end with exit code 0.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Accuracy(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Accuracy(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Domain(m)
            | Failure::Accuracy(m)
            | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_domain_like() {
            Failure::Domain(e.to_string())
        } else {
            Failure::Accuracy(e.to_string())
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Usage(format!("I/O error: {e}"))
    }
}

/// Runs the command line `args` (including the program name) and returns the
/// exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::from_env()?;
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_output(cfg: &mut RunConfig, o: &OutputArgs) -> Result<(), Failure> {
    if let Some(f) = &o.format {
        cfg.format = Format::parse(f)?;
    }
    if let Some(p) = &o.output {
        cfg.output = Some(p.clone());
    }
    Ok(())
}

fn parse_identity(s: &str) -> Result<Identity, Failure> {
    Identity::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Identity::ALL.iter().map(|i| i.name()).collect();
        Failure::Usage(format!(
            "unknown identity `{s}` (one of {})",
            names.join(", ")
        ))
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Eval { op, point } => {
            for (k, v) in eval(&op, &point, &cfg.settings)? {
                writeln!(out, "{k}: {v}")?;
            }
            Ok(())
        }
        Command::Verify {
            identity,
            point,
            samples,
            seed,
            tol,
            out: o,
        } => {
            let id = parse_identity(&identity)?;
            apply_output(&mut cfg, &o)?;
            if let Some(s) = samples {
                cfg.samples = Some(s);
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if tol.is_some() {
                cfg.tolerance = tol;
            }
            cfg.validate()?;
            run_verify(id, &point, &cfg, out)
        }
        Command::Sweep {
            identity,
            grid,
            tol,
            out: o,
        } => {
            let id = parse_identity(&identity)?;
            apply_output(&mut cfg, &o)?;
            if tol.is_some() {
                cfg.tolerance = tol;
            }
            cfg.validate()?;
            run_sweep(id, &grid, &cfg, out)
        }
        Command::Asymptotic {
            q,
            x,
            k_max,
            output,
        } => run_asymptotic(q, x, k_max, output, &cfg, out),
        Command::List => {
            writeln!(out, "operations:")?;
            for (name, params) in OPERATIONS {
                writeln!(out, "  {name} ({})", params.join(", "))?;
            }
            writeln!(out, "identities:")?;
            for id in Identity::ALL {
                let names: Vec<&str> = id.parameters().iter().map(|(n, _)| *n).collect();
                writeln!(out, "  {} ({})", id.name(), names.join(", "))?;
            }
            Ok(())
        }
    }
}

fn verifier(cfg: &RunConfig) -> Verifier {
    let mut v = Verifier::new(cfg.settings);
    v.tolerance = cfg.tolerance;
    v
}

fn run_verify(
    id: Identity,
    point: &PointArgs,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let names: Vec<&str> = id.parameters().iter().map(|(n, _)| *n).collect();
    point.only(id.name(), &names)?;
    let points: Vec<Params> = if !point.provided().is_empty() {
        let mut values = Vec::new();
        for n in &names {
            values.push((n.to_string(), point.complex(n)?));
        }
        vec![Params::new(values)]
    } else if let Some(count) = cfg.samples {
        if count == 0 {
            return Err(Failure::Usage("--samples must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..count).map(|_| id.sample(&mut rng)).collect()
    } else {
        id.default_grid().points
    };
    let reports = verifier(cfg).verify_all(id, &points);
    let summary = Summary::of(id, &reports);
    if let Some(path) = &cfg.output {
        write_reports(path, cfg.format, &reports, &summary)?;
    }
    match cfg.format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", report::report_json(r))?;
            }
        }
        Format::Csv => {
            for r in &reports {
                writeln!(out, "{}", human_line(r))?;
            }
            writeln!(out, "{}", human_summary(&summary))?;
        }
    }
    verdict(&summary, true)
}

fn verdict(summary: &Summary, all_skipped_is_domain: bool) -> Result<(), Failure> {
    if summary.failed > 0 {
        Err(Failure::Verification(format!(
            "{} of {} points failed",
            summary.failed, summary.evaluated
        )))
    } else if summary.inconclusive > 0 {
        Err(Failure::Accuracy(format!(
            "{} points inconclusive",
            summary.inconclusive
        )))
    } else if summary.evaluated == 0 && all_skipped_is_domain {
        Err(Failure::Domain(
            "every point lies outside the identity's domain".into(),
        ))
    } else {
        Ok(())
    }
}

fn run_sweep(
    id: Identity,
    spec: &str,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let grid = Grid::parse(spec)?;
    let result = verifier(cfg).sweep(id, &grid)?;
    match &cfg.output {
        Some(path) => write_reports(path, cfg.format, &result.reports, &result.summary)?,
        None => match cfg.format {
            Format::Csv => report::write_csv(&mut *out, &result.reports, &result.summary)?,
            Format::Json => report::write_json(&mut *out, &result.reports, &result.summary)?,
        },
    }
    if cfg.output.is_some() {
        writeln!(out, "{}", human_summary(&result.summary))?;
    }
    verdict(&result.summary, false)
}

fn write_reports(
    path: &PathBuf,
    format: Format,
    reports: &[VerificationReport],
    summary: &Summary,
) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => report::write_csv(&mut w, reports, summary)?,
        Format::Json => report::write_json(&mut w, reports, summary)?,
    }
    w.flush()?;
    Ok(())
}

fn human_line(r: &VerificationReport) -> String {
    let status = match r.outcome {
        Outcome::Pass => "PASS",
        Outcome::Fail => "FAIL",
        Outcome::Skipped => "SKIP",
        Outcome::Inconclusive => "INCONCLUSIVE",
    };
    let params: Vec<String> = r
        .params
        .iter()
        .map(|(n, v)| format!("{n}={}", format_complex(*v)))
        .collect();
    let mut line = format!("{status} {} {}", r.identity, params.join(" "));
    if matches!(r.outcome, Outcome::Pass | Outcome::Fail) {
        line.push_str(&format!(
            " lhs={} rhs={} abs_err={} rel_err={}",
            format_complex_sig(r.lhs, 15),
            format_complex_sig(r.rhs, 15),
            format_sig(r.abs_err, 3),
            format_sig(r.rel_err, 3)
        ));
        if r.offset_2pik != 0 {
            line.push_str(&format!(" offset_2pik={}", r.offset_2pik));
        }
        for (n, v) in &r.extra {
            let shown = if v.fract() == 0.0 && v.abs() < 1e15 && *v != 0.0 {
                format!("{v}")
            } else {
                format_sig(*v, 6)
            };
            line.push_str(&format!(" {n}={shown}"));
        }
    }
    if let Some(note) = &r.note {
        line.push_str(&format!(" ({note})"));
    }
    line
}

fn human_summary(s: &Summary) -> String {
    format!(
        "summary {}: {} points, {} passed, {} failed, {} inconclusive, {} skipped, max rel_err {}",
        s.identity,
        s.points,
        s.passed,
        s.failed,
        s.inconclusive,
        s.skipped,
        format_sig(s.max_rel_err, 3)
    )
}

fn run_asymptotic(
    q: f64,
    x: f64,
    k_max: usize,
    output: Option<PathBuf>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let series = core::asymptotic_b_series(q, x, k_max)?;
    let integral = core::b_integral(q, x, &cfg.settings)?;
    let n = series.optimal_index - 1;
    let partial = series.optimal_partial_sum();
    let (sign, ln_actual) = core::asymptotic_remainder(q, x, n, &cfg.settings)?;
    let ln_optimal = series.log_magnitudes[n];
    writeln!(out, "q: {}", format_f64(q))?;
    writeln!(out, "x: {}", format_f64(x))?;
    writeln!(out, "terms: {}", series.coefficients.len())?;
    writeln!(
        out,
        "decreases_then_increases: {}",
        series.decreases_then_increases()
    )?;
    writeln!(out, "optimal_index: {}", series.optimal_index)?;
    writeln!(
        out,
        "optimal_error: {}",
        format_sig(series.optimal_error, 6)
    )?;
    writeln!(out, "ln_optimal_error: {}", format_sig(ln_optimal, 10))?;
    writeln!(out, "optimal_partial_sum: {}", format_sig(partial, 15))?;
    writeln!(out, "b_integral: {}", format_sig(integral, 15))?;
    writeln!(
        out,
        "direct_difference: {}",
        format_sig(integral - partial, 6)
    )?;
    writeln!(out, "remainder: {}", format_sig(sign * ln_actual.exp(), 6))?;
    writeln!(out, "ln_actual_error: {}", format_sig(ln_actual, 10))?;
    writeln!(
        out,
        "within_twice_optimal_error: {}",
        ln_actual <= std::f64::consts::LN_2 + ln_optimal
    )?;
    if let Some(path) = output {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(File::create(&path)?));
        w.write_record(["k", "term", "ln_abs_term"])
            .map_err(csv_err)?;
        for (k, (t, l)) in series
            .coefficients
            .iter()
            .zip(&series.log_magnitudes)
            .enumerate()
        {
            w.write_record([(k + 1).to_string(), format_f64(*t), format_f64(*l)])
                .map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Usage(format!("CSV error: {e}"))
}

const OPERATIONS: &[(&str, &[&str])] = &[
    ("principal_log", &["z"]),
    ("li2", &["z"]),
    ("log_gamma", &["z"]),
    ("bernoulli", &["n"]),
    ("stieltjes_b", &["t"]),
    ("cot_kernel", &["t"]),
    ("pochhammer_inf", &["x", "q"]),
    ("pochhammer_n", &["x", "q", "n"]),
    ("euler_series", &["x", "q"]),
    ("log_pochhammer_oracle", &["x", "q"]),
    ("lambert_series", &["x", "q"]),
    ("dedekind_eta", &["tau"]),
    ("jacobi_theta", &["xi", "tau"]),
    ("g_term", &["tau", "xi"]),
    ("g_star", &["tau", "xi"]),
    ("choose_ray", &["tau", "xi", "side"]),
    ("p_ray", &["tau", "xi", "d"]),
    ("p_minus", &["tau", "xi"]),
    ("p_plus", &["tau", "xi"]),
    ("p_contour_real", &["alpha", "nu", "r", "side"]),
    ("m_stieltjes", &["alpha", "nu"]),
    ("b_integral", &["q", "x"]),
    ("asymptotic_b_series", &["q", "x", "k_max"]),
    ("stokes_sum", &["tau", "xi"]),
    ("k_factor", &["tau", "xi"]),
    ("xqmain_rhs", &["tau", "xi"]),
];

type Lines = Vec<(String, String)>;

fn value(z: Complex64) -> Lines {
    vec![("value".into(), format_complex_sig(z, 15))]
}

fn quad_meta(mut lines: Lines, s: &QuadratureSettings) -> Lines {
    lines.push((
        "quadrature".into(),
        format!(
            "abs_tol={} rel_tol={}",
            format_f64(s.abs_tol),
            format_f64(s.rel_tol)
        ),
    ));
    lines
}

fn truncation_meta(mut lines: Lines, t: core::SeriesTruncation) -> Lines {
    lines.push(("terms_used".into(), t.terms_used.to_string()));
    lines.push(("tail_bound".into(), format_sig(t.tail_bound, 3)));
    lines
}

fn eval(op: &str, p: &PointArgs, s: &QuadratureSettings) -> Result<Lines, Failure> {
    let Some((name, params)) = OPERATIONS.iter().find(|(n, _)| *n == op) else {
        return Err(Failure::Usage(format!(
            "unknown operation `{op}` (see `qmod list`)"
        )));
    };
    let allowed: Vec<&str> = params.to_vec();
    p.only(name, &allowed)?;
    let tau_xi =
        || -> Result<(Complex64, Complex64), Failure> { Ok((p.complex("tau")?, p.complex("xi")?)) };
    let lines = match *name {
        "principal_log" => value(core::principal_log(p.complex("z")?)?),
        "li2" => value(core::li2(p.complex("z")?)?),
        "log_gamma" => value(core::log_gamma(p.complex("z")?)?),
        "bernoulli" => value(Complex64::new(core::bernoulli(p.integer("n")?)?, 0.0)),
        "stieltjes_b" => value(core::stieltjes_b(p.complex("t")?)?),
        "cot_kernel" => value(core::cot_kernel(p.complex("t")?)?),
        "pochhammer_inf" => {
            let (v, t) = core::pochhammer_inf(p.complex("x")?, p.complex("q")?)?;
            truncation_meta(value(v), t)
        }
        "pochhammer_n" => value(core::pochhammer_n(
            p.complex("x")?,
            p.complex("q")?,
            p.integer("n")?,
        )?),
        "euler_series" => value(core::euler_series(p.complex("x")?, p.complex("q")?)?),
        "log_pochhammer_oracle" => value(core::log_pochhammer_oracle(
            p.complex("x")?,
            p.complex("q")?,
        )?),
        "lambert_series" => value(core::lambert_series(p.complex("x")?, p.complex("q")?)?),
        "dedekind_eta" => value(core::dedekind_eta(p.complex("tau")?)?),
        "jacobi_theta" => value(core::jacobi_theta(p.complex("xi")?, p.complex("tau")?)?),
        "g_term" => {
            let (tau, xi) = tau_xi()?;
            value(core::g_term(tau, xi)?)
        }
        "g_star" => {
            let (tau, xi) = tau_xi()?;
            value(core::g_star(tau, xi)?)
        }
        "choose_ray" => {
            let (tau, xi) = tau_xi()?;
            let branch = match p.side()? {
                Side::Minus => core::Branch::Minus,
                Side::Plus => core::Branch::Plus,
            };
            let ch = core::choose_ray(tau, xi, branch)?;
            vec![
                ("d".into(), format_sig(ch.d, 15)),
                ("sigma".into(), format_sig(ch.sigma, 15)),
                ("margin".into(), format_sig(ch.margin, 15)),
            ]
        }
        "p_ray" => {
            let (tau, xi) = tau_xi()?;
            let choice = core::RayChoice::for_direction(tau, xi, p.real("d")?);
            let mut lines = quad_meta(value(core::p_ray(tau, xi, choice, s)?), s);
            lines.push(("margin".into(), format_sig(choice.margin, 6)));
            lines
        }
        "p_minus" | "p_plus" => {
            let (tau, xi) = tau_xi()?;
            let branch = if *name == "p_minus" {
                core::Branch::Minus
            } else {
                core::Branch::Plus
            };
            let ch = core::choose_ray(tau, xi, branch)?;
            let mut lines = quad_meta(value(core::p_ray(tau, xi, ch, s)?), s);
            lines.push(("direction".into(), format_sig(ch.d, 6)));
            lines.push(("margin".into(), format_sig(ch.margin, 6)));
            lines
        }
        "p_contour_real" => {
            let r = match p.r.as_deref() {
                Some(_) => p.real("r")?,
                None => crate::verify::CONTOUR_RADIUS,
            };
            quad_meta(
                value(core::p_contour_real(
                    p.real("alpha")?,
                    p.real("nu")?,
                    r,
                    p.side()?,
                    s,
                )?),
                s,
            )
        }
        "m_stieltjes" => quad_meta(
            value(core::m_stieltjes(p.real("alpha")?, p.real("nu")?, s)?),
            s,
        ),
        "b_integral" => quad_meta(
            value(Complex64::new(
                core::b_integral(p.real("q")?, p.real("x")?, s)?,
                0.0,
            )),
            s,
        ),
        "asymptotic_b_series" => {
            let k_max = match p.k_max.as_deref() {
                Some(_) => p.integer("k_max")?,
                None => core::modular::ASYMPTOTIC_MAX_TERMS,
            };
            let a = core::asymptotic_b_series(p.real("q")?, p.real("x")?, k_max)?;
            vec![
                ("value".into(), format_sig(a.optimal_partial_sum(), 15)),
                ("optimal_index".into(), a.optimal_index.to_string()),
                ("optimal_error".into(), format_sig(a.optimal_error, 6)),
                ("terms".into(), a.coefficients.len().to_string()),
            ]
        }
        "stokes_sum" => {
            let (tau, xi) = tau_xi()?;
            let (v, t) = core::stokes_sum(tau, xi)?;
            truncation_meta(value(v), t)
        }
        "k_factor" => {
            let (tau, xi) = tau_xi()?;
            quad_meta(value(core::k_factor(&ModularPoint::new(tau, xi)?, s)?), s)
        }
        "xqmain_rhs" => {
            let (tau, xi) = tau_xi()?;
            quad_meta(value(core::xqmain_rhs(&ModularPoint::new(tau, xi)?, s)?), s)
        }
        _ => unreachable!("operation table and dispatch agree"),
    };
    let mut all = vec![("operation".to_string(), name.to_string())];
    all.extend(lines);
    let used: BTreeSet<&str> = allowed.iter().copied().collect();
    for (k, v) in p.provided() {
        if used.contains(k) {
            all.push((k.to_string(), v.to_string()));
        }
    }
    Ok(all)
}
