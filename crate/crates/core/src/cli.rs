//! Command-line front end. Every command writes one canonical JSON report
//! (or sweep CSV) and exits with 0 when all checks pass, 2 on configuration
//! errors and 3 on numerical failures.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hardy::{h_lambda, test_function, HardyFunction, TestFunction};
use crate::maps::{parse_scalar, Params};
use crate::operators::{
    classify_boundedness, empirical_norm_lower_bound, gamma_apply, norm_value, strong_continuity_probe, Boundedness,
    BoundednessVerdict,
};
use crate::report::{to_canonical_json, to_csv, SweepRow, SCHEMA_VERSION};
use crate::sampling;
use crate::semigroup::{
    continuity_halving_ratio, delta_limit, dw_point, family_lookup, generator, identity_residual, model_function,
    standard_times, verify_semigroup_law, GeneratorInfo, ModelKind, SemigroupFamily,
};
use crate::spectrum::{eigen_residual, lattice_defect, model_exponential, point_spectrum, NuGrid, Scan};
use crate::suite;
use crate::C64;

#[derive(Parser, Debug)]
#[command(name = "hardylab", version, about = "Composition semigroups on Hardy spaces of the upper half-plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full analysis of a family: generator, Denjoy-Wolff point, boundedness,
    /// norms, continuity and optionally the point spectrum.
    Analyze(RunArgs),
    /// Operator norms over (t, p) with empirical lower bounds.
    Norm(RunArgs),
    /// Semigroup law, identity at t = 0 and generator diagnostics.
    SemigroupCheck(RunArgs),
    /// Point spectrum of the generator.
    Spectrum(RunArgs),
    /// The acceptance suite.
    Suite(SuiteArgs),
    /// One row per value of a swept parameter.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Semigroup family name.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Exponent p, repeatable.
    #[arg(long = "p", allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// Time t, repeatable.
    #[arg(long = "t", allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Largest power k for an interior Denjoy-Wolff point.
    #[arg(long)]
    pub k_max: Option<u32>,
    /// `re_min:re_max:n,im_min:im_max:n` for a boundary Denjoy-Wolff point.
    #[arg(long, allow_hyphen_values = true)]
    pub nu_grid: Option<String>,
    /// Include the point spectrum in `analyze`.
    #[arg(long)]
    pub spectrum: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values; `a..b` expands to integers for `n`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SuiteArgs {
    /// Criterion id, repeatable; all criteria when absent.
    #[arg(long = "criterion")]
    pub criteria: Vec<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    T,
    P,
    N,
    Nu,
}

/// Default tolerances, all overridable through `--tol key=value`.
pub const DEFAULT_TOLERANCES: [(&str, f64); 10] = [
    ("continuity", 1e-2),
    ("eigen_residual", 1e-6),
    ("empirical_norm", 1e-3),
    ("flow_identity", 1e-5),
    ("generator", 1e-6),
    ("identity", 1e-12),
    ("norm_consistency", 1e-6),
    ("phi1_consistency", 1e-3),
    ("semigroup_law", 1e-9),
    ("sign", 1e-9),
];

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Option<(String, Params)>,
    pub ps: Vec<f64>,
    pub times: Vec<f64>,
    pub scan: Scan,
    pub with_spectrum: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerances: BTreeMap<String, f64>,
}

fn parse_key_value(text: &str, flag: &str) -> Result<(String, String)> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(Error::Config(format!("{flag} `{text}` is not KEY=VALUE"))),
    }
}

impl RunConfig {
    pub fn from_args(args: &RunArgs, default_format: Format) -> Result<Self> {
        let family = match &args.family {
            Some(name) => {
                let mut params = Params::new();
                for text in &args.params {
                    let (k, v) = parse_key_value(text, "--param")?;
                    let value = parse_scalar(&v).map_err(|e| Error::Config(format!("--param {k}: {e}")))?;
                    params.insert(&k, value);
                }
                Some((name.clone(), params))
            }
            None if !args.params.is_empty() => {
                return Err(Error::Config("--param given without --family".into()));
            }
            None => None,
        };
        let ps = if args.p.is_empty() { vec![2.0] } else { args.p.clone() };
        if let Some(p) = ps.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
            return Err(Error::Config(format!("--p must be positive and finite, got {p}")));
        }
        let times = if args.t.is_empty() { vec![1.0] } else { args.t.clone() };
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!("--t must be nonnegative and finite, got {t}")));
        }
        let scan = match (args.k_max, &args.nu_grid) {
            (Some(_), Some(_)) => return Err(Error::Config("--k-max and --nu-grid are exclusive".into())),
            (Some(k), None) => Scan::KMax(k),
            (None, Some(g)) => Scan::Nu(NuGrid::parse(g)?),
            (None, None) => Scan::Default,
        };
        let mut tolerances: BTreeMap<String, f64> =
            DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for text in &args.tol {
            let (k, v) = parse_key_value(text, "--tol")?;
            let slot = tolerances.get_mut(&k).ok_or_else(|| {
                let known: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|(k, _)| *k).collect();
                Error::Config(format!("unknown tolerance `{k}`; known: {}", known.join(", ")))
            })?;
            let value: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("--tol {k}: `{v}` is not a number")))?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(format!("--tol {k} must be positive, got {value}")));
            }
            *slot = value;
        }
        Ok(RunConfig {
            family,
            ps,
            times,
            with_spectrum: args.spectrum || args.k_max.is_some() || args.nu_grid.is_some(),
            scan,
            out: args.out.clone(),
            format: args.format.unwrap_or(default_format),
            tolerances,
        })
    }

    fn tol(&self, key: &str) -> f64 {
        self.tolerances[key]
    }

    fn semigroup(&self) -> Result<SemigroupFamily> {
        let (name, params) = self
            .family
            .as_ref()
            .ok_or_else(|| Error::Config("--family is required".into()))?;
        family_lookup(name, params)
    }

    fn p(&self) -> f64 {
        self.ps[0]
    }
}

/// A failed run: exit code, the operation that failed and why.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub operation: String,
    pub message: String,
}

impl Failure {
    fn new(operation: &str, e: Error) -> Self {
        let config = matches!(
            e,
            Error::Config(_) | Error::Param(_) | Error::UnknownFamily(_) | Error::UnknownCatalogEntry(_)
        );
        Failure {
            code: if config { 2 } else { 3 },
            kind: if config { "config" } else { "compute" },
            operation: operation.to_string(),
            message: e.to_string(),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn op<T>(operation: &str, r: Result<T>) -> Run<T> {
    r.map_err(|e| Failure::new(operation, e))
}

/// A measured value with its tolerance; passes when `measured <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportCheck {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Checks(Vec<ReportCheck>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.0.push(ReportCheck {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }

    fn failures(&self) -> Vec<String> {
        self.0.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub failures: Vec<String>,
}

fn finish(command: &str, cfg: &RunConfig, mut body: Value, checks: Checks) -> Run<Output> {
    let failures = checks.failures();
    let obj = body.as_object_mut().expect("report body is an object");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert("checks".into(), json!(checks.0));
    obj.insert("failures".into(), json!(failures));
    obj.insert("passed".into(), json!(failures.is_empty()));
    obj.insert("tolerances".into(), json!(cfg.tolerances));
    if let Some((name, params)) = &cfg.family {
        obj.insert("family".into(), json!({"name": name, "params": params}));
    }
    Ok(Output {
        text: op("serialize report", to_canonical_json(&body))?,
        failures,
    })
}

fn require_json(cfg: &RunConfig, command: &str) -> Run<()> {
    if cfg.format == Format::Csv {
        return Err(Failure::new(
            command,
            Error::Config(format!("`{command}` writes JSON only; CSV is for sweeps")),
        ));
    }
    Ok(())
}

fn continuity_function(p: f64) -> HardyFunction {
    if p > 1.0 {
        h_lambda(-1.0)
    } else {
        h_lambda(-2.0)
    }
}

fn generator_summary(info: &GeneratorInfo, checks: &mut Checks, cfg: &RunConfig) -> Value {
    if let Some(r) = info.diagnostics.closed_form_residual {
        checks.push("generator: numeric vs closed form", r, cfg.tol("generator"));
    }
    checks.push(
        "generator: flow identity",
        info.diagnostics.flow_identity_residual,
        cfg.tol("flow_identity"),
    );
    let sign = info.sign_check();
    if let Some(s) = &sign {
        checks.push(format!("sign: {}", s.condition), (-s.min_imag).max(0.0), cfg.tol("sign"));
    }
    json!({
        "closed_form": info.closed_form,
        "diagnostics": info.diagnostics,
        "sign_check": sign,
    })
}

fn norm_table(v: &BoundednessVerdict, cfg: &RunConfig, checks: &mut Checks) -> Vec<Value> {
    let mut rows = Vec::new();
    for &t in &cfg.times {
        for &p in &cfg.ps {
            let norm = v.norm_at(t, p);
            let from_delta = v.norm_from_delta(t, p);
            if let (Some(a), Some(b)) = (norm, from_delta) {
                checks.push(
                    format!("norm consistency at t = {t}, p = {p}"),
                    (a - b).abs() / a,
                    cfg.tol("norm_consistency"),
                );
            }
            rows.push(json!({"t": t, "p": p, "norm": norm, "norm_from_delta": from_delta}));
        }
    }
    rows
}

fn analyze(cfg: &RunConfig) -> Run<Output> {
    require_json(cfg, "analyze")?;
    let fam = op("family_lookup", cfg.semigroup())?;
    let p = cfg.p();
    let mut checks = Checks::default();
    let law = verify_semigroup_law(&fam, &sampling::standard_grid(), &standard_times());
    checks.push("semigroup law", law, cfg.tol("semigroup_law"));
    let mut info = op("generator", generator(&fam))?;
    let gen = generator_summary(&info, &mut checks, cfg);
    let (delta, delta_note) = if fam.is_trivial() {
        (Some(0.0), None)
    } else {
        match delta_limit(&mut info) {
            Ok(d) => (Some(d.delta), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let verdict = op("classify_boundedness", classify_boundedness(&fam, p))?;
    if let Some(c) = verdict.consistency {
        checks.push("phi_1'(inf) vs e^delta", c, cfg.tol("phi1_consistency"));
    }
    let bounded = verdict.verdict == Boundedness::Bounded;
    let table = if bounded { norm_table(&verdict, cfg, &mut checks) } else { Vec::new() };
    let norm = table.first().map(|r| r["norm"].clone()).unwrap_or(Value::Null);
    let continuity = if bounded && p >= 1.0 {
        let f = continuity_function(p);
        let ts = [1.0, 0.1, 0.01, 0.001];
        let residuals = op("strong_continuity_probe", strong_continuity_probe(&fam, &f, p, &ts))?;
        let size = op("hardy_norm", norm_value(&f, p))?;
        let ratio = residuals[3] / size;
        checks.push(format!("continuity: ||T_0.001 f - f|| / ||f||, f = {}", f.label()), ratio, cfg.tol("continuity"));
        json!({"function": f.label(), "times": ts, "residuals": residuals, "norm": size})
    } else {
        Value::Null
    };
    let spectrum = if cfg.with_spectrum {
        let r = op("point_spectrum", point_spectrum(&fam, p, &cfg.scan))?;
        for (k, res) in r.residuals.iter().enumerate() {
            checks.push(
                format!("eigen residual for {}", r.sigma_pi[k]),
                res.ode.max(res.flow),
                cfg.tol("eigen_residual"),
            );
        }
        json!(r)
    } else {
        Value::Null
    };
    let body = json!({
        "p": cfg.ps,
        "t": cfg.times,
        "dw": info.dw.map(|d| json!(d)).unwrap_or(json!("none")),
        "delta": delta,
        "delta_note": delta_note,
        "phi1_inf": verdict.phi1(),
        "generator": gen,
        "boundedness": verdict,
        "verdict": verdict.verdict,
        "norm": norm,
        "norm_table": table,
        "continuity": continuity,
        "spectrum": spectrum,
    });
    finish("analyze", cfg, body, checks)
}

fn empirical_set(p: f64) -> Result<Vec<HardyFunction>> {
    let mut set = vec![
        h_lambda(-2.0 / p),
        test_function(TestFunction::En { n: 1, p })?,
        test_function(TestFunction::En { n: 2, p })?,
    ];
    if p == 2.0 {
        set.push(test_function(TestFunction::Kernel(crate::I))?);
    }
    Ok(set)
}

fn norm_command(cfg: &RunConfig) -> Run<Output> {
    require_json(cfg, "norm")?;
    let fam = op("family_lookup", cfg.semigroup())?;
    let mut checks = Checks::default();
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &p in &cfg.ps {
        let v = op("classify_boundedness", classify_boundedness(&fam, p))?;
        if v.verdict == Boundedness::Bounded {
            let set = op("test_function", empirical_set(p))?;
            for &t in &cfg.times {
                let norm = v.norm_at(t, p).expect("bounded");
                let emp = op("empirical_norm_lower_bound", empirical_norm_lower_bound(&fam, p, t, &set))?;
                checks.push(
                    format!("empirical ratio at t = {t}, p = {p}"),
                    emp.max_ratio / norm - 1.0,
                    cfg.tol("empirical_norm"),
                );
                if let Some(d) = v.norm_from_delta(t, p) {
                    checks.push(
                        format!("norm consistency at t = {t}, p = {p}"),
                        (norm - d).abs() / norm,
                        cfg.tol("norm_consistency"),
                    );
                }
                rows.push(json!({"t": t, "p": p, "norm": norm, "norm_from_delta": v.norm_from_delta(t, p), "empirical": emp}));
            }
        }
        verdicts.push(json!({"p": p, "boundedness": v}));
    }
    finish("norm", cfg, json!({"norm_table": rows, "verdicts": verdicts}), checks)
}

fn semigroup_check(cfg: &RunConfig) -> Run<Output> {
    require_json(cfg, "semigroup-check")?;
    let fam = op("family_lookup", cfg.semigroup())?;
    let grid = sampling::standard_grid();
    let mut checks = Checks::default();
    checks.push("semigroup law", verify_semigroup_law(&fam, &grid, &standard_times()), cfg.tol("semigroup_law"));
    checks.push("identity at t = 0", identity_residual(&fam, &grid), cfg.tol("identity"));
    let info = op("generator", generator(&fam))?;
    let gen = generator_summary(&info, &mut checks, cfg);
    let dw = if fam.is_trivial() { json!("none") } else { json!(op("dw_point", dw_point(&fam))?) };
    let body = json!({
        "dw": dw,
        "generator": gen,
        "continuity_halving_ratio": continuity_halving_ratio(&fam, &grid, 1e-2),
    });
    finish("semigroup-check", cfg, body, checks)
}

fn spectrum_command(cfg: &RunConfig) -> Run<Output> {
    require_json(cfg, "spectrum")?;
    let fam = op("family_lookup", cfg.semigroup())?;
    let r = op("point_spectrum", point_spectrum(&fam, cfg.p(), &cfg.scan))?;
    let mut checks = Checks::default();
    for (k, res) in r.residuals.iter().enumerate() {
        checks.push(format!("eigen residual for {}", r.sigma_pi[k]), res.ode.max(res.flow), cfg.tol("eigen_residual"));
    }
    if let ModelKind::Koenigs { multiplier } = r.model {
        checks.push("lattice defect", lattice_defect(multiplier, &r.sigma_pi), cfg.tol("eigen_residual"));
    }
    finish("spectrum", cfg, json!({"p": cfg.p(), "spectrum": r}), checks)
}

fn expand_values(axis: Axis, raw: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for v in raw.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        match (axis, v.split_once("..")) {
            (Axis::N, Some((a, b))) => {
                let bad = || Error::Config(format!("bad range `{v}`"));
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend((a..=b).map(|n| n.to_string()));
            }
            _ => out.push(v.to_string()),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("sweep axis has no values".into()));
    }
    Ok(out)
}

fn parse_real(v: &str, what: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("{what} value `{v}` is not a finite number")))
}

fn bounded_verdict(fam: &SemigroupFamily, p: f64) -> Run<BoundednessVerdict> {
    let v = op("classify_boundedness", classify_boundedness(fam, p))?;
    if v.verdict != Boundedness::Bounded {
        return Err(Failure::new("classify_boundedness", Error::UnboundedOperator));
    }
    Ok(v)
}

fn sweep_rows(cfg: &RunConfig, axis: Axis, values: &[String]) -> Run<Vec<SweepRow>> {
    let fam = op("family_lookup", cfg.semigroup())?;
    let cfg_err = |e: Error| Failure::new("sweep", e);
    let nan = f64::NAN;
    let mut rows = Vec::with_capacity(values.len());
    match axis {
        Axis::T => {
            let p = cfg.p();
            let v = bounded_verdict(&fam, p)?;
            for s in values {
                let t = parse_real(s, "t").map_err(cfg_err)?;
                if t < 0.0 {
                    return Err(cfg_err(Error::Config(format!("t must be nonnegative, got {t}"))));
                }
                rows.push(SweepRow::new(s.clone(), v.norm_at(t, p).unwrap_or(nan), v.norm_from_delta(t, p).unwrap_or(nan)));
            }
        }
        Axis::P => {
            let t = cfg.times[0];
            for s in values {
                let p = parse_real(s, "p").map_err(cfg_err)?;
                if !(p > 0.0) {
                    return Err(cfg_err(Error::Config(format!("p must be positive, got {p}"))));
                }
                let v = bounded_verdict(&fam, p)?;
                rows.push(SweepRow::new(s.clone(), v.norm_at(t, p).unwrap_or(nan), v.norm_from_delta(t, p).unwrap_or(nan)));
            }
        }
        Axis::N => {
            let p = cfg.p();
            if p < 1.0 {
                return Err(cfg_err(Error::Config(format!("the n sweep needs p >= 1, got {p}"))));
            }
            let info = op("generator", generator(&fam))?;
            let omega = op("test_function", test_function(TestFunction::Omega { p }))?;
            let g_omega = op("hardy_norm", norm_value(&gamma_apply(&info, &omega), p))?;
            for s in values {
                let n: u32 = s
                    .parse()
                    .map_err(|_| cfg_err(Error::Config(format!("n value `{s}` is not a nonnegative integer"))))?;
                let e = op("test_function", test_function(TestFunction::En { n, p }))?;
                let measured = op("hardy_norm", norm_value(&gamma_apply(&info, &e), p))?;
                rows.push(SweepRow::new(s.clone(), measured, n as f64 / PI.powf(1.0 / p) * g_omega));
            }
        }
        Axis::Nu => {
            let model = op("model_function", model_function(&fam))?;
            let ModelKind::Abel { step } = model.kind else {
                return Err(cfg_err(Error::Config("the nu sweep needs a boundary Denjoy-Wolff point".into())));
            };
            let grid = sampling::interior_grid(9);
            for s in values {
                let nu: C64 = parse_scalar(s).map_err(|e| cfg_err(Error::Config(format!("nu value: {e}"))))?;
                let f = model_exponential(&model, nu);
                let r = op("eigen_residual", eigen_residual(&fam, &f, step * nu, &grid, &[0.25, 1.0]))?;
                rows.push(SweepRow::new(s.clone(), r.ode.max(r.flow), 0.0));
            }
        }
    }
    Ok(rows)
}

fn sweep(cfg: &RunConfig, args: &SweepArgs) -> Run<Output> {
    let values = expand_values(args.axis, &args.values).map_err(|e| Failure::new("sweep", e))?;
    let rows = sweep_rows(cfg, args.axis, &values)?;
    match cfg.format {
        Format::Csv => Ok(Output {
            text: to_csv(&rows),
            failures: Vec::new(),
        }),
        Format::Json => finish("sweep", cfg, json!({"axis": args.axis, "rows": rows}), Checks::default()),
    }
}

fn suite_command(args: &SuiteArgs) -> Run<Output> {
    let ids: Vec<u32> = if args.criteria.is_empty() {
        suite::CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        args.criteria.clone()
    };
    let mut results = Vec::with_capacity(ids.len());
    for id in ids {
        let r = op("suite", suite::run(id))?;
        eprintln!("{}", r.line());
        results.push(r);
    }
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {}: {}", r.id, r.title))
        .collect();
    let body = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "suite",
        "seed": sampling::seed(),
        "results": results,
        "failures": failures,
        "passed": failures.is_empty(),
    });
    Ok(Output {
        text: op("serialize report", to_canonical_json(&body))?,
        failures,
    })
}

/// Runs a parsed command line and returns its output.
pub fn execute(cli: &Cli) -> Run<Output> {
    op("seed", sampling::seed_from_env())?;
    let config = |args: &RunArgs, format: Format| op("config", RunConfig::from_args(args, format));
    match &cli.command {
        Command::Analyze(a) => analyze(&config(a, Format::Json)?),
        Command::Norm(a) => norm_command(&config(a, Format::Json)?),
        Command::SemigroupCheck(a) => semigroup_check(&config(a, Format::Json)?),
        Command::Spectrum(a) => spectrum_command(&config(a, Format::Json)?),
        Command::Suite(a) => suite_command(a),
        Command::Sweep(a) => sweep(&config(&a.run, Format::Csv)?, a),
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Analyze(a) | Command::Norm(a) | Command::SemigroupCheck(a) | Command::Spectrum(a) => a.out.as_ref(),
        Command::Sweep(a) => a.run.out.as_ref(),
        Command::Suite(a) => a.out.as_ref(),
    }
}

/// Runs the command line, writes the output and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = execute(cli).and_then(|out| {
        match out_path(cli) {
            Some(path) => std::fs::write(path, &out.text)
                .map_err(|e| Failure::new("write output", Error::Io(format!("{}: {e}", path.display()))))?,
            None => print!("{}", out.text),
        }
        Ok(out)
    });
    match result {
        Ok(out) if out.failures.is_empty() => 0,
        Ok(out) => {
            eprintln!("{}", json!({"failures": out.failures}));
            3
        }
        Err(f) => {
            eprintln!("{}", json!({"error": f}));
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hardylab").chain(args.iter().copied())).unwrap()
    }

    fn run_args(cli: &Cli) -> &RunArgs {
        match &cli.command {
            Command::Analyze(a) => a,
            _ => panic!("not analyze"),
        }
    }

    #[test]
    fn config_parsing() {
        let cli = parse(&["analyze", "--family", "translation", "--param", "b=1+i", "--p", "2", "--t", "0.5", "--t", "1"]);
        let cfg = RunConfig::from_args(run_args(&cli), Format::Json).unwrap();
        assert_eq!(cfg.times, vec![0.5, 1.0]);
        let (_, params) = cfg.family.unwrap();
        assert_eq!(params.get("b"), Some(C64::new(1.0, 1.0)));
        assert_eq!(cfg.tolerances["semigroup_law"], 1e-9);
    }

    #[test]
    fn config_errors() {
        for args in [
            vec!["analyze", "--family", "dilation", "--p", "-1"],
            vec!["analyze", "--family", "dilation", "--t", "-0.5"],
            vec!["analyze", "--family", "dilation", "--tol", "nonsense=1"],
            vec!["analyze", "--family", "dilation", "--tol", "sign=0"],
            vec!["analyze", "--family", "dilation", "--param", "c"],
            vec!["analyze", "--param", "c=1"],
            vec!["analyze", "--family", "dilation", "--k-max", "3", "--nu-grid", "0:1:2,0:1:2"],
        ] {
            let cli = parse(&args);
            assert!(matches!(RunConfig::from_args(run_args(&cli), Format::Json), Err(Error::Config(_))), "{args:?}");
        }
    }

    #[test]
    fn tolerance_override() {
        let cli = parse(&["analyze", "--family", "dilation", "--tol", "generator=1e-3"]);
        let cfg = RunConfig::from_args(run_args(&cli), Format::Json).unwrap();
        assert_eq!(cfg.tolerances["generator"], 1e-3);
    }

    #[test]
    fn sweep_values() {
        assert_eq!(expand_values(Axis::N, &["1..3".into(), "7".into()]).unwrap(), ["1", "2", "3", "7"]);
        assert!(matches!(expand_values(Axis::T, &[]), Err(Error::Config(_))));
        assert!(matches!(expand_values(Axis::T, &["".into()]), Err(Error::Config(_))));
    }

    #[test]
    fn failures_are_classified() {
        assert_eq!(Failure::new("x", Error::UnknownFamily("q".into())).code, 2);
        assert_eq!(Failure::new("x", Error::UnboundedOperator).code, 3);
    }
}
