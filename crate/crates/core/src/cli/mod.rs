//! Command-line front end: flag parsing, config merging, dispatch, and
//! CSV/JSON emission.
//!
//! Data files are deterministic: floats print with 17 significant digits
//! so downstream checks can re-verify tolerances, and run metadata goes to
//! a `<out>.meta.json` sidecar instead of the data file.

mod config;

pub use config::{
    Command, ConstraintConfig, EngineConfig, OutputFormat, RawConfig, RunConfig, SweepAxis,
    SweepSpec,
};

use crate::cycle::{beta2_correction, exact_cycle, ultra_hot_work, EngineSpec};
use crate::optimizer::{maximize_work, solve_eh, OptimizationProblem, OptimizationResult};
use crate::spectra::{CompressionDeviation, Spectrum};
use crate::universality::{
    a_bounds_check, classical_comparators, expansion_coeffs, fit_expansion, order_changing_check,
    ABoundsClass,
};
use crate::{Error, Result};
use clap::Parser;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "ultrahot",
    version,
    about = "Quantum Otto engine work and efficiency in the ultra-hot regime"
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Option<CliCommand>,

    /// Command as a flag (equivalent to the subcommand or the file's
    /// `command =` key).
    #[arg(long = "command", global = true, value_name = "COMMAND")]
    pub command_flag: Option<String>,

    /// Flat key = value config file; flags override file keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output path (stdout when absent). A `<out>.meta.json` sidecar
    /// carries the resolved run parameters.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Hot spectrum levels, comma separated (e.g. "-1, 0, 1").
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub levels: Option<String>,

    /// Cold spectrum levels; alternative to --chi.
    #[arg(long = "cold-levels", global = true, allow_hyphen_values = true)]
    pub cold_levels: Option<String>,

    /// Compression deviation; cold = (1-chi) * hot.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub chi: Option<f64>,

    /// Cold inverse temperature.
    #[arg(long = "beta-c", global = true)]
    pub beta_c: Option<f64>,

    /// Hot inverse temperature.
    #[arg(long = "beta-h", global = true)]
    pub beta_h: Option<f64>,

    /// Cold temperature; alternative to --beta-c.
    #[arg(long = "t-c", global = true)]
    pub t_c: Option<f64>,

    /// Hot temperature; alternative to --beta-h.
    #[arg(long = "t-h", global = true)]
    pub t_h: Option<f64>,

    /// Swap strength in (0, 1].
    #[arg(long, global = true)]
    pub xi: Option<f64>,

    /// Constraint expression over Ec and Eh, e.g. "Ec*Eh".
    #[arg(long, global = true)]
    pub constraint: Option<String>,

    /// Named constraint preset (hot_norm, cold_norm, product, alpha_linear,
    /// d_linear, s_linear, inverse_sum); alternative to --constraint.
    #[arg(long, global = true)]
    pub preset: Option<String>,

    /// Constraint constant G(|Ec|, |Eh|) = g0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub g0: Option<f64>,

    /// Carnot efficiency; derived from the temperatures when omitted.
    #[arg(long = "eta-c", global = true)]
    pub eta_c: Option<f64>,

    /// Constraint parameter binding, name=value (repeatable).
    #[arg(long = "param", global = true)]
    pub params: Vec<String>,

    /// Sweep variable: eta_c, g0, beta_c, chi, xi.
    #[arg(long, global = true)]
    pub axis: Option<String>,

    /// Sweep start.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub from: Option<f64>,

    /// Sweep end (inclusive).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub to: Option<f64>,

    /// Sweep point count (>= 2).
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Geometric instead of linear sweep spacing.
    #[arg(long, global = true)]
    pub log: bool,

    /// Sweep target command (simulate or optimize); inferred from the
    /// axis when omitted.
    #[arg(long, global = true)]
    pub target: Option<String>,

    /// Cold bath relaxation scale for the classical comparison.
    #[arg(long = "sigma-c", global = true)]
    pub sigma_c: Option<f64>,

    /// Hot bath relaxation scale for the classical comparison.
    #[arg(long = "sigma-h", global = true)]
    pub sigma_h: Option<f64>,

    /// Override the constraint root-solve tolerance.
    #[arg(long = "tol-root", global = true)]
    pub tol_root: Option<f64>,

    /// Override the stationarity tolerance.
    #[arg(long = "tol-residual", global = true)]
    pub tol_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::Subcommand)]
pub enum CliCommand {
    /// One exact cycle next to the leading-order and corrected work.
    Simulate,
    /// Maximize work over chi under the constraint.
    Optimize,
    /// Expansion coefficients, analytic and fitted.
    Expand,
    /// One row per point of a parameter sweep.
    Sweep,
    /// Quantum optimum vs the classical comparison values per eta_c.
    Compare,
}

impl CliCommand {
    fn name(self) -> &'static str {
        match self {
            CliCommand::Simulate => "simulate",
            CliCommand::Optimize => "optimize",
            CliCommand::Expand => "expand",
            CliCommand::Sweep => "sweep",
            CliCommand::Compare => "compare",
        }
    }
}

/// Merges the config file (when given) and the flags into one raw key
/// set, flags taking precedence, then validates into a [`RunConfig`].
pub fn load_config(args: &CliArgs) -> Result<RunConfig> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if let Some(cmd) = &args.command_flag {
        raw.command = Some(cmd.clone());
    }
    if let Some(cmd) = args.command {
        raw.command = Some(cmd.name().to_string());
    }
    let f64_flags = [
        ("chi", args.chi),
        ("beta_c", args.beta_c),
        ("beta_h", args.beta_h),
        ("t_c", args.t_c),
        ("t_h", args.t_h),
        ("xi", args.xi),
        ("g0", args.g0),
        ("eta_c", args.eta_c),
        ("from", args.from),
        ("to", args.to),
        ("sigma_c", args.sigma_c),
        ("sigma_h", args.sigma_h),
        ("tol_root", args.tol_root),
        ("tol_residual", args.tol_residual),
    ];
    for (key, value) in f64_flags {
        if let Some(v) = value {
            raw.set(key, v.to_string());
        }
    }
    let string_flags = [
        ("levels", &args.levels),
        ("cold_levels", &args.cold_levels),
        ("constraint", &args.constraint),
        ("preset", &args.preset),
        ("axis", &args.axis),
        ("target", &args.target),
        ("format", &args.format),
    ];
    for (key, value) in string_flags {
        if let Some(v) = value {
            raw.set(key, v.clone());
        }
    }
    if let Some(v) = args.points {
        raw.set("points", v.to_string());
    }
    if args.log {
        raw.set("log", "true".to_string());
    }
    if let Some(v) = &args.out {
        raw.set("out", v.display().to_string());
    }
    for p in &args.params {
        let Some((name, value)) = p.split_once('=') else {
            return Err(Error::Config(format!(
                "--param wants name=value, got '{p}'"
            )));
        };
        raw.set(&format!("param.{}", name.trim()), value.trim().to_string());
    }
    raw.resolve()
}

/// Rendered run artifacts: the data payload and the metadata sidecar.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub data: String,
    pub meta: String,
}

/// Full-precision float formatting; 17 significant digits round-trip f64
/// exactly.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_f64(v),
        None => "nan".to_string(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

trait Row: Serialize {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

#[derive(Debug, Clone, Serialize)]
struct SimulateRow {
    chi: f64,
    beta_c: f64,
    beta_h: f64,
    xi: f64,
    n: usize,
    work_exact: f64,
    work_ultra: f64,
    work_corrected: f64,
    q_hot: f64,
    q_cold: f64,
    eta_exact: Option<f64>,
}

impl Row for SimulateRow {
    fn header() -> &'static [&'static str] {
        &[
            "chi",
            "beta_c",
            "beta_h",
            "xi",
            "N",
            "work_exact",
            "work_ultra",
            "work_corrected",
            "q_hot",
            "q_cold",
            "eta_exact",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            fmt_f64(self.chi),
            fmt_f64(self.beta_c),
            fmt_f64(self.beta_h),
            fmt_f64(self.xi),
            self.n.to_string(),
            fmt_f64(self.work_exact),
            fmt_f64(self.work_ultra),
            fmt_f64(self.work_corrected),
            fmt_f64(self.q_hot),
            fmt_f64(self.q_cold),
            fmt_opt(self.eta_exact),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
struct OptimizeRow {
    constraint: String,
    g0: f64,
    eta_c: f64,
    chi_star: f64,
    eta_star: f64,
    eh_star: f64,
    work_star: f64,
    residual: f64,
    converged: bool,
}

impl Row for OptimizeRow {
    fn header() -> &'static [&'static str] {
        &[
            "constraint",
            "g0",
            "eta_c",
            "chi_star",
            "eta_star",
            "eh_star",
            "work_star",
            "residual",
            "converged",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            csv_escape(&self.constraint),
            fmt_f64(self.g0),
            fmt_f64(self.eta_c),
            fmt_f64(self.chi_star),
            fmt_f64(self.eta_star),
            fmt_f64(self.eh_star),
            fmt_f64(self.work_star),
            fmt_f64(self.residual),
            self.converged.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
struct ExpandRow {
    constraint: String,
    a_analytic: Option<f64>,
    b_analytic: Option<f64>,
    a_fit: Option<f64>,
    b_fit: Option<f64>,
    symmetric: bool,
    order_changing: bool,
    classification: Option<String>,
}

impl Row for ExpandRow {
    fn header() -> &'static [&'static str] {
        &[
            "constraint",
            "a_analytic",
            "b_analytic",
            "a_fit",
            "b_fit",
            "symmetric",
            "order_changing",
            "classification",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            csv_escape(&self.constraint),
            fmt_opt(self.a_analytic),
            fmt_opt(self.b_analytic),
            fmt_opt(self.a_fit),
            fmt_opt(self.b_fit),
            self.symmetric.to_string(),
            self.order_changing.to_string(),
            self.classification.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow {
    eta_c: f64,
    eta_star: f64,
    eta_ld_low: f64,
    eta_ld_high: f64,
    eta_ca: f64,
    ld_quadratic_coeff: f64,
    exceeds_ld_high: bool,
}

impl Row for CompareRow {
    fn header() -> &'static [&'static str] {
        &[
            "eta_c",
            "eta_star",
            "eta_ld_low",
            "eta_ld_high",
            "eta_ca",
            "ld_quadratic_coeff",
            "exceeds_ld_high",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            fmt_f64(self.eta_c),
            fmt_f64(self.eta_star),
            fmt_f64(self.eta_ld_low),
            fmt_f64(self.eta_ld_high),
            fmt_f64(self.eta_ca),
            fmt_f64(self.ld_quadratic_coeff),
            self.exceeds_ld_high.to_string(),
        ]
    }
}

fn render<T: Row>(rows: &[T], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(&T::header().join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.record().join(","));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows)
                .map_err(|e| Error::Config(format!("json serialization: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn build_engine(cfg: &RunConfig) -> Result<(EngineSpec, f64)> {
    let engine = &cfg.engine;
    let levels = engine
        .levels
        .as_ref()
        .ok_or_else(|| Error::Config("simulate needs 'levels'".into()))?;
    let hot = Spectrum::from_raw(levels)?;
    let (beta_c, beta_h) = match (engine.beta_c, engine.beta_h) {
        (Some(bc), Some(bh)) => (bc, bh),
        _ => {
            return Err(Error::Config(
                "simulate needs beta_c/beta_h (or t_c/t_h)".into(),
            ))
        }
    };
    let (cold, chi_col) = match (engine.chi, &engine.cold_levels) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("give chi or cold_levels, not both".into()))
        }
        (Some(chi), None) => (hot.compress(CompressionDeviation::new(chi))?, chi),
        (None, Some(cold_levels)) => {
            let cold = Spectrum::from_raw(cold_levels)?;
            let chi_col = if hot.norm_sq() > 0.0 {
                1.0 - cold.norm() / hot.norm()
            } else {
                f64::NAN
            };
            (cold, chi_col)
        }
        (None, None) => return Err(Error::Config("simulate needs chi or cold_levels".into())),
    };
    Ok((
        EngineSpec::new(hot, cold, beta_c, beta_h, engine.xi)?,
        chi_col,
    ))
}

fn simulate_row(engine: &EngineSpec, chi_col: f64) -> Result<SimulateRow> {
    let cycle = exact_cycle(engine)?;
    let work_ultra = ultra_hot_work(engine);
    let correction = beta2_correction(engine);
    Ok(SimulateRow {
        chi: chi_col,
        beta_c: engine.beta_c(),
        beta_h: engine.beta_h(),
        xi: engine.xi(),
        n: engine.n_levels(),
        work_exact: cycle.work,
        work_ultra,
        work_corrected: work_ultra + correction,
        q_hot: cycle.q_hot,
        q_cold: cycle.q_cold,
        eta_exact: cycle.efficiency,
    })
}

fn optimization_problem(cfg: &RunConfig, eta_c: f64, g0: f64) -> Result<OptimizationProblem> {
    let cc = cfg
        .constraint
        .as_ref()
        .ok_or_else(|| Error::Config("optimize needs a constraint (or preset)".into()))?;
    let n_levels = cfg.engine.levels.as_ref().map(|l| l.len()).unwrap_or(2);
    let problem = OptimizationProblem::new(cc.expr.clone(), g0, eta_c)?.with_engine_params(
        cfg.engine.beta_c.unwrap_or(1.0),
        cfg.engine.xi,
        n_levels,
    );
    Ok(OptimizationProblem {
        tol: cfg.tol.clone(),
        ..problem
    })
}

fn optimize_row(cfg: &RunConfig, eta_c: f64, g0: f64) -> Result<OptimizeRow> {
    let cc = cfg
        .constraint
        .as_ref()
        .expect("checked by optimization_problem");
    let problem = optimization_problem(cfg, eta_c, g0)?;
    let r: OptimizationResult = maximize_work(&problem)?;
    Ok(OptimizeRow {
        constraint: cc.label.clone(),
        g0,
        eta_c,
        chi_star: r.chi_star,
        eta_star: r.eta_star,
        eh_star: r.eh_star,
        work_star: r.work_star,
        residual: r.residual,
        converged: r.converged,
    })
}

fn expand_row(cfg: &RunConfig) -> Result<ExpandRow> {
    let cc = cfg
        .constraint
        .as_ref()
        .ok_or_else(|| Error::Config("expand needs a constraint (or preset)".into()))?;
    let order = order_changing_check(&cc.expr, cfg.eta_c);
    if order.order_changing {
        return Ok(ExpandRow {
            constraint: cc.label.clone(),
            a_analytic: None,
            b_analytic: None,
            a_fit: None,
            b_fit: None,
            symmetric: false,
            order_changing: true,
            classification: None,
        });
    }
    // reference |Eh| is the chi = 0 solve for this g0; eta_c only matters
    // for problem validation here, so default it when absent
    let probe = OptimizationProblem {
        tol: cfg.tol.clone(),
        ..OptimizationProblem::new(cc.expr.clone(), cc.g0, cfg.eta_c.unwrap_or(0.5))?
    };
    let reference_eh = solve_eh(&probe, 0.0)?;
    let coeffs = expansion_coeffs(&cc.expr, reference_eh)?;
    let bounds = a_bounds_check(&cc.expr, reference_eh)?;
    let (a_fit, b_fit) = fit_expansion(&cc.expr, cc.g0)?;
    Ok(ExpandRow {
        constraint: cc.label.clone(),
        a_analytic: Some(coeffs.a),
        b_analytic: coeffs.b,
        a_fit: Some(a_fit),
        b_fit: Some(b_fit),
        symmetric: coeffs.symmetric,
        order_changing: false,
        classification: Some(
            match bounds.class {
                ABoundsClass::Symmetric => "symmetric",
                ABoundsClass::SameSign => "same_sign",
                ABoundsClass::OppositeSign => "opposite_sign",
            }
            .to_string(),
        ),
    })
}

fn sweep_rows(cfg: &RunConfig) -> Result<RunOutput> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs --axis/--from/--to/--points".into()))?;
    let values = spec.values()?;
    match spec.target {
        Command::Optimize => {
            let mut rows = Vec::with_capacity(values.len());
            for &v in &values {
                let (eta_c, g0) = match spec.axis {
                    SweepAxis::EtaC => (v, required_g0(cfg)?),
                    SweepAxis::G0 => (required_eta_c(cfg)?, v),
                    other => {
                        return Err(Error::Config(format!(
                            "axis {} cannot target optimize",
                            other.name()
                        )))
                    }
                };
                rows.push(optimize_row(cfg, eta_c, g0)?);
            }
            Ok(RunOutput {
                data: render(&rows, cfg.format)?,
                meta: meta_json(cfg),
            })
        }
        Command::Simulate => {
            let mut rows = Vec::with_capacity(values.len());
            for &v in &values {
                let mut point = cfg.clone();
                match spec.axis {
                    SweepAxis::BetaC => {
                        let (bc, bh) = match (cfg.engine.beta_c, cfg.engine.beta_h) {
                            (Some(bc), Some(bh)) => (bc, bh),
                            _ => {
                                return Err(Error::Config(
                                    "beta_c sweep needs base beta_c/beta_h for the ratio".into(),
                                ))
                            }
                        };
                        point.engine.beta_c = Some(v);
                        point.engine.beta_h = Some(v * bh / bc);
                    }
                    SweepAxis::Chi => {
                        if cfg.engine.cold_levels.is_some() {
                            return Err(Error::Config(
                                "chi sweep conflicts with cold_levels".into(),
                            ));
                        }
                        point.engine.chi = Some(v);
                    }
                    SweepAxis::Xi => point.engine.xi = v,
                    other => {
                        return Err(Error::Config(format!(
                            "axis {} cannot target simulate",
                            other.name()
                        )))
                    }
                }
                let (engine, chi_col) = build_engine(&point)?;
                rows.push(simulate_row(&engine, chi_col)?);
            }
            Ok(RunOutput {
                data: render(&rows, cfg.format)?,
                meta: meta_json(cfg),
            })
        }
        other => Err(Error::Config(format!(
            "sweep target {} unsupported",
            other.name()
        ))),
    }
}

fn compare_rows(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = match &cfg.sweep {
        Some(spec) if spec.axis == SweepAxis::EtaC => spec.values()?,
        Some(_) => return Err(Error::Config("compare sweeps eta_c only".into())),
        None => (1..=19).map(|k| 0.05 * k as f64).collect(),
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &eta_c in &grid {
        let row = optimize_row(cfg, eta_c, required_g0(cfg)?)?;
        let classical = classical_comparators(eta_c, cfg.sigma_c, cfg.sigma_h)?;
        rows.push(CompareRow {
            eta_c,
            eta_star: row.eta_star,
            eta_ld_low: classical.eta_ld_low,
            eta_ld_high: classical.eta_ld_high,
            eta_ca: classical.eta_ca,
            ld_quadratic_coeff: classical.ld_quadratic_coeff,
            exceeds_ld_high: row.eta_star > classical.eta_ld_high,
        });
    }
    Ok(RunOutput {
        data: render(&rows, cfg.format)?,
        meta: meta_json(cfg),
    })
}

fn required_g0(cfg: &RunConfig) -> Result<f64> {
    match cfg.constraint.as_ref().map(|c| c.g0) {
        Some(g0) if g0.is_finite() => Ok(g0),
        _ => Err(Error::Config("needs a constraint with g0".into())),
    }
}

fn required_eta_c(cfg: &RunConfig) -> Result<f64> {
    cfg.eta_c
        .ok_or_else(|| Error::Config("needs eta_c (directly or via temperatures)".into()))
}

fn meta_json(cfg: &RunConfig) -> String {
    let mut meta = serde_json::Map::new();
    meta.insert("command".into(), cfg.command.name().into());
    if let Some(c) = &cfg.constraint {
        meta.insert("constraint".into(), c.label.clone().into());
        meta.insert("g0".into(), c.g0.into());
        let params: serde_json::Map<String, serde_json::Value> = c
            .expr
            .params()
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
            .collect();
        if !params.is_empty() {
            meta.insert("params".into(), params.into());
        }
    }
    if let Some(eta_c) = cfg.eta_c {
        meta.insert("eta_c".into(), eta_c.into());
    }
    if let Some(levels) = &cfg.engine.levels {
        meta.insert("levels".into(), levels.clone().into());
    }
    if let Some(cold) = &cfg.engine.cold_levels {
        meta.insert("cold_levels".into(), cold.clone().into());
    }
    if let Some(chi) = cfg.engine.chi {
        meta.insert("chi".into(), chi.into());
    }
    if let Some(bc) = cfg.engine.beta_c {
        meta.insert("beta_c".into(), bc.into());
    }
    if let Some(bh) = cfg.engine.beta_h {
        meta.insert("beta_h".into(), bh.into());
    }
    meta.insert("xi".into(), cfg.engine.xi.into());
    meta.insert("sigma_c".into(), cfg.sigma_c.into());
    meta.insert("sigma_h".into(), cfg.sigma_h.into());
    if let Some(sweep) = &cfg.sweep {
        meta.insert(
            "sweep".into(),
            serde_json::json!({
                "axis": sweep.axis.name(),
                "from": sweep.from,
                "to": sweep.to,
                "points": sweep.points,
                "log": sweep.log,
                "target": sweep.target.name(),
            }),
        );
    }
    meta.insert(
        "format".into(),
        match cfg.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
        .into(),
    );
    let mut s = serde_json::Value::Object(meta).to_string();
    s.push('\n');
    s
}

/// Executes a resolved configuration and renders its artifacts.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.command {
        Command::Simulate => {
            let (engine, chi_col) = build_engine(cfg)?;
            let rows = vec![simulate_row(&engine, chi_col)?];
            Ok(RunOutput {
                data: render(&rows, cfg.format)?,
                meta: meta_json(cfg),
            })
        }
        Command::Optimize => {
            let eta_c = required_eta_c(cfg)?;
            let rows = vec![optimize_row(cfg, eta_c, required_g0(cfg)?)?];
            Ok(RunOutput {
                data: render(&rows, cfg.format)?,
                meta: meta_json(cfg),
            })
        }
        Command::Expand => {
            let rows = vec![expand_row(cfg)?];
            Ok(RunOutput {
                data: render(&rows, cfg.format)?,
                meta: meta_json(cfg),
            })
        }
        Command::Sweep => sweep_rows(cfg),
        Command::Compare => compare_rows(cfg),
    }
}

/// Full CLI entry: parse, load, run, write. Returns the process exit code
/// (0 success, 2 not-an-engine, 1 usage or other errors).
pub fn main_entry() -> i32 {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) if e.use_stderr() => {
            eprintln!("error: {}", first_line(&e.to_string()));
            return 1;
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return 0;
        }
    };
    let cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &output.data) {
                eprintln!("error: writing {}: {e}", path.display());
                return 1;
            }
            let meta_path = PathBuf::from(format!("{}.meta.json", path.display()));
            if let Err(e) = std::fs::write(&meta_path, &output.meta) {
                eprintln!("error: writing {}: {e}", meta_path.display());
                return 1;
            }
        }
        None => print!("{}", output.data),
    }
    0
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("invalid arguments").to_string()
}
