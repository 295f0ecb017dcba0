//! Flat key = value config files plus flag merging.
//!
//! The file format is deliberately section-free: one `key = value` pair
//! per line, `#` starts a comment, keys are case-insensitive, values may
//! be quoted. Flags override file keys.

use crate::constraint::{self, ConstraintExpr, Preset};
use crate::spectra::parse_levels;
use crate::{Error, Result, Tolerances};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Optimize,
    Expand,
    Sweep,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Expand => "expand",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        match s {
            "simulate" => Ok(Command::Simulate),
            "optimize" => Ok(Command::Optimize),
            "expand" => Ok(Command::Expand),
            "sweep" => Ok(Command::Sweep),
            "compare" => Ok(Command::Compare),
            _ => Err(Error::Config(format!("unknown command '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

/// Sweep axis variables. `eta_c` and `g0` sweep the optimizer; `beta_c`
/// (at fixed beta_h/beta_c), `chi`, and `xi` sweep the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    EtaC,
    G0,
    BetaC,
    Chi,
    Xi,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::EtaC => "eta_c",
            SweepAxis::G0 => "g0",
            SweepAxis::BetaC => "beta_c",
            SweepAxis::Chi => "chi",
            SweepAxis::Xi => "xi",
        }
    }

    pub fn default_target(self) -> Command {
        match self {
            SweepAxis::EtaC | SweepAxis::G0 => Command::Optimize,
            SweepAxis::BetaC | SweepAxis::Chi | SweepAxis::Xi => Command::Simulate,
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<SweepAxis> {
        match s {
            "eta_c" => Ok(SweepAxis::EtaC),
            "g0" => Ok(SweepAxis::G0),
            "beta_c" => Ok(SweepAxis::BetaC),
            "chi" => Ok(SweepAxis::Chi),
            "xi" => Ok(SweepAxis::Xi),
            _ => Err(Error::Config(format!(
                "unknown sweep axis '{s}' (eta_c, g0, beta_c, chi, xi)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub log: bool,
    pub target: Command,
}

impl SweepSpec {
    /// Axis values, ordered from `from` to `to` inclusive.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::Config("sweep needs points >= 2".into()));
        }
        let k = self.points;
        if self.log {
            if !(self.from > 0.0 && self.to > 0.0) {
                return Err(Error::Config("log sweep needs positive from/to".into()));
            }
            let (a, b) = (self.from.ln(), self.to.ln());
            Ok((0..k)
                .map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp())
                .collect())
        } else {
            Ok((0..k)
                .map(|i| self.from + (self.to - self.from) * i as f64 / (k - 1) as f64)
                .collect())
        }
    }
}

/// Engine-side inputs after temperature resolution.
#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    pub levels: Option<Vec<f64>>,
    pub cold_levels: Option<Vec<f64>>,
    pub chi: Option<f64>,
    pub beta_c: Option<f64>,
    pub beta_h: Option<f64>,
    pub xi: f64,
}

/// Constraint-side inputs.
#[derive(Debug, Clone)]
pub struct ConstraintConfig {
    pub expr: ConstraintExpr,
    pub g0: f64,
    /// Source label for output rows: preset name or the raw text.
    pub label: String,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub engine: EngineConfig,
    pub constraint: Option<ConstraintConfig>,
    pub eta_c: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub sigma_c: f64,
    pub sigma_h: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub tol: Tolerances,
}

/// Raw (pre-validation) key/value inputs from file and flags.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub command: Option<String>,
    pub keys: BTreeMap<String, String>,
}

impl RawConfig {
    /// Loads `key = value` lines; later duplicates override earlier ones.
    pub fn from_file(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)?;
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected 'key = value'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim().trim_matches('"').to_string();
            if key == "command" {
                raw.command = Some(value);
            } else {
                raw.keys.insert(key, value);
            }
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.keys.insert(key.to_string(), value);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.keys.get(key).map(|s| s.as_str())
    }

    fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("key '{key}': bad number '{v}'"))),
        }
    }

    fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Config(format!("key '{key}': bad integer '{v}'"))),
        }
    }

    fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") | Some("1") | Some("yes") => Ok(Some(true)),
            Some("false") | Some("0") | Some("no") => Ok(Some(false)),
            Some(v) => Err(Error::Config(format!("key '{key}': bad boolean '{v}'"))),
        }
    }

    /// Bound parameter values from `param.<name>` keys.
    fn param_map(&self) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for (key, value) in &self.keys {
            if let Some(name) = key.strip_prefix("param.") {
                let v = value
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("key '{key}': bad number '{value}'")))?;
                out.insert(name.to_string(), v);
            }
        }
        Ok(out)
    }

    /// Validates and resolves everything into a [`RunConfig`].
    pub fn resolve(&self) -> Result<RunConfig> {
        let command: Command = self
            .command
            .as_deref()
            .ok_or_else(|| Error::Config("no command given (flag or 'command =' key)".into()))?
            .parse()?;

        // temperatures: exactly one of the beta pair or the T pair
        let beta_c = self.get_f64("beta_c")?;
        let beta_h = self.get_f64("beta_h")?;
        let t_c = self.get_f64("t_c")?;
        let t_h = self.get_f64("t_h")?;
        if (beta_c.is_some() || beta_h.is_some()) && (t_c.is_some() || t_h.is_some()) {
            return Err(Error::Config(
                "conflicting temperature spec: give beta_c/beta_h or t_c/t_h, not both".into(),
            ));
        }
        let (beta_c, beta_h) = match (t_c, t_h) {
            (Some(tc), Some(th)) => {
                if !(tc > 0.0 && th > 0.0) {
                    return Err(Error::Config("temperatures must be positive".into()));
                }
                (Some(1.0 / tc), Some(1.0 / th))
            }
            (None, None) => (beta_c, beta_h),
            _ => return Err(Error::Config("give both t_c and t_h".into())),
        };
        if beta_c.is_some() != beta_h.is_some() {
            return Err(Error::Config("give both beta_c and beta_h".into()));
        }

        let engine = EngineConfig {
            levels: self.get("levels").map(parse_levels).transpose()?,
            cold_levels: self.get("cold_levels").map(parse_levels).transpose()?,
            chi: self.get_f64("chi")?,
            beta_c,
            beta_h,
            xi: self.get_f64("xi")?.unwrap_or(1.0),
        };

        let eta_c = match self.get_f64("eta_c")? {
            Some(v) => Some(v),
            None => match (beta_c, beta_h) {
                (Some(bc), Some(bh)) => Some(1.0 - bh / bc),
                _ => None,
            },
        };

        let mut tol = Tolerances::default();
        if let Some(v) = self.get_f64("tol_root")? {
            tol.constraint_root = v;
        }
        if let Some(v) = self.get_f64("tol_residual")? {
            tol.stationarity = v;
        }

        let sweep = match self.get("axis") {
            None => None,
            Some(axis) => {
                let axis: SweepAxis = axis.parse()?;
                let from = self
                    .get_f64("from")?
                    .ok_or_else(|| Error::Config("sweep needs 'from'".into()))?;
                let to = self
                    .get_f64("to")?
                    .ok_or_else(|| Error::Config("sweep needs 'to'".into()))?;
                let points = self
                    .get_usize("points")?
                    .ok_or_else(|| Error::Config("sweep needs 'points'".into()))?;
                if points < 2 {
                    return Err(Error::Config("sweep needs points >= 2".into()));
                }
                let target = match self.get("target") {
                    Some(t) => t.parse()?,
                    None => axis.default_target(),
                };
                if !matches!(target, Command::Simulate | Command::Optimize) {
                    return Err(Error::Config(
                        "sweep target must be simulate or optimize".into(),
                    ));
                }
                Some(SweepSpec {
                    axis,
                    from,
                    to,
                    points,
                    log: self.get_bool("log")?.unwrap_or(false),
                    target,
                })
            }
        };

        let g0_swept = matches!(&sweep, Some(spec) if spec.axis == SweepAxis::G0);
        let constraint = self.resolve_constraint(g0_swept)?;

        let format = match self.get("format") {
            Some(f) => f.parse()?,
            None => OutputFormat::Csv,
        };

        Ok(RunConfig {
            command,
            engine,
            constraint,
            eta_c,
            sweep,
            sigma_c: self.get_f64("sigma_c")?.unwrap_or(1.0),
            sigma_h: self.get_f64("sigma_h")?.unwrap_or(1.0),
            format,
            out: self.get("out").map(PathBuf::from),
            tol,
        })
    }

    fn resolve_constraint(&self, g0_swept: bool) -> Result<Option<ConstraintConfig>> {
        let params = self.param_map()?;
        let text = self.get("constraint");
        let preset_name = self.get("preset");
        let (expr, label) = match (text, preset_name) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give constraint or preset, not both".into()))
            }
            (Some(text), None) => {
                let mut expr = constraint::parse(text)?;
                for (name, value) in &params {
                    expr = expr.bind(name, *value);
                }
                (expr, text.to_string())
            }
            (None, Some(name)) => {
                let kind: Preset = name.parse()?;
                (constraint::preset(kind, &params)?, name.to_string())
            }
            (None, None) => return Ok(None),
        };
        let g0 = match (self.get_f64("g0")?, g0_swept) {
            (Some(v), _) => v,
            // a g0-axis sweep supplies the constant per point
            (None, true) => f64::NAN,
            (None, false) => {
                return Err(Error::Config("constraint given without g0".into()));
            }
        };
        Ok(Some(ConstraintConfig { expr, g0, label }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn file_with_temperatures_resolves_betas() {
        let f = write_config(
            "command = simulate\nlevels = \"-1, 1\"\nT_c = 100\nT_h = 200\nchi = 0.2\n",
        );
        let raw = RawConfig::from_file(f.path()).unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.command, Command::Simulate);
        assert_eq!(cfg.engine.levels.as_deref(), Some(&[-1.0, 1.0][..]));
        assert!((cfg.engine.beta_c.unwrap() - 0.01).abs() < 1e-15);
        assert!((cfg.engine.beta_h.unwrap() - 0.005).abs() < 1e-15);
        assert_eq!(cfg.engine.xi, 1.0);
        assert!((cfg.eta_c.unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conflicting_temperature_spec_is_rejected() {
        let f = write_config("command = simulate\nbeta_c = 0.02\nT_c = 50\nT_h = 100\n");
        let raw = RawConfig::from_file(f.path()).unwrap();
        match raw.resolve() {
            Err(Error::Config(msg)) => assert!(msg.contains("conflicting temperature spec")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn flags_override_file_keys() {
        let f = write_config("command = simulate\nchi = 0.1\nxi = 0.5\n");
        let mut raw = RawConfig::from_file(f.path()).unwrap();
        raw.set("chi", "0.3".into());
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.engine.chi, Some(0.3));
        assert_eq!(cfg.engine.xi, 0.5);
    }

    #[test]
    fn constraint_from_flags() {
        let mut raw = RawConfig {
            command: Some("optimize".into()),
            ..RawConfig::default()
        };
        raw.set("constraint", "Ec*Eh".into());
        raw.set("g0", "4".into());
        raw.set("eta_c", "0.5".into());
        let cfg = raw.resolve().unwrap();
        let c = cfg.constraint.unwrap();
        assert_eq!(c.label, "Ec*Eh");
        assert_eq!(c.g0, 4.0);
        assert_eq!(cfg.eta_c, Some(0.5));
    }

    #[test]
    fn preset_with_params() {
        let mut raw = RawConfig {
            command: Some("optimize".into()),
            ..RawConfig::default()
        };
        raw.set("preset", "s_linear".into());
        raw.set("param.s", "0.9".into());
        raw.set("g0", "2".into());
        raw.set("eta_c", "0.5".into());
        let cfg = raw.resolve().unwrap();
        let c = cfg.constraint.unwrap();
        assert!(c.expr.references_eta_c());
        assert_eq!(c.expr.params().get("s"), Some(&0.9));
    }

    #[test]
    fn missing_required_keys_name_the_key() {
        let mut raw = RawConfig {
            command: Some("optimize".into()),
            ..RawConfig::default()
        };
        raw.set("constraint", "Eh".into());
        match raw.resolve() {
            Err(Error::Config(msg)) => assert!(msg.contains("g0")),
            other => panic!("expected config error, got {other:?}"),
        }
        let raw = RawConfig::default();
        assert!(matches!(raw.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_spec_values() {
        let spec = SweepSpec {
            axis: SweepAxis::EtaC,
            from: 0.1,
            to: 0.5,
            points: 5,
            log: false,
            target: Command::Optimize,
        };
        let v = spec.values().unwrap();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 0.1).abs() < 1e-15);
        assert!((v[4] - 0.5).abs() < 1e-15);
        assert!((v[2] - 0.3).abs() < 1e-15);

        let spec = SweepSpec {
            log: true,
            from: 0.01,
            to: 1.0,
            ..spec
        };
        let v = spec.values().unwrap();
        assert!((v[2] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn axis_inference_picks_target() {
        assert_eq!(SweepAxis::EtaC.default_target(), Command::Optimize);
        assert_eq!(SweepAxis::BetaC.default_target(), Command::Simulate);
        let mut raw = RawConfig {
            command: Some("sweep".into()),
            ..RawConfig::default()
        };
        raw.set("axis", "beta_c".into());
        raw.set("from", "0.01".into());
        raw.set("to", "0.1".into());
        raw.set("points", "4".into());
        raw.set("levels", "-1,1".into());
        raw.set("beta_c", "0.02".into());
        raw.set("beta_h", "0.01".into());
        raw.set("chi", "0.2".into());
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.sweep.unwrap().target, Command::Simulate);
    }

    #[test]
    fn comments_and_quotes_are_stripped() {
        let f = write_config(
            "# header comment\ncommand = expand  # trailing\nconstraint = \"1/Ec + 1/Eh\"\ng0 = 1\n",
        );
        let raw = RawConfig::from_file(f.path()).unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.command, Command::Expand);
        assert_eq!(cfg.constraint.unwrap().label, "1/Ec + 1/Eh");
    }
}
