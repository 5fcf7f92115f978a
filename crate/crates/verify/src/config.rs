//! Run settings from flags and an optional TOML file; flags win.

use crate::cli::{Format, RunArgs};
use crate::error::CliError;
use kahler_core::geometry::DEFAULT_FD_STEP;
use kahler_core::models::spec_by_id;
use kahler_core::suites::{SuiteConfig, SuiteId};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const DEFAULT_POINTS: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;

/// Mirror of the command-line flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, toml::Value>,
    pub mu: Option<f64>,
    pub suite: Option<OneOrMany>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<Tolerance>,
    pub fd_step: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Tolerance {
    All(f64),
    PerSuite(BTreeMap<String, f64>),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config file: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub suite: SuiteConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn parse_suite_list(s: &str) -> Result<Vec<SuiteId>, String> {
    if s == "all" {
        return Ok(SuiteId::ALL.to_vec());
    }
    SuiteId::parse(s).map(|id| vec![id]).ok_or_else(|| {
        let known: Vec<&str> = SuiteId::ALL.iter().map(|id| id.as_str()).collect();
        format!("unknown suite '{s}' (expected one of: all, {})", known.join(", "))
    })
}

/// `VALUE` for every suite or `SUITE=VALUE` for one.
pub fn parse_tol(s: &str) -> Result<(Option<SuiteId>, f64), String> {
    let (suite, value) = match s.split_once('=') {
        Some((k, v)) => (Some(SuiteId::parse(k.trim()).ok_or_else(|| format!("unknown suite '{k}'"))?), v),
        None => (None, s),
    };
    let t: f64 = value.trim().parse().map_err(|_| format!("tolerance '{value}' is not a number"))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(format!("tolerance must be positive, got {t}"));
    }
    Ok((suite, t))
}

pub fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn toml_scalar(v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(CliError::Config(format!("parameter value {other} must be a string or number"))),
    }
}

impl Settings {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(args, file)
    }

    pub fn merge(args: &RunArgs, file: FileConfig) -> Result<Self, CliError> {
        let model = args
            .model
            .clone()
            .or(file.model)
            .ok_or_else(|| CliError::Config("no model given (use --model or a config file)".into()))?;
        let mut spec = spec_by_id(&model).ok_or_else(|| CliError::Config(format!("unknown model '{model}' (see list-models)")))?;
        let mut params: Vec<(String, String)> = Vec::new();
        for (k, v) in &file.params {
            params.push((k.clone(), toml_scalar(v)?));
        }
        params.extend(args.params.iter().cloned());
        if let Some(mu) = args.mu.or(file.mu) {
            if spec.family() != "product" {
                return Err(CliError::Config("--mu applies only to product models".into()));
            }
            params.push(("mu".into(), mu.to_string()));
        }
        for (k, v) in &params {
            spec.set_param(k, v).map_err(|e| CliError::Config(format!("parameter '{k}': {e}")))?;
        }
        let suites = if !args.suites.is_empty() {
            args.suites.iter().flatten().copied().collect()
        } else {
            match file.suite {
                Some(OneOrMany::One(s)) => parse_suite_list(&s).map_err(CliError::Config)?,
                Some(OneOrMany::Many(list)) => {
                    let mut out = Vec::new();
                    for s in list {
                        out.extend(parse_suite_list(&s).map_err(CliError::Config)?);
                    }
                    out
                }
                None => SuiteId::ALL.to_vec(),
            }
        };
        let mut tolerances = BTreeMap::new();
        match file.tol {
            Some(Tolerance::All(t)) => apply_tol(&mut tolerances, &suites, None, t),
            Some(Tolerance::PerSuite(map)) => {
                for (k, t) in map {
                    let (suite, t) = parse_tol(&format!("{k}={t}")).map_err(CliError::Config)?;
                    apply_tol(&mut tolerances, &suites, suite, t);
                }
            }
            None => {}
        }
        for (suite, t) in &args.tol {
            apply_tol(&mut tolerances, &suites, *suite, *t);
        }
        let mut suite = SuiteConfig::new(&model, spec);
        suite.suites = suites;
        suite.points = args.points.or(file.points).unwrap_or(DEFAULT_POINTS);
        suite.seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
        suite.fd_step = args.fd_step.or(file.fd_step).unwrap_or(DEFAULT_FD_STEP);
        suite.tolerances = tolerances.into_iter().collect();
        suite.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { suite, format: args.format.or(file.format).unwrap_or(Format::Text), out: args.out.clone().or(file.out) })
    }
}

/// A bare value applies to the selected suites only, so it never tightens
/// the implicit Kähler gate.
fn apply_tol(map: &mut BTreeMap<SuiteId, f64>, selected: &[SuiteId], suite: Option<SuiteId>, t: f64) {
    match suite {
        Some(id) => {
            map.insert(id, t);
        }
        None => {
            for id in selected {
                map.insert(*id, t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> RunArgs {
        RunArgs::default()
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig::parse("model = \"cp3-radial\"\npoints = 10\nseed = 3\nsuite = [\"killing\"]\n").unwrap();
        let mut a = args();
        a.model = Some("cp2-radial".into());
        a.seed = Some(9);
        let s = Settings::merge(&a, file).unwrap();
        assert_eq!((s.suite.model.as_str(), s.suite.points, s.suite.seed), ("cp2-radial", 10, 9));
        assert_eq!(s.suite.suites, vec![SuiteId::Killing]);
    }

    #[test]
    fn per_suite_tolerances_from_file() {
        let file = FileConfig::parse("model = \"product\"\n[tol]\nkilling = 1e-3\n").unwrap();
        let s = Settings::merge(&args(), file).unwrap();
        assert_eq!(s.suite.tolerances.get(&SuiteId::Killing), Some(&1e-3));
        assert_eq!(s.suite.tolerances.len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FileConfig::parse("modle = \"x\"").is_err());
        assert!(parse_suite_list("kahlr").is_err());
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("nope=1e-3").is_err());
        let mut a = args();
        a.model = Some("cp2-radial".into());
        a.mu = Some(0.0);
        assert!(matches!(Settings::merge(&a, FileConfig::default()), Err(CliError::Config(_))));
        a.mu = None;
        a.params = vec![("nonsense".into(), "1".into())];
        assert!(matches!(Settings::merge(&a, FileConfig::default()), Err(CliError::Config(_))));
        a.params.clear();
        a.points = Some(0);
        assert!(matches!(Settings::merge(&a, FileConfig::default()), Err(CliError::Config(_))));
    }

    #[test]
    fn params_from_file_are_applied() {
        let file = FileConfig::parse("model = \"calabi\"\n[params]\na = 0.5\nprofile = \"sine\"\nbase_n = 2\n").unwrap();
        let s = Settings::merge(&args(), file).unwrap();
        assert_eq!(s.suite.spec.dim(), 6);
    }
}
