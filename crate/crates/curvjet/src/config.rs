//! TOML run configuration and the compact `--metric` syntax.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use curvjet_core::verify::{Tolerances, DEFAULT_KAPPA};
use curvjet_core::{build_metric, Family, MetricSpec, ScaleFactor};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One verification stage. Variants are declared in name order so that the
/// derived `Ord` sorts checks alphabetically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Concircular,
    Derived,
    Fluid,
    Identities,
    OracleFd,
    RecurrenceFit,
    SynthQcc,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Concircular,
        Check::Derived,
        Check::Fluid,
        Check::Identities,
        Check::OracleFd,
        Check::RecurrenceFit,
        Check::SynthQcc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Concircular => "concircular",
            Check::Derived => "derived",
            Check::Fluid => "fluid",
            Check::Identities => "identities",
            Check::OracleFd => "oracle_fd",
            Check::RecurrenceFit => "recurrence_fit",
            Check::SynthQcc => "synth_qcc",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    #[serde(rename = "json")]
    Json,
    #[serde(rename = "csv-summary", alias = "csv")]
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" | "csv-summary" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_points")]
    points_per_metric: usize,
    checks: Vec<Check>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    kappa: Option<f64>,
    output_path: Option<PathBuf>,
    output_format: Option<OutputFormat>,
    #[serde(rename = "metric", default)]
    metrics: Vec<RawMetric>,
}

fn default_points() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    family: String,
    dimension: Option<usize>,
    #[serde(default)]
    parameters: BTreeMap<String, f64>,
    scale_factor: Option<String>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub metrics: Vec<MetricSpec>,
    pub checks: BTreeSet<Check>,
    pub points_per_metric: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub kappa: f64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if raw.metrics.is_empty() {
            return Err(invalid("metric", "at least one [[metric]] table is required"));
        }
        if raw.checks.is_empty() {
            return Err(invalid("checks", "at least one check is required"));
        }
        if raw.points_per_metric == 0 {
            return Err(invalid("points_per_metric", "must be at least 1"));
        }
        let mut tolerances = Tolerances::default();
        for (name, value) in &raw.tolerances {
            tolerances
                .set(name, *value)
                .map_err(|e| invalid(format!("tolerances.{name}"), e.to_string()))?;
        }
        let kappa = raw.kappa.unwrap_or(DEFAULT_KAPPA);
        if !(kappa.is_finite() && kappa != 0.0) {
            return Err(invalid("kappa", "must be finite and non-zero"));
        }
        let metrics = raw
            .metrics
            .iter()
            .enumerate()
            .map(|(i, m)| metric_from_raw(m, &format!("metric[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RunConfig {
            metrics,
            checks: raw.checks.into_iter().collect(),
            points_per_metric: raw.points_per_metric,
            seed: raw.seed,
            tolerances,
            kappa,
            output_path: raw.output_path,
            output_format: raw.output_format.unwrap_or_default(),
        })
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies a `NAME=VALUE` tolerance override.
    pub fn override_tolerance(&mut self, assignment: &str) -> Result<(), CliError> {
        let (name, value) = parse_tolerance(assignment)?;
        self.tolerances
            .set(&name, value)
            .map_err(|e| invalid(format!("--tol {name}"), e.to_string()))
    }
}

pub fn parse_tolerance(assignment: &str) -> Result<(String, f64), CliError> {
    let (name, value) = assignment
        .split_once('=')
        .ok_or_else(|| invalid("--tol", format!("expected NAME=VALUE, got `{assignment}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("--tol {name}"), format!("`{value}` is not a number")))?;
    Ok((name.trim().to_string(), value))
}

fn metric_from_raw(raw: &RawMetric, field: &str) -> Result<MetricSpec, CliError> {
    let family: Family = raw
        .family
        .parse()
        .map_err(|e: curvjet_core::Error| invalid(format!("{field}.family"), e.to_string()))?;
    let dimension = match (raw.dimension, family) {
        (Some(n), _) => n,
        (None, Family::Schwarzschild) => 4,
        (None, _) => return Err(invalid(format!("{field}.dimension"), "missing")),
    };
    let mut spec = MetricSpec::new(family, dimension);
    spec.parameters = raw.parameters.clone();
    if let Some(sf) = &raw.scale_factor {
        spec.scale_factor = Some(
            parse_scale_factor(sf).map_err(|m| invalid(format!("{field}.scale_factor"), m))?,
        );
    }
    build_metric(&spec).map_err(|e| invalid(field, e.to_string()))?;
    Ok(spec)
}

/// Parses `power(0.5)`, `exponential(1)`, `polynomial(1, 0, 2)`; a colon may
/// replace the parentheses (`power:0.5`).
pub fn parse_scale_factor(s: &str) -> Result<ScaleFactor, String> {
    let s = s.trim();
    let (name, args) = if let Some((name, rest)) = s.split_once('(') {
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
        (name, args)
    } else if let Some((name, args)) = s.split_once(':') {
        (name, args)
    } else {
        return Err(format!("expected kind(value), got `{s}`"));
    };
    let values = args
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect::<Result<Vec<f64>, String>>()?;
    let single = |kind: &str| -> Result<f64, String> {
        match values.as_slice() {
            [v] => Ok(*v),
            _ => Err(format!("{kind} takes exactly one value")),
        }
    };
    match name.trim() {
        "power" => Ok(ScaleFactor::Power(single("power")?)),
        "exponential" | "exp" => Ok(ScaleFactor::Exponential(single("exponential")?)),
        "polynomial" | "poly" => Ok(ScaleFactor::Polynomial(values)),
        other => Err(format!(
            "unknown scale factor `{other}` (expected power, exponential or polynomial)"
        )),
    }
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

/// Parses `family:key=value,...`, e.g.
/// `robertson_walker:n=4,k=0,q=power(0.5)`. `n`/`dimension` set the
/// dimension, `q`/`eta`/`scale_factor` the scale factor, anything else is a
/// family parameter.
pub fn parse_metric(s: &str) -> Result<MetricSpec, CliError> {
    let (family, rest) = s.split_once(':').unwrap_or((s, ""));
    let raw_family = family.trim().to_string();
    let mut raw = RawMetric {
        family: raw_family,
        dimension: None,
        parameters: BTreeMap::new(),
        scale_factor: None,
    };
    for part in split_top_level(rest) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| invalid("--metric", format!("expected key=value, got `{part}`")))?;
        let key = key.trim();
        match key {
            "n" | "dimension" => {
                raw.dimension = Some(value.trim().parse().map_err(|_| {
                    invalid("--metric n", format!("`{value}` is not a positive integer"))
                })?)
            }
            "q" | "eta" | "scale_factor" => raw.scale_factor = Some(value.to_string()),
            _ => {
                let v = value
                    .trim()
                    .parse()
                    .map_err(|_| invalid(format!("--metric {key}"), format!("`{value}` is not a number")))?;
                raw.parameters.insert(key.to_string(), v);
            }
        }
    }
    metric_from_raw(&raw, "--metric")
}

/// Parses a comma-separated coordinate list.
pub fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| invalid("--point", format!("`{v}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
checks = ["identities"]
points_per_metric = 3
[[metric]]
family = "minkowski"
dimension = 4
"#;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.metrics, vec![MetricSpec::minkowski(4)]);
        assert_eq!(c.seed, 0);
        assert_eq!(c.kappa, DEFAULT_KAPPA);
        assert_eq!(c.output_format, OutputFormat::Json);
    }

    #[test]
    fn unknown_family_names_the_field() {
        let text = MINIMAL.replace("minkowski", "minkowsky");
        let e = RunConfig::from_toml(&text).unwrap_err();
        assert!(e.to_string().contains("metric[0].family"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_and_checks_are_rejected() {
        let e = RunConfig::from_toml(&format!("colour = 1\n{MINIMAL}")).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = RunConfig::from_toml(&MINIMAL.replace("identities", "bianchi")).unwrap_err();
        assert!(e.to_string().contains("bianchi"), "{e}");
        let e = RunConfig::from_toml(&MINIMAL.replace("[\"identities\"]", "[]")).unwrap_err();
        assert!(e.to_string().contains("checks"), "{e}");
        let e = RunConfig::from_toml(&format!("{MINIMAL}[tolerances]\nfoo = 1.0\n")).unwrap_err();
        assert!(e.to_string().contains("tolerances.foo"), "{e}");
    }

    #[test]
    fn scale_factor_syntax() {
        assert_eq!(parse_scale_factor("power(0.5)").unwrap(), ScaleFactor::Power(0.5));
        assert_eq!(parse_scale_factor("power:0.5").unwrap(), ScaleFactor::Power(0.5));
        assert_eq!(
            parse_scale_factor("polynomial(1, 0, 2)").unwrap(),
            ScaleFactor::Polynomial(vec![1.0, 0.0, 2.0])
        );
        assert!(parse_scale_factor("cubic(1)").is_err());
        assert!(parse_scale_factor("power(1,2)").is_err());
    }

    #[test]
    fn metric_syntax() {
        let spec = parse_metric("robertson_walker:n=4,k=-1,q=polynomial(1,0,2)").unwrap();
        assert_eq!(
            spec,
            MetricSpec::robertson_walker(4, -1.0, ScaleFactor::Polynomial(vec![1.0, 0.0, 2.0]))
        );
        assert_eq!(parse_metric("schwarzschild:M=1").unwrap(), MetricSpec::schwarzschild(1.0));
        assert!(parse_metric("sphere:n=3").is_err());
        assert!(parse_metric("robertson_walker:n=4,k=2,q=power(1)").is_err());
        assert_eq!(parse_point("1, 2.5,-3").unwrap(), vec![1.0, 2.5, -3.0]);
    }
}
