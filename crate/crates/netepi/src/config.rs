//! Text forms for distributions, weight models, and run settings.
//!
//! Two layers: spec strings like `poisson(6)` or `twopoint(a=0.1,b=1,pa=0.9)`
//! that name a single object, and flat `key = value` files that collect them
//! with run parameters. Syntax problems surface as [`Error::Parse`] with a
//! line number; line 0 means the text came from a command-line argument
//! rather than a file. Value problems (a negative mean, say) surface as the
//! constructors' own parameter errors.

use crate::degree::DegreeDist;
use crate::error::{Error, Result};
use crate::vax::StrategyFamily;
use crate::weight::{WeightFunctionG, WeightModel};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Rewrites a line-0 parse error to point at `line`. Lets the spec-string
/// parsers stay ignorant of where their text came from.
pub fn relocate(err: Error, line: usize) -> Error {
    match err {
        Error::Parse { line: 0, msg } => Error::Parse { line, msg },
        other => other,
    }
}

/// Splits `name(args)` into its parts. None if the shape is wrong.
fn split_call(s: &str) -> Option<(&str, &str)> {
    let open = s.find('(')?;
    if !s.ends_with(')') || open == 0 {
        return None;
    }
    let name = s[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((name, &s[open + 1..s.len() - 1]))
}

/// Splits an argument list on commas outside parentheses.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !(out.is_empty() && last.is_empty()) {
        out.push(last);
    }
    out
}

fn num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(0, format!("expected a number for {what}, got `{s}`")))
}

fn int(s: &str, what: &str) -> Result<i64> {
    s.trim()
        .parse::<i64>()
        .map_err(|_| parse_err(0, format!("expected an integer for {what}, got `{s}`")))
}

/// Splits `key=value`, or None when there is no `=`.
fn key_value(s: &str) -> Option<(&str, &str)> {
    let eq = s.find('=')?;
    Some((s[..eq].trim(), s[eq + 1..].trim()))
}

fn named_f64(args: &[&str], key: &str, context: &str) -> Result<f64> {
    for arg in args {
        if let Some((k, v)) = key_value(arg) {
            if k == key {
                return num(v, key);
            }
        }
    }
    Err(parse_err(0, format!("{context} needs `{key}=...`")))
}

/// Parses a degree spec: `poisson(6)`, `powerlaw(3.5, mean=14)`, or
/// `empirical(path.csv)` where the file holds `degree,prob` rows.
pub fn parse_degree(s: &str) -> Result<DegreeDist> {
    let s = s.trim();
    let Some((name, args)) = split_call(s) else {
        return Err(parse_err(
            0,
            format!("`{s}` is not a degree distribution; expected poisson(mu), powerlaw(exp, mean=m), or empirical(path)"),
        ));
    };
    let parts = split_args(args);
    match name {
        "poisson" => {
            if parts.len() != 1 {
                return Err(parse_err(0, "poisson takes one argument, the mean"));
            }
            DegreeDist::poisson(num(parts[0], "poisson mean")?)
        }
        "powerlaw" => {
            if parts.len() != 2 {
                return Err(parse_err(0, "powerlaw takes an exponent and mean=..."));
            }
            let exponent = num(parts[0], "powerlaw exponent")?;
            let mean = named_f64(&parts, "mean", "powerlaw")?;
            DegreeDist::power_law(exponent, mean)
        }
        "empirical" => {
            if parts.len() != 1 || parts[0].is_empty() {
                return Err(parse_err(0, "empirical takes a csv path"));
            }
            read_degree_csv(Path::new(parts[0]))
        }
        other => Err(parse_err(0, format!("unknown degree distribution `{other}`"))),
    }
}

/// Reads `degree,prob` rows; blank lines, `#` comments, and a `degree,prob`
/// header are allowed.
fn read_degree_csv(path: &Path) -> Result<DegreeDist> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if i == 0 && cols.first() == Some(&"degree") {
            continue;
        }
        if cols.len() != 2 {
            return Err(parse_err(
                i + 1,
                format!("{}: expected `degree,prob`, got `{line}`", path.display()),
            ));
        }
        let degree = int(cols[0], "degree").map_err(|e| relocate(e, i + 1))?;
        if degree < 0 {
            return Err(parse_err(i + 1, format!("{}: negative degree", path.display())));
        }
        let prob = num(cols[1], "prob").map_err(|e| relocate(e, i + 1))?;
        pairs.push((degree as u32, prob));
    }
    if pairs.is_empty() {
        return Err(parse_err(0, format!("{}: no degree rows", path.display())));
    }
    DegreeDist::empirical(&pairs)
}

/// Parses a weight spec: `uniform`, `beta(0.5,2.5)`,
/// `twopoint(a=0.1,b=1.0,pa=0.9)`, `contacts(poisson(3), p=0.2)`, or a
/// degree-dependent rule `g=power(0.7)` / `g=indicator(3)` / `g=geom(0.8)`.
pub fn parse_weight(s: &str) -> Result<WeightModel> {
    let s = s.trim();
    if s == "uniform" {
        return Ok(WeightModel::Uniform);
    }
    if let Some(rest) = s.strip_prefix("g=") {
        return Ok(WeightModel::DegreeDependent(parse_weight_function(rest)?));
    }
    let Some((name, args)) = split_call(s) else {
        return Err(parse_err(
            0,
            format!("`{s}` is not a weight model; expected uniform, beta(..), twopoint(..), contacts(..), or g=..."),
        ));
    };
    let parts = split_args(args);
    match name {
        "beta" => {
            if parts.len() != 2 {
                return Err(parse_err(0, "beta takes two shape parameters"));
            }
            WeightModel::beta(num(parts[0], "beta shape")?, num(parts[1], "beta shape")?)
        }
        "twopoint" => {
            if parts.len() != 3 {
                return Err(parse_err(0, "twopoint takes a=..., b=..., pa=..."));
            }
            WeightModel::two_point(
                named_f64(&parts, "a", "twopoint")?,
                named_f64(&parts, "b", "twopoint")?,
                named_f64(&parts, "pa", "twopoint")?,
            )
        }
        "contacts" => {
            if parts.len() != 2 {
                return Err(parse_err(0, "contacts takes a count distribution and p=..."));
            }
            let counts = parse_degree(parts[0])?;
            WeightModel::contact_count(counts, named_f64(&parts, "p", "contacts")?)
        }
        other => Err(parse_err(0, format!("unknown weight model `{other}`"))),
    }
}

/// Parses a degree-dependent weight rule: `power(0.7)`, `indicator(3)`,
/// `geom(0.8)`.
pub fn parse_weight_function(s: &str) -> Result<WeightFunctionG> {
    let s = s.trim();
    let Some((name, args)) = split_call(s) else {
        return Err(parse_err(
            0,
            format!("`{s}` is not a weight rule; expected power(tau), indicator(theta), or geom(alpha)"),
        ));
    };
    let parts = split_args(args);
    if parts.len() != 1 {
        return Err(parse_err(0, format!("{name} takes one argument")));
    }
    match name {
        "power" => WeightFunctionG::power_decay(num(parts[0], "power exponent")?),
        "indicator" => WeightFunctionG::indicator_ge(int(parts[0], "indicator threshold")?),
        "geom" => WeightFunctionG::geometric_decay(num(parts[0], "geom ratio")?),
        other => Err(parse_err(0, format!("unknown weight rule `{other}`"))),
    }
}

/// Parses a vaccination strategy family name.
pub fn parse_family(s: &str) -> Result<StrategyFamily> {
    match s.trim() {
        "uniform" => Ok(StrategyFamily::Uniform),
        "acq" => Ok(StrategyFamily::AcqStandard),
        "acq_weight" => Ok(StrategyFamily::AcqWeightContinuous),
        "twopoint" => Ok(StrategyFamily::WeightTwoPoint),
        other => Err(parse_err(
            0,
            format!("unknown strategy `{other}`; expected uniform, acq, acq_weight, or twopoint"),
        )),
    }
}

/// Flat `key = value` settings with provenance. File lines keep their line
/// number for diagnostics; command-line overrides use line 0 and always win.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a config file. Blank lines and `#` comments are skipped; every
    /// other line must be `key = value`. Later lines override earlier ones.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut map = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = key_value(line) else {
                return Err(parse_err(
                    i + 1,
                    format!("{}: expected `key = value`, got `{line}`", path.display()),
                ));
            };
            if key.is_empty() {
                return Err(parse_err(i + 1, format!("{}: empty key", path.display())));
            }
            map.entries
                .insert(key.to_string(), (value.to_string(), i + 1));
        }
        Ok(map)
    }

    /// Installs a command-line override.
    pub fn set_arg(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// The line a key was set on; 0 for command-line values.
    pub fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |&(_, line)| line)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| parse_err(0, format!("missing required setting `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| num(v, key).map_err(|e| relocate(e, self.line(key))))
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    relocate(
                        parse_err(0, format!("expected a non-negative integer for {key}, got `{v}`")),
                        self.line(key),
                    )
                })
            })
            .transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| {
                    relocate(
                        parse_err(0, format!("expected a non-negative integer for {key}, got `{v}`")),
                        self.line(key),
                    )
                })
            })
            .transpose()
    }

    pub fn degree(&self, key: &str) -> Result<Option<DegreeDist>> {
        self.get(key)
            .map(|v| parse_degree(v).map_err(|e| relocate(e, self.line(key))))
            .transpose()
    }

    pub fn weight(&self, key: &str) -> Result<Option<WeightModel>> {
        self.get(key)
            .map(|v| parse_weight(v).map_err(|e| relocate(e, self.line(key))))
            .transpose()
    }

    /// Every setting as `key=value`, key-sorted, for reproducibility
    /// comments in output files.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, (v, _)) in &self.entries {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }
}
