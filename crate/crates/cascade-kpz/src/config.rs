//! Experiment configuration: command-line flags, an optional key-value
//! config file, and the weight/set spec grammars.
//!
//! Flags override file entries. The canonical emitted form round-trips:
//! `parse(emit(config)) == config`, which is what makes provenance replay
//! trustworthy.
//!
//! Grammars (exact, lowercase):
//!
//! ```text
//! weight  = lognormal(sigma2=0.5) | twopoint(a=0.5,b=1.5,p=0.5)
//! set     = fullcube | cantor(keep=[0,3]) | slice(axis=1,coord=0.5)
//!         | singleton(0.3,0.7) | union(<set>,<set>,...)
//! s-grid  = 0:1:0.05 (start:stop:step) | 0,0.25,0.5 (explicit list)
//! tail    = mean_one | extended(2)
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cascade::TailRule;
use crate::error::{Error, Result};
use crate::sets::SetOracle;
use crate::weights::WeightModel;

/// Environment variable supplying the default thread budget.
pub const THREADS_ENV_VAR: &str = "CASCADE_KPZ_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    MassStats,
    Dimension,
    Energy,
    Kpz,
    BoundCheck,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::MassStats => "mass-stats",
            Command::Dimension => "dimension",
            Command::Energy => "energy",
            Command::Kpz => "kpz",
            Command::BoundCheck => "bound-check",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => Command::Validate,
            "mass-stats" => Command::MassStats,
            "dimension" => Command::Dimension,
            "energy" => Command::Energy,
            "kpz" => Command::Kpz,
            "bound-check" => Command::BoundCheck,
            other => {
                return Err(Error::ConfigParse {
                    field: "command".into(),
                    reason: format!(
                        "unknown command `{other}` (expected validate, mass-stats, \
                         dimension, energy, kpz or bound-check)"
                    ),
                })
            }
        })
    }
}

/// A fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dim: u32,
    pub weight: Option<WeightModel>,
    pub set: Option<SetOracle>,
    pub n_min: u32,
    pub n_max: u32,
    /// Single truncation depth for mass-stats / bound-check; defaults to
    /// n_max when absent.
    pub depth: Option<u32>,
    pub s_grid: Vec<f64>,
    pub seeds: u32,
    pub master_seed: u64,
    pub tail: TailRule,
    /// Execution hint only; never recorded in artifacts.
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub tolerance: f64,
    /// Sample count for energy profiles.
    pub points: usize,
}

/// Serialized face of a config: canonical grammar strings throughout.
///
/// The thread budget is deliberately absent: it is an execution hint, not
/// part of the experiment identity, so artifacts stay byte-identical across
/// budgets and replay may pick any.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfigRepr {
    pub command: String,
    pub d: u32,
    pub weight: Option<String>,
    pub set: Option<String>,
    pub n_min: u32,
    pub n_max: u32,
    pub depth: Option<u32>,
    pub s_grid: Vec<f64>,
    pub seeds: u32,
    pub master_seed: u64,
    pub tail: String,
    pub out: String,
    pub tolerance: f64,
    pub points: usize,
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::ConfigParse {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Split on commas that sit at bracket depth zero.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// `name(body)` → (name, body); bare `name` → (name, "").
fn call_form(s: &str) -> Result<(&str, &str)> {
    match s.find('(') {
        None => Ok((s, "")),
        Some(open) => {
            if !s.ends_with(')') {
                return Err(bad("spec", format!("unbalanced parentheses in `{s}`")));
            }
            Ok((&s[..open], &s[open + 1..s.len() - 1]))
        }
    }
}

fn parse_kv_args<'a>(field: &str, body: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    split_top_level(body)
        .into_iter()
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(field, format!("expected key=value, got `{pair}`")))
        })
        .collect()
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| bad(field, format!("`{s}` is not a number")))
}

/// Parse a weight spec, e.g. `lognormal(sigma2=0.5)`.
pub fn parse_weight(spec: &str, dim: u32) -> Result<WeightModel> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let (name, body) = call_form(&compact)?;
    match name {
        "lognormal" => {
            let mut sigma2 = None;
            for (k, v) in parse_kv_args("weight", body)? {
                match k {
                    "sigma2" => sigma2 = Some(parse_f64("weight.sigma2", v)?),
                    other => return Err(bad("weight", format!("unknown key `{other}`"))),
                }
            }
            let sigma2 = sigma2.ok_or_else(|| bad("weight", "lognormal needs sigma2="))?;
            WeightModel::log_normal(sigma2, dim)
        }
        "twopoint" => {
            let (mut a, mut b, mut p) = (None, None, None);
            for (k, v) in parse_kv_args("weight", body)? {
                match k {
                    "a" => a = Some(parse_f64("weight.a", v)?),
                    "b" => b = Some(parse_f64("weight.b", v)?),
                    "p" => p = Some(parse_f64("weight.p", v)?),
                    other => return Err(bad("weight", format!("unknown key `{other}`"))),
                }
            }
            match (a, b, p) {
                (Some(a), Some(b), Some(p)) => WeightModel::two_point(a, b, p, dim),
                _ => Err(bad("weight", "twopoint needs a=, b= and p=")),
            }
        }
        other => Err(bad(
            "weight",
            format!("unknown weight family `{other}` (lognormal | twopoint)"),
        )),
    }
}

/// Parse a set spec, e.g. `cantor(keep=[0,3])` or `union(a,b)`.
pub fn parse_set(spec: &str, dim: u32) -> Result<SetOracle> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    parse_set_compact(&compact, dim)
}

fn parse_set_compact(spec: &str, dim: u32) -> Result<SetOracle> {
    let (name, body) = call_form(spec)?;
    match name {
        "fullcube" => SetOracle::full_cube(dim),
        "cantor" => {
            let args = parse_kv_args("set", body)?;
            let keep_str = args
                .iter()
                .find(|(k, _)| *k == "keep")
                .map(|(_, v)| *v)
                .ok_or_else(|| bad("set", "cantor needs keep=[...]"))?;
            let inner = keep_str
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| bad("set", format!("keep must be a [list], got `{keep_str}`")))?;
            let symbols: Vec<u32> = split_top_level(inner)
                .into_iter()
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse::<u32>()
                        .map_err(|_| bad("set.keep", format!("`{p}` is not a symbol")))
                })
                .collect::<Result<Vec<u32>>>()?;
            SetOracle::dyadic_cantor(dim, &symbols)
        }
        "slice" => {
            let (mut axis, mut coord) = (None, None);
            for (k, v) in parse_kv_args("set", body)? {
                match k {
                    "axis" => {
                        axis =
                            Some(v.parse::<u32>().map_err(|_| {
                                bad("set.axis", format!("`{v}` is not an axis index"))
                            })?)
                    }
                    "coord" => coord = Some(parse_f64("set.coord", v)?),
                    other => return Err(bad("set", format!("unknown key `{other}`"))),
                }
            }
            match (axis, coord) {
                (Some(axis), Some(coord)) => SetOracle::axis_slice(dim, axis, coord),
                _ => Err(bad("set", "slice needs axis= and coord=")),
            }
        }
        "singleton" => {
            let coords: Vec<f64> = split_top_level(body)
                .into_iter()
                .map(|p| parse_f64("set.singleton", p))
                .collect::<Result<Vec<f64>>>()?;
            if coords.len() != dim as usize {
                return Err(bad(
                    "set",
                    format!("singleton needs {dim} coordinates, got {}", coords.len()),
                ));
            }
            SetOracle::singleton(&coords)
        }
        "union" => {
            let members = split_top_level(body)
                .into_iter()
                .filter(|p| !p.is_empty())
                .map(|p| parse_set_compact(p, dim))
                .collect::<Result<Vec<SetOracle>>>()?;
            SetOracle::union(members)
        }
        other => Err(bad(
            "set",
            format!(
                "unknown set kind `{other}` \
                 (fullcube | cantor | slice | singleton | union)"
            ),
        )),
    }
}

/// Parse an s-grid: `start:stop:step` or a comma list.
pub fn parse_s_grid(spec: &str) -> Result<Vec<f64>> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let values: Vec<f64> = if compact.contains(':') {
        let parts: Vec<&str> = compact.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("s-grid", "range form is start:stop:step"));
        }
        let start = parse_f64("s-grid", parts[0])?;
        let stop = parse_f64("s-grid", parts[1])?;
        let step = parse_f64("s-grid", parts[2])?;
        if !step.is_finite() || step <= 0.0 || stop < start {
            return Err(bad("s-grid", "need step > 0 and stop ≥ start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        compact
            .split(',')
            .filter(|p| !p.is_empty())
            .map(|p| parse_f64("s-grid", p))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("s-grid", "grid is empty"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("s-grid", "grid must be strictly increasing"));
    }
    if values.iter().any(|&s| s < 0.0) {
        return Err(bad("s-grid", "exponents must be ≥ 0"));
    }
    Ok(values)
}

/// Parse a tail rule: `mean_one` or `extended(q)`.
pub fn parse_tail(spec: &str) -> Result<TailRule> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "mean_one" {
        return Ok(TailRule::MeanOne);
    }
    let (name, body) = call_form(&compact)?;
    if name == "extended" {
        let q = body.parse::<u32>().map_err(|_| {
            bad(
                "tail",
                format!("extended(q) needs an integer, got `{body}`"),
            )
        })?;
        return Ok(TailRule::Extended(q));
    }
    Err(bad(
        "tail",
        format!("unknown tail rule `{spec}` (mean_one | extended(q))"),
    ))
}

/// Raw key→value pairs collected from a config file and/or flags.
#[derive(Default)]
struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    fn set(&mut self, key: &str, value: &str) {
        self.entries.retain(|(k, _)| k != key);
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "command",
    "d",
    "weight",
    "set",
    "n-min",
    "n-max",
    "depth",
    "s-grid",
    "seeds",
    "master-seed",
    "tail",
    "threads",
    "out",
    "tolerance",
    "points",
];

fn parse_config_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut raw = RawConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            bad(
                "config-file",
                format!("line {}: expected key = value, got `{line}`", lineno + 1),
            )
        })?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(bad(
                "config-file",
                format!("line {}: unknown key `{key}`", lineno + 1),
            ));
        }
        raw.set(key, value.trim());
    }
    Ok(raw)
}

impl ExperimentConfig {
    /// Parse `<command> [--flag value]...`, honoring `--config FILE`
    /// (flags override file entries) and the thread-budget env var.
    pub fn parse_args(args: &[String]) -> Result<Self> {
        if args.is_empty() {
            return Err(bad("command", "missing command"));
        }
        let command = Command::parse(&args[0])?;
        let mut flags: Vec<(String, String)> = Vec::new();
        let mut config_path: Option<PathBuf> = None;
        let mut i = 1;
        while i < args.len() {
            let flag = args[i]
                .strip_prefix("--")
                .ok_or_else(|| bad("flags", format!("expected --flag, got `{}`", args[i])))?;
            let value = args
                .get(i + 1)
                .ok_or_else(|| bad(flag, "missing value"))?
                .clone();
            if flag == "config" {
                config_path = Some(PathBuf::from(&value));
            } else if KNOWN_KEYS.contains(&flag) {
                flags.push((flag.to_string(), value));
            } else {
                return Err(bad("flags", format!("unknown flag `--{flag}`")));
            }
            i += 2;
        }
        let mut raw = match config_path {
            Some(p) => parse_config_file(&p)?,
            None => RawConfig::default(),
        };
        for (k, v) in flags {
            raw.set(&k, &v);
        }
        Self::from_raw(command, &raw)
    }

    fn from_raw(command: Command, raw: &RawConfig) -> Result<Self> {
        let dim: u32 = match raw.get("d") {
            Some(v) => v
                .parse()
                .map_err(|_| bad("d", format!("`{v}` is not a dimension")))?,
            None => 2,
        };
        let weight = raw
            .get("weight")
            .map(|spec| parse_weight(spec, dim))
            .transpose()?;
        let set = raw
            .get("set")
            .map(|spec| parse_set(spec, dim))
            .transpose()?;
        let n_min = match raw.get("n-min") {
            Some(v) => v.parse().map_err(|_| bad("n-min", "not an integer"))?,
            None => 4,
        };
        let n_max = match raw.get("n-max") {
            Some(v) => v.parse().map_err(|_| bad("n-max", "not an integer"))?,
            None if dim == 1 => 16,
            None => 12,
        };
        if n_min > n_max {
            return Err(bad("n-min", format!("n-min {n_min} exceeds n-max {n_max}")));
        }
        let depth = raw
            .get("depth")
            .map(|v| v.parse::<u32>().map_err(|_| bad("depth", "not an integer")))
            .transpose()?;
        let s_grid = match raw.get("s-grid") {
            Some(v) => parse_s_grid(v)?,
            None => crate::dimension::EstimateParams::default_s_grid(),
        };
        let seeds = match raw.get("seeds") {
            Some(v) => v.parse().map_err(|_| bad("seeds", "not an integer"))?,
            None => 20,
        };
        let master_seed = match raw.get("master-seed") {
            Some(v) => v
                .parse()
                .map_err(|_| bad("master-seed", "not an integer"))?,
            None => 42,
        };
        let tail = match raw.get("tail") {
            Some(v) => parse_tail(v)?,
            None => TailRule::MeanOne,
        };
        let threads = match raw.get("threads") {
            Some(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| bad("threads", "not an integer"))?,
            ),
            None => match std::env::var(THREADS_ENV_VAR) {
                Ok(v) => Some(
                    v.parse::<usize>()
                        .map_err(|_| bad(THREADS_ENV_VAR, "not an integer"))?,
                ),
                Err(_) => None,
            },
        };
        let out_dir = PathBuf::from(raw.get("out").unwrap_or("out"));
        let tolerance = match raw.get("tolerance") {
            Some(v) => parse_f64("tolerance", v)?,
            None => 0.05,
        };
        if !tolerance.is_finite() || tolerance <= 0.0 {
            return Err(bad("tolerance", "must be > 0"));
        }
        let points = match raw.get("points") {
            Some(v) => v.parse().map_err(|_| bad("points", "not an integer"))?,
            None => 2000,
        };
        if points < 2 {
            return Err(bad("points", "need at least 2 points"));
        }
        let config = ExperimentConfig {
            command,
            dim,
            weight,
            set,
            n_min,
            n_max,
            depth,
            s_grid,
            seeds,
            master_seed,
            tail,
            threads,
            out_dir,
            tolerance,
            points,
        };
        config.check_command_requirements()?;
        Ok(config)
    }

    fn check_command_requirements(&self) -> Result<()> {
        let need_weight = matches!(
            self.command,
            Command::Validate | Command::MassStats | Command::Kpz | Command::BoundCheck
        );
        if need_weight && self.weight.is_none() {
            return Err(bad(
                "weight",
                format!("command `{}` needs --weight", self.command.as_str()),
            ));
        }
        let need_set = matches!(
            self.command,
            Command::Dimension | Command::Energy | Command::Kpz
        );
        if need_set && self.set.is_none() {
            return Err(bad(
                "set",
                format!("command `{}` needs --set", self.command.as_str()),
            ));
        }
        Ok(())
    }

    /// The truncation depth for single-depth commands.
    pub fn effective_depth(&self) -> u32 {
        self.depth.unwrap_or(self.n_max)
    }

    /// Canonical config-file text; `parse(emit(c)) == c`.
    pub fn emit(&self) -> String {
        let repr = self.to_repr();
        let mut lines = vec![
            format!("command = {}", repr.command),
            format!("d = {}", repr.d),
        ];
        if let Some(w) = &repr.weight {
            lines.push(format!("weight = {w}"));
        }
        if let Some(s) = &repr.set {
            lines.push(format!("set = {s}"));
        }
        lines.push(format!("n-min = {}", repr.n_min));
        lines.push(format!("n-max = {}", repr.n_max));
        if let Some(d) = repr.depth {
            lines.push(format!("depth = {d}"));
        }
        let grid: Vec<String> = repr.s_grid.iter().map(|s| s.to_string()).collect();
        lines.push(format!("s-grid = {}", grid.join(",")));
        lines.push(format!("seeds = {}", repr.seeds));
        lines.push(format!("master-seed = {}", repr.master_seed));
        lines.push(format!("tail = {}", repr.tail));
        lines.push(format!("out = {}", repr.out));
        lines.push(format!("tolerance = {}", repr.tolerance));
        lines.push(format!("points = {}", repr.points));
        lines.join("\n") + "\n"
    }

    /// One-line config echo for CSV headers.
    pub fn echo_line(&self) -> String {
        self.emit().trim_end().replace('\n', "; ")
    }

    pub fn to_repr(&self) -> ConfigRepr {
        ConfigRepr {
            command: self.command.as_str().into(),
            d: self.dim,
            weight: self.weight.as_ref().map(|w| w.spec_string()),
            set: self.set.as_ref().map(|s| s.spec_string()),
            n_min: self.n_min,
            n_max: self.n_max,
            depth: self.depth,
            s_grid: self.s_grid.clone(),
            seeds: self.seeds,
            master_seed: self.master_seed,
            tail: self.tail.spec_string(),
            out: self.out_dir.display().to_string(),
            tolerance: self.tolerance,
            points: self.points,
        }
    }

    pub fn from_repr(repr: &ConfigRepr) -> Result<Self> {
        let command = Command::parse(&repr.command)?;
        let mut raw = RawConfig::default();
        raw.set("d", &repr.d.to_string());
        if let Some(w) = &repr.weight {
            raw.set("weight", w);
        }
        if let Some(s) = &repr.set {
            raw.set("set", s);
        }
        raw.set("n-min", &repr.n_min.to_string());
        raw.set("n-max", &repr.n_max.to_string());
        if let Some(d) = repr.depth {
            raw.set("depth", &d.to_string());
        }
        let grid: Vec<String> = repr.s_grid.iter().map(|s| s.to_string()).collect();
        raw.set("s-grid", &grid.join(","));
        raw.set("seeds", &repr.seeds.to_string());
        raw.set("master-seed", &repr.master_seed.to_string());
        raw.set("tail", &repr.tail);
        raw.set("out", &repr.out);
        raw.set("tolerance", &repr.tolerance.to_string());
        raw.set("points", &repr.points.to_string());
        Self::from_raw(command, &raw)
    }

    /// Parse canonical config-file text (the output of [`Self::emit`]).
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut command = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                bad(
                    "config-file",
                    format!("line {}: expected key = value", lineno + 1),
                )
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "command" {
                command = Some(Command::parse(value)?);
            } else if KNOWN_KEYS.contains(&key) {
                raw.set(key, value);
            } else {
                return Err(bad(
                    "config-file",
                    format!("line {}: unknown key `{key}`", lineno + 1),
                ));
            }
        }
        let command = command.ok_or_else(|| bad("command", "config text has no command"))?;
        Self::from_raw(command, &raw)
    }
}
