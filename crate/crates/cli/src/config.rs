//! INI-style experiment configuration.
//!
//! Lines are `key = value` under `[section]` headers; `#` starts a comment.
//! Every section a kind accepts has a fixed key set with defaults, so a
//! misspelt key or section is an error rather than a silently ignored
//! setting. Validation collects every problem before reporting.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fns_core::params::{validate_alpha, AlphaRange};
use fns_core::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    Solve,
    KernelCheck,
    NormEquiv,
    BilinearCheck,
    DecayStudy,
    PersistenceCheck,
    AnalyticityStudy,
    CombinatorialCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Solve,
        ExperimentKind::KernelCheck,
        ExperimentKind::NormEquiv,
        ExperimentKind::BilinearCheck,
        ExperimentKind::DecayStudy,
        ExperimentKind::PersistenceCheck,
        ExperimentKind::AnalyticityStudy,
        ExperimentKind::CombinatorialCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::KernelCheck => "kernel-check",
            ExperimentKind::NormEquiv => "norm-equiv",
            ExperimentKind::BilinearCheck => "bilinear-check",
            ExperimentKind::DecayStudy => "decay-study",
            ExperimentKind::PersistenceCheck => "persistence-check",
            ExperimentKind::AnalyticityStudy => "analyticity-study",
            ExperimentKind::CombinatorialCheck => "combinatorial-check",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "Picard solution of the mild equation, checked against the time stepper",
            ExperimentKind::KernelCheck => "kernel calibration, decay bounds, k-growth constants, convolution inequality",
            ExperimentKind::NormEquiv => "Besov, Carleson and semigroup-GX norms over a seeded family",
            ExperimentKind::BilinearCheck => "empirical constants of the product and Duhamel maps",
            ExperimentKind::DecayStudy => "weighted derivative norms and power-law fits on broadband shear data",
            ExperimentKind::PersistenceCheck => "critical norms of solution snapshots",
            ExperimentKind::AnalyticityStudy => "growth of GX^k norms with a white-spectrum negative control",
            ExperimentKind::CombinatorialCheck => "exact enumeration of the combinatorial lemma",
        }
    }

    fn uses_parameters(self) -> bool {
        !matches!(self, ExperimentKind::KernelCheck | ExperimentKind::CombinatorialCheck)
    }

    fn uses_solver(self) -> bool {
        matches!(
            self,
            ExperimentKind::Solve
                | ExperimentKind::DecayStudy
                | ExperimentKind::PersistenceCheck
                | ExperimentKind::AnalyticityStudy
        )
    }

    fn uses_time_grid(self) -> bool {
        self.uses_solver() || self == ExperimentKind::BilinearCheck
    }

    fn uses_initial(self) -> bool {
        matches!(
            self,
            ExperimentKind::Solve | ExperimentKind::PersistenceCheck | ExperimentKind::AnalyticityStudy
        )
    }

    /// Sections this kind accepts.
    fn sections(self) -> Vec<&'static str> {
        let mut out = vec!["experiment"];
        if self.uses_parameters() {
            out.push("parameters");
        }
        if self.uses_time_grid() {
            out.extend(["time_grid", "quadrature"]);
        }
        if self.uses_solver() {
            out.push("solver");
        }
        if self.uses_initial() {
            out.push("initial");
        }
        out.push(self.name());
        out
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown experiment kind `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Real,
    Int,
    Text,
    Bool,
    RealList,
}

struct KeySpec {
    key: &'static str,
    ty: Ty,
    /// `None` marks a required key.
    default: Option<&'static str>,
}

const fn req(key: &'static str, ty: Ty) -> KeySpec {
    KeySpec { key, ty, default: None }
}

const fn opt(key: &'static str, ty: Ty, default: &'static str) -> KeySpec {
    KeySpec {
        key,
        ty,
        default: Some(default),
    }
}

fn schema(section: &str) -> Vec<KeySpec> {
    use Ty::*;
    match section {
        "experiment" => vec![req("kind", Text), opt("seed", Int, "0"), opt("output_dir", Text, "")],
        "parameters" => vec![
            req("alpha", Real),
            req("dim", Int),
            req("modes_per_axis", Int),
            opt("period", Real, "6.283185307179586"),
            opt("dealias_fraction", Real, "0.6666666666666666"),
            opt("tol_spectral", Real, "1e-12"),
        ],
        "time_grid" => vec![
            opt("t_min", Real, "6.103515625e-05"),
            opt("t_max", Real, "16"),
            opt("per_octave", Int, "16"),
            opt("points", RealList, ""),
        ],
        "quadrature" => vec![opt("panels", Int, "16"), opt("nodes", Int, "4"), opt("grading", Real, "2")],
        "solver" => vec![
            opt("tol", Real, "1e-8"),
            opt("max_iter", Int, "40"),
            opt("trace_order", Int, "0"),
            opt("smallness", Real, "0"),
        ],
        "initial" => vec![
            opt("field", Text, "taylor-green"),
            opt("amplitude", Real, "0.01"),
            opt("perturbation", Real, "0.5"),
            opt("k_lo", Real, "1"),
            opt("k_hi", Real, "4"),
        ],
        "solve" => vec![
            opt("oracle_dt", Real, "1e-3"),
            opt("oracle_times", RealList, "0.5, 1, 2"),
            opt("oracle_tolerance", Real, "1e-4"),
            opt("snapshot_times", RealList, ""),
        ],
        "kernel-check" => vec![
            opt("alphas", RealList, "0.6, 0.75, 0.9"),
            opt("dims", RealList, "2, 3"),
            opt("times", RealList, "0.1, 1, 10"),
            opt("r_min", Real, "1e-2"),
            opt("r_max", Real, "1e3"),
            opt("per_decade", Int, "12"),
            opt("panels", Int, "32"),
            opt("nodes", Int, "10"),
            opt("drift_tolerance", Real, "0.1"),
            opt("calibration", Bool, "true"),
            opt("k_max", Int, "8"),
            opt("k_spread", Real, "3"),
            opt("convolution_a", RealList, ""),
            opt("convolution_b", RealList, ""),
        ],
        "norm-equiv" => vec![
            opt("count", Int, "20"),
            opt("k_lo", Real, "1"),
            opt("k_hi", Real, "16"),
            opt("factor", Real, "50"),
            opt("rescale_tolerance", Real, "0.02"),
        ],
        "bilinear-check" => vec![opt("pairs", Int, "10"), opt("drift_tolerance", Real, "0.1")],
        "decay-study" => vec![
            opt("alphas", RealList, ""),
            opt("shells", Int, "7"),
            opt("amplitude", Real, "0.01"),
            opt("k_max", Int, "4"),
            opt("lo_factor", Real, "1.25"),
            opt("hi_factor", Real, "0.15"),
            opt("tolerance", Real, "0.05"),
            opt("min_samples", Int, "8"),
            opt("min_decades", Real, "1.5"),
        ],
        "persistence-check" => vec![opt("t0", RealList, "0.1, 1, 10")],
        "analyticity-study" => vec![
            opt("k_max", Int, "8"),
            opt("slack", Real, "0.2"),
            opt("contamination", Real, "1e-5"),
        ],
        "combinatorial-check" => vec![
            opt("delta", Real, "1"),
            opt("max_degree", Int, "20"),
            opt("dims", RealList, "1, 2, 3"),
        ],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    RealList(Vec<f64>),
}

/// One validation problem, with the line it refers to when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every error found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Present for every kind that evolves or measures a field.
    pub parameters: Option<Parameters>,
    values: BTreeMap<(String, String), Value>,
}

impl ExperimentConfig {
    fn value(&self, section: &str, key: &str) -> &Value {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .unwrap_or_else(|| panic!("[{section}] {key} is not in the schema of {}", self.kind))
    }

    pub fn real(&self, section: &str, key: &str) -> f64 {
        match self.value(section, key) {
            Value::Real(v) => *v,
            Value::Int(v) => *v as f64,
            other => panic!("[{section}] {key} is {other:?}, not a number"),
        }
    }

    pub fn int(&self, section: &str, key: &str) -> usize {
        match self.value(section, key) {
            Value::Int(v) => *v as usize,
            other => panic!("[{section}] {key} is {other:?}, not an integer"),
        }
    }

    pub fn text(&self, section: &str, key: &str) -> &str {
        match self.value(section, key) {
            Value::Text(v) => v,
            other => panic!("[{section}] {key} is {other:?}, not text"),
        }
    }

    pub fn flag(&self, section: &str, key: &str) -> bool {
        match self.value(section, key) {
            Value::Bool(v) => *v,
            other => panic!("[{section}] {key} is {other:?}, not a boolean"),
        }
    }

    pub fn list(&self, section: &str, key: &str) -> &[f64] {
        match self.value(section, key) {
            Value::RealList(v) => v,
            other => panic!("[{section}] {key} is {other:?}, not a list"),
        }
    }

    /// `section.key = value` for every setting, defaults included, in a
    /// stable order.
    pub fn echo(&self) -> Vec<String> {
        let mut out = vec![
            format!("experiment.kind = {}", self.kind),
            format!("experiment.seed = {}", self.seed),
        ];
        for ((section, key), value) in &self.values {
            if section == "experiment" && (key == "kind" || key == "seed") {
                continue;
            }
            let shown = match value {
                Value::Real(v) => format!("{v:?}"),
                Value::Int(v) => v.to_string(),
                Value::Text(v) => v.clone(),
                Value::Bool(v) => v.to_string(),
                Value::RealList(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", "),
            };
            out.push(format!("{section}.{key} = {shown}"));
        }
        out
    }
}

fn parse_value(ty: Ty, raw: &str) -> Result<Value, String> {
    let number = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
    match ty {
        Ty::Real => number(raw).map(Value::Real).ok_or_else(|| format!("`{raw}` is not a finite number")),
        Ty::Int => raw
            .parse::<i64>()
            .ok()
            .filter(|v| *v >= 0)
            .map(Value::Int)
            .ok_or_else(|| format!("`{raw}` is not a nonnegative integer")),
        Ty::Text => Ok(Value::Text(raw.to_string())),
        Ty::Bool => match raw {
            "true" | "yes" | "1" => Ok(Value::Bool(true)),
            "false" | "no" | "0" => Ok(Value::Bool(false)),
            _ => Err(format!("`{raw}` is not a boolean (true/false)")),
        },
        Ty::RealList => {
            if raw.trim().is_empty() {
                return Ok(Value::RealList(Vec::new()));
            }
            raw.split(',')
                .map(|p| number(p.trim()).ok_or_else(|| format!("list entry `{}` is not a finite number", p.trim())))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::RealList)
        }
    }
}

type Sections = BTreeMap<String, (usize, BTreeMap<String, Entry>)>;

fn tokenize(text: &str, errors: &mut Vec<ConfigError>) -> Sections {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(ConfigError {
                    line: Some(line),
                    message: format!("malformed section header `{content}`"),
                });
                continue;
            };
            let name = name.trim().to_string();
            if let Some((first, _)) = sections.get(&name) {
                errors.push(ConfigError {
                    line: Some(line),
                    message: format!("duplicate section [{name}] (first at line {first})"),
                });
            } else {
                sections.insert(name.clone(), (line, BTreeMap::new()));
            }
            current = Some(name);
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(ConfigError {
                line: Some(line),
                message: format!("expected `key = value`, got `{content}`"),
            });
            continue;
        };
        let Some(section) = current.clone() else {
            errors.push(ConfigError {
                line: Some(line),
                message: "setting outside of any [section]".into(),
            });
            continue;
        };
        let key = key.trim().to_string();
        let entries = &mut sections.get_mut(&section).expect("section registered").1;
        if let Some(prev) = entries.get(&key) {
            errors.push(ConfigError {
                line: Some(line),
                message: format!("duplicate key `{key}` in [{section}]: lines {} and {line}", prev.line),
            });
            continue;
        }
        entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }
    sections
}

/// Parses and validates a configuration, reporting every error found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let sections = tokenize(text, &mut errors);

    let kind = match sections.get("experiment").and_then(|(_, e)| e.get("kind")) {
        Some(entry) => match entry.value.parse::<ExperimentKind>() {
            Ok(k) => Some(k),
            Err(msg) => {
                errors.push(ConfigError {
                    line: Some(entry.line),
                    message: msg,
                });
                None
            }
        },
        None => {
            errors.push(ConfigError {
                line: None,
                message: "missing required key `kind` in [experiment]".into(),
            });
            None
        }
    };
    let Some(kind) = kind else {
        return Err(ConfigErrors(errors));
    };

    let allowed = kind.sections();
    for (name, (line, _)) in &sections {
        if !allowed.contains(&name.as_str()) {
            errors.push(ConfigError {
                line: Some(*line),
                message: format!(
                    "section [{name}] is not used by kind {kind} (accepted: {})",
                    allowed.iter().map(|s| format!("[{s}]")).collect::<Vec<_>>().join(", ")
                ),
            });
        }
    }

    let mut values = BTreeMap::new();
    let mut lines = BTreeMap::new();
    for section in &allowed {
        let given = sections.get(*section).map(|(_, e)| e);
        let specs = schema(section);
        if let Some(entries) = given {
            for (key, entry) in entries {
                if !specs.iter().any(|s| s.key == key) {
                    let known: Vec<&str> = specs.iter().map(|s| s.key).collect();
                    errors.push(ConfigError {
                        line: Some(entry.line),
                        message: format!("unknown key `{key}` in [{section}] (known: {})", known.join(", ")),
                    });
                }
            }
        }
        for spec in &specs {
            let entry = given.and_then(|e| e.get(spec.key));
            let (raw, line) = match (entry, spec.default) {
                (Some(e), _) => (e.value.as_str(), Some(e.line)),
                (None, Some(d)) => (d, None),
                (None, None) => {
                    errors.push(ConfigError {
                        line: None,
                        message: format!("missing required key `{}` in [{section}]", spec.key),
                    });
                    continue;
                }
            };
            match parse_value(spec.ty, raw) {
                Ok(v) => {
                    values.insert((section.to_string(), spec.key.to_string()), v);
                    if let Some(l) = line {
                        lines.insert((section.to_string(), spec.key.to_string()), l);
                    }
                }
                Err(msg) => errors.push(ConfigError {
                    line,
                    message: format!("[{section}] {}: {msg}", spec.key),
                }),
            }
        }
    }

    let mut cfg = ExperimentConfig {
        kind,
        seed: 0,
        output_dir: None,
        parameters: None,
        values,
    };
    if !errors.is_empty() {
        // range checks on partially typed input only add noise
        return Err(ConfigErrors(errors));
    }
    cfg.seed = cfg.int("experiment", "seed") as u64;
    let out = cfg.text("experiment", "output_dir");
    cfg.output_dir = (!out.is_empty()).then(|| PathBuf::from(out));
    let line_of = |s: &str, k: &str| lines.get(&(s.to_string(), k.to_string())).copied();
    let mut check = |ok: bool, s: &str, k: &str, msg: String| {
        if !ok {
            errors.push(ConfigError {
                line: line_of(s, k),
                message: format!("[{s}] {k}: {msg}"),
            });
        }
    };

    let range = if kind.uses_parameters() { AlphaRange::Dynamics } else { AlphaRange::Kernel };
    if kind.uses_parameters() {
        let p = Parameters {
            alpha: cfg.real("parameters", "alpha"),
            dim: cfg.int("parameters", "dim"),
            modes_per_axis: cfg.int("parameters", "modes_per_axis"),
            period: cfg.real("parameters", "period"),
            dealias_fraction: cfg.real("parameters", "dealias_fraction"),
            tol_spectral: cfg.real("parameters", "tol_spectral"),
        };
        if let Err(e) = validate_alpha(p.alpha, range) {
            check(false, "parameters", "alpha", e.to_string());
        }
        if let Err(e) = p.validate_grid() {
            check(false, "parameters", "modes_per_axis", e.to_string());
        }
        let needs_vector = kind != ExperimentKind::NormEquiv;
        check(
            !needs_vector || p.dim >= 2,
            "parameters",
            "dim",
            format!("{kind} needs a divergence-free vector field, so dim must be 2 or 3"),
        );
        cfg.parameters = Some(p);
    }
    let alpha_lists: &[(&str, &str)] = match kind {
        ExperimentKind::KernelCheck => &[("kernel-check", "alphas")],
        ExperimentKind::DecayStudy => &[("decay-study", "alphas")],
        _ => &[],
    };
    for (s, k) in alpha_lists {
        for &a in cfg.list(s, k) {
            if let Err(e) = validate_alpha(a, range) {
                check(false, s, k, e.to_string());
            }
        }
    }
    if kind.uses_time_grid() {
        let points = cfg.list("time_grid", "points");
        if points.is_empty() {
            let (lo, hi) = (cfg.real("time_grid", "t_min"), cfg.real("time_grid", "t_max"));
            check(lo > 0.0 && hi > lo, "time_grid", "t_max", format!("need 0 < t_min < t_max, got {lo} and {hi}"));
            check(cfg.int("time_grid", "per_octave") >= 1, "time_grid", "per_octave", "must be at least 1".into());
        } else {
            let ok = points[0] > 0.0 && points.windows(2).all(|w| w[1] > w[0]);
            check(ok, "time_grid", "points", "times must be positive and strictly increasing".into());
        }
        check(cfg.int("quadrature", "panels") >= 1, "quadrature", "panels", "must be at least 1".into());
        check((1..=16).contains(&cfg.int("quadrature", "nodes")), "quadrature", "nodes", "must lie in 1..=16".into());
        check(cfg.real("quadrature", "grading") >= 1.0, "quadrature", "grading", "must be at least 1".into());
    }
    if kind.uses_solver() {
        check(cfg.real("solver", "tol") > 0.0, "solver", "tol", "must be positive".into());
        check(cfg.int("solver", "max_iter") >= 1, "solver", "max_iter", "must be at least 1".into());
        check(cfg.real("solver", "smallness") >= 0.0, "solver", "smallness", "must be nonnegative (0 disables)".into());
    }
    if kind.uses_initial() {
        let field = cfg.text("initial", "field");
        check(
            ["taylor-green", "zero", "random"].contains(&field),
            "initial",
            "field",
            format!("`{field}` is not one of taylor-green, zero, random"),
        );
        let (lo, hi) = (cfg.real("initial", "k_lo"), cfg.real("initial", "k_hi"));
        check(lo > 0.0 && hi >= lo, "initial", "k_hi", format!("need 0 < k_lo <= k_hi, got {lo} and {hi}"));
    }
    match kind {
        ExperimentKind::Solve => {
            check(cfg.real("solve", "oracle_dt") >= 0.0, "solve", "oracle_dt", "must be nonnegative (0 disables)".into());
        }
        ExperimentKind::KernelCheck => {
            for &d in cfg.list("kernel-check", "dims") {
                check(
                    [1.0, 2.0, 3.0].contains(&d),
                    "kernel-check",
                    "dims",
                    format!("{d} is not a dimension in 1..=3"),
                );
            }
            for &t in cfg.list("kernel-check", "times") {
                check(t > 0.0, "kernel-check", "times", format!("{t} must be positive"));
            }
            let (a, b) = (cfg.list("kernel-check", "convolution_a"), cfg.list("kernel-check", "convolution_b"));
            check(
                a.len() == b.len(),
                "kernel-check",
                "convolution_b",
                format!("{} values of a but {} of b", a.len(), b.len()),
            );
            check(
                (1..=8).contains(&cfg.int("kernel-check", "k_max")) || cfg.int("kernel-check", "k_max") == 0,
                "kernel-check",
                "k_max",
                "must lie in 0..=8 (0 skips the k-growth fit)".into(),
            );
        }
        ExperimentKind::NormEquiv => {
            check(cfg.int("norm-equiv", "count") >= 1, "norm-equiv", "count", "must be at least 1".into());
            let (lo, hi) = (cfg.real("norm-equiv", "k_lo"), cfg.real("norm-equiv", "k_hi"));
            check(lo > 0.0 && hi >= lo, "norm-equiv", "k_hi", format!("need 0 < k_lo <= k_hi, got {lo} and {hi}"));
        }
        ExperimentKind::BilinearCheck => {
            check(cfg.int("bilinear-check", "pairs") >= 1, "bilinear-check", "pairs", "must be at least 1".into());
        }
        ExperimentKind::DecayStudy => {
            check(cfg.int("decay-study", "shells") >= 2, "decay-study", "shells", "must be at least 2".into());
            check(cfg.int("decay-study", "k_max") <= 4, "decay-study", "k_max", "must be at most 4".into());
        }
        ExperimentKind::PersistenceCheck => {
            let t0 = cfg.list("persistence-check", "t0");
            check(
                !t0.is_empty() && t0.iter().all(|t| *t > 0.0),
                "persistence-check",
                "t0",
                "needs at least one positive time".into(),
            );
        }
        ExperimentKind::AnalyticityStudy => {
            check(
                (1..=8).contains(&cfg.int("analyticity-study", "k_max")),
                "analyticity-study",
                "k_max",
                "must lie in 1..=8".into(),
            );
        }
        ExperimentKind::CombinatorialCheck => {
            check(cfg.real("combinatorial-check", "delta") >= 1.0, "combinatorial-check", "delta", "must be at least 1".into());
            for &d in cfg.list("combinatorial-check", "dims") {
                check(
                    [1.0, 2.0, 3.0].contains(&d),
                    "combinatorial-check",
                    "dims",
                    format!("{d} is not a dimension in 1..=3"),
                );
            }
        }
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(errors))
    }
}
