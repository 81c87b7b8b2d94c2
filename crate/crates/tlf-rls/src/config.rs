//! Plain-text experiment configuration.
//!
//! The format is line-based `key = value` with optional `[section]` headers
//! and `#` comments:
//!
//! ```text
//! case = case1
//! steps = 2000
//! window = 50
//! gamma = 1000
//! divergence_ceiling = 1e12
//! seed = 0
//! lambda = 0.99          # defaults inherited by later [method] sections
//! mu = 0.99
//! gain = 1.0
//!
//! [tolerances]
//! eps_rank = 1e-9
//! eps_div = 1e-12
//! eps_psd = 1e-12
//!
//! [input]
//! kind = sine            # sine | constant
//! freq = 0.1
//! amp = 1.0
//!
//! [schedule]             # step = plant label (a | b | c)
//! 0 = a
//! 200 = b
//! 1200 = c
//!
//! [method ef-rls]        # ef-rls | tlf-rls | dcl | df-cl
//! lambda = 0.99
//!
//! [method tlf-rls]
//! inner = df             # df | ef | none
//! lambda = 0.01
//! mu = 0.99
//! ```
//!
//! An empty file yields the named case's defaults. Declaring any `[method]`
//! section replaces the default method list entirely. `parse` and `emit`
//! round-trip: `parse(emit(cfg)) == cfg` for every valid config.

use std::fmt;

use crate::bank::InnerMode;
use crate::experiment::{CaseId, ExperimentConfig, MethodSpec};
use crate::plant::{CaseLabel, ChangeSchedule, InputSignal, PlantModel};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed text; 1-based line and column of the offending token.
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    /// Well-formed text with an invalid value; names the field.
    Validation { field: String, msg: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, col, msg } => {
                write!(f, "parse error at line {line}, column {col}: {msg}")
            }
            ConfigError::Validation { field, msg } => {
                write!(f, "invalid value for `{field}`: {msg}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

fn validation(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        msg: msg.into(),
    }
}

/// Defaults that top-level `lambda` / `mu` / `gain` / `capacity` keys provide
/// to later `[method]` sections.
#[derive(Debug, Clone, Copy)]
struct MethodDefaults {
    lambda: f64,
    mu: f64,
    gain: f64,
    capacity: usize,
}

impl Default for MethodDefaults {
    fn default() -> Self {
        MethodDefaults {
            lambda: 0.99,
            mu: 0.99,
            gain: 1.0,
            capacity: 8,
        }
    }
}

struct Parser {
    cfg: ExperimentConfig,
    defaults: MethodDefaults,
    /// Replacement method list; swapped in if any [method] section appears.
    methods: Vec<MethodSpec>,
    saw_methods: bool,
    schedule_entries: Vec<(usize, PlantModel)>,
    saw_schedule: bool,
    section: Section,
    pending: Option<PendingMethod>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Top,
    Tolerances,
    Input,
    Schedule,
    Method,
}

/// Parses config text on top of the named case's defaults.
pub fn parse_config(text: &str, case: CaseId) -> Result<ExperimentConfig, ConfigError> {
    let base = match case {
        CaseId::Case1 => ExperimentConfig::case1(),
        CaseId::Case2 => ExperimentConfig::case2(),
        CaseId::Custom => ExperimentConfig::custom(),
    };
    let mut p = Parser {
        cfg: base,
        defaults: MethodDefaults::default(),
        methods: Vec::new(),
        saw_methods: false,
        schedule_entries: Vec::new(),
        saw_schedule: false,
        section: Section::Top,
        pending: None,
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('[') {
            let col = line.find('[').unwrap() + 1;
            let header = header.strip_suffix(']').ok_or(ConfigError::Parse {
                line: lineno,
                col,
                msg: "unterminated section header".into(),
            })?;
            p.open_section(header.trim(), lineno, col)?;
            continue;
        }
        let eq = trimmed.find('=').ok_or_else(|| ConfigError::Parse {
            line: lineno,
            col: 1,
            msg: format!("expected `key = value`, got `{trimmed}`"),
        })?;
        let key = trimmed[..eq].trim();
        let value = trimmed[eq + 1..].trim();
        let col = line.find(key).map_or(1, |c| c + 1);
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Parse {
                line: lineno,
                col,
                msg: "empty key or value".into(),
            });
        }
        p.apply(key, value, lineno, col)?;
    }
    p.finish()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl Parser {
    fn open_section(&mut self, name: &str, line: usize, col: usize) -> Result<(), ConfigError> {
        self.flush_method()?;
        self.section = match name {
            "tolerances" => Section::Tolerances,
            "input" => Section::Input,
            "schedule" => Section::Schedule,
            _ => match name.strip_prefix("method ") {
                Some(kind) => {
                    let kind = kind.trim();
                    if !matches!(kind, "ef-rls" | "tlf-rls" | "dcl" | "df-cl") {
                        return Err(ConfigError::Parse {
                            line,
                            col,
                            msg: format!("unknown method kind `{kind}`"),
                        });
                    }
                    self.saw_methods = true;
                    self.pending = Some(PendingMethod::new(kind, self.defaults));
                    Section::Method
                }
                None => {
                    return Err(ConfigError::Parse {
                        line,
                        col,
                        msg: format!("unknown section `[{name}]`"),
                    })
                }
            },
        };
        Ok(())
    }

    fn apply(
        &mut self,
        key: &str,
        value: &str,
        line: usize,
        col: usize,
    ) -> Result<(), ConfigError> {
        match self.section {
            Section::Top => self.apply_top(key, value),
            Section::Tolerances => self.apply_tolerances(key, value),
            Section::Input => self.apply_input(key, value),
            Section::Schedule => self.apply_schedule(key, value, line, col),
            Section::Method => self
                .pending
                .as_mut()
                .expect("pending method set with section")
                .apply(key, value),
        }
    }

    fn apply_top(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "case" => {
                let id = CaseId::parse(value)
                    .ok_or_else(|| validation("case", format!("unknown case `{value}`")))?;
                self.cfg.case = id;
            }
            "steps" => self.cfg.steps = parse_usize(key, value)?,
            "window" => self.cfg.window = parse_usize(key, value)?,
            "gamma" => self.cfg.gamma = parse_f64(key, value)?,
            "divergence_ceiling" => self.cfg.divergence_ceiling = parse_f64(key, value)?,
            "seed" => {
                self.cfg.seed = value
                    .parse::<u64>()
                    .map_err(|e| validation(key, e.to_string()))?
            }
            "lambda" => {
                let v = parse_f64(key, value)?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(validation("lambda", format!("must lie in (0, 1), got {v}")));
                }
                self.defaults.lambda = v;
            }
            "mu" => {
                let v = parse_f64(key, value)?;
                if !(0.0..1.0).contains(&v) {
                    return Err(validation("mu", format!("must lie in [0, 1), got {v}")));
                }
                self.defaults.mu = v;
            }
            "gain" => {
                let v = parse_f64(key, value)?;
                if !(v > 0.0 && v < 2.0) {
                    return Err(validation("gain", format!("must lie in (0, 2), got {v}")));
                }
                self.defaults.gain = v;
            }
            "capacity" => self.defaults.capacity = parse_usize(key, value)?,
            _ => return Err(validation(key, "unknown configuration key")),
        }
        Ok(())
    }

    fn apply_tolerances(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = parse_f64(key, value)?;
        match key {
            "eps_rank" => self.cfg.tolerances.eps_rank = v,
            "eps_div" => self.cfg.tolerances.eps_div = v,
            "eps_psd" => self.cfg.tolerances.eps_psd = v,
            _ => return Err(validation(key, "unknown tolerance key")),
        }
        Ok(())
    }

    fn apply_input(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "kind" => {
                self.cfg.input = match value {
                    "sine" => match self.cfg.input {
                        InputSignal::Sine { .. } => self.cfg.input,
                        _ => InputSignal::default(),
                    },
                    "constant" => match self.cfg.input {
                        InputSignal::Constant { .. } => self.cfg.input,
                        _ => InputSignal::Constant { value: 1.0 },
                    },
                    _ => return Err(validation("input.kind", format!("unknown kind `{value}`"))),
                };
            }
            "freq" => {
                let v = parse_f64(key, value)?;
                match &mut self.cfg.input {
                    InputSignal::Sine { freq, .. } => *freq = v,
                    _ => return Err(validation("input.freq", "only meaningful for kind = sine")),
                }
            }
            "amp" => {
                let v = parse_f64(key, value)?;
                match &mut self.cfg.input {
                    InputSignal::Sine { amp, .. } => *amp = v,
                    _ => return Err(validation("input.amp", "only meaningful for kind = sine")),
                }
            }
            "value" => {
                let v = parse_f64(key, value)?;
                match &mut self.cfg.input {
                    InputSignal::Constant { value } => *value = v,
                    _ => {
                        return Err(validation(
                            "input.value",
                            "only meaningful for kind = constant",
                        ))
                    }
                }
            }
            _ => return Err(validation(key, "unknown input key")),
        }
        Ok(())
    }

    fn apply_schedule(
        &mut self,
        key: &str,
        value: &str,
        line: usize,
        col: usize,
    ) -> Result<(), ConfigError> {
        let start: usize = key.parse().map_err(|_| ConfigError::Parse {
            line,
            col,
            msg: format!("schedule keys are step numbers, got `{key}`"),
        })?;
        let label = CaseLabel::parse(value)
            .ok_or_else(|| validation("schedule", format!("unknown plant label `{value}`")))?;
        self.saw_schedule = true;
        self.schedule_entries
            .push((start, PlantModel::preset(label)));
        Ok(())
    }

    fn flush_method(&mut self) -> Result<(), ConfigError> {
        if let Some(pending) = self.pending.take() {
            self.methods.push(pending.build()?);
        }
        Ok(())
    }

    fn finish(mut self) -> Result<ExperimentConfig, ConfigError> {
        self.flush_method()?;
        if self.saw_methods {
            self.cfg.methods = self.methods;
        }
        if self.saw_schedule {
            self.cfg.schedule = ChangeSchedule::new(self.schedule_entries.clone())
                .map_err(|e| validation("schedule", e))?;
        }
        self.cfg.validate().map_err(|e| validation("config", e))?;
        Ok(self.cfg)
    }
}

/// Partially-read `[method …]` section.
struct PendingMethod {
    kind: String,
    lambda: f64,
    mu: f64,
    gain: f64,
    capacity: usize,
    inner: InnerMode,
}

impl PendingMethod {
    fn new(kind: &str, d: MethodDefaults) -> PendingMethod {
        PendingMethod {
            kind: kind.to_string(),
            lambda: d.lambda,
            mu: d.mu,
            gain: d.gain,
            capacity: d.capacity,
            inner: InnerMode::Df,
        }
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "lambda" => self.lambda = parse_f64("lambda", value)?,
            "mu" => self.mu = parse_f64("mu", value)?,
            "gain" => self.gain = parse_f64("gain", value)?,
            "capacity" => self.capacity = parse_usize("capacity", value)?,
            "inner" => {
                self.inner = InnerMode::parse(value)
                    .ok_or_else(|| validation("inner", format!("unknown inner mode `{value}`")))?
            }
            _ => return Err(validation(key, "unknown method key")),
        }
        Ok(())
    }

    fn build(self) -> Result<MethodSpec, ConfigError> {
        let spec = match self.kind.as_str() {
            "ef-rls" => MethodSpec::EfRls {
                lambda: self.lambda,
            },
            "tlf-rls" => MethodSpec::TlfRls {
                inner: self.inner,
                lambda: self.lambda,
                mu: if self.inner == InnerMode::None {
                    0.0
                } else {
                    self.mu
                },
            },
            "dcl" => MethodSpec::Dcl {
                gain: self.gain,
                capacity: self.capacity,
            },
            "df-cl" => MethodSpec::DfCl {
                mu: self.mu,
                gain: self.gain,
            },
            _ => unreachable!("kind checked at section open"),
        };
        spec.validate()
            .map_err(|e| validation(&format!("method {}", self.kind), e))?;
        Ok(spec)
    }
}

fn parse_f64(field: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|e| validation(field, e.to_string()))
}

fn parse_usize(field: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|e| validation(field, e.to_string()))
}

/// Applies `key=value` overrides (CLI `--set`). Section keys use dotted
/// paths (`tolerances.eps_rank`, `input.freq`). Unknown keys are rejected.
pub fn apply_overrides(
    cfg: &mut ExperimentConfig,
    overrides: &[(String, String)],
) -> Result<(), ConfigError> {
    for (key, value) in overrides {
        let v = value.as_str();
        match key.as_str() {
            "steps" => cfg.steps = parse_usize(key, v)?,
            "window" => cfg.window = parse_usize(key, v)?,
            "gamma" => cfg.gamma = parse_f64(key, v)?,
            "divergence_ceiling" => cfg.divergence_ceiling = parse_f64(key, v)?,
            "seed" => {
                cfg.seed = v
                    .parse::<u64>()
                    .map_err(|e| validation(key, e.to_string()))?
            }
            "tolerances.eps_rank" => cfg.tolerances.eps_rank = parse_f64(key, v)?,
            "tolerances.eps_div" => cfg.tolerances.eps_div = parse_f64(key, v)?,
            "tolerances.eps_psd" => cfg.tolerances.eps_psd = parse_f64(key, v)?,
            "input.freq" => match &mut cfg.input {
                InputSignal::Sine { freq, .. } => *freq = parse_f64(key, v)?,
                _ => return Err(validation(key, "input is not a sine")),
            },
            "input.amp" => match &mut cfg.input {
                InputSignal::Sine { amp, .. } => *amp = parse_f64(key, v)?,
                _ => return Err(validation(key, "input is not a sine")),
            },
            "input.value" => match &mut cfg.input {
                InputSignal::Constant { value } => *value = parse_f64(key, v)?,
                _ => return Err(validation(key, "input is not a constant")),
            },
            _ => return Err(validation(key, "unknown override key")),
        }
    }
    cfg.validate().map_err(|e| validation("config", e))?;
    Ok(())
}

/// Renders a config in the same format `parse_config` reads.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "case = {}", cfg.case.as_str());
    let _ = writeln!(out, "steps = {}", cfg.steps);
    let _ = writeln!(out, "window = {}", cfg.window);
    let _ = writeln!(out, "gamma = {}", fmt_float(cfg.gamma));
    let _ = writeln!(
        out,
        "divergence_ceiling = {}",
        fmt_float(cfg.divergence_ceiling)
    );
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "\n[tolerances]");
    let _ = writeln!(out, "eps_rank = {}", fmt_float(cfg.tolerances.eps_rank));
    let _ = writeln!(out, "eps_div = {}", fmt_float(cfg.tolerances.eps_div));
    let _ = writeln!(out, "eps_psd = {}", fmt_float(cfg.tolerances.eps_psd));
    let _ = writeln!(out, "\n[input]");
    match cfg.input {
        InputSignal::Sine { freq, amp } => {
            let _ = writeln!(out, "kind = sine");
            let _ = writeln!(out, "freq = {}", fmt_float(freq));
            let _ = writeln!(out, "amp = {}", fmt_float(amp));
        }
        InputSignal::Constant { value } => {
            let _ = writeln!(out, "kind = constant");
            let _ = writeln!(out, "value = {}", fmt_float(value));
        }
    }
    let _ = writeln!(out, "\n[schedule]");
    for (start, model) in cfg.schedule.entries() {
        let _ = writeln!(out, "{start} = {}", model.label);
    }
    for m in &cfg.methods {
        match m {
            MethodSpec::EfRls { lambda } => {
                let _ = writeln!(out, "\n[method ef-rls]");
                let _ = writeln!(out, "lambda = {}", fmt_float(*lambda));
            }
            MethodSpec::TlfRls { inner, lambda, mu } => {
                let _ = writeln!(out, "\n[method tlf-rls]");
                let _ = writeln!(out, "inner = {}", inner.as_str());
                let _ = writeln!(out, "lambda = {}", fmt_float(*lambda));
                let _ = writeln!(out, "mu = {}", fmt_float(*mu));
            }
            MethodSpec::Dcl { gain, capacity } => {
                let _ = writeln!(out, "\n[method dcl]");
                let _ = writeln!(out, "gain = {}", fmt_float(*gain));
                let _ = writeln!(out, "capacity = {capacity}");
            }
            MethodSpec::DfCl { mu, gain } => {
                let _ = writeln!(out, "\n[method df-cl]");
                let _ = writeln!(out, "mu = {}", fmt_float(*mu));
                let _ = writeln!(out, "gain = {}", fmt_float(*gain));
            }
        }
    }
    out
}

/// Shortest representation that round-trips through `str::parse::<f64>`.
fn fmt_float(v: f64) -> String {
    let short = format!("{v}");
    if short.parse::<f64>() == Ok(v) {
        short
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_yields_case_defaults() {
        let cfg = parse_config("", CaseId::Case1).unwrap();
        assert_eq!(cfg, ExperimentConfig::case1());
        let cfg2 = parse_config("", CaseId::Case2).unwrap();
        assert_eq!(cfg2, ExperimentConfig::case2());
    }

    #[test]
    fn out_of_range_lambda_names_field() {
        let err = parse_config("lambda = 1.5", CaseId::Case1).unwrap_err();
        match err {
            ConfigError::Validation { field, .. } => assert_eq!(field, "lambda"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn override_steps() {
        let mut cfg = parse_config("", CaseId::Case1).unwrap();
        apply_overrides(&mut cfg, &[("steps".into(), "100".into())]).unwrap();
        assert_eq!(cfg.steps, 100);
    }

    #[test]
    fn unknown_override_key_rejected() {
        let mut cfg = ExperimentConfig::case1();
        let err = apply_overrides(&mut cfg, &[("stepz".into(), "5".into())]).unwrap_err();
        match err {
            ConfigError::Validation { field, .. } => assert_eq!(field, "stepz"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn method_sections_replace_defaults() {
        let text = "\
[method tlf-rls]
inner = df
lambda = 0.5
mu = 0.25
";
        let cfg = parse_config(text, CaseId::Case1).unwrap();
        assert_eq!(cfg.methods.len(), 1);
        assert_eq!(
            cfg.methods[0],
            MethodSpec::TlfRls {
                inner: InnerMode::Df,
                lambda: 0.5,
                mu: 0.25
            }
        );
    }

    #[test]
    fn schedule_section_parses() {
        let text = "\
[schedule]
0 = a
10 = c
";
        let cfg = parse_config(text, CaseId::Custom).unwrap();
        assert_eq!(cfg.schedule.entries().len(), 2);
        assert_eq!(cfg.schedule.model_at(9).label, CaseLabel::A);
        assert_eq!(cfg.schedule.model_at(10).label, CaseLabel::C);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_config("steps 100", CaseId::Case1).unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
        let err = parse_config("\n[oops\n", CaseId::Case1).unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn round_trip_case_defaults() {
        for case in [CaseId::Case1, CaseId::Case2] {
            let cfg = parse_config("", case).unwrap();
            let text = emit_config(&cfg);
            let reparsed = parse_config(&text, case).unwrap();
            assert_eq!(cfg, reparsed, "case {}", case.as_str());
        }
    }

    #[test]
    fn round_trip_custom_config() {
        let text = "\
case = custom
steps = 321
gamma = 12.5

[input]
kind = constant
value = 0.75

[schedule]
0 = b
55 = c

[method dcl]
gain = 0.5
capacity = 6

[method ef-rls]
lambda = 0.9
";
        let cfg = parse_config(text, CaseId::Custom).unwrap();
        let reparsed = parse_config(&emit_config(&cfg), CaseId::Custom).unwrap();
        assert_eq!(cfg, reparsed);
        assert_eq!(cfg.steps, 321);
        assert_eq!(cfg.methods.len(), 2);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# leading comment\n\nsteps = 7   # trailing\n";
        let cfg = parse_config(text, CaseId::Case1).unwrap();
        assert_eq!(cfg.steps, 7);
    }
}
