//! Structured-text experiment configuration.
//!
//! The format is line-oriented: `[section]` headers, `key = value` pairs and
//! `#` comments. Physical quantities carry explicit units, `nm` for absolute
//! wavelengths and `%` for values relative to a context-dependent base (the
//! grid spacing for local and offset bounds, the respective mean for FSR and
//! tuning-range bounds). Unknown sections or keys are rejected.
//!
//! ```text
//! [grid]
//! n_ch = 8
//! grid_spacing = 1.12 nm
//! center = 1300 nm
//! ring_bias = 4.48 nm
//!
//! [variation]
//! grid_offset = 15 nm
//! laser_local = 25 %
//! ring_local = 2.24 nm
//! fsr_mean = 8.96 nm
//! fsr_var = 1 %
//! tr_mean = 2.24 nm
//! tr_var = 10 %
//!
//! [arbiter]
//! policy = ltc
//! fab_order = natural
//! target_order = natural
//! algorithm = vt-rs-ssm
//! metric = cafp
//!
//! [sweep]
//! axis1 = ring_local
//! range1 = 0.28 : 8.96 : 0.28 nm
//! axis2 = tr_mean
//! range2 = 1.12 : 10.08 : 0.28 nm
//! resolution = 0.056 nm
//!
//! [run]
//! seed = 7
//! n_lasers = 100
//! n_rows = 100
//! jobs = 0
//! format = csv
//! ```

use std::fmt;

use wlarb_core::{
    Algorithm, DwdmGridSpec, Policy, SpectralOrdering, SweepParameter, VariationParams,
};

/// Configuration or usage error; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, msg: impl fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("line {line}: {msg}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Nm,
    Percent,
}

impl Unit {
    fn token(&self) -> &'static str {
        match self {
            Unit::Nm => "nm",
            Unit::Percent => "%",
        }
    }
}

/// A number with its declared unit, kept as written for exact round-trips.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub const fn nm(value: f64) -> Self {
        Quantity {
            value,
            unit: Unit::Nm,
        }
    }

    pub const fn pct(value: f64) -> Self {
        Quantity {
            value,
            unit: Unit::Percent,
        }
    }

    fn render(&self) -> String {
        format!("{} {}", self.value, self.unit.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingKind {
    Natural,
    Permuted,
}

impl OrderingKind {
    pub fn build(&self, n: usize) -> SpectralOrdering {
        match self {
            OrderingKind::Natural => SpectralOrdering::natural(n),
            OrderingKind::Permuted => SpectralOrdering::permuted(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OrderingKind::Natural => "natural",
            OrderingKind::Permuted => "permuted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Afp,
    Cafp,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Afp => "afp",
            MetricKind::Cafp => "cafp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

/// Sweepable model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKey {
    GridOffset,
    LaserLocal,
    RingLocal,
    FsrVar,
    TrVar,
    FsrMean,
    TrMean,
}

impl AxisKey {
    pub fn parse(token: &str) -> Option<Self> {
        Some(match token {
            "grid_offset" => AxisKey::GridOffset,
            "laser_local" => AxisKey::LaserLocal,
            "ring_local" => AxisKey::RingLocal,
            "fsr_var" => AxisKey::FsrVar,
            "tr_var" => AxisKey::TrVar,
            "fsr_mean" => AxisKey::FsrMean,
            "tr_mean" => AxisKey::TrMean,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AxisKey::GridOffset => "grid_offset",
            AxisKey::LaserLocal => "laser_local",
            AxisKey::RingLocal => "ring_local",
            AxisKey::FsrVar => "fsr_var",
            AxisKey::TrVar => "tr_var",
            AxisKey::FsrMean => "fsr_mean",
            AxisKey::TrMean => "tr_mean",
        }
    }

    /// True for bounds expressed as fractions of their mean.
    pub fn is_relative(&self) -> bool {
        matches!(self, AxisKey::FsrVar | AxisKey::TrVar)
    }

    /// Result-column name with the canonical unit suffix.
    pub fn column(&self) -> String {
        format!(
            "{}_{}",
            self.name(),
            if self.is_relative() { "frac" } else { "nm" }
        )
    }

    pub fn to_parameter(&self) -> SweepParameter {
        match self {
            AxisKey::GridOffset => SweepParameter::GridOffset,
            AxisKey::LaserLocal => SweepParameter::LaserLocal,
            AxisKey::RingLocal => SweepParameter::RingLocal,
            AxisKey::FsrVar => SweepParameter::FsrRel,
            AxisKey::TrVar => SweepParameter::TrRel,
            AxisKey::FsrMean => SweepParameter::FsrMean,
            AxisKey::TrMean => SweepParameter::TrMean,
        }
    }
}

/// Inclusive sweep range with a shared unit: `start : stop : step unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub unit: Unit,
}

impl RangeSpec {
    fn render(&self) -> String {
        format!(
            "{} : {} : {} {}",
            self.start,
            self.stop,
            self.step,
            self.unit.token()
        )
    }

    /// Grid points in the range's own unit.
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Err(ConfigError(format!("bad sweep range {}", self.render())));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect())
    }
}

/// Full experiment configuration; every command reads the subset it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    // [grid]
    pub n_ch: usize,
    pub grid_spacing: Quantity,
    pub center: Quantity,
    pub ring_bias: Quantity,
    // [variation]
    pub grid_offset: Quantity,
    pub laser_local: Quantity,
    pub ring_local: Quantity,
    pub fsr_mean: Quantity,
    pub fsr_var: Quantity,
    pub tr_mean: Quantity,
    pub tr_var: Quantity,
    // [arbiter]
    pub policy: Policy,
    pub fab_order: OrderingKind,
    pub target_order: OrderingKind,
    pub algorithm: Algorithm,
    pub metric: MetricKind,
    // [sweep]
    pub axis1: AxisKey,
    pub range1: RangeSpec,
    pub axis2: AxisKey,
    pub range2: RangeSpec,
    pub values: Vec<Quantity>,
    pub parameter: AxisKey,
    pub resolution: Quantity,
    pub ceiling: Option<Quantity>,
    // [run]
    pub seed: u64,
    pub n_lasers: usize,
    pub n_rows: usize,
    pub jobs: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_ch: 8,
            grid_spacing: Quantity::nm(1.12),
            center: Quantity::nm(1300.0),
            ring_bias: Quantity::nm(4.48),
            grid_offset: Quantity::nm(15.0),
            laser_local: Quantity::nm(0.28),
            ring_local: Quantity::nm(2.24),
            fsr_mean: Quantity::nm(8.96),
            fsr_var: Quantity::pct(1.0),
            tr_mean: Quantity::nm(2.24),
            tr_var: Quantity::pct(10.0),
            policy: Policy::LtA,
            fab_order: OrderingKind::Natural,
            target_order: OrderingKind::Natural,
            algorithm: Algorithm::VtRsSsm,
            metric: MetricKind::Afp,
            axis1: AxisKey::RingLocal,
            range1: RangeSpec {
                start: 0.28,
                stop: 8.96,
                step: 0.28,
                unit: Unit::Nm,
            },
            axis2: AxisKey::TrMean,
            range2: RangeSpec {
                start: 1.12,
                stop: 10.08,
                step: 0.28,
                unit: Unit::Nm,
            },
            values: Vec::new(),
            parameter: AxisKey::LaserLocal,
            resolution: Quantity::nm(0.056),
            ceiling: None,
            seed: 7,
            n_lasers: 100,
            n_rows: 100,
            jobs: 0,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn grid_spec(&self) -> Result<DwdmGridSpec, ConfigError> {
        let spec = DwdmGridSpec::new(
            self.n_ch,
            self.length_nm(self.grid_spacing, "grid_spacing")?,
            self.length_nm(self.center, "center")?,
            self.length_nm(self.ring_bias, "ring_bias")?,
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        Ok(spec)
    }

    /// Variation parameters in canonical units, resolving `%` against the
    /// configured grid spacing (offsets/local bounds) or means (FSR/TR).
    pub fn variation(&self) -> Result<VariationParams, ConfigError> {
        let gs = self.length_nm(self.grid_spacing, "grid_spacing")?;
        let fsr_mean = self.length_nm(self.fsr_mean, "fsr_mean")?;
        let tr_mean = self.length_nm(self.tr_mean, "tr_mean")?;
        let var = VariationParams {
            grid_offset_bound_nm: offset_nm(self.grid_offset, gs),
            laser_local_bound_nm: offset_nm(self.laser_local, gs),
            ring_local_bound_nm: offset_nm(self.ring_local, gs),
            fsr_mean_nm: fsr_mean,
            fsr_rel_bound: rel_frac(self.fsr_var, fsr_mean),
            tr_mean_nm: tr_mean,
            tr_rel_bound: rel_frac(self.tr_var, tr_mean),
            ..VariationParams::default()
        };
        var.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(var)
    }

    fn length_nm(&self, q: Quantity, what: &str) -> Result<f64, ConfigError> {
        match q.unit {
            Unit::Nm => Ok(q.value),
            Unit::Percent => Err(ConfigError(format!("{what} must be given in nm"))),
        }
    }

    /// Canonical (nm or fraction) sweep values for an axis, resolved against
    /// a grid spacing and the configured means.
    pub fn axis_points(
        &self,
        axis: AxisKey,
        range: &RangeSpec,
        gs_nm: f64,
    ) -> Result<Vec<f64>, ConfigError> {
        let raw = range.points()?;
        Ok(raw
            .into_iter()
            .map(|v| {
                self.axis_value(
                    axis,
                    Quantity {
                        value: v,
                        unit: range.unit,
                    },
                    gs_nm,
                )
            })
            .collect::<Result<_, _>>()?)
    }

    /// One axis value in canonical units.
    pub fn axis_value(&self, axis: AxisKey, q: Quantity, gs_nm: f64) -> Result<f64, ConfigError> {
        Ok(match axis {
            AxisKey::GridOffset | AxisKey::LaserLocal | AxisKey::RingLocal => offset_nm(q, gs_nm),
            AxisKey::FsrVar => rel_frac(q, self.length_nm(self.fsr_mean, "fsr_mean")?),
            AxisKey::TrVar => rel_frac(q, self.length_nm(self.tr_mean, "tr_mean")?),
            AxisKey::FsrMean | AxisKey::TrMean => match q.unit {
                Unit::Nm => q.value,
                Unit::Percent => {
                    return Err(ConfigError(format!("{} must be given in nm", axis.name())))
                }
            },
        })
    }

    pub fn resolution_nm(&self) -> Result<f64, ConfigError> {
        self.length_nm(self.resolution, "resolution")
    }

    pub fn ceiling_nm(&self) -> Result<Option<f64>, ConfigError> {
        self.ceiling
            .map(|q| self.length_nm(q, "ceiling"))
            .transpose()
    }

    /// Canonical serialization; parsing it back reproduces the config
    /// exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str("[grid]\n");
        s.push_str(&format!("n_ch = {}\n", self.n_ch));
        s.push_str(&format!("grid_spacing = {}\n", self.grid_spacing.render()));
        s.push_str(&format!("center = {}\n", self.center.render()));
        s.push_str(&format!("ring_bias = {}\n", self.ring_bias.render()));
        s.push_str("\n[variation]\n");
        s.push_str(&format!("grid_offset = {}\n", self.grid_offset.render()));
        s.push_str(&format!("laser_local = {}\n", self.laser_local.render()));
        s.push_str(&format!("ring_local = {}\n", self.ring_local.render()));
        s.push_str(&format!("fsr_mean = {}\n", self.fsr_mean.render()));
        s.push_str(&format!("fsr_var = {}\n", self.fsr_var.render()));
        s.push_str(&format!("tr_mean = {}\n", self.tr_mean.render()));
        s.push_str(&format!("tr_var = {}\n", self.tr_var.render()));
        s.push_str("\n[arbiter]\n");
        s.push_str(&format!("policy = {}\n", self.policy.name()));
        s.push_str(&format!("fab_order = {}\n", self.fab_order.name()));
        s.push_str(&format!("target_order = {}\n", self.target_order.name()));
        s.push_str(&format!("algorithm = {}\n", self.algorithm.name()));
        s.push_str(&format!("metric = {}\n", self.metric.name()));
        s.push_str("\n[sweep]\n");
        s.push_str(&format!("axis1 = {}\n", self.axis1.name()));
        s.push_str(&format!("range1 = {}\n", self.range1.render()));
        s.push_str(&format!("axis2 = {}\n", self.axis2.name()));
        s.push_str(&format!("range2 = {}\n", self.range2.render()));
        if !self.values.is_empty() {
            let rendered: Vec<String> = self.values.iter().map(|q| q.render()).collect();
            s.push_str(&format!("values = {}\n", rendered.join(", ")));
        }
        s.push_str(&format!("parameter = {}\n", self.parameter.name()));
        s.push_str(&format!("resolution = {}\n", self.resolution.render()));
        if let Some(c) = self.ceiling {
            s.push_str(&format!("ceiling = {}\n", c.render()));
        }
        s.push_str("\n[run]\n");
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("n_lasers = {}\n", self.n_lasers));
        s.push_str(&format!("n_rows = {}\n", self.n_rows));
        s.push_str(&format!("jobs = {}\n", self.jobs));
        if let Some(out) = &self.out {
            s.push_str(&format!("out = {out}\n"));
        }
        s.push_str(&format!("format = {}\n", self.format.name()));
        s
    }
}

fn offset_nm(q: Quantity, gs_nm: f64) -> f64 {
    match q.unit {
        Unit::Nm => q.value,
        Unit::Percent => q.value / 100.0 * gs_nm,
    }
}

fn rel_frac(q: Quantity, mean_nm: f64) -> f64 {
    match q.unit {
        Unit::Percent => q.value / 100.0,
        Unit::Nm => q.value / mean_nm,
    }
}

fn parse_quantity(line: usize, raw: &str) -> Result<Quantity, ConfigError> {
    let raw = raw.trim();
    let (num, unit) = if let Some(stripped) = raw.strip_suffix('%') {
        (stripped.trim(), Unit::Percent)
    } else if let Some(stripped) = raw.strip_suffix("nm") {
        (stripped.trim(), Unit::Nm)
    } else {
        return err(line, format_args!("`{raw}` needs a unit (nm or %)"));
    };
    let value: f64 = num
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: `{num}` is not a number")))?;
    if !value.is_finite() {
        return err(line, "quantity must be finite");
    }
    Ok(Quantity { value, unit })
}

fn parse_range(line: usize, raw: &str) -> Result<RangeSpec, ConfigError> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return err(line, "range must be `start : stop : step unit`");
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: bad range start")))?;
    let stop: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: bad range stop")))?;
    let step_q = parse_quantity(line, parts[2])?;
    Ok(RangeSpec {
        start,
        stop,
        step: step_q.value,
        unit: step_q.unit,
    })
}

fn parse_int<T: core::str::FromStr>(line: usize, raw: &str, what: &str) -> Result<T, ConfigError> {
    raw.trim()
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: `{raw}` is not a valid {what}")))
}

/// Parses `text`, applying every assignment over `base`.
pub fn parse_config(text: &str, base: &ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = base.clone();
    let mut section: Option<&str> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.split_once('#') {
            Some((before, _)) => before,
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line, "unterminated section header");
            };
            section = Some(match name.trim() {
                "grid" => "grid",
                "variation" => "variation",
                "arbiter" => "arbiter",
                "sweep" => "sweep",
                "run" => "run",
                other => return err(line, format_args!("unknown section `{other}`")),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(line, "expected `key = value`");
        };
        let key = key.trim();
        let value = value.trim();
        let Some(section) = section else {
            return err(line, "key outside any section");
        };
        match (section, key) {
            ("grid", "n_ch") => cfg.n_ch = parse_int(line, value, "channel count")?,
            ("grid", "grid_spacing") => cfg.grid_spacing = parse_quantity(line, value)?,
            ("grid", "center") => cfg.center = parse_quantity(line, value)?,
            ("grid", "ring_bias") => cfg.ring_bias = parse_quantity(line, value)?,
            ("variation", "grid_offset") => cfg.grid_offset = parse_quantity(line, value)?,
            ("variation", "laser_local") => cfg.laser_local = parse_quantity(line, value)?,
            ("variation", "ring_local") => cfg.ring_local = parse_quantity(line, value)?,
            ("variation", "fsr_mean") => cfg.fsr_mean = parse_quantity(line, value)?,
            ("variation", "fsr_var") => cfg.fsr_var = parse_quantity(line, value)?,
            ("variation", "tr_mean") => cfg.tr_mean = parse_quantity(line, value)?,
            ("variation", "tr_var") => cfg.tr_var = parse_quantity(line, value)?,
            ("arbiter", "policy") => {
                cfg.policy = match value {
                    "ltd" => Policy::LtD,
                    "ltc" => Policy::LtC,
                    "lta" => Policy::LtA,
                    other => return err(line, format_args!("unknown policy `{other}`")),
                }
            }
            ("arbiter", "fab_order") => cfg.fab_order = parse_ordering(line, value)?,
            ("arbiter", "target_order") => cfg.target_order = parse_ordering(line, value)?,
            ("arbiter", "algorithm") => {
                cfg.algorithm = match value {
                    "sequential" => Algorithm::Sequential,
                    "rs-ssm" => Algorithm::RsSsm,
                    "vt-rs-ssm" => Algorithm::VtRsSsm,
                    other => return err(line, format_args!("unknown algorithm `{other}`")),
                }
            }
            ("arbiter", "metric") => {
                cfg.metric = match value {
                    "afp" => MetricKind::Afp,
                    "cafp" => MetricKind::Cafp,
                    other => return err(line, format_args!("unknown metric `{other}`")),
                }
            }
            ("sweep", "axis1") => cfg.axis1 = parse_axis(line, value)?,
            ("sweep", "axis2") => cfg.axis2 = parse_axis(line, value)?,
            ("sweep", "parameter") => cfg.parameter = parse_axis(line, value)?,
            ("sweep", "range1") => cfg.range1 = parse_range(line, value)?,
            ("sweep", "range2") => cfg.range2 = parse_range(line, value)?,
            ("sweep", "values") => {
                cfg.values = value
                    .split(',')
                    .map(|v| parse_quantity(line, v))
                    .collect::<Result<_, _>>()?;
            }
            ("sweep", "resolution") => cfg.resolution = parse_quantity(line, value)?,
            ("sweep", "ceiling") => cfg.ceiling = Some(parse_quantity(line, value)?),
            ("run", "seed") => cfg.seed = parse_int(line, value, "seed")?,
            ("run", "n_lasers") => cfg.n_lasers = parse_int(line, value, "count")?,
            ("run", "n_rows") => cfg.n_rows = parse_int(line, value, "count")?,
            ("run", "jobs") => cfg.jobs = parse_int(line, value, "count")?,
            ("run", "out") => cfg.out = Some(value.to_string()),
            ("run", "format") => {
                cfg.format = match value {
                    "csv" => OutputFormat::Csv,
                    "jsonl" => OutputFormat::Jsonl,
                    other => return err(line, format_args!("unknown format `{other}`")),
                }
            }
            (section, key) => {
                return err(
                    line,
                    format_args!("unknown key `{key}` in section [{section}]"),
                )
            }
        }
    }
    Ok(cfg)
}

fn parse_ordering(line: usize, value: &str) -> Result<OrderingKind, ConfigError> {
    match value {
        "natural" => Ok(OrderingKind::Natural),
        "permuted" => Ok(OrderingKind::Permuted),
        other => err(line, format_args!("unknown ordering `{other}`")),
    }
}

fn parse_axis(line: usize, value: &str) -> Result<AxisKey, ConfigError> {
    AxisKey::parse(value).ok_or_else(|| ConfigError(format!("line {line}: unknown axis `{value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let base = ExperimentConfig::default();
        let mut cfg = base.clone();
        cfg.policy = Policy::LtC;
        cfg.metric = MetricKind::Cafp;
        cfg.laser_local = Quantity::pct(25.0);
        cfg.values = vec![Quantity::nm(0.0), Quantity::nm(2.0)];
        cfg.ceiling = Some(Quantity::nm(17.92));
        cfg.out = Some("result.csv".into());
        cfg.seed = 12345;
        let text = cfg.serialize();
        let reparsed = parse_config(&text, &base).unwrap();
        assert_eq!(reparsed, cfg);
        let text2 = reparsed.serialize();
        assert_eq!(text, text2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let base = ExperimentConfig::default();
        let bad = "[grid]\nn_channels = 8\n";
        let e = parse_config(bad, &base).unwrap_err();
        assert!(e.0.contains("unknown key"), "{e}");
        let bad = "[nope]\n";
        assert!(parse_config(bad, &base).is_err());
        let bad = "n_ch = 8\n";
        assert!(parse_config(bad, &base).is_err());
    }

    #[test]
    fn quantities_require_units() {
        let base = ExperimentConfig::default();
        assert!(parse_config("[variation]\nring_local = 2.24\n", &base).is_err());
        let ok = parse_config("[variation]\nring_local = 200 %\n", &base).unwrap();
        assert_eq!(ok.ring_local, Quantity::pct(200.0));
        let var = ok.variation().unwrap();
        assert!((var.ring_local_bound_nm - 2.24).abs() < 1e-12);
    }

    #[test]
    fn percent_rejected_for_pure_lengths() {
        let base = ExperimentConfig::default();
        let cfg = parse_config("[variation]\nfsr_mean = 10 %\n", &base).unwrap();
        assert!(cfg.variation().is_err());
    }

    #[test]
    fn relative_bounds_accept_both_units() {
        let base = ExperimentConfig::default();
        let cfg = parse_config("[variation]\ntr_var = 0.224 nm\n", &base).unwrap();
        let var = cfg.variation().unwrap();
        assert!((var.tr_rel_bound - 0.1).abs() < 1e-12);
        let cfg = parse_config("[variation]\ntr_var = 20 %\n", &base).unwrap();
        assert!((cfg.variation().unwrap().tr_rel_bound - 0.2).abs() < 1e-12);
    }

    #[test]
    fn ranges_parse_and_enumerate() {
        let base = ExperimentConfig::default();
        let cfg = parse_config("[sweep]\nrange1 = 0.28 : 1.12 : 0.28 nm\n", &base).unwrap();
        let pts = cfg.range1.points().unwrap();
        assert_eq!(pts.len(), 4);
        assert!((pts[3] - 1.12).abs() < 1e-12);
        let bad = RangeSpec {
            start: 2.0,
            stop: 1.0,
            step: 0.5,
            unit: Unit::Nm,
        };
        assert!(bad.points().is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let base = ExperimentConfig::default();
        let text = "# heading\n\n[run]\nseed = 9 # trailing\n";
        let cfg = parse_config(text, &base).unwrap();
        assert_eq!(cfg.seed, 9);
    }
}
