//! Subcommand implementations: each one expands a configuration into
//! independent sweep cells, evaluates them in parallel and renders a table
//! with a fixed column order.

use wlarb_core::{
    min_tuning_range, run_afp, run_cafp, Algorithm, DwdmGridSpec, MinTr, MinTrSearch, Policy,
    StatRecord, TrialPlan, VariationParams, DEFAULT_EPS_NM,
};

use crate::config::{
    AxisKey, ConfigError, ExperimentConfig, MetricKind, Quantity, RangeSpec, Unit,
};
use crate::runner::parallel_map;
use crate::table::{Table, Value};

/// Top-level failure: configuration problems exit with 2, violated internal
/// contracts with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Internal(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Shmoo,
    Mintr,
    Ltd,
    Sensitivity,
    Fsr,
    Breakdown,
    Sample,
}

impl Command {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "shmoo" => Command::Shmoo,
            "mintr" => Command::Mintr,
            "ltd" => Command::Ltd,
            "sensitivity" => Command::Sensitivity,
            "fsr" => Command::Fsr,
            "breakdown" => Command::Breakdown,
            "sample" => Command::Sample,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Shmoo => "shmoo",
            Command::Mintr => "mintr",
            Command::Ltd => "ltd",
            Command::Sensitivity => "sensitivity",
            Command::Fsr => "fsr",
            Command::Breakdown => "breakdown",
            Command::Sample => "sample",
        }
    }

    /// Command-specific defaults layered over the shared baseline.
    pub fn default_config(&self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        match self {
            Command::Shmoo => {}
            Command::Mintr => {
                // Shared relative range so all four DWDM presets sweep the
                // same multiples of their grid spacing.
                cfg.range1 = RangeSpec {
                    start: 25.0,
                    stop: 800.0,
                    step: 25.0,
                    unit: Unit::Percent,
                };
            }
            Command::Ltd => {
                cfg.policy = Policy::LtD;
                cfg.values = vec![
                    Quantity::nm(0.0),
                    Quantity::nm(2.0),
                    Quantity::nm(4.0),
                    Quantity::nm(8.0),
                ];
            }
            Command::Sensitivity => {
                cfg.policy = Policy::LtC;
                cfg.parameter = AxisKey::LaserLocal;
                cfg.range1 = RangeSpec {
                    start: 1.0,
                    stop: 45.0,
                    step: 4.0,
                    unit: Unit::Percent,
                };
            }
            Command::Fsr => {
                cfg.policy = Policy::LtC;
                cfg.axis1 = AxisKey::FsrMean;
                cfg.range1 = RangeSpec {
                    start: 6.72,
                    stop: 15.68,
                    step: 0.28,
                    unit: Unit::Nm,
                };
            }
            Command::Breakdown => {
                cfg.policy = Policy::LtC;
                cfg.metric = MetricKind::Cafp;
                cfg.algorithm = Algorithm::Sequential;
                cfg.range2 = RangeSpec {
                    start: 1.12,
                    stop: 10.08,
                    step: 0.56,
                    unit: Unit::Nm,
                };
            }
            Command::Sample => {}
        }
        cfg
    }
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Table, CliError> {
    match cmd {
        Command::Shmoo => cmd_shmoo(cfg, false),
        Command::Breakdown => cmd_shmoo(cfg, true),
        Command::Mintr => cmd_mintr(cfg),
        Command::Ltd => cmd_ltd(cfg),
        Command::Sensitivity => cmd_sensitivity(cfg),
        Command::Fsr => cmd_fsr(cfg),
        Command::Sample => cmd_sample(cfg),
    }
}

struct SweepContext {
    grid: DwdmGridSpec,
    var: VariationParams,
    fab: wlarb_core::SpectralOrdering,
    target: wlarb_core::SpectralOrdering,
}

fn context(cfg: &ExperimentConfig) -> Result<SweepContext, CliError> {
    let grid = cfg.grid_spec()?;
    let var = cfg.variation()?;
    let fab = cfg.fab_order.build(grid.n_ch);
    let target = cfg.target_order.build(grid.n_ch);
    Ok(SweepContext {
        grid,
        var,
        fab,
        target,
    })
}

fn search_config(cfg: &ExperimentConfig) -> Result<MinTrSearch, CliError> {
    let search = MinTrSearch {
        resolution_nm: cfg.resolution_nm()?,
        ceiling_nm: cfg.ceiling_nm()?,
        n_lasers: cfg.n_lasers,
        n_rows: cfg.n_rows,
    };
    if !(search.resolution_nm > 0.0) || search.ceiling_nm.is_some_and(|c| !(c > 0.0)) {
        return Err(CliError::Config(
            "resolution and ceiling must be positive".into(),
        ));
    }
    Ok(search)
}

/// Shmoo and breakdown: a two-axis grid of AFP (or CAFP plus class tallies).
fn cmd_shmoo(cfg: &ExperimentConfig, breakdown: bool) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    if cfg.axis1 == cfg.axis2 {
        return Err(CliError::Config(
            "shmoo needs two distinct sweep axes".into(),
        ));
    }
    let gs = ctx.grid.grid_spacing_nm;
    let v1 = cfg.axis_points(cfg.axis1, &cfg.range1, gs)?;
    let v2 = cfg.axis_points(cfg.axis2, &cfg.range2, gs)?;
    if v1.is_empty() || v2.is_empty() {
        return Err(CliError::Config("empty sweep range".into()));
    }
    let metric = if breakdown {
        MetricKind::Cafp
    } else {
        cfg.metric
    };

    let mut columns = vec![
        cfg.axis1.column(),
        cfg.axis2.column(),
        "trials".into(),
        "ideal_success".into(),
        "ideal_fail".into(),
        "afp".into(),
    ];
    match (metric, breakdown) {
        (MetricKind::Afp, _) => {}
        (MetricKind::Cafp, false) => {
            for c in [
                "alg_success",
                "alg_zero_lock",
                "alg_dupl_lock",
                "alg_lane_order",
                "cond_success",
                "cond_zero_lock",
                "cond_dupl_lock",
                "cond_lane_order",
                "cafp",
            ] {
                columns.push(c.into());
            }
        }
        (MetricKind::Cafp, true) => {
            for c in ["cond_lock_error", "cond_wrong_order", "cafp"] {
                columns.push(c.into());
            }
        }
    }
    columns.push("seed".into());
    columns.push("cell".into());
    let mut table = Table::new(columns);

    let total = v1.len() * v2.len();
    let records: Vec<Result<StatRecord, String>> = parallel_map(total, cfg.jobs, |idx| {
        let i = idx / v2.len();
        let j = idx % v2.len();
        let mut cell_var = ctx.var.clone();
        cfg.axis1.to_parameter().apply(&mut cell_var, v1[i]);
        cfg.axis2.to_parameter().apply(&mut cell_var, v2[j]);
        let mut plan = TrialPlan::new(ctx.grid.clone(), cell_var, cfg.policy, cfg.seed);
        plan.fab_order = ctx.fab.clone();
        plan.target_order = ctx.target.clone();
        plan.n_lasers = cfg.n_lasers;
        plan.n_rows = cfg.n_rows;
        plan.cell = idx as u64;
        match metric {
            MetricKind::Afp => run_afp(&plan).map_err(|e| e.to_string()),
            MetricKind::Cafp => {
                plan.algorithm = Some(cfg.algorithm);
                run_cafp(&plan).map_err(|e| e.to_string())
            }
        }
    });

    for (idx, record) in records.into_iter().enumerate() {
        let record = record.map_err(CliError::Internal)?;
        let i = idx / v2.len();
        let j = idx % v2.len();
        let mut row = vec![
            Value::Float(v1[i]),
            Value::Float(v2[j]),
            Value::Int(record.trials),
            Value::Int(record.ideal_success),
            Value::Int(record.ideal_fail),
            Value::Float(record.afp),
        ];
        match (metric, breakdown) {
            (MetricKind::Afp, _) => {}
            (MetricKind::Cafp, false) => {
                let alg = record.alg_counts.expect("conditional run tallies outcomes");
                let cond = record
                    .cond_counts
                    .expect("conditional run tallies outcomes");
                row.extend([
                    Value::Int(alg.success),
                    Value::Int(alg.zero_lock),
                    Value::Int(alg.dupl_lock),
                    Value::Int(alg.lane_order),
                    Value::Int(cond.success),
                    Value::Int(cond.zero_lock),
                    Value::Int(cond.dupl_lock),
                    Value::Int(cond.lane_order),
                    record.cafp.map_or(Value::Missing, Value::Float),
                ]);
            }
            (MetricKind::Cafp, true) => {
                let cond = record
                    .cond_counts
                    .expect("conditional run tallies outcomes");
                row.extend([
                    Value::Int(cond.lock_errors()),
                    Value::Int(cond.lane_order),
                    record.cafp.map_or(Value::Missing, Value::Float),
                ]);
            }
        }
        row.push(Value::Int(cfg.seed));
        row.push(Value::Int(idx as u64));
        table.push(row);
    }
    Ok(table)
}

const DWDM_PRESETS: [(&str, usize, f64); 4] = [
    ("wdm8-g200", 8, 1.12),
    ("wdm8-g400", 8, 2.24),
    ("wdm16-g200", 16, 1.12),
    ("wdm16-g400", 16, 2.24),
];

/// Minimum tuning range vs ring local variation, across the four DWDM
/// presets, with grid-spacing-normalized companion columns.
fn cmd_mintr(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    if cfg.axis1 != AxisKey::RingLocal {
        return Err(CliError::Config("mintr sweeps ring_local on axis1".into()));
    }
    let search = search_config(cfg)?;

    struct Cell {
        preset: usize,
        sigma_nm: f64,
        gs: f64,
    }
    let mut cells: Vec<Cell> = Vec::new();
    for (pi, &(_, _, gs)) in DWDM_PRESETS.iter().enumerate() {
        for sigma in cfg.axis_points(AxisKey::RingLocal, &cfg.range1, gs)? {
            cells.push(Cell {
                preset: pi,
                sigma_nm: sigma,
                gs,
            });
        }
    }
    if cells.is_empty() {
        return Err(CliError::Config("empty sweep range".into()));
    }

    let results: Vec<Result<MinTr, String>> = parallel_map(cells.len(), cfg.jobs, |idx| {
        let cell = &cells[idx];
        let (_, n_ch, gs) = DWDM_PRESETS[cell.preset];
        let grid = DwdmGridSpec::scaled(n_ch, gs).map_err(|e| e.to_string())?;
        let mut var = VariationParams::defaults_for(&grid);
        var.grid_offset_bound_nm = offset_nm(cfg.grid_offset, gs);
        var.laser_local_bound_nm = offset_nm(cfg.laser_local, gs);
        var.fsr_rel_bound = rel_frac(cfg.fsr_var, var.fsr_mean_nm);
        var.tr_rel_bound = rel_frac(cfg.tr_var, var.tr_mean_nm);
        var.ring_local_bound_nm = cell.sigma_nm;
        let fab = cfg.fab_order.build(n_ch);
        let target = cfg.target_order.build(n_ch);
        min_tuning_range(
            &grid, &var, cfg.policy, &fab, &target, &search, cfg.seed, idx as u64,
        )
        .map_err(|e| e.to_string())
    });

    let mut table = Table::new(
        [
            "dwdm",
            "policy",
            "fab_order",
            "target_order",
            "ring_local_nm",
            "ring_local_per_gs",
            "min_tr_nm",
            "min_tr_per_gs",
            "above_ceiling",
            "trials",
            "seed",
            "cell",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (idx, result) in results.into_iter().enumerate() {
        let min_tr = result.map_err(CliError::Internal)?;
        let cell = &cells[idx];
        let mut row = vec![
            Value::Text(DWDM_PRESETS[cell.preset].0.to_string()),
            Value::Text(cfg.policy.name().to_string()),
            Value::Text(cfg.fab_order.name().to_string()),
            Value::Text(cfg.target_order.name().to_string()),
            Value::Float(cell.sigma_nm),
            Value::Float(cell.sigma_nm / cell.gs),
        ];
        match min_tr {
            MinTr::Nm(v) => {
                row.push(Value::Float(v));
                row.push(Value::Float(v / cell.gs));
                row.push(Value::Int(0));
            }
            MinTr::AboveMax => {
                row.push(Value::Missing);
                row.push(Value::Missing);
                row.push(Value::Int(1));
            }
        }
        row.push(Value::Int(cfg.n_lasers as u64 * cfg.n_rows as u64));
        row.push(Value::Int(cfg.seed));
        row.push(Value::Int(idx as u64));
        table.push(row);
    }
    Ok(table)
}

/// Minimum tuning range for the deterministic policy over (grid offset,
/// ring local variation) pairs.
fn cmd_ltd(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    if cfg.axis1 != AxisKey::RingLocal {
        return Err(CliError::Config("ltd sweeps ring_local on axis1".into()));
    }
    if cfg.values.is_empty() {
        return Err(CliError::Config(
            "ltd needs grid-offset values, e.g. `values = 0 nm, 2 nm, 4 nm` in [sweep]".into(),
        ));
    }
    let gs = ctx.grid.grid_spacing_nm;
    let offsets: Vec<f64> = cfg.values.iter().map(|q| offset_nm(*q, gs)).collect();
    let sigmas = cfg.axis_points(AxisKey::RingLocal, &cfg.range1, gs)?;
    if sigmas.is_empty() {
        return Err(CliError::Config("empty sweep range".into()));
    }
    let search = search_config(cfg)?;

    let total = offsets.len() * sigmas.len();
    let results: Vec<Result<MinTr, String>> = parallel_map(total, cfg.jobs, |idx| {
        let oi = idx / sigmas.len();
        let si = idx % sigmas.len();
        let mut var = ctx.var.clone();
        var.grid_offset_bound_nm = offsets[oi];
        var.ring_local_bound_nm = sigmas[si];
        min_tuning_range(
            &ctx.grid,
            &var,
            Policy::LtD,
            &ctx.fab,
            &ctx.target,
            &search,
            cfg.seed,
            idx as u64,
        )
        .map_err(|e| e.to_string())
    });

    let mut table = Table::new(
        [
            "grid_offset_nm",
            "ring_local_nm",
            "min_tr_nm",
            "above_ceiling",
            "trials",
            "seed",
            "cell",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (idx, result) in results.into_iter().enumerate() {
        let min_tr = result.map_err(CliError::Internal)?;
        let oi = idx / sigmas.len();
        let si = idx % sigmas.len();
        let mut prefix = vec![Value::Float(offsets[oi]), Value::Float(sigmas[si])];
        match min_tr {
            MinTr::Nm(v) => prefix.extend([Value::Float(v), Value::Int(0)]),
            MinTr::AboveMax => prefix.extend([Value::Missing, Value::Int(1)]),
        }
        prefix.push(Value::Int(cfg.n_lasers as u64 * cfg.n_rows as u64));
        prefix.push(Value::Int(cfg.seed));
        prefix.push(Value::Int(idx as u64));
        table.push(prefix);
    }
    Ok(table)
}

/// Local sensitivity of the minimum tuning range to one variation parameter.
fn cmd_sensitivity(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    if cfg.parameter == AxisKey::TrMean {
        return Err(CliError::Config(
            "tuning-range mean is the searched quantity; pick another parameter".into(),
        ));
    }
    let values = cfg.axis_points(cfg.parameter, &cfg.range1, ctx.grid.grid_spacing_nm)?;
    if values.is_empty() {
        return Err(CliError::Config("empty sweep range".into()));
    }
    let search = search_config(cfg)?;

    let results: Vec<Result<MinTr, String>> = parallel_map(values.len(), cfg.jobs, |idx| {
        let mut var = ctx.var.clone();
        cfg.parameter.to_parameter().apply(&mut var, values[idx]);
        min_tuning_range(
            &ctx.grid,
            &var,
            cfg.policy,
            &ctx.fab,
            &ctx.target,
            &search,
            cfg.seed,
            idx as u64,
        )
        .map_err(|e| e.to_string())
    });

    let mut table = Table::new(
        [
            "parameter",
            "policy",
            "value",
            "min_tr_nm",
            "above_ceiling",
            "trials",
            "seed",
            "cell",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (idx, result) in results.into_iter().enumerate() {
        let min_tr = result.map_err(CliError::Internal)?;
        let prefix = vec![
            Value::Text(cfg.parameter.column()),
            Value::Text(cfg.policy.name().to_string()),
            Value::Float(values[idx]),
        ];
        let mut row = prefix;
        match min_tr {
            MinTr::Nm(v) => row.extend([Value::Float(v), Value::Int(0)]),
            MinTr::AboveMax => row.extend([Value::Missing, Value::Int(1)]),
        }
        row.push(Value::Int(cfg.n_lasers as u64 * cfg.n_rows as u64));
        row.push(Value::Int(cfg.seed));
        row.push(Value::Int(idx as u64));
        table.push(row);
    }
    Ok(table)
}

/// Minimum tuning range across FSR means; the search ceiling follows the
/// swept mean.
fn cmd_fsr(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    if cfg.axis1 != AxisKey::FsrMean {
        return Err(CliError::Config("fsr sweeps fsr_mean on axis1".into()));
    }
    let values = cfg.axis_points(AxisKey::FsrMean, &cfg.range1, ctx.grid.grid_spacing_nm)?;
    if values.is_empty() {
        return Err(CliError::Config("empty sweep range".into()));
    }
    let search = search_config(cfg)?;

    let results: Vec<Result<MinTr, String>> = parallel_map(values.len(), cfg.jobs, |idx| {
        let mut var = ctx.var.clone();
        var.fsr_mean_nm = values[idx];
        min_tuning_range(
            &ctx.grid,
            &var,
            cfg.policy,
            &ctx.fab,
            &ctx.target,
            &search,
            cfg.seed,
            idx as u64,
        )
        .map_err(|e| e.to_string())
    });

    let mut table = Table::new(
        [
            "fsr_mean_nm",
            "policy",
            "min_tr_nm",
            "above_ceiling",
            "trials",
            "seed",
            "cell",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (idx, result) in results.into_iter().enumerate() {
        let min_tr = result.map_err(CliError::Internal)?;
        let mut row = vec![
            Value::Float(values[idx]),
            Value::Text(cfg.policy.name().to_string()),
        ];
        match min_tr {
            MinTr::Nm(v) => row.extend([Value::Float(v), Value::Int(0)]),
            MinTr::AboveMax => row.extend([Value::Missing, Value::Int(1)]),
        }
        row.push(Value::Int(cfg.n_lasers as u64 * cfg.n_rows as u64));
        row.push(Value::Int(cfg.seed));
        row.push(Value::Int(idx as u64));
        table.push(row);
    }
    Ok(table)
}

/// Dumps one sampled system (laser comb plus ring row with reachability)
/// for inspection.
fn cmd_sample(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ctx = context(cfg)?;
    let mut plan = TrialPlan::new(ctx.grid.clone(), ctx.var.clone(), cfg.policy, cfg.seed);
    plan.fab_order = ctx.fab.clone();
    plan.target_order = ctx.target.clone();
    plan.n_lasers = 1;
    plan.n_rows = 1;
    let mwl = plan.sample_lasers().pop().expect("one laser sample");
    let row = plan.sample_rows().pop().expect("one row sample");

    let mut table = Table::new(
        [
            "kind",
            "index",
            "rank",
            "wavelength_nm",
            "fsr_nm",
            "tr_nm",
            "reachable",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (i, &w) in mwl.wavelengths().iter().enumerate() {
        table.push(vec![
            Value::Text("laser".into()),
            Value::Int(i as u64),
            Value::Missing,
            Value::Float(w),
            Value::Missing,
            Value::Missing,
            Value::Missing,
        ]);
    }
    for ring in 0..row.n_ch() {
        let reachable: Vec<String> = row
            .reachable_lasers(ring, &mwl, DEFAULT_EPS_NM)
            .into_iter()
            .map(|l| l.to_string())
            .collect();
        table.push(vec![
            Value::Text("ring".into()),
            Value::Int(ring as u64),
            Value::Int(ctx.fab.rank_of(ring) as u64),
            Value::Float(row.resonance(ring)),
            Value::Float(row.fsr(ring)),
            Value::Float(row.tr(ring)),
            Value::Text(reachable.join("|")),
        ]);
    }
    Ok(table)
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
