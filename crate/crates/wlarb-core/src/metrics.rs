//! Trial orchestration and robustness statistics.
//!
//! A trial plan crosses `n_lasers` sampled combs with `n_rows` sampled ring
//! rows; trial `(a, b)` pairs laser sample `a` with row sample `b`. Sample
//! streams are derived from `(master_seed, cell, kind, index)`, so sweep
//! cells are independent yet individually reproducible, and results do not
//! depend on evaluation order.
//!
//! Two headline metrics:
//! - failure probability: fraction of trials where the wavelength-aware
//!   arbiter finds the policy infeasible;
//! - conditional failure probability: fraction of ideal-feasible trials
//!   where a wavelength-oblivious algorithm fails the referee.

use alloc::vec::Vec;

use crate::algo::{run_algorithm, Algorithm};
use crate::env::{ArbitrationOutcome, EnvState};
use crate::grid::{DwdmGridSpec, SpectralOrdering};
use crate::ideal::{arbitrate_ideal, Policy};
use crate::rng::{derive_seed, Rng};
use crate::sample::{sample_mwl, sample_ring_row, MwlSample, RingRowSample};
use crate::variation::VariationParams;
use crate::{Error, Result};

const TAG_LASER: u64 = 0x4c41_5345;
const TAG_ROW: u64 = 0x524f_5721;

/// One Monte Carlo experiment: sampled system population, arbiter
/// configuration and seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub grid: DwdmGridSpec,
    pub var: VariationParams,
    pub policy: Policy,
    /// Pre-fabrication spectral ordering (`r`).
    pub fab_order: SpectralOrdering,
    /// Target post-arbitration spectral ordering (`s`).
    pub target_order: SpectralOrdering,
    /// Oblivious algorithm for conditional-failure runs.
    pub algorithm: Option<Algorithm>,
    pub n_lasers: usize,
    pub n_rows: usize,
    pub master_seed: u64,
    /// Sweep-cell tag folded into every sample seed.
    pub cell: u64,
}

impl TrialPlan {
    /// Plan with natural orderings and the standard 100 x 100 trial grid.
    pub fn new(grid: DwdmGridSpec, var: VariationParams, policy: Policy, master_seed: u64) -> Self {
        let n = grid.n_ch;
        TrialPlan {
            grid,
            var,
            policy,
            fab_order: SpectralOrdering::natural(n),
            target_order: SpectralOrdering::natural(n),
            algorithm: None,
            n_lasers: 100,
            n_rows: 100,
            master_seed,
            cell: 0,
        }
    }

    pub fn trials(&self) -> u64 {
        self.n_lasers as u64 * self.n_rows as u64
    }

    fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.var.validate()?;
        if self.n_lasers == 0 || self.n_rows == 0 {
            return Err(Error::InvalidParameter("trial grid must be non-empty"));
        }
        if self.fab_order.len() != self.grid.n_ch || self.target_order.len() != self.grid.n_ch {
            return Err(Error::InvalidParameter(
                "ordering length must match channel count",
            ));
        }
        Ok(())
    }

    /// The laser population of this plan, in sample order.
    pub fn sample_lasers(&self) -> Vec<MwlSample> {
        (0..self.n_lasers)
            .map(|a| {
                let seed = derive_seed(self.master_seed, &[self.cell, TAG_LASER, a as u64]);
                sample_mwl(&self.grid, &self.var, &mut Rng::from_seed(seed))
            })
            .collect()
    }

    /// The ring-row population of this plan, in sample order.
    pub fn sample_rows(&self) -> Vec<RingRowSample> {
        (0..self.n_rows)
            .map(|b| {
                let seed = derive_seed(self.master_seed, &[self.cell, TAG_ROW, b as u64]);
                sample_ring_row(
                    &self.grid,
                    &self.var,
                    &self.fab_order,
                    &mut Rng::from_seed(seed),
                )
            })
            .collect()
    }
}

/// Outcome tally by referee class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub success: u64,
    pub zero_lock: u64,
    pub dupl_lock: u64,
    pub lane_order: u64,
}

impl OutcomeCounts {
    fn add(&mut self, outcome: &ArbitrationOutcome) {
        match outcome {
            ArbitrationOutcome::Success { .. } => self.success += 1,
            ArbitrationOutcome::ZeroLock => self.zero_lock += 1,
            ArbitrationOutcome::DuplLock => self.dupl_lock += 1,
            ArbitrationOutcome::LaneOrderError => self.lane_order += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.success + self.zero_lock + self.dupl_lock + self.lane_order
    }

    pub fn failures(&self) -> u64 {
        self.total() - self.success
    }

    /// Zero-lock plus duplicate-lock failures.
    pub fn lock_errors(&self) -> u64 {
        self.zero_lock + self.dupl_lock
    }
}

/// Aggregated statistics of one trial plan.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRecord {
    pub trials: u64,
    pub ideal_success: u64,
    pub ideal_fail: u64,
    /// Failure probability of the ideal arbiter: `ideal_fail / trials`.
    pub afp: f64,
    /// Algorithm outcome tally over all trials.
    pub alg_counts: Option<OutcomeCounts>,
    /// Algorithm outcome tally over ideal-feasible trials only.
    pub cond_counts: Option<OutcomeCounts>,
    /// Conditional failure probability: algorithm failures among
    /// ideal-feasible trials divided by their count. `None` when the
    /// denominator is zero (undefined) or no algorithm ran.
    pub cafp: Option<f64>,
}

impl StatRecord {
    /// Total-failure composition identity on raw counts: the algorithm fails
    /// on every ideal failure, so its failures split exactly into conditional
    /// failures plus ideal failures.
    pub fn composition_holds(&self) -> bool {
        match (&self.alg_counts, &self.cond_counts) {
            (Some(all), Some(cond)) => {
                all.failures() == cond.failures() + self.ideal_fail
                    && all.total() == self.trials
                    && cond.total() == self.ideal_success
            }
            _ => true,
        }
    }
}

/// Runs the ideal arbiter over the full trial cross and tallies failures.
pub fn run_afp(plan: &TrialPlan) -> Result<StatRecord> {
    plan.validate()?;
    let lasers = plan.sample_lasers();
    let rows = plan.sample_rows();
    let mut ideal_success = 0u64;
    for row in &rows {
        for mwl in &lasers {
            if arbitrate_ideal(mwl, row, plan.policy, &plan.target_order).feasible {
                ideal_success += 1;
            }
        }
    }
    let trials = plan.trials();
    Ok(StatRecord {
        trials,
        ideal_success,
        ideal_fail: trials - ideal_success,
        afp: (trials - ideal_success) as f64 / trials as f64,
        alg_counts: None,
        cond_counts: None,
        cafp: None,
    })
}

/// Runs the ideal arbiter and the configured oblivious algorithm on every
/// trial, in fresh environments, and tallies outcomes both overall and
/// conditioned on ideal feasibility.
pub fn run_cafp(plan: &TrialPlan) -> Result<StatRecord> {
    plan.validate()?;
    let algorithm = plan.algorithm.ok_or(Error::InvalidParameter(
        "conditional runs need an algorithm",
    ))?;
    let lasers = plan.sample_lasers();
    let rows = plan.sample_rows();
    let mut ideal_success = 0u64;
    let mut alg_counts = OutcomeCounts::default();
    let mut cond_counts = OutcomeCounts::default();
    for row in &rows {
        for mwl in &lasers {
            let ideal = arbitrate_ideal(mwl, row, plan.policy, &plan.target_order);
            let mut env = EnvState::new(mwl, row);
            let outcome = run_algorithm(&mut env, &plan.target_order, plan.policy, algorithm);
            alg_counts.add(&outcome);
            if ideal.feasible {
                ideal_success += 1;
                cond_counts.add(&outcome);
            } else {
                debug_assert!(
                    !outcome.is_success(),
                    "oblivious success implies ideal feasibility"
                );
            }
        }
    }
    let trials = plan.trials();
    let cafp = (ideal_success > 0).then(|| cond_counts.failures() as f64 / ideal_success as f64);
    let record = StatRecord {
        trials,
        ideal_success,
        ideal_fail: trials - ideal_success,
        afp: (trials - ideal_success) as f64 / trials as f64,
        alg_counts: Some(alg_counts),
        cond_counts: Some(cond_counts),
        cafp,
    };
    debug_assert!(record.composition_holds());
    Ok(record)
}

/// Minimum-tuning-range search configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MinTrSearch {
    /// Grid step of the search (nm).
    pub resolution_nm: f64,
    /// Sweep ceiling (nm); defaults to twice the FSR mean, beyond which
    /// cyclic arbitration is guaranteed by resonance periodicity.
    pub ceiling_nm: Option<f64>,
    pub n_lasers: usize,
    pub n_rows: usize,
}

impl Default for MinTrSearch {
    fn default() -> Self {
        // Default resolution: one twentieth of the default grid spacing.
        MinTrSearch {
            resolution_nm: 0.056,
            ceiling_nm: None,
            n_lasers: 100,
            n_rows: 100,
        }
    }
}

/// Result of a minimum-tuning-range search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinTr {
    Nm(f64),
    /// Infeasible even at the sweep ceiling.
    AboveMax,
}

impl MinTr {
    pub fn as_nm(&self) -> Option<f64> {
        match self {
            MinTr::Nm(v) => Some(*v),
            MinTr::AboveMax => None,
        }
    }
}

/// Smallest mean tuning range on the resolution grid at which the ideal
/// arbiter is feasible for every sampled trial.
///
/// The sampled rows keep their relative draws when rescaled, so feasibility
/// is monotone in the mean and a binary search over the grid is exact.
pub fn min_tuning_range(
    grid: &DwdmGridSpec,
    var: &VariationParams,
    policy: Policy,
    fab_order: &SpectralOrdering,
    target_order: &SpectralOrdering,
    search: &MinTrSearch,
    master_seed: u64,
    cell: u64,
) -> Result<MinTr> {
    if !(search.resolution_nm > 0.0) || !search.resolution_nm.is_finite() {
        return Err(Error::InvalidParameter("resolution must be positive"));
    }
    let mut plan = TrialPlan::new(grid.clone(), var.clone(), policy, master_seed);
    plan.fab_order = fab_order.clone();
    plan.target_order = target_order.clone();
    plan.n_lasers = search.n_lasers;
    plan.n_rows = search.n_rows;
    plan.cell = cell;
    plan.validate()?;

    let lasers = plan.sample_lasers();
    let rows = plan.sample_rows();
    let ceiling = search.ceiling_nm.unwrap_or(2.0 * var.fsr_mean_nm);
    let steps = crate::fmath::ceil(ceiling / search.resolution_nm) as u64;

    let feasible = |step: u64| -> bool {
        let tr_mean = step as f64 * search.resolution_nm;
        rows.iter().all(|row| {
            let retuned = row.with_tr_mean(tr_mean);
            lasers
                .iter()
                .all(|mwl| arbitrate_ideal(mwl, &retuned, policy, target_order).feasible)
        })
    };

    if !feasible(steps) {
        return Ok(MinTr::AboveMax);
    }
    let mut lo = 0u64;
    let mut hi = steps;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MinTr::Nm(hi as f64 * search.resolution_nm))
}

/// Model parameter selected for a one-dimensional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Grid offset bound (nm).
    GridOffset,
    /// Laser local bound (nm).
    LaserLocal,
    /// Ring local bound (nm).
    RingLocal,
    /// FSR bound as a fraction of the mean.
    FsrRel,
    /// Tuning-range bound as a fraction of the mean.
    TrRel,
    /// FSR mean (nm).
    FsrMean,
    /// Tuning-range mean (nm).
    TrMean,
}

impl SweepParameter {
    pub fn apply(&self, var: &mut VariationParams, value: f64) {
        match self {
            SweepParameter::GridOffset => var.grid_offset_bound_nm = value,
            SweepParameter::LaserLocal => var.laser_local_bound_nm = value,
            SweepParameter::RingLocal => var.ring_local_bound_nm = value,
            SweepParameter::FsrRel => var.fsr_rel_bound = value,
            SweepParameter::TrRel => var.tr_rel_bound = value,
            SweepParameter::FsrMean => var.fsr_mean_nm = value,
            SweepParameter::TrMean => var.tr_mean_nm = value,
        }
    }
}

/// Minimum tuning range per parameter value, all other parameters taken from
/// `var`. Each value forms its own sweep cell.
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    grid: &DwdmGridSpec,
    var: &VariationParams,
    policy: Policy,
    fab_order: &SpectralOrdering,
    target_order: &SpectralOrdering,
    parameter: SweepParameter,
    values: &[f64],
    search: &MinTrSearch,
    master_seed: u64,
) -> Result<Vec<(f64, MinTr)>> {
    let mut out = Vec::with_capacity(values.len());
    for (cell, &value) in values.iter().enumerate() {
        let mut swept = var.clone();
        parameter.apply(&mut swept, value);
        let min_tr = min_tuning_range(
            grid,
            &swept,
            policy,
            fab_order,
            target_order,
            search,
            master_seed,
            cell as u64,
        )?;
        out.push((value, min_tr));
    }
    Ok(out)
}
