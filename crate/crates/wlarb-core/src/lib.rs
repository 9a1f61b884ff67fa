//! Wavelength-domain simulation core for microring-based DWDM transceiver
//! initialization.
//!
//! A multi-wavelength laser feeds a row of microring resonators through a
//! shared bus. At power-up every ring must capture one laser line within its
//! thermal tuning range, subject to a spectral-ordering policy. This crate
//! models that problem entirely in the wavelength domain:
//!
//! - [`grid`] / [`variation`] / [`sample`] — the DWDM grid, fabrication and
//!   environmental variation bounds, and seeded sampling of laser combs and
//!   microring rows, including tuning-range reachability.
//! - [`ideal`] — a wavelength-aware arbitration oracle for the three
//!   ordering policies (deterministic, cyclic, any).
//! - [`env`] — a wavelength-oblivious transceiver environment exposing only
//!   sweep/lock/unlock primitives with upstream light-precedence masking,
//!   plus the wavelength-aware referee that classifies final outcomes.
//! - [`algo`] — oblivious arbitration algorithms: sequential lock-to-nearest,
//!   relation search (plain and variation-tolerant) and single-step matching.
//! - [`metrics`] — trial orchestration: failure probabilities, conditional
//!   failure probabilities, minimum-tuning-range searches and sweeps.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: identical
//! seeds and parameters produce bit-identical results on any platform.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

use core::fmt;

mod fmath;

pub mod algo;
pub mod env;
pub mod grid;
pub mod ideal;
pub mod metrics;
pub mod rng;
pub mod sample;
pub mod variation;

pub use algo::{
    build_lat, consecutive_rank_pairs, record_phase, relation_search, run_algorithm,
    sequential_lock_to_nearest, single_step_match, Algorithm, LockAllocationTable, LockPlan,
    RecordPhase, RelationIndex, SearchMode,
};
pub use env::{
    classify_outcome, ArbitrationOutcome, CaptureEntry, CaptureMap, EnvState, SearchTable,
};
pub use grid::{DwdmGridSpec, SpectralOrdering};
pub use ideal::{arbitrate_ideal, brute_force_lta, IdealResult, Policy};
pub use metrics::{
    min_tuning_range, run_afp, run_cafp, sensitivity_sweep, MinTr, MinTrSearch, OutcomeCounts,
    StatRecord, SweepParameter, TrialPlan,
};
pub use sample::{sample_mwl, sample_ring_row, MwlSample, RingRowSample, DEFAULT_EPS_NM};
pub use variation::{DistributionKind, VariationParams};

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received an out-of-contract parameter.
    InvalidParameter(&'static str),
    /// A lock was requested at a tuner code outside the ring's tuning range.
    CodeOutOfRange {
        ring: usize,
        code_nm: f64,
        tr_nm: f64,
    },
    /// Relation search requires the physically-upstream ring as aggressor.
    RoleOrder { aggressor: usize, victim: usize },
    /// A relation-search participant was already locked.
    RingLocked(usize),
    /// Lock-allocation-table construction assigned a ring two different offsets.
    InconsistentOffsets { ring: usize },
    /// Exhaustive permutation search is limited to small channel counts.
    ChannelCountTooLarge { n_ch: usize, max: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::CodeOutOfRange {
                ring,
                code_nm,
                tr_nm,
            } => write!(
                f,
                "tuner code {code_nm} nm out of range [0, {tr_nm}] nm for ring {ring}"
            ),
            Error::RoleOrder { aggressor, victim } => write!(
                f,
                "relation search needs aggressor upstream of victim (got {aggressor} !< {victim})"
            ),
            Error::RingLocked(ring) => write!(f, "ring {ring} is locked"),
            Error::InconsistentOffsets { ring } => {
                write!(f, "ring {ring} was assigned two different table offsets")
            }
            Error::ChannelCountTooLarge { n_ch, max } => {
                write!(
                    f,
                    "channel count {n_ch} exceeds the supported maximum {max}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
