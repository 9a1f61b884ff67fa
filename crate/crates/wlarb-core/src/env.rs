//! Wavelength-oblivious transceiver environment and outcome referee.
//!
//! Arbitration algorithms may only sweep a ring's tuner across its range,
//! lock it at a tuner code, or unlock it. A sweep reports the codes at which
//! the ring would see an optical-power peak; it never reveals wavelengths.
//! Light precedence is physical: a locked ring captures its wavelength away
//! from every ring farther from the light input, so downstream sweeps no
//! longer see it. Locked rings downstream of the sweeping ring mask nothing,
//! and unlocked (parked) rings are transparent.
//!
//! The referee side ([`EnvState::resolve_captures`] plus
//! [`classify_outcome`]) is wavelength-aware: it replays the first-capture
//! precedence over the final lock state and grades the result against the
//! requested policy.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::grid::SpectralOrdering;
use crate::ideal::Policy;
use crate::sample::{MwlSample, RingRowSample, DEFAULT_EPS_NM};
use crate::{Error, Result};

/// Tuner codes (nm of red shift) at the optical-power peaks a ring observed
/// during a sweep, strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTable {
    pub ring: usize,
    pub codes: Vec<f64>,
}

impl SearchTable {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Per-ring capture state after resolving light precedence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureEntry {
    pub locked: bool,
    /// Laser the ring's locked position coincides with, if any.
    pub hit: Option<usize>,
    /// Laser actually captured after upstream-first precedence.
    pub captured: Option<usize>,
}

/// Capture state of the whole row, indexed by ring spatial position.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureMap {
    pub entries: Vec<CaptureEntry>,
}

/// Final grade of an arbitration attempt.
#[derive(Debug, Clone, PartialEq)]
pub enum ArbitrationOutcome {
    Success {
        /// Ring spatial index -> captured laser index.
        assignment: Vec<usize>,
        /// Witnessing cyclic shift for LtC/LtD (0 for LtD); None for LtA.
        shift: Option<usize>,
    },
    ZeroLock,
    DuplLock,
    LaneOrderError,
}

impl ArbitrationOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, ArbitrationOutcome::Success { .. })
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            ArbitrationOutcome::Success { .. } => "success",
            ArbitrationOutcome::ZeroLock => "zero_lock",
            ArbitrationOutcome::DuplLock => "dupl_lock",
            ArbitrationOutcome::LaneOrderError => "lane_order_error",
        }
    }
}

/// Simulated transceiver state for one trial: the sampled system plus the
/// current lock codes. Single-threaded per trial; trials own independent
/// environments.
#[derive(Debug, Clone)]
pub struct EnvState<'a> {
    mwl: &'a MwlSample,
    row: &'a RingRowSample,
    locks: Vec<Option<f64>>,
    eps_nm: f64,
}

impl<'a> EnvState<'a> {
    pub fn new(mwl: &'a MwlSample, row: &'a RingRowSample) -> Self {
        debug_assert_eq!(mwl.n_ch(), row.n_ch());
        EnvState {
            mwl,
            row,
            locks: vec![None; row.n_ch()],
            eps_nm: DEFAULT_EPS_NM,
        }
    }

    pub fn n_ch(&self) -> usize {
        self.row.n_ch()
    }

    pub fn eps_nm(&self) -> f64 {
        self.eps_nm
    }

    pub fn row(&self) -> &RingRowSample {
        self.row
    }

    pub fn mwl(&self) -> &MwlSample {
        self.mwl
    }

    pub fn lock_code(&self, ring: usize) -> Option<f64> {
        self.locks[ring]
    }

    pub fn is_lock_free(&self) -> bool {
        self.locks.iter().all(|l| l.is_none())
    }

    /// Locks `ring` at `code_nm`. The code must lie within the ring's tuning
    /// range; locking is by tuner code only and says nothing about
    /// wavelengths.
    pub fn lock(&mut self, ring: usize, code_nm: f64) -> Result<()> {
        let tr = self.row.tr(ring);
        if !((-self.eps_nm..=tr + self.eps_nm).contains(&code_nm)) {
            return Err(Error::CodeOutOfRange {
                ring,
                code_nm,
                tr_nm: tr,
            });
        }
        self.locks[ring] = Some(code_nm.clamp(0.0, tr));
        Ok(())
    }

    pub fn unlock(&mut self, ring: usize) {
        self.locks[ring] = None;
    }

    pub fn unlock_all(&mut self) {
        self.locks.iter_mut().for_each(|l| *l = None);
    }

    /// Laser index whose wavelength coincides (within eps, modulo FSR
    /// replicas) with `ring` tuned to `code_nm`. Wavelength-aware: used by
    /// the referee and by sweep masking, never exposed to algorithms.
    pub fn hit_laser(&self, ring: usize, code_nm: f64) -> Option<usize> {
        let res = self.row.resonance(ring);
        let fsr = self.row.fsr(ring);
        let mut best: Option<(f64, usize)> = None;
        for l in 0..self.mwl.n_ch() {
            let delta = self.mwl.wavelength(l) - res - code_nm;
            let j = fmath::floor(delta / fsr + 0.5);
            let residual = fmath::abs(delta - j * fsr);
            if residual <= self.eps_nm {
                let closer = match best {
                    None => true,
                    Some((r, _)) => residual < r,
                };
                if closer {
                    best = Some((residual, l));
                }
            }
        }
        best.map(|(_, l)| l)
    }

    /// Laser wavelengths already captured by locked rings upstream of
    /// `ring` (exclusive).
    fn upstream_captures(&self, ring: usize) -> Vec<bool> {
        let mut captured = vec![false; self.mwl.n_ch()];
        for upstream in 0..ring {
            if let Some(code) = self.locks[upstream] {
                if let Some(l) = self.hit_laser(upstream, code) {
                    captured[l] = true;
                }
            }
        }
        captured
    }

    /// Sweeps `ring` across its tuning range and reports the tuner codes at
    /// which it would observe a peak. Wavelengths captured by locked
    /// upstream rings are invisible; locked downstream rings mask nothing.
    /// Duplicate FSR replicas yield separate entries.
    pub fn sweep(&self, ring: usize) -> SearchTable {
        let masked = self.upstream_captures(ring);
        let mut codes: Vec<f64> = Vec::new();
        for l in 0..self.mwl.n_ch() {
            if masked[l] {
                continue;
            }
            codes.extend(
                self.row
                    .tuner_codes_for(ring, self.mwl.wavelength(l), self.eps_nm),
            );
        }
        codes.sort_unstable_by(|a, b| a.partial_cmp(b).expect("codes are finite"));
        // Coincident peaks (distinct lasers within eps of one tuner position)
        // merge into a single observable peak.
        codes.dedup_by(|a, b| fmath::abs(*a - *b) <= self.eps_nm);
        SearchTable { ring, codes }
    }

    /// Replays first-capture precedence over the final lock state: walking
    /// away from the light input, each locked ring captures its coinciding
    /// laser unless an earlier ring already holds it. Depends only on the
    /// final lock codes, not on the order locks were issued.
    pub fn resolve_captures(&self) -> CaptureMap {
        let n = self.n_ch();
        let mut taken = vec![false; self.mwl.n_ch()];
        let mut entries = Vec::with_capacity(n);
        for ring in 0..n {
            match self.locks[ring] {
                None => entries.push(CaptureEntry {
                    locked: false,
                    hit: None,
                    captured: None,
                }),
                Some(code) => {
                    let hit = self.hit_laser(ring, code);
                    let captured = match hit {
                        Some(l) if !taken[l] => {
                            taken[l] = true;
                            Some(l)
                        }
                        _ => None,
                    };
                    entries.push(CaptureEntry {
                        locked: true,
                        hit,
                        captured,
                    });
                }
            }
        }
        CaptureMap { entries }
    }
}

/// Grades a capture map against the target ordering and policy.
///
/// Failure classes in precedence order: Dupl-Lock when two locked rings sit
/// on the same laser wavelength (the downstream one is starved), Zero-Lock
/// when any ring captured nothing, Lane-Order Error when all captures are
/// distinct and complete but no cyclic shift (no zero shift for LtD; any
/// ordering passes for LtA) reproduces the target ordering.
pub fn classify_outcome(
    capture: &CaptureMap,
    s: &SpectralOrdering,
    policy: Policy,
) -> ArbitrationOutcome {
    let n = capture.entries.len();
    debug_assert_eq!(s.len(), n);

    let mut hits_per_laser = vec![0usize; n];
    for e in &capture.entries {
        if e.locked {
            if let Some(l) = e.hit {
                hits_per_laser[l] += 1;
            }
        }
    }
    if hits_per_laser.iter().any(|&c| c >= 2) {
        return ArbitrationOutcome::DuplLock;
    }
    if capture.entries.iter().any(|e| e.captured.is_none()) {
        return ArbitrationOutcome::ZeroLock;
    }

    let assignment: Vec<usize> = capture
        .entries
        .iter()
        .map(|e| e.captured.expect("completeness checked above"))
        .collect();
    let shift = match policy {
        Policy::LtA => None,
        Policy::LtC | Policy::LtD => {
            let k = (assignment[s.ring_at_rank(0)] + n) % n;
            for rank in 0..n {
                if assignment[s.ring_at_rank(rank)] != (rank + k) % n {
                    return ArbitrationOutcome::LaneOrderError;
                }
            }
            if policy == Policy::LtD && k != 0 {
                return ArbitrationOutcome::LaneOrderError;
            }
            Some(k)
        }
    };
    ArbitrationOutcome::Success { assignment, shift }
}
