//! Sampled lasers and microring rows, and wavelength reachability.
//!
//! A post-fabrication laser comb adds a shared grid offset plus per-channel
//! deviations to the nominal grid. A post-fabrication ring row adds per-ring
//! resonance deviations to the pre-biased ring grid and samples each ring's
//! FSR and tuning range around their means.
//!
//! Reachability follows the replica-interval model: ring `i` tuned by a
//! red-shift `d` in `[0, tr_i]` resonates at `res_i + j*fsr_i + d` for every
//! integer `j`, so a wavelength is reachable iff it falls in one of the
//! intervals `[res_i + j*fsr_i, res_i + j*fsr_i + tr_i]`.

use alloc::vec::Vec;

use crate::fmath;
use crate::grid::{DwdmGridSpec, SpectralOrdering};
use crate::rng::Rng;
use crate::variation::{DistributionKind, VariationParams};
use crate::{Error, Result};

/// Wavelength-coincidence tolerance in nm used for peak detection and lock
/// alignment. Model arithmetic is exact-real otherwise.
pub const DEFAULT_EPS_NM: f64 = 1e-6;

/// One sampled multi-wavelength laser comb, ascending in channel index.
#[derive(Debug, Clone, PartialEq)]
pub struct MwlSample {
    wavelengths: Vec<f64>,
}

impl MwlSample {
    pub fn new(wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.len() < 2 {
            return Err(Error::InvalidParameter(
                "laser comb needs at least 2 channels",
            ));
        }
        if wavelengths.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("laser wavelengths must be finite"));
        }
        Ok(MwlSample { wavelengths })
    }

    pub fn n_ch(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn wavelength(&self, channel: usize) -> f64 {
        self.wavelengths[channel]
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }
}

/// Samples a post-fabrication laser comb: one grid-offset draw shared by all
/// channels, then one local deviation draw per channel.
pub fn sample_mwl(spec: &DwdmGridSpec, var: &VariationParams, rng: &mut Rng) -> MwlSample {
    let DistributionKind::Uniform = var.distribution;
    let grid_offset = rng.symmetric(var.grid_offset_bound_nm);
    let wavelengths = (0..spec.n_ch)
        .map(|i| spec.laser_wavelength(i) + grid_offset + rng.symmetric(var.laser_local_bound_nm))
        .collect();
    MwlSample { wavelengths }
}

/// One sampled microring row.
///
/// Per-ring fields are indexed by spatial position (index 0 nearest the light
/// input). The relative FSR/TR draws are retained so the row can be rescaled
/// to a different mean tuning range without resampling, which keeps
/// reachability monotonic in the mean and makes minimum-tuning-range searches
/// binary-searchable.
#[derive(Debug, Clone, PartialEq)]
pub struct RingRowSample {
    resonances: Vec<f64>,
    fsr_mean_nm: f64,
    tr_mean_nm: f64,
    rel_fsr: Vec<f64>,
    rel_tr: Vec<f64>,
    fsrs: Vec<f64>,
    trs: Vec<f64>,
    ordering: SpectralOrdering,
}

impl RingRowSample {
    /// Builds a row from explicit resonances and relative FSR/TR draws.
    pub fn from_values(
        resonances: Vec<f64>,
        fsr_mean_nm: f64,
        rel_fsr: Vec<f64>,
        tr_mean_nm: f64,
        rel_tr: Vec<f64>,
        ordering: SpectralOrdering,
    ) -> Result<Self> {
        let n = resonances.len();
        if n != ordering.len() || rel_fsr.len() != n || rel_tr.len() != n {
            return Err(Error::InvalidParameter("row field lengths disagree"));
        }
        if !(fsr_mean_nm > 0.0) || !(tr_mean_nm >= 0.0) {
            return Err(Error::InvalidParameter("row means out of range"));
        }
        if rel_fsr.iter().any(|u| !(u.abs() < 1.0)) || rel_tr.iter().any(|v| !(v.abs() < 1.0)) {
            return Err(Error::InvalidParameter(
                "relative draws must lie in (-1, 1)",
            ));
        }
        if resonances.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter("resonances must be finite"));
        }
        let fsrs = rel_fsr.iter().map(|u| fsr_mean_nm * (1.0 + u)).collect();
        let trs = rel_tr.iter().map(|v| tr_mean_nm * (1.0 + v)).collect();
        Ok(RingRowSample {
            resonances,
            fsr_mean_nm,
            tr_mean_nm,
            rel_fsr,
            rel_tr,
            fsrs,
            trs,
            ordering,
        })
    }

    /// Row with identical FSR and tuning range on every ring.
    pub fn uniform(
        resonances: Vec<f64>,
        fsr_nm: f64,
        tr_nm: f64,
        ordering: SpectralOrdering,
    ) -> Result<Self> {
        let n = resonances.len();
        RingRowSample::from_values(
            resonances,
            fsr_nm,
            alloc::vec![0.0; n],
            tr_nm,
            alloc::vec![0.0; n],
            ordering,
        )
    }

    /// Copy of the row rescaled to a new mean tuning range, reusing the
    /// retained relative draws.
    pub fn with_tr_mean(&self, tr_mean_nm: f64) -> Self {
        let mut row = self.clone();
        row.tr_mean_nm = tr_mean_nm;
        row.trs = row.rel_tr.iter().map(|v| tr_mean_nm * (1.0 + v)).collect();
        row
    }

    pub fn n_ch(&self) -> usize {
        self.resonances.len()
    }

    pub fn resonance(&self, ring: usize) -> f64 {
        self.resonances[ring]
    }

    pub fn fsr(&self, ring: usize) -> f64 {
        self.fsrs[ring]
    }

    pub fn tr(&self, ring: usize) -> f64 {
        self.trs[ring]
    }

    pub fn tr_mean_nm(&self) -> f64 {
        self.tr_mean_nm
    }

    pub fn fsr_mean_nm(&self) -> f64 {
        self.fsr_mean_nm
    }

    pub fn ordering(&self) -> &SpectralOrdering {
        &self.ordering
    }

    /// All red-shift tuner codes at which `ring` coincides with `lambda_nm`
    /// within `eps_nm`, ascending. Duplicate replicas (possible once the
    /// tuning range exceeds the FSR) produce separate codes. Empty means
    /// unreachable.
    pub fn tuner_codes_for(&self, ring: usize, lambda_nm: f64, eps_nm: f64) -> Vec<f64> {
        let res = self.resonances[ring];
        let fsr = self.fsrs[ring];
        let tr = self.trs[ring];
        let delta = lambda_nm - res;
        // Need j with -eps <= delta - j*fsr <= tr + eps.
        let j_lo = fmath::ceil((delta - tr - eps_nm) / fsr) as i64;
        let j_hi = fmath::floor((delta + eps_nm) / fsr) as i64;
        let mut codes = Vec::new();
        for j in j_lo..=j_hi {
            let d = delta - j as f64 * fsr;
            if d >= -eps_nm && d <= tr + eps_nm {
                codes.push(d.clamp(0.0, tr));
            }
        }
        codes.sort_unstable_by(|a, b| a.partial_cmp(b).expect("codes are finite"));
        codes
    }

    /// Smallest red-shift that brings `ring` onto `lambda_nm`, if reachable.
    pub fn min_tuning_distance(&self, ring: usize, lambda_nm: f64, eps_nm: f64) -> Option<f64> {
        let res = self.resonances[ring];
        let fsr = self.fsrs[ring];
        let tr = self.trs[ring];
        let rem = fmath::rem_euclid(lambda_nm - res, fsr);
        if rem <= tr + eps_nm {
            Some(rem.clamp(0.0, tr))
        } else if rem >= fsr - eps_nm {
            // The wavelength sits just below a replica; reachable at zero shift.
            Some(0.0)
        } else {
            None
        }
    }

    /// Indices of the laser channels reachable by `ring`.
    pub fn reachable_lasers(&self, ring: usize, mwl: &MwlSample, eps_nm: f64) -> Vec<usize> {
        (0..mwl.n_ch())
            .filter(|&l| {
                self.min_tuning_distance(ring, mwl.wavelength(l), eps_nm)
                    .is_some()
            })
            .collect()
    }
}

/// Samples a post-fabrication microring row.
///
/// Deviation draws are indexed by spectral rank rather than spatial position:
/// two rows sampled from the same stream with different orderings realize the
/// same per-rank deviations, so reordering studies compare like with like.
pub fn sample_ring_row(
    spec: &DwdmGridSpec,
    var: &VariationParams,
    r: &SpectralOrdering,
    rng: &mut Rng,
) -> RingRowSample {
    let DistributionKind::Uniform = var.distribution;
    let n = spec.n_ch;
    debug_assert_eq!(r.len(), n);
    let mut res_by_rank = Vec::with_capacity(n);
    for rank in 0..n {
        res_by_rank.push(spec.ring_wavelength(rank) + rng.symmetric(var.ring_local_bound_nm));
    }
    let mut fsr_by_rank = Vec::with_capacity(n);
    for _ in 0..n {
        fsr_by_rank.push(rng.symmetric(var.fsr_rel_bound));
    }
    let mut tr_by_rank = Vec::with_capacity(n);
    for _ in 0..n {
        tr_by_rank.push(rng.symmetric(var.tr_rel_bound));
    }

    let resonances: Vec<f64> = (0..n).map(|i| res_by_rank[r.rank_of(i)]).collect();
    let rel_fsr: Vec<f64> = (0..n).map(|i| fsr_by_rank[r.rank_of(i)]).collect();
    let rel_tr: Vec<f64> = (0..n).map(|i| tr_by_rank[r.rank_of(i)]).collect();
    let fsrs = rel_fsr
        .iter()
        .map(|u| var.fsr_mean_nm * (1.0 + u))
        .collect();
    let trs = rel_tr.iter().map(|v| var.tr_mean_nm * (1.0 + v)).collect();

    RingRowSample {
        resonances,
        fsr_mean_nm: var.fsr_mean_nm,
        tr_mean_nm: var.tr_mean_nm,
        rel_fsr,
        rel_tr,
        fsrs,
        trs,
        ordering: r.clone(),
    }
}
