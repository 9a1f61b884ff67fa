//! Variation bounds for lasers and microring rows.
//!
//! All variations are modeled as uniform draws bounded by their confidence
//! intervals. Global laser and ring variations are lumped into a single grid
//! offset applied to the laser side, since only relative wavelength distances
//! matter for arbitration.

use crate::grid::DwdmGridSpec;
use crate::{Error, Result};

/// Documented decomposition of the default grid offset: laser-side global
/// variation bound in nm.
pub const LASER_GLOBAL_BOUND_NM: f64 = 9.0;
/// Ring-side global variation bound in nm. The default grid offset is the
/// linear sum of the two global bounds.
pub const RING_GLOBAL_BOUND_NM: f64 = 6.0;

/// Shape of the variation distributions. Only uniform sampling is
/// implemented; the tag exists so alternative shapes can be added without
/// changing sampler signatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[non_exhaustive]
pub enum DistributionKind {
    #[default]
    Uniform,
}

/// Variation bounds for sampling post-fabrication lasers and ring rows.
///
/// Absolute bounds are in nm; `fsr_rel_bound` and `tr_rel_bound` are
/// fractions of their respective means.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationParams {
    /// Grid offset bound between the laser comb and the ring row (nm).
    pub grid_offset_bound_nm: f64,
    /// Per-channel laser wavelength deviation bound (nm).
    pub laser_local_bound_nm: f64,
    /// Per-ring resonance deviation bound (nm).
    pub ring_local_bound_nm: f64,
    /// Mean free spectral range (nm).
    pub fsr_mean_nm: f64,
    /// FSR deviation bound as a fraction of the mean.
    pub fsr_rel_bound: f64,
    /// Mean tuning range (nm).
    pub tr_mean_nm: f64,
    /// Tuning-range deviation bound as a fraction of the mean.
    pub tr_rel_bound: f64,
    pub distribution: DistributionKind,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            grid_offset_bound_nm: LASER_GLOBAL_BOUND_NM + RING_GLOBAL_BOUND_NM,
            laser_local_bound_nm: 0.28,
            ring_local_bound_nm: 2.24,
            fsr_mean_nm: 8.96,
            fsr_rel_bound: 0.01,
            tr_mean_nm: 2.24,
            tr_rel_bound: 0.10,
            distribution: DistributionKind::Uniform,
        }
    }
}

impl VariationParams {
    /// Defaults rescaled to a grid: the FSR is maximally filled with
    /// wavelength grids (`n_ch * spacing`), the laser local bound is 25% of
    /// the spacing, and the ring local bound and mean tuning range are twice
    /// the spacing.
    pub fn defaults_for(grid: &DwdmGridSpec) -> Self {
        let gs = grid.grid_spacing_nm;
        VariationParams {
            laser_local_bound_nm: 0.25 * gs,
            ring_local_bound_nm: 2.0 * gs,
            fsr_mean_nm: grid.n_ch as f64 * gs,
            tr_mean_nm: 2.0 * gs,
            ..VariationParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            self.grid_offset_bound_nm,
            self.laser_local_bound_nm,
            self.ring_local_bound_nm,
            self.fsr_rel_bound,
            self.tr_mean_nm,
            self.tr_rel_bound,
        ];
        if nonneg.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "variation bounds must be non-negative",
            ));
        }
        if !(self.fsr_mean_nm > 0.0) {
            return Err(Error::InvalidParameter("FSR mean must be positive"));
        }
        if self.fsr_rel_bound >= 1.0 || self.tr_rel_bound >= 1.0 {
            return Err(Error::InvalidParameter("relative bounds must stay below 1"));
        }
        Ok(())
    }

    /// Copy with every bound zeroed (means retained).
    pub fn without_variation(&self) -> Self {
        VariationParams {
            grid_offset_bound_nm: 0.0,
            laser_local_bound_nm: 0.0,
            ring_local_bound_nm: 0.0,
            fsr_rel_bound: 0.0,
            tr_rel_bound: 0.0,
            ..self.clone()
        }
    }
}
