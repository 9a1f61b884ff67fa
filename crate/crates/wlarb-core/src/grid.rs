//! DWDM grid geometry and microring spectral orderings.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Default channel count.
pub const DEFAULT_N_CH: usize = 8;
/// Default grid spacing in nm (200 GHz in the O-band).
pub const DEFAULT_GRID_SPACING_NM: f64 = 1.12;
/// Default center wavelength in nm.
pub const DEFAULT_CENTER_NM: f64 = 1300.0;
/// Default blue-side ring pre-bias in nm.
pub const DEFAULT_RING_BIAS_NM: f64 = 4.48;

/// Nominal DWDM grid: channel count, spacing, center wavelength and the
/// blue-side pre-bias applied to ring resonances so that thermal tuning
/// (strictly red-shifting) can reach the laser grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DwdmGridSpec {
    pub n_ch: usize,
    pub grid_spacing_nm: f64,
    pub center_nm: f64,
    pub ring_bias_nm: f64,
}

impl Default for DwdmGridSpec {
    fn default() -> Self {
        DwdmGridSpec {
            n_ch: DEFAULT_N_CH,
            grid_spacing_nm: DEFAULT_GRID_SPACING_NM,
            center_nm: DEFAULT_CENTER_NM,
            ring_bias_nm: DEFAULT_RING_BIAS_NM,
        }
    }
}

impl DwdmGridSpec {
    pub fn new(
        n_ch: usize,
        grid_spacing_nm: f64,
        center_nm: f64,
        ring_bias_nm: f64,
    ) -> Result<Self> {
        let spec = DwdmGridSpec {
            n_ch,
            grid_spacing_nm,
            center_nm,
            ring_bias_nm,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Grid with `n_ch` channels at `grid_spacing_nm`, default center, and the
    /// pre-bias scaled to half the maximally-filled FSR (`n_ch/2` grid steps).
    pub fn scaled(n_ch: usize, grid_spacing_nm: f64) -> Result<Self> {
        DwdmGridSpec::new(
            n_ch,
            grid_spacing_nm,
            DEFAULT_CENTER_NM,
            n_ch as f64 / 2.0 * grid_spacing_nm,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ch < 2 {
            return Err(Error::InvalidParameter("n_ch must be at least 2"));
        }
        if !(self.grid_spacing_nm > 0.0) {
            return Err(Error::InvalidParameter("grid spacing must be positive"));
        }
        if !(self.ring_bias_nm >= 0.0) {
            return Err(Error::InvalidParameter("ring bias must be non-negative"));
        }
        if !self.center_nm.is_finite() {
            return Err(Error::InvalidParameter("center wavelength must be finite"));
        }
        Ok(())
    }

    /// Pre-fabrication laser wavelength of channel `i`:
    /// `center + (i - (n_ch-1)/2) * grid_spacing`.
    pub fn laser_wavelength(&self, i: usize) -> f64 {
        self.center_nm + (i as f64 - (self.n_ch as f64 - 1.0) / 2.0) * self.grid_spacing_nm
    }

    /// Pre-fabrication ring resonance of spectral rank `rank`:
    /// `center - ring_bias + (rank - (n_ch-1)/2) * grid_spacing`.
    pub fn ring_wavelength(&self, rank: usize) -> f64 {
        self.laser_wavelength(rank) - self.ring_bias_nm
    }

    /// Full pre-fabrication laser grid, ascending in channel index.
    pub fn laser_grid(&self) -> Vec<f64> {
        (0..self.n_ch).map(|i| self.laser_wavelength(i)).collect()
    }

    /// Full pre-fabrication ring grid, indexed by spatial position under `r`.
    pub fn ring_grid(&self, r: &SpectralOrdering) -> Vec<f64> {
        (0..self.n_ch)
            .map(|i| self.ring_wavelength(r.rank_of(i)))
            .collect()
    }
}

/// Permutation mapping ring spatial positions to spectral ranks.
///
/// `rank_of(i)` is the spectral rank of the ring at spatial index `i`
/// (spatial index 0 is nearest to the light input).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralOrdering {
    rank_of_ring: Vec<usize>,
    ring_at_rank: Vec<usize>,
}

impl SpectralOrdering {
    /// Builds an ordering from `order[i] = rank of ring i`, validating that
    /// it is a bijection on `{0..n-1}`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 2 {
            return Err(Error::InvalidParameter("ordering needs at least 2 rings"));
        }
        let mut inverse = alloc::vec![usize::MAX; n];
        for (ring, &rank) in order.iter().enumerate() {
            if rank >= n || inverse[rank] != usize::MAX {
                return Err(Error::InvalidParameter("ordering is not a bijection"));
            }
            inverse[rank] = ring;
        }
        Ok(SpectralOrdering {
            rank_of_ring: order,
            ring_at_rank: inverse,
        })
    }

    /// Natural ordering `(0, 1, 2, ..., n-1)`.
    pub fn natural(n: usize) -> Self {
        SpectralOrdering {
            rank_of_ring: (0..n).collect(),
            ring_at_rank: (0..n).collect(),
        }
    }

    /// Permuted ordering `(0, n/2, 1, n/2+1, ...)`.
    pub fn permuted(n: usize) -> Self {
        let order: Vec<usize> = (0..n)
            .map(|i| if i % 2 == 0 { i / 2 } else { n / 2 + i / 2 })
            .collect();
        SpectralOrdering::new(order).expect("permuted ordering is a bijection")
    }

    pub fn len(&self) -> usize {
        self.rank_of_ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_of_ring.is_empty()
    }

    pub fn rank_of(&self, ring: usize) -> usize {
        self.rank_of_ring[ring]
    }

    pub fn ring_at_rank(&self, rank: usize) -> usize {
        self.ring_at_rank[rank]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank_of_ring
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn default_laser_grid_endpoints() {
        let spec = DwdmGridSpec::default();
        assert!((spec.laser_wavelength(0) - 1296.08).abs() < TOL);
        assert!((spec.laser_wavelength(7) - 1303.92).abs() < TOL);
    }

    #[test]
    fn wdm16_g400_center_channel() {
        let spec = DwdmGridSpec::scaled(16, 2.24).unwrap();
        assert!((spec.laser_wavelength(8) - 1301.12).abs() < TOL);
    }

    #[test]
    fn ring_grid_natural_endpoints() {
        let spec = DwdmGridSpec::default();
        let r = SpectralOrdering::natural(8);
        let grid = spec.ring_grid(&r);
        assert!((grid[0] - 1291.60).abs() < TOL);
        assert!((grid[7] - 1299.44).abs() < TOL);
    }

    #[test]
    fn ring_grid_permuted_rank_lookup() {
        let spec = DwdmGridSpec::default();
        let r = SpectralOrdering::permuted(8);
        assert_eq!(r.ranks(), &[0, 4, 1, 5, 2, 6, 3, 7]);
        let grid = spec.ring_grid(&r);
        // Spatial index 1 carries rank 4, whose resonance coincides with the
        // first laser channel thanks to the 4-grid-step pre-bias.
        assert!((grid[1] - 1296.08).abs() < TOL);
    }

    #[test]
    fn ordering_rejects_non_bijections() {
        assert!(SpectralOrdering::new(alloc::vec![0, 0, 1]).is_err());
        assert!(SpectralOrdering::new(alloc::vec![0, 3]).is_err());
        assert!(SpectralOrdering::new(alloc::vec![1]).is_err());
    }

    #[test]
    fn ordering_inverse_is_consistent() {
        let s = SpectralOrdering::permuted(16);
        for ring in 0..16 {
            assert_eq!(s.ring_at_rank(s.rank_of(ring)), ring);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(DwdmGridSpec::new(1, 1.12, 1300.0, 4.48).is_err());
        assert!(DwdmGridSpec::new(8, 0.0, 1300.0, 4.48).is_err());
        assert!(DwdmGridSpec::new(8, 1.12, 1300.0, -0.1).is_err());
    }
}
