//! Wavelength-aware arbitration oracle.
//!
//! The ideal arbiter sees absolute wavelengths and decides feasibility of a
//! policy directly from the reachability structure. It is the reference
//! against which wavelength-oblivious algorithms are measured.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::SpectralOrdering;
use crate::sample::{MwlSample, RingRowSample, DEFAULT_EPS_NM};
use crate::{Error, Result};

/// Spectral-ordering enforcement level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Lock-to-Deterministic: only the specified ordering is allowed.
    LtD,
    /// Lock-to-Cyclic: any cyclic equivalent of the specified ordering.
    LtC,
    /// Lock-to-Any: no restriction on the final ordering.
    LtA,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::LtD => "ltd",
            Policy::LtC => "ltc",
            Policy::LtA => "lta",
        }
    }
}

/// Outcome of ideal arbitration.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealResult {
    pub feasible: bool,
    /// Ring spatial index -> laser index; present iff feasible.
    pub assignment: Option<Vec<usize>>,
    /// Witnessing cyclic shift; present for LtC/LtD (0 for LtD).
    pub shift: Option<usize>,
}

impl IdealResult {
    fn infeasible() -> Self {
        IdealResult {
            feasible: false,
            assignment: None,
            shift: None,
        }
    }
}

/// Arbitrates with full wavelength knowledge.
///
/// - LtD: feasible iff the ring at target rank `p` reaches laser `p`.
/// - LtC: feasible iff some shift `k` lets the ring at rank `p` reach laser
///   `(p+k) mod n` for every `p`; among feasible shifts the one with minimal
///   total tuning distance wins, ties resolved to the smallest `k`.
/// - LtA: feasible iff a perfect matching exists in the reachability graph;
///   the returned assignment is one maximum matching.
pub fn arbitrate_ideal(
    mwl: &MwlSample,
    row: &RingRowSample,
    policy: Policy,
    s: &SpectralOrdering,
) -> IdealResult {
    let n = row.n_ch();
    debug_assert_eq!(mwl.n_ch(), n);
    debug_assert_eq!(s.len(), n);
    match policy {
        Policy::LtD => arbitrate_shifted(mwl, row, s, &[0]),
        Policy::LtC => {
            let shifts: Vec<usize> = (0..n).collect();
            arbitrate_shifted(mwl, row, s, &shifts)
        }
        Policy::LtA => arbitrate_matching(mwl, row),
    }
}

fn arbitrate_shifted(
    mwl: &MwlSample,
    row: &RingRowSample,
    s: &SpectralOrdering,
    shifts: &[usize],
) -> IdealResult {
    let n = row.n_ch();
    let mut best: Option<(f64, usize)> = None;
    for &k in shifts {
        let mut total = 0.0;
        let mut ok = true;
        for rank in 0..n {
            let ring = s.ring_at_rank(rank);
            let laser = (rank + k) % n;
            match row.min_tuning_distance(ring, mwl.wavelength(laser), DEFAULT_EPS_NM) {
                Some(d) => total += d,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let better = match best {
                None => true,
                Some((t, bk)) => total < t || (total == t && k < bk),
            };
            if better {
                best = Some((total, k));
            }
        }
    }
    match best {
        Some((_, k)) => {
            let mut assignment = vec![0usize; n];
            for rank in 0..n {
                assignment[s.ring_at_rank(rank)] = (rank + k) % n;
            }
            IdealResult {
                feasible: true,
                assignment: Some(assignment),
                shift: Some(k),
            }
        }
        None => IdealResult::infeasible(),
    }
}

fn arbitrate_matching(mwl: &MwlSample, row: &RingRowSample) -> IdealResult {
    let n = row.n_ch();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|ring| row.reachable_lasers(ring, mwl, DEFAULT_EPS_NM))
        .collect();
    let mut laser_owner = vec![usize::MAX; n];
    let mut matched = 0usize;
    let mut seen = vec![false; n];
    for ring in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        if augment(ring, &adjacency, &mut laser_owner, &mut seen) {
            matched += 1;
        }
    }
    if matched == n {
        let mut assignment = vec![0usize; n];
        for (laser, &ring) in laser_owner.iter().enumerate() {
            assignment[ring] = laser;
        }
        IdealResult {
            feasible: true,
            assignment: Some(assignment),
            shift: None,
        }
    } else {
        IdealResult::infeasible()
    }
}

fn augment(ring: usize, adjacency: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &laser in &adjacency[ring] {
        if !seen[laser] {
            seen[laser] = true;
            if owner[laser] == usize::MAX || augment(owner[laser], adjacency, owner, seen) {
                owner[laser] = ring;
                return true;
            }
        }
    }
    false
}

/// Exhaustive permutation oracle for LtA feasibility. Test-grade reference,
/// kept independent of the matching path; factorial cost limits it to small
/// channel counts.
pub fn brute_force_lta(mwl: &MwlSample, row: &RingRowSample) -> Result<bool> {
    let n = row.n_ch();
    if n > 8 {
        return Err(Error::ChannelCountTooLarge { n_ch: n, max: 8 });
    }
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|ring| {
            (0..n)
                .map(|l| {
                    row.min_tuning_distance(ring, mwl.wavelength(l), DEFAULT_EPS_NM)
                        .is_some()
                })
                .collect()
        })
        .collect();
    let mut used = vec![false; n];
    fn assign(ring: usize, n: usize, reach: &[Vec<bool>], used: &mut [bool]) -> bool {
        if ring == n {
            return true;
        }
        for laser in 0..n {
            if reach[ring][laser] && !used[laser] {
                used[laser] = true;
                if assign(ring + 1, n, reach, used) {
                    return true;
                }
                used[laser] = false;
            }
        }
        false
    }
    Ok(assign(0, n, &reach, &mut used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DwdmGridSpec;
    use crate::rng::{derive_seed, Rng};
    use crate::sample::{sample_mwl, sample_ring_row};
    use crate::variation::VariationParams;

    fn zero_var(tr_nm: f64) -> (MwlSample, RingRowSample) {
        let spec = DwdmGridSpec::default();
        let mut var = VariationParams::default().without_variation();
        var.tr_mean_nm = tr_nm;
        let r = SpectralOrdering::natural(8);
        let mwl = sample_mwl(&spec, &var, &mut Rng::from_seed(0));
        let row = sample_ring_row(&spec, &var, &r, &mut Rng::from_seed(0));
        (mwl, row)
    }

    #[test]
    fn zero_variation_ltc_shift_four() {
        let (mwl, row) = zero_var(2.24);
        let s = SpectralOrdering::natural(8);
        let got = arbitrate_ideal(&mwl, &row, Policy::LtC, &s);
        assert!(got.feasible);
        assert_eq!(got.shift, Some(4));
        let assignment = got.assignment.unwrap();
        for rank in 0..8 {
            assert_eq!(assignment[rank], (rank + 4) % 8);
            let d = row
                .min_tuning_distance(rank, mwl.wavelength((rank + 4) % 8), DEFAULT_EPS_NM)
                .unwrap();
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn zero_variation_ltd_needs_full_bias() {
        let s = SpectralOrdering::natural(8);
        let (mwl, row) = zero_var(2.24);
        assert!(!arbitrate_ideal(&mwl, &row, Policy::LtD, &s).feasible);
        let (mwl, row) = zero_var(4.48);
        let got = arbitrate_ideal(&mwl, &row, Policy::LtD, &s);
        assert!(got.feasible);
        assert_eq!(got.shift, Some(0));
    }

    #[test]
    fn lta_matching_agrees_with_permutation_oracle() {
        // Small random instances, feasibility cross-checked exhaustively.
        for t in 0..300u64 {
            let n = 3 + (t % 4) as usize;
            let spec = DwdmGridSpec::scaled(n, 1.12).unwrap();
            let mut var = VariationParams::defaults_for(&spec);
            let mut rng = Rng::from_seed(derive_seed(7, &[t]));
            var.tr_mean_nm = rng.unit() * 1.5 * var.fsr_mean_nm;
            var.ring_local_bound_nm = rng.unit() * 3.0;
            let r = SpectralOrdering::natural(n);
            let mwl = sample_mwl(&spec, &var, &mut rng);
            let row = sample_ring_row(&spec, &var, &r, &mut rng);
            let fast = arbitrate_ideal(&mwl, &row, Policy::LtA, &r).feasible;
            let slow = brute_force_lta(&mwl, &row).unwrap();
            assert_eq!(fast, slow, "instance {t}");
        }
    }

    #[test]
    fn brute_force_rejects_large_rows() {
        let spec = DwdmGridSpec::scaled(9, 1.12).unwrap();
        let var = VariationParams::defaults_for(&spec);
        let r = SpectralOrdering::natural(9);
        let mwl = sample_mwl(&spec, &var, &mut Rng::from_seed(0));
        let row = sample_ring_row(&spec, &var, &r, &mut Rng::from_seed(0));
        assert!(matches!(
            brute_force_lta(&mwl, &row),
            Err(Error::ChannelCountTooLarge { n_ch: 9, max: 8 })
        ));
    }

    #[test]
    fn empty_reachable_set_is_infeasible() {
        // A ring with zero tuning range displaced off-grid violates Hall's
        // condition immediately.
        let spec = DwdmGridSpec::default();
        let r = SpectralOrdering::natural(8);
        let mut resonances: Vec<f64> = (0..8).map(|p| spec.ring_wavelength(p)).collect();
        resonances[3] += 0.31;
        let row = RingRowSample::uniform(resonances, 8.96, 0.0, r.clone()).unwrap();
        let var = VariationParams::default().without_variation();
        let mwl = sample_mwl(&spec, &var, &mut Rng::from_seed(0));
        assert!(!brute_force_lta(&mwl, &row).unwrap());
        assert!(!arbitrate_ideal(&mwl, &row, Policy::LtA, &r).feasible);
    }

    #[test]
    fn matching_returns_bijection_over_reachable_edges() {
        let spec = DwdmGridSpec::default();
        let var = VariationParams::default();
        let r = SpectralOrdering::natural(8);
        let mut rng = Rng::from_seed(55);
        let mut feasible_seen = 0;
        for _ in 0..500 {
            let mwl = sample_mwl(&spec, &var, &mut rng);
            let row = sample_ring_row(&spec, &var, &r, &mut rng);
            let got = arbitrate_ideal(&mwl, &row, Policy::LtA, &r);
            if let Some(assignment) = got.assignment {
                feasible_seen += 1;
                let mut used = [false; 8];
                for (ring, &laser) in assignment.iter().enumerate() {
                    assert!(!used[laser]);
                    used[laser] = true;
                    assert!(row
                        .min_tuning_distance(ring, mwl.wavelength(laser), DEFAULT_EPS_NM)
                        .is_some());
                }
            }
        }
        assert!(feasible_seen > 0);
    }

    #[test]
    fn policy_inclusion_holds() {
        let spec = DwdmGridSpec::default();
        let mut var = VariationParams::default();
        var.grid_offset_bound_nm = 2.0;
        let s = SpectralOrdering::natural(8);
        let mut rng = Rng::from_seed(8);
        for _ in 0..2000 {
            let mwl = sample_mwl(&spec, &var, &mut rng);
            let row = sample_ring_row(&spec, &var, &s, &mut rng);
            let ltd = arbitrate_ideal(&mwl, &row, Policy::LtD, &s).feasible;
            let ltc = arbitrate_ideal(&mwl, &row, Policy::LtC, &s).feasible;
            let lta = arbitrate_ideal(&mwl, &row, Policy::LtA, &s).feasible;
            assert!(!ltd || ltc, "LtD feasible but LtC infeasible");
            assert!(!ltc || lta, "LtC feasible but LtA infeasible");
        }
    }

    #[test]
    fn grid_period_shift_leaves_cyclic_feasibility_unchanged() {
        // Shifting the whole comb by integer grid steps is re-absorbed by the
        // cyclic shift. The cancellation is exact when replicas land exactly
        // one grid period apart, i.e. with zero laser-local and FSR variation;
        // ring-side variations are free.
        let spec = DwdmGridSpec::default();
        let mut var = VariationParams::default();
        var.laser_local_bound_nm = 0.0;
        var.fsr_rel_bound = 0.0;
        let s = SpectralOrdering::natural(8);
        let mut rng = Rng::from_seed(21);
        for _ in 0..300 {
            let mwl = sample_mwl(&spec, &var, &mut rng);
            let row = sample_ring_row(&spec, &var, &s, &mut rng);
            for m in [-2i32, 1, 3] {
                let shifted = MwlSample::new(
                    mwl.wavelengths()
                        .iter()
                        .map(|w| w + m as f64 * spec.grid_spacing_nm)
                        .collect(),
                )
                .unwrap();
                for policy in [Policy::LtC, Policy::LtA] {
                    assert_eq!(
                        arbitrate_ideal(&mwl, &row, policy, &s).feasible,
                        arbitrate_ideal(&shifted, &row, policy, &s).feasible,
                        "policy {policy:?} shift {m}"
                    );
                }
            }
        }
    }
}
