//! Acceptance suite: one test per criterion, each printing a `PASS`/`FAIL`
//! line (visible with `--nocapture`) before asserting.
//!
//! Run with:
//!
//! ```text
//! cargo test -p wlarb-cli --test acceptance -- --nocapture --test-threads 1
//! ```

use std::time::Instant;

use wlarb_cli::runner::parallel_map;
use wlarb_core::{
    arbitrate_ideal, brute_force_lta, build_lat, min_tuning_range, record_phase, run_cafp,
    sample_mwl, sample_ring_row, Algorithm, DwdmGridSpec, EnvState, MinTr, MinTrSearch, Policy,
    SearchMode, SpectralOrdering, StatRecord, TrialPlan, VariationParams,
};

use wlarb_core::rng::{derive_seed, Rng};

const STEP_NM: f64 = 0.056;

fn search() -> MinTrSearch {
    MinTrSearch::default()
}

fn natural() -> SpectralOrdering {
    SpectralOrdering::natural(8)
}

/// Minimum tuning range at one ring-local-variation value, everything else
/// from `var`.
fn mtr_at(
    var: &VariationParams,
    policy: Policy,
    ordering: &SpectralOrdering,
    seed: u64,
    cell: u64,
) -> MinTr {
    min_tuning_range(
        &DwdmGridSpec::default(),
        var,
        policy,
        ordering,
        ordering,
        &search(),
        seed,
        cell,
    )
    .unwrap()
}

fn mtr_sigma(policy: Policy, sigma_nm: f64, seed: u64) -> MinTr {
    let mut var = VariationParams::default();
    var.ring_local_bound_nm = sigma_nm;
    mtr_at(&var, policy, &natural(), seed, 0)
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn report(criterion: &str, pass: bool, detail: &str, started: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {verdict} — {detail} [{:.1}s]",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn c01_zero_variation_anchors() {
    let t = Instant::now();
    let var = VariationParams::default().without_variation();
    let nat = natural();
    let search = MinTrSearch {
        n_lasers: 4,
        n_rows: 4,
        ..MinTrSearch::default()
    };
    let grid = DwdmGridSpec::default();
    let ltc = min_tuning_range(&grid, &var, Policy::LtC, &nat, &nat, &search, 1, 0)
        .unwrap()
        .as_nm()
        .unwrap();
    let ltd = min_tuning_range(&grid, &var, Policy::LtD, &nat, &nat, &search, 1, 0)
        .unwrap()
        .as_nm()
        .unwrap();
    let mwl = sample_mwl(&grid, &var, &mut Rng::from_seed(0));
    let row = sample_ring_row(&grid, &var, &nat, &mut Rng::from_seed(0));
    let shift = arbitrate_ideal(&mwl, &row, Policy::LtC, &nat).shift;

    let pass = ltc <= STEP_NM && (ltd - 4.48).abs() <= STEP_NM + 1e-9 && shift == Some(4);
    report(
        "1 (zero-variation geometry)",
        pass,
        &format!("min-TR ltc {ltc:.3} nm, ltd {ltd:.3} nm, shift {shift:?}"),
        t,
    );
    assert!(pass);
}

#[test]
fn c02_slope_two_ramp() {
    let t = Instant::now();
    let sigmas: Vec<f64> = (1..=8).map(|i| i as f64 * 0.28).collect();
    let mut slopes = Vec::new();
    for policy in [Policy::LtA, Policy::LtC] {
        let values = parallel_map(sigmas.len(), 0, |i| {
            mtr_sigma(policy, sigmas[i], 7).as_nm().unwrap()
        });
        slopes.push(lsq_slope(&sigmas, &values));
    }
    let (lta, ltc) = (slopes[0], slopes[1]);
    let in_gate = |s: f64| (1.7..=2.3).contains(&s);
    let pass = in_gate(lta) && in_gate(ltc);
    report(
        "2 (slope-2 ramp)",
        pass,
        &format!("lsq slope lta {lta:.2}, ltc {ltc:.2}, gate [1.7, 2.3]"),
        t,
    );
    // Known red on the lta half: the matching policy reassigns around the
    // single-worst ring once 2*sigma exceeds about one grid step, bending
    // its ramp to ~1.4 over this window (with only grid offset and ring
    // variation active, both policies measure exactly 2.0 early on). The
    // cyclic policy meets the gate.
    assert!(pass, "lta {lta:.3}, ltc {ltc:.3}");
}

#[test]
fn c03_lta_saturation() {
    let t = Instant::now();
    // Saturated region: 4.5 grid steps and beyond. Each grid point is the
    // mean of 24 seeded searches, shrinking the max-statistic jitter of a
    // single 10^4-trial population.
    let sigmas = [5.04, 6.16, 7.28, 8.4, 8.96];
    const SEEDS: usize = 24;
    let means = parallel_map(sigmas.len() * SEEDS, 0, |idx| {
        let (si, k) = (idx / SEEDS, idx % SEEDS);
        mtr_sigma(Policy::LtA, sigmas[si], 1000 + k as u64)
            .as_nm()
            .unwrap()
    });
    let means: Vec<f64> = sigmas
        .iter()
        .enumerate()
        .map(|(si, _)| means[si * SEEDS..(si + 1) * SEEDS].iter().sum::<f64>() / SEEDS as f64)
        .collect();
    let lo = means.iter().cloned().fold(f64::MAX, f64::min);
    let hi = means.iter().cloned().fold(f64::MIN, f64::max);
    let pass = hi - lo <= 0.15;
    report(
        "3 (LtA saturation)",
        pass,
        &format!(
            "plateau spread {:.3} nm over sigma {:?} (gate 0.15 nm)",
            hi - lo,
            sigmas
        ),
        t,
    );
    assert!(pass, "means {means:?}");
}

#[test]
fn c04_ltd_slope_and_fsr_blowup() {
    let t = Instant::now();
    let mtr_ltd = |offset: f64, sigma: f64| -> MinTr {
        let mut var = VariationParams::default();
        var.grid_offset_bound_nm = offset;
        var.ring_local_bound_nm = sigma;
        mtr_at(&var, Policy::LtD, &natural(), 7, 0)
    };

    // Linear region before the FSR saturates the requirement.
    let grid0: Vec<f64> = (0..6).map(|i| 0.28 + i as f64 * 0.56).collect();
    let grid2: Vec<f64> = (1..=4).map(|i| i as f64 * 0.28).collect();
    let y0 = parallel_map(grid0.len(), 0, |i| mtr_ltd(0.0, grid0[i]).as_nm().unwrap());
    let y2 = parallel_map(grid2.len(), 0, |i| mtr_ltd(2.0, grid2[i]).as_nm().unwrap());
    let s0 = lsq_slope(&grid0, &y0);
    let s2 = lsq_slope(&grid2, &y2);

    // Large offsets: the requirement exceeds the FSR at every variation.
    let sigmas = [0.56, 1.12, 2.24, 4.48];
    let mut exceeds = true;
    for offset in [4.0, 8.0] {
        let vals = parallel_map(sigmas.len(), 0, |i| mtr_ltd(offset, sigmas[i]));
        for v in vals {
            exceeds &= match v {
                MinTr::Nm(x) => x > 8.96,
                MinTr::AboveMax => true,
            };
        }
    }

    let in_gate = |s: f64| (0.8..=1.2).contains(&s);
    let pass = in_gate(s0) && in_gate(s2) && exceeds;
    report(
        "4 (LtD slope and offset blow-up)",
        pass,
        &format!(
            "slope(offset 0) {s0:.2}, slope(offset 2) {s2:.2}, beyond-FSR at 4/8 nm: {exceeds}"
        ),
        t,
    );
    assert!(pass);
}

#[test]
fn c05_ordering_invariance() {
    let t = Instant::now();
    let sigmas = [0.28, 1.12, 2.24, 4.48, 8.96];
    let nat = SpectralOrdering::natural(8);
    let per = SpectralOrdering::permuted(8);
    let mut worst: f64 = 0.0;
    for policy in [Policy::LtA, Policy::LtC] {
        let diffs = parallel_map(sigmas.len(), 0, |i| {
            let mut var = VariationParams::default();
            var.ring_local_bound_nm = sigmas[i];
            let n = mtr_at(&var, policy, &nat, 7, i as u64).as_nm().unwrap();
            let p = mtr_at(&var, policy, &per, 7, i as u64).as_nm().unwrap();
            (n - p).abs()
        });
        for d in diffs {
            worst = worst.max(d);
        }
    }
    let pass = worst <= STEP_NM + 1e-9;
    report(
        "5 (ordering invariance)",
        pass,
        &format!("max |natural - permuted| = {worst:.4} nm (gate one step, {STEP_NM} nm)"),
        t,
    );
    assert!(pass);
}

#[test]
fn c06_laser_sensitivity() {
    let t = Instant::now();
    const PAIRS: usize = 8;
    let mut per_policy = Vec::new();
    for policy in [Policy::LtA, Policy::LtC] {
        let ends = parallel_map(2 * PAIRS, 0, |k| {
            let seed = 500 + (k / 2) as u64;
            let pct = if k % 2 == 0 { 0.01 } else { 0.45 };
            let mut var = VariationParams::default();
            var.laser_local_bound_nm = pct * 1.12;
            mtr_at(&var, policy, &natural(), seed, 0).as_nm().unwrap()
        });
        let lo = ends.iter().step_by(2).sum::<f64>() / PAIRS as f64;
        let hi = ends.iter().skip(1).step_by(2).sum::<f64>() / PAIRS as f64;
        // 1% -> 45% spans 44 percentage points of the grid spacing.
        per_policy.push((hi - lo) * 25.0 / 44.0);
    }
    let (lta, ltc) = (per_policy[0], per_policy[1]);
    let in_gate = |s: f64| (0.56 * 0.7..=0.56 * 1.3).contains(&s);
    let pass = in_gate(lta) && in_gate(ltc);
    report(
        "6 (laser-local sensitivity)",
        pass,
        &format!(
            "slope per 25% of spacing: lta {lta:.3} nm, ltc {ltc:.3} nm, gate [{:.3}, {:.3}]",
            0.56 * 0.7,
            0.56 * 1.3
        ),
        t,
    );
    // Known red on the lta half (measures ~0.36): at 45% local variation
    // adjacent comb lines nearly merge, so the matching policy absorbs the
    // outlier by reassignment. The cyclic policy meets the gate.
    assert!(pass, "lta {lta:.3}, ltc {ltc:.3}");
}

#[test]
fn c07_fsr_window() {
    let t = Instant::now();
    const SEEDS: usize = 12;
    let mtr_fsr = |policy: Policy, fsr: f64, seed: u64| -> f64 {
        let mut var = VariationParams::default();
        var.fsr_mean_nm = fsr;
        mtr_at(&var, policy, &natural(), seed, 0).as_nm().unwrap()
    };
    let mean_at = |policy: Policy, fsr: f64| -> f64 {
        let vals = parallel_map(SEEDS, 0, |k| mtr_fsr(policy, fsr, 2000 + k as u64));
        vals.iter().sum::<f64>() / SEEDS as f64
    };

    let mut window_ok = true;
    let mut worst_window = f64::MIN;
    let mut best_rise = f64::MIN;
    for policy in [Policy::LtA, Policy::LtC] {
        let nominal = mean_at(policy, 8.96);
        for fsr in [8.46, 8.71, 9.21, 9.46] {
            let increase = mean_at(policy, fsr) - nominal;
            worst_window = worst_window.max(increase);
            window_ok &= increase <= 0.5;
        }
        for fsr in [6.72, 7.28, 7.84, 8.18, 8.34] {
            best_rise = best_rise.max(mean_at(policy, fsr) - nominal);
        }
    }
    let sharp_rise = best_rise > 1.0;
    let pass = window_ok && sharp_rise;
    report(
        "7 (FSR design window)",
        pass,
        &format!(
            "window increase max {worst_window:.3} nm (gate 0.5); under-design rise max {best_rise:.3} nm (gate > 1.0)"
        ),
        t,
    );
    // Known red on the under-design half (measures ~0.7): with exact peak
    // coincidence the reachability distance wraps modulo the FSR, capping
    // the under-designed requirement just below the (smaller) FSR; a rise
    // past 1 nm needs a finite coincidence bandwidth, which this model
    // deliberately does not have. The ±0.5 nm window half passes.
    assert!(pass, "window_ok={window_ok} sharp_rise={sharp_rise}");
}

#[test]
fn c08_cafp_grid_ordering() {
    let t = Instant::now();
    let sigmas = [0.28, 1.12, 2.24, 3.36, 4.48, 5.6, 6.72, 7.84, 8.96];
    let trs: Vec<f64> = (0..17).map(|i| 1.12 + i as f64 * 0.56).collect();
    let cells: Vec<(usize, usize)> = (0..sigmas.len())
        .flat_map(|i| (0..trs.len()).map(move |j| (i, j)))
        .collect();

    let run_grid = |algorithm: Algorithm| -> Vec<StatRecord> {
        parallel_map(cells.len(), 0, |idx| {
            let (i, j) = cells[idx];
            let mut var = VariationParams::default();
            var.ring_local_bound_nm = sigmas[i];
            var.tr_mean_nm = trs[j];
            let mut plan = TrialPlan::new(DwdmGridSpec::default(), var, Policy::LtC, 7);
            plan.cell = idx as u64;
            plan.algorithm = Some(algorithm);
            run_cafp(&plan).unwrap()
        })
    };
    let vt = run_grid(Algorithm::VtRsSsm);
    let rs = run_grid(Algorithm::RsSsm);
    let seq = run_grid(Algorithm::Sequential);

    // Count identity holds on every conditional run.
    for rec in vt.iter().chain(&rs).chain(&seq) {
        assert!(rec.composition_holds());
    }

    // (a) The variation-tolerant scheme stays near the ideal arbiter
    // everywhere the ideal arbiter can succeed.
    let mut vt_worst: f64 = 0.0;
    for rec in &vt {
        if let Some(c) = rec.cafp {
            vt_worst = vt_worst.max(c);
        }
    }
    let vt_ok = vt_worst <= 0.005;

    // (b) Cell-wise ordering up to two-sigma binomial noise.
    let two_sigma = |a: &StatRecord, b: &StatRecord| -> f64 {
        let n = a.ideal_success.max(1) as f64;
        let pa = a.cafp.unwrap_or(0.0);
        let pb = b.cafp.unwrap_or(0.0);
        2.0 * ((pa * (1.0 - pa) / n) + (pb * (1.0 - pb) / n)).sqrt()
    };
    let mut ordering_ok = true;
    for idx in 0..cells.len() {
        if vt[idx].ideal_success == 0 {
            continue;
        }
        let (v, r, s) = (
            vt[idx].cafp.unwrap(),
            rs[idx].cafp.unwrap(),
            seq[idx].cafp.unwrap(),
        );
        ordering_ok &= v <= r + two_sigma(&vt[idx], &rs[idx]);
        ordering_ok &= r <= s + two_sigma(&rs[idx], &seq[idx]);
    }

    // (c) The plain relation search shows an elevated band near 8 nm tuning
    // ranges that the variation-tolerant retry suppresses.
    let band = |recs: &[StatRecord]| -> u64 {
        cells
            .iter()
            .zip(recs)
            .filter(|((_, j), _)| (7.28..=9.52).contains(&trs[*j]))
            .map(|(_, rec)| rec.cond_counts.unwrap().failures())
            .sum()
    };
    let rs_band = band(&rs);
    let vt_band = band(&vt);
    let band_ok = rs_band >= 50 && vt_band * 10 <= rs_band;

    let pass = vt_ok && ordering_ok && band_ok;
    report(
        "8 (CAFP grid ordering)",
        pass,
        &format!(
            "worst vt-rs/ssm cafp {vt_worst:.4} (gate 0.005); cell ordering {ordering_ok}; band fails rs {rs_band} vs vt {vt_band}"
        ),
        t,
    );
    assert!(pass);
}

#[test]
fn c09_failure_breakdown() {
    let t = Instant::now();
    let split = |var_base: &VariationParams, tr: f64, sigmas: &[f64]| -> (u64, u64) {
        let mut lock = 0;
        let mut lane = 0;
        let recs = parallel_map(sigmas.len(), 0, |i| {
            let mut var = var_base.clone();
            var.ring_local_bound_nm = sigmas[i];
            var.tr_mean_nm = tr;
            let mut plan = TrialPlan::new(DwdmGridSpec::default(), var, Policy::LtC, 7);
            plan.cell = i as u64;
            plan.algorithm = Some(Algorithm::Sequential);
            run_cafp(&plan).unwrap()
        });
        for rec in recs {
            let cond = rec.cond_counts.unwrap();
            lock += cond.lock_errors();
            lane += cond.lane_order;
        }
        (lock, lane)
    };

    // Above the FSR every ring sees the whole comb: ordering mistakes
    // dominate. Checked at the nominal variation set.
    let (lock_hi, lane_hi) = split(&VariationParams::default(), 10.08, &[1.12, 2.24, 4.48]);

    // Below the FSR, at the default tuning range and near-ideal laser and
    // FSR/TR variations, starvation and contention dominate.
    let mut ideal_dev = VariationParams::default();
    ideal_dev.grid_offset_bound_nm = 0.0;
    ideal_dev.laser_local_bound_nm = 0.001 * 1.12;
    ideal_dev.fsr_rel_bound = 0.001;
    ideal_dev.tr_rel_bound = 0.001;
    let (lock_lo, lane_lo) = split(&ideal_dev, 2.24, &[0.56, 1.12, 2.24]);

    let pass = lane_hi > lock_hi
        && lock_lo > lane_lo
        && (lane_hi + lock_hi) > 0
        && (lock_lo + lane_lo) > 0;
    report(
        "9 (failure-class breakdown)",
        pass,
        &format!(
            "tr 10.08 nm: lane {lane_hi} vs lock {lock_hi}; tr 2.24 nm near-ideal: lock {lock_lo} vs lane {lane_lo}"
        ),
        t,
    );
    assert!(pass);
}

#[test]
fn c10_matching_oracle_equivalence() {
    let t = Instant::now();
    let disagreements: usize = parallel_map(1000, 0, |t| {
        let n = 3 + (t % 4);
        let spec = DwdmGridSpec::scaled(n, 1.12).unwrap();
        let mut var = VariationParams::defaults_for(&spec);
        let mut rng = Rng::from_seed(derive_seed(0xACCE97, &[t as u64]));
        var.tr_mean_nm = rng.unit() * 1.5 * var.fsr_mean_nm;
        var.ring_local_bound_nm = rng.unit() * 4.0;
        var.grid_offset_bound_nm = rng.unit() * 15.0;
        let r = SpectralOrdering::natural(n);
        let mwl = sample_mwl(&spec, &var, &mut rng);
        let row = sample_ring_row(&spec, &var, &r, &mut rng);
        let fast = arbitrate_ideal(&mwl, &row, Policy::LtA, &r).feasible;
        let slow = brute_force_lta(&mwl, &row).unwrap();
        usize::from(fast != slow)
    })
    .into_iter()
    .sum();
    let pass = disagreements == 0;
    report(
        "10 (matching vs permutation oracle)",
        pass,
        &format!("{disagreements} disagreements over 1000 instances, n_ch 3..6"),
        t,
    );
    assert!(pass);
}

#[test]
fn c11_property_suite() {
    let t = Instant::now();

    // Count identity on conditional runs across orderings and algorithms.
    let mut identity_ok = true;
    for (i, algorithm) in [Algorithm::Sequential, Algorithm::RsSsm, Algorithm::VtRsSsm]
        .iter()
        .enumerate()
    {
        for permuted in [false, true] {
            let mut var = VariationParams::default();
            var.tr_mean_nm = 3.36;
            let mut plan = TrialPlan::new(DwdmGridSpec::default(), var, Policy::LtC, 11);
            if permuted {
                plan.fab_order = SpectralOrdering::permuted(8);
                plan.target_order = SpectralOrdering::permuted(8);
            }
            plan.n_lasers = 40;
            plan.n_rows = 40;
            plan.cell = i as u64;
            plan.algorithm = Some(*algorithm);
            identity_ok &= run_cafp(&plan).unwrap().composition_holds();
        }
    }

    // Policy inclusion over 10^4 sampled systems.
    let spec = DwdmGridSpec::default();
    let violations: usize = parallel_map(10_000, 0, |i| {
        let mut var = VariationParams::default();
        var.grid_offset_bound_nm = [0.0, 2.0, 15.0][i % 3];
        var.ring_local_bound_nm = [0.28, 1.12, 2.24, 4.48][i % 4];
        var.tr_mean_nm = [2.24, 4.48, 6.72, 8.96, 10.08][i % 5];
        let s = natural();
        let mut rng = Rng::from_seed(derive_seed(0x11C7, &[i as u64]));
        let mwl = sample_mwl(&spec, &var, &mut rng);
        let row = sample_ring_row(&spec, &var, &s, &mut rng);
        let ltd = arbitrate_ideal(&mwl, &row, Policy::LtD, &s).feasible;
        let ltc = arbitrate_ideal(&mwl, &row, Policy::LtC, &s).feasible;
        let lta = arbitrate_ideal(&mwl, &row, Policy::LtA, &s).feasible;
        usize::from((ltd && !ltc) || (ltc && !lta))
    })
    .into_iter()
    .sum();
    let inclusion_ok = violations == 0;

    // Referee-checked lock-allocation-table row soundness over 10^3 record
    // phases spanning low to extreme variation.
    let lat_violations: usize = parallel_map(1000, 0, |i| {
        let mut var = VariationParams::default();
        var.ring_local_bound_nm = [0.28, 2.24, 5.6, 8.96][i % 4];
        var.tr_mean_nm = [2.24, 4.48, 8.4, 10.08][(i / 4) % 4];
        let s = if i % 2 == 0 {
            natural()
        } else {
            SpectralOrdering::permuted(8)
        };
        let mut rng = Rng::from_seed(derive_seed(0x7AB1E, &[i as u64]));
        let mwl = sample_mwl(&spec, &var, &mut rng);
        let row = sample_ring_row(&spec, &var, &s, &mut rng);
        let mut env = EnvState::new(&mwl, &row);
        let rec = record_phase(&mut env, &s, SearchMode::VtRs).unwrap();
        let lat = build_lat(rec.tables, &rec.relations, &s).unwrap();
        let mut bad = 0;
        for chain in &lat.sub_tables {
            let mut rows: std::collections::BTreeMap<i64, usize> = Default::default();
            for m in chain {
                let table = lat.table(m.ring);
                for (idx, &code) in table.codes.iter().enumerate() {
                    let laser = env.hit_laser(m.ring, code).expect("entries map to lasers");
                    let row_id = m.row_offset + idx as i64;
                    if let Some(&prev) = rows.get(&row_id) {
                        if prev != laser {
                            bad += 1;
                        }
                    } else {
                        rows.insert(row_id, laser);
                    }
                }
            }
        }
        bad
    })
    .into_iter()
    .sum();
    let lat_ok = lat_violations == 0;

    // Byte-identical CSV across reruns and parallelism settings.
    let cfg_path = std::env::temp_dir().join(format!("wlarb-accept-{}.cfg", std::process::id()));
    std::fs::write(
        &cfg_path,
        "[sweep]\nrange1 = 1.12 : 3.36 : 1.12 nm\nrange2 = 2.24 : 4.48 : 1.12 nm\n[run]\nn_lasers = 10\nn_rows = 10\n",
    )
    .unwrap();
    let run_bin = |jobs: &str| -> Vec<u8> {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_wlarb"))
            .args([
                "shmoo",
                "--config",
                cfg_path.to_str().unwrap(),
                "--jobs",
                jobs,
            ])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        out.stdout
    };
    let csv_ok = {
        let a = run_bin("1");
        let b = run_bin("4");
        let c = run_bin("1");
        a == b && a == c && !a.is_empty()
    };

    let pass = identity_ok && inclusion_ok && lat_ok && csv_ok;
    report(
        "11 (property suite)",
        pass,
        &format!(
            "count identity {identity_ok}; policy inclusion violations {violations}; LAT row violations {lat_violations}; CSV determinism {csv_ok}"
        ),
        t,
    );
    assert!(pass);
}
