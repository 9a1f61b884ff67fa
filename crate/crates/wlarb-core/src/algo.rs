//! Wavelength-oblivious arbitration algorithms.
//!
//! Three schemes drive the [`EnvState`](crate::env::EnvState) primitives:
//!
//! - Sequential lock-to-nearest: rings lock their lowest sweep entry in
//!   target-rank order, each lock persisting into later sweeps.
//! - Relation search + single-step matching (RS/SSM): a record phase infers
//!   index offsets between consecutive rings' search tables by aggressor
//!   masking, then a matching phase assigns lock targets in one pass over the
//!   resulting lock allocation table.
//! - Variation-tolerant relation search (VT-RS/SSM): same, but when neither
//!   the last nor the first aggressor target masks anything, the search
//!   retries with the aggressor locked to its second entry.

use alloc::vec;
use alloc::vec::Vec;

use crate::env::{classify_outcome, ArbitrationOutcome, EnvState, SearchTable};
use crate::fmath;
use crate::grid::SpectralOrdering;
use crate::ideal::Policy;
use crate::{Error, Result};

/// Record-phase strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Aggressor lock-to-last, then lock-to-first.
    Rs,
    /// As [`SearchMode::Rs`], retrying with lock-to-second when both fail.
    VtRs,
}

/// Arbitration algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sequential,
    RsSsm,
    VtRsSsm,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Sequential => "sequential",
            Algorithm::RsSsm => "rs-ssm",
            Algorithm::VtRsSsm => "vt-rs-ssm",
        }
    }
}

/// Index offset relating two search tables, or `Phi` when no relation was
/// observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationIndex {
    Found(i64),
    Phi,
}

impl RelationIndex {
    pub fn is_phi(&self) -> bool {
        matches!(self, RelationIndex::Phi)
    }

    /// Offset seen from the other side of the pair (role swap).
    pub fn negated(&self) -> Self {
        match self {
            RelationIndex::Found(x) => RelationIndex::Found(-x),
            RelationIndex::Phi => RelationIndex::Phi,
        }
    }
}

/// Lock targets per ring spatial index; `None` leaves the ring unlocked.
#[derive(Debug, Clone, PartialEq)]
pub struct LockPlan {
    codes: Vec<Option<f64>>,
}

impl LockPlan {
    pub fn code(&self, ring: usize) -> Option<f64> {
        self.codes[ring]
    }

    pub fn codes(&self) -> &[Option<f64>] {
        &self.codes
    }

    pub fn locked_count(&self) -> usize {
        self.codes.iter().filter(|c| c.is_some()).count()
    }

    pub fn apply(&self, env: &mut EnvState<'_>) -> Result<()> {
        for (ring, code) in self.codes.iter().enumerate() {
            if let Some(code) = code {
                env.lock(ring, *code)?;
            }
        }
        Ok(())
    }
}

/// Sequentially tunes rings in ascending target rank, locking each to its
/// nearest (lowest-code) visible peak. Rings with an empty sweep stay
/// unlocked; every lock persists and masks later sweeps of downstream rings.
pub fn sequential_lock_to_nearest(env: &mut EnvState<'_>, s: &SpectralOrdering) -> LockPlan {
    let n = s.len();
    let mut codes = vec![None; n];
    for rank in 0..n {
        let ring = s.ring_at_rank(rank);
        let st = env.sweep(ring);
        if let Some(&code) = st.codes.first() {
            env.lock(ring, code)
                .expect("sweep codes lie within the tuning range");
            codes[ring] = Some(code);
        }
    }
    LockPlan { codes }
}

/// Runs one relation search between an upstream aggressor and a downstream
/// victim, both currently unlocked.
///
/// Both rings are swept, then the aggressor locks each strategy target in
/// turn (last entry, first entry; second entry as a VT-RS fallback when both
/// fail). A target that masks victim entries yields
/// `index(masked in ST_v) - index(target in ST_a)`. Once a tuning range
/// reaches the FSR the masked wavelength shows up at several codes and all
/// of its replicas vanish together; the replica nearest the aggressor's
/// position anchors the offset, which keeps the raw value the
/// maximal-overlap table alignment. Offsets from two strategies are then
/// alignments of the same cyclic sequence and must agree modulo the channel
/// count, otherwise the relation degrades to `Phi`. The environment is
/// restored before returning.
pub fn relation_search(
    env: &mut EnvState<'_>,
    aggressor: usize,
    victim: usize,
    mode: SearchMode,
) -> Result<RelationIndex> {
    if aggressor >= victim {
        return Err(Error::RoleOrder { aggressor, victim });
    }
    if env.lock_code(aggressor).is_some() {
        return Err(Error::RingLocked(aggressor));
    }
    if env.lock_code(victim).is_some() {
        return Err(Error::RingLocked(victim));
    }

    let st_a = env.sweep(aggressor);
    let st_v = env.sweep(victim);
    if st_a.is_empty() || st_v.is_empty() {
        return Ok(RelationIndex::Phi);
    }

    let mut offsets: Vec<i64> = Vec::with_capacity(2);
    let last = st_a.len() - 1;
    let mut primary = vec![last];
    if last != 0 {
        primary.push(0);
    }
    for target in primary {
        if let Some(ri) = aggression(env, &st_a, &st_v, aggressor, victim, target) {
            offsets.push(ri);
        }
    }
    if offsets.is_empty() && mode == SearchMode::VtRs && st_a.len() >= 3 {
        if let Some(ri) = aggression(env, &st_a, &st_v, aggressor, victim, 1) {
            offsets.push(ri);
        }
    }

    let n = env.n_ch() as i64;
    match offsets.as_slice() {
        [] => Ok(RelationIndex::Phi),
        [x] => Ok(RelationIndex::Found(*x)),
        [x, y] if (x - y).rem_euclid(n) == 0 => Ok(RelationIndex::Found(*x)),
        // Conflicting aggressions: no trustworthy relation.
        _ => Ok(RelationIndex::Phi),
    }
}

/// Locks the aggressor at `st_a[target]`, re-sweeps the victim and diffs the
/// result against `st_v`. A single lock masks exactly one wavelength, so
/// every missing entry is a replica of it; the one whose code lies nearest
/// the aggressor's target code anchors the offset. No missing entry
/// discards the attempt.
fn aggression(
    env: &mut EnvState<'_>,
    st_a: &SearchTable,
    st_v: &SearchTable,
    aggressor: usize,
    victim: usize,
    target: usize,
) -> Option<i64> {
    let eps = env.eps_nm();
    env.lock(aggressor, st_a.codes[target])
        .expect("sweep codes lie within the tuning range");
    let post = env.sweep(victim);
    env.unlock(aggressor);

    let target_code = st_a.codes[target];
    let mut anchor: Option<(f64, usize)> = None;
    let mut post_iter = post.codes.iter().peekable();
    for (i, &code) in st_v.codes.iter().enumerate() {
        let mut matched = false;
        while let Some(&&p) = post_iter.peek() {
            if p < code - eps {
                post_iter.next();
            } else {
                if fmath::abs(p - code) <= eps {
                    post_iter.next();
                    matched = true;
                }
                break;
            }
        }
        if !matched {
            let distance = fmath::abs(code - target_code);
            let closer = match anchor {
                None => true,
                Some((d, _)) => distance < d,
            };
            if closer {
                anchor = Some((distance, i));
            }
        }
    }
    anchor.map(|(_, i)| i as i64 - target as i64)
}

/// Consecutive-rank ring pairs derived from the target ordering, including
/// the wrap pair: slot `p` holds the rings at ranks `p` and `p+1 mod n`.
pub fn consecutive_rank_pairs(s: &SpectralOrdering) -> Vec<(usize, usize)> {
    let n = s.len();
    (0..n)
        .map(|p| (s.ring_at_rank(p), s.ring_at_rank((p + 1) % n)))
        .collect()
}

/// Record-phase output: fresh per-ring search tables plus one relation per
/// consecutive rank pair. `relations[p]` is the offset of the rank-`p+1`
/// ring's table relative to the rank-`p` ring's table.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordPhase {
    pub tables: Vec<SearchTable>,
    pub relations: Vec<RelationIndex>,
}

/// Runs the record phase: `n` relation searches over the consecutive rank
/// pairs of `s`, assigning aggressor/victim roles by physical order. When
/// the rank predecessor is physically downstream the measured offset is
/// negated to express it in rank order. Leaves the environment lock-free.
pub fn record_phase(
    env: &mut EnvState<'_>,
    s: &SpectralOrdering,
    mode: SearchMode,
) -> Result<RecordPhase> {
    if !env.is_lock_free() {
        let locked = (0..env.n_ch())
            .find(|&r| env.lock_code(r).is_some())
            .expect("non-lock-free env has a locked ring");
        return Err(Error::RingLocked(locked));
    }
    let n = s.len();
    let tables: Vec<SearchTable> = (0..n).map(|ring| env.sweep(ring)).collect();
    let mut relations = Vec::with_capacity(n);
    for (pred, succ) in consecutive_rank_pairs(s) {
        let ri = if pred < succ {
            relation_search(env, pred, succ, mode)?
        } else {
            relation_search(env, succ, pred, mode)?.negated()
        };
        relations.push(ri);
    }
    debug_assert!(env.is_lock_free());
    Ok(RecordPhase { tables, relations })
}

/// One ring's position inside a lock allocation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatMember {
    pub ring: usize,
    /// Vertical placement of the ring's search table: entry `i` of the table
    /// sits at row `row_offset + i`, and entries sharing a row correspond to
    /// the same laser wavelength.
    pub row_offset: i64,
}

/// Search tables aligned by relation indices into wavelength-equivalence
/// rows. `Phi` relations split the row into separately-aligned sub-tables;
/// with no `Phi` at all the single table closes cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct LockAllocationTable {
    /// Chains of rings in rank order, one per cluster, ordered by the rank
    /// slot of the `Phi` boundary that opens them.
    pub sub_tables: Vec<Vec<LatMember>>,
    /// True iff no relation came back `Phi`.
    pub cyclic: bool,
    tables: Vec<SearchTable>,
}

impl LockAllocationTable {
    pub fn table(&self, ring: usize) -> &SearchTable {
        &self.tables[ring]
    }

    pub fn phi_count(&self) -> usize {
        if self.cyclic {
            0
        } else {
            self.sub_tables.len()
        }
    }
}

/// Aligns the recorded search tables into a lock allocation table.
///
/// Within a chain, cumulative relation sums place each table at its row
/// offset (`offset(succ) = offset(pred) - RI(pred, succ)`, so the masked
/// entries land on a shared row). Chains break at every `Phi` slot,
/// cyclically; zero `Phi` keeps all rings in one cyclic chain anchored at
/// rank 0.
pub fn build_lat(
    tables: Vec<SearchTable>,
    relations: &[RelationIndex],
    s: &SpectralOrdering,
) -> Result<LockAllocationTable> {
    let n = s.len();
    if tables.len() != n || relations.len() != n {
        return Err(Error::InvalidParameter("tables/relations length mismatch"));
    }
    let mut seen = vec![false; n];
    let phi_slots: Vec<usize> = relations
        .iter()
        .enumerate()
        .filter_map(|(p, ri)| ri.is_phi().then_some(p))
        .collect();

    let mut sub_tables = Vec::new();
    if phi_slots.is_empty() {
        let mut members = Vec::with_capacity(n);
        let mut offset = 0i64;
        members.push(LatMember {
            ring: s.ring_at_rank(0),
            row_offset: 0,
        });
        for p in 0..n - 1 {
            let RelationIndex::Found(ri) = relations[p] else {
                unreachable!()
            };
            offset -= ri;
            members.push(LatMember {
                ring: s.ring_at_rank(p + 1),
                row_offset: offset,
            });
        }
        sub_tables.push(members);
    } else {
        for (i, &slot) in phi_slots.iter().enumerate() {
            let end_rank = phi_slots[(i + 1) % phi_slots.len()];
            let mut members = Vec::new();
            let mut rank = (slot + 1) % n;
            let mut offset = 0i64;
            members.push(LatMember {
                ring: s.ring_at_rank(rank),
                row_offset: 0,
            });
            while rank != end_rank {
                let RelationIndex::Found(ri) = relations[rank] else {
                    unreachable!("interior slots are non-phi by construction")
                };
                let next = (rank + 1) % n;
                offset -= ri;
                members.push(LatMember {
                    ring: s.ring_at_rank(next),
                    row_offset: offset,
                });
                rank = next;
            }
            sub_tables.push(members);
        }
    }

    for st in &sub_tables {
        for m in st {
            if seen[m.ring] {
                return Err(Error::InconsistentOffsets { ring: m.ring });
            }
            seen[m.ring] = true;
        }
    }
    let cyclic = phi_slots.is_empty();
    Ok(LockAllocationTable {
        sub_tables,
        cyclic,
        tables,
    })
}

/// Entry index whose aligned row falls in the requested row class: indices
/// congruent to `class - offset` step through replicas of one wavelength, so
/// the smallest one is the least-tuning choice.
fn index_in_class(table: &SearchTable, offset: i64, class: i64, n: i64) -> Option<usize> {
    let idx = (class - offset).rem_euclid(n) as usize;
    (idx < table.len()).then_some(idx)
}

/// Single-step matching: derives every ring's lock target from the lock
/// allocation table in one pass.
///
/// Aligned rows repeat with the channel count (consecutive entries sit on
/// cyclically consecutive wavelengths), so diagonals are scanned over row
/// classes modulo `n_ch`. With zero or one `Phi` all rings share one chain
/// and the ring at chain position `j` takes its entry in row class
/// `r0 + j`; among diagonals covering every ring the one with minimal total
/// tuning distance wins, ties to the smallest `r0`. Two or more `Phi`
/// boundaries leave the clusters mutually unaligned; each sub-table then
/// anchors its first ring to its first entry and its last ring to its last
/// entry, filling middles along the class diagonal from the first anchor.
/// A ring whose required row class has no entry stays unlocked.
pub fn single_step_match(lat: &LockAllocationTable) -> LockPlan {
    let n = lat.tables.len();
    let n_i = n as i64;
    let mut codes: Vec<Option<f64>> = vec![None; n];

    if lat.sub_tables.len() == 1 {
        let members = &lat.sub_tables[0];
        let mut best: Option<(usize, f64, i64, Vec<Option<f64>>)> = None;
        for r0 in 0..n_i {
            let mut cand: Vec<Option<f64>> = vec![None; n];
            let mut unlocked = 0usize;
            let mut distance = 0.0f64;
            for (j, m) in members.iter().enumerate() {
                let table = &lat.tables[m.ring];
                match index_in_class(table, m.row_offset, r0 + j as i64, n_i) {
                    Some(idx) => {
                        let code = table.codes[idx];
                        cand[m.ring] = Some(code);
                        distance += code;
                    }
                    None => unlocked += 1,
                }
            }
            let better = match &best {
                None => true,
                Some((u, d, r, _)) => {
                    unlocked < *u
                        || (unlocked == *u && (distance < *d || (distance == *d && r0 < *r)))
                }
            };
            if better {
                best = Some((unlocked, distance, r0, cand));
            }
        }
        codes = best.expect("at least one diagonal is scanned").3;
    } else {
        for members in &lat.sub_tables {
            let count = members.len();
            if count == 1 {
                let m = &members[0];
                if let Some(&c) = lat.tables[m.ring].codes.first() {
                    codes[m.ring] = Some(c);
                }
                continue;
            }
            // First anchor: first entry of the first ring's table.
            let first = &members[0];
            if let Some(&c) = lat.tables[first.ring].codes.first() {
                codes[first.ring] = Some(c);
            }
            let base_class = first.row_offset;
            for (j, m) in members.iter().enumerate().skip(1) {
                let table = &lat.tables[m.ring];
                if j == count - 1 {
                    // Last anchor: last entry.
                    if let Some(&c) = table.codes.last() {
                        codes[m.ring] = Some(c);
                    }
                } else if let Some(idx) =
                    index_in_class(table, m.row_offset, base_class + j as i64, n_i)
                {
                    codes[m.ring] = Some(table.codes[idx]);
                }
            }
        }
    }
    LockPlan { codes }
}

/// Runs one full arbitration attempt in a fresh environment and grades the
/// final lock state against the policy. Failures inside the table machinery
/// leave rings unlocked and therefore surface through the referee.
pub fn run_algorithm(
    env: &mut EnvState<'_>,
    s: &SpectralOrdering,
    policy: Policy,
    algorithm: Algorithm,
) -> ArbitrationOutcome {
    debug_assert!(env.is_lock_free());
    match algorithm {
        Algorithm::Sequential => {
            sequential_lock_to_nearest(env, s);
        }
        Algorithm::RsSsm | Algorithm::VtRsSsm => {
            let mode = if algorithm == Algorithm::RsSsm {
                SearchMode::Rs
            } else {
                SearchMode::VtRs
            };
            let record = record_phase(env, s, mode).expect("environment starts lock-free");
            if let Ok(lat) = build_lat(record.tables, &record.relations, s) {
                let plan = single_step_match(&lat);
                plan.apply(env).expect("plan codes come from sweeps");
            }
        }
    }
    let capture = env.resolve_captures();
    classify_outcome(&capture, s, policy)
}
