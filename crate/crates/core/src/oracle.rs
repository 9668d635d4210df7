//! Independent brute-force oracles on small truncated universes.
//!
//! Every function here evaluates a definition literally, by exhaustive
//! enumeration over an explicit window `[0, N)`, and shares no logic with
//! the main algorithms.  The oracles are the trust anchor for the expected
//! values frozen in the test suite: where an algorithm answers with a
//! certificate, the matching oracle re-derives the answer by counting.
//!
//! Infinitary notions are replaced by declared conventions at the window
//! edge: a set truncated to `[0, N)` carries a tail convention saying
//! whether it continues full or empty past `N`, and a candidate counts as
//! "persisting" when it still meets the final blocks of the window.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DyadicRational;
use crate::partition::BlockPartition;
use crate::Nat;

/// Largest window any oracle enumerates points in.
pub const MAX_WINDOW: Nat = 24;

/// Largest window for full subset enumeration (`2^N` masks).
pub const MAX_ENUMERATION_WINDOW: Nat = 16;

// ---------------------------------------------------------------------------
// truncated sets
// ---------------------------------------------------------------------------

/// What a truncated set does past its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailConvention {
    Empty,
    Full,
}

/// An explicitly listed set over `[0, N)` with a declared tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSet {
    pub window: Nat,
    pub members: BTreeSet<Nat>,
    pub tail: TailConvention,
}

impl TruncatedSet {
    pub fn new(
        window: Nat,
        members: impl IntoIterator<Item = Nat>,
        tail: TailConvention,
    ) -> Result<TruncatedSet> {
        if window > MAX_WINDOW {
            return Err(Error::InvalidInstance(format!(
                "oracle window {window} exceeds the {MAX_WINDOW}-point limit"
            )));
        }
        let members: BTreeSet<Nat> = members.into_iter().collect();
        if let Some(&big) = members.iter().next_back() {
            if big >= window {
                return Err(Error::InvalidInstance(format!(
                    "listed member {big} lies outside the window [0, {window})"
                )));
            }
        }
        Ok(TruncatedSet {
            window,
            members,
            tail,
        })
    }

    pub fn member(&self, x: Nat) -> bool {
        if x < self.window {
            self.members.contains(&x)
        } else {
            self.tail == TailConvention::Full
        }
    }
}

// ---------------------------------------------------------------------------
// pseudointersection oracle
// ---------------------------------------------------------------------------

/// One valid candidate found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleTrace {
    /// The candidate's points, ascending.
    pub points: Vec<Nat>,
    /// Indices of the listed blocks the candidate meets.
    pub blocks_met: Vec<usize>,
    /// Per generator, the points of the candidate outside it.
    pub exceptions: Vec<Vec<Nat>>,
}

fn check_candidate(
    points: &[Nat],
    generators: &[TruncatedSet],
    blocks: &[Vec<Nat>],
    persist_window: usize,
) -> Option<OracleTrace> {
    if blocks.is_empty() || persist_window == 0 || persist_window > blocks.len() {
        return None;
    }
    // the candidate must persist to the window edge: it meets one of the
    // final `persist_window` blocks
    let edge_start = blocks.len() - persist_window;
    let in_edge = |x: Nat| blocks[edge_start..].iter().any(|b| b.contains(&x));
    if !points.iter().any(|&x| in_edge(x)) {
        return None;
    }
    // almost-containment in each generator: every exception sits strictly
    // before the edge blocks, so no new exceptions appear at the horizon
    let mut exceptions = Vec::with_capacity(generators.len());
    for g in generators {
        let exc: Vec<Nat> = points.iter().copied().filter(|&x| !g.member(x)).collect();
        if exc.iter().any(|&x| in_edge(x)) {
            return None;
        }
        exceptions.push(exc);
    }
    let blocks_met = blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.iter().any(|x| points.contains(x)))
        .map(|(i, _)| i)
        .collect();
    Some(OracleTrace {
        points: points.to_vec(),
        blocks_met,
        exceptions,
    })
}

/// Does this explicit candidate pass the literal pseudointersection check?
///
/// The candidate must meet one of the final `persist_window` blocks (the
/// window proxy for being infinite) while keeping all of its points outside
/// any generator strictly before those final blocks (the window proxy for
/// finitely many exceptions).
pub fn oracle_validates_pseudointersection(
    points: &[Nat],
    generators: &[TruncatedSet],
    blocks: &[Vec<Nat>],
    persist_window: usize,
) -> Option<OracleTrace> {
    check_candidate(points, generators, blocks, persist_window)
}

/// All valid candidates over the union of the listed blocks, by full
/// enumeration of every subset.  The union may hold at most 16 points.
pub fn oracle_pseudointersection(
    generators: &[TruncatedSet],
    blocks: &[Vec<Nat>],
    persist_window: usize,
) -> Result<Vec<OracleTrace>> {
    let mut universe: Vec<Nat> = blocks.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    let n = universe.len();
    if n as Nat > MAX_ENUMERATION_WINDOW {
        return Err(Error::InvalidInstance(format!(
            "full enumeration over {n} points exceeds the \
             {MAX_ENUMERATION_WINDOW}-point limit"
        )));
    }
    let mut valid = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let points: Vec<Nat> = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| universe[i])
            .collect();
        if let Some(trace) = check_candidate(&points, generators, blocks, persist_window) {
            valid.push(trace);
        }
    }
    Ok(valid)
}

// ---------------------------------------------------------------------------
// measure oracle
// ---------------------------------------------------------------------------

/// Exact probability that a uniformly random 0–1 colouring of the union of
/// `factors` consecutive blocks (starting at block `from`) puts a 1 in
/// every one of them, computed by enumerating all colourings.
///
/// The block sizes may total at most 24 bits.
pub fn oracle_measure(
    partition: &BlockPartition,
    from: Nat,
    factors: Nat,
) -> Result<DyadicRational> {
    let sizes: Vec<Nat> = (from..from + factors).map(|m| partition.size(m)).collect();
    oracle_measure_sizes(&sizes)
}

/// Same enumeration over explicitly listed block sizes.
pub fn oracle_measure_sizes(sizes: &[Nat]) -> Result<DyadicRational> {
    let total: Nat = sizes.iter().sum();
    if total > MAX_WINDOW {
        return Err(Error::InvalidInstance(format!(
            "enumerating colourings of {total} points exceeds the \
             {MAX_WINDOW}-point limit"
        )));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidInstance("blocks must be nonempty".into()));
    }
    // block i occupies a contiguous bit range of the colouring mask
    let mut block_masks = Vec::with_capacity(sizes.len());
    let mut offset = 0u32;
    for &s in sizes {
        let m = ((1u64 << s) - 1) << offset;
        block_masks.push(m);
        offset += s as u32;
    }
    let mut hits = 0u64;
    for colouring in 0u64..(1u64 << total) {
        if block_masks.iter().all(|&m| colouring & m != 0) {
            hits += 1;
        }
    }
    Ok(DyadicRational::new(BigUint::from(hits), total))
}

// ---------------------------------------------------------------------------
// late-block-agreement oracle
// ---------------------------------------------------------------------------

/// A 0–1 valued function listed on `[0, N)` with a constant tail value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionTable {
    pub values: Vec<u8>,
    pub tail_value: u8,
    pub limit_value: u8,
}

impl FunctionTable {
    pub fn new(values: Vec<u8>, tail_value: u8, limit_value: u8) -> Result<FunctionTable> {
        if values.iter().any(|&b| b > 1) || tail_value > 1 || limit_value > 1 {
            return Err(Error::InvalidInstance(
                "function values must be bits".into(),
            ));
        }
        Ok(FunctionTable {
            values,
            tail_value,
            limit_value,
        })
    }

    pub fn value(&self, k: Nat) -> u8 {
        self.values
            .get(k as usize)
            .copied()
            .unwrap_or(self.tail_value)
    }
}

/// Does the function agree with its limit value somewhere in every listed
/// block from index `n` on?  Direct scan of the listed blocks.
pub fn oracle_late_agreement(f: &FunctionTable, n: Nat, blocks: &[Vec<Nat>]) -> bool {
    blocks
        .iter()
        .enumerate()
        .skip(n as usize)
        .all(|(_, block)| block.iter().any(|&k| f.value(k) == f.limit_value))
}
