//! Pseudointersection machinery.
//!
//! Three constructions live here: the bounded-block recursion producing an
//! infinite pseudointersection of a filter whose members meet almost every
//! block of a bounded partition; the submeasure segment construction that
//! turns a decreasing chain in a summable filter into a positive
//! pseudointersection; and the refuter showing that the canonical decreasing
//! chain in the product filter on pairs admits no positive
//! pseudointersection.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    cardinality, difference_finite, eventual_form, is_empty, verify_infinitude, Card,
    InfinitudeCert,
};
use crate::error::{Error, Result};
use crate::filters::{Filter, FilterPresentation, MembershipCert, RatioString};
use crate::partition::BlockPartition;
use crate::sets::{RowScheme, RowSpec, SetDescription};
use crate::verdict::Verdict;
use crate::weights::{first_mass_crossing, mass_of, DivergenceCert, MassVerdict, WeightRule};
use crate::Nat;

// ---------------------------------------------------------------------------
// bounded-block instances
// ---------------------------------------------------------------------------

/// A validated instance of the bounded-block hypothesis: blocks
/// `C_i = block(i) ∩ carrier` for `i` in an infinite index set, all sizes
/// bounded by `bound`, and a finite generator family whose every nonempty
/// intersection meets all but finitely many blocks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundedBlockInstance {
    partition: BlockPartition,
    indices: SetDescription,
    carrier: SetDescription,
    generators: Vec<SetDescription>,
    bound: Nat,
}

impl BoundedBlockInstance {
    /// Validate the hypothesis.  Rejections carry the violating data; an
    /// analysis that cannot settle a required infinitary fact is an error,
    /// never a silent pass.
    pub fn new(
        partition: BlockPartition,
        indices: SetDescription,
        carrier: SetDescription,
        generators: Vec<SetDescription>,
    ) -> Result<Self> {
        for (name, s) in std::iter::once(("index set", &indices))
            .chain(std::iter::once(("carrier", &carrier)))
            .chain(generators.iter().map(|g| ("generator", g)))
        {
            if s.universe()? != crate::sets::Universe::Naturals {
                return Err(Error::UniverseMismatch(format!(
                    "{name} must be a set of naturals"
                )));
            }
        }
        if partition.bounded_tail().is_none() {
            return Err(Error::Precondition(
                "block sizes must stay bounded; unbounded size rules are out of \
                 reach of the bounded-block recursion"
                    .into(),
            ));
        }
        if generators.is_empty() {
            return Err(Error::InvalidInstance("no generators supplied".into()));
        }
        // the index set must be infinite
        if cardinality(&indices).infinitude().is_none() {
            return Err(match cardinality(&indices) {
                Card::Finite { .. } => {
                    Error::InvalidInstance("the index set is finite".into())
                }
                _ => Error::Precondition(
                    "cannot certify that the index set is infinite".into(),
                ),
            });
        }
        // every indexed block must be nonempty
        let nonempty =
            SetDescription::block_count(partition.clone(), carrier.clone(), 1, None);
        let straying = SetDescription::and(vec![
            indices.clone(),
            SetDescription::not(nonempty),
        ]);
        match is_empty(&straying) {
            Some(true) => {}
            Some(false) => {
                let sample = straying.members_below(0, 4096);
                return Err(Error::InvalidInstance(format!(
                    "indexed blocks are empty, e.g. at indices {:?}",
                    &sample[..sample.len().min(5)]
                )));
            }
            None => {
                return Err(Error::Precondition(
                    "cannot certify that every indexed block is nonempty".into(),
                ))
            }
        }
        // every nonempty intersection of generators must meet all but
        // finitely many indexed blocks — the finite presentation of "every
        // filter element meets almost every block"
        for mask in 1u32..(1 << generators.len()) {
            let inter = Self::subset_intersection(&generators, mask);
            let hit_indices = SetDescription::block_count(
                partition.clone(),
                SetDescription::and(vec![carrier.clone(), inter]),
                1,
                None,
            );
            match difference_finite(&indices, &hit_indices) {
                Verdict::Proved { .. } => {}
                Verdict::Refuted { .. } => {
                    let missed = SetDescription::and(vec![
                        indices.clone(),
                        SetDescription::not(hit_indices),
                    ]);
                    let sample = missed.members_below(0, 4096);
                    return Err(Error::InvalidInstance(format!(
                        "generators {:?} miss infinitely many blocks, e.g. {:?}",
                        mask_members(mask),
                        &sample[..sample.len().min(5)]
                    )));
                }
                Verdict::Unknown { .. } => {
                    return Err(Error::Precondition(format!(
                        "cannot certify that generators {:?} meet almost every block",
                        mask_members(mask)
                    )))
                }
            }
        }
        let bound = exact_size_bound(&partition, &indices, &carrier).ok_or_else(|| {
            Error::Precondition(
                "cannot compute the block size supremum for this carrier".into(),
            )
        })?;
        if bound == 0 {
            return Err(Error::InvalidInstance(
                "all indexed blocks are empty".into(),
            ));
        }
        Ok(BoundedBlockInstance {
            partition,
            indices,
            carrier,
            generators,
            bound,
        })
    }

    fn subset_intersection(generators: &[SetDescription], mask: u32) -> SetDescription {
        SetDescription::and(
            generators
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, g)| g.clone())
                .collect(),
        )
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn generators(&self) -> &[SetDescription] {
        &self.generators
    }

    /// The supremum of indexed block sizes.
    pub fn bound(&self) -> Nat {
        self.bound
    }
}

fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask & (1 << j) != 0).collect()
}

/// Exact supremum of `|block(i) ∩ carrier|` over `i` in the index set,
/// computed from the eventual periodicity of the carrier and index set.
fn exact_size_bound(
    partition: &BlockPartition,
    indices: &SetDescription,
    carrier: &SetDescription,
) -> Option<Nat> {
    let c = partition.bounded_tail()?;
    let idx = eventual_form(indices)?;
    let car = eventual_form(carrier)?;
    // counts per block repeat once both the block layout and the carrier
    // pattern are periodic; indices add their own block-level period
    let sync_point = car.from.max(1);
    let sync_block = partition.block_of(sync_point - 1) + 1;
    let sync_block = sync_block.max(partition.tail_start()).max(idx.from);
    let count_cycle = {
        use num_integer::Integer;
        car.period.lcm(&c) / c
    };
    let cycle = {
        use num_integer::Integer;
        count_cycle.lcm(&idx.period)
    };
    let mut best = 0;
    for n in 0..sync_block + cycle {
        if indices.member(n) {
            best = best.max(carrier.count_in_block(partition, n));
        }
    }
    Some(best)
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

/// One level of the bounded-block recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionStep {
    /// Generator indices whose intersection was driven into the blocks.
    pub chosen: Vec<usize>,
    /// The surviving index set, rendered in the set grammar.
    pub indices: String,
    /// Size bound after this step.
    pub bound: Nat,
}

/// An infinite set almost contained in every generator, with its exception
/// sets materialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudointersectionCertificate {
    pub set: SetDescription,
    pub infinitude: InfinitudeCert,
    /// `exceptions[j]` lists the (finitely many) points of the set outside
    /// generator `j`.
    pub exceptions: Vec<Vec<Nat>>,
}

/// Output of the bounded-block recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedBlockOutput {
    pub certificate: PseudointersectionCertificate,
    pub trace: Vec<RecursionStep>,
}

impl BoundedBlockOutput {
    pub fn depth(&self) -> Nat {
        self.trace.len() as Nat
    }
}

// ---------------------------------------------------------------------------
// the bounded-block recursion
// ---------------------------------------------------------------------------

/// Extract an infinite pseudointersection of the generator family.
///
/// Recursion: while some intersection of generators cuts infinitely many
/// blocks below the current size bound, restrict to those blocks and drop
/// the bound; when no intersection does, the union of the surviving blocks
/// is almost contained in every generator.
pub fn bounded_block_pseudointersection(
    inst: &BoundedBlockInstance,
) -> Result<BoundedBlockOutput> {
    let p = &inst.partition;
    let mut indices = inst.indices.clone();
    let mut carrier = inst.carrier.clone();
    let mut bound = inst.bound;
    let mut trace = Vec::new();

    while bound > 1 {
        let mut advanced = false;
        for mask in 1u32..(1 << inst.generators.len()) {
            let inter = BoundedBlockInstance::subset_intersection(&inst.generators, mask);
            let shrunk = SetDescription::and(vec![carrier.clone(), inter]);
            // blocks the intersection cuts to a strictly smaller nonempty part
            let small = SetDescription::and(vec![
                indices.clone(),
                SetDescription::block_count(p.clone(), shrunk.clone(), 1, Some(bound)),
            ]);
            match cardinality(&small) {
                Card::Cofinite { .. } | Card::BiInfinite { .. } => {
                    indices = small;
                    carrier = shrunk;
                    bound -= 1;
                    trace.push(RecursionStep {
                        chosen: mask_members(mask),
                        indices: indices.to_string(),
                        bound,
                    });
                    advanced = true;
                    break;
                }
                Card::Finite { .. } => continue,
                Card::Unknown => {
                    return Err(Error::Precondition(format!(
                        "cannot decide whether generators {:?} cut infinitely many \
                         blocks below size {bound}",
                        mask_members(mask)
                    )))
                }
            }
        }
        if !advanced {
            break;
        }
    }

    let set = SetDescription::and(vec![
        SetDescription::union_of_blocks(p.clone(), indices.clone()),
        carrier.clone(),
    ]);
    let infinitude = match cardinality(&set).infinitude() {
        Some(cert) => cert,
        None => {
            // fall back to the index set's own periodic pattern: all its
            // blocks are nonempty in the final carrier
            let per = eventual_form(&indices).ok_or_else(|| {
                Error::Precondition("cannot certify the result infinite".into())
            })?;
            if per.is_empty_tail() {
                return Err(Error::Precondition(
                    "the surviving index set has an empty tail".into(),
                ));
            }
            InfinitudeCert::IndexedBlocks {
                partition: p.clone(),
                from_block: per.from,
                period: per.period,
                residues: per.member_residues(),
            }
        }
    };
    let exceptions = exception_lists(&set, &inst.generators)?;
    Ok(BoundedBlockOutput {
        certificate: PseudointersectionCertificate {
            set,
            infinitude,
            exceptions,
        },
        trace,
    })
}

/// Materialize `set ∖ g` for each generator, insisting the differences are
/// certifiably finite.
fn exception_lists(
    set: &SetDescription,
    generators: &[SetDescription],
) -> Result<Vec<Vec<Nat>>> {
    generators
        .iter()
        .map(|g| match difference_finite(set, g) {
            Verdict::Proved { certificate: b } => {
                Ok(SetDescription::and(vec![
                    set.clone(),
                    SetDescription::not(g.clone()),
                ])
                .members_below(0, b))
            }
            Verdict::Refuted { .. } => Err(Error::InvalidInstance(
                "constructed set escapes a generator infinitely often".into(),
            )),
            Verdict::Unknown { .. } => Err(Error::Precondition(
                "cannot certify the exception set finite".into(),
            )),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

/// Summary data of a successful re-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoSummary {
    pub elements_seen: Nat,
    pub horizon: Nat,
}

/// What went wrong when a certificate failed its re-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flaw", rename_all = "snake_case")]
pub enum PseudoFlaw {
    /// Too few elements materialized below the horizon.
    TooFewElements { seen: Nat },
    /// The stored infinitude certificate fails its sampled check.
    InfinitudeFails,
    /// A point of the set escapes the generator but is missing from the
    /// stored exception list.
    UnlistedException { generator: usize, point: Nat },
    /// A stored exception is not actually one.
    SpuriousException { generator: usize, point: Nat },
}

const MIN_ELEMENTS: Nat = 32;

/// Independently re-check a pseudointersection certificate against the
/// generator family.
pub fn verify_pseudointersection(
    cert: &PseudointersectionCertificate,
    generators: &[SetDescription],
    horizon: Nat,
) -> Verdict<PseudoSummary, PseudoFlaw> {
    let elements = cert.set.members_below(0, horizon).len() as Nat;
    if elements < MIN_ELEMENTS.min(horizon / 4) {
        return Verdict::refuted(PseudoFlaw::TooFewElements { seen: elements });
    }
    if !verify_infinitude(&cert.set, &cert.infinitude, horizon) {
        return Verdict::refuted(PseudoFlaw::InfinitudeFails);
    }
    for (j, g) in generators.iter().enumerate() {
        let stored: std::collections::BTreeSet<Nat> = cert
            .exceptions
            .get(j)
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default();
        let escape = SetDescription::and(vec![
            cert.set.clone(),
            SetDescription::not(g.clone()),
        ]);
        for x in escape.members_below(0, horizon) {
            if !stored.contains(&x) {
                return Verdict::refuted(PseudoFlaw::UnlistedException {
                    generator: j,
                    point: x,
                });
            }
        }
        for &x in &stored {
            if x < horizon && (!cert.set.member(x) || g.member(x)) {
                return Verdict::refuted(PseudoFlaw::SpuriousException {
                    generator: j,
                    point: x,
                });
            }
        }
    }
    Verdict::proved(PseudoSummary {
        elements_seen: elements,
        horizon,
    })
}

// ---------------------------------------------------------------------------
// segment construction in a summable filter
// ---------------------------------------------------------------------------

/// One segment `[start, end) ∩ A_k` whose weight provably exceeds the
/// threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSegment {
    pub threshold: Nat,
    pub start: Nat,
    pub end: Nat,
    pub mass_lower: RatioString,
    pub mass_upper: RatioString,
}

/// Output of the segment construction on a decreasing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentOutput {
    /// Cut points `n_0 = 0 < n_1 < …`, one past the last segment.
    pub cut_points: Vec<Nat>,
    pub segments: Vec<WeightSegment>,
    pub certificate: PseudointersectionCertificate,
    /// Divergence of the infinite tail riding on the last chain element,
    /// witnessing that the assembled set has infinite total weight.
    pub tail_divergence: DivergenceCert,
}

/// Assemble a positive pseudointersection of a decreasing chain in the
/// summable filter: segment `k` is a window of the `k`-th chain element
/// carrying weight above `k`, and past the last cut point the set follows
/// the final chain element outright.
pub fn segment_pseudointersection(
    weights: WeightRule,
    chain: &[SetDescription],
    cap: Nat,
) -> Result<SegmentOutput> {
    if chain.is_empty() {
        return Err(Error::Precondition("empty chain".into()));
    }
    let filter = Filter::new(FilterPresentation::Summable { weights })?;
    for (k, a) in chain.iter().enumerate() {
        if !filter.member(a)?.is_proved() {
            return Err(Error::Precondition(format!(
                "chain element {k} is not certified to belong to the summable filter"
            )));
        }
        if k + 1 < chain.len() {
            match is_empty(&SetDescription::and(vec![
                chain[k + 1].clone(),
                SetDescription::not(a.clone()),
            ])) {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::Precondition(format!(
                        "chain is not decreasing between elements {k} and {}",
                        k + 1
                    )))
                }
                None => {
                    return Err(Error::Precondition(format!(
                        "cannot certify the chain decreasing at element {}",
                        k + 1
                    )))
                }
            }
        }
    }

    let last = chain.len() - 1;
    let mut cut_points = vec![0];
    let mut segments = Vec::new();
    let mut parts = Vec::new();
    for (k, a) in chain.iter().enumerate() {
        let start = *cut_points.last().expect("nonempty");
        let crossing =
            first_mass_crossing(weights, a, start, k as Nat, cap).ok_or_else(|| {
                Error::Exhausted {
                    what: format!(
                        "segment {k} starting at {start} never accumulates weight \
                         above {k}"
                    ),
                    horizon: cap,
                }
            })?;
        segments.push(WeightSegment {
            threshold: k as Nat,
            start,
            end: crossing.end,
            mass_lower: RatioString::from(&crossing.mass.lower),
            mass_upper: RatioString::from(&crossing.mass.upper),
        });
        parts.push(SetDescription::and(vec![
            a.clone(),
            SetDescription::tail_from(start),
            SetDescription::not(SetDescription::tail_from(crossing.end)),
        ]));
        cut_points.push(crossing.end);
    }
    let tail_start = *cut_points.last().expect("nonempty");
    let tail_part = SetDescription::and(vec![
        chain[last].clone(),
        SetDescription::tail_from(tail_start),
    ]);
    let tail_divergence = match mass_of(weights, &tail_part, crate::DEFAULT_HORIZON) {
        MassVerdict::Divergent(cert) => cert,
        _ => {
            return Err(Error::Precondition(
                "cannot certify the tail of the construction divergent".into(),
            ))
        }
    };
    parts.push(tail_part);
    let set = SetDescription::or(parts);

    let infinitude = cardinality(&set).infinitude().ok_or_else(|| {
        Error::Precondition("cannot certify the assembled set infinite".into())
    })?;
    let exceptions = exception_lists(&set, chain)?;
    // the construction confines the exceptions against chain element k to
    // the points below cut k
    for (k, exc) in exceptions.iter().enumerate() {
        if let Some(&x) = exc.iter().max() {
            if x >= cut_points[k] {
                return Err(Error::Precondition(format!(
                    "exception {x} against chain element {k} escapes its window"
                )));
            }
        }
    }
    Ok(SegmentOutput {
        cut_points,
        segments,
        certificate: PseudointersectionCertificate {
            set,
            infinitude,
            exceptions,
        },
        tail_divergence,
    })
}

// ---------------------------------------------------------------------------
// the product-chain refuter
// ---------------------------------------------------------------------------

/// The canonical decreasing chain in the product filter, together with a
/// refuter showing no almost-contained infinite candidate is positive.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductChainWitness;

/// How the refuter disposed of a candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CandidateOutcome {
    /// The candidate is a genuine pseudointersection of the chain, and the
    /// returned blocking set — a filter member — misses it entirely.
    Blocked(ProductBlocking),
    /// Not almost contained in chain element `k` (the difference is
    /// infinite).
    FailsChain { k: Nat },
    /// Pseudointersections must be infinite.
    Finite,
}

/// The blocking data: per-row column cutoffs and the filter member built
/// from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBlocking {
    /// Cutoffs for the finitely many explicitly materialized rows.
    pub row_cutoffs: Vec<(Nat, Nat)>,
    /// Cutoff applied to every later row.
    pub default_cutoff: Nat,
    /// `{(r, c) : c ≥ cutoff(r)}` — disjoint from the candidate.
    pub blocking: SetDescription,
    /// Membership certificate of the blocking set in the product filter.
    pub membership: MembershipCert,
    /// Finiteness bounds for the checked chain differences.
    pub chain_bounds: Vec<Nat>,
}

impl ProductChainWitness {
    /// The `k`-th chain element: pairs with row index at least `k`.
    pub fn chain_element(&self, k: Nat) -> SetDescription {
        SetDescription::pairs(RowScheme::RowsFrom { k })
    }

    /// Decide a candidate's fate: reject finite or not-almost-contained
    /// candidates, otherwise certify every row finite and produce a
    /// disjoint member of the product filter.
    pub fn refute(&self, candidate: &SetDescription, depth: Nat) -> Result<CandidateOutcome> {
        if candidate.universe()? != crate::sets::Universe::Pairs {
            return Err(Error::UniverseMismatch(
                "candidates live over the pair universe".into(),
            ));
        }
        match cardinality(candidate) {
            Card::Finite { .. } => return Ok(CandidateOutcome::Finite),
            Card::Unknown => {
                return Err(Error::Precondition(
                    "cannot decide whether the candidate is infinite".into(),
                ))
            }
            _ => {}
        }
        let mut chain_bounds = Vec::new();
        for k in 1..=depth.max(1) {
            match difference_finite(candidate, &self.chain_element(k)) {
                Verdict::Proved { certificate } => chain_bounds.push(certificate),
                Verdict::Refuted { .. } => return Ok(CandidateOutcome::FailsChain { k }),
                Verdict::Unknown { .. } => {
                    return Err(Error::Precondition(format!(
                        "cannot decide almost-containment in chain element {k}"
                    )))
                }
            }
        }
        let rows = crate::analysis::rows_form(candidate).ok_or_else(|| {
            Error::Precondition("the candidate's row structure is not extractable".into())
        })?;
        // an infinite row at index r breaks almost-containment in element r+1
        let settled = rows.rows_settled();
        for r in 0..settled {
            if rows.row(r).has_tail() {
                return Ok(CandidateOutcome::FailsChain { k: r + 1 });
            }
        }
        if rows.default.has_tail() {
            return Ok(CandidateOutcome::FailsChain { k: settled + 1 });
        }
        let default_cutoff = rows.default.settled_after();
        let row_cutoffs: Vec<(Nat, Nat)> = (0..settled)
            .map(|r| (r, rows.row(r).settled_after()))
            .collect();
        let blocking = SetDescription::pairs(RowScheme::Table {
            rows: row_cutoffs
                .iter()
                .map(|&(r, c)| (r, RowSpec::From { c }))
                .collect(),
            default: RowSpec::From { c: default_cutoff },
        });
        let filter = Filter::new(FilterPresentation::PairProduct)?;
        let membership = match filter.member(&blocking)? {
            Verdict::Proved { certificate } => certificate,
            other => {
                return Err(Error::Precondition(format!(
                    "blocking set fails its own membership check: {other:?}"
                )))
            }
        };
        match is_empty(&SetDescription::and(vec![
            blocking.clone(),
            candidate.clone(),
        ])) {
            Some(true) => {}
            _ => {
                return Err(Error::Precondition(
                    "cannot certify the blocking set disjoint from the candidate".into(),
                ))
            }
        }
        Ok(CandidateOutcome::Blocked(ProductBlocking {
            row_cutoffs,
            default_cutoff,
            blocking,
            membership,
            chain_bounds,
        }))
    }

    /// Sample-check a blocking certificate: the blocking set must be a
    /// certified filter member and must avoid the candidate everywhere
    /// below the horizon.
    pub fn check_blocking(
        &self,
        candidate: &SetDescription,
        b: &ProductBlocking,
        horizon: Nat,
    ) -> bool {
        let filter = match Filter::new(FilterPresentation::PairProduct) {
            Ok(f) => f,
            Err(_) => return false,
        };
        if !filter.check_membership_cert(&b.blocking, &b.membership, horizon) {
            return false;
        }
        (0..horizon).all(|code| !(b.blocking.member(code) && candidate.member(code)))
    }
}

/// The chain-plus-refuter pair demonstrating that the product filter is not
/// positively pseudointersected.
pub fn product_chain_witness() -> ProductChainWitness {
    ProductChainWitness
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::pair;

    fn const_partition(c: Nat) -> BlockPartition {
        BlockPartition::constant(c)
    }

    #[test]
    fn trivial_bound_one_returns_the_union() {
        // singleton blocks, cofinite generator: nothing to do
        let inst = BoundedBlockInstance::new(
            const_partition(1),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::cofinite([0, 5])],
        )
        .unwrap();
        assert_eq!(inst.bound(), 1);
        let out = bounded_block_pseudointersection(&inst).unwrap();
        assert_eq!(out.depth(), 0);
        assert_eq!(
            out.certificate.exceptions,
            vec![vec![0, 5]],
            "the only escapes are the dropped points"
        );
        assert!(verify_pseudointersection(
            &out.certificate,
            inst.generators(),
            10_000
        )
        .is_proved());
    }

    #[test]
    fn paired_blocks_with_even_generator() {
        // blocks {2i, 2i+1}; the generator keeps one point per block
        let inst = BoundedBlockInstance::new(
            const_partition(2),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::evens()],
        )
        .unwrap();
        assert_eq!(inst.bound(), 2);
        let out = bounded_block_pseudointersection(&inst).unwrap();
        assert_eq!(out.depth(), 1, "one descent to size one");
        // the result is exactly the evens
        for x in 0..200 {
            assert_eq!(out.certificate.set.member(x), x % 2 == 0);
        }
        assert!(out.certificate.exceptions.iter().all(|e| e.is_empty()));
        assert!(verify_pseudointersection(
            &out.certificate,
            inst.generators(),
            10_000
        )
        .is_proved());
    }

    #[test]
    fn full_generator_changes_nothing() {
        let inst = BoundedBlockInstance::new(
            const_partition(2),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::evens(), SetDescription::everything()],
        )
        .unwrap();
        let out = bounded_block_pseudointersection(&inst).unwrap();
        assert!(out.depth() <= inst.bound());
        for x in 0..100 {
            assert_eq!(out.certificate.set.member(x), x % 2 == 0);
        }
    }

    #[test]
    fn rejects_a_generator_missing_infinitely_many_blocks() {
        let err = BoundedBlockInstance::new(
            const_partition(1),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::evens()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)), "{err}");
    }

    #[test]
    fn rejects_unbounded_sizes() {
        let err = BoundedBlockInstance::new(
            BlockPartition::linear(1),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::everything()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn verifier_catches_mutations() {
        let inst = BoundedBlockInstance::new(
            const_partition(2),
            SetDescription::everything(),
            SetDescription::everything(),
            vec![SetDescription::evens()],
        )
        .unwrap();
        let out = bounded_block_pseudointersection(&inst).unwrap();
        // drop a required exception: claim odds is also a generator
        let wrong_gens = vec![SetDescription::odds()];
        assert!(matches!(
            verify_pseudointersection(&out.certificate, &wrong_gens, 1_000),
            Verdict::Refuted {
                certificate: PseudoFlaw::UnlistedException { .. }
            }
        ));
        // corrupt the exception list of a fresh certificate
        let mut cert = out.certificate.clone();
        cert.exceptions[0] = vec![2];
        assert!(matches!(
            verify_pseudointersection(&cert, inst.generators(), 1_000),
            Verdict::Refuted {
                certificate: PseudoFlaw::SpuriousException { .. }
            }
        ));
    }

    #[test]
    fn unit_segments_grow_arithmetically() {
        // chain of plain tails under counting weights: the k-th segment
        // needs k+1 fresh points
        let chain: Vec<SetDescription> =
            (0..4).map(SetDescription::tail_from).collect();
        let out = segment_pseudointersection(WeightRule::Unit, &chain, 1 << 20).unwrap();
        assert_eq!(out.cut_points, vec![0, 1, 3, 6, 10]);
        let thresholds: Vec<Nat> = out.segments.iter().map(|s| s.threshold).collect();
        assert_eq!(thresholds, vec![0, 1, 2, 3]);
        // exceptions against element k stay below cut k
        for (k, exc) in out.certificate.exceptions.iter().enumerate() {
            assert!(exc.iter().all(|&x| x < out.cut_points[k]));
        }
        assert_eq!(out.certificate.exceptions[3], vec![0, 1, 2]);
        assert!(verify_pseudointersection(&out.certificate, &chain, 10_000).is_proved());
    }

    #[test]
    fn harmonic_segments_on_a_tail_chain() {
        let chain: Vec<SetDescription> = (0..3)
            .map(|k| SetDescription::cofinite(0..k))
            .collect();
        let out =
            segment_pseudointersection(WeightRule::Harmonic, &chain, 1 << 22).unwrap();
        // strictly increasing cut points and per-segment masses above k
        for w in out.cut_points.windows(2) {
            assert!(w[0] < w[1]);
        }
        for s in &out.segments {
            let lo = s.mass_lower.to_rational().unwrap();
            assert!(
                lo > num_rational::BigRational::from(num_bigint::BigInt::from(
                    s.threshold as i64
                )),
                "segment {} mass must exceed its threshold",
                s.threshold
            );
        }
        assert!(verify_pseudointersection(&out.certificate, &chain, 10_000).is_proved());
    }

    #[test]
    fn segment_construction_rejects_non_members() {
        // the evens are not a member under halving-type finite total mass —
        // use a non-member under unit weights instead: a finite set
        let err = segment_pseudointersection(
            WeightRule::Unit,
            &[SetDescription::finite([1, 2, 3])],
            1 << 16,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn product_chain_blocks_the_bottom_row() {
        let w = product_chain_witness();
        // D = {(n, 0)}: one point per row
        let d = SetDescription::pairs(RowScheme::Table {
            rows: Default::default(),
            default: RowSpec::Finite {
                cols: [0].into_iter().collect(),
            },
        });
        match w.refute(&d, 6).unwrap() {
            CandidateOutcome::Blocked(b) => {
                assert_eq!(b.default_cutoff, 1);
                assert!(b.blocking.member(pair(3, 1)));
                assert!(!b.blocking.member(pair(3, 0)));
                assert!(w.check_blocking(&d, &b, 4_000));
            }
            other => panic!("expected a blocking set, got {other:?}"),
        }
    }

    #[test]
    fn product_chain_rejects_the_wedge_at_depth_one() {
        let w = product_chain_witness();
        let wedge = SetDescription::pairs(RowScheme::UpperDiagonal);
        match w.refute(&wedge, 6).unwrap() {
            CandidateOutcome::FailsChain { k } => assert_eq!(k, 1),
            other => panic!("expected chain failure, got {other:?}"),
        }
    }

    #[test]
    fn product_chain_rejects_finite_candidates() {
        let w = product_chain_witness();
        let d = SetDescription::pairs(RowScheme::Table {
            rows: [(0, RowSpec::Finite {
                cols: [0, 1].into_iter().collect(),
            })]
            .into_iter()
            .collect(),
            default: RowSpec::Empty,
        });
        assert!(matches!(
            w.refute(&d, 4).unwrap(),
            CandidateOutcome::Finite
        ));
    }
}
