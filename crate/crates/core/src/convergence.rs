//! Filter spaces over ω∪{∞}, convergent-sequence construction, and
//! subsequence extraction.
//!
//! The spaces here have one non-isolated point ∞ whose neighborhoods are
//! F∪{∞} for F in a presented filter.  The module builds injective
//! sequences converging to ∞ along block-meager filters, checks
//! filter-convergence of presented sequences, extracts classically
//! convergent subsequences when the meagerness witness rides on blocks of
//! bounded size, and refutes finite families claimed to be networks at ∞
//! in the block-density space.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::analysis::{cardinality, difference_finite, is_empty};
use crate::error::{Error, Result};
use crate::filters::{
    Filter, FilterPresentation, MeagernessWitness, MembershipCert, MembershipRefutation,
};
use crate::partition::BlockPartition;
use crate::pseudo::{
    bounded_block_pseudointersection, BoundedBlockInstance, BoundedBlockOutput,
};
use crate::sets::{SetDescription, Universe};
use crate::verdict::Verdict;
use crate::Nat;

/// How many hit samples each certificate stores explicitly.
const SAMPLE_WIDTH: usize = 24;

// ---------------------------------------------------------------------------
// spaces
// ---------------------------------------------------------------------------

/// The space ω∪{∞}: every natural is isolated, and the neighborhoods of ∞
/// are F∪{∞} for F in the presented filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterSpace {
    filter: Filter,
}

impl FilterSpace {
    /// The presented filter must live over the naturals (its members are
    /// the ∞-neighborhood traces on ω).  Construction of the filter itself
    /// already guarantees properness, and every presentation in the
    /// library refines the cofinite filter, so the space is free and each
    /// basic neighborhood is infinite.
    pub fn new(presentation: FilterPresentation) -> Result<FilterSpace> {
        let filter = Filter::new(presentation)?;
        if filter.universe() != Universe::Naturals {
            return Err(Error::UniverseMismatch(
                "the neighborhood filter of a point space must live over the naturals"
                    .into(),
            ));
        }
        Ok(FilterSpace { filter })
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    /// The ω-part of the `j`-th canonical basic neighborhood of ∞.
    pub fn basic(&self, j: Nat) -> Result<SetDescription> {
        self.filter.generator(j)
    }
}

// ---------------------------------------------------------------------------
// sequences
// ---------------------------------------------------------------------------

/// An ω-indexed sequence of isolated points, finitely presented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "seq", rename_all = "snake_case")]
pub enum SequencePresentation {
    /// `x_k = k`.
    Identity,
    /// `x_k = value` for every `k`.
    Constant { value: Nat },
    /// An explicitly materialized prefix; the indices beyond it follow the
    /// construction that produced the prefix, and index sets of
    /// neighborhoods are reported with a declared full tail past the
    /// prefix.
    Materialized { values: Vec<Nat> },
}

impl SequencePresentation {
    /// The value at index `k`, when the presentation determines it.
    pub fn value(&self, k: Nat) -> Option<Nat> {
        match self {
            SequencePresentation::Identity => Some(k),
            SequencePresentation::Constant { value } => Some(*value),
            SequencePresentation::Materialized { values } => {
                values.get(k as usize).copied()
            }
        }
    }

    /// `{k : x_k ∈ target}` as a set description.  Exact for the identity
    /// and constant forms; for a materialized prefix the set is computed
    /// below the prefix length and declared full beyond it.
    pub fn index_set(&self, target: &SetDescription) -> SetDescription {
        match self {
            SequencePresentation::Identity => target.clone(),
            SequencePresentation::Constant { value } => {
                if target.member(*value) {
                    SetDescription::everything()
                } else {
                    SetDescription::empty()
                }
            }
            SequencePresentation::Materialized { values } => SetDescription::Truncated {
                members: values
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| target.member(x))
                    .map(|(k, _)| k as Nat)
                    .collect(),
                cutoff: values.len() as Nat,
                tail_full: true,
            },
        }
    }

    /// Is the sequence injective?  `Ok` carries nothing; `Err` carries a
    /// colliding index pair.
    pub fn injectivity(&self) -> std::result::Result<(), (Nat, Nat)> {
        match self {
            SequencePresentation::Identity => Ok(()),
            SequencePresentation::Constant { .. } => Err((0, 1)),
            SequencePresentation::Materialized { values } => {
                let mut seen: std::collections::BTreeMap<Nat, Nat> =
                    std::collections::BTreeMap::new();
                for (k, &x) in values.iter().enumerate() {
                    if let Some(&first) = seen.get(&x) {
                        return Err((first, k as Nat));
                    }
                    seen.insert(x, k as Nat);
                }
                Ok(())
            }
        }
    }
}

impl std::fmt::Display for SequencePresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequencePresentation::Identity => write!(f, "identity"),
            SequencePresentation::Constant { value } => write!(f, "const:{value}"),
            SequencePresentation::Materialized { values } => {
                write!(f, "materialized[len={}]", values.len())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// networks of infinite sets
// ---------------------------------------------------------------------------

/// Which network set sits inside which basic neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCover {
    pub neighborhood: Nat,
    pub network: usize,
}

/// A finite family of infinite sets declared as a network at ∞: each of
/// the first `covers.len()` canonical basic neighborhoods contains one of
/// the sets outright.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFamily {
    space: FilterSpace,
    sets: Vec<SetDescription>,
    covers: Vec<NetworkCover>,
}

impl NetworkFamily {
    /// Validate the family: every set infinite over the naturals, and for
    /// each basic neighborhood index `j < covered_neighborhoods` some set
    /// contained in it (a finite slice of the network property — a finite
    /// family can never cover the whole shrinking neighborhood chain).
    pub fn new(
        space: FilterSpace,
        sets: Vec<SetDescription>,
        covered_neighborhoods: Nat,
    ) -> Result<NetworkFamily> {
        if sets.is_empty() {
            return Err(Error::InvalidInstance(
                "a network needs at least one set".into(),
            ));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.universe()? != Universe::Naturals {
                return Err(Error::UniverseMismatch(format!(
                    "network set {i} must be a set of naturals"
                )));
            }
            match cardinality(s).is_infinite() {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::InvalidInstance(format!(
                        "network set {i} is finite"
                    )))
                }
                None => {
                    return Err(Error::Precondition(format!(
                        "cannot certify network set {i} infinite"
                    )))
                }
            }
        }
        let mut covers = Vec::new();
        for j in 0..covered_neighborhoods {
            let basic = space.basic(j)?;
            let found = sets.iter().enumerate().find(|(_, n)| {
                is_empty(&SetDescription::and(vec![
                    (*n).clone(),
                    SetDescription::not(basic.clone()),
                ])) == Some(true)
            });
            match found {
                Some((i, _)) => covers.push(NetworkCover {
                    neighborhood: j,
                    network: i,
                }),
                None => {
                    return Err(Error::InvalidInstance(format!(
                        "no network set fits inside basic neighborhood {j}"
                    )))
                }
            }
        }
        Ok(NetworkFamily {
            space,
            sets,
            covers,
        })
    }

    pub fn space(&self) -> &FilterSpace {
        &self.space
    }

    pub fn sets(&self) -> &[SetDescription] {
        &self.sets
    }

    pub fn covers(&self) -> &[NetworkCover] {
        &self.covers
    }
}

// ---------------------------------------------------------------------------
// the block-slot construction
// ---------------------------------------------------------------------------

/// Hitting record for one network set: every materialized block with more
/// positions than the set's index contains a chosen point of the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHitting {
    pub network: usize,
    /// Number of materialized blocks carrying the obligation (size > index).
    pub blocks_checked: Nat,
    /// The first few (block, chosen point) hits.
    pub samples: Vec<(Nat, Nat)>,
}

/// Why a convergence check came out negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceFailure {
    /// Index of the offending basic neighborhood.
    pub neighborhood: Nat,
    /// The filter's refutation for that neighborhood's index set, when the
    /// verdict was refuted rather than undecided.
    pub refutation: Option<MembershipRefutation>,
}

/// Everything the block-slot construction certifies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub sequence: SequencePresentation,
    /// Length of the materialized prefix (sum of the materialized blocks).
    pub materialized: Nat,
    pub partition: BlockPartition,
    /// Injectivity, re-verified over the materialized prefix; the
    /// least-unused selection rule guarantees it beyond.
    pub injective: bool,
    /// The induced convergence filter: generated by the index sets of the
    /// covered basic neighborhoods, materialized below the prefix length.
    pub induced: Filter,
    pub hitting: Vec<BlockHitting>,
    /// Convergence of the sequence to ∞ along the induced filter.
    pub convergence: Verdict<Vec<MembershipCert>, ConvergenceFailure>,
}

/// Build an injective sequence hitting every network set inside every
/// sufficiently long block: block `m` devotes its `i`-th position to the
/// least unused element of set `i` (for `i` below the family size) and
/// fills the remaining positions with the least unused naturals.
///
/// The partition's sizes must grow without bound — then every set gets hit
/// in all but finitely many blocks, which makes the induced filter meager
/// with respect to the block structure.
pub fn meager_convergent_sequence(
    net: &NetworkFamily,
    partition: &BlockPartition,
    horizon: Nat,
) -> Result<ConvergenceReport> {
    if !partition.sizes_unbounded() {
        return Err(Error::Precondition(
            "block sizes must grow without bound; bounded sizes leave late \
             networks unhit"
                .into(),
        ));
    }
    let cap = horizon.saturating_mul(4).saturating_add(1024);
    let mut used: BTreeSet<Nat> = BTreeSet::new();
    let mut cursors: Vec<Nat> = vec![0; net.sets.len()];
    let mut fresh: Nat = 0;
    let mut values: Vec<Nat> = Vec::new();
    let mut hits: Vec<Vec<(Nat, Nat)>> = vec![Vec::new(); net.sets.len()];

    let mut m = 0;
    while partition.end(m) <= horizon {
        let size = partition.size(m);
        for slot in 0..size {
            let x = if (slot as usize) < net.sets.len() {
                let i = slot as usize;
                let n = &net.sets[i];
                let mut x = cursors[i];
                while x < cap && (used.contains(&x) || !n.member(x)) {
                    x += 1;
                }
                if x >= cap {
                    return Err(Error::Exhausted {
                        what: format!(
                            "network set {i} has no unused member in reach; \
                             stuck at block {m}"
                        ),
                        horizon: cap,
                    });
                }
                cursors[i] = x + 1;
                hits[i].push((m, x));
                x
            } else {
                let mut x = fresh;
                while used.contains(&x) {
                    x += 1;
                }
                fresh = x + 1;
                x
            };
            used.insert(x);
            values.push(x);
        }
        m += 1;
    }
    let materialized = values.len() as Nat;
    let sequence = SequencePresentation::Materialized { values };
    let injective = sequence.injectivity().is_ok();

    let hitting = hits
        .into_iter()
        .enumerate()
        .map(|(i, h)| BlockHitting {
            network: i,
            blocks_checked: h.len() as Nat,
            samples: h.into_iter().take(SAMPLE_WIDTH).collect(),
        })
        .collect();

    // the induced filter: index sets of the covered basic neighborhoods
    let budget = (net.covers.len() as Nat).max(1);
    let mut base = Vec::new();
    for j in 0..budget {
        base.push(sequence.index_set(&net.space.basic(j)?));
    }
    let induced = Filter::new(FilterPresentation::Generated { base })?;
    let convergence = converges_to_infinity(&sequence, &induced, &net.space, budget)?;

    Ok(ConvergenceReport {
        sequence,
        materialized,
        partition: partition.clone(),
        injective,
        induced,
        hitting,
        convergence,
    })
}

// ---------------------------------------------------------------------------
// convergence checking
// ---------------------------------------------------------------------------

/// Does the sequence converge to ∞ along the filter, in the given space?
/// Checks, for each of the first `generator_budget` basic neighborhoods,
/// that the neighborhood's index set belongs to the filter.
pub fn converges_to_infinity(
    seq: &SequencePresentation,
    filter: &Filter,
    space: &FilterSpace,
    generator_budget: Nat,
) -> Result<Verdict<Vec<MembershipCert>, ConvergenceFailure>> {
    let mut certs = Vec::new();
    for j in 0..generator_budget.max(1) {
        let indices = seq.index_set(&space.basic(j)?);
        match filter.member(&indices)? {
            Verdict::Proved { certificate } => certs.push(certificate),
            Verdict::Refuted { certificate } => {
                return Ok(Verdict::refuted(ConvergenceFailure {
                    neighborhood: j,
                    refutation: Some(certificate),
                }))
            }
            Verdict::Unknown { horizon } => {
                let _ = horizon;
                return Ok(Verdict::unknown(j));
            }
        }
    }
    Ok(Verdict::proved(certs))
}

// ---------------------------------------------------------------------------
// subsequence extraction
// ---------------------------------------------------------------------------

/// Almost-containment data of the subsequence indices in one neighborhood's
/// index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCheck {
    pub neighborhood: Nat,
    /// All escapes lie below this bound.
    pub escape_bound: Nat,
    /// The subsequence indices outside the neighborhood's index set.
    pub escapes: Vec<Nat>,
}

/// A classically convergent subsequence extracted through the bounded-block
/// recursion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsequenceReport {
    /// The witness partition whose bounded tail made the extraction work.
    pub index_partition: BlockPartition,
    /// Size bound of the recursion instance.
    pub instance_bound: Nat,
    /// The recursion output; its certificate's set is the index set of the
    /// subsequence.
    pub extraction: BoundedBlockOutput,
    /// First indices of the subsequence.
    pub indices_prefix: Vec<Nat>,
    /// Sequence values at those indices, where the presentation
    /// determines them.
    pub values_prefix: Vec<Nat>,
    /// Per-neighborhood almost-containment: classical convergence,
    /// restated finitely.
    pub neighborhoods: Vec<NeighborhoodCheck>,
}

/// Extract a subsequence converging to ∞ in the ordinary sense from a
/// sequence converging along a filter whose meagerness witness rides on
/// intervals of bounded size.
///
/// The witness partition's tail blocks all have the same size; those
/// blocks, the filter's generator chain, and the bounded-block recursion
/// produce an infinite index set almost inside every checked
/// neighborhood's index set.  Partitions with unbounded sizes are refused:
/// there the extraction genuinely fails, so the bound is sharp.
pub fn convergent_subsequence(
    seq: &SequencePresentation,
    filter: &Filter,
    generator_budget: Nat,
    horizon: Nat,
) -> Result<SubsequenceReport> {
    let witness: MeagernessWitness = match filter.meagerness_witness(horizon) {
        Verdict::Proved { certificate } => certificate,
        _ => {
            return Err(Error::Precondition(
                "the filter did not produce a meagerness witness".into(),
            ))
        }
    };
    let partition = witness.intervals;
    if partition.bounded_tail().is_none() {
        return Err(Error::Precondition(
            "the witness intervals grow without bound, so no infinite family of \
             bounded blocks is available and the subsequence extraction does \
             not apply"
                .into(),
        ));
    }
    let budget = generator_budget.max(1);
    // the generator chain decreases, so almost-containment in the deepest
    // checked generator gives almost-containment in all of them
    let deepest = filter.generator(budget - 1)?;
    let instance = BoundedBlockInstance::new(
        partition.clone(),
        SetDescription::tail_from(partition.tail_start()),
        SetDescription::everything(),
        vec![deepest],
    )?;
    let instance_bound = instance.bound();
    let extraction = bounded_block_pseudointersection(&instance)?;
    let d = &extraction.certificate.set;

    let indices_prefix: Vec<Nat> = d.members_below(0, horizon).into_iter().take(64).collect();
    let values_prefix: Vec<Nat> = indices_prefix
        .iter()
        .filter_map(|&k| seq.value(k))
        .collect();

    let mut neighborhoods = Vec::new();
    for j in 0..budget {
        let indices = seq.index_set(&filter.generator(j)?);
        match difference_finite(d, &indices) {
            Verdict::Proved { certificate: bound } => {
                let escapes = SetDescription::and(vec![
                    d.clone(),
                    SetDescription::not(indices),
                ])
                .members_below(0, bound);
                neighborhoods.push(NeighborhoodCheck {
                    neighborhood: j,
                    escape_bound: bound,
                    escapes,
                });
            }
            Verdict::Refuted { .. } => {
                return Err(Error::Precondition(format!(
                    "extracted indices escape neighborhood {j} infinitely often"
                )))
            }
            Verdict::Unknown { .. } => {
                return Err(Error::Precondition(format!(
                    "cannot certify almost-containment in neighborhood {j}"
                )))
            }
        }
    }

    Ok(SubsequenceReport {
        index_partition: partition,
        instance_bound,
        extraction,
        indices_prefix,
        values_prefix,
        neighborhoods,
    })
}

// ---------------------------------------------------------------------------
// the diagonal refuter for the density space
// ---------------------------------------------------------------------------

/// One candidate's exclusion: a point of the candidate outside the
/// constructed neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateExclusion {
    pub candidate: usize,
    pub block: Nat,
    pub point: Nat,
}

/// Output of the diagonal refutation: a member of the block-density filter
/// missing a point of every candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkRefutation {
    /// Whole blocks with at most one point removed per block.
    pub family: SetDescription,
    pub partition: BlockPartition,
    pub exclusions: Vec<CandidateExclusion>,
    /// Membership of the family in the block-density filter: at most one
    /// removal per block keeps every per-block density at least
    /// (size−1)/size → 1.
    pub membership: MembershipCert,
}

/// No finite family of infinite sets is a network at ∞ in the density
/// space: schedule one removed point per candidate, in pairwise distinct
/// blocks, candidate `i` handled in a block of index ≥ `i`.  The removals
/// leave a neighborhood of ∞ (densities (size−1)/size → 1) containing no
/// candidate.
pub fn refute_finite_network(
    candidates: &[SetDescription],
    horizon: Nat,
) -> Result<NetworkRefutation> {
    let partition = BlockPartition::dyadic();
    for (i, c) in candidates.iter().enumerate() {
        if c.universe()? != Universe::Naturals {
            return Err(Error::UniverseMismatch(format!(
                "candidate {i} must be a set of naturals"
            )));
        }
        match cardinality(c).is_infinite() {
            Some(true) => {}
            Some(false) => {
                return Err(Error::InvalidInstance(format!(
                    "candidate {i} is finite, so it is no network set"
                )))
            }
            None => {
                return Err(Error::Precondition(format!(
                    "cannot certify candidate {i} infinite"
                )))
            }
        }
    }

    let mut used_blocks: BTreeSet<Nat> = BTreeSet::new();
    let mut removed: BTreeSet<Nat> = BTreeSet::new();
    let mut exclusions = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let mut m = i as Nat;
        let chosen = loop {
            if partition.start(m) >= horizon {
                return Err(Error::Exhausted {
                    what: format!(
                        "candidate {i} has no point in any unused block below \
                         the horizon"
                    ),
                    horizon,
                });
            }
            if !used_blocks.contains(&m) {
                let members = c.members_below(partition.start(m), partition.end(m));
                if let Some(&p) = members.first() {
                    break (m, p);
                }
            }
            m += 1;
        };
        used_blocks.insert(chosen.0);
        removed.insert(chosen.1);
        exclusions.push(CandidateExclusion {
            candidate: i,
            block: chosen.0,
            point: chosen.1,
        });
    }

    let family = SetDescription::blocks(
        partition.clone(),
        crate::sets::BlockSelector::MarkedRemoved { removed },
    );
    let filter = Filter::new(FilterPresentation::BlockDensity {
        partition: partition.clone(),
    })?;
    let membership = match filter.member(&family)? {
        Verdict::Proved { certificate } => certificate,
        other => {
            return Err(Error::Precondition(format!(
                "the marked family fails its own density membership: {other:?}"
            )))
        }
    };
    for e in &exclusions {
        debug_assert!(candidates[e.candidate].member(e.point));
        debug_assert!(!family.member(e.point));
    }
    Ok(NetworkRefutation {
        family,
        partition,
        exclusions,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofinite_space() -> FilterSpace {
        FilterSpace::new(FilterPresentation::Cofinite).unwrap()
    }

    #[test]
    fn space_requires_natural_universe() {
        let err = FilterSpace::new(FilterPresentation::PairProduct).unwrap_err();
        assert!(matches!(err, Error::UniverseMismatch(_)));
    }

    #[test]
    fn tail_networks_in_the_cofinite_space_give_the_identity() {
        let sets: Vec<SetDescription> = (0..3).map(SetDescription::tail_from).collect();
        let net = NetworkFamily::new(cofinite_space(), sets, 3).unwrap();
        assert_eq!(
            net.covers(),
            &[
                NetworkCover { neighborhood: 0, network: 0 },
                NetworkCover { neighborhood: 1, network: 1 },
                NetworkCover { neighborhood: 2, network: 2 },
            ]
        );
        let report =
            meager_convergent_sequence(&net, &BlockPartition::linear(1), 200).unwrap();
        // the greedy rule reproduces the identity here: block m devotes its
        // slots to the least unused elements of [0,∞), [1,∞), [2,∞) and
        // fresh naturals, all of which coincide with "next natural"
        for k in 0..report.materialized.min(40) {
            assert_eq!(report.sequence.value(k), Some(k));
        }
        assert!(report.injective);
        assert!(report.convergence.is_proved());
        // every block with more than i positions hits network i
        let total_blocks = {
            let mut m = 0;
            while BlockPartition::linear(1).end(m) <= 200 {
                m += 1;
            }
            m
        };
        for h in &report.hitting {
            assert_eq!(h.blocks_checked, total_blocks - h.network as Nat);
            for &(block, point) in &h.samples {
                assert!(net.sets()[h.network].member(point));
                assert!(BlockPartition::linear(1).size(block) > h.network as Nat);
            }
        }
    }

    #[test]
    fn single_even_network_fills_with_fresh_points() {
        let net =
            NetworkFamily::new(cofinite_space(), vec![SetDescription::evens()], 1).unwrap();
        let report =
            meager_convergent_sequence(&net, &BlockPartition::linear(1), 120).unwrap();
        let expect = vec![0, 2, 1, 4, 3, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];
        let got: Vec<Nat> = (0..15).map(|k| report.sequence.value(k).unwrap()).collect();
        assert_eq!(got, expect);
        assert!(report.injective);
        assert!(report.convergence.is_proved());
        // every block's first slot carries an even value
        for &(_, point) in &report.hitting[0].samples {
            assert_eq!(point % 2, 0);
        }
    }

    #[test]
    fn bounded_sizes_are_refused() {
        let net =
            NetworkFamily::new(cofinite_space(), vec![SetDescription::evens()], 1).unwrap();
        let err = meager_convergent_sequence(&net, &BlockPartition::constant(2), 100)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn identity_converges_in_the_density_space() {
        let space = FilterSpace::new(FilterPresentation::BlockDensity {
            partition: BlockPartition::dyadic(),
        })
        .unwrap();
        let v = converges_to_infinity(
            &SequencePresentation::Identity,
            space.filter(),
            &space,
            6,
        )
        .unwrap();
        assert!(v.is_proved());
    }

    #[test]
    fn constant_sequences_fail_once_neighborhoods_shrink_past_them() {
        let space = cofinite_space();
        let v = converges_to_infinity(
            &SequencePresentation::Constant { value: 5 },
            space.filter(),
            &space,
            8,
        )
        .unwrap();
        match v {
            Verdict::Refuted { certificate } => assert_eq!(certificate.neighborhood, 6),
            other => panic!("expected refuted, got {other:?}"),
        }
    }

    #[test]
    fn subsequence_through_even_generated_filter_lands_in_the_evens() {
        let filter = Filter::new(FilterPresentation::Generated {
            base: vec![SetDescription::evens()],
        })
        .unwrap();
        let report = convergent_subsequence(
            &SequencePresentation::Identity,
            &filter,
            6,
            10_000,
        )
        .unwrap();
        assert!(report.instance_bound >= 1);
        assert!(!report.indices_prefix.is_empty());
        for &k in &report.indices_prefix {
            assert_eq!(k % 2, 0, "extracted index {k} is not even");
        }
        for check in &report.neighborhoods {
            for &e in &check.escapes {
                assert!(e < check.escape_bound);
            }
        }
    }

    #[test]
    fn frechet_subsequence_is_cofinal() {
        let filter = Filter::new(FilterPresentation::Cofinite).unwrap();
        let report = convergent_subsequence(
            &SequencePresentation::Identity,
            &filter,
            5,
            10_000,
        )
        .unwrap();
        assert_eq!(report.extraction.depth(), 0);
        // indices form a tail: consecutive from the first one
        let p = &report.indices_prefix;
        for w in p.windows(2) {
            assert_eq!(w[1], w[0] + 1);
        }
        // the extracted indices are all of ω here, so the escapes against
        // the j-th tail neighborhood are exactly the indices below j
        for c in &report.neighborhoods {
            let expect: Vec<Nat> = (0..c.neighborhood).collect();
            assert_eq!(c.escapes, expect);
        }
    }

    #[test]
    fn unbounded_witness_intervals_are_refused() {
        let filter = Filter::new(FilterPresentation::BlockDensity {
            partition: BlockPartition::dyadic(),
        })
        .unwrap();
        let err = convergent_subsequence(
            &SequencePresentation::Identity,
            &filter,
            4,
            10_000,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn diagonal_refutes_evens_and_odds() {
        let out =
            refute_finite_network(&[SetDescription::evens(), SetDescription::odds()], 10_000)
                .unwrap();
        assert_eq!(out.exclusions.len(), 2);
        assert_eq!(out.exclusions[0].point, 0);
        assert_eq!(out.exclusions[1].point, 1);
        assert!(out.exclusions[0].block < out.exclusions[1].block);
        for e in &out.exclusions {
            assert!(e.block >= e.candidate as Nat);
            assert!(!out.family.member(e.point));
        }
    }

    #[test]
    fn diagonal_with_no_candidates_removes_nothing() {
        let out = refute_finite_network(&[], 1_000).unwrap();
        assert!(out.exclusions.is_empty());
        for x in 0..64 {
            assert!(out.family.member(x));
        }
    }

    #[test]
    fn diagonal_removes_one_point_from_everything() {
        let out = refute_finite_network(&[SetDescription::everything()], 1_000).unwrap();
        assert_eq!(out.exclusions.len(), 1);
        assert_eq!(out.exclusions[0].point, 0);
        assert!(!out.family.member(0));
        for x in 1..64 {
            assert!(out.family.member(x));
        }
    }

    #[test]
    fn diagonal_rejects_finite_candidates() {
        let err = refute_finite_network(&[SetDescription::finite([3, 7])], 1_000)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }
}
