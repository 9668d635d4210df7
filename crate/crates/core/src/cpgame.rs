//! Game engine for the function space `C_p(X, 2)` over a convergent-sequence
//! space `X = {x_k : k ∈ ω} ∪ {∞}`.
//!
//! The space of continuous 0–1 valued functions on `X` decomposes into the
//! increasing union of the sets `𝒞_n` of functions that agree with their
//! limit value somewhere in every index block from `n` on.  Each `𝒞_n` is
//! nowhere dense: inside any basic open set the engine finds a smaller basic
//! open set disjoint from `𝒞_n`, by flipping one whole untouched block to
//! the opposite of the limit value.  Playing the engine against an adversary
//! for `R` rounds produces a single continuous function outside
//! `𝒞_0 ∪ … ∪ 𝒞_{R−1}`, certifying that no finite stage exhausts the space.
//!
//! All bookkeeping lives on the index side: a constraint on coordinate `x_k`
//! is stored under the index `k`, which is faithful because the sequence is
//! required to be injective.  The limit point `∞` is carried separately.
//! Continuity at `∞` is expressed in normal form: a witness takes its limit
//! value on a certified filter member (minus finitely many exceptions) and
//! the opposite value elsewhere, so every verdict reduces to set algebra
//! that the analysis layer can decide with certificates.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{cardinality, hits_blocks_cofinally, Card, MissCert};
use crate::convergence::{FilterSpace, SequencePresentation};
use crate::error::{Error, Result};
use crate::filters::{FilterPresentation, MembershipCert};
use crate::partition::BlockPartition;
use crate::sets::SetDescription;
use crate::verdict::Verdict;
use crate::Nat;

/// How many hit samples a certificate keeps for display.
const SAMPLE_WIDTH: usize = 24;

/// How many fresh constraints a seeded adversary may add per round.
const SEEDED_EXTRAS: u64 = 3;

// ---------------------------------------------------------------------------
// basic open sets
// ---------------------------------------------------------------------------

/// A basic open set of `C_p(X, 2)`: finitely many coordinates pinned to bits.
///
/// `constraints` pins the coordinate at sequence index `k` to a bit;
/// `at_infinity` pins the value at the limit point.  The set is nonempty for
/// every assignment (witness: the function constantly equal to the limit bit
/// off the constrained coordinates), so no separate consistency check is
/// needed beyond one bit per coordinate, which the map enforces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicOpenSet {
    pub at_infinity: Option<u8>,
    pub constraints: BTreeMap<Nat, u8>,
}

impl BasicOpenSet {
    pub fn new(at_infinity: Option<u8>, constraints: BTreeMap<Nat, u8>) -> Result<BasicOpenSet> {
        if let Some(b) = at_infinity {
            if b > 1 {
                return Err(Error::InvalidInstance(format!(
                    "limit value must be a bit, got {b}"
                )));
            }
        }
        for (&k, &b) in &constraints {
            if b > 1 {
                return Err(Error::InvalidInstance(format!(
                    "constraint at index {k} must be a bit, got {b}"
                )));
            }
        }
        Ok(BasicOpenSet {
            at_infinity,
            constraints,
        })
    }

    /// Does every function admitted by `self` also satisfy `coarser`?
    /// Reports the first violated constraint on failure.
    pub fn refines(&self, coarser: &BasicOpenSet) -> std::result::Result<(), String> {
        if let Some(b) = coarser.at_infinity {
            match self.at_infinity {
                Some(c) if c == b => {}
                Some(c) => {
                    return Err(format!(
                        "limit constraint changed from {b} to {c}"
                    ))
                }
                None => return Err(format!("limit constraint ↦{b} was dropped")),
            }
        }
        for (&k, &b) in &coarser.constraints {
            match self.constraints.get(&k) {
                Some(&c) if c == b => {}
                Some(&c) => {
                    return Err(format!(
                        "constraint at index {k} changed from {b} to {c}"
                    ))
                }
                None => return Err(format!("constraint {k}↦{b} was dropped")),
            }
        }
        Ok(())
    }

    /// Does the witness satisfy every pinned coordinate?
    pub fn admits(&self, f: &ContinuousWitness) -> bool {
        if let Some(b) = self.at_infinity {
            if f.limit_value != b {
                return false;
            }
        }
        self.constraints.iter().all(|(&k, &b)| f.value_at(k) == b)
    }

    /// The constrained sequence indices, in order.
    pub fn domain(&self) -> Vec<Nat> {
        self.constraints.keys().copied().collect()
    }

    /// A continuous function inside this basic open set: the limit bit
    /// everywhere except the finitely many pinned coordinates.
    pub fn witness_inside(&self, space: &FilterSpace) -> Result<ContinuousWitness> {
        let v = self.at_infinity.unwrap_or(0);
        ContinuousWitness::new(
            v,
            self.constraints.clone(),
            SetDescription::cofinite(self.domain()),
            space,
        )
    }
}

impl std::fmt::Display for BasicOpenSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        if let Some(b) = self.at_infinity {
            write!(f, "∞↦{b}")?;
            first = false;
        }
        for (k, b) in &self.constraints {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{k}↦{b}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// continuous witnesses
// ---------------------------------------------------------------------------

/// A continuous 0–1 valued function on `X` in tail normal form.
///
/// The function takes `limit_value` at `∞`, the explicitly listed bits on
/// the finitely many exceptional indices, `limit_value` on the rest of the
/// certified `tail`, and the opposite bit elsewhere.  Continuity at `∞` is
/// exactly the requirement that the agreement index set belongs to the
/// space's filter, which construction checks and certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousWitness {
    pub limit_value: u8,
    pub exceptional: BTreeMap<Nat, u8>,
    pub tail: SetDescription,
    /// Certificate that the agreement index set belongs to the filter.
    pub continuity: MembershipCert,
}

impl ContinuousWitness {
    pub fn new(
        limit_value: u8,
        exceptional: BTreeMap<Nat, u8>,
        tail: SetDescription,
        space: &FilterSpace,
    ) -> Result<ContinuousWitness> {
        if limit_value > 1 {
            return Err(Error::InvalidInstance(format!(
                "limit value must be a bit, got {limit_value}"
            )));
        }
        for (&k, &b) in &exceptional {
            if b > 1 {
                return Err(Error::InvalidInstance(format!(
                    "exceptional value at index {k} must be a bit, got {b}"
                )));
            }
        }
        let agreement = agreement_set(limit_value, &exceptional, &tail);
        let continuity = match space.filter().member(&agreement)? {
            Verdict::Proved { certificate } => certificate,
            Verdict::Refuted { .. } => {
                return Err(Error::Precondition(
                    "the agreement index set falls outside the filter, so the \
                     function is not continuous at the limit point"
                        .into(),
                ))
            }
            Verdict::Unknown { horizon } => {
                return Err(Error::Exhausted {
                    what: "filter membership of the agreement index set".into(),
                    horizon,
                })
            }
        };
        Ok(ContinuousWitness {
            limit_value,
            exceptional,
            tail,
            continuity,
        })
    }

    /// The bit the function takes at sequence index `k`.
    pub fn value_at(&self, k: Nat) -> u8 {
        if let Some(&b) = self.exceptional.get(&k) {
            return b;
        }
        if self.tail.member(k) {
            self.limit_value
        } else {
            1 - self.limit_value
        }
    }

    /// The index set where the function agrees with its limit value.
    pub fn agreement_indices(&self) -> SetDescription {
        agreement_set(self.limit_value, &self.exceptional, &self.tail)
    }

    /// Re-check the stored continuity certificate against the space.
    pub fn recertify(&self, space: &FilterSpace) -> Result<bool> {
        let fresh = space.filter().member(&self.agreement_indices())?;
        Ok(matches!(fresh, Verdict::Proved { .. }))
    }
}

fn agreement_set(
    limit_value: u8,
    exceptional: &BTreeMap<Nat, u8>,
    tail: &SetDescription,
) -> SetDescription {
    if exceptional.is_empty() {
        return tail.clone();
    }
    let dom: Vec<Nat> = exceptional.keys().copied().collect();
    let agreeing: Vec<Nat> = exceptional
        .iter()
        .filter(|&(_, &b)| b == limit_value)
        .map(|(&k, _)| k)
        .collect();
    SetDescription::or(vec![
        SetDescription::and(vec![
            tail.clone(),
            SetDescription::not(SetDescription::finite(dom)),
        ]),
        SetDescription::finite(agreeing),
    ])
}

// ---------------------------------------------------------------------------
// membership in the decomposition pieces
// ---------------------------------------------------------------------------

/// Certificate that every index block from `level` on contains an index
/// where the function agrees with its limit value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCert {
    pub level: Nat,
    /// Every block from here on is hit, by the cofinal-hitting analysis.
    pub cofinal_from: Nat,
    /// One agreeing index per block, for the first few blocks at the level.
    pub samples: Vec<(Nat, Nat)>,
}

/// Refutation: a whole index block at or past the level carries no index
/// agreeing with the limit value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementFailure {
    pub empty_block: Nat,
    /// Closed-form reason the blocks keep missing, when the analysis found
    /// one (absent when the empty block was found by direct scan).
    pub miss: Option<MissCert>,
}

/// Does the function agree with its limit value somewhere in every index
/// block from `level` on?
///
/// `Proved` means the function lies in the piece at this level; `Refuted`
/// exhibits an empty block at or past the level; `Unknown` reports that the
/// agreement set escapes the closed-form analysis within the scan bound.
pub fn late_block_agreement(
    f: &ContinuousWitness,
    level: Nat,
    partition: &BlockPartition,
    horizon: Nat,
) -> Verdict<AgreementCert, AgreementFailure> {
    let agreement = f.agreement_indices();
    match hits_blocks_cofinally(&agreement, partition) {
        Verdict::Proved {
            certificate: cofinal_from,
        } => {
            // every block >= cofinal_from is hit; scan the gap directly
            for m in level..cofinal_from.max(level) {
                if agreement.count_in_block(partition, m) == 0 {
                    return Verdict::refuted(AgreementFailure {
                        empty_block: m,
                        miss: None,
                    });
                }
            }
            let mut samples = Vec::new();
            let mut m = level;
            while samples.len() < SAMPLE_WIDTH && partition.start(m) < partition.start(level) + 4 * horizon.max(1) {
                let lo = partition.start(m);
                let hi = partition.end(m);
                if let Some(&k) = agreement.members_below(lo, hi).first() {
                    samples.push((m, k));
                } else if m >= cofinal_from {
                    // contradicts the analysis certificate; fail loudly
                    return Verdict::refuted(AgreementFailure {
                        empty_block: m,
                        miss: None,
                    });
                }
                m += 1;
            }
            Verdict::proved(AgreementCert {
                level,
                cofinal_from: cofinal_from.max(level),
                samples,
            })
        }
        Verdict::Refuted { certificate: miss } => {
            // the analysis names blocks that miss; surface the first one at
            // or past the level, re-checked by direct scan
            let bound = match &miss {
                MissCert::AllTailBlocksMiss { from_block } => level.max(*from_block) + 1,
                MissCert::PeriodicBlocksMiss {
                    from_block, period, ..
                } => level.max(*from_block) + period.max(&1) + 1,
            };
            for m in level..bound.max(level + 1) {
                if agreement.count_in_block(partition, m) == 0 {
                    return Verdict::refuted(AgreementFailure {
                        empty_block: m,
                        miss: Some(miss),
                    });
                }
            }
            Verdict::unknown(bound)
        }
        Verdict::Unknown { .. } => {
            // fall back to a bounded direct scan for an empty block
            let mut m = level;
            while partition.start(m) < horizon {
                if agreement.count_in_block(partition, m) == 0 {
                    return Verdict::refuted(AgreementFailure {
                        empty_block: m,
                        miss: None,
                    });
                }
                m += 1;
            }
            Verdict::unknown(horizon)
        }
    }
}

/// The level of the decomposition a continuous function first enters,
/// together with the certificates backing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementLevel {
    pub level: Nat,
    /// The agreement index set belongs to the filter.
    pub membership: MembershipCert,
    /// Every block from `level` on contains an agreeing index.
    pub agreement: AgreementCert,
}

/// Find the least level whose piece of the decomposition contains `f`.
///
/// The agreement index set of a continuous function belongs to the filter;
/// since every filter member meets cofinitely many index blocks, the set of
/// hit blocks is cofinite and its cofiniteness bound is the level.  Errors
/// when the agreement set falls outside the filter (the function is not
/// continuous at the limit) or the bound escapes closed-form extraction.
pub fn decomposition_level(
    f: &ContinuousWitness,
    partition: &BlockPartition,
    space: &FilterSpace,
    horizon: Nat,
) -> Result<AgreementLevel> {
    let agreement = f.agreement_indices();
    let membership = match space.filter().member(&agreement)? {
        Verdict::Proved { certificate } => certificate,
        Verdict::Refuted { .. } => {
            return Err(Error::Precondition(
                "the agreement index set falls outside the filter; the \
                 function has no decomposition level"
                    .into(),
            ))
        }
        Verdict::Unknown { horizon } => {
            return Err(Error::Exhausted {
                what: "filter membership of the agreement index set".into(),
                horizon,
            })
        }
    };
    let image = SetDescription::block_image(partition.clone(), agreement.clone());
    let mut level = match cardinality(&image) {
        Card::Cofinite { from } => from,
        Card::Finite { .. } | Card::BiInfinite { .. } => {
            return Err(Error::Precondition(
                "the set of hit blocks is not cofinite, so no finite level \
                 captures the function"
                    .into(),
            ))
        }
        Card::Unknown => {
            return Err(Error::Exhausted {
                what: "cofiniteness bound for the set of hit blocks".into(),
                horizon,
            })
        }
    };
    // tighten to the least level by scanning the blocks just below the bound
    while level > 0 && agreement.count_in_block(partition, level - 1) >= 1 {
        level -= 1;
    }
    match late_block_agreement(f, level, partition, horizon) {
        Verdict::Proved { certificate } => Ok(AgreementLevel {
            level,
            membership,
            agreement: certificate,
        }),
        Verdict::Refuted { certificate } => Err(Error::Precondition(format!(
            "level extraction produced {level} but block {} carries no \
             agreeing index",
            certificate.empty_block
        ))),
        Verdict::Unknown { horizon } => Err(Error::Exhausted {
            what: format!("agreement check at extracted level {level}"),
            horizon,
        }),
    }
}

// ---------------------------------------------------------------------------
// the avoidance engine
// ---------------------------------------------------------------------------

/// One engine response: a refined basic open set disjoint from the piece at
/// the requested level, with the block it flipped and a witness inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceMove {
    /// The refined basic open set (adversary's constraints plus one block
    /// pinned opposite to the limit bit).
    pub refined: BasicOpenSet,
    /// The index block whose coordinates were pinned.
    pub block: Nat,
    /// A continuous function inside the refined set.
    pub witness: ContinuousWitness,
    /// The witness fails the agreement condition at the requested level.
    pub refutation: AgreementFailure,
}

/// Inside the basic open set `u`, pin one whole untouched index block at or
/// past `level` to the bit opposite the limit value.
///
/// Every continuous function through the refined set disagrees with its
/// limit value throughout that block, so none lies in the piece at `level`:
/// the refined set avoids it while refining `u`.  The limit bit is adjoined
/// as 0 when `u` leaves it free.
pub fn avoidance_move(
    u: &BasicOpenSet,
    level: Nat,
    partition: &BlockPartition,
    seq: &SequencePresentation,
    space: &FilterSpace,
    horizon: Nat,
) -> Result<AvoidanceMove> {
    if let Err((i, j)) = seq.injectivity() {
        return Err(Error::InvalidInstance(format!(
            "the sequence repeats a point at indices {i} and {j}; coordinate \
             bookkeeping by index needs an injective sequence"
        )));
    }
    let v = u.at_infinity.unwrap_or(0);
    let flipped = 1 - v;
    // find the least block at or past the level whose indices are all free
    let mut block = level;
    loop {
        let lo = partition.start(block);
        if lo >= horizon {
            return Err(Error::Exhausted {
                what: format!(
                    "no index block at or past level {level} avoids the \
                     constrained coordinates"
                ),
                horizon,
            });
        }
        let hi = partition.end(block);
        if (lo..hi).all(|k| !u.constraints.contains_key(&k)) {
            // the sequence must actually provide these points
            for k in lo..hi {
                if seq.value(k).is_none() {
                    return Err(Error::Exhausted {
                        what: format!("sequence has no point at index {k}"),
                        horizon: k,
                    });
                }
            }
            break;
        }
        block += 1;
    }
    let mut constraints = u.constraints.clone();
    for k in partition.start(block)..partition.end(block) {
        constraints.insert(k, flipped);
    }
    let refined = BasicOpenSet::new(Some(v), constraints)?;
    let witness = refined.witness_inside(space)?;
    let refutation = match late_block_agreement(&witness, level, partition, horizon) {
        Verdict::Refuted { certificate } => certificate,
        Verdict::Proved { .. } => {
            return Err(Error::InvalidInstance(format!(
                "flipping block {block} failed to push the witness out of \
                 the piece at level {level}"
            )))
        }
        Verdict::Unknown { horizon } => {
            return Err(Error::Exhausted {
                what: format!("agreement refutation at level {level}"),
                horizon,
            })
        }
    };
    Ok(AvoidanceMove {
        refined,
        block,
        witness,
        refutation,
    })
}

/// Sample a continuous function inside `v_move` that differs from the plain
/// inside-witness on a few extra coordinates outside the constrained domain.
pub fn sample_witness_inside(
    v_move: &BasicOpenSet,
    space: &FilterSpace,
    rng: &mut ChaCha8Rng,
    extras: usize,
    bound: Nat,
) -> Result<ContinuousWitness> {
    let v = v_move.at_infinity.unwrap_or(0);
    let mut exceptional = v_move.constraints.clone();
    let mut dropped = v_move.domain();
    let mut added = 0;
    let mut attempts = 0;
    while added < extras && attempts < 64 * extras.max(1) {
        attempts += 1;
        let k = rng.next_u64() % bound.max(1);
        if exceptional.contains_key(&k) {
            continue;
        }
        let bit = (rng.next_u32() & 1) as u8;
        exceptional.insert(k, bit);
        dropped.push(k);
        added += 1;
    }
    ContinuousWitness::new(v, exceptional, SetDescription::cofinite(dropped), space)
}

// ---------------------------------------------------------------------------
// the game
// ---------------------------------------------------------------------------

/// Who supplies the shrinking basic open sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "adversary", rename_all = "snake_case")]
pub enum Adversary {
    /// Play these moves in order; the game errors when the script is short
    /// or a move fails to refine the engine's previous response.
    Scripted { moves: Vec<BasicOpenSet> },
    /// Derive moves from a seeded generator: each round refines the engine's
    /// previous response and pins up to three fresh coordinates.
    Seeded { seed: u64 },
}

/// One round: the adversary's basic open set, the engine's refinement, the
/// level it avoided, the block it pinned, and a witness inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRound {
    pub adversary_move: BasicOpenSet,
    pub engine_move: BasicOpenSet,
    pub avoided_level: Nat,
    pub block: Nat,
    pub witness: ContinuousWitness,
    pub refutation: AgreementFailure,
}

/// A completed game, replayable bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub presentation: FilterPresentation,
    pub partition: BlockPartition,
    pub sequence: SequencePresentation,
    pub adversary: Adversary,
    pub rounds: Vec<GameRound>,
    /// The last round's witness: a single continuous function inside every
    /// engine move and outside the pieces at levels `0..rounds`.
    pub final_witness: ContinuousWitness,
}

fn seeded_move(
    rng: &mut ChaCha8Rng,
    previous: Option<&BasicOpenSet>,
    round: Nat,
) -> BasicOpenSet {
    let mut mv = previous.cloned().unwrap_or_default();
    if mv.at_infinity.is_none() {
        mv.at_infinity = Some((rng.next_u32() & 1) as u8);
    }
    let extras = rng.next_u64() % SEEDED_EXTRAS;
    let bound = 64 + 16 * round;
    for _ in 0..extras {
        for _ in 0..64 {
            let k = rng.next_u64() % bound;
            if mv.constraints.contains_key(&k) {
                continue;
            }
            let bit = (rng.next_u32() & 1) as u8;
            mv.constraints.insert(k, bit);
            break;
        }
    }
    mv
}

/// Play the avoidance game for `rounds` rounds.
///
/// Round `r` starts with the adversary refining the engine's previous move
/// (any basic open set on round 0); the engine answers with a refinement
/// disjoint from the piece at level `r`.  Because every engine move refines
/// all earlier ones, the final round's witness lies inside every engine
/// move and outside every avoided piece.
pub fn play_game(
    adversary: Adversary,
    rounds: Nat,
    presentation: FilterPresentation,
    partition: BlockPartition,
    seq: SequencePresentation,
    horizon: Nat,
) -> Result<GameTranscript> {
    if rounds == 0 {
        return Err(Error::InvalidInstance(
            "a game needs at least one round".into(),
        ));
    }
    let space = FilterSpace::new(presentation.clone())?;
    let mut rng = match adversary {
        Adversary::Seeded { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Adversary::Scripted { .. } => None,
    };
    let mut played = Vec::new();
    let mut previous_engine: Option<BasicOpenSet> = None;
    for r in 0..rounds {
        let adversary_move = match &adversary {
            Adversary::Scripted { moves } => moves
                .get(r as usize)
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidInstance(format!(
                        "the script ends after {} moves but round {r} needs one",
                        moves.len()
                    ))
                })?,
            Adversary::Seeded { .. } => {
                seeded_move(rng.as_mut().expect("seeded rng"), previous_engine.as_ref(), r)
            }
        };
        if let Some(prev) = &previous_engine {
            if let Err(violation) = adversary_move.refines(prev) {
                return Err(Error::InvalidInstance(format!(
                    "round {r}: the adversary move does not refine the \
                     engine's previous move: {violation}"
                )));
            }
        }
        let mv = avoidance_move(&adversary_move, r, &partition, &seq, &space, horizon)?;
        previous_engine = Some(mv.refined.clone());
        played.push(GameRound {
            adversary_move,
            engine_move: mv.refined,
            avoided_level: r,
            block: mv.block,
            witness: mv.witness,
            refutation: mv.refutation,
        });
    }
    let final_witness = played
        .last()
        .expect("at least one round")
        .witness
        .clone();
    Ok(GameTranscript {
        presentation,
        partition,
        sequence: seq,
        adversary,
        rounds: played,
        final_witness,
    })
}

/// What a verified transcript guarantees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSummary {
    pub rounds: Nat,
    /// The final witness fails the agreement condition at each of these
    /// levels (all of `0..rounds`).
    pub levels_refuted: Vec<Nat>,
    /// Replaying the stored adversary reproduced the transcript exactly.
    pub replay_matches: bool,
}

/// Why a transcript was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFlaw {
    pub round: Option<Nat>,
    pub reason: String,
}

fn flaw(round: impl Into<Option<Nat>>, reason: impl Into<String>) -> Verdict<GameSummary, GameFlaw> {
    Verdict::refuted(GameFlaw {
        round: round.into(),
        reason: reason.into(),
    })
}

/// Re-check every claim a transcript makes, from scratch.
///
/// Checks, per round: the adversary refines the engine's previous move, the
/// engine refines the adversary, the pinned block sits at or past the round
/// level on previously free coordinates and is pinned opposite the limit
/// bit, the witness lies inside the engine move with a valid continuity
/// certificate, and the agreement condition fails at the round level.  The
/// final witness must lie inside every engine move and fail every played
/// level.  Finally the stored adversary is replayed and must reproduce the
/// transcript exactly.
pub fn verify_transcript(
    t: &GameTranscript,
    horizon: Nat,
) -> Result<Verdict<GameSummary, GameFlaw>> {
    if t.rounds.is_empty() {
        return Ok(flaw(None, "transcript has no rounds"));
    }
    let space = FilterSpace::new(t.presentation.clone())?;
    let mut previous_engine: Option<&BasicOpenSet> = None;
    for (r, round) in t.rounds.iter().enumerate() {
        let r = r as Nat;
        if round.avoided_level != r {
            return Ok(flaw(
                r,
                format!(
                    "round {r} claims to avoid level {}",
                    round.avoided_level
                ),
            ));
        }
        if let Some(prev) = previous_engine {
            if let Err(v) = round.adversary_move.refines(prev) {
                return Ok(flaw(
                    r,
                    format!("adversary move does not refine the previous engine move: {v}"),
                ));
            }
        }
        if let Err(v) = round.engine_move.refines(&round.adversary_move) {
            return Ok(flaw(
                r,
                format!("engine move does not refine the adversary move: {v}"),
            ));
        }
        if round.block < r {
            return Ok(flaw(
                r,
                format!("pinned block {} sits below the round level", round.block),
            ));
        }
        let v = round.engine_move.at_infinity.unwrap_or(0);
        let lo = t.partition.start(round.block);
        let hi = t.partition.end(round.block);
        for k in lo..hi {
            if round.adversary_move.constraints.contains_key(&k) {
                return Ok(flaw(
                    r,
                    format!("pinned block {} overlaps the adversary's coordinates", round.block),
                ));
            }
            if round.engine_move.constraints.get(&k) != Some(&(1 - v)) {
                return Ok(flaw(
                    r,
                    format!(
                        "coordinate {k} of block {} is not pinned opposite the limit bit",
                        round.block
                    ),
                ));
            }
        }
        let extra = round
            .engine_move
            .constraints
            .keys()
            .any(|&k| !(lo..hi).contains(&k) && !round.adversary_move.constraints.contains_key(&k));
        if extra {
            return Ok(flaw(
                r,
                "engine move pins coordinates outside the adversary's domain and the block",
            ));
        }
        if !round.engine_move.admits(&round.witness) {
            return Ok(flaw(r, "witness falls outside the engine move"));
        }
        if !round.witness.recertify(&space)? {
            return Ok(flaw(r, "witness continuity certificate does not re-verify"));
        }
        match late_block_agreement(&round.witness, r, &t.partition, horizon) {
            Verdict::Refuted { certificate } => {
                if certificate.empty_block < r {
                    return Ok(flaw(
                        r,
                        "recorded refutation names a block below the round level",
                    ));
                }
            }
            _ => {
                return Ok(flaw(
                    r,
                    "witness does not fail the agreement condition at the round level",
                ))
            }
        }
        previous_engine = Some(&round.engine_move);
    }
    // the final witness lies inside every engine move and fails every level
    let mut levels = Vec::new();
    for (r, round) in t.rounds.iter().enumerate() {
        let r = r as Nat;
        if !round.engine_move.admits(&t.final_witness) {
            return Ok(flaw(
                r,
                "final witness falls outside an engine move",
            ));
        }
        match late_block_agreement(&t.final_witness, r, &t.partition, horizon) {
            Verdict::Refuted { .. } => levels.push(r),
            _ => {
                return Ok(flaw(
                    r,
                    "final witness does not fail the agreement condition at this level",
                ))
            }
        }
    }
    if !t.final_witness.recertify(&space)? {
        return Ok(flaw(None, "final witness continuity certificate does not re-verify"));
    }
    let replayed = play_game(
        t.adversary.clone(),
        t.rounds.len() as Nat,
        t.presentation.clone(),
        t.partition.clone(),
        t.sequence.clone(),
        horizon,
    )?;
    let replay_matches = &replayed == t;
    if !replay_matches {
        return Ok(flaw(None, "replaying the stored adversary produced a different transcript"));
    }
    Ok(Verdict::proved(GameSummary {
        rounds: t.rounds.len() as Nat,
        levels_refuted: levels,
        replay_matches,
    }))
}
