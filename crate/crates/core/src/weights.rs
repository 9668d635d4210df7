//! Weight sequences and the masses they assign to sets: exact finite sums,
//! two-sided enclosures where exactness would be ruinously expensive, and
//! divergence certificates obtained by comparison against arithmetic
//! progressions.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{cardinality, eventual_form, Card, InfinitudeCert};
use crate::sets::SetDescription;
use crate::Nat;

/// A named weight sequence `n ↦ w_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    /// `w_n = 1`
    Unit,
    /// `w_n = 1/(n+1)`
    Harmonic,
    /// `w_n = 2^{-n}` — total mass 2, so the induced smallness notion
    /// swallows everything
    Halving,
}

impl WeightRule {
    pub fn weight(&self, n: Nat) -> BigRational {
        match self {
            WeightRule::Unit => BigRational::one(),
            WeightRule::Harmonic => {
                BigRational::new(BigInt::one(), BigInt::from(n + 1))
            }
            WeightRule::Halving => BigRational::new(
                BigInt::one(),
                BigInt::from(BigUint::one() << n.min(1 << 20) as usize),
            ),
        }
    }

    /// Whether the total mass `Σ_n w_n` is infinite.  Only then do the
    /// weights support a proper smallness notion.
    pub fn total_mass_diverges(&self) -> bool {
        matches!(self, WeightRule::Unit | WeightRule::Harmonic)
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            WeightRule::Unit => "unit",
            WeightRule::Harmonic => "harmonic",
            WeightRule::Halving => "halving",
        }
    }
}

impl std::fmt::Display for WeightRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Two-sided bound on a mass; `lower == upper` when the value is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassEnclosure {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl MassEnclosure {
    pub fn exact(v: BigRational) -> Self {
        MassEnclosure {
            lower: v.clone(),
            upper: v,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Why a mass diverges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DivergenceCert {
    /// Unit weights over an infinite set.
    UnitTerms { infinitude: InfinitudeCert },
    /// The set contains the whole progression `{from + k·period ... }`
    /// restricted to one residue; `Σ 1/(n+1)` over a progression diverges.
    HarmonicProgression { from: Nat, period: Nat, residue: Nat },
}

/// Sample-check a divergence certificate against the set it talks about.
pub fn verify_divergence(
    set: &SetDescription,
    cert: &DivergenceCert,
    horizon: Nat,
) -> bool {
    match cert {
        DivergenceCert::UnitTerms { infinitude } => {
            crate::analysis::verify_infinitude(set, infinitude, horizon)
        }
        DivergenceCert::HarmonicProgression {
            from,
            period,
            residue,
        } => {
            if *period == 0 || residue >= period {
                return false;
            }
            let mut x = *from;
            let mut checked = 0;
            while x < from + horizon.min(20_000) {
                if x % period == *residue {
                    if !set.member(x) {
                        return false;
                    }
                    checked += 1;
                }
                x += 1;
            }
            checked > 0
        }
    }
}

/// Result of a structural mass computation.
#[derive(Debug, Clone)]
pub enum MassVerdict {
    Finite(MassEnclosure),
    Divergent(DivergenceCert),
    Unknown,
}

impl MassVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, MassVerdict::Finite(_))
    }
}

/// Exact mass of an explicit finite list of members.  Unit and halving
/// weights cost nothing; harmonic sums build the honest rational.
pub fn finite_mass(rule: WeightRule, members: &[Nat]) -> BigRational {
    match rule {
        WeightRule::Unit => BigRational::from(BigInt::from(members.len())),
        WeightRule::Halving => halving_mass(members),
        WeightRule::Harmonic => {
            let mut acc = BigRational::zero();
            for &n in members {
                acc += rule.weight(n);
            }
            acc
        }
    }
}

/// `Σ 2^{-n}` over the listed members, assembled bitwise: with common
/// denominator `2^B` each member contributes a single bit.
fn halving_mass(members: &[Nat]) -> BigRational {
    let Some(&maxn) = members.iter().max() else {
        return BigRational::zero();
    };
    let b = (maxn + 1) as usize;
    let mut num = BigUint::zero();
    for &n in members {
        num |= BigUint::one() << (b - 1 - n as usize);
    }
    BigRational::new(BigInt::from(num), BigInt::from(BigUint::one() << b))
}

/// Structural mass of a described set.
///
/// Sound in both directions: `Finite` encloses the true value, `Divergent`
/// carries a re-checkable comparison, and anything outside the decidable
/// fragment is `Unknown` — never a guess.
pub fn mass_of(rule: WeightRule, set: &SetDescription, horizon: Nat) -> MassVerdict {
    match rule {
        WeightRule::Unit => match cardinality(set) {
            Card::Finite { bound } => MassVerdict::Finite(MassEnclosure::exact(
                BigRational::from(BigInt::from(set.members_below(0, bound).len())),
            )),
            c => match c.infinitude() {
                Some(cert) => MassVerdict::Divergent(DivergenceCert::UnitTerms {
                    infinitude: cert,
                }),
                None => MassVerdict::Unknown,
            },
        },
        WeightRule::Harmonic => match cardinality(set) {
            Card::Finite { bound } => {
                let members = set.members_below(0, bound);
                if members.len() <= 512 {
                    MassVerdict::Finite(MassEnclosure::exact(finite_mass(rule, &members)))
                } else {
                    MassVerdict::Finite(fixed_point_mass(rule, &members))
                }
            }
            Card::Cofinite { from } => {
                MassVerdict::Divergent(DivergenceCert::HarmonicProgression {
                    from,
                    period: 1,
                    residue: 0,
                })
            }
            Card::BiInfinite { members, .. } => match members {
                InfinitudeCert::ResidueClasses {
                    from,
                    period,
                    residues,
                } if !residues.is_empty() => {
                    MassVerdict::Divergent(DivergenceCert::HarmonicProgression {
                        from,
                        period,
                        residue: residues[0],
                    })
                }
                _ => MassVerdict::Unknown,
            },
            Card::Unknown => MassVerdict::Unknown,
        },
        WeightRule::Halving => halving_mass_of(set, horizon),
    }
}

/// Halving masses always converge; compute exactly on the periodic fragment
/// and fall back to a scan with a geometric tail bound.
fn halving_mass_of(set: &SetDescription, horizon: Nat) -> MassVerdict {
    if let Some(p) = eventual_form(set) {
        // explicit prefix below p.from, geometric series on each residue
        let prefix: Vec<Nat> = (0..p.from).filter(|&x| set.member(x)).collect();
        let mut total = halving_mass(&prefix);
        for r in p.member_residues() {
            // least x >= from with x ≡ r (mod period)
            let x0 = if p.from <= r {
                r
            } else {
                let k = (p.from - r + p.period - 1) / p.period;
                r + k * p.period
            };
            // Σ_k 2^{-(x0 + k·period)} = 2^{-x0} · 2^p/(2^p - 1)
            let pow_p = BigUint::one() << p.period.min(4096) as usize;
            let head = BigRational::new(
                BigInt::one(),
                BigInt::from(BigUint::one() << x0.min(1 << 20) as usize),
            );
            let factor = BigRational::new(
                BigInt::from(pow_p.clone()),
                BigInt::from(pow_p - BigUint::one()),
            );
            total += head * factor;
        }
        return MassVerdict::Finite(MassEnclosure::exact(total));
    }
    let h = horizon.clamp(64, 4096);
    let members: Vec<Nat> = (0..h).filter(|&x| set.member(x)).collect();
    let partial = halving_mass(&members);
    let tail = BigRational::new(
        BigInt::from(2),
        BigInt::from(BigUint::one() << h as usize),
    );
    MassVerdict::Finite(MassEnclosure {
        lower: partial.clone(),
        upper: partial + tail,
    })
}

const FP_SHIFT: u32 = 64;

/// Two-sided fixed-point mass of an explicit member list (used where exact
/// rationals would be enormous).
fn fixed_point_mass(rule: WeightRule, members: &[Nat]) -> MassEnclosure {
    let mut lo: u128 = 0;
    let mut hi: u128 = 0;
    for &n in members {
        let (tl, th) = fp_weight(rule, n);
        lo += tl;
        hi += th;
    }
    MassEnclosure {
        lower: fp_to_rational(lo),
        upper: fp_to_rational(hi),
    }
}

/// Weight of `n` in 64.64 fixed point, rounded down and up.
fn fp_weight(rule: WeightRule, n: Nat) -> (u128, u128) {
    match rule {
        WeightRule::Unit => (1u128 << FP_SHIFT, 1u128 << FP_SHIFT),
        WeightRule::Harmonic => {
            let d = (n + 1) as u128;
            let q = (1u128 << FP_SHIFT) / d;
            let r = (1u128 << FP_SHIFT) % d;
            (q, q + u128::from(r != 0))
        }
        WeightRule::Halving => {
            if n >= FP_SHIFT as Nat {
                (0, 1)
            } else {
                let t = 1u128 << (FP_SHIFT as Nat - n);
                (t, t)
            }
        }
    }
}

fn fp_to_rational(v: u128) -> BigRational {
    BigRational::new(
        BigInt::from(v),
        BigInt::from(BigUint::one() << FP_SHIFT as usize),
    )
}

/// Outcome of a segment search: the least end (as certified by the sound
/// lower bound) at which the accumulated mass strictly exceeds the
/// threshold.
#[derive(Debug, Clone)]
pub struct MassCrossing {
    /// One past the last point included.
    pub end: Nat,
    /// Mass enclosure of `set ∩ [start, end)`.
    pub mass: MassEnclosure,
}

/// Walk `set ∩ [start, ∞)` accumulating weights until the mass provably
/// exceeds `threshold`; gives up (returns `None`) past `start + cap`.
///
/// Unit weights make the comparison exact.  Harmonic weights use a 64-bit
/// fixed-point lower bound, whose total slack over the walk stays below
/// `cap · 2^{-64}`, far under any gap these searches meet.
pub fn first_mass_crossing(
    rule: WeightRule,
    set: &SetDescription,
    start: Nat,
    threshold: Nat,
    cap: Nat,
) -> Option<MassCrossing> {
    let goal = (threshold as u128) << FP_SHIFT;
    let mut lo: u128 = 0;
    let mut hi: u128 = 0;
    let mut x = start;
    while x < start.saturating_add(cap) {
        if set.member(x) {
            let (tl, th) = fp_weight(rule, x);
            lo += tl;
            hi += th;
            if lo > goal {
                return Some(MassCrossing {
                    end: x + 1,
                    mass: MassEnclosure {
                        lower: fp_to_rational(lo),
                        upper: fp_to_rational(hi),
                    },
                });
            }
        }
        x += 1;
    }
    None
}
