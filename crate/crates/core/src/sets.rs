//! A closed algebra of finitely presented subsets of the naturals (and of
//! pairs of naturals under a fixed pairing).
//!
//! Membership is decidable for every description.  Asymptotic questions
//! (cofiniteness, block densities, ...) are answered by the structural
//! procedures in [`crate::analysis`], which return `Unknown` outside their
//! reach instead of guessing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::BlockPartition;
use crate::Nat;

/// Which ground set a description lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universe {
    /// Subsets of the naturals.
    Naturals,
    /// Subsets of pairs of naturals, stored under the diagonal pairing.
    Pairs,
}

/// Per-block selection rule for block-aligned sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BlockSelector {
    /// Whole block.
    All,
    /// Nothing from any block.
    None,
    /// First `t` points of each block (fewer if the block is shorter).
    First { t: Nat },
    /// Everything past the first `t` points of each block.
    AllButFirst { t: Nat },
    /// Whole blocks minus a finite table of removed points (absolute values).
    MarkedRemoved { removed: BTreeSet<Nat> },
}

/// Column set of one row of a paired set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowSpec {
    Empty,
    /// An explicit finite column set.
    Finite { cols: BTreeSet<Nat> },
    /// All columns `>= c`.
    From { c: Nat },
}

impl RowSpec {
    pub fn contains(&self, col: Nat) -> bool {
        match self {
            RowSpec::Empty => false,
            RowSpec::Finite { cols } => cols.contains(&col),
            RowSpec::From { c } => col >= *c,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, RowSpec::From { .. })
    }

    /// Largest column, for finite rows.
    pub fn max_col(&self) -> Option<Nat> {
        match self {
            RowSpec::Empty => None,
            RowSpec::Finite { cols } => cols.iter().next_back().copied(),
            RowSpec::From { .. } => None,
        }
    }
}

/// Rowwise description of a subset of the pair universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowScheme {
    /// All pairs with row index `>= k`.
    RowsFrom { k: Nat },
    /// All pairs with column index `>= c`.
    ColsFrom { c: Nat },
    /// Pairs with column `>=` row (the upper diagonal wedge).
    UpperDiagonal,
    /// Finitely many exceptional rows plus a default for all others.
    Table {
        rows: BTreeMap<Nat, RowSpec>,
        default: RowSpec,
    },
    /// Full rows at the indices of a described set of naturals (the preimage
    /// of that set under the first-coordinate projection).
    RowsIn { rows: Box<SetDescription> },
}

impl RowScheme {
    pub fn row(&self, r: Nat) -> RowSpec {
        match self {
            RowScheme::RowsFrom { k } => {
                if r >= *k {
                    RowSpec::From { c: 0 }
                } else {
                    RowSpec::Empty
                }
            }
            RowScheme::ColsFrom { c } => RowSpec::From { c: *c },
            RowScheme::UpperDiagonal => RowSpec::From { c: r },
            RowScheme::Table { rows, default } => rows.get(&r).cloned().unwrap_or(default.clone()),
            RowScheme::RowsIn { rows } => {
                if rows.member(r) {
                    RowSpec::From { c: 0 }
                } else {
                    RowSpec::Empty
                }
            }
        }
    }

    pub fn contains(&self, r: Nat, c: Nat) -> bool {
        self.row(r).contains(c)
    }
}

/// Diagonal (Cantor) pairing of two naturals into one.
pub fn pair(row: Nat, col: Nat) -> Nat {
    let s = (row + col) as u128;
    Nat::try_from(s * (s + 1) / 2 + col as u128).expect("paired point exceeds u64")
}

/// Inverse of [`pair`].
pub fn unpair(x: Nat) -> (Nat, Nat) {
    // triangular root of x
    let mut d = (((8.0 * x as f64 + 1.0).sqrt() - 1.0) / 2.0) as Nat;
    while tri(d + 1) <= x as u128 {
        d += 1;
    }
    while tri(d) > x as u128 {
        d -= 1;
    }
    let col = x - Nat::try_from(tri(d)).expect("triangular overflow");
    (d - col, col)
}

fn tri(d: Nat) -> u128 {
    let d = d as u128;
    d * (d + 1) / 2
}

/// Finitely presented subset of the naturals or of the pair universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescription {
    /// Exactly the listed points.
    Finite { members: BTreeSet<Nat> },
    /// Everything except the listed points.
    Cofinite { complement: BTreeSet<Nat> },
    /// Explicit below `cutoff`, constant (`tail_full`) from `cutoff` on.
    Truncated {
        members: BTreeSet<Nat>,
        cutoff: Nat,
        tail_full: bool,
    },
    /// Blockwise selection along a partition.
    Blocks {
        partition: BlockPartition,
        selector: BlockSelector,
    },
    /// Union of the blocks whose index lies in `indices` (the preimage of an
    /// index set under the block map).
    UnionOfBlocks {
        partition: BlockPartition,
        indices: Box<SetDescription>,
    },
    /// Set of block indices whose block meets `inner` (the image of a set
    /// under the block map).
    BlockImage {
        partition: BlockPartition,
        inner: Box<SetDescription>,
    },
    /// Set of block indices `n` with `at_least <= |inner ∩ block n|`, and
    /// `< below` when given.
    BlockCount {
        partition: BlockPartition,
        inner: Box<SetDescription>,
        at_least: Nat,
        below: Option<Nat>,
    },
    /// Rowwise-described subset of the pair universe.
    Pairs { scheme: RowScheme },
    And { parts: Vec<SetDescription> },
    Or { parts: Vec<SetDescription> },
    Not { inner: Box<SetDescription> },
}

use SetDescription::*;

impl SetDescription {
    pub fn finite<I: IntoIterator<Item = Nat>>(xs: I) -> Self {
        Finite {
            members: xs.into_iter().collect(),
        }
    }

    pub fn cofinite<I: IntoIterator<Item = Nat>>(dropped: I) -> Self {
        Cofinite {
            complement: dropped.into_iter().collect(),
        }
    }

    pub fn everything() -> Self {
        Cofinite {
            complement: BTreeSet::new(),
        }
    }

    /// The tail `[t, ∞)`.
    pub fn tail_from(t: Nat) -> Self {
        Truncated {
            members: BTreeSet::new(),
            cutoff: t,
            tail_full: true,
        }
    }

    pub fn empty() -> Self {
        Finite {
            members: BTreeSet::new(),
        }
    }

    pub fn blocks(partition: BlockPartition, selector: BlockSelector) -> Self {
        Blocks {
            partition,
            selector,
        }
    }

    /// The even numbers, as a block rule over blocks of size 2.
    pub fn evens() -> Self {
        Self::blocks(BlockPartition::constant(2), BlockSelector::First { t: 1 })
    }

    /// The odd numbers.
    pub fn odds() -> Self {
        Self::blocks(
            BlockPartition::constant(2),
            BlockSelector::AllButFirst { t: 1 },
        )
    }

    pub fn union_of_blocks(partition: BlockPartition, indices: SetDescription) -> Self {
        UnionOfBlocks {
            partition,
            indices: Box::new(indices),
        }
    }

    pub fn block_image(partition: BlockPartition, inner: SetDescription) -> Self {
        BlockImage {
            partition,
            inner: Box::new(inner),
        }
    }

    pub fn block_count(
        partition: BlockPartition,
        inner: SetDescription,
        at_least: Nat,
        below: Option<Nat>,
    ) -> Self {
        BlockCount {
            partition,
            inner: Box::new(inner),
            at_least,
            below,
        }
    }

    pub fn pairs(scheme: RowScheme) -> Self {
        Pairs { scheme }
    }

    pub fn and(parts: Vec<SetDescription>) -> Self {
        And { parts }
    }

    pub fn or(parts: Vec<SetDescription>) -> Self {
        Or { parts }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: SetDescription) -> Self {
        Not {
            inner: Box::new(inner),
        }
    }

    /// The universe this description lives over, or an error when a boolean
    /// combination mixes the two.
    pub fn universe(&self) -> Result<Universe> {
        match self {
            Pairs {
                scheme: RowScheme::RowsIn { rows },
            } => {
                if rows.universe()? != Universe::Naturals {
                    return Err(Error::MixedUniverse);
                }
                Ok(Universe::Pairs)
            }
            Pairs { .. } => Ok(Universe::Pairs),
            Finite { .. } | Cofinite { .. } | Truncated { .. } | Blocks { .. } => {
                Ok(Universe::Naturals)
            }
            UnionOfBlocks { indices, .. } => {
                if indices.universe()? != Universe::Naturals {
                    return Err(Error::MixedUniverse);
                }
                Ok(Universe::Naturals)
            }
            BlockImage { inner, .. } | BlockCount { inner, .. } => {
                if inner.universe()? != Universe::Naturals {
                    return Err(Error::MixedUniverse);
                }
                Ok(Universe::Naturals)
            }
            And { parts } | Or { parts } => {
                let mut u = None;
                for p in parts {
                    let pu = p.universe()?;
                    match u {
                        None => u = Some(pu),
                        Some(prev) if prev != pu => return Err(Error::MixedUniverse),
                        _ => {}
                    }
                }
                Ok(u.unwrap_or(Universe::Naturals))
            }
            Not { inner } => inner.universe(),
        }
    }

    /// Decidable membership.  For `Pairs` descriptions the point is read as a
    /// paired code.
    pub fn member(&self, x: Nat) -> bool {
        match self {
            Finite { members } => members.contains(&x),
            Cofinite { complement } => !complement.contains(&x),
            Truncated {
                members,
                cutoff,
                tail_full,
            } => {
                if x < *cutoff {
                    members.contains(&x)
                } else {
                    *tail_full
                }
            }
            Blocks {
                partition,
                selector,
            } => {
                let b = partition.block_of(x);
                let pos = x - partition.start(b);
                match selector {
                    BlockSelector::All => true,
                    BlockSelector::None => false,
                    BlockSelector::First { t } => pos < *t,
                    BlockSelector::AllButFirst { t } => pos >= *t,
                    BlockSelector::MarkedRemoved { removed } => !removed.contains(&x),
                }
            }
            UnionOfBlocks { partition, indices } => indices.member(partition.block_of(x)),
            BlockImage { partition, inner } => {
                block_count_in(inner, partition, x, Some(1)).0 >= 1
            }
            BlockCount {
                partition,
                inner,
                at_least,
                below,
            } => {
                let stop = match below {
                    Some(b) => (*b).max(*at_least),
                    None => *at_least,
                };
                let (count, _) = block_count_in(inner, partition, x, Some(stop));
                count >= *at_least && below.map_or(true, |b| count < b)
            }
            Pairs { scheme } => {
                let (r, c) = unpair(x);
                scheme.contains(r, c)
            }
            And { parts } => parts.iter().all(|p| p.member(x)),
            Or { parts } => parts.iter().any(|p| p.member(x)),
            Not { inner } => !inner.member(x),
        }
    }

    /// Number of members of this set inside block `n` of `partition`.
    ///
    /// Exact for every description; uses closed forms where the description
    /// is aligned with the partition and falls back to enumeration of the
    /// (finite) block otherwise.
    pub fn count_in_block(&self, partition: &BlockPartition, n: Nat) -> Nat {
        if let Blocks {
            partition: q,
            selector,
        } = self
        {
            if q == partition {
                let s = partition.size(n);
                return match selector {
                    BlockSelector::All => s,
                    BlockSelector::None => 0,
                    BlockSelector::First { t } => s.min(*t),
                    BlockSelector::AllButFirst { t } => s.saturating_sub(*t),
                    BlockSelector::MarkedRemoved { removed } => {
                        let lo = partition.start(n);
                        let hi = partition.end(n);
                        s - removed.range(lo..hi).count() as Nat
                    }
                };
            }
        }
        if let UnionOfBlocks {
            partition: q,
            indices,
        } = self
        {
            if q == partition {
                return if indices.member(n) {
                    partition.size(n)
                } else {
                    0
                };
            }
        }
        let lo = partition.start(n);
        let hi = partition.end(n);
        assert!(
            hi - lo <= 1 << 22,
            "refusing to enumerate a block of {} points without a closed form",
            hi - lo
        );
        (lo..hi).filter(|&x| self.member(x)).count() as Nat
    }

    /// Points of this set within `[lo, hi)`.
    pub fn members_below(&self, lo: Nat, hi: Nat) -> Vec<Nat> {
        (lo..hi).filter(|&x| self.member(x)).collect()
    }
}

/// Count `inner ∩ block n`, stopping early once `stop_at` members are seen
/// when only a threshold comparison is needed.  Returns `(count, exact)`;
/// when `exact` is false the count reached `stop_at` and counting stopped.
fn block_count_in(
    inner: &SetDescription,
    partition: &BlockPartition,
    n: Nat,
    stop_at: Option<Nat>,
) -> (Nat, bool) {
    match inner {
        Blocks { partition: q, .. } | UnionOfBlocks { partition: q, .. } if q == partition => {
            return (inner.count_in_block(partition, n), true);
        }
        _ => {}
    }
    let lo = partition.start(n);
    let hi = partition.end(n);
    assert!(
        hi - lo <= 1 << 22,
        "refusing to enumerate a block of {} points without a closed form",
        hi - lo
    );
    let mut count = 0;
    for x in lo..hi {
        if inner.member(x) {
            count += 1;
            if let Some(s) = stop_at {
                if count >= s && s > 0 {
                    return (count, false);
                }
            }
        }
    }
    (count, true)
}

impl fmt::Display for SetDescription {
    /// Renders in the set-expression grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &BTreeSet<Nat>) -> fmt::Result {
            write!(f, "[")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")
        }
        match self {
            Finite { members } => {
                write!(f, "finite(")?;
                list(f, members)?;
                write!(f, ")")
            }
            Cofinite { complement } if complement.is_empty() => write!(f, "all"),
            Cofinite { complement } => {
                write!(f, "cofinite(drop=")?;
                list(f, complement)?;
                write!(f, ")")
            }
            Truncated {
                members,
                cutoff,
                tail_full,
            } => {
                write!(f, "truncated(mask=")?;
                list(f, members)?;
                write!(
                    f,
                    ", n={cutoff}, tail={})",
                    if *tail_full { "full" } else { "empty" }
                )
            }
            Blocks {
                partition,
                selector,
            } => {
                write!(f, "blocks(sizes={partition}, rule=")?;
                match selector {
                    BlockSelector::All => write!(f, "all")?,
                    BlockSelector::None => write!(f, "none")?,
                    BlockSelector::First { t } => write!(f, "first({t})")?,
                    BlockSelector::AllButFirst { t } => write!(f, "all_but_first({t})")?,
                    BlockSelector::MarkedRemoved { removed } => {
                        write!(f, "drop(")?;
                        list(f, removed)?;
                        write!(f, ")")?;
                    }
                }
                write!(f, ")")
            }
            UnionOfBlocks { partition, indices } => {
                write!(f, "union_blocks(sizes={partition}, idx={indices})")
            }
            BlockImage { partition, inner } => {
                write!(f, "block_image(sizes={partition}, of={inner})")
            }
            BlockCount {
                partition,
                inner,
                at_least,
                below,
            } => {
                write!(f, "block_count(sizes={partition}, of={inner}, at_least={at_least}")?;
                if let Some(b) = below {
                    write!(f, ", below={b}")?;
                }
                write!(f, ")")
            }
            Pairs { scheme } => match scheme {
                RowScheme::RowsFrom { k } => write!(f, "rows:from({k})"),
                RowScheme::ColsFrom { c } => write!(f, "cols:from({c})"),
                RowScheme::UpperDiagonal => write!(f, "diag:upper"),
                RowScheme::Table { rows, default } => {
                    fn spec(f: &mut fmt::Formatter<'_>, s: &RowSpec) -> fmt::Result {
                        match s {
                            RowSpec::Empty => write!(f, "empty"),
                            RowSpec::Finite { cols } => {
                                write!(f, "cols[")?;
                                for (i, c) in cols.iter().enumerate() {
                                    if i > 0 {
                                        write!(f, ",")?;
                                    }
                                    write!(f, "{c}")?;
                                }
                                write!(f, "]")
                            }
                            RowSpec::From { c } => write!(f, "from({c})"),
                        }
                    }
                    write!(f, "rows:table(")?;
                    for (r, s) in rows {
                        write!(f, "{r}=>")?;
                        spec(f, s)?;
                        write!(f, "; ")?;
                    }
                    write!(f, "default=>")?;
                    spec(f, default)?;
                    write!(f, ")")
                }
                RowScheme::RowsIn { rows } => write!(f, "rows:in({rows})"),
            },
            And { parts } => {
                write!(f, "and(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Or { parts } => {
                write!(f, "or(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Not { inner } => write!(f, "not({inner})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_round_trips() {
        for r in 0..60 {
            for c in 0..60 {
                assert_eq!(unpair(pair(r, c)), (r, c));
            }
        }
        for x in 0..4000 {
            let (r, c) = unpair(x);
            assert_eq!(pair(r, c), x);
        }
    }

    #[test]
    fn evens_and_odds() {
        let e = SetDescription::evens();
        let o = SetDescription::odds();
        for x in 0..100 {
            assert_eq!(e.member(x), x % 2 == 0);
            assert_eq!(o.member(x), x % 2 == 1);
        }
    }

    #[test]
    fn first_selector_block_membership() {
        // first point of each size-2 block: membership at a block start
        let s = SetDescription::blocks(BlockPartition::constant(2), BlockSelector::First { t: 1 });
        assert!(s.member(4));
        assert!(!s.member(5));
    }

    #[test]
    fn cofinite_block_count_enumerates() {
        // complement = {0..6}; block 2 of the size-2 partition is [4,6)
        let a = SetDescription::cofinite(0..7);
        let p = BlockPartition::constant(2);
        assert_eq!(a.count_in_block(&p, 2), 0);
        assert_eq!(a.count_in_block(&p, 3), 1); // [6,8): 7 survives
        assert_eq!(a.count_in_block(&p, 4), 2);
    }

    #[test]
    fn union_of_blocks_membership() {
        let p = BlockPartition::constant(3);
        let u = SetDescription::union_of_blocks(p.clone(), SetDescription::evens());
        // block 0 = [0,3) in, block 1 = [3,6) out, ...
        assert!(u.member(2));
        assert!(!u.member(3));
        assert!(!u.member(5));
        assert!(u.member(6));
        assert_eq!(u.count_in_block(&p, 2), 3);
        assert_eq!(u.count_in_block(&p, 3), 0);
    }

    #[test]
    fn block_image_and_count() {
        let p = BlockPartition::constant(2);
        // evens hit every size-2 block once
        let img = SetDescription::block_image(p.clone(), SetDescription::evens());
        for n in 0..50 {
            assert!(img.member(n));
        }
        let exactly_one =
            SetDescription::block_count(p, SetDescription::evens(), 1, Some(2));
        for n in 0..50 {
            assert!(exactly_one.member(n));
        }
    }

    #[test]
    fn pair_schemes() {
        let d = SetDescription::pairs(RowScheme::Table {
            rows: BTreeMap::new(),
            default: RowSpec::Finite {
                cols: [0].into_iter().collect(),
            },
        });
        assert!(d.member(pair(3, 0)));
        assert!(!d.member(pair(3, 1)));
        let a2 = SetDescription::pairs(RowScheme::RowsFrom { k: 2 });
        assert!(!a2.member(pair(1, 5)));
        assert!(a2.member(pair(2, 5)));
        let diag = SetDescription::pairs(RowScheme::UpperDiagonal);
        assert!(diag.member(pair(3, 3)));
        assert!(!diag.member(pair(3, 2)));
    }

    #[test]
    fn universes_checked() {
        let bad = SetDescription::and(vec![
            SetDescription::evens(),
            SetDescription::pairs(RowScheme::ColsFrom { c: 1 }),
        ]);
        assert!(bad.universe().is_err());
    }

    #[test]
    fn truncated_membership() {
        let t = SetDescription::Truncated {
            members: [1, 3].into_iter().collect(),
            cutoff: 5,
            tail_full: true,
        };
        assert!(t.member(1));
        assert!(!t.member(2));
        assert!(t.member(9));
    }
}
