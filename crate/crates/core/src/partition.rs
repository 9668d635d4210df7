//! Interval partitions of the naturals into consecutive finite blocks.
//!
//! A partition is described by an explicit prefix of block sizes followed by a
//! tail rule.  Blocks are the intervals `[start(n), start(n+1))`; the induced
//! finite-to-one map sends a point to the index of the block containing it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Nat;

/// Size of block `n` for `n` past the explicit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    /// `|block n| = c`.
    Const { c: Nat },
    /// `|block n| = n + c`.
    Linear { c: Nat },
    /// `|block n| = ceil(log2(n + c))`.
    CeilLog2 { c: Nat },
    /// `|block n| = 2^(n - shift)` (saturating at `n = shift`).  With prefix
    /// `[1]` and `shift = 1` this is the dyadic partition
    /// `{0}, [1,2), [2,4), [4,8), ...`.
    Exp2 { shift: u32 },
}

impl TailRule {
    fn size(self, n: Nat) -> Nat {
        match self {
            TailRule::Const { c } => c,
            TailRule::Linear { c } => n + c,
            TailRule::CeilLog2 { c } => ceil_log2(n + c),
            TailRule::Exp2 { shift } => {
                let e = n.saturating_sub(shift as Nat);
                assert!(e < 64, "block size overflows u64");
                1u64 << e
            }
        }
    }

    /// True when sizes grow without bound.
    pub fn unbounded(self) -> bool {
        !matches!(self, TailRule::Const { .. })
    }
}

pub(crate) fn ceil_log2(x: Nat) -> Nat {
    debug_assert!(x >= 1);
    if x <= 1 {
        0
    } else {
        64 - ((x - 1).leading_zeros() as Nat)
    }
}

/// Partition of the naturals into consecutive intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    prefix: Vec<Nat>,
    tail: TailRule,
}

impl BlockPartition {
    pub fn new(prefix: Vec<Nat>, tail: TailRule) -> Result<Self> {
        if prefix.iter().any(|&s| s == 0) {
            return Err(Error::InvalidPartition("zero-size block in prefix".into()));
        }
        match tail {
            TailRule::Const { c } if c == 0 => {
                return Err(Error::InvalidPartition("constant tail size 0".into()))
            }
            TailRule::Linear { c } if c == 0 && prefix.is_empty() => {
                return Err(Error::InvalidPartition(
                    "linear tail starts with a zero-size block".into(),
                ))
            }
            TailRule::CeilLog2 { c } => {
                // size at the first tail index must already be >= 1
                let first = prefix.len() as Nat + c;
                if first < 2 {
                    return Err(Error::InvalidPartition(
                        "ceil-log tail starts with a zero-size block".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(BlockPartition { prefix, tail })
    }

    pub fn constant(c: Nat) -> Self {
        BlockPartition::new(vec![], TailRule::Const { c }).expect("positive constant size")
    }

    pub fn linear(c: Nat) -> Self {
        BlockPartition::new(vec![], TailRule::Linear { c }).expect("positive linear offset")
    }

    pub fn ceil_log(c: Nat) -> Self {
        BlockPartition::new(vec![], TailRule::CeilLog2 { c }).expect("ceil-log offset >= 2")
    }

    /// The dyadic partition `{0}, [1,2), [2,4), [4,8), ...`.
    pub fn dyadic() -> Self {
        BlockPartition::new(vec![1], TailRule::Exp2 { shift: 1 }).expect("valid dyadic layout")
    }

    pub fn prefix(&self) -> &[Nat] {
        &self.prefix
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// Size of block `n`.
    pub fn size(&self, n: Nat) -> Nat {
        if (n as usize) < self.prefix.len() {
            self.prefix[n as usize]
        } else {
            self.tail.size(n)
        }
    }

    /// First point of block `n`.
    pub fn start(&self, n: Nat) -> Nat {
        let p = self.prefix.len() as Nat;
        let mut acc: u128 = self.prefix.iter().take(n as usize).map(|&s| s as u128).sum();
        if n > p {
            acc += self.tail_sum(p, n);
        }
        u128_to_nat(acc)
    }

    /// Sum of tail-rule sizes over block indices `[from, to)`.
    fn tail_sum(&self, from: Nat, to: Nat) -> u128 {
        debug_assert!(from >= self.prefix.len() as Nat && from <= to);
        match self.tail {
            TailRule::Const { c } => (to - from) as u128 * c as u128,
            TailRule::Linear { c } => {
                let k = (to - from) as u128;
                let lo = (from + c) as u128;
                let hi = (to - 1 + c) as u128;
                k * (lo + hi) / 2
            }
            TailRule::CeilLog2 { c } => {
                // sum of ceil(log2(m + c)) for m in [from, to): group by value.
                let mut acc: u128 = 0;
                let mut x = from + c; // argument value
                let end = to + c;
                while x < end {
                    let v = ceil_log2(x);
                    // ceil_log2 is constant on (2^(v-1), 2^v]
                    let seg_end = if v == 0 { 2u128 } else { (1u128 << v) + 1 };
                    let seg_end = u128_to_nat(seg_end.min(end as u128));
                    acc += (seg_end - x) as u128 * v as u128;
                    x = seg_end;
                }
                acc
            }
            TailRule::Exp2 { shift } => {
                let s = shift as Nat;
                let mut acc: u128 = 0;
                let mut m = from;
                // saturated region contributes 1 each
                if m < s {
                    let upto = to.min(s);
                    acc += (upto - m) as u128;
                    m = upto;
                }
                if m < to {
                    // 2^(m-s) + ... + 2^(to-1-s)
                    let lo = m - s;
                    let hi = to - s;
                    acc += (1u128 << hi) - (1u128 << lo);
                }
                acc
            }
        }
    }

    /// End (exclusive) of block `n`.
    pub fn end(&self, n: Nat) -> Nat {
        self.start(n) + self.size(n)
    }

    /// Index of the block containing point `x`.
    pub fn block_of(&self, x: Nat) -> Nat {
        // galloping upper bound, then bisect on start()
        let mut hi: Nat = 1;
        while self.start(hi) <= x {
            hi = hi.checked_mul(2).expect("block index overflow");
        }
        let mut lo: Nat = hi / 2;
        // invariant: start(lo) <= x < start(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.start(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// True when block sizes tend to infinity.
    pub fn sizes_unbounded(&self) -> bool {
        self.tail.unbounded()
    }

    /// The eventual constant block size, if the tail rule is constant.
    pub fn bounded_tail(&self) -> Option<Nat> {
        match self.tail {
            TailRule::Const { c } => Some(c),
            _ => None,
        }
    }

    /// First block index governed by the tail rule.
    pub fn tail_start(&self) -> Nat {
        self.prefix.len() as Nat
    }

    /// Least block index `m >= from` with `size(m) >= want`, if sizes reach it.
    pub fn first_block_with_size(&self, from: Nat, want: Nat) -> Option<Nat> {
        for n in from..(self.prefix.len() as Nat).max(from) {
            if self.size(n) >= want {
                return Some(n);
            }
        }
        let t = self.tail_start().max(from);
        let hit = match self.tail {
            TailRule::Const { c } => (c >= want).then_some(t),
            TailRule::Linear { c } => Some(t.max(want.saturating_sub(c))),
            TailRule::CeilLog2 { c } => {
                // ceil(log2(n + c)) >= want  iff  n + c > 2^(want - 1)
                if want == 0 {
                    Some(t)
                } else {
                    assert!(want < 64, "size threshold out of range");
                    Some(t.max((1u64 << (want - 1)).saturating_sub(c) + 1))
                }
            }
            TailRule::Exp2 { shift } => Some(t.max(shift as Nat + ceil_log2(want.max(1)))),
        };
        hit
    }
}

fn u128_to_nat(x: u128) -> Nat {
    Nat::try_from(x).expect("block start exceeds u64")
}

impl fmt::Display for BlockPartition {
    /// Renders in the sizes-expression grammar, e.g. `const:2`, `n+1`,
    /// `log2+2`, `dyadic`, `[3,1];const:2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == BlockPartition::dyadic() {
            return write!(f, "dyadic");
        }
        if !self.prefix.is_empty() {
            write!(f, "[")?;
            for (i, s) in self.prefix.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "];")?;
        }
        match self.tail {
            TailRule::Const { c } => write!(f, "const:{c}"),
            TailRule::Linear { c } => write!(f, "n+{c}"),
            TailRule::CeilLog2 { c } => write!(f, "log2+{c}"),
            TailRule::Exp2 { shift } => write!(f, "pow2-{shift}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_layout() {
        let p = BlockPartition::constant(2);
        assert_eq!(p.start(0), 0);
        assert_eq!(p.start(3), 6);
        assert_eq!(p.size(7), 2);
        assert_eq!(p.block_of(4), 2);
        assert_eq!(p.block_of(5), 2);
        assert_eq!(p.block_of(6), 3);
    }

    #[test]
    fn linear_layout() {
        let p = BlockPartition::linear(1);
        // sizes 1,2,3,...; starts 0,1,3,6,10,...
        assert_eq!(p.start(4), 10);
        assert_eq!(p.block_of(9), 3);
        assert_eq!(p.block_of(10), 4);
    }

    #[test]
    fn ceil_log_sizes() {
        let p = BlockPartition::ceil_log(2);
        let sizes: Vec<Nat> = (0..7).map(|n| p.size(n)).collect();
        // ceil(log2(n+2)) for n = 0..6
        assert_eq!(sizes, vec![1, 2, 2, 3, 3, 3, 3]);
        let total: Nat = sizes.iter().sum();
        assert_eq!(p.start(7), total);
    }

    #[test]
    fn dyadic_layout() {
        let p = BlockPartition::dyadic();
        assert_eq!(
            (0..6).map(|n| p.size(n)).collect::<Vec<_>>(),
            vec![1, 1, 2, 4, 8, 16]
        );
        assert_eq!(p.start(3), 4);
        assert_eq!(p.start(4), 8);
        assert_eq!(p.block_of(0), 0);
        assert_eq!(p.block_of(7), 3);
        assert_eq!(p.block_of(8), 4);
    }

    #[test]
    fn prefix_then_tail() {
        let p = BlockPartition::new(vec![3, 1], TailRule::Const { c: 2 }).unwrap();
        assert_eq!(p.size(0), 3);
        assert_eq!(p.size(1), 1);
        assert_eq!(p.size(2), 2);
        assert_eq!(p.start(2), 4);
        assert_eq!(p.start(4), 8);
        assert_eq!(p.block_of(3), 1);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(BlockPartition::new(vec![0], TailRule::Const { c: 1 }).is_err());
        assert!(BlockPartition::new(vec![], TailRule::Const { c: 0 }).is_err());
        assert!(BlockPartition::new(vec![], TailRule::CeilLog2 { c: 1 }).is_err());
        assert!(BlockPartition::new(vec![1], TailRule::CeilLog2 { c: 1 }).is_ok());
    }

    #[test]
    fn block_of_inverts_start_on_samples() {
        for p in [
            BlockPartition::constant(3),
            BlockPartition::linear(2),
            BlockPartition::ceil_log(2),
            BlockPartition::dyadic(),
            BlockPartition::new(vec![5, 1, 1], TailRule::Linear { c: 1 }).unwrap(),
        ] {
            for x in 0..2000 {
                let b = p.block_of(x);
                assert!(p.start(b) <= x && x < p.end(b), "{p} at {x}");
            }
        }
    }
}
