//! Textual expression grammar for the core value types.
//!
//! Each parser accepts exactly the language its type's `Display` produces,
//! plus a little sugar for the command line (`rows:first(t)` for the
//! rowwise table pinning the first `t` columns of every row).  Parsing and
//! printing round-trip bit-exactly, so expressions can travel through shell
//! commands and JSON reports without drift.
//!
//! Grammar sketch (whitespace free between tokens, spaces allowed after
//! separators):
//!
//! ```text
//! SET      := all | finite([N,…]) | cofinite(drop=[N,…])
//!           | truncated(mask=[N,…], n=N, tail=full|empty)
//!           | blocks(sizes=SIZES, rule=RULE)
//!           | union_blocks(sizes=SIZES, idx=SET)
//!           | block_image(sizes=SIZES, of=SET)
//!           | block_count(sizes=SIZES, of=SET, at_least=N[, below=N])
//!           | rows:from(N) | cols:from(N) | diag:upper | rows:in(SET)
//!           | rows:first(N) | rows:table(N=>SPEC; …; default=>SPEC)
//!           | and(SET; …) | or(SET; …) | not(SET)
//! RULE     := all | none | first(N) | all_but_first(N) | drop([N,…])
//! SPEC     := empty | cols[N,…] | from(N)
//! SIZES    := dyadic | [N,…];TAIL | TAIL
//! TAIL     := const:N | n+N | log2+N | pow2-N
//! FILTER   := frechet | product | generated(SET; …) | density(sizes=SIZES)
//!           | summable(WEIGHTS) | push(map=MAP; of=FILTER)
//!           | restrict(FILTER; to=SET)
//! MAP      := identity | block_index(sizes=SIZES) | pair_left
//! WEIGHTS  := unit | harmonic | halving
//! SEQ      := identity | const:N
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::convergence::SequencePresentation;
use crate::error::{Error, Result};
use crate::filters::{FilterPresentation, NatMap};
use crate::partition::{BlockPartition, TailRule};
use crate::sets::{BlockSelector, RowScheme, RowSpec, SetDescription};
use crate::weights::WeightRule;
use crate::Nat;

/// Parse a set expression.
pub fn parse_set(input: &str) -> Result<SetDescription> {
    Parser::run(input, Parser::set)
}

/// Parse a block-partition (sizes) expression.
pub fn parse_partition(input: &str) -> Result<BlockPartition> {
    Parser::run(input, Parser::partition)
}

/// Parse a filter-presentation expression.
pub fn parse_filter(input: &str) -> Result<FilterPresentation> {
    Parser::run(input, Parser::filter)
}

/// Parse a weight-rule name.
pub fn parse_weights(input: &str) -> Result<WeightRule> {
    Parser::run(input, Parser::weights)
}

/// Parse a sequence expression.
pub fn parse_sequence(input: &str) -> Result<SequencePresentation> {
    Parser::run(input, Parser::sequence)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn run<T>(input: &'a str, entry: impl FnOnce(&mut Parser<'a>) -> Result<T>) -> Result<T> {
        let mut p = Parser {
            bytes: input.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let value = entry(&mut p)?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            at: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    /// Consume a separator with optional surrounding whitespace.
    fn separator(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        self.eat(c)?;
        self.skip_ws();
        Ok(())
    }

    fn lower_ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Nat> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ascii")
            .parse::<Nat>()
            .map_err(|_| Error::Parse {
                at: start,
                msg: "number does not fit in 64 bits".into(),
            })
    }

    /// `[a,b,c]`, possibly empty.
    fn nat_list(&mut self) -> Result<Vec<Nat>> {
        self.eat(b'[')?;
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            self.skip_ws();
            out.push(self.number()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.error("expected ',' or ']' in a list")),
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let end = self.pos + kw.len();
        if self.bytes.len() >= end && &self.bytes[self.pos..end] == kw.as_bytes() {
            self.pos = end;
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    // -- sizes ---------------------------------------------------------

    fn partition(&mut self) -> Result<BlockPartition> {
        if self.peek() == Some(b'[') {
            let prefix = self.nat_list()?;
            self.separator(b';')?;
            let tail = self.tail_rule()?;
            return BlockPartition::new(prefix, tail);
        }
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "dyadic" => Ok(BlockPartition::dyadic()),
            "const" => {
                self.eat(b':')?;
                let c = self.number()?;
                BlockPartition::new(vec![], TailRule::Const { c })
            }
            "n" => {
                self.eat(b'+')?;
                let c = self.number()?;
                BlockPartition::new(vec![], TailRule::Linear { c })
            }
            "log2" => {
                self.eat(b'+')?;
                let c = self.number()?;
                BlockPartition::new(vec![], TailRule::CeilLog2 { c })
            }
            "pow2" => {
                self.eat(b'-')?;
                let shift = self.number()?;
                let shift = u32::try_from(shift).map_err(|_| Error::Parse {
                    at,
                    msg: "pow2 shift is too large".into(),
                })?;
                BlockPartition::new(vec![], TailRule::Exp2 { shift })
            }
            other => Err(Error::Parse {
                at,
                msg: format!(
                    "unknown size rule '{other}' (expected dyadic, const:c, n+c, \
                     log2+c or pow2-s)"
                ),
            }),
        }
    }

    fn tail_rule(&mut self) -> Result<TailRule> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "const" => {
                self.eat(b':')?;
                Ok(TailRule::Const { c: self.number()? })
            }
            "n" => {
                self.eat(b'+')?;
                Ok(TailRule::Linear { c: self.number()? })
            }
            "log2" => {
                self.eat(b'+')?;
                Ok(TailRule::CeilLog2 { c: self.number()? })
            }
            "pow2" => {
                self.eat(b'-')?;
                let shift = self.number()?;
                let shift = u32::try_from(shift).map_err(|_| Error::Parse {
                    at,
                    msg: "pow2 shift is too large".into(),
                })?;
                Ok(TailRule::Exp2 { shift })
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown tail rule '{other}'"),
            }),
        }
    }

    // -- sets ----------------------------------------------------------

    fn set(&mut self) -> Result<SetDescription> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "all" => Ok(SetDescription::everything()),
            "finite" => {
                self.eat(b'(')?;
                let xs = self.nat_list()?;
                self.eat(b')')?;
                Ok(SetDescription::finite(xs))
            }
            "cofinite" => {
                self.eat(b'(')?;
                self.keyword("drop=")?;
                let xs = self.nat_list()?;
                self.eat(b')')?;
                Ok(SetDescription::cofinite(xs))
            }
            "truncated" => {
                self.eat(b'(')?;
                self.keyword("mask=")?;
                let mask: BTreeSet<Nat> = self.nat_list()?.into_iter().collect();
                self.separator(b',')?;
                self.keyword("n=")?;
                let cutoff = self.number()?;
                self.separator(b',')?;
                self.keyword("tail=")?;
                let word = self.lower_ident();
                let tail_full = match word.as_str() {
                    "full" => true,
                    "empty" => false,
                    _ => return Err(self.error("expected tail=full or tail=empty")),
                };
                self.eat(b')')?;
                Ok(SetDescription::Truncated {
                    members: mask,
                    cutoff,
                    tail_full,
                })
            }
            "blocks" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.separator(b',')?;
                self.keyword("rule=")?;
                let selector = self.block_selector()?;
                self.eat(b')')?;
                Ok(SetDescription::blocks(partition, selector))
            }
            "union_blocks" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.separator(b',')?;
                self.keyword("idx=")?;
                let indices = self.set()?;
                self.eat(b')')?;
                Ok(SetDescription::union_of_blocks(partition, indices))
            }
            "block_image" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.separator(b',')?;
                self.keyword("of=")?;
                let inner = self.set()?;
                self.eat(b')')?;
                Ok(SetDescription::block_image(partition, inner))
            }
            "block_count" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.separator(b',')?;
                self.keyword("of=")?;
                let inner = self.set()?;
                self.separator(b',')?;
                self.keyword("at_least=")?;
                let at_least = self.number()?;
                let below = if self.peek() == Some(b',') {
                    self.separator(b',')?;
                    self.keyword("below=")?;
                    Some(self.number()?)
                } else {
                    None
                };
                self.eat(b')')?;
                Ok(SetDescription::block_count(partition, inner, at_least, below))
            }
            "rows" => {
                self.eat(b':')?;
                self.row_scheme()
            }
            "cols" => {
                self.eat(b':')?;
                self.keyword("from")?;
                self.eat(b'(')?;
                let c = self.number()?;
                self.eat(b')')?;
                Ok(SetDescription::pairs(RowScheme::ColsFrom { c }))
            }
            "diag" => {
                self.eat(b':')?;
                self.keyword("upper")?;
                Ok(SetDescription::pairs(RowScheme::UpperDiagonal))
            }
            "and" => {
                self.eat(b'(')?;
                let parts = self.set_list()?;
                self.eat(b')')?;
                Ok(SetDescription::and(parts))
            }
            "or" => {
                self.eat(b'(')?;
                let parts = self.set_list()?;
                self.eat(b')')?;
                Ok(SetDescription::or(parts))
            }
            "not" => {
                self.eat(b'(')?;
                let inner = self.set()?;
                self.eat(b')')?;
                Ok(SetDescription::not(inner))
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown set expression '{other}'"),
            }),
        }
    }

    fn set_list(&mut self) -> Result<Vec<SetDescription>> {
        let mut parts = vec![self.set()?];
        while self.peek() == Some(b';') {
            self.separator(b';')?;
            parts.push(self.set()?);
        }
        Ok(parts)
    }

    fn block_selector(&mut self) -> Result<BlockSelector> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "all" => Ok(BlockSelector::All),
            "none" => Ok(BlockSelector::None),
            "first" => {
                self.eat(b'(')?;
                let t = self.number()?;
                self.eat(b')')?;
                Ok(BlockSelector::First { t })
            }
            "all_but_first" => {
                self.eat(b'(')?;
                let t = self.number()?;
                self.eat(b')')?;
                Ok(BlockSelector::AllButFirst { t })
            }
            "drop" => {
                self.eat(b'(')?;
                let removed = self.nat_list()?;
                self.eat(b')')?;
                Ok(BlockSelector::MarkedRemoved {
                    removed: removed.into_iter().collect(),
                })
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown block rule '{other}'"),
            }),
        }
    }

    /// After `rows:` — the rowwise pair schemes.
    fn row_scheme(&mut self) -> Result<SetDescription> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "from" => {
                self.eat(b'(')?;
                let k = self.number()?;
                self.eat(b')')?;
                Ok(SetDescription::pairs(RowScheme::RowsFrom { k }))
            }
            "in" => {
                self.eat(b'(')?;
                let rows = self.set()?;
                self.eat(b')')?;
                Ok(SetDescription::pairs(RowScheme::RowsIn {
                    rows: Box::new(rows),
                }))
            }
            "first" => {
                // sugar: the first `t` columns of every row
                self.eat(b'(')?;
                let t = self.number()?;
                self.eat(b')')?;
                Ok(SetDescription::pairs(RowScheme::Table {
                    rows: BTreeMap::new(),
                    default: RowSpec::Finite {
                        cols: (0..t).collect(),
                    },
                }))
            }
            "table" => {
                self.eat(b'(')?;
                let mut rows = BTreeMap::new();
                loop {
                    self.skip_ws();
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        let r = self.number()?;
                        self.keyword("=>")?;
                        let spec = self.row_spec()?;
                        rows.insert(r, spec);
                        self.separator(b';')?;
                    } else {
                        break;
                    }
                }
                self.keyword("default=>")?;
                let default = self.row_spec()?;
                self.eat(b')')?;
                Ok(SetDescription::pairs(RowScheme::Table { rows, default }))
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown row scheme 'rows:{other}'"),
            }),
        }
    }

    fn row_spec(&mut self) -> Result<RowSpec> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "empty" => Ok(RowSpec::Empty),
            "cols" => {
                let cols = self.nat_list()?;
                Ok(RowSpec::Finite {
                    cols: cols.into_iter().collect(),
                })
            }
            "from" => {
                self.eat(b'(')?;
                let c = self.number()?;
                self.eat(b')')?;
                Ok(RowSpec::From { c })
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown row spec '{other}'"),
            }),
        }
    }

    // -- filters -------------------------------------------------------

    fn filter(&mut self) -> Result<FilterPresentation> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "frechet" => Ok(FilterPresentation::Cofinite),
            "product" => Ok(FilterPresentation::PairProduct),
            "generated" => {
                self.eat(b'(')?;
                let base = self.set_list()?;
                self.eat(b')')?;
                Ok(FilterPresentation::Generated { base })
            }
            "density" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.eat(b')')?;
                Ok(FilterPresentation::BlockDensity { partition })
            }
            "summable" => {
                self.eat(b'(')?;
                let weights = self.weights()?;
                self.eat(b')')?;
                Ok(FilterPresentation::Summable { weights })
            }
            "push" => {
                self.eat(b'(')?;
                self.keyword("map=")?;
                let map = self.nat_map()?;
                self.separator(b';')?;
                self.keyword("of=")?;
                let inner = self.filter()?;
                self.eat(b')')?;
                Ok(FilterPresentation::Pushforward {
                    map,
                    inner: Box::new(inner),
                })
            }
            "restrict" => {
                self.eat(b'(')?;
                let inner = self.filter()?;
                self.separator(b';')?;
                self.keyword("to=")?;
                let within = self.set()?;
                self.eat(b')')?;
                Ok(FilterPresentation::Restriction {
                    inner: Box::new(inner),
                    within,
                })
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown filter '{other}'"),
            }),
        }
    }

    fn nat_map(&mut self) -> Result<NatMap> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "identity" => Ok(NatMap::Identity),
            "pair_left" => Ok(NatMap::PairLeft),
            "block_index" => {
                self.eat(b'(')?;
                self.keyword("sizes=")?;
                let partition = self.partition()?;
                self.eat(b')')?;
                Ok(NatMap::BlockIndex { partition })
            }
            other => Err(Error::Parse {
                at,
                msg: format!("unknown map '{other}'"),
            }),
        }
    }

    fn weights(&mut self) -> Result<WeightRule> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "unit" => Ok(WeightRule::Unit),
            "harmonic" => Ok(WeightRule::Harmonic),
            "halving" => Ok(WeightRule::Halving),
            other => Err(Error::Parse {
                at,
                msg: format!("unknown weight rule '{other}' (expected unit, harmonic or halving)"),
            }),
        }
    }

    // -- sequences -----------------------------------------------------

    fn sequence(&mut self) -> Result<SequencePresentation> {
        let at = self.pos;
        let word = self.lower_ident();
        match word.as_str() {
            "identity" => Ok(SequencePresentation::Identity),
            "const" => {
                self.eat(b':')?;
                let value = self.number()?;
                Ok(SequencePresentation::Constant { value })
            }
            "materialized" => Err(Error::Parse {
                at,
                msg: "materialized sequences cannot be written as expressions; \
                      build them through the construction commands"
                    .into(),
            }),
            other => Err(Error::Parse {
                at,
                msg: format!("unknown sequence '{other}' (expected identity or const:v)"),
            }),
        }
    }
}
