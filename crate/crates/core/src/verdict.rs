//! Three-valued verdicts with certificate payloads.

use serde::{Deserialize, Serialize};

use crate::Nat;

/// Outcome of a bounded decision procedure.
///
/// `Proved` and `Refuted` carry certificates that a checker can re-verify
/// without trusting the code that produced them.  `Unknown` records the
/// horizon at which the search gave up; it is always a sound answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict<P, R> {
    Proved { certificate: P },
    Refuted { certificate: R },
    Unknown { horizon: Nat },
}

impl<P, R> Verdict<P, R> {
    pub fn proved(certificate: P) -> Self {
        Verdict::Proved { certificate }
    }

    pub fn refuted(certificate: R) -> Self {
        Verdict::Refuted { certificate }
    }

    pub fn unknown(horizon: Nat) -> Self {
        Verdict::Unknown { horizon }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn proof(&self) -> Option<&P> {
        match self {
            Verdict::Proved { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn refutation(&self) -> Option<&R> {
        match self {
            Verdict::Refuted { certificate } => Some(certificate),
            _ => None,
        }
    }

    /// Swap the roles of the two certificate arms (used when a property is
    /// decided through its dual).
    pub fn flip(self) -> Verdict<R, P> {
        match self {
            Verdict::Proved { certificate } => Verdict::Refuted { certificate },
            Verdict::Refuted { certificate } => Verdict::Proved { certificate },
            Verdict::Unknown { horizon } => Verdict::Unknown { horizon },
        }
    }

    pub fn map_proved<Q>(self, f: impl FnOnce(P) -> Q) -> Verdict<Q, R> {
        match self {
            Verdict::Proved { certificate } => Verdict::Proved {
                certificate: f(certificate),
            },
            Verdict::Refuted { certificate } => Verdict::Refuted { certificate },
            Verdict::Unknown { horizon } => Verdict::Unknown { horizon },
        }
    }

    pub fn map_refuted<Q>(self, f: impl FnOnce(R) -> Q) -> Verdict<P, Q> {
        match self {
            Verdict::Proved { certificate } => Verdict::Proved { certificate },
            Verdict::Refuted { certificate } => Verdict::Refuted {
                certificate: f(certificate),
            },
            Verdict::Unknown { horizon } => Verdict::Unknown { horizon },
        }
    }

    /// Collapse to a three-way tag, dropping certificates.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Proved { .. } => "proved",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}
