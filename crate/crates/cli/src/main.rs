//! `filterlab` — command-line front end for the filter experiments.
//!
//! One experiment per invocation.  Every command prints a plain-text
//! summary by default and a JSON report with `--json`; exit codes follow
//! the verdict of the experiment: 0 for proved/success, 1 for refuted,
//! 2 for unknown (a horizon ran out), 3 for usage errors.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use filterlab_core::analysis::{cardinality, Card};
use filterlab_core::convergence::{
    converges_to_infinity, convergent_subsequence, meager_convergent_sequence,
    refute_finite_network, FilterSpace, NetworkFamily, SequencePresentation,
};
use filterlab_core::cpgame::{
    decomposition_level, play_game, verify_transcript, Adversary, ContinuousWitness,
    GameTranscript,
};
use filterlab_core::error::Error;
use filterlab_core::expr::{parse_filter, parse_partition, parse_sequence, parse_set, parse_weights};
use filterlab_core::filters::Filter;
use filterlab_core::measure::{
    measure_with_precision, nullity, partial_product, simulate_hitting,
    verify_null_certificate, verify_positive_certificate,
};
use filterlab_core::oracle::{
    oracle_late_agreement, oracle_measure_sizes, oracle_pseudointersection,
    oracle_validates_pseudointersection, FunctionTable, TailConvention, TruncatedSet,
};
use filterlab_core::pseudo::{
    bounded_block_pseudointersection, product_chain_witness, segment_pseudointersection,
    verify_pseudointersection, BoundedBlockInstance, CandidateOutcome,
};
use filterlab_core::sets::SetDescription;
use filterlab_core::{Nat, Verdict, DEFAULT_HORIZON};

// ---------------------------------------------------------------------------
// command tree
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "filterlab",
    version,
    about = "Desk-scale experiments with filters on the naturals",
    after_help = "Expression grammars are documented in docs/grammar.md; \
                  FILTERLAB_HORIZON sets the default search horizon."
)]
struct Cli {
    /// Emit a JSON report instead of the plain-text summary.
    #[arg(long, global = true)]
    json: bool,

    /// Search horizon for bounded scans (overrides FILTERLAB_HORIZON).
    #[arg(long, global = true)]
    horizon: Option<Nat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Membership, counting and classification for set expressions.
    #[command(subcommand)]
    Sets(SetsCmd),
    /// Filter membership, positivity and meagerness.
    #[command(subcommand)]
    Filters(FiltersCmd),
    /// Pseudointersection constructions and the product-chain refuter.
    #[command(subcommand)]
    Pseudo(PseudoCmd),
    /// Exact and simulated measures of block-hitting families.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Convergent sequences: construction, checking, subsequences.
    #[command(subcommand)]
    Converge(ConvergeCmd),
    /// The nowhere-density avoidance game on the function space.
    #[command(subcommand)]
    Cpgame(CpgameCmd),
    /// Independent brute-force oracles on small windows.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum SetsCmd {
    /// Decide whether a point belongs to a set.
    Member {
        #[arg(long)]
        set: String,
        #[arg(long)]
        point: Nat,
    },
    /// Count the members of a set inside one block of a partition.
    Count {
        #[arg(long)]
        set: String,
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        block: Nat,
    },
    /// Classify a set as finite, cofinite, or infinite-coinfinite.
    Card {
        #[arg(long)]
        set: String,
    },
}

#[derive(Subcommand)]
enum FiltersCmd {
    /// Decide membership of a set in a filter, with certificate.
    Member {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        set: String,
    },
    /// Decide co-ideal positivity of a set against a filter.
    Positive {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        set: String,
    },
    /// Produce and re-check a meagerness witness for a filter.
    Meager {
        #[arg(long)]
        filter: String,
    },
    /// Print a set of the filter's canonical decreasing chain.
    Generator {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        index: Nat,
    },
}

#[derive(Subcommand)]
enum PseudoCmd {
    /// Pseudointersection through blocks of bounded size, by recursion on
    /// the bound.
    Bounded {
        /// Block partition of the instance.
        #[arg(long)]
        sizes: String,
        /// Set of block indices the instance runs over (default: all).
        #[arg(long)]
        indices: Option<String>,
        /// Carrier set intersected into every block (default: all).
        #[arg(long)]
        carrier: Option<String>,
        /// Generator sets (repeatable).
        #[arg(long = "generator", required = true)]
        generators: Vec<String>,
    },
    /// Pseudointersection of a decreasing chain in a summable filter, one
    /// mass-crossing segment per chain element.
    Segments {
        /// Weight rule of the summable filter (unit, harmonic, halving).
        #[arg(long)]
        weights: String,
        /// Chain elements, decreasing (repeatable).
        #[arg(long = "chain", required = true)]
        chain: Vec<String>,
        /// Cap on segment endpoints (default: the horizon).
        #[arg(long)]
        cap: Option<Nat>,
    },
    /// Refute candidate pseudointersections of the canonical chain in the
    /// pair-product filter by exhibiting a disjoint member.
    ProductChain {
        /// Candidate set over the pair universe.
        #[arg(long)]
        candidate: String,
        /// How many chain sets to check almost-containment against.
        #[arg(long, default_value_t = 8)]
        depth: Nat,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Exact partial product of the block-hitting probabilities.
    Exact {
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        from: Nat,
        #[arg(long)]
        factors: Nat,
    },
    /// Two-sided enclosure of the infinite product, to a requested width.
    Enclose {
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        from: Nat,
        /// Target width 2^-bits.
        #[arg(long, default_value_t = 30)]
        precision_bits: u64,
        #[arg(long, default_value_t = 200)]
        max_factors: Nat,
    },
    /// Decide whether the block-hitting family is null, with certificate.
    NullCert {
        #[arg(long)]
        sizes: String,
        /// Factor counts at which to exhibit partial products (repeatable).
        #[arg(long = "checkpoint")]
        checkpoints: Vec<Nat>,
    },
    /// Monte-Carlo estimate of the hitting probability, cross-checked
    /// against the exact partial product.
    Simulate {
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        from: Nat,
        #[arg(long)]
        factors: Nat,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ConvergeCmd {
    /// Build a sequence converging to infinity along the filter induced by
    /// a family of infinite sets, hitting every set inside every block.
    Build {
        /// Block partition (sizes must grow without bound).
        #[arg(long)]
        sizes: String,
        /// Network sets (repeatable).
        #[arg(long = "network", required = true)]
        networks: Vec<String>,
        /// Filter presentation of the ambient space.
        #[arg(long, default_value = "frechet")]
        filter: String,
        /// How many basic neighborhoods each network set must be placed in.
        #[arg(long)]
        covered: Option<Nat>,
    },
    /// Check that a sequence converges to infinity along a filter.
    Check {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        seq: String,
        /// How many basic neighborhoods to check.
        #[arg(long, default_value_t = 8)]
        budget: Nat,
    },
    /// Extract a convergent subsequence index set through the filter's
    /// meagerness witness (needs bounded witness intervals).
    Subseq {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        seq: String,
        /// How many basic neighborhoods to check the extracted set against.
        #[arg(long, default_value_t = 8)]
        budget: Nat,
    },
    /// Show that finitely many infinite sets never form a network at
    /// infinity: remove one point per set, density-certified.
    RefuteNetwork {
        /// Candidate infinite sets (repeatable).
        #[arg(long = "candidate", required = true)]
        candidates: Vec<String>,
    },
}

#[derive(Subcommand)]
enum CpgameCmd {
    /// Play the avoidance game against a seeded adversary and store the
    /// transcript.
    Play {
        #[arg(long)]
        rounds: Nat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "n+1")]
        sizes: String,
        #[arg(long, default_value = "frechet")]
        filter: String,
        /// Write the transcript JSON here (stdout summary either way).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Re-verify a stored transcript from scratch, including a replay.
    Verify {
        /// Transcript file produced by `cpgame play`.
        transcript: std::path::PathBuf,
    },
    /// Find the decomposition level of a continuous function given in tail
    /// normal form.
    Level {
        #[arg(long, default_value = "frechet")]
        filter: String,
        #[arg(long, default_value = "n+1")]
        sizes: String,
        /// Value at the limit point.
        #[arg(long, default_value_t = 0)]
        limit_bit: u8,
        /// Exceptional values `index=bit` (repeatable).
        #[arg(long = "exception")]
        exceptions: Vec<String>,
        /// Set where the function takes the limit bit (less exceptions).
        #[arg(long, default_value = "all")]
        tail: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact hitting probability by enumerating all colourings of listed
    /// blocks (at most 24 points total).
    Measure {
        /// Comma-separated block sizes, e.g. `1,2,3`.
        #[arg(long)]
        sizes: String,
    },
    /// Enumerate all valid pseudointersection candidates over listed
    /// blocks (at most 16 points total).
    Pseudo {
        /// Generator set expressions (repeatable); membership is read off
        /// below the window.
        #[arg(long = "generator", required = true)]
        generators: Vec<String>,
        /// Comma-separated block sizes laid out from 0, e.g. `2,2,2`.
        #[arg(long)]
        block_sizes: String,
        /// A candidate persists if it meets one of this many final blocks.
        #[arg(long, default_value_t = 1)]
        persist: usize,
        /// Check just this candidate instead of enumerating everything.
        #[arg(long)]
        candidate: Option<String>,
    },
    /// Direct scan of the late-block agreement condition for a bit table.
    Agreement {
        /// Function values below the window as a bit string, e.g. `0110`.
        #[arg(long)]
        values: String,
        /// Constant value past the window.
        #[arg(long, default_value_t = 1)]
        tail_value: u8,
        /// Value at the limit point.
        #[arg(long, default_value_t = 1)]
        limit: u8,
        /// Agreement required from this block on.
        #[arg(long)]
        level: Nat,
        /// Comma-separated block sizes laid out from 0.
        #[arg(long)]
        block_sizes: String,
    },
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Proved,
    Refuted,
    Unknown,
    Done,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Proved | Status::Done => 0,
            Status::Refuted => 1,
            Status::Unknown => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Refuted => "refuted",
            Status::Unknown => "unknown",
            Status::Done => "done",
        }
    }
}

impl<P, R> From<&Verdict<P, R>> for Status {
    fn from(v: &Verdict<P, R>) -> Status {
        match v {
            Verdict::Proved { .. } => Status::Proved,
            Verdict::Refuted { .. } => Status::Refuted,
            Verdict::Unknown { .. } => Status::Unknown,
        }
    }
}

/// What a handler produces: a status (deciding the exit code), a JSON
/// payload, and human-readable summary lines.
struct Outcome {
    status: Status,
    payload: Value,
    lines: Vec<String>,
}

impl Outcome {
    fn new(status: Status, payload: Value) -> Outcome {
        Outcome {
            status,
            payload,
            lines: Vec::new(),
        }
    }

    fn line(mut self, s: impl Into<String>) -> Outcome {
        self.lines.push(s.into());
        self
    }
}

#[derive(Serialize)]
struct ExperimentReport {
    schema_version: u32,
    tool_version: &'static str,
    command: Vec<String>,
    horizon: Nat,
    seed: Option<u64>,
    status: &'static str,
    exit_code: u8,
    payload: Value,
    /// Wall-clock milliseconds; excluded from reproducibility guarantees.
    elapsed_ms: u128,
}

fn verdict_value<P: Serialize, R: Serialize>(v: &Verdict<P, R>) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

fn card_value(c: &Card) -> Value {
    match c {
        Card::Finite { bound } => json!({"class": "finite", "bound": bound}),
        Card::Cofinite { from } => json!({"class": "cofinite", "from": from}),
        Card::BiInfinite { members, complement } => json!({
            "class": "bi_infinite",
            "members": serde_json::to_value(members).expect("certificates serialize"),
            "complement": serde_json::to_value(complement).expect("certificates serialize"),
        }),
        Card::Unknown => json!({"class": "unknown"}),
    }
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version displays are successes; clap would exit 2 on
            // real usage errors, but the contract reserves 3 for those
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let horizon = cli
        .horizon
        .or_else(|| {
            std::env::var("FILTERLAB_HORIZON")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_HORIZON);

    let started = Instant::now();
    let seed = seed_of(&cli.command);
    match dispatch(&cli.command, horizon) {
        Ok(outcome) => {
            let code = outcome.status.exit_code();
            let mut stdout = std::io::stdout().lock();
            let written: std::io::Result<()> = if cli.json {
                let report = ExperimentReport {
                    schema_version: 1,
                    tool_version: env!("CARGO_PKG_VERSION"),
                    command: argv,
                    horizon,
                    seed,
                    status: outcome.status.name(),
                    exit_code: code,
                    payload: outcome.payload,
                    elapsed_ms: started.elapsed().as_millis(),
                };
                serde_json::to_writer_pretty(&mut stdout, &report)
                    .map_err(std::io::Error::from)
                    .and_then(|()| writeln!(stdout))
            } else {
                writeln!(stdout, "status: {}", outcome.status.name()).and_then(|()| {
                    outcome
                        .lines
                        .iter()
                        .try_for_each(|l| writeln!(stdout, "{l}"))
                })
            };
            match written {
                // a closed pipe means the reader has what it wanted
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: cannot write the report: {e}");
                    ExitCode::from(3)
                }
                _ => ExitCode::from(code),
            }
        }
        Err(e) => {
            let code = match &e {
                Error::Exhausted { .. } => 2,
                _ => 3,
            };
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Measure(MeasureCmd::Simulate { seed, .. }) => Some(*seed),
        Command::Cpgame(CpgameCmd::Play { seed, .. }) => Some(*seed),
        _ => None,
    }
}

fn dispatch(cmd: &Command, horizon: Nat) -> Result<Outcome, Error> {
    match cmd {
        Command::Sets(c) => run_sets(c),
        Command::Filters(c) => run_filters(c, horizon),
        Command::Pseudo(c) => run_pseudo(c, horizon),
        Command::Measure(c) => run_measure(c),
        Command::Converge(c) => run_converge(c, horizon),
        Command::Cpgame(c) => run_cpgame(c, horizon),
        Command::Oracle(c) => run_oracle(c),
    }
}

// ---------------------------------------------------------------------------
// handlers
// ---------------------------------------------------------------------------

fn run_sets(cmd: &SetsCmd) -> Result<Outcome, Error> {
    match cmd {
        SetsCmd::Member { set, point } => {
            let s = parse_set(set)?;
            let inside = s.member(*point);
            Ok(Outcome::new(
                Status::Done,
                json!({"set": s.to_string(), "point": point, "member": inside}),
            )
            .line(format!("{point} ∈ {s}: {inside}")))
        }
        SetsCmd::Count { set, sizes, block } => {
            let s = parse_set(set)?;
            let p = parse_partition(sizes)?;
            let count = s.count_in_block(&p, *block);
            Ok(Outcome::new(
                Status::Done,
                json!({
                    "set": s.to_string(),
                    "sizes": p.to_string(),
                    "block": block,
                    "count": count,
                    "block_size": p.size(*block),
                }),
            )
            .line(format!(
                "|A ∩ block {block}| = {count} (block size {})",
                p.size(*block)
            )))
        }
        SetsCmd::Card { set } => {
            let s = parse_set(set)?;
            let card = cardinality(&s);
            let status = match card {
                Card::Unknown => Status::Unknown,
                _ => Status::Done,
            };
            let line = match &card {
                Card::Finite { bound } => format!("finite: all members lie below {bound}"),
                Card::Cofinite { from } => format!("cofinite: contains [{from}, ∞)"),
                Card::BiInfinite { .. } => {
                    "infinite with infinite complement (certificates attached)".into()
                }
                Card::Unknown => "classification unknown".into(),
            };
            Ok(Outcome::new(status, card_value(&card)).line(line))
        }
    }
}

fn run_filters(cmd: &FiltersCmd, horizon: Nat) -> Result<Outcome, Error> {
    match cmd {
        FiltersCmd::Member { filter, set } => {
            let f = Filter::new(parse_filter(filter)?)?;
            let s = parse_set(set)?;
            let v = f.member(&s)?;
            let status = Status::from(&v);
            Ok(Outcome::new(status, verdict_value(&v)).line(match status {
                Status::Proved => format!("{s} belongs to the filter"),
                Status::Refuted => format!("{s} falls outside the filter"),
                _ => format!("membership of {s} undecided within the horizon"),
            }))
        }
        FiltersCmd::Positive { filter, set } => {
            let f = Filter::new(parse_filter(filter)?)?;
            let s = parse_set(set)?;
            let v = f.coideal_member(&s)?;
            let status = Status::from(&v);
            Ok(Outcome::new(status, verdict_value(&v)).line(match status {
                Status::Proved => format!("{s} meets every member of the filter"),
                Status::Refuted => format!("{s} misses some member of the filter"),
                _ => format!("positivity of {s} undecided within the horizon"),
            }))
        }
        FiltersCmd::Meager { filter } => {
            let f = Filter::new(parse_filter(filter)?)?;
            let v = f.meagerness_witness(horizon);
            let status = Status::from(&v);
            let mut out = Outcome::new(status, verdict_value(&v));
            if let Verdict::Proved { certificate } = &v {
                out = out.line(format!(
                    "meager: every member meets all witness intervals from some \
                     index on (intervals {})",
                    certificate.intervals
                ));
            } else {
                out = out.line("no meagerness witness produced".to_string());
            }
            Ok(out)
        }
        FiltersCmd::Generator { filter, index } => {
            let f = Filter::new(parse_filter(filter)?)?;
            let g = f.generator(*index)?;
            Ok(Outcome::new(
                Status::Done,
                json!({"index": index, "generator": g.to_string()}),
            )
            .line(format!("chain set {index}: {g}")))
        }
    }
}

fn run_pseudo(cmd: &PseudoCmd, horizon: Nat) -> Result<Outcome, Error> {
    match cmd {
        PseudoCmd::Bounded {
            sizes,
            indices,
            carrier,
            generators,
        } => {
            let p = parse_partition(sizes)?;
            let idx = match indices {
                Some(s) => parse_set(s)?,
                None => SetDescription::everything(),
            };
            let car = match carrier {
                Some(s) => parse_set(s)?,
                None => SetDescription::everything(),
            };
            let gens = generators
                .iter()
                .map(|g| parse_set(g))
                .collect::<Result<Vec<_>, _>>()?;
            let inst = BoundedBlockInstance::new(p, idx, car, gens)?;
            let out = bounded_block_pseudointersection(&inst)?;
            let recheck = verify_pseudointersection(
                &out.certificate,
                inst.generators(),
                horizon,
            );
            let status = match &recheck {
                Verdict::Proved { .. } => Status::Proved,
                Verdict::Refuted { .. } => Status::Refuted,
                Verdict::Unknown { .. } => Status::Unknown,
            };
            Ok(Outcome::new(
                status,
                json!({
                    "instance_bound": inst.bound(),
                    "depth": out.depth(),
                    "result": out.certificate.set.to_string(),
                    "certificate": serde_json::to_value(&out).expect("output serializes"),
                    "recheck": verdict_value(&recheck),
                }),
            )
            .line(format!(
                "pseudointersection: {} (bound {}, recursion depth {})",
                out.certificate.set,
                inst.bound(),
                out.depth()
            ))
            .line(format!(
                "exceptions per generator: {:?}",
                out.certificate.exceptions
            )))
        }
        PseudoCmd::Segments {
            weights,
            chain,
            cap,
        } => {
            let w = parse_weights(weights)?;
            let chain = chain
                .iter()
                .map(|c| parse_set(c))
                .collect::<Result<Vec<_>, _>>()?;
            let out = segment_pseudointersection(w, &chain, cap.unwrap_or(horizon))?;
            Ok(Outcome::new(
                Status::Proved,
                serde_json::to_value(&out).expect("output serializes"),
            )
            .line(format!("segment cut points: {:?}", out.cut_points))
            .line(format!(
                "pseudointersection: {}",
                out.certificate.set
            )))
        }
        PseudoCmd::ProductChain { candidate, depth } => {
            let cand = parse_set(candidate)?;
            let refuter = product_chain_witness();
            let outcome = refuter.refute(&cand, *depth)?;
            let (status, line) = match &outcome {
                CandidateOutcome::Blocked(b) => (
                    Status::Proved,
                    format!(
                        "candidate blocked: the filter member {} is disjoint from it",
                        b.blocking
                    ),
                ),
                CandidateOutcome::FailsChain { k } => (
                    Status::Refuted,
                    format!(
                        "candidate rejected: infinitely many points fall outside \
                         chain set {k}"
                    ),
                ),
                CandidateOutcome::Finite => {
                    (Status::Refuted, "candidate rejected: it is finite".into())
                }
            };
            Ok(Outcome::new(
                status,
                serde_json::to_value(&outcome).expect("outcome serializes"),
            )
            .line(line))
        }
    }
}

fn run_measure(cmd: &MeasureCmd) -> Result<Outcome, Error> {
    match cmd {
        MeasureCmd::Exact {
            sizes,
            from,
            factors,
        } => {
            let p = parse_partition(sizes)?;
            let value = partial_product(&p, *from, *factors);
            Ok(Outcome::new(
                Status::Done,
                json!({
                    "sizes": p.to_string(),
                    "from": from,
                    "factors": factors,
                    "value": value.to_string(),
                    "value_f64": value.to_f64(),
                }),
            )
            .line(format!(
                "∏ over blocks [{from}, {}) of (1 - 2^-size) = {value}",
                from + factors
            )))
        }
        MeasureCmd::Enclose {
            sizes,
            from,
            precision_bits,
            max_factors,
        } => {
            let p = parse_partition(sizes)?;
            match measure_with_precision(&p, *from, *precision_bits, *max_factors) {
                Some(report) => {
                    let e = &report.enclosure;
                    Ok(Outcome::new(
                        Status::Proved,
                        serde_json::to_value(&report).expect("report serializes"),
                    )
                    .line(format!(
                        "measure ∈ [{}, {}] after {} factors (width {:.3e})",
                        e.lower,
                        e.upper,
                        e.factors,
                        e.width_f64()
                    )))
                }
                None => Ok(Outcome::new(
                    Status::Unknown,
                    json!({
                        "sizes": p.to_string(),
                        "requested_bits": precision_bits,
                        "max_factors": max_factors,
                    }),
                )
                .line(
                    "no enclosure at the requested width: the tail bound does \
                     not converge or needs more factors",
                )),
            }
        }
        MeasureCmd::NullCert { sizes, checkpoints } => {
            let p = parse_partition(sizes)?;
            let default_checkpoints = [8, 16, 32, 64];
            let cps: &[Nat] = if checkpoints.is_empty() {
                &default_checkpoints
            } else {
                checkpoints
            };
            let v = nullity(&p, cps);
            let status = Status::from(&v);
            let verified = match &v {
                Verdict::Proved { certificate } => verify_null_certificate(&p, certificate),
                Verdict::Refuted { certificate } => {
                    verify_positive_certificate(&p, certificate)
                }
                Verdict::Unknown { .. } => false,
            };
            let mut out = Outcome::new(
                status,
                json!({
                    "sizes": p.to_string(),
                    "verdict": verdict_value(&v),
                    "reverified": verified,
                }),
            );
            match &v {
                Verdict::Proved { certificate } => {
                    out = out.line("the block-hitting family is null".to_string());
                    for cp in &certificate.checkpoints {
                        out = out.line(format!(
                            "  partial product after {} factors: {} ≈ {:.6}",
                            cp.factors,
                            cp.product,
                            cp.product.to_f64()
                        ));
                    }
                }
                Verdict::Refuted { certificate } => {
                    out = out.line(format!(
                        "the family has positive measure: at least {}",
                        certificate.lower_bound
                    ));
                }
                Verdict::Unknown { .. } => {
                    out = out.line("nullity undecided".to_string());
                }
            }
            out = out.line(format!("certificate re-verified: {verified}"));
            if !verified && status != Status::Unknown {
                return Ok(Outcome::new(Status::Unknown, out.payload)
                    .line("certificate failed re-verification".to_string()));
            }
            Ok(out)
        }
        MeasureCmd::Simulate {
            sizes,
            from,
            factors,
            samples,
            seed,
        } => {
            let p = parse_partition(sizes)?;
            let report = simulate_hitting(&p, *from, *factors, *samples, *seed);
            let exact = partial_product(&p, *from, *factors);
            let delta = (report.estimate - exact.to_f64()).abs();
            let consistent = delta <= report.four_sigma;
            Ok(Outcome::new(
                Status::Done,
                json!({
                    "simulation": serde_json::to_value(&report).expect("report serializes"),
                    "exact": exact.to_string(),
                    "exact_f64": exact.to_f64(),
                    "abs_delta": delta,
                    "within_four_sigma": consistent,
                }),
            )
            .line(format!(
                "estimate {:.6} vs exact {:.6} (|Δ| = {:.2e}, 4σ = {:.2e}, \
                 within: {consistent})",
                report.estimate,
                exact.to_f64(),
                delta,
                report.four_sigma
            )))
        }
    }
}

fn run_converge(cmd: &ConvergeCmd, horizon: Nat) -> Result<Outcome, Error> {
    match cmd {
        ConvergeCmd::Build {
            sizes,
            networks,
            filter,
            covered,
        } => {
            let p = parse_partition(sizes)?;
            let space = FilterSpace::new(parse_filter(filter)?)?;
            let sets = networks
                .iter()
                .map(|n| parse_set(n))
                .collect::<Result<Vec<_>, _>>()?;
            let covered = covered.unwrap_or(sets.len() as Nat);
            let family = NetworkFamily::new(space, sets, covered)?;
            let report = meager_convergent_sequence(&family, &p, horizon)?;
            let status = Status::from(&report.convergence);
            let prefix: Vec<Nat> = (0..report.materialized.min(24))
                .filter_map(|k| report.sequence.value(k))
                .collect();
            Ok(Outcome::new(
                status,
                serde_json::to_value(&report).expect("report serializes"),
            )
            .line(format!("sequence prefix: {prefix:?}"))
            .line(format!(
                "injective: {}, networks hit: {}",
                report.injective,
                report.hitting.len()
            ))
            .line(match status {
                Status::Proved => "converges to infinity along the induced filter".into(),
                Status::Refuted => "convergence refuted".to_string(),
                _ => "convergence undecided within the horizon".into(),
            }))
        }
        ConvergeCmd::Check {
            filter,
            seq,
            budget,
        } => {
            let space = FilterSpace::new(parse_filter(filter)?)?;
            let s = parse_sequence(seq)?;
            let v = converges_to_infinity(&s, space.filter(), &space, *budget)?;
            let status = Status::from(&v);
            Ok(Outcome::new(status, verdict_value(&v)).line(match status {
                Status::Proved => format!(
                    "sequence {s} converges to infinity ({budget} neighborhoods checked)"
                ),
                Status::Refuted => format!("sequence {s} does not converge to infinity"),
                _ => "convergence undecided within the horizon".into(),
            }))
        }
        ConvergeCmd::Subseq {
            filter,
            seq,
            budget,
        } => {
            let f = Filter::new(parse_filter(filter)?)?;
            let s = parse_sequence(seq)?;
            let report = convergent_subsequence(&s, &f, *budget, horizon)?;
            Ok(Outcome::new(
                Status::Proved,
                serde_json::to_value(&report).expect("report serializes"),
            )
            .line(format!(
                "subsequence indices (prefix): {:?}",
                report.indices_prefix
            ))
            .line(format!(
                "neighborhoods checked: {}",
                report.neighborhoods.len()
            )))
        }
        ConvergeCmd::RefuteNetwork { candidates } => {
            let sets = candidates
                .iter()
                .map(|c| parse_set(c))
                .collect::<Result<Vec<_>, _>>()?;
            let refutation = refute_finite_network(&sets, horizon)?;
            let mut out = Outcome::new(
                Status::Proved,
                serde_json::to_value(&refutation).expect("refutation serializes"),
            );
            out = out.line(format!(
                "a density-filter member avoids all {} candidates",
                refutation.exclusions.len()
            ));
            for e in refutation.exclusions.iter().take(8) {
                out = out.line(format!(
                    "  candidate {}: point {} removed from block {}",
                    e.candidate, e.point, e.block
                ));
            }
            Ok(out)
        }
    }
}

fn parse_exceptions(pairs: &[String]) -> Result<BTreeMap<Nat, u8>, Error> {
    let mut out = BTreeMap::new();
    for p in pairs {
        let (k, v) = p.split_once('=').ok_or_else(|| Error::Parse {
            at: 0,
            msg: format!("exception '{p}' is not of the form index=bit"),
        })?;
        let k: Nat = k.trim().parse().map_err(|_| Error::Parse {
            at: 0,
            msg: format!("bad index in exception '{p}'"),
        })?;
        let v: u8 = v.trim().parse().map_err(|_| Error::Parse {
            at: 0,
            msg: format!("bad bit in exception '{p}'"),
        })?;
        out.insert(k, v);
    }
    Ok(out)
}

fn run_cpgame(cmd: &CpgameCmd, horizon: Nat) -> Result<Outcome, Error> {
    match cmd {
        CpgameCmd::Play {
            rounds,
            seed,
            sizes,
            filter,
            out,
        } => {
            let p = parse_partition(sizes)?;
            let presentation = parse_filter(filter)?;
            let t = play_game(
                Adversary::Seeded { seed: *seed },
                *rounds,
                presentation,
                p,
                SequencePresentation::Identity,
                horizon,
            )?;
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&t).expect("transcript serializes");
                std::fs::write(path, json + "\n").map_err(|e| Error::InvalidInstance(
                    format!("cannot write transcript to {}: {e}", path.display()),
                ))?;
            }
            let blocks: Vec<Nat> = t.rounds.iter().map(|r| r.block).collect();
            Ok(Outcome::new(
                Status::Proved,
                serde_json::to_value(&t).expect("transcript serializes"),
            )
            .line(format!(
                "{} rounds played; blocks pinned: {blocks:?}",
                t.rounds.len()
            ))
            .line(format!(
                "final witness pins {} coordinates and fails levels 0..{}",
                t.final_witness.exceptional.len(),
                t.rounds.len()
            )))
        }
        CpgameCmd::Verify { transcript } => {
            let text = std::fs::read_to_string(transcript).map_err(|e| {
                Error::InvalidInstance(format!(
                    "cannot read transcript {}: {e}",
                    transcript.display()
                ))
            })?;
            let t: GameTranscript = serde_json::from_str(&text).map_err(|e| {
                Error::InvalidInstance(format!("transcript does not parse: {e}"))
            })?;
            let v = verify_transcript(&t, horizon)?;
            // byte-level replay: re-run the stored adversary and compare
            // canonical serializations
            let replay_bytes_identical = match play_game(
                t.adversary.clone(),
                t.rounds.len() as Nat,
                t.presentation.clone(),
                t.partition.clone(),
                t.sequence.clone(),
                horizon,
            ) {
                Ok(replayed) => {
                    serde_json::to_string(&replayed).expect("transcript serializes")
                        == serde_json::to_string(&t).expect("transcript serializes")
                }
                Err(_) => false,
            };
            let status = Status::from(&v);
            let mut outcome = Outcome::new(
                status,
                json!({
                    "verdict": verdict_value(&v),
                    "replay_bytes_identical": replay_bytes_identical,
                }),
            );
            match &v {
                Verdict::Proved { certificate } => {
                    outcome = outcome
                        .line(format!(
                            "transcript verified: {} rounds, levels {:?} all refuted",
                            certificate.rounds, certificate.levels_refuted
                        ))
                        .line(format!("replay byte-identical: {replay_bytes_identical}"));
                }
                Verdict::Refuted { certificate } => {
                    outcome = outcome.line(format!(
                        "transcript rejected{}: {}",
                        certificate
                            .round
                            .map(|r| format!(" at round {r}"))
                            .unwrap_or_default(),
                        certificate.reason
                    ));
                }
                Verdict::Unknown { .. } => {
                    outcome = outcome.line("verification inconclusive".to_string());
                }
            }
            Ok(outcome)
        }
        CpgameCmd::Level {
            filter,
            sizes,
            limit_bit,
            exceptions,
            tail,
        } => {
            let p = parse_partition(sizes)?;
            let space = FilterSpace::new(parse_filter(filter)?)?;
            let exceptional = parse_exceptions(exceptions)?;
            let tail_set = parse_set(tail)?;
            let f = ContinuousWitness::new(*limit_bit, exceptional, tail_set, &space)?;
            let lvl = decomposition_level(&f, &p, &space, horizon)?;
            Ok(Outcome::new(
                Status::Proved,
                serde_json::to_value(&lvl).expect("level serializes"),
            )
            .line(format!(
                "the function first enters the decomposition at level {}",
                lvl.level
            )))
        }
    }
}

fn parse_size_list(s: &str) -> Result<Vec<Nat>, Error> {
    s.split(',')
        .map(|part| {
            part.trim().parse::<Nat>().map_err(|_| Error::Parse {
                at: 0,
                msg: format!("bad block size '{part}'"),
            })
        })
        .collect()
}

fn layout_blocks(sizes: &[Nat]) -> Vec<Vec<Nat>> {
    let mut blocks = Vec::with_capacity(sizes.len());
    let mut next = 0;
    for &s in sizes {
        blocks.push((next..next + s).collect());
        next += s;
    }
    blocks
}

fn run_oracle(cmd: &OracleCmd) -> Result<Outcome, Error> {
    match cmd {
        OracleCmd::Measure { sizes } => {
            let sizes = parse_size_list(sizes)?;
            let value = oracle_measure_sizes(&sizes)?;
            Ok(Outcome::new(
                Status::Done,
                json!({
                    "sizes": sizes,
                    "value": value.to_string(),
                    "value_f64": value.to_f64(),
                }),
            )
            .line(format!(
                "enumerated hitting probability for sizes {sizes:?}: {value}"
            )))
        }
        OracleCmd::Pseudo {
            generators,
            block_sizes,
            persist,
            candidate,
        } => {
            let sizes = parse_size_list(block_sizes)?;
            let blocks = layout_blocks(&sizes);
            let window: Nat = sizes.iter().sum();
            let gens = generators
                .iter()
                .map(|g|

                    parse_set(g).and_then(|s| {
                        TruncatedSet::new(
                            window,
                            (0..window).filter(|&x| s.member(x)),
                            if s.member(window) {
                                TailConvention::Full
                            } else {
                                TailConvention::Empty
                            },
                        )
                    })
                )
                .collect::<Result<Vec<_>, _>>()?;
            match candidate {
                Some(c) => {
                    let cand = parse_set(c)?;
                    let points: Vec<Nat> = (0..window).filter(|&x| cand.member(x)).collect();
                    let trace = oracle_validates_pseudointersection(
                        &points, &gens, &blocks, *persist,
                    );
                    let valid = trace.is_some();
                    let status = if valid { Status::Proved } else { Status::Refuted };
                    Ok(Outcome::new(
                        status,
                        json!({
                            "candidate": points,
                            "valid": valid,
                            "trace": serde_json::to_value(&trace).expect("trace serializes"),
                        }),
                    )
                    .line(format!("candidate {points:?} valid: {valid}")))
                }
                None => {
                    let traces = oracle_pseudointersection(&gens, &blocks, *persist)?;
                    let shown: Vec<&Vec<Nat>> =
                        traces.iter().map(|t| &t.points).take(10).collect();
                    Ok(Outcome::new(
                        Status::Done,
                        json!({
                            "valid_candidates": traces.len(),
                            "first_traces": serde_json::to_value(
                                traces.iter().take(10).collect::<Vec<_>>()
                            )
                            .expect("traces serialize"),
                        }),
                    )
                    .line(format!(
                        "{} valid candidates over {} points; first: {shown:?}",
                        traces.len(),
                        window
                    )))
                }
            }
        }
        OracleCmd::Agreement {
            values,
            tail_value,
            limit,
            level,
            block_sizes,
        } => {
            let bits = values
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(Error::Parse {
                        at: 0,
                        msg: format!("bad bit '{other}' in values"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let f = FunctionTable::new(bits, *tail_value, *limit)?;
            let sizes = parse_size_list(block_sizes)?;
            let blocks = layout_blocks(&sizes);
            let agrees = oracle_late_agreement(&f, *level, &blocks);
            let status = if agrees { Status::Proved } else { Status::Refuted };
            Ok(Outcome::new(
                status,
                json!({"level": level, "agrees": agrees}),
            )
            .line(format!(
                "agreement from block {level} on: {agrees}"
            )))
        }
    }
}
