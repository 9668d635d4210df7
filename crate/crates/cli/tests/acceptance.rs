//! Acceptance suite: one test per criterion, named `criterion_NN_*` so the
//! harness prints one pass/fail line for each.  Tolerances and horizons are
//! pinned in the assertions; randomized sweeps use fixed seeds so every run
//! checks the same instances.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use filterlab_core::convergence::{
    convergent_subsequence, meager_convergent_sequence, refute_finite_network, FilterSpace,
    NetworkFamily, SequencePresentation,
};
use filterlab_core::cpgame::{decomposition_level, late_block_agreement, ContinuousWitness};
use filterlab_core::error::Error;
use filterlab_core::expr::{parse_filter, parse_partition, parse_set};
use filterlab_core::filters::Filter;
use filterlab_core::measure::{
    derive_seed, measure_with_precision, partial_product, simulate_hitting, DyadicRational,
};
use filterlab_core::oracle::{
    oracle_measure, oracle_pseudointersection, oracle_validates_pseudointersection,
    TailConvention, TruncatedSet,
};
use filterlab_core::partition::BlockPartition;
use filterlab_core::pseudo::{
    bounded_block_pseudointersection, product_chain_witness, segment_pseudointersection,
    verify_pseudointersection, BoundedBlockInstance, CandidateOutcome,
};
use filterlab_core::sets::SetDescription;
use filterlab_core::weights::WeightRule;
use filterlab_core::{Nat, Verdict};

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_filterlab"))
}

/// Run the binary with `--json`, returning (exit code, parsed report).
fn run_json(args: &[&str]) -> (i32, Value) {
    let out = bin()
        .arg("--json")
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    let report: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout of {args:?} is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    });
    (code, report)
}

fn rng_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    rng.next_u64() % bound
}

/// One visible line per criterion; shown with `--nocapture` (or on failure).
fn pass(line: &str) {
    println!("PASS {line}");
}

// ---------------------------------------------------------------------------
// 1. exact measure identity on unit blocks
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_unit_block_measure_is_exactly_dyadic() {
    let started = Instant::now();
    for m in 1..=20u64 {
        let (code, report) = run_json(&[
            "measure",
            "exact",
            "--sizes",
            "const:1",
            "--factors",
            &m.to_string(),
        ]);
        assert_eq!(code, 0, "factors {m}");
        assert_eq!(
            report["payload"]["value"],
            Value::String(format!("1/2^{m}")),
            "factors {m}: exact value must be 2^-{m} with zero tolerance"
        );
    }
    assert!(
        started.elapsed() < Duration::from_secs(1),
        "20 exact products must finish in under a second, took {:?}",
        started.elapsed()
    );
    pass("criterion 01: unit-block measures are exactly 1/2^m at 20 random depths");
}

// ---------------------------------------------------------------------------
// 2. null certificate for the logarithmic partition
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_log_sized_partition_is_null_with_small_partial_product() {
    let started = Instant::now();
    let (code, report) = run_json(&[
        "measure",
        "null-cert",
        "--sizes",
        "log2+2",
        "--checkpoint",
        "8",
        "--checkpoint",
        "2048",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "proved");
    assert_eq!(report["payload"]["reverified"], Value::Bool(true));
    let checkpoints = report["payload"]["verdict"]["certificate"]["checkpoints"]
        .as_array()
        .expect("checkpoints array");
    let exhibited = checkpoints
        .iter()
        .find(|cp| cp["factors"] == 2048)
        .expect("the 2048-factor checkpoint is exhibited with its count");
    assert!(exhibited["product"].is_string());

    // the exhibited partial product is below 0.01: compare exactly against
    // 1/128 < 0.01 in dyadic arithmetic
    let p = parse_partition("log2+2").unwrap();
    let value = partial_product(&p, 0, 2048);
    let threshold = DyadicRational::pow2_inverse(7);
    assert!(
        value.less_than(&threshold),
        "partial product after 2048 factors must drop below 1/128"
    );
    // the same partition's sizes grow without bound — the meagerness half
    assert!(p.sizes_unbounded());
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "null certificate must finish in under five seconds, took {:?}",
        started.elapsed()
    );
    pass("criterion 02: log-sized partition certified null; the 2048-factor product sits below 1/2^7");
}

// ---------------------------------------------------------------------------
// 3. enclosure of the growing-blocks product, cross-checked by enumeration
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_growing_blocks_enclosure_tightens_and_matches_oracle() {
    let p = parse_partition("n+1").unwrap();
    let report = measure_with_precision(&p, 0, 30, 60).expect("enclosure reached");
    assert!(report.enclosure.factors <= 60);
    assert!(
        report.enclosure.width_f64() < 1e-9,
        "width {} must be below 1e-9",
        report.enclosure.width_f64()
    );

    // every prefix that fits the 24-point enumeration limit agrees exactly
    for t in 1..=6u64 {
        let exact = partial_product(&p, 0, t);
        let enumerated = oracle_measure(&p, 0, t).expect("within the window");
        assert_eq!(exact, enumerated, "prefix of {t} blocks");
    }
    pass("criterion 03: enclosure tightens below 1e-9 within 60 factors; partials match enumeration");
}

// ---------------------------------------------------------------------------
// 4. Monte-Carlo estimates stay within four standard errors
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_monte_carlo_within_four_sigma_in_19_of_20_runs() {
    let cases = [
        ("const:1", 10),
        ("const:2", 10),
        ("const:3", 10),
        ("n+1", 8),
        ("log2+2", 12),
    ];
    let mut within = 0;
    for (sizes, factors) in cases {
        let p = parse_partition(sizes).unwrap();
        let exact = partial_product(&p, 0, factors).to_f64();
        for run in 0..4 {
            let seed = derive_seed(0xF117, run);
            let sim = simulate_hitting(&p, 0, factors, 40_000, seed);
            if (sim.estimate - exact).abs() <= sim.four_sigma {
                within += 1;
            }
        }
    }
    assert!(
        within >= 19,
        "{within} of 20 runs within four standard errors; need at least 19"
    );
    pass("criterion 04: Monte-Carlo within four standard errors in 19+ of 20 seeded runs");
}

// ---------------------------------------------------------------------------
// 5. bounded-block recursion vs. brute-force enumeration
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_bounded_recursion_confirmed_by_enumeration_on_1000_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    for instance in 0..1000 {
        // a window of at most 12 points: random prefix blocks of size 1..=3
        // followed by a constant tail, the last two tail blocks inside the
        // window standing proxy for the infinite remainder
        let tail_size = 1 + rng_below(&mut rng, 3);
        let mut prefix = Vec::new();
        let mut prefix_sum = 0;
        let want_blocks = rng_below(&mut rng, 11);
        for _ in 0..want_blocks {
            let s = 1 + rng_below(&mut rng, 3);
            if prefix_sum + s + 2 * tail_size > 12 {
                break;
            }
            prefix.push(s);
            prefix_sum += s;
        }
        let partition = BlockPartition::new(
            prefix.clone(),
            filterlab_core::partition::TailRule::Const { c: tail_size },
        )
        .unwrap();
        let window = prefix_sum + 2 * tail_size;

        // generators: random below the prefix region, everything from there on
        let gen_count = 1 + rng_below(&mut rng, 3) as usize;
        let generators: Vec<SetDescription> = (0..gen_count)
            .map(|_| {
                let mask: Vec<Nat> =
                    (0..prefix_sum).filter(|_| rng.next_u32() & 1 == 1).collect();
                let listed = mask
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                parse_set(&format!(
                    "truncated(mask=[{listed}], n={prefix_sum}, tail=full)"
                ))
                .unwrap()
            })
            .collect();

        let inst = BoundedBlockInstance::new(
            partition.clone(),
            SetDescription::everything(),
            SetDescription::everything(),
            generators.clone(),
        )
        .unwrap_or_else(|e| panic!("instance {instance} rejected: {e}"));
        assert!(inst.bound() <= 3, "instance {instance}");

        let out = bounded_block_pseudointersection(&inst)
            .unwrap_or_else(|e| panic!("instance {instance} failed: {e}"));
        assert!(
            out.depth() <= inst.bound(),
            "instance {instance}: recursion depth {} exceeds the size bound {}",
            out.depth(),
            inst.bound()
        );

        // independent re-check of the certificate
        let verdict = verify_pseudointersection(&out.certificate, inst.generators(), 2_000);
        assert!(
            verdict.is_proved(),
            "instance {instance}: certificate fails re-verification: {verdict:?}"
        );

        // enumeration over the window confirms the windowed result
        let blocks: Vec<Vec<Nat>> = (0..partition.block_of(window - 1) + 1)
            .map(|m| {
                (partition.start(m)..partition.start(m) + partition.size(m))
                    .filter(|&x| x < window)
                    .collect()
            })
            .collect();
        let truncated_gens: Vec<TruncatedSet> = generators
            .iter()
            .map(|g| {
                TruncatedSet::new(window, g.members_below(0, window), TailConvention::Full)
                    .unwrap()
            })
            .collect();
        let points = out.certificate.set.members_below(0, window);
        let trace =
            oracle_validates_pseudointersection(&points, &truncated_gens, &blocks, 1)
                .unwrap_or_else(|| {
                    panic!("instance {instance}: enumeration rejects the output {points:?}")
                });
        for (j, exc) in out.certificate.exceptions.iter().enumerate() {
            assert!(
                exc.iter().all(|&x| x < prefix_sum),
                "instance {instance}: exceptions spill past the random region"
            );
            assert_eq!(
                &trace.exceptions[j], exc,
                "instance {instance}: exception lists disagree for generator {j}"
            );
        }
        let all_valid = oracle_pseudointersection(&truncated_gens, &blocks, 1).unwrap();
        assert!(
            all_valid.iter().any(|t| t.points == points),
            "instance {instance}: output not among the enumerated valid candidates"
        );
    }
    pass("criterion 05: 1000 bounded-recursion instances verified and confirmed by enumeration");
}

// ---------------------------------------------------------------------------
// 6. segment construction through a decreasing chain
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_segment_masses_climb_and_exceptions_stay_in_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1AF);
    for chain_no in 0..100 {
        // harmonic mass grows like ln, so segment k ends near n_k·e^k; four
        // segments are what a 10^4 cap accommodates
        let length = 2 + rng_below(&mut rng, 3) as usize;
        let mut dropped: BTreeSet<Nat> = (0..8).filter(|_| rng.next_u32() & 1 == 1).collect();
        let mut chain = Vec::new();
        for _ in 0..length {
            for _ in 0..rng_below(&mut rng, 4) {
                dropped.insert(rng_below(&mut rng, 40));
            }
            chain.push(SetDescription::cofinite(dropped.iter().copied()));
        }

        let out = segment_pseudointersection(WeightRule::Harmonic, &chain, 10_000)
            .unwrap_or_else(|e| panic!("chain {chain_no} failed: {e}"));
        assert_eq!(out.segments.len(), length, "chain {chain_no}");
        assert!(
            out.cut_points.windows(2).all(|w| w[0] < w[1]),
            "chain {chain_no}: cut points must increase strictly"
        );

        // per-segment mass lower bounds: rational, above the segment index,
        // strictly increasing
        let mut last: Option<BigRational> = None;
        for (k, seg) in out.segments.iter().enumerate() {
            let mass = seg.mass_lower.to_rational().expect("rational mass");
            assert!(
                mass > BigRational::from(BigInt::from(k)),
                "chain {chain_no}: segment {k} mass {mass} must exceed {k}"
            );
            if let Some(prev) = last {
                assert!(
                    mass > prev,
                    "chain {chain_no}: segment masses must increase strictly"
                );
            }
            last = Some(mass);
        }

        // exceptions against chain element k live strictly below cut point k,
        // and are complete: past it the set never escapes element k
        for (k, element) in chain.iter().enumerate() {
            let cut = out.cut_points[k];
            let listed = &out.certificate.exceptions[k];
            assert!(
                listed.iter().all(|&x| x < cut),
                "chain {chain_no}: exception outside [0, {cut})"
            );
            let escapes: Vec<Nat> = out
                .certificate
                .set
                .members_below(0, 3_000)
                .into_iter()
                .filter(|&x| !element.member(x))
                .collect();
            assert_eq!(&escapes, listed, "chain {chain_no}: element {k}");
        }
    }
    pass("criterion 06: segment masses climb past each threshold; exceptions confined to their segments");
}

// ---------------------------------------------------------------------------
// 7. network-hitting convergent sequence
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_twenty_network_sets_all_hit_with_proved_convergence() {
    let started = Instant::now();
    let partition = parse_partition("n+1").unwrap();
    // tails [N, ∞) give every checked neighborhood a member lying inside it;
    // the block-rule sets add sparse-but-periodic members to hit
    let mut sets = Vec::new();
    for j in 0..8u64 {
        sets.push(SetDescription::tail_from(2 + 3 * j));
    }
    for c in 2..=7u64 {
        sets.push(parse_set(&format!("blocks(sizes=const:{c}, rule=first(1))")).unwrap());
    }
    for c in 2..=7u64 {
        sets.push(
            parse_set(&format!("blocks(sizes=const:{c}, rule=all_but_first(1))")).unwrap(),
        );
    }
    assert_eq!(sets.len(), 20);

    let space = FilterSpace::new(parse_filter("frechet").unwrap()).unwrap();
    let family = NetworkFamily::new(space, sets.clone(), 20).unwrap();
    let report = meager_convergent_sequence(&family, &partition, 10_000).unwrap();
    assert!(report.injective);
    assert!(
        matches!(report.convergence, Verdict::Proved { .. }),
        "convergence must be proved"
    );
    assert_eq!(report.hitting.len(), 20);

    // re-walk the hitting obligation directly: from block i on, every fully
    // materialized block contains a sequence value inside network set i
    for (i, set) in sets.iter().enumerate() {
        let mut blocks_checked = 0;
        let mut m = i as Nat;
        loop {
            let start = partition.start(m);
            let end = start + partition.size(m);
            if end > report.materialized {
                break;
            }
            assert!(
                (start..end).any(|pos| {
                    report
                        .sequence
                        .value(pos)
                        .is_some_and(|v| set.member(v))
                }),
                "network {i}: block {m} contains no value of the set"
            );
            blocks_checked += 1;
            m += 1;
        }
        assert!(
            blocks_checked >= 50,
            "network {i}: only {blocks_checked} blocks verified within the horizon"
        );
    }
    assert!(
        started.elapsed() < Duration::from_secs(10),
        "sequence construction and re-check must finish in under ten seconds, took {:?}",
        started.elapsed()
    );
    pass("criterion 07: 20-set network hit inside 50+ blocks each, convergence proved");
}

// ---------------------------------------------------------------------------
// 8. subsequence extraction through a bounded meagerness witness
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_subsequence_almost_inside_twenty_neighborhoods() {
    let filter = Filter::new(parse_filter("density(sizes=const:2)").unwrap()).unwrap();
    let report = convergent_subsequence(&SequencePresentation::Identity, &filter, 20, 10_000)
        .expect("extraction succeeds");
    assert_eq!(report.neighborhoods.len(), 20);

    let space = FilterSpace::new(parse_filter("density(sizes=const:2)").unwrap()).unwrap();
    let d = &report.extraction.certificate.set;
    for check in &report.neighborhoods {
        // listed escapes really lie below the bound...
        assert!(check.escapes.iter().all(|&x| x < check.escape_bound));
        // ...and past the bound the subsequence index set never escapes the
        // neighborhood again: almost-containment, sampled well beyond
        let neighborhood = space.basic(check.neighborhood).unwrap();
        for x in d.members_below(check.escape_bound, check.escape_bound + 2_000) {
            assert!(
                neighborhood.member(x),
                "index {x} escapes neighborhood {} past the bound",
                check.neighborhood
            );
        }
    }

    // partitions with unbounded witness intervals are refused outright
    let unbounded = Filter::new(parse_filter("summable(harmonic)").unwrap()).unwrap();
    match convergent_subsequence(&SequencePresentation::Identity, &unbounded, 5, 10_000) {
        Err(Error::Precondition(_)) => {}
        other => panic!("expected a precondition refusal, got {other:?}"),
    }
    pass("criterion 08: subsequence almost inside all 20 neighborhoods; divergent-weight witness refused");
}

// ---------------------------------------------------------------------------
// 9. the pair-product refuter blocks every valid candidate
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_product_refuter_blocks_valid_candidates_and_rejects_the_wedge() {
    let refuter = product_chain_witness();

    // the column-0 diagonal candidate
    let first_columns = parse_set("rows:first(1)").unwrap();
    match refuter.refute(&first_columns, 8).unwrap() {
        CandidateOutcome::Blocked(b) => {
            assert!(
                refuter.check_blocking(&first_columns, &b, 10_000),
                "blocking certificate fails re-verification"
            );
        }
        other => panic!("expected Blocked, got {other:?}"),
    }

    // ten randomized candidates with every row finite
    let mut rng = ChaCha8Rng::seed_from_u64(0x901);
    for case in 0..10 {
        let default_cols: Vec<u64> = {
            let n = 1 + rng_below(&mut rng, 3);
            let mut cols: BTreeSet<u64> = BTreeSet::new();
            while (cols.len() as u64) < n {
                cols.insert(rng_below(&mut rng, 6));
            }
            cols.into_iter().collect()
        };
        let mut rows = Vec::new();
        for _ in 0..rng_below(&mut rng, 4) {
            let r = rng_below(&mut rng, 8);
            let cols: Vec<u64> = (0..6).filter(|_| rng.next_u32() & 1 == 1).collect();
            let spec = if cols.is_empty() {
                "empty".to_string()
            } else {
                format!(
                    "cols[{}]",
                    cols.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                )
            };
            rows.push(format!("{r}=>{spec}"));
        }
        rows.push(format!(
            "default=>cols[{}]",
            default_cols
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        let candidate = parse_set(&format!("rows:table({})", rows.join("; "))).unwrap();

        match refuter.refute(&candidate, 8).unwrap() {
            CandidateOutcome::Blocked(b) => {
                assert!(
                    refuter.check_blocking(&candidate, &b, 10_000),
                    "case {case}: blocking certificate fails re-verification"
                );
            }
            other => panic!("case {case}: expected Blocked, got {other:?}"),
        }
    }

    // the upper wedge has an infinite row 0, caught at chain depth 1
    let wedge = parse_set("diag:upper").unwrap();
    match refuter.refute(&wedge, 8).unwrap() {
        CandidateOutcome::FailsChain { k } => assert_eq!(k, 1),
        other => panic!("expected FailsChain at 1, got {other:?}"),
    }
    pass("criterion 09: product refuter blocks all valid candidates; the upper wedge fails the chain");
}

// ---------------------------------------------------------------------------
// 10. one hundred seeded avoidance games, replayed byte-for-byte
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_hundred_seeded_games_verify_and_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100u64 {
        let path = dir.path().join(format!("transcript_{seed}.json"));
        let path_str = path.to_str().unwrap();
        let (code, _) = run_json(&[
            "cpgame",
            "play",
            "--rounds",
            "10",
            "--seed",
            &seed.to_string(),
            "--out",
            path_str,
        ]);
        assert_eq!(code, 0, "seed {seed}: play failed");

        let (code, report) = run_json(&["cpgame", "verify", path_str]);
        assert_eq!(code, 0, "seed {seed}: verification failed");
        assert_eq!(report["status"], "proved", "seed {seed}");
        assert_eq!(
            report["payload"]["replay_bytes_identical"],
            Value::Bool(true),
            "seed {seed}: replay must reproduce the stored transcript exactly"
        );
        let levels = report["payload"]["verdict"]["certificate"]["levels_refuted"]
            .as_array()
            .expect("refuted levels");
        let expected: Vec<Value> = (0..10).map(|r| Value::from(r as u64)).collect();
        assert_eq!(levels, &expected, "seed {seed}: all ten levels refuted in order");
    }
    pass("criterion 10: 100 seeded games verified with byte-identical replays");
}

// ---------------------------------------------------------------------------
// 11. the decomposition level is defined for every continuous witness
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_decomposition_level_total_on_100_random_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD06);
    let partitions = [
        BlockPartition::linear(1),
        BlockPartition::constant(2),
        BlockPartition::constant(3),
        BlockPartition::dyadic(),
    ];
    let space = FilterSpace::new(parse_filter("frechet").unwrap()).unwrap();
    for case in 0..100 {
        let partition = &partitions[case % partitions.len()];
        let limit = (rng.next_u32() & 1) as u8;
        let mut exceptional = std::collections::BTreeMap::new();
        for _ in 0..rng_below(&mut rng, 4) {
            exceptional.insert(rng_below(&mut rng, 40), (rng.next_u32() & 1) as u8);
        }
        // the doubling partition's block-image analysis closes over plain
        // cofinite forms; the other partitions also take boolean combinations
        let doubling = matches!(
            partition.tail(),
            filterlab_core::partition::TailRule::Exp2 { .. }
        );
        let variant = if doubling {
            rng_below(&mut rng, 2)
        } else {
            rng_below(&mut rng, 3)
        };
        let tail = match variant {
            0 => SetDescription::everything(),
            1 => {
                let drops: Vec<Nat> = (0..30).filter(|_| rng.next_u32() % 4 == 0).collect();
                SetDescription::cofinite(drops)
            }
            _ => SetDescription::or(vec![
                SetDescription::cofinite((0..20).filter(|_| rng.next_u32() % 3 == 0)),
                parse_set(&format!("blocks(sizes={partition}, rule=first(1))")).unwrap(),
            ]),
        };
        let witness = ContinuousWitness::new(limit, exceptional, tail, &space)
            .unwrap_or_else(|e| panic!("case {case}: witness rejected: {e}"));

        let level = decomposition_level(&witness, partition, &space, 10_000)
            .unwrap_or_else(|e| panic!("case {case}: no decomposition level: {e}"));
        assert!(
            late_block_agreement(&witness, level.level, partition, 10_000).is_proved(),
            "case {case}: agreement fails at the reported level {}",
            level.level
        );
        if level.level > 0 {
            assert!(
                late_block_agreement(&witness, level.level - 1, partition, 10_000)
                    .is_refuted(),
                "case {case}: level {} is not least",
                level.level
            );
        }
    }
    pass("criterion 11: decomposition level total on 100 witnesses, certificates on both flanks");
}

// ---------------------------------------------------------------------------
// 12. the diagonal refuter excludes every candidate with density intact
// ---------------------------------------------------------------------------

#[test]
fn criterion_12_diagonal_refuter_excludes_candidates_with_density_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6);
    for family_no in 0..50 {
        let n = 1 + rng_below(&mut rng, 20) as usize;
        let candidates: Vec<SetDescription> = (0..n)
            .map(|_| match rng_below(&mut rng, 3) {
                0 => {
                    let drops: Vec<Nat> =
                        (0..50).filter(|_| rng.next_u32() % 16 == 0).collect();
                    SetDescription::cofinite(drops)
                }
                1 => {
                    let c = 2 + rng_below(&mut rng, 4);
                    parse_set(&format!("blocks(sizes=const:{c}, rule=first(1))")).unwrap()
                }
                _ => {
                    let c = 2 + rng_below(&mut rng, 4);
                    parse_set(&format!("blocks(sizes=const:{c}, rule=all_but_first(1))"))
                        .unwrap()
                }
            })
            .collect();

        // scheduling candidate i into a distinct doubling block ≥ i reaches
        // block 19 (start 524287) for the largest families
        let refutation = refute_finite_network(&candidates, 2_000_000)
            .unwrap_or_else(|e| panic!("family {family_no} failed: {e}"));

        // one exclusion per candidate, …
        let mut seen: Vec<usize> =
            refutation.exclusions.iter().map(|e| e.candidate).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>(), "family {family_no}");
        // …in pairwise distinct blocks (at most one removal per block), with
        // candidate i handled at block index ≥ i
        let blocks: BTreeSet<Nat> = refutation.exclusions.iter().map(|e| e.block).collect();
        assert_eq!(blocks.len(), n, "family {family_no}: blocks must be distinct");
        for e in &refutation.exclusions {
            assert!(e.block >= e.candidate as Nat, "family {family_no}");
            let start = refutation.partition.start(e.block);
            let size = refutation.partition.size(e.block);
            assert!(
                (start..start + size).contains(&e.point),
                "family {family_no}: excluded point outside its block"
            );
            assert!(
                candidates[e.candidate].member(e.point),
                "family {family_no}: excluded point not in candidate {}",
                e.candidate
            );
            assert!(
                !refutation.family.member(e.point),
                "family {family_no}: the family still contains the excluded point"
            );
        }

        // the family's density membership certificate re-verifies against
        // the filter it claims membership in
        let filter = Filter::new(filterlab_core::filters::FilterPresentation::BlockDensity {
            partition: refutation.partition.clone(),
        })
        .unwrap();
        assert!(
            filter.check_membership_cert(&refutation.family, &refutation.membership, 10_000),
            "family {family_no}: density certificate fails re-verification"
        );
    }
    pass("criterion 12: 50 random families refuted with density-certified exclusions");
}
