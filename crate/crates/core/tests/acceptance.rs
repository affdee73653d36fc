//! Acceptance criteria. Runs as a plain binary (`harness = false`) so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use profseq::divergence::{DiffRecord, DEFAULT_THRESHOLD};
use profseq::report::artifacts::{
    self, csv_bytes, read_csv, sequence_rows, AggregateRow, DiffRow, DistanceRow, HistogramRow, OccurrenceRow,
    SequenceRow, SuggestionRow,
};
use profseq::report::commands::{divergence_of, load_books, ScanInput};
use profseq::scanner::scan_book;
use profseq::*;
use Level::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
// construct, verbatim pattern, text, expected (char offset, matched text) spans
type PatternCase<'a> = (&'a str, &'a str, &'a str, &'a [(usize, &'a str)]);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

// 1
fn perfect_sequence_reproduction() -> Outcome {
    let start = Instant::now();
    let levels = [A1, A1, A2, A1, B2, A2, C1];
    let perfect = perfect_sequence(&levels);
    let diffs: Vec<i32> = positional_diffs(&seq_of("worked", &levels)).iter().map(|r| r.diff).collect();
    let elapsed = start.elapsed();
    ensure(perfect == [A1, A1, A1, A2, A2, B2, C1], || format!("perfect sequence {perfect:?}"))?;
    ensure(diffs == [0, 0, 1, -1, 2, -2, 0], || format!("diffs {diffs:?}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("perfect {perfect:?}, diffs {diffs:?}, {elapsed:?}"))
}

// 2
fn divergence_table_reproduction() -> Outcome {
    // levels come from the catalog; compiling its patterns is setup
    let catalog = default_catalog();
    let start = Instant::now();
    let records: Vec<DiffRecord> = DIVERGENCE_TABLE
        .iter()
        .flat_map(|(level, name, diffs, _, _)| {
            diffs.iter().enumerate().map(move |(book, &diff)| DiffRecord {
                book_id: format!("book{book}"),
                construct: name.to_string(),
                level: *level,
                slot_level: Level::from_index((level.index() as i32 - diff) as usize).unwrap(),
                diff,
            })
        })
        .collect();
    let aggs = aggregate_divergence(&records, &catalog);
    let elapsed = start.elapsed();
    ensure(aggs.len() == DIVERGENCE_TABLE.len(), || format!("{} aggregates", aggs.len()))?;
    for (level, name, diffs, total, relative) in DIVERGENCE_TABLE {
        let agg = aggs.iter().find(|a| a.construct == *name).ok_or_else(|| format!("{name} missing"))?;
        ensure(agg.level == *level, || format!("{name}: level {}", agg.level))?;
        ensure(agg.diffs == *diffs, || format!("{name}: diffs {:?}", agg.diffs))?;
        ensure(agg.total == *total, || format!("{name}: total {} != {total}", agg.total))?;
        ensure((agg.relative - relative).abs() <= 0.005, || {
            format!("{name}: relative {} vs {relative}", agg.relative)
        })?;
        ensure(agg.books == diffs.len(), || format!("{name}: books {}", agg.books))?;
    }
    within(elapsed, Duration::from_millis(10))?;
    let e = &aggs[0];
    Ok(format!("15 rows; top {} {} {:.3}, {elapsed:?}", e.construct, e.total, e.relative))
}

// 3
fn disagreement_table_reproduction() -> Outcome {
    let records: Vec<DiffRecord> = DISAGREEMENT_TABLE
        .iter()
        .flat_map(|&(diff, count, _)| {
            (0..count).map(move |i| DiffRecord {
                book_id: format!("b{}", i % 12),
                construct: format!("c{i}"),
                level: A1,
                slot_level: A1,
                diff,
            })
        })
        .collect();
    let h = disagreement_histogram(&records);
    ensure(h.total == 604, || format!("total {}", h.total))?;
    ensure(h.bins.len() == 11, || format!("{} bins", h.bins.len()))?;
    for &(diff, count, pct) in DISAGREEMENT_TABLE {
        let bin = h.bins[&diff];
        ensure(bin.count == count, || format!("bin {diff}: count {}", bin.count))?;
        ensure((bin.percentage - pct).abs() <= 0.01, || format!("bin {diff}: {} vs {pct}", bin.percentage))?;
    }
    let sum: f64 = h.bins.values().map(|b| b.percentage).sum();
    ensure((sum - 100.0).abs() <= 0.05, || format!("percentages sum to {sum}"))?;
    Ok(format!("bin 0 {} at {:.2}%, bin -1 {} at {:.2}%", h.bins[&0].count, h.bins[&0].percentage, h.bins[&-1].count, h.bins[&-1].percentage))
}

// 4
fn validation_metric_reproduction() -> Outcome {
    let m = validation_metrics(ValidationCounts::new(297, 19, 64)).map_err(|e| e.to_string())?;
    for (name, value, expected) in [
        ("accuracy", m.accuracy, 83.16),
        ("precision", m.precision, 82.27),
        ("recall", m.recall, 93.99),
    ] {
        ensure((100.0 * value - expected).abs() <= 0.005, || format!("{name} {:.4}% vs {expected}%", 100.0 * value))?;
    }
    Ok(format!(
        "accuracy {:.2}%, precision {:.2}%, recall {:.2}%",
        100.0 * m.accuracy,
        100.0 * m.precision,
        100.0 * m.recall
    ))
}

// 5
fn wld_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let random_seq = |rng: &mut StdRng| -> Vec<Level> {
        let n = rng.gen_range(0..=6);
        (0..n).map(|_| Level::ALL[rng.gen_range(0..6)]).collect()
    };
    for i in 0..1000 {
        let a = random_seq(&mut rng);
        let b = random_seq(&mut rng);
        let dp = weighted_levenshtein(&a, &b);
        let oracle = brute_force_wld(&a, &b) as f64;
        ensure(dp == oracle, || format!("pair {i}: {a:?} vs {b:?}: dp {dp}, oracle {oracle}"))?;
    }
    let seqs = all_sequences(3);
    let n = seqs.len();
    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = weighted_levenshtein(&seqs[i], &seqs[j]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = d[i * n + j];
            ensure(dij >= 0.0, || format!("negative distance {:?} {:?}", seqs[i], seqs[j]))?;
            ensure((dij == 0.0) == (i == j), || format!("identity fails {:?} {:?}", seqs[i], seqs[j]))?;
            ensure(dij == d[j * n + i], || format!("asymmetric {:?} {:?}", seqs[i], seqs[j]))?;
            for k in 0..n {
                if dij > d[i * n + k] + d[k * n + j] {
                    return Err(format!("triangle fails {:?} {:?} {:?}", seqs[i], seqs[k], seqs[j]));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("1000 random pairs match; metric laws hold over {n} sequences; {elapsed:?}"))
}

// 6
fn zero_sum_diffs() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for i in 0..500 {
        let len = rng.gen_range(0..=60);
        let levels: Vec<Level> = (0..len).map(|_| Level::ALL[rng.gen_range(0..6)]).collect();
        let diffs = positional_diffs(&seq_of("s", &levels));
        let sum: i32 = diffs.iter().map(|r| r.diff).sum();
        ensure(sum == 0, || format!("sequence {i}: sum {sum}"))?;
        ensure(diffs.iter().all(|r| r.diff.abs() <= 5), || format!("sequence {i}: |diff| > 5"))?;
    }
    Ok("500 random sequences".into())
}

// 7
fn scanner_determinism_and_golden() -> Outcome {
    let catalog = fixture_catalog();
    let books = load_books(&ScanInput::Manifest(manifest())).map_err(|e| e.to_string())?;
    let prov = artifacts::Provenance::of(&catalog);
    let first: Vec<BookScan> = books.iter().map(|b| scan_book(b, &catalog)).collect();
    let second: Vec<BookScan> = books.iter().map(|b| scan_book(b, &catalog)).collect();
    ensure(artifacts::scan_outputs(&first, &prov) == artifacts::scan_outputs(&second, &prov), || {
        "two scans serialize differently".into()
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run).join("occ.csv");
        run_cli(&["scan", "--manifest", path(&manifest()), "--catalog", path(&fixtures().join("catalog.json")), "--out", path(&out)])?;
        let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
        let json = std::fs::read(out.with_extension("json")).map_err(|e| e.to_string())?;
        outputs.push((csv, json));
    }
    ensure(outputs[0] == outputs[1], || "CLI scan output differs between runs".into())?;

    #[derive(serde::Deserialize, PartialEq, Debug)]
    struct Golden {
        book_id: String,
        construct: String,
        page: usize,
        offset: usize,
    }
    let golden: Vec<Golden> =
        read_csv(&fixtures().join("golden_occurrences.csv"), &["book_id", "construct", "page", "offset"]).map_err(|e| e.to_string())?;
    let got: Vec<Golden> = first
        .iter()
        .flat_map(|s| {
            s.occurrences.iter().map(|o| Golden {
                book_id: s.book_id.clone(),
                construct: o.construct.clone(),
                page: o.page,
                offset: o.offset,
            })
        })
        .collect();
    let agree = got.iter().zip(&golden).filter(|(a, b)| a == b).count();
    ensure(got == golden, || format!("{agree}/{} rows agree; got {got:#?}", golden.len()))?;
    Ok(format!("{} occurrences, 100% agreement, byte-identical reruns", golden.len()))
}

// 8
fn published_pattern_fidelity() -> Outcome {
    let cases: &[PatternCase] = &[
        ("printfunc", r"print\(.*\n.*\)", "print(\"total:\",\n      total)", &[(0, "print(\"total:\",\n      total)")]),
        ("printfunc", r"print\(.*\n.*\)", "print(x)", &[]),
        ("printfunc", r"print\(.*\n.*\)", "the print function", &[]),
        ("simplelist", r"\w+\s*=\s*[\s*.*\s*]", "x = [1, 2, 3]", &[(0, "x = ")]),
        ("simplelist", r"\w+\s*=\s*[\s*.*\s*]", "if x == y:", &[]),
        ("simplelist", r"\w+\s*=\s*[\s*.*\s*]", "numbers=[1,2]", &[]),
        (
            "fornested",
            r"for\s+\w+.*\s+in\s+\w+.*:[\s\S]+for\s+\w+.*\s+in\s+\w+.*",
            "for i in rows:\n    for j in cols:\n        print(i, j)",
            &[(0, "for i in rows:\n    for j in cols:")],
        ),
        ("fornested", r"for\s+\w+.*\s+in\s+\w+.*:[\s\S]+for\s+\w+.*\s+in\s+\w+.*", "for i in rows:\n    print(i)", &[]),
        (
            "whilecontinue",
            r"while\s+.*:[\s\S]+if\s+.*:[\s\S]+continue",
            "while True:\n    if x:\n        continue\n    x -= 1",
            &[(0, "while True:\n    if x:\n        continue")],
        ),
        ("whilecontinue", r"while\s+.*:[\s\S]+if\s+.*:[\s\S]+continue", "while True:\n    if x:\n        break", &[]),
        ("zipfunc", r"zip\(.*\)", "pairs = zip(a, b)", &[(8, "zip(a, b)")]),
        ("zipfunc", r"zip\(.*\)", "list(zip(a, b))", &[(5, "zip(a, b))")]),
        ("zipfunc", r"zip\(.*\)", "zipped files", &[]),
    ];
    let default = default_catalog();
    for (name, pattern, text, spans) in cases {
        let def = default.get(name).ok_or_else(|| format!("{name} not in default catalog"))?;
        ensure(def.patterns[0] == *pattern, || format!("{name}: first pattern is {}", def.patterns[0]))?;
        let single = Catalog::new(
            vec![ConstructDef {
                name: name.to_string(),
                level: def.level,
                patterns: vec![pattern.to_string()],
                description: None,
            }],
            "verbatim",
        )
        .map_err(|e| e.to_string())?;
        let got: Vec<(usize, String)> = scan_page(text, 1, &single).into_iter().map(|o| (o.offset, o.snippet)).collect();
        let want: Vec<(usize, String)> = spans.iter().map(|(o, s)| (*o, s.to_string())).collect();
        ensure(got == want, || format!("{name} on {text:?}: got {got:?}, want {want:?}"))?;
    }
    Ok(format!("{} labeled snippets across 5 patterns", cases.len()))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_profseq"))
        .args(args)
        .env_remove("PROFSEQ_CATALOG")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("profseq {args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

// 9
fn pipeline_composition() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let occ = dir.path().join("occ.csv");
    let seq = dir.path().join("seq.csv");
    let dist = dir.path().join("dist.csv");
    let div = dir.path().join("div");
    let cat = fixtures().join("catalog.json");
    run_cli(&["scan", "--manifest", path(&manifest()), "--catalog", path(&cat), "--out", path(&occ)])?;
    run_cli(&["sequence", path(&occ), "--out", path(&seq)])?;
    run_cli(&["distance", path(&seq), "--out", path(&dist)])?;
    run_cli(&["divergence", path(&seq), "--out", path(&div)])?;

    let catalog = fixture_catalog();
    let books = load_books(&ScanInput::Manifest(manifest())).map_err(|e| e.to_string())?;
    let scans: Vec<BookScan> = books.iter().map(|b| scan_book(b, &catalog)).collect();
    let seqs: Vec<IntroSequence> = scans.iter().map(first_appearances).collect();
    let distances: Vec<DistanceReport> = seqs.iter().map(book_distance).collect();
    let outcome = divergence_of(&seqs, &catalog, DEFAULT_THRESHOLD);

    let e = |err: profseq::report::Error| err.to_string();
    let cli_occ: Vec<OccurrenceRow> = read_csv(&occ, artifacts::OCCURRENCES_HEADER).map_err(e)?;
    ensure(cli_occ == artifacts::occurrence_rows(&scans), || "occurrences differ".into())?;
    let cli_seq: Vec<SequenceRow> = read_csv(&seq, artifacts::SEQUENCES_HEADER).map_err(e)?;
    ensure(cli_seq == sequence_rows(&seqs), || "sequences differ".into())?;
    let cli_dist: Vec<DistanceRow> = read_csv(&dist, artifacts::DISTANCES_HEADER).map_err(e)?;
    ensure(cli_dist == distances.iter().map(DistanceRow::from).collect::<Vec<_>>(), || "distances differ".into())?;
    let cli_diffs: Vec<DiffRow> = read_csv(&div.join("diffs.csv"), artifacts::DIFFS_HEADER).map_err(e)?;
    ensure(cli_diffs == outcome.records.iter().map(DiffRow::from).collect::<Vec<_>>(), || "diffs differ".into())?;
    let cli_aggs: Vec<AggregateRow> = read_csv(&div.join("aggregates.csv"), artifacts::AGGREGATES_HEADER).map_err(e)?;
    ensure(cli_aggs == outcome.aggregates.iter().map(AggregateRow::from).collect::<Vec<_>>(), || "aggregates differ".into())?;
    let cli_hist: Vec<HistogramRow> = read_csv(&div.join("histogram.csv"), artifacts::HISTOGRAM_HEADER).map_err(e)?;
    ensure(cli_hist == artifacts::histogram_rows(&outcome.histogram), || "histogram differs".into())?;
    let cli_sugg: Vec<SuggestionRow> = read_csv(&div.join("suggestions.csv"), artifacts::SUGGESTIONS_HEADER).map_err(e)?;
    ensure(cli_sugg == outcome.suggestions.iter().map(SuggestionRow::from).collect::<Vec<_>>(), || "suggestions differ".into())?;

    // and byte for byte
    let lib_seq = csv_bytes(artifacts::SEQUENCES_HEADER, &sequence_rows(&seqs));
    ensure(std::fs::read(&seq).map_err(|e| e.to_string())? == lib_seq, || "sequence bytes differ".into())?;
    Ok(format!(
        "{} occurrences, {} sequence rows, {} diffs identical",
        cli_occ.len(),
        cli_seq.len(),
        cli_diffs.len()
    ))
}

// 10
fn introduction_ratio_check() -> Outcome {
    let scan = BookScan::from_occurrences(
        "book4",
        300,
        vec![Occurrence {
            construct: "enumfunc".into(),
            level: C2,
            page: 83,
            offset: 4,
            snippet: "enumerate(fruits)".into(),
        }],
    );
    let ratio = first_appearances(&scan).entries[0].intro_ratio;
    ensure((ratio - 0.2767).abs() <= 0.0001, || format!("ratio {ratio}"))?;

    // Level-sorted books: each level occupies its own band of pages.
    let mut scans = Vec::new();
    for (b, pages) in [(0usize, 60usize), (1, 120), (2, 300)] {
        let mut occurrences = Vec::new();
        for level in Level::ALL {
            for k in 0..3 {
                let band = pages / 6;
                occurrences.push(Occurrence {
                    construct: format!("{level}-{k}-{b}"),
                    level,
                    page: level.index() * band + 1 + k,
                    offset: 0,
                    snippet: String::new(),
                });
            }
        }
        scans.push(BookScan::from_occurrences(format!("sorted{b}"), pages, occurrences));
    }
    let seqs: Vec<IntroSequence> = scans.iter().map(first_appearances).collect();
    let medians = introduction_ratios_by_level(&seqs).medians;
    ensure(medians.len() == 6, || format!("{} levels", medians.len()))?;
    let m: Vec<f64> = Level::ALL.iter().map(|l| medians[l]).collect();
    ensure(m.windows(2).all(|w| w[0] < w[1]), || format!("medians {m:?}"))?;
    Ok(format!("ratio {ratio:.4}; medians {:?}", m.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()))
}

fn main() {
    let criteria: &[Criterion] = &[
        ("AC-1 perfect sequence and positional diffs", perfect_sequence_reproduction),
        ("AC-2 per-construct divergence table", divergence_table_reproduction),
        ("AC-3 disagreement distribution", disagreement_table_reproduction),
        ("AC-4 extraction metrics", validation_metric_reproduction),
        ("AC-5 WLD oracle equivalence and metric laws", wld_oracle_equivalence),
        ("AC-6 zero-sum positional diffs", zero_sum_diffs),
        ("AC-7 scanner determinism and golden file", scanner_determinism_and_golden),
        ("AC-8 published pattern fidelity", published_pattern_fidelity),
        ("AC-9 CLI pipeline equals library", pipeline_composition),
        ("AC-10 introduction ratios", introduction_ratio_check),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
