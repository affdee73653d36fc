#![allow(dead_code)]

use std::path::PathBuf;

use profseq::{Catalog, IntroEntry, IntroSequence, Level};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_catalog() -> Catalog {
    profseq::load_catalog(fixtures().join("catalog.json")).unwrap()
}

pub fn manifest() -> PathBuf {
    fixtures().join("corpus/manifest.json")
}

pub fn seq_of(book: &str, levels: &[Level]) -> IntroSequence {
    IntroSequence {
        book_id: book.into(),
        entries: levels
            .iter()
            .enumerate()
            .map(|(i, &level)| IntroEntry {
                construct: format!("c{i}"),
                level,
                page: i + 1,
                offset: 0,
                intro_ratio: (i + 1) as f64 / levels.len().max(1) as f64,
            })
            .collect(),
    }
}

/// Every sequence over the six levels with length <= `max_len`.
pub fn all_sequences(max_len: usize) -> Vec<Vec<Level>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for l in Level::ALL {
                let mut t: Vec<Level> = s.clone();
                t.push(l);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

// Brute-force edit-distance oracle.
//
// Enumerates every edit script (a left-to-right sequence of keep, substitute,
// delete and insert operations) transforming `a` into `b`, replays each one
// to check it really produces `b`, and prices it with its own cost table.

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Keep(Level),
    Sub(Level, Level),
    Del(Level),
    Ins(Level),
}

fn rank(l: Level) -> i64 {
    match l {
        Level::A1 => 1,
        Level::A2 => 2,
        Level::B1 => 3,
        Level::B2 => 4,
        Level::C1 => 5,
        Level::C2 => 6,
    }
}

fn op_cost(op: Op) -> i64 {
    match op {
        Op::Keep(_) => 0,
        Op::Sub(x, y) => (rank(x) - rank(y)).abs(),
        // the empty symbol sits one step below A1
        Op::Del(x) | Op::Ins(x) => rank(x),
    }
}

fn replay(a: &[Level], script: &[Op]) -> Vec<Level> {
    let mut input = a.iter();
    let mut out = Vec::new();
    for op in script {
        match *op {
            Op::Keep(x) => {
                assert_eq!(input.next(), Some(&x));
                out.push(x);
            }
            Op::Sub(x, y) => {
                assert_eq!(input.next(), Some(&x));
                out.push(y);
            }
            Op::Del(x) => assert_eq!(input.next(), Some(&x)),
            Op::Ins(y) => out.push(y),
        }
    }
    assert!(input.next().is_none());
    out
}

fn enumerate_scripts(a: &[Level], b: &[Level], prefix: &mut Vec<Op>, visit: &mut dyn FnMut(&[Op])) {
    if a.is_empty() && b.is_empty() {
        visit(prefix);
        return;
    }
    if let (Some(&x), Some(&y)) = (a.first(), b.first()) {
        prefix.push(if x == y { Op::Keep(x) } else { Op::Sub(x, y) });
        enumerate_scripts(&a[1..], &b[1..], prefix, visit);
        prefix.pop();
    }
    if let Some(&x) = a.first() {
        prefix.push(Op::Del(x));
        enumerate_scripts(&a[1..], b, prefix, visit);
        prefix.pop();
    }
    if let Some(&y) = b.first() {
        prefix.push(Op::Ins(y));
        enumerate_scripts(a, &b[1..], prefix, visit);
        prefix.pop();
    }
}

/// Minimum cost over all edit scripts, replay-checked.
pub fn brute_force_wld(a: &[Level], b: &[Level]) -> i64 {
    let mut best = i64::MAX;
    let mut visit = |script: &[Op]| {
        let cost: i64 = script.iter().map(|&op| op_cost(op)).sum();
        if cost < best {
            assert_eq!(replay(a, script), b);
            best = cost;
        }
    };
    enumerate_scripts(a, b, &mut Vec::new(), &mut visit);
    best
}

/// Printed divergence rows: (level, construct, diffs, total, relative).
pub const DIVERGENCE_TABLE: &[(Level, &str, &[i32], u32, f64)] = &[
    (Level::C2, "enumfunc", &[4, 4, 3, 4, 3, 2, 3, 2], 25, 3.13),
    (Level::C2, "zip", &[4, 4, 3, 3, 3, 0, 3], 20, 2.86),
    (Level::C2, "map", &[4, 3, 0, 3, 0, 4, 4], 18, 2.57),
    (Level::C2, "listcompnested", &[3, 3, 2, 1], 9, 2.25),
    (Level::C1, "simplelistcomp", &[2, 2, 0, -1, 3, 3, 3, 3], 17, 2.13),
    (Level::C1, "importdbm", &[2, 2], 4, 2.0),
    (Level::C1, "importre", &[2, 0, 2, 3, 3], 10, 2.0),
    (Level::C1, "simpledictcomp", &[2, 2], 4, 2.0),
    (Level::B1, "fromrelative", &[-2, -2], 4, 2.0),
    (Level::A2, "fornested", &[-1, -1, -1, -4, -1, -1, 1, -3], 13, 1.63),
    (Level::C2, "superfunc", &[1, 3, 1, 3, 0], 8, 1.60),
    (Level::C1, "pickle", &[2, 2, 0, 2, 2], 8, 1.60),
    (Level::B2, "__class__", &[1, 3, 1, 2, -1, 1, 2], 11, 1.57),
    (Level::C1, "struct", &[0, 3], 3, 1.50),
    (Level::B1, "whilesimple", &[2, 2, 2, -2, 2, 1, 1, 1, 1, 1, 1, 2], 18, 1.50),
];

/// Printed disagreement distribution: (diff, count, percentage).
pub const DISAGREEMENT_TABLE: &[(i32, usize, f64)] = &[
    (-5, 2, 0.33),
    (-4, 6, 0.99),
    (-3, 18, 2.98),
    (-2, 40, 6.62),
    (-1, 121, 20.03),
    (0, 243, 40.23),
    (1, 101, 16.72),
    (2, 39, 6.46),
    (3, 26, 4.30),
    (4, 8, 1.32),
    (5, 0, 0.00),
];
