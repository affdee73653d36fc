//! Introduction sequences and their distance to the level-sorted order.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::catalog::Level;
use crate::scanner::BookScan;

/// First appearance of one construct in one book.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntroEntry {
    pub construct: String,
    pub level: Level,
    pub page: usize,
    pub offset: usize,
    /// `page / total_pages`.
    pub intro_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntroSequence {
    pub book_id: String,
    pub entries: Vec<IntroEntry>,
}

impl IntroSequence {
    pub fn levels(&self) -> Vec<Level> {
        self.entries.iter().map(|e| e.level).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub book_id: String,
    pub n: usize,
    pub wld: f64,
    pub relative: f64,
}

/// One entry per construct at its minimal `(page, offset)`.
///
/// Occurrence order in `scan` breaks ties at identical positions; a scan
/// produced by the scanner holds catalog order there.
pub fn first_appearances(scan: &BookScan) -> IntroSequence {
    // construct -> (page, offset, position in scan)
    let mut best: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    for (pos, o) in scan.occurrences.iter().enumerate() {
        let key = (o.page, o.offset, pos);
        best.entry(o.construct.as_str())
            .and_modify(|k| {
                if key < *k {
                    *k = key;
                }
            })
            .or_insert(key);
    }
    let mut firsts: Vec<_> = best.into_values().collect();
    firsts.sort_unstable();
    let total = scan.total_pages.max(1) as f64;
    let entries = firsts
        .into_iter()
        .map(|(page, offset, pos)| {
            let o = &scan.occurrences[pos];
            IntroEntry {
                construct: o.construct.clone(),
                level: o.level,
                page,
                offset,
                intro_ratio: page as f64 / total,
            }
        })
        .collect();
    IntroSequence {
        book_id: scan.book_id.clone(),
        entries,
    }
}

/// The same levels, sorted from A1 to C2.
pub fn perfect_sequence(levels: &[Level]) -> Vec<Level> {
    let mut sorted = levels.to_vec();
    sorted.sort();
    sorted
}

pub fn substitution_cost(x: Level, y: Level) -> f64 {
    x.index().abs_diff(y.index()) as f64
}

/// Cost of inserting or deleting `x`.
pub fn indel_cost(x: Level) -> f64 {
    (x.index() + 1) as f64
}

/// Weighted edit distance between two level sequences.
///
/// Substituting `x` by `y` costs `|index(x) - index(y)|`; inserting or
/// deleting `x` costs `index(x) + 1`.
pub fn weighted_levenshtein(a: &[Level], b: &[Level]) -> f64 {
    let mut prev: Vec<f64> = Vec::with_capacity(b.len() + 1);
    prev.push(0.0);
    for &y in b {
        let last = *prev.last().unwrap();
        prev.push(last + indel_cost(y));
    }
    let mut cur = vec![0.0; b.len() + 1];
    for &x in a {
        cur[0] = prev[0] + indel_cost(x);
        for (j, &y) in b.iter().enumerate() {
            let delete = prev[j + 1] + indel_cost(x);
            let insert = cur[j] + indel_cost(y);
            let substitute = prev[j] + substitution_cost(x, y);
            cur[j + 1] = delete.min(insert).min(substitute);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Distance between a book's introduction order and the level-sorted order.
pub fn book_distance(seq: &IntroSequence) -> DistanceReport {
    let levels = seq.levels();
    let perfect = perfect_sequence(&levels);
    let wld = weighted_levenshtein(&levels, &perfect);
    let n = levels.len();
    DistanceReport {
        book_id: seq.book_id.clone(),
        n,
        wld,
        relative: if n == 0 { 0.0 } else { wld / n as f64 },
    }
}

/// Introduction ratios grouped by level across a corpus.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelRatios {
    /// Ascending per level; levels without entries are absent.
    pub ratios: BTreeMap<Level, Vec<f64>>,
    pub medians: BTreeMap<Level, f64>,
}

pub fn introduction_ratios_by_level(seqs: &[IntroSequence]) -> LevelRatios {
    let mut ratios: BTreeMap<Level, Vec<f64>> = BTreeMap::new();
    for e in seqs.iter().flat_map(|s| &s.entries) {
        ratios.entry(e.level).or_default().push(e.intro_ratio);
    }
    let mut medians = BTreeMap::new();
    for (level, values) in ratios.iter_mut() {
        values.sort_by(f64::total_cmp);
        if let Some(m) = median(values) {
            medians.insert(*level, m);
        }
    }
    LevelRatios { ratios, medians }
}

/// Median of an ascending slice.
pub fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}
