//! Consolidated analysis report and figure data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::artifacts::{csv_bytes, sequence_rows, Provenance, SequenceRow};
use crate::catalog::{Catalog, Level};
use crate::divergence::{
    aggregate_divergence, disagreement_histogram, presence_stats, suggest_reassignment, DiffRecord,
    DisagreementHistogram, DivergenceAggregate, PresenceStats, Suggestion,
};
use crate::scanner::BookScan;
use crate::sequence::{introduction_ratios_by_level, DistanceReport, IntroSequence, LevelRatios};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogInfo {
    pub source: String,
    pub sha256: String,
    pub constructs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookDistance {
    pub n: usize,
    pub wld: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookReport {
    pub book_id: String,
    pub total_pages: usize,
    pub occurrences: usize,
    pub distinct_constructs: usize,
    pub counts_by_level: BTreeMap<Level, usize>,
    pub sequence: Vec<SequenceRow>,
    pub distance: BookDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceSection {
    pub threshold: f64,
    pub aggregates: Vec<DivergenceAggregate>,
    pub histogram: DisagreementHistogram,
    pub suggestions: Vec<Suggestion>,
}

/// Everything the pipeline computes, in one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub generated_at: String,
    pub catalog: CatalogInfo,
    pub books: Vec<BookReport>,
    pub introduction: LevelRatios,
    pub divergence: DivergenceSection,
    pub presence: PresenceStats,
}

pub struct ReportInputs<'a> {
    pub catalog: &'a Catalog,
    pub scans: &'a [BookScan],
    pub sequences: &'a [IntroSequence],
    pub distances: &'a [DistanceReport],
    pub diffs: &'a [DiffRecord],
    pub threshold: f64,
    pub generated_at: String,
}

/// Assembles the report. Books follow the order of `scans`.
pub fn build_report(inputs: &ReportInputs<'_>) -> AnalysisReport {
    let provenance = Provenance::of(inputs.catalog);
    let books = inputs
        .scans
        .iter()
        .map(|scan| {
            let seq = inputs.sequences.iter().find(|s| s.book_id == scan.book_id);
            let sequence = seq.map(|s| sequence_rows(std::slice::from_ref(s))).unwrap_or_default();
            let distance = inputs
                .distances
                .iter()
                .find(|d| d.book_id == scan.book_id)
                .map(|d| BookDistance {
                    n: d.n,
                    wld: d.wld,
                    relative: d.relative,
                })
                .unwrap_or(BookDistance {
                    n: 0,
                    wld: 0.0,
                    relative: 0.0,
                });
            let mut names: Vec<&str> = scan.occurrences.iter().map(|o| o.construct.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            BookReport {
                book_id: scan.book_id.clone(),
                total_pages: scan.total_pages,
                occurrences: scan.occurrences.len(),
                distinct_constructs: names.len(),
                counts_by_level: scan.counts_by_level.clone(),
                sequence,
                distance,
            }
        })
        .collect();
    let aggregates = aggregate_divergence(inputs.diffs, inputs.catalog);
    let suggestions = aggregates
        .iter()
        .filter_map(|a| suggest_reassignment(a, inputs.threshold))
        .collect();
    AnalysisReport {
        tool: super::TOOL_NAME.into(),
        version: super::TOOL_VERSION.into(),
        generated_at: inputs.generated_at.clone(),
        catalog: CatalogInfo {
            source: provenance.source,
            sha256: provenance.sha256,
            constructs: inputs.catalog.len(),
        },
        books,
        introduction: introduction_ratios_by_level(inputs.sequences),
        divergence: DivergenceSection {
            threshold: inputs.threshold,
            histogram: disagreement_histogram(inputs.diffs),
            aggregates,
            suggestions,
        },
        presence: presence_stats(inputs.scans, inputs.catalog),
    }
}

pub const REPORT_FILE: &str = "report.json";
pub const FIG_LEVEL_COUNTS_FILE: &str = "fig_level_counts.csv";
pub const FIG_BOOKS_PER_CONSTRUCT_FILE: &str = "fig_books_per_construct.csv";
pub const FIG_INTRO_RATIOS_FILE: &str = "fig_intro_ratios.csv";

#[derive(Debug, Serialize)]
struct LevelCountsRow<'a> {
    book_id: &'a str,
    a1: usize,
    a2: usize,
    b1: usize,
    b2: usize,
    c1: usize,
    c2: usize,
}

#[derive(Debug, Serialize)]
struct BooksPerConstructRow<'a> {
    construct: &'a str,
    level: Level,
    books: usize,
}

#[derive(Debug, Serialize)]
struct IntroRatioRow<'a> {
    level: Level,
    book_id: &'a str,
    construct: &'a str,
    intro_ratio: f64,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("serializable");
        bytes.push(b'\n');
        bytes
    }

    /// Occurrences per level and book (stacked bar chart).
    pub fn level_counts_csv(&self) -> Vec<u8> {
        let rows: Vec<_> = self
            .books
            .iter()
            .map(|b| {
                let c = |l: Level| b.counts_by_level.get(&l).copied().unwrap_or(0);
                LevelCountsRow {
                    book_id: &b.book_id,
                    a1: c(Level::A1),
                    a2: c(Level::A2),
                    b1: c(Level::B1),
                    b2: c(Level::B2),
                    c1: c(Level::C1),
                    c2: c(Level::C2),
                }
            })
            .collect();
        csv_bytes(&["book_id", "a1", "a2", "b1", "b2", "c1", "c2"], &rows)
    }

    /// Number of books containing each catalog construct.
    pub fn books_per_construct_csv(&self, catalog: &Catalog) -> Vec<u8> {
        let rows: Vec<_> = self
            .presence
            .per_construct_book_count
            .iter()
            .map(|(name, books)| BooksPerConstructRow {
                construct: name,
                level: catalog.level_of(name).unwrap_or(Level::A1),
                books: *books,
            })
            .collect();
        csv_bytes(&["construct", "level", "books"], &rows)
    }

    /// One point per first appearance, grouped by level.
    pub fn intro_ratios_csv(&self) -> Vec<u8> {
        let mut rows: Vec<_> = self
            .books
            .iter()
            .flat_map(|b| {
                b.sequence.iter().map(move |e| IntroRatioRow {
                    level: e.level,
                    book_id: &b.book_id,
                    construct: &e.construct,
                    intro_ratio: e.intro_ratio,
                })
            })
            .collect();
        rows.sort_by_key(|r| r.level);
        csv_bytes(&["level", "book_id", "construct", "intro_ratio"], &rows)
    }
}
