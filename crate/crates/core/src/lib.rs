//! Detects programming-language constructs in converted textbooks and source
//! trees, then measures how the order in which constructs are first
//! introduced agrees with their assigned CEFR-style proficiency levels.
//!
//! The pipeline is:
//!
//! 1. [`catalog`]: constructs, levels and detection patterns.
//! 2. [`scanner`]: page segmentation and per-page pattern matching.
//! 3. [`sequence`]: first appearances, level-sorted order and weighted
//!    edit distance between the two.
//! 4. [`divergence`]: positional diffs, per-construct aggregates,
//!    disagreement histogram, presence statistics and extraction metrics.
//! 5. [`report`]: CSV/JSON artifacts and the `profseq` commands.

pub mod catalog;
pub mod divergence;
pub mod report;
pub mod scanner;
pub mod sequence;

pub use catalog::{default_catalog, level_index, load_catalog, Catalog, CatalogError, ConstructDef, Level};
pub use divergence::{
    aggregate_divergence, disagreement_histogram, positional_diffs, presence_stats, suggest_reassignment,
    validation_metrics, DiffRecord, DisagreementHistogram, DivergenceAggregate, PresenceStats, Suggestion,
    ValidationCounts, ValidationMetrics,
};
pub use scanner::{scan_book, scan_page, scan_source_tree, segment_pages, BookScan, BookText, Occurrence};
pub use sequence::{
    book_distance, first_appearances, introduction_ratios_by_level, perfect_sequence, weighted_levenshtein,
    DistanceReport, IntroEntry, IntroSequence,
};
