//! One function per CLI subcommand. The binary only parses arguments and
//! maps errors to exit codes.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::analysis::{
    build_report, AnalysisReport, ReportInputs, FIG_BOOKS_PER_CONSTRUCT_FILE, FIG_INTRO_RATIOS_FILE,
    FIG_LEVEL_COUNTS_FILE, REPORT_FILE,
};
use super::artifacts::{
    check_provenance, csv_bytes, profile_rows, read_diffs, read_distances, read_scan, read_sequences, write_distances,
    write_divergence, write_scan, write_sequences, Provenance, PROFILE_HEADER,
};
use super::{fmt2, write_atomic, Error, Result, REPRO_TIMESTAMP};
use crate::catalog::{default_catalog, load_catalog, Catalog};
use crate::divergence::{
    aggregate_divergence, disagreement_histogram, positional_diffs, suggest_reassignment, DiffRecord,
    DisagreementHistogram, DivergenceAggregate, Suggestion,
};
use crate::scanner::{scan_book, scan_source_tree, BookScan, BookText, ScanWarning};
use crate::sequence::{book_distance, first_appearances, DistanceReport, IntroSequence};

/// Explicit path if given, otherwise the embedded catalog.
pub fn resolve_catalog(path: Option<&Path>) -> Result<Catalog> {
    match path {
        Some(p) => Ok(load_catalog(p)?),
        None => Ok(default_catalog()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub book_id: String,
    pub path: PathBuf,
}

/// JSON array of `{"book_id": ..., "path": ...}`. Relative paths are
/// resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let mut entries: Vec<ManifestEntry> = serde_json::from_str(text).map_err(|e| Error::MalformedJson {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut ids = HashSet::new();
        let mut paths = HashSet::new();
        for e in &mut entries {
            if e.path.is_relative() {
                e.path = base.join(&e.path);
            }
            if !ids.insert(e.book_id.clone()) {
                return Err(Error::Invalid(format!("manifest: duplicate book_id `{}`", e.book_id)));
            }
            if !paths.insert(e.path.clone()) {
                return Err(Error::Invalid(format!("manifest: duplicate path `{}`", e.path.display())));
            }
        }
        Ok(CorpusManifest { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        CorpusManifest::parse(&text, base, path)
    }
}

#[derive(Debug, Clone)]
pub enum ScanInput {
    /// One text file; the book id is its file stem.
    File(PathBuf),
    Manifest(PathBuf),
}

pub fn load_books(input: &ScanInput) -> Result<Vec<BookText>> {
    let entries = match input {
        ScanInput::File(path) => {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            vec![ManifestEntry {
                book_id: id,
                path: path.clone(),
            }]
        }
        ScanInput::Manifest(path) => CorpusManifest::load(path)?.entries,
    };
    entries
        .into_iter()
        .map(|e| {
            let text = std::fs::read_to_string(&e.path).map_err(|err| Error::io(&e.path, err))?;
            Ok(BookText::from_text(e.book_id, &text))
        })
        .collect()
}

/// `profseq scan`: occurrences CSV, sidecar and JSON mirror.
pub fn cmd_scan(input: &ScanInput, catalog: &Catalog, out: &Path) -> Result<Vec<BookScan>> {
    let books = load_books(input)?;
    let scans: Vec<BookScan> = books.iter().map(|b| scan_book(b, catalog)).collect();
    write_scan(out, &scans, &Provenance::of(catalog))?;
    Ok(scans)
}

/// `profseq sequence`: first appearances per book.
pub fn cmd_sequence(occurrences: &Path, out: &Path) -> Result<Vec<IntroSequence>> {
    let artifact = read_scan(occurrences)?;
    let seqs: Vec<IntroSequence> = artifact.scans.iter().map(first_appearances).collect();
    write_sequences(out, &seqs, &artifact.meta)?;
    Ok(seqs)
}

/// Human-readable distance table with two-decimal relative distances.
pub fn distance_table(reports: &[DistanceReport]) -> String {
    let width = reports.iter().map(|r| r.book_id.len()).max().unwrap_or(0).max("book".len());
    let mut out = format!("{:<width$}  {:>5}  {:>8}  {:>8}\n", "book", "n", "distance", "relative");
    for r in reports {
        out.push_str(&format!(
            "{:<width$}  {:>5}  {:>8}  {:>8}\n",
            r.book_id,
            r.n,
            r.wld,
            fmt2(r.relative)
        ));
    }
    out
}

/// `profseq distance`.
pub fn cmd_distance(sequences: &Path, out: &Path) -> Result<Vec<DistanceReport>> {
    let artifact = read_sequences(sequences)?;
    let reports: Vec<DistanceReport> = artifact.sequences.iter().map(book_distance).collect();
    write_distances(out, &reports, &artifact.meta)?;
    Ok(reports)
}

#[derive(Debug, Clone)]
pub struct DivergenceOutcome {
    pub records: Vec<DiffRecord>,
    pub aggregates: Vec<DivergenceAggregate>,
    pub histogram: DisagreementHistogram,
    pub suggestions: Vec<Suggestion>,
}

pub fn check_threshold(threshold: f64) -> Result<f64> {
    if threshold.is_finite() && threshold >= 0.0 {
        Ok(threshold)
    } else {
        Err(Error::Usage(format!("--threshold must be a non-negative number, got {threshold}")))
    }
}

/// Divergence analytics over sequences. An empty catalog makes the
/// aggregates take levels from the records themselves.
pub fn divergence_of(seqs: &[IntroSequence], catalog: &Catalog, threshold: f64) -> DivergenceOutcome {
    let records: Vec<DiffRecord> = seqs.iter().flat_map(positional_diffs).collect();
    let aggregates = aggregate_divergence(&records, catalog);
    let histogram = disagreement_histogram(&records);
    let suggestions = aggregates
        .iter()
        .filter_map(|a| suggest_reassignment(a, threshold))
        .collect();
    DivergenceOutcome {
        records,
        aggregates,
        histogram,
        suggestions,
    }
}

/// `profseq divergence`: writes diffs, aggregates, histogram and
/// suggestions CSVs into `out_dir`.
pub fn cmd_divergence(sequences: &Path, out_dir: &Path, threshold: f64) -> Result<DivergenceOutcome> {
    let threshold = check_threshold(threshold)?;
    let artifact = read_sequences(sequences)?;
    let levels_from_records = Catalog::new(Vec::new(), "records").expect("empty catalog");
    let outcome = divergence_of(&artifact.sequences, &levels_from_records, threshold);
    write_divergence(
        out_dir,
        &outcome.records,
        &outcome.aggregates,
        &outcome.histogram,
        &outcome.suggestions,
        &artifact.meta,
    )?;
    Ok(outcome)
}

/// Profile CSV for a source tree, plus the non-fatal warnings.
pub fn profile_csv(root: &Path, catalog: &Catalog) -> Result<(Vec<u8>, Vec<ScanWarning>)> {
    let tree = scan_source_tree(root, catalog)?;
    Ok((csv_bytes(PROFILE_HEADER, &profile_rows(&tree.files)), tree.warnings))
}

/// `profseq profile`. Writes the CSV to `out` when given and returns it.
pub fn cmd_profile(root: &Path, catalog: &Catalog, out: Option<&Path>) -> Result<(Vec<u8>, Vec<ScanWarning>)> {
    let (bytes, warnings) = profile_csv(root, catalog)?;
    if let Some(out) = out {
        write_atomic(out, &bytes)?;
    }
    Ok((bytes, warnings))
}

#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub occurrences: PathBuf,
    pub sequences: PathBuf,
    /// Recomputed from the sequences when absent.
    pub distances: Option<PathBuf>,
    /// Recomputed from the sequences when absent.
    pub diffs: Option<PathBuf>,
}

pub fn timestamp(repro: bool) -> String {
    if repro {
        return REPRO_TIMESTAMP.to_string();
    }
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| REPRO_TIMESTAMP.to_string())
}

/// `profseq report`: consolidated JSON plus plot-data CSVs in `out_dir`.
pub fn cmd_report(paths: &ReportPaths, catalog: &Catalog, out_dir: &Path, threshold: f64, repro: bool) -> Result<AnalysisReport> {
    let threshold = check_threshold(threshold)?;
    let catalog_prov = Provenance::of(catalog);
    let catalog_label = format!("catalog {}", catalog.source());

    let scan = read_scan(&paths.occurrences)?;
    let occ_label = paths.occurrences.display().to_string();
    check_provenance((&catalog_label, &catalog_prov), (&occ_label, &scan.meta.catalog))?;

    let seqs = read_sequences(&paths.sequences)?;
    check_provenance(
        (&occ_label, &scan.meta.catalog),
        (&paths.sequences.display().to_string(), &seqs.meta.catalog),
    )?;

    let distances = match &paths.distances {
        Some(p) => {
            let (meta, reports) = read_distances(p)?;
            check_provenance((&occ_label, &scan.meta.catalog), (&p.display().to_string(), &meta.catalog))?;
            reports
        }
        None => seqs.sequences.iter().map(book_distance).collect(),
    };
    let diffs = match &paths.diffs {
        Some(p) => {
            let (meta, records) = read_diffs(p)?;
            check_provenance((&occ_label, &scan.meta.catalog), (&p.display().to_string(), &meta.catalog))?;
            records
        }
        None => seqs.sequences.iter().flat_map(positional_diffs).collect(),
    };

    let report = build_report(&ReportInputs {
        catalog,
        scans: &scan.scans,
        sequences: &seqs.sequences,
        distances: &distances,
        diffs: &diffs,
        threshold,
        generated_at: timestamp(repro),
    });
    write_atomic(&out_dir.join(REPORT_FILE), &report.to_json())?;
    write_atomic(&out_dir.join(FIG_LEVEL_COUNTS_FILE), &report.level_counts_csv())?;
    write_atomic(&out_dir.join(FIG_BOOKS_PER_CONSTRUCT_FILE), &report.books_per_construct_csv(catalog))?;
    write_atomic(&out_dir.join(FIG_INTRO_RATIOS_FILE), &report.intro_ratios_csv())?;
    Ok(report)
}
