//! CSV artifacts, their metadata sidecars and the scan JSON mirror.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{fmt2, write_atomic, Error, Result, TOOL_NAME, TOOL_VERSION};
use crate::catalog::{Catalog, Level};
use crate::divergence::{DiffRecord, DisagreementHistogram, DivergenceAggregate, Suggestion};
use crate::scanner::{BookScan, Occurrence};
use crate::sequence::{DistanceReport, IntroEntry, IntroSequence};

pub const OCCURRENCES_HEADER: &[&str] = &["book_id", "construct", "level", "page", "offset", "snippet"];
pub const SEQUENCES_HEADER: &[&str] = &["book_id", "rank", "construct", "level", "page", "offset", "intro_ratio"];
pub const DISTANCES_HEADER: &[&str] = &["book_id", "n", "wld", "relative"];
pub const DIFFS_HEADER: &[&str] = &["book_id", "construct", "level", "slot_level", "diff"];
pub const AGGREGATES_HEADER: &[&str] = &["construct", "level", "diffs", "total", "relative", "books"];
pub const HISTOGRAM_HEADER: &[&str] = &["diff", "count", "percentage"];
pub const SUGGESTIONS_HEADER: &[&str] = &["construct", "current", "suggested", "relative"];
pub const PROFILE_HEADER: &[&str] = &["path", "a1", "a2", "b1", "b2", "c1", "c2", "max_level"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub source: String,
    pub sha256: String,
}

impl Provenance {
    pub fn of(catalog: &Catalog) -> Self {
        Provenance {
            source: catalog.source().to_string(),
            sha256: catalog.digest().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookMeta {
    pub book_id: String,
    pub total_pages: usize,
}

/// Contents of a `*.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactMeta {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub catalog: Provenance,
    pub books: Vec<BookMeta>,
}

impl ArtifactMeta {
    pub fn new(kind: &str, catalog: Provenance, books: Vec<BookMeta>) -> Self {
        ArtifactMeta {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            kind: kind.into(),
            catalog,
            books,
        }
    }

    pub fn with_kind(&self, kind: &str) -> Self {
        ArtifactMeta {
            kind: kind.into(),
            ..self.clone()
        }
    }

    fn total_pages(&self) -> HashMap<&str, usize> {
        self.books.iter().map(|b| (b.book_id.as_str(), b.total_pages)).collect()
    }
}

/// `dir/name.csv` -> `dir/name.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// `dir/name.csv` -> `dir/name.json`.
pub fn mirror_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn read_meta(csv: &Path) -> Result<ArtifactMeta> {
    let path = meta_path(csv);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedJson {
        path,
        message: e.to_string(),
    })
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

pub fn write_meta(csv: &Path, meta: &ArtifactMeta) -> Result<()> {
    write_atomic(&meta_path(csv), &json_bytes(meta))
}

// Rows

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceRow {
    pub book_id: String,
    pub construct: String,
    pub level: Level,
    pub page: usize,
    pub offset: usize,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub book_id: String,
    pub rank: usize,
    pub construct: String,
    pub level: Level,
    pub page: usize,
    pub offset: usize,
    pub intro_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub book_id: String,
    pub n: usize,
    pub wld: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub book_id: String,
    pub construct: String,
    pub level: Level,
    pub slot_level: Level,
    pub diff: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub construct: String,
    pub level: Level,
    pub diffs: String,
    pub total: u32,
    pub relative: String,
    pub books: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub diff: i32,
    pub count: usize,
    pub percentage: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionRow {
    pub construct: String,
    pub current: Level,
    pub suggested: Level,
    pub relative: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub path: String,
    pub a1: usize,
    pub a2: usize,
    pub b1: usize,
    pub b2: usize,
    pub c1: usize,
    pub c2: usize,
    pub max_level: String,
}

impl From<&DiffRecord> for DiffRow {
    fn from(r: &DiffRecord) -> Self {
        DiffRow {
            book_id: r.book_id.clone(),
            construct: r.construct.clone(),
            level: r.level,
            slot_level: r.slot_level,
            diff: r.diff,
        }
    }
}

impl From<DiffRow> for DiffRecord {
    fn from(r: DiffRow) -> Self {
        DiffRecord {
            book_id: r.book_id,
            construct: r.construct,
            level: r.level,
            slot_level: r.slot_level,
            diff: r.diff,
        }
    }
}

impl From<&DivergenceAggregate> for AggregateRow {
    fn from(a: &DivergenceAggregate) -> Self {
        AggregateRow {
            construct: a.construct.clone(),
            level: a.level,
            diffs: a.diffs.iter().map(i32::to_string).collect::<Vec<_>>().join(" "),
            total: a.total,
            relative: fmt2(a.relative),
            books: a.books,
        }
    }
}

impl From<&Suggestion> for SuggestionRow {
    fn from(s: &Suggestion) -> Self {
        SuggestionRow {
            construct: s.construct.clone(),
            current: s.current,
            suggested: s.suggested,
            relative: fmt2(s.relative),
        }
    }
}

impl From<&DistanceReport> for DistanceRow {
    fn from(d: &DistanceReport) -> Self {
        DistanceRow {
            book_id: d.book_id.clone(),
            n: d.n,
            wld: d.wld,
            relative: d.relative,
        }
    }
}

impl From<DistanceRow> for DistanceReport {
    fn from(d: DistanceRow) -> Self {
        DistanceReport {
            book_id: d.book_id,
            n: d.n,
            wld: d.wld,
            relative: d.relative,
        }
    }
}

pub fn histogram_rows(h: &DisagreementHistogram) -> Vec<HistogramRow> {
    h.bins
        .iter()
        .map(|(&diff, bin)| HistogramRow {
            diff,
            count: bin.count,
            percentage: fmt2(bin.percentage),
        })
        .collect()
}

pub fn occurrence_rows(scans: &[BookScan]) -> Vec<OccurrenceRow> {
    scans
        .iter()
        .flat_map(|s| {
            s.occurrences.iter().map(move |o| OccurrenceRow {
                book_id: s.book_id.clone(),
                construct: o.construct.clone(),
                level: o.level,
                page: o.page,
                offset: o.offset,
                snippet: o.snippet.clone(),
            })
        })
        .collect()
}

pub fn sequence_rows(seqs: &[IntroSequence]) -> Vec<SequenceRow> {
    seqs.iter()
        .flat_map(|s| {
            s.entries.iter().enumerate().map(move |(i, e)| SequenceRow {
                book_id: s.book_id.clone(),
                rank: i + 1,
                construct: e.construct.clone(),
                level: e.level,
                page: e.page,
                offset: e.offset,
                intro_ratio: e.intro_ratio,
            })
        })
        .collect()
}

// CSV encoding

/// Serializes rows with a header line, even when there are no rows.
pub fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(header, rows))
}

/// Parses CSV text whose first record must equal `header`.
pub fn parse_csv<T: DeserializeOwned>(path: &Path, text: &str, header: &[&str]) -> Result<Vec<T>> {
    let malformed = |line: u64, message: String| Error::MalformedCsv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let found = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(malformed(
            1,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<T>().enumerate() {
        match rec {
            Ok(r) => rows.push(r),
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(i as u64 + 2);
                return Err(malformed(line, csv_error_message(&e)));
            }
        }
    }
    Ok(rows)
}

fn csv_error_message(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("field {}: {}", f + 1, err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

pub fn read_csv<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(path, &text, header)
}

// Scan artifact: CSV + sidecar + JSON mirror

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorOccurrence {
    pub construct: String,
    pub level: Level,
    pub offset: usize,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorBook {
    pub total_pages: usize,
    pub counts_by_level: BTreeMap<Level, usize>,
    /// Page number (as a string key) -> occurrences on that page.
    pub pages: serde_json::Map<String, serde_json::Value>,
}

/// JSON mirror of a scan, keyed book -> page -> occurrences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanMirror {
    pub tool: String,
    pub version: String,
    pub catalog: Provenance,
    pub books: serde_json::Map<String, serde_json::Value>,
}

pub fn scan_mirror(scans: &[BookScan], provenance: &Provenance) -> ScanMirror {
    let mut books = serde_json::Map::new();
    for s in scans {
        let mut pages = serde_json::Map::new();
        for p in 1..=s.total_pages {
            pages.insert(p.to_string(), serde_json::Value::Array(Vec::new()));
        }
        for o in &s.occurrences {
            let entry = MirrorOccurrence {
                construct: o.construct.clone(),
                level: o.level,
                offset: o.offset,
                snippet: o.snippet.clone(),
            };
            if let Some(serde_json::Value::Array(list)) = pages.get_mut(&o.page.to_string()) {
                list.push(serde_json::to_value(entry).expect("serializable"));
            }
        }
        let book = MirrorBook {
            total_pages: s.total_pages,
            counts_by_level: s.counts_by_level.clone(),
            pages,
        };
        books.insert(s.book_id.clone(), serde_json::to_value(book).expect("serializable"));
    }
    ScanMirror {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        catalog: provenance.clone(),
        books,
    }
}

pub fn scan_meta(scans: &[BookScan], provenance: &Provenance) -> ArtifactMeta {
    ArtifactMeta::new(
        "occurrences",
        provenance.clone(),
        scans
            .iter()
            .map(|s| BookMeta {
                book_id: s.book_id.clone(),
                total_pages: s.total_pages,
            })
            .collect(),
    )
}

/// Byte contents of the three scan outputs: CSV, sidecar, mirror.
pub fn scan_outputs(scans: &[BookScan], provenance: &Provenance) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    (
        csv_bytes(OCCURRENCES_HEADER, &occurrence_rows(scans)),
        json_bytes(&scan_meta(scans, provenance)),
        json_bytes(&scan_mirror(scans, provenance)),
    )
}

pub fn write_scan(csv: &Path, scans: &[BookScan], provenance: &Provenance) -> Result<()> {
    let (rows, meta, mirror) = scan_outputs(scans, provenance);
    write_atomic(csv, &rows)?;
    write_atomic(&meta_path(csv), &meta)?;
    write_atomic(&mirror_path(csv), &mirror)
}

/// Groups rows by book, following the sidecar's book order.
fn group_by_book<'a, R, F>(meta: &'a ArtifactMeta, rows: Vec<R>, book_of: F, path: &Path) -> Result<Vec<(&'a BookMeta, Vec<R>)>>
where
    F: Fn(&R) -> &str,
{
    let mut slots: Vec<(&BookMeta, Vec<R>)> = meta.books.iter().map(|b| (b, Vec::new())).collect();
    let index: HashMap<&str, usize> = meta.books.iter().enumerate().map(|(i, b)| (b.book_id.as_str(), i)).collect();
    for row in rows {
        let id = book_of(&row);
        match index.get(id) {
            Some(&i) => slots[i].1.push(row),
            None => {
                return Err(Error::Invalid(format!(
                    "{}: book `{id}` is not listed in {}",
                    path.display(),
                    meta_path(path).display()
                )))
            }
        }
    }
    Ok(slots)
}

/// Occurrence CSV plus its sidecar, rebuilt into per-book scans.
#[derive(Debug, Clone)]
pub struct ScanArtifact {
    pub meta: ArtifactMeta,
    pub scans: Vec<BookScan>,
}

pub fn read_scan(csv: &Path) -> Result<ScanArtifact> {
    let meta = read_meta(csv)?;
    let rows: Vec<OccurrenceRow> = read_csv(csv, OCCURRENCES_HEADER)?;
    let pages = meta.total_pages();
    for r in &rows {
        let total = pages.get(r.book_id.as_str()).copied().unwrap_or(0);
        if r.page == 0 || r.page > total {
            return Err(Error::Invalid(format!(
                "{}: book `{}` has {} pages but a row refers to page {}",
                csv.display(),
                r.book_id,
                total,
                r.page
            )));
        }
    }
    let scans = group_by_book(&meta, rows, |r| &r.book_id, csv)?
        .into_iter()
        .map(|(book, rows)| {
            let occurrences = rows
                .into_iter()
                .map(|r| Occurrence {
                    construct: r.construct,
                    level: r.level,
                    page: r.page,
                    offset: r.offset,
                    snippet: r.snippet,
                })
                .collect();
            BookScan::from_occurrences(book.book_id.clone(), book.total_pages, occurrences)
        })
        .collect();
    Ok(ScanArtifact { meta, scans })
}

#[derive(Debug, Clone)]
pub struct SequenceArtifact {
    pub meta: ArtifactMeta,
    pub sequences: Vec<IntroSequence>,
}

pub fn write_sequences(csv: &Path, seqs: &[IntroSequence], meta: &ArtifactMeta) -> Result<()> {
    write_csv(csv, SEQUENCES_HEADER, &sequence_rows(seqs))?;
    write_meta(csv, &meta.with_kind("sequences"))
}

pub fn read_sequences(csv: &Path) -> Result<SequenceArtifact> {
    let meta = read_meta(csv)?;
    let rows: Vec<SequenceRow> = read_csv(csv, SEQUENCES_HEADER)?;
    let mut sequences = Vec::with_capacity(meta.books.len());
    for (book, mut rows) in group_by_book(&meta, rows, |r| &r.book_id, csv)? {
        rows.sort_by_key(|r| r.rank);
        for (i, r) in rows.iter().enumerate() {
            if r.rank != i + 1 {
                return Err(Error::Invalid(format!(
                    "{}: book `{}` ranks are not 1..{}",
                    csv.display(),
                    book.book_id,
                    rows.len()
                )));
            }
        }
        sequences.push(IntroSequence {
            book_id: book.book_id.clone(),
            entries: rows
                .into_iter()
                .map(|r| IntroEntry {
                    construct: r.construct,
                    level: r.level,
                    page: r.page,
                    offset: r.offset,
                    intro_ratio: r.intro_ratio,
                })
                .collect(),
        });
    }
    Ok(SequenceArtifact { meta, sequences })
}

pub fn write_distances(csv: &Path, reports: &[DistanceReport], meta: &ArtifactMeta) -> Result<()> {
    let rows: Vec<DistanceRow> = reports.iter().map(DistanceRow::from).collect();
    write_csv(csv, DISTANCES_HEADER, &rows)?;
    write_meta(csv, &meta.with_kind("distances"))
}

pub fn read_distances(csv: &Path) -> Result<(ArtifactMeta, Vec<DistanceReport>)> {
    let meta = read_meta(csv)?;
    let rows: Vec<DistanceRow> = read_csv(csv, DISTANCES_HEADER)?;
    Ok((meta, rows.into_iter().map(DistanceReport::from).collect()))
}

pub fn read_diffs(csv: &Path) -> Result<(ArtifactMeta, Vec<DiffRecord>)> {
    let meta = read_meta(csv)?;
    let rows: Vec<DiffRow> = read_csv(csv, DIFFS_HEADER)?;
    Ok((meta, rows.into_iter().map(DiffRecord::from).collect()))
}

/// File names written into the divergence output directory.
pub const DIFFS_FILE: &str = "diffs.csv";
pub const AGGREGATES_FILE: &str = "aggregates.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const SUGGESTIONS_FILE: &str = "suggestions.csv";

pub fn write_divergence(
    dir: &Path,
    records: &[DiffRecord],
    aggregates: &[DivergenceAggregate],
    histogram: &DisagreementHistogram,
    suggestions: &[Suggestion],
    meta: &ArtifactMeta,
) -> Result<()> {
    let diffs: Vec<DiffRow> = records.iter().map(DiffRow::from).collect();
    let aggs: Vec<AggregateRow> = aggregates.iter().map(AggregateRow::from).collect();
    let sugg: Vec<SuggestionRow> = suggestions.iter().map(SuggestionRow::from).collect();
    let outputs: [(&str, &str, Vec<u8>); 4] = [
        (DIFFS_FILE, "diffs", csv_bytes(DIFFS_HEADER, &diffs)),
        (AGGREGATES_FILE, "aggregates", csv_bytes(AGGREGATES_HEADER, &aggs)),
        (HISTOGRAM_FILE, "histogram", csv_bytes(HISTOGRAM_HEADER, &histogram_rows(histogram))),
        (SUGGESTIONS_FILE, "suggestions", csv_bytes(SUGGESTIONS_HEADER, &sugg)),
    ];
    for (name, kind, bytes) in outputs {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        write_meta(&path, &meta.with_kind(kind))?;
    }
    Ok(())
}

pub fn profile_rows(files: &[(String, BookScan)]) -> Vec<ProfileRow> {
    files
        .iter()
        .map(|(path, scan)| {
            let c = |l: Level| scan.counts_by_level.get(&l).copied().unwrap_or(0);
            ProfileRow {
                path: path.clone(),
                a1: c(Level::A1),
                a2: c(Level::A2),
                b1: c(Level::B1),
                b2: c(Level::B2),
                c1: c(Level::C1),
                c2: c(Level::C2),
                max_level: scan.max_level().map_or_else(|| "-".to_string(), |l| l.to_string()),
            }
        })
        .collect()
}

/// Fails when two artifacts were produced under different catalogs.
pub fn check_provenance(left: (&str, &Provenance), right: (&str, &Provenance)) -> Result<()> {
    if left.1.sha256 == right.1.sha256 {
        Ok(())
    } else {
        Err(Error::ProvenanceMismatch {
            left: left.0.to_string(),
            left_digest: left.1.sha256.clone(),
            right: right.0.to_string(),
            right_digest: right.1.sha256.clone(),
        })
    }
}
