//! Page segmentation and pattern scanning.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, Level};

/// Page separator emitted by pdftotext-style converters.
pub const FORM_FEED: char = '\u{000C}';

/// Maximum snippet length, in characters.
pub const SNIPPET_MAX_CHARS: usize = 200;

/// A converted document split into pages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BookText {
    pub book_id: String,
    pages: Vec<String>,
}

impl BookText {
    /// An empty page list is replaced by a single empty page.
    pub fn new(book_id: impl Into<String>, pages: Vec<String>) -> Self {
        let pages = if pages.is_empty() { vec![String::new()] } else { pages };
        BookText {
            book_id: book_id.into(),
            pages,
        }
    }

    pub fn from_text(book_id: impl Into<String>, text: &str) -> Self {
        BookText::new(book_id, segment_pages(text))
    }

    pub fn pages(&self) -> &[String] {
        &self.pages
    }

    pub fn total_pages(&self) -> usize {
        self.pages.len()
    }
}

/// Splits on form feeds; `k` separators give `k + 1` pages.
pub fn segment_pages(text: &str) -> Vec<String> {
    text.split(FORM_FEED).map(str::to_owned).collect()
}

/// One pattern hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub construct: String,
    pub level: Level,
    /// 1-based.
    pub page: usize,
    /// 0-based character index within the page.
    pub offset: usize,
    pub snippet: String,
}

/// All occurrences found in one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookScan {
    pub book_id: String,
    pub total_pages: usize,
    pub occurrences: Vec<Occurrence>,
    pub counts_by_level: BTreeMap<Level, usize>,
}

impl BookScan {
    /// Builds a scan from occurrences that are already in catalog order
    /// within each `(page, offset)`; the sort is stable so that order
    /// survives.
    pub fn from_occurrences(book_id: impl Into<String>, total_pages: usize, mut occurrences: Vec<Occurrence>) -> Self {
        occurrences.sort_by_key(|o| (o.page, o.offset));
        let counts_by_level = count_by_level(&occurrences);
        BookScan {
            book_id: book_id.into(),
            total_pages,
            occurrences,
            counts_by_level,
        }
    }

    /// Level of the most advanced construct present, if any.
    pub fn max_level(&self) -> Option<Level> {
        self.occurrences.iter().map(|o| o.level).max()
    }
}

fn count_by_level(occurrences: &[Occurrence]) -> BTreeMap<Level, usize> {
    let mut counts: BTreeMap<Level, usize> = Level::ALL.iter().map(|l| (*l, 0)).collect();
    for o in occurrences {
        *counts.entry(o.level).or_default() += 1;
    }
    counts
}

// Maps byte offsets to character offsets within one page.
struct CharIndex<'a> {
    text: &'a str,
    ascii: bool,
}

impl<'a> CharIndex<'a> {
    fn new(text: &'a str) -> Self {
        CharIndex {
            text,
            ascii: text.is_ascii(),
        }
    }

    fn char_offset(&self, byte: usize) -> usize {
        if self.ascii {
            byte
        } else {
            self.text[..byte].chars().count()
        }
    }
}

fn truncate_chars(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((cut, _)) => s[..cut].to_owned(),
        None => s.to_owned(),
    }
}

/// Applies every construct of `catalog` to one page.
///
/// Each pattern contributes its non-overlapping leftmost matches. When two
/// patterns of the same construct match at the same offset only one
/// occurrence is kept (the earlier pattern's span). Different constructs may
/// overlap freely. The result is ordered by offset, then catalog order.
pub fn scan_page(page: &str, page_no: usize, catalog: &Catalog) -> Vec<Occurrence> {
    debug_assert!(page_no >= 1);
    let index = CharIndex::new(page);
    let mut out = Vec::new();
    for (def, regexes) in catalog.compiled() {
        // byte start -> byte end, first pattern wins
        let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
        for re in regexes {
            for m in re.find_iter(page) {
                hits.entry(m.start()).or_insert(m.end());
            }
        }
        for (start, end) in hits {
            out.push(Occurrence {
                construct: def.name.clone(),
                level: def.level,
                page: page_no,
                offset: index.char_offset(start),
                snippet: truncate_chars(&page[start..end], SNIPPET_MAX_CHARS),
            });
        }
    }
    // stable: catalog order is kept for equal offsets
    out.sort_by_key(|o| o.offset);
    out
}

/// Scans every page of `book`.
pub fn scan_book(book: &BookText, catalog: &Catalog) -> BookScan {
    let occurrences: Vec<Occurrence> = book
        .pages()
        .iter()
        .enumerate()
        .flat_map(|(i, page)| scan_page(page, i + 1, catalog))
        .collect();
    let counts_by_level = count_by_level(&occurrences);
    BookScan {
        book_id: book.book_id.clone(),
        total_pages: book.total_pages(),
        occurrences,
        counts_by_level,
    }
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("source root {0} does not exist")]
    RootMissing(PathBuf),
    #[error("cannot walk {path}: {message}")]
    Walk { path: PathBuf, message: String },
}

/// Non-fatal problem met while scanning a source tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanWarning {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SourceTreeScan {
    /// Sorted by path (relative to the root, `/`-separated).
    pub files: Vec<(String, BookScan)>,
    pub warnings: Vec<ScanWarning>,
}

/// Scans every `.py` file under `root`, each as a single-page document.
pub fn scan_source_tree(root: impl AsRef<Path>, catalog: &Catalog) -> Result<SourceTreeScan, ScanError> {
    let root = root.as_ref();
    if !root.exists() {
        return Err(ScanError::RootMissing(root.to_path_buf()));
    }
    let mut result = SourceTreeScan::default();
    for entry in walkdir::WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e.path().map(|p| p.display().to_string()).unwrap_or_default();
                if e.depth() == 0 {
                    return Err(ScanError::Walk {
                        path: root.to_path_buf(),
                        message: e.to_string(),
                    });
                }
                result.warnings.push(ScanWarning {
                    path,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|ext| ext != "py") {
            continue;
        }
        let rel = relative_id(root, entry.path());
        match std::fs::read(entry.path()) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => {
                    let book = BookText::new(rel.clone(), vec![text]);
                    result.files.push((rel, scan_book(&book, catalog)));
                }
                Err(_) => result.warnings.push(ScanWarning {
                    path: rel,
                    message: "not valid UTF-8".into(),
                }),
            },
            Err(e) => result.warnings.push(ScanWarning {
                path: rel,
                message: e.to_string(),
            }),
        }
    }
    result.files.sort_by(|a, b| a.0.cmp(&b.0));
    result.warnings.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(result)
}

fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}
