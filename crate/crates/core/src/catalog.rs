//! Construct catalog: named constructs, their proficiency levels and the
//! regular expressions used to detect them.
//!
//! A catalog file is a JSON array of objects:
//!
//! ```json
//! [
//!   {"name": "printfunc", "level": "A1", "patterns": ["print\\(.*\\)"]},
//!   {"name": "zipfunc", "level": "C2", "patterns": ["zip\\(.*\\)"], "description": "zip()"}
//! ]
//! ```
//!
//! Level tags are case-insensitive on input. Patterns use the `regex` crate
//! dialect; the embedded default catalog restricts itself to character
//! classes, alternation, greedy quantifiers and the `\s`/`\S`/`\w` classes so
//! it stays portable to other engines.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Provenance string of the catalog compiled into the binary.
pub const EMBEDDED_SOURCE: &str = "embedded-default";

const DEFAULT_CATALOG_JSON: &str = include_str!("default_catalog.json");

/// CEFR-style proficiency level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl Level {
    pub const ALL: [Level; 6] = [Level::A1, Level::A2, Level::B1, Level::B2, Level::C1, Level::C2];

    /// Zero-based position of the level on the A1..C2 scale.
    pub fn index(self) -> usize {
        match self {
            Level::A1 => 0,
            Level::A2 => 1,
            Level::B1 => 2,
            Level::B2 => 3,
            Level::C1 => 4,
            Level::C2 => 5,
        }
    }

    /// Inverse of [`Level::index`].
    pub fn from_index(index: usize) -> Option<Level> {
        Level::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::A1 => "A1",
            Level::A2 => "A2",
            Level::B1 => "B1",
            Level::B2 => "B2",
            Level::C1 => "C1",
            Level::C2 => "C2",
        }
    }
}

/// Free-function form of [`Level::index`].
pub fn level_index(level: Level) -> usize {
    level.index()
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown level `{0}` (expected one of A1, A2, B1, B2, C1, C2)")]
pub struct ParseLevelError(pub String);

impl FromStr for Level {
    type Err = ParseLevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Level::A1),
            "A2" => Ok(Level::A2),
            "B1" => Ok(Level::B1),
            "B2" => Ok(Level::B2),
            "C1" => Ok(Level::C1),
            "C2" => Ok(Level::C2),
            _ => Err(ParseLevelError(s.to_string())),
        }
    }
}

/// One detectable construct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructDef {
    pub name: String,
    pub level: Level,
    pub patterns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("construct #{index} has an empty name")]
    EmptyName { index: usize },
    #[error("duplicate construct name `{0}`")]
    DuplicateName(String),
    #[error("construct `{construct}` has unknown level `{level}`")]
    UnknownLevel { construct: String, level: String },
    #[error("construct `{0}` has no patterns")]
    NoPatterns(String),
    #[error("construct `{construct}`: pattern `{pattern}` does not compile: {message}")]
    PatternCompile {
        construct: String,
        pattern: String,
        message: String,
    },
}

// File-level shape; the level stays a string so an unknown tag can be
// reported against the construct that carries it.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstruct {
    name: String,
    level: String,
    patterns: Vec<String>,
    #[serde(default)]
    description: Option<String>,
}

/// Validated, immutable collection of constructs in declaration order.
#[derive(Debug, Clone)]
pub struct Catalog {
    constructs: Vec<ConstructDef>,
    compiled: Vec<Vec<Regex>>,
    source: String,
    digest: String,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.constructs == other.constructs
    }
}

impl Catalog {
    /// Validates `constructs` and compiles every pattern.
    pub fn new(constructs: Vec<ConstructDef>, source: impl Into<String>) -> Result<Self, CatalogError> {
        let mut seen = std::collections::HashSet::new();
        let mut compiled = Vec::with_capacity(constructs.len());
        for (index, def) in constructs.iter().enumerate() {
            if def.name.trim().is_empty() {
                return Err(CatalogError::EmptyName { index });
            }
            if !seen.insert(def.name.as_str()) {
                return Err(CatalogError::DuplicateName(def.name.clone()));
            }
            if def.patterns.is_empty() {
                return Err(CatalogError::NoPatterns(def.name.clone()));
            }
            let regexes = def
                .patterns
                .iter()
                .map(|p| {
                    Regex::new(p).map_err(|e| CatalogError::PatternCompile {
                        construct: def.name.clone(),
                        pattern: p.clone(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            compiled.push(regexes);
        }
        let digest = content_digest(&constructs);
        Ok(Catalog {
            constructs,
            compiled,
            source: source.into(),
            digest,
        })
    }

    /// Parses catalog JSON. `source` is recorded as provenance.
    pub fn from_json(text: &str, source: impl Into<String>) -> Result<Self, CatalogError> {
        let raw: Vec<RawConstruct> = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut constructs = Vec::with_capacity(raw.len());
        for r in raw {
            let level = r.level.parse::<Level>().map_err(|_| CatalogError::UnknownLevel {
                construct: r.name.clone(),
                level: r.level.clone(),
            })?;
            constructs.push(ConstructDef {
                name: r.name,
                level,
                patterns: r.patterns,
                description: r.description,
            });
        }
        Catalog::new(constructs, source)
    }

    /// Serializes the catalog back to the file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.constructs).expect("catalog serializes")
    }

    pub fn constructs(&self) -> &[ConstructDef] {
        &self.constructs
    }

    pub fn len(&self) -> usize {
        self.constructs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constructs.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Hex SHA-256 over the canonical serialization of the constructs.
    /// Independent of where the catalog was loaded from.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn get(&self, name: &str) -> Option<&ConstructDef> {
        self.constructs.iter().find(|c| c.name == name)
    }

    pub fn level_of(&self, name: &str) -> Option<Level> {
        self.get(name).map(|c| c.level)
    }

    /// Declaration position of `name`.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.constructs.iter().position(|c| c.name == name)
    }

    pub(crate) fn compiled(&self) -> impl Iterator<Item = (&ConstructDef, &[Regex])> {
        self.constructs.iter().zip(self.compiled.iter().map(Vec::as_slice))
    }
}

fn content_digest(constructs: &[ConstructDef]) -> String {
    let canonical = serde_json::to_vec(constructs).expect("catalog serializes");
    hex::encode(Sha256::digest(&canonical))
}

/// Reads and validates a catalog file.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Catalog::from_json(&text, path.display().to_string())
}

/// The catalog compiled into the crate.
///
/// Entries that appear in the published level tables keep their published
/// level; the five published example patterns are kept verbatim as the first
/// pattern of their construct. Everything else in the file is a
/// non-normative approximation (flagged in each entry's description).
pub fn default_catalog() -> Catalog {
    Catalog::from_json(DEFAULT_CATALOG_JSON, EMBEDDED_SOURCE).expect("embedded catalog is valid")
}
