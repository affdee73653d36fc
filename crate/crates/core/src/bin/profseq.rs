use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use profseq::divergence::DEFAULT_THRESHOLD;
use profseq::report::commands::{
    cmd_distance, cmd_divergence, cmd_profile, cmd_report, cmd_scan, cmd_sequence, distance_table, resolve_catalog,
    ReportPaths, ScanInput,
};
use profseq::report::{fmt2, Error};

#[derive(Debug, Parser)]
#[command(name = "profseq", version, about = "Construct detection and introduction-order analytics")]
struct Cli {
    /// Catalog file (JSON); the embedded catalog is used when absent.
    #[arg(long, global = true, env = "PROFSEQ_CATALOG")]
    catalog: Option<PathBuf>,

    /// Fixed timestamp in generated reports.
    #[arg(long, global = true)]
    repro: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan a form-feed paginated text file (or a manifest of them).
    Scan {
        /// Text file to scan.
        #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
        input: Option<PathBuf>,
        /// JSON manifest: [{"book_id": ..., "path": ...}, ...]
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Occurrences CSV; the JSON mirror and sidecar go next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// First appearance of each construct per book.
    Sequence {
        occurrences: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted edit distance to the level-sorted order, per book.
    Distance {
        sequences: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Positional diffs, per-construct aggregates, histogram, suggestions.
    Divergence {
        sequences: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Per-file level counts for the .py files under a directory.
    Profile {
        root: PathBuf,
        /// Profile CSV; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Consolidated JSON report and figure data.
    Report {
        #[arg(long)]
        occurrences: PathBuf,
        #[arg(long)]
        sequences: PathBuf,
        #[arg(long)]
        distances: Option<PathBuf>,
        #[arg(long)]
        diffs: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    let catalog_path = cli.catalog.as_deref();
    match cli.command {
        Command::Scan { input, manifest, out } => {
            let catalog = resolve_catalog(catalog_path)?;
            let input = match (input, manifest) {
                (_, Some(m)) => ScanInput::Manifest(m),
                (Some(f), None) => ScanInput::File(f),
                (None, None) => return Err(Error::Usage("scan needs an input file or --manifest".into())),
            };
            let scans = cmd_scan(&input, &catalog, &out)?;
            let total: usize = scans.iter().map(|s| s.occurrences.len()).sum();
            eprintln!("{} book(s), {} occurrence(s) -> {}", scans.len(), total, out.display());
        }
        Command::Sequence { occurrences, out } => {
            let seqs = cmd_sequence(&occurrences, &out)?;
            eprintln!("{} sequence(s) -> {}", seqs.len(), out.display());
        }
        Command::Distance { sequences, out } => {
            let reports = cmd_distance(&sequences, &out)?;
            print!("{}", distance_table(&reports));
        }
        Command::Divergence { sequences, out, threshold } => {
            let outcome = cmd_divergence(&sequences, &out, threshold)?;
            for s in &outcome.suggestions {
                println!("{}: {} -> {} (relative {})", s.construct, s.current, s.suggested, fmt2(s.relative));
            }
            eprintln!("{} diff(s), {} construct(s) -> {}", outcome.records.len(), outcome.aggregates.len(), out.display());
        }
        Command::Profile { root, out } => {
            let catalog = resolve_catalog(catalog_path)?;
            let (bytes, warnings) = cmd_profile(&root, &catalog, out.as_deref())?;
            for w in &warnings {
                eprintln!("warning: {}: {}", w.path, w.message);
            }
            if out.is_none() {
                std::io::stdout().write_all(&bytes).map_err(|e| Error::Io {
                    path: Path::new("<stdout>").to_path_buf(),
                    source: e,
                })?;
            }
        }
        Command::Report {
            occurrences,
            sequences,
            distances,
            diffs,
            out,
            threshold,
        } => {
            let catalog = resolve_catalog(catalog_path)?;
            let paths = ReportPaths {
                occurrences,
                sequences,
                distances,
                diffs,
            };
            let report = cmd_report(&paths, &catalog, &out, threshold, cli.repro)?;
            eprintln!("{} book(s) -> {}", report.books.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("profseq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
