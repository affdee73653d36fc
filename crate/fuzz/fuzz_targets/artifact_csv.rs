#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use profseq::report::artifacts::{self, parse_csv, DiffRow, DistanceRow, OccurrenceRow, SequenceRow};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let path = Path::new("fuzz.csv");
    let _ = parse_csv::<OccurrenceRow>(path, text, artifacts::OCCURRENCES_HEADER);
    let _ = parse_csv::<SequenceRow>(path, text, artifacts::SEQUENCES_HEADER);
    let _ = parse_csv::<DistanceRow>(path, text, artifacts::DISTANCES_HEADER);
    let _ = parse_csv::<DiffRow>(path, text, artifacts::DIFFS_HEADER);
});
