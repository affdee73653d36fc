#![no_main]

use libfuzzer_sys::fuzz_target;
use profseq::report::artifacts::{ArtifactMeta, ScanMirror};

fuzz_target!(|data: &[u8]| {
    let _ = serde_json::from_slice::<ArtifactMeta>(data);
    let _ = serde_json::from_slice::<ScanMirror>(data);
});
