#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use profseq::report::commands::CorpusManifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let base = Path::new("/corpus");
    let _ = CorpusManifest::parse(text, base, &base.join("manifest.json"));
});
