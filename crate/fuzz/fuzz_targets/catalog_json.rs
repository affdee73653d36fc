#![no_main]

use libfuzzer_sys::fuzz_target;
use profseq::Catalog;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(catalog) = Catalog::from_json(text, "fuzz") {
        let again = Catalog::from_json(&catalog.to_json(), "fuzz").expect("serialized catalog parses");
        assert_eq!(again.digest(), catalog.digest());
    }
});
