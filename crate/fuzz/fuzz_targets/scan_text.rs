#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use profseq::{default_catalog, first_appearances, scan_book, BookText, Catalog};

fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(default_catalog)
}

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let book = BookText::from_text("fuzz", &text);
    let scan = scan_book(&book, catalog());
    for o in &scan.occurrences {
        assert!(o.page >= 1 && o.page <= scan.total_pages);
        let page = &book.pages()[o.page - 1];
        assert!(o.offset <= page.chars().count());
    }
    let seq = first_appearances(&scan);
    assert!(seq.entries.len() <= catalog().len());
});
