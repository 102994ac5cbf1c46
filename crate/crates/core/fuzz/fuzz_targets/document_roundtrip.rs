#![no_main]

use condan::io::{decode_document, encode_document, parse_document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    let again = decode_document(&encode_document(&doc)).expect("encoded document decodes");
    assert_eq!(again, doc);
});
