//! Replays the checked-in fuzz seeds through the decoders.

use std::path::PathBuf;

use condan::algebra::Algebra;
use condan::io::{decode_document, decode_object, encode_document, parse_document, KINDS};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

const MALFORMED: [&str; 4] = ["truncated.json", "wrong_type.json", "negative_offset.json", "unknown_kind.json"];

#[test]
fn document_seeds_decode_and_roundtrip() {
    for (name, bytes) in seeds("document_roundtrip") {
        let text = String::from_utf8(bytes).unwrap();
        match parse_document(&text) {
            Ok(doc) => {
                assert!(!MALFORMED.contains(&name.as_str()), "{name} decoded");
                assert_eq!(decode_document(&encode_document(&doc)).unwrap(), doc, "{name}");
            }
            Err(e) => {
                assert!(MALFORMED.contains(&name.as_str()), "{name}: {e}");
                assert!(!e.location.is_empty());
            }
        }
    }
}

#[test]
fn object_seeds_decode_to_their_kind() {
    for (name, bytes) in seeds("decode_object") {
        let [k, m, rest @ ..] = bytes.as_slice() else { panic!("{name} too short") };
        let alg = Algebra::new(usize::from(*m % 8) + 1).unwrap();
        let kind = KINDS[usize::from(*k) % KINDS.len()];
        let v: serde_json::Value = serde_json::from_slice(rest).unwrap();
        let o = decode_object(&alg, kind, &v).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(o.kind(), kind);
    }
}
