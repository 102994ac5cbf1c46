#![no_main]

use condan::algebra::Algebra;
use condan::io::{decode_object, KINDS};
use libfuzzer_sys::fuzz_target;

// byte 0 picks the kind, byte 1 the atom count, the rest is the JSON value
fuzz_target!(|data: &[u8]| {
    let [k, m, rest @ ..] = data else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(v) = serde_json::from_str::<serde_json::Value>(text) else { return };
    let Ok(alg) = Algebra::new(usize::from(*m % 8) + 1) else { return };
    let kind = KINDS[usize::from(*k) % KINDS.len()];
    if let Ok(o) = decode_object(&alg, kind, &v) {
        assert_eq!(o.kind(), kind);
    }
});
