#![no_main]

use condan::analysis::CondSequence;
use condan::io::{parse_document, Object};
use libfuzzer_sys::fuzz_target;

// decoded bodies, closed sets and sequences must be usable without panicking
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    match &doc.object {
        Object::Body(b) => {
            for (_, a) in b.iter() {
                let x = vec![1.0; a.dim()];
                let g = a.gauge(&x);
                assert!(g >= 0.0 || g.is_nan());
                let _ = a.support(&x);
                let _ = a.half_widths();
            }
        }
        Object::ClosedSet(c) => {
            for (_, s) in c.iter() {
                if let Some(bb) = s.bounding_box() {
                    let mid: Vec<f64> = bb.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
                    let _ = s.contains(&mid, 1e-12);
                }
            }
        }
        Object::Sequence(seq) => {
            let on = match seq {
                CondSequence::Table(t) => t.first().map(|x| x.on().clone()),
                CondSequence::Formula(f) => Some(f.on().clone()),
            };
            if let Some(on) = on {
                for t in on.atoms() {
                    for k in 1..=4 {
                        let _ = seq.term_at(k, t);
                    }
                }
            }
        }
        _ => {}
    }
});
