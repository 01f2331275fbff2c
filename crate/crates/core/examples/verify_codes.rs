//! Checks a few small codes against every property and prints the
//! violating configuration when a check fails.

use sepcodes::predicates::{property_violation, SeparableCheck, SeparableReading};
use sepcodes::{parse_code, CodeProperty};

const CODES: &[(&str, &str)] = &[
    ("three binary words", "q=2 n=2\n0 0\n0 1\n1 0\n"),
    ("full binary square", "q=2 n=2\n0 0\n0 1\n1 0\n1 1\n"),
    ("ternary diagonal", "q=3 n=2\n0 0\n1 1\n2 2\n"),
    ("ternary with a sum clash", "q=3 n=2\n0 0\n1 1\n2 2\n0 2\n2 0\n"),
];

fn main() {
    let properties = [
        CodeProperty::Frameproof(2),
        CodeProperty::SeparableBar(2),
        CodeProperty::B2,
        CodeProperty::Frameproof(1),
    ];
    for (name, text) in CODES {
        let code = parse_code(text).expect("example codes parse");
        println!("{name} ({} words, q={}, n={})", code.len(), code.q(), code.n());
        for property in properties {
            match property_violation(&code, property, SeparableCheck::default()).unwrap() {
                None => println!("  {property:<6} yes"),
                Some(v) => println!("  {property:<6} no: {}", v.describe(&code)),
            }
        }
    }

    // The two readings of separability agree for pairs and can differ for
    // larger coalitions.
    let code = parse_code("q=2 n=3\n0 0 0\n0 0 1\n0 1 0\n1 0 0\n").unwrap();
    for reading in [SeparableReading::Distinct, SeparableReading::Disjoint] {
        let check = SeparableCheck { reading, ..SeparableCheck::default() };
        let verdict = property_violation(&code, CodeProperty::SeparableBar(3), check).unwrap();
        println!(
            "sep:3 under the {reading:?} reading: {}",
            verdict.map_or("separable".to_string(), |v| v.describe(&code))
        );
    }
}
