//! Searches a maximum code and evaluates the entropy inequality chain on it
//! for every prefix length.

use sepcodes::bounds::verify_proof_chain;
use sepcodes::{max_code_search, CodeParams, CodeProperty, PhiVariant, SearchConfig};

fn main() {
    let (q, n) = (2, 4);
    for (property, variant) in [
        (CodeProperty::SeparableBar(2), PhiVariant::Separable),
        (CodeProperty::B2, PhiVariant::B2Diff),
    ] {
        let config = SearchConfig::new(CodeParams::new(q, n).unwrap(), property);
        let result = max_code_search(&config).unwrap();
        println!("{property} q={q} n={n}: {}", result.summary_line());
        for e in 0..=n {
            let report = verify_proof_chain(&result.witness, e, variant).unwrap();
            println!("e={e} pass={}", report.pass());
        }
        let report = verify_proof_chain(&result.witness, 1, variant).unwrap();
        print!("{}", report.to_text());
        println!();
    }
}
