//! Partitions a code by prefix and checks that the suffix-pair map is
//! one-to-one. A code outside the family yields a colliding pair of pairs,
//! which translates back into a predicate violation.

use sepcodes::phimap::check_injectivity;
use sepcodes::predicates::violation_holds;
use sepcodes::{parse_code, partition_by_prefix, PhiVariant};

fn report(text: &str, e: usize, variant: PhiVariant) {
    let code = parse_code(text).unwrap();
    let partition = partition_by_prefix(&code, e).unwrap();
    let result = check_injectivity(&partition, variant);
    println!(
        "{variant} on {} words, e={e}: {} classes, {} pairs, injective={}",
        code.len(),
        partition.classes().len(),
        result.pairs,
        result.injective
    );
    if let Some(collision) = result.collision {
        let [a, b, c, d] = collision.codewords(&partition);
        println!("  phi({a}, {b}) = phi({c}, {d})");
        if let Some(v) = collision.violation(&partition, &code) {
            println!("  implies {} (holds: {})", v.describe(&code), violation_holds(&code, &v));
        }
    }
}

fn main() {
    let b2 = "q=3 n=3\n0 0 0\n0 0 1\n0 1 0\n1 0 0\n1 1 2\n";
    report(b2, 1, PhiVariant::B2Diff);
    report(b2, 1, PhiVariant::Separable);

    // 0 0 1 + 0 1 0 = 0 0 0 + 0 1 1: same prefix class, same difference.
    let clash = "q=2 n=3\n0 0 0\n0 0 1\n0 1 0\n0 1 1\n";
    report(clash, 1, PhiVariant::B2Diff);
    report(clash, 1, PhiVariant::Separable);
}
