//! Compares the closed-form constrained entropy maximum with the numeric
//! maximizer.

use sepcodes::bounds::{max_constrained_entropy, max_constrained_entropy_numeric};

fn main() {
    println!("{:>3} {:>16} {:>16} {:>10}", "q", "analytic", "numeric", "diff");
    for q in 2..=16 {
        let (analytic, dist) = max_constrained_entropy(q).unwrap();
        let numeric = max_constrained_entropy_numeric(q, 1e-9).unwrap();
        println!(
            "{q:>3} {analytic:>16.12} {numeric:>16.12} {:>10.1e}",
            (analytic - numeric).abs()
        );
        assert_eq!(dist.masses().len() as u32, q * (q - 1) + 1);
    }
}
