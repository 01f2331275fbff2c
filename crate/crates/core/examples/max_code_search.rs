//! Exhaustive maximum-code search: a table of binary sizes for both pair
//! properties, then a single ternary search with its witness.

use sepcodes::search::{search_table, SearchOptions};
use sepcodes::{max_code_search, CodeParams, CodeProperty, SearchConfig};

fn main() {
    let options = SearchOptions::default();
    let b2 = search_table(2, 5, CodeProperty::B2, options).unwrap();
    let sep = search_table(2, 5, CodeProperty::SeparableBar(2), options).unwrap();
    println!("n  b2  sep2  rate     bound");
    for (a, b) in b2.iter().zip(&sep) {
        println!(
            "{}  {:>2}  {:>4}  {:.4}  {:.4}{}",
            a.n,
            a.max_size,
            b.max_size,
            a.rate,
            a.bound.unwrap_or(f64::NAN),
            if a.exceeds_bound { "  (above the asymptotic bound)" } else { "" }
        );
    }

    let config = SearchConfig::new(CodeParams::new(3, 3).unwrap(), CodeProperty::SeparableBar(2)).workers(2);
    let result = max_code_search(&config).unwrap();
    println!("\n{result}");
}
