//! Prints the rate-bound curves as CSV, ready for a plotting tool.
//!
//! `cargo run --example rate_bounds -- 2 17`

use std::io;

use sepcodes::bounds::{emit_bound_table, rate_bound_sep2, write_csv};

fn main() {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("arguments are alphabet sizes"))
        .collect();
    let (q_min, q_max) = match args[..] {
        [a, b] => (a, b),
        [] => (2, 17),
        _ => panic!("usage: rate_bounds [Q_MIN Q_MAX]"),
    };
    let rows = emit_bound_table(q_min, q_max).unwrap();
    write_csv(&rows, io::stdout().lock()).unwrap();
    eprintln!("exact sep2 bound at q={q_max}: {}", rate_bound_sep2(q_max).unwrap());
}
