//! Search and predicates against the naive oracles in `common`.

mod common;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sepcodes::predicates::{satisfies, separable_violation, SeparableCheck, SeparableReading};
use sepcodes::{max_code_search, CodeParams, CodeProperty, SearchConfig};

const PROPERTIES: [CodeProperty; 5] = [
    CodeProperty::B2,
    CodeProperty::SeparableBar(2),
    CodeProperty::SeparableBar(3),
    CodeProperty::Frameproof(2),
    CodeProperty::Frameproof(3),
];

/// Spaces of at most 16 words.
const SMALL: [(u32, usize); 7] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (4, 2)];

fn search(q: u32, n: usize, property: CodeProperty) -> sepcodes::SearchResult {
    max_code_search(&SearchConfig::new(CodeParams::new(q, n).unwrap(), property)).unwrap()
}

#[test]
fn search_matches_brute_force() {
    for (q, n) in SMALL {
        for property in PROPERTIES {
            let (size, witness) = brute_force_max(q, n, property);
            let r = search(q, n, property);
            assert!(r.complete);
            assert_eq!(r.max_size, size, "{property} q={q} n={n}");
            assert_eq!(rows(&r.witness), witness, "{property} q={q} n={n}");
        }
    }
}

#[test]
fn no_larger_code_exists() {
    for (q, n) in [(2, 2), (2, 3), (3, 2)] {
        for property in PROPERTIES {
            let r = search(q, n, property);
            assert_eq!(count_codes_of_size(q, n, property, r.max_size + 1), 0, "{property} q={q} n={n}");
            assert!(count_codes_of_size(q, n, property, r.max_size) > 0);
        }
    }
}

#[test]
fn known_small_maxima() {
    assert_eq!(search(2, 1, CodeProperty::B2).max_size, 2);
    assert_eq!(search(2, 2, CodeProperty::B2).max_size, 3);
    assert_eq!(search(2, 2, CodeProperty::SeparableBar(2)).max_size, 3);
    // One coordinate: distinct subsets of symbols have distinct unions, but
    // 0 + 2 = 1 + 1.
    assert_eq!(search(3, 1, CodeProperty::SeparableBar(2)).max_size, 3);
    assert_eq!(search(3, 1, CodeProperty::B2).max_size, 2);
}

#[test]
fn predicates_agree_with_naive_checks() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..600 {
        let q = rng.gen_range(2..=4);
        let n = rng.gen_range(1..=4);
        let space = (q as usize).pow(n as u32);
        let m = rng.gen_range(1..=space.min(9));
        let code = random_code(&mut rng, q, n, m);
        let words = rows(&code);
        for property in PROPERTIES {
            assert_eq!(
                satisfies(&code, property).unwrap(),
                naive_satisfies(&words, property),
                "{property} on {}",
                code.to_text()
            );
        }
        for t in 2..=3 {
            let check = SeparableCheck {
                reading: SeparableReading::Disjoint,
                ..SeparableCheck::default()
            };
            assert_eq!(
                separable_violation(&code, t, check).unwrap().is_none(),
                naive_separable(&words, t, true)
            );
        }
    }
}

#[test]
fn disjoint_reading_search_matches_brute_force() {
    // Brute force under the disjoint reading, t = 3.
    for (q, n) in [(2, 2), (2, 3), (3, 2)] {
        let config = SearchConfig::new(CodeParams::new(q, n).unwrap(), CodeProperty::SeparableBar(3))
            .reading(SeparableReading::Disjoint);
        let r = max_code_search(&config).unwrap();
        let space = all_words(q, n);
        let mut best = 0;
        for mask in 1u32..1 << space.len() {
            let words: Vec<Row> = (0..space.len()).filter(|i| mask >> i & 1 == 1).map(|i| space[i].clone()).collect();
            if words.len() > best && naive_separable(&words, 3, true) {
                best = words.len();
            }
        }
        assert_eq!(r.max_size, best, "q={q} n={n}");
        assert!(r.max_size >= search(q, n, CodeProperty::SeparableBar(3)).max_size);
    }
}
