//! Naive reference implementations used as oracles. They work on plain
//! symbol rows and share no code with the library.

#![allow(dead_code)]

use rand::Rng;
use sepcodes::code::Symbol;
use sepcodes::{Code, CodeParams, CodeProperty, Codeword};

pub type Row = Vec<Symbol>;

pub fn rows(code: &Code) -> Vec<Row> {
    code.words().iter().map(|w| w.symbols().to_vec()).collect()
}

/// Every word of `[q]^n` in lexicographic order.
pub fn all_words(q: u32, n: usize) -> Vec<Row> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Row| {
                (0..q as Symbol).map(move |s| {
                    let mut w = w.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

/// All index subsets of `0..m` with sizes `1..=t`, as bitmasks.
fn subsets(m: usize, t: usize) -> Vec<u64> {
    (1u64..1 << m).filter(|s| (s.count_ones() as usize) <= t).collect()
}

/// Per-coordinate symbol set of a subset, as bitmasks.
fn unions(words: &[Row], subset: u64) -> Vec<u64> {
    let n = words[0].len();
    (0..n)
        .map(|k| {
            (0..words.len())
                .filter(|&i| subset >> i & 1 == 1)
                .fold(0u64, |acc, i| acc | 1 << words[i][k])
        })
        .collect()
}

/// Compares every pair of subsets directly.
pub fn naive_separable(words: &[Row], t: usize, disjoint_only: bool) -> bool {
    assert!(words.len() < 64);
    let all = subsets(words.len(), t);
    let sigs: Vec<Vec<u64>> = all.iter().map(|&s| unions(words, s)).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if disjoint_only && all[i] & all[j] != 0 {
                continue;
            }
            if sigs[i] == sigs[j] {
                return false;
            }
        }
    }
    true
}

/// Every target outside every coalition of size `1..=t` keeps a coordinate
/// where no coalition member agrees with it.
pub fn naive_frameproof(words: &[Row], t: usize) -> bool {
    let n = words.first().map_or(0, Vec::len);
    for s in subsets(words.len(), t) {
        for (target, w) in words.iter().enumerate() {
            if s >> target & 1 == 1 {
                continue;
            }
            let covered = (0..n).all(|k| (0..words.len()).any(|i| s >> i & 1 == 1 && words[i][k] == w[k]));
            if covered {
                return false;
            }
        }
    }
    true
}

/// Distinct unordered pairs (repetition allowed) have distinct sums.
pub fn naive_b2(words: &[Row]) -> bool {
    let mut pairs = Vec::new();
    for i in 0..words.len() {
        for j in i..words.len() {
            pairs.push(words[i].iter().zip(&words[j]).map(|(&a, &b)| a as u32 + b as u32).collect::<Vec<_>>());
        }
    }
    let mut sorted = pairs.clone();
    sorted.sort();
    sorted.dedup();
    sorted.len() == pairs.len()
}

pub fn naive_satisfies(words: &[Row], property: CodeProperty) -> bool {
    match property {
        CodeProperty::Frameproof(t) => naive_frameproof(words, t),
        CodeProperty::SeparableBar(t) => naive_separable(words, t, false),
        CodeProperty::B2 => naive_b2(words),
    }
}

/// Largest code over `[q]^n` with `property`, and the lexicographically
/// smallest one of that size (as a sorted list of words), by plain
/// depth-first enumeration that re-checks the whole set at every node.
pub fn brute_force_max(q: u32, n: usize, property: CodeProperty) -> (usize, Vec<Row>) {
    fn go(space: &[Row], from: usize, current: &mut Vec<Row>, best: &mut Vec<Row>, property: CodeProperty) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for i in from..space.len() {
            current.push(space[i].clone());
            if naive_satisfies(current, property) {
                go(space, i + 1, current, best, property);
            }
            current.pop();
        }
    }
    let space = all_words(q, n);
    let mut best = Vec::new();
    go(&space, 0, &mut Vec::new(), &mut best, property);
    (best.len(), best)
}

/// Number of codes of exactly `size` words over `[q]^n` with `property`.
pub fn count_codes_of_size(q: u32, n: usize, property: CodeProperty, size: usize) -> usize {
    fn go(space: &[Row], from: usize, current: &mut Vec<Row>, size: usize, property: CodeProperty) -> usize {
        if current.len() == size {
            return 1;
        }
        let mut count = 0;
        for i in from..space.len() {
            current.push(space[i].clone());
            if naive_satisfies(current, property) {
                count += go(space, i + 1, current, size, property);
            }
            current.pop();
        }
        count
    }
    go(&all_words(q, n), 0, &mut Vec::new(), size, property)
}

pub fn to_code(q: u32, words: &[Row]) -> Code {
    let n = words.first().map_or(1, Vec::len);
    Code::new(
        CodeParams::new(q, n).unwrap(),
        words.iter().map(|w| Codeword::new(w.clone())).collect(),
    )
    .unwrap()
}

/// `m` distinct uniformly random words of `[q]^n`, in random order.
pub fn random_code<R: Rng>(rng: &mut R, q: u32, n: usize, m: usize) -> Code {
    let mut words: Vec<Row> = Vec::with_capacity(m);
    while words.len() < m {
        let w: Row = (0..n).map(|_| rng.gen_range(0..q) as Symbol).collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    to_code(q, &words)
}

/// Random nonempty selection of the code's words, in random order.
pub fn random_subcode<R: Rng>(rng: &mut R, code: &Code) -> Code {
    use rand::seq::SliceRandom;
    let mut words = rows(code);
    words.shuffle(rng);
    let keep = rng.gen_range(1..=words.len());
    words.truncate(keep);
    to_code(code.q(), &words)
}
