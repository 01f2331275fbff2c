//! Exact verifiers for frameproof, `t̄`-separable and B₂ codes.
//!
//! Every batch predicate has a `*_violation` form that returns the first
//! violating configuration found, so callers can print or cross-check it.
//! The incremental checks ([`b2_extends`], [`sep2_extends`], [`fp_extends`])
//! and the stateful [`SeparableIndex`] are what the search builds on.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::code::{Code, CodeParams, Codeword, Symbol};

/// Default cap on the work of a batch separability check, measured in
/// coordinate-visits over enumerated subsets.
pub const DEFAULT_SEPARABLE_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredicateError {
    #[error("{property} requires t >= {min}, got t={t}")]
    InvalidStrength {
        property: &'static str,
        min: usize,
        t: usize,
    },
    #[error("separability check needs ~{work} subset-coordinate visits, over the budget of {budget}")]
    BudgetExceeded { work: u64, budget: u64 },
}

/// The code families the toolkit knows how to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeProperty {
    /// `t`-frameproof: no word is covered coordinate-wise by at most `t`
    /// others.
    Frameproof(usize),
    /// `t̄`-separable: distinct subsets of size at most `t` have distinct
    /// coordinate-wise symbol unions.
    SeparableBar(usize),
    /// All pairwise sums `c_i + c_j` (`i <= j`, over the integers) distinct.
    B2,
}

impl CodeProperty {
    pub fn validate(self) -> Result<Self, PredicateError> {
        match self {
            Self::Frameproof(0) => Err(PredicateError::InvalidStrength {
                property: "frameproof",
                min: 1,
                t: 0,
            }),
            Self::SeparableBar(t) if t < 2 => Err(PredicateError::InvalidStrength {
                property: "separable",
                min: 2,
                t,
            }),
            p => Ok(p),
        }
    }
}

impl fmt::Display for CodeProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Frameproof(t) => write!(f, "fp:{t}"),
            Self::SeparableBar(2) => f.write_str("sep2"),
            Self::SeparableBar(t) => write!(f, "sep:{t}"),
            Self::B2 => f.write_str("b2"),
        }
    }
}

impl FromStr for CodeProperty {
    type Err = String;

    /// Accepts `sep2`, `sep:<t>`, `fp:<t>` and `b2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let strength = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| format!("invalid strength `{v}` in property `{s}`"))
        };
        let property = match s {
            "sep2" => Self::SeparableBar(2),
            "b2" => Self::B2,
            _ => match s.split_once(':') {
                Some(("sep", t)) => Self::SeparableBar(strength(t)?),
                Some(("fp", t)) => Self::Frameproof(strength(t)?),
                _ => return Err(format!("unknown property `{s}` (expected sep2, sep:<t>, fp:<t>, b2)")),
            },
        };
        property.validate().map_err(|e| e.to_string())
    }
}

/// Which pairs of subsets the separability condition quantifies over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SeparableReading {
    /// Any two distinct subsets; overlap allowed.
    #[default]
    Distinct,
    /// Only pairwise disjoint subsets.
    Disjoint,
}

impl FromStr for SeparableReading {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distinct" => Ok(Self::Distinct),
            "disjoint" => Ok(Self::Disjoint),
            _ => Err(format!("unknown reading `{s}` (expected distinct or disjoint)")),
        }
    }
}

/// A concrete configuration showing that a code lacks a property. Indices
/// refer to positions in the checked code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `target` agrees with some member of `coalition` in every coordinate.
    Frameproof {
        target: usize,
        coalition: Vec<usize>,
    },
    /// Two different subsets with identical symbol sets in every coordinate.
    Separable { first: Vec<usize>, second: Vec<usize> },
    /// `first.0 + first.1 == second.0 + second.1` as integer vectors.
    B2 {
        first: (usize, usize),
        second: (usize, usize),
    },
}

impl Violation {
    /// Renders the violation with the actual codewords.
    pub fn describe(&self, code: &Code) -> String {
        let w = |i: usize| format!("({})", code.words()[i]);
        let set = |s: &[usize]| {
            let parts: Vec<_> = s.iter().map(|&i| w(i)).collect();
            format!("{{{}}}", parts.join(", "))
        };
        match self {
            Self::Frameproof { target, coalition } => {
                format!("word {} is covered by {}", w(*target), set(coalition))
            }
            Self::Separable { first, second } => {
                format!("{} and {} have equal coordinate unions", set(first), set(second))
            }
            Self::B2 { first, second } => format!(
                "{} + {} = {} + {}",
                w(first.0),
                w(first.1),
                w(second.0),
                w(second.1)
            ),
        }
    }
}

/// Coordinate agreement bitmask between two words.
fn agree_mask(a: &[Symbol], b: &[Symbol]) -> Vec<u64> {
    let mut mask = vec![0u64; a.len().div_ceil(64)];
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x == y {
            mask[i / 64] |= 1 << (i % 64);
        }
    }
    mask
}

fn full_mask(n: usize) -> Vec<u64> {
    let mut mask = vec![u64::MAX; n.div_ceil(64)];
    if !n.is_multiple_of(64) {
        *mask.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
    }
    mask
}

/// Finds a subset of at most `budget` pool members whose agreement masks,
/// together with `start`, cover every coordinate.
fn find_cover(
    pool: &[(usize, Vec<u64>)],
    budget: usize,
    start: &[u64],
    full: &[u64],
    chosen: &mut Vec<usize>,
) -> bool {
    if start == full {
        return true;
    }
    if budget == 0 {
        return false;
    }
    for (k, (idx, mask)) in pool.iter().enumerate() {
        let union: Vec<u64> = start.iter().zip(mask).map(|(a, b)| a | b).collect();
        chosen.push(*idx);
        if find_cover(&pool[k + 1..], budget - 1, &union, full, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn frameproof_violation_words(words: &[Codeword], t: usize) -> Option<Violation> {
    let n = words.first()?.len();
    let full = full_mask(n);
    let empty = vec![0u64; full.len()];
    for (target, c) in words.iter().enumerate() {
        let pool: Vec<(usize, Vec<u64>)> = words
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target)
            .map(|(i, s)| (i, agree_mask(c.symbols(), s.symbols())))
            .collect();
        let mut chosen = Vec::new();
        if find_cover(&pool, t, &empty, &full, &mut chosen) {
            return Some(Violation::Frameproof {
                target,
                coalition: chosen,
            });
        }
    }
    None
}

/// First `t`-frameproof violation, if any. Coalitions of every size from 1
/// to `t` are considered.
pub fn frameproof_violation(code: &Code, t: usize) -> Result<Option<Violation>, PredicateError> {
    CodeProperty::Frameproof(t).validate()?;
    Ok(frameproof_violation_words(code.words(), t))
}

pub fn is_frameproof(code: &Code, t: usize) -> Result<bool, PredicateError> {
    Ok(frameproof_violation(code, t)?.is_none())
}

/// Whether `words ∪ {candidate}` is still `t`-frameproof, given `words` is.
pub fn fp_extends(words: &[Codeword], candidate: &Codeword, t: usize) -> bool {
    let n = candidate.len();
    let full = full_mask(n);
    let empty = vec![0u64; full.len()];
    // The candidate as the covered word.
    let pool: Vec<_> = words
        .iter()
        .enumerate()
        .map(|(i, s)| (i, agree_mask(candidate.symbols(), s.symbols())))
        .collect();
    if find_cover(&pool, t, &empty, &full, &mut Vec::new()) {
        return false;
    }
    // An existing word covered by a coalition that includes the candidate.
    for (target, c) in words.iter().enumerate() {
        let start = agree_mask(c.symbols(), candidate.symbols());
        let pool: Vec<_> = words
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target)
            .map(|(i, s)| (i, agree_mask(c.symbols(), s.symbols())))
            .collect();
        if find_cover(&pool, t - 1, &start, &full, &mut Vec::new()) {
            return false;
        }
    }
    true
}

/// Canonical form of the coordinate-wise symbol sets of a subset: per
/// coordinate, the sorted distinct symbols followed by a separator.
fn union_signature(members: &[&[Symbol]], n: usize) -> Vec<u32> {
    let mut sig = Vec::with_capacity(n * (members.len() + 1));
    let mut column = Vec::with_capacity(members.len());
    for i in 0..n {
        column.clear();
        column.extend(members.iter().map(|w| w[i] as u32));
        column.sort_unstable();
        column.dedup();
        sig.extend_from_slice(&column);
        sig.push(u32::MAX);
    }
    sig
}

/// Calls `visit` on every subset of `0..m` with size in `1..=t`, by size and
/// then lexicographically. Stops early when `visit` returns `false`.
fn for_each_subset(m: usize, t: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    fn rec(
        start: usize,
        m: usize,
        size: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == size {
            return visit(current);
        }
        for i in start..m {
            current.push(i);
            let keep_going = rec(i + 1, m, size, current, visit);
            current.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    let mut current = Vec::with_capacity(t);
    for size in 1..=t.min(m) {
        if !rec(0, m, size, &mut current, &mut visit) {
            return;
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

/// Options for the batch separability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparableCheck {
    pub reading: SeparableReading,
    pub budget: u64,
}

impl Default for SeparableCheck {
    fn default() -> Self {
        Self {
            reading: SeparableReading::Distinct,
            budget: DEFAULT_SEPARABLE_BUDGET,
        }
    }
}

/// First pair of subsets (sizes `1..=t`) with equal coordinate unions.
///
/// Subsets are bucketed by their union signature, so the cost is linear in
/// the number of subsets rather than in the number of subset pairs.
pub fn separable_violation(
    code: &Code,
    t: usize,
    check: SeparableCheck,
) -> Result<Option<Violation>, PredicateError> {
    CodeProperty::SeparableBar(t).validate()?;
    let m = code.len() as u64;
    let subsets: u64 = (1..=t as u64).fold(0u64, |acc, k| acc.saturating_add(binomial(m, k.min(m))));
    let work = subsets.saturating_mul(code.n() as u64);
    if work > check.budget {
        return Err(PredicateError::BudgetExceeded {
            work,
            budget: check.budget,
        });
    }

    let words: Vec<&[Symbol]> = code.words().iter().map(Codeword::symbols).collect();
    let mut buckets: HashMap<Vec<u32>, Vec<Vec<usize>>> = HashMap::new();
    let mut found = None;
    let mut members = Vec::with_capacity(t);
    for_each_subset(code.len(), t, |subset| {
        members.clear();
        members.extend(subset.iter().map(|&i| words[i]));
        let sig = union_signature(&members, code.n());
        let bucket = buckets.entry(sig).or_default();
        let clash = bucket.iter().find(|other| match check.reading {
            SeparableReading::Distinct => true,
            SeparableReading::Disjoint => disjoint(other, subset),
        });
        if let Some(other) = clash {
            found = Some(Violation::Separable {
                first: other.clone(),
                second: subset.to_vec(),
            });
            return false;
        }
        bucket.push(subset.to_vec());
        true
    });
    Ok(found)
}

/// `t̄`-separability under the distinct-subsets reading and default budget.
pub fn is_separable(code: &Code, t: usize) -> Result<bool, PredicateError> {
    Ok(separable_violation(code, t, SeparableCheck::default())?.is_none())
}

/// Incrementally maintained union signatures of every subset (size `1..=t`)
/// of a growing code. Words are pushed and popped in stack order.
#[derive(Debug, Clone)]
pub struct SeparableIndex {
    t: usize,
    reading: SeparableReading,
    words: Vec<Codeword>,
    buckets: HashMap<Vec<u32>, Vec<Vec<usize>>>,
    /// Signatures added by each pushed word, for `pop`.
    log: Vec<Vec<Vec<u32>>>,
}

impl SeparableIndex {
    pub fn new(t: usize, reading: SeparableReading) -> Self {
        Self {
            t,
            reading,
            words: Vec::new(),
            buckets: HashMap::new(),
            log: Vec::new(),
        }
    }

    pub fn from_words(words: &[Codeword], t: usize, reading: SeparableReading) -> Self {
        let mut index = Self::new(t, reading);
        for w in words {
            index.push(w.clone());
        }
        index
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    /// Subsets made of `extra` plus at most `t - 1` current words, each as
    /// (indices of the current words, signature).
    fn subsets_with(&self, extra: &Codeword) -> Vec<(Vec<usize>, Vec<u32>)> {
        let n = extra.len();
        let mut out = vec![(Vec::new(), union_signature(&[extra.symbols()], n))];
        let mut members: Vec<&[Symbol]> = Vec::with_capacity(self.t);
        for_each_subset(self.words.len(), self.t - 1, |subset| {
            members.clear();
            members.push(extra.symbols());
            members.extend(subset.iter().map(|&i| self.words[i].symbols()));
            out.push((subset.to_vec(), union_signature(&members, n)));
            true
        });
        out
    }

    /// Whether pushing `candidate` keeps the code separable.
    pub fn allows(&self, candidate: &Codeword) -> bool {
        let fresh = self.subsets_with(candidate);
        let mut own = HashSet::new();
        for (rest, sig) in &fresh {
            if let Some(bucket) = self.buckets.get(sig) {
                let clash = match self.reading {
                    SeparableReading::Distinct => !bucket.is_empty(),
                    // `bucket` entries never contain the candidate, so they
                    // are disjoint from `rest ∪ {candidate}` iff disjoint
                    // from `rest`.
                    SeparableReading::Disjoint => bucket.iter().any(|b| disjoint(b, rest)),
                };
                if clash {
                    return false;
                }
            }
            // Two fresh subsets share the candidate, so they only clash
            // under the distinct reading.
            if self.reading == SeparableReading::Distinct && !own.insert(sig) {
                return false;
            }
        }
        true
    }

    pub fn push(&mut self, word: Codeword) {
        let index = self.words.len();
        let fresh = self.subsets_with(&word);
        let mut added = Vec::with_capacity(fresh.len());
        for (mut rest, sig) in fresh {
            rest.push(index);
            self.buckets.entry(sig.clone()).or_default().push(rest);
            added.push(sig);
        }
        self.words.push(word);
        self.log.push(added);
    }

    pub fn pop(&mut self) -> Option<Codeword> {
        let added = self.log.pop()?;
        for sig in added {
            let bucket = self.buckets.get_mut(&sig).expect("logged signature present");
            bucket.pop();
            if bucket.is_empty() {
                self.buckets.remove(&sig);
            }
        }
        self.words.pop()
    }
}

/// Whether `words ∪ {candidate}` is `t̄`-separable, given `words` is.
pub fn sep_extends(
    words: &[Codeword],
    candidate: &Codeword,
    t: usize,
    reading: SeparableReading,
) -> bool {
    SeparableIndex::from_words(words, t, reading).allows(candidate)
}

/// Whether `words ∪ {candidate}` is `2̄`-separable, given `words` is. Only
/// subset pairs involving the candidate are examined.
pub fn sep2_extends(words: &[Codeword], candidate: &Codeword) -> bool {
    sep_extends(words, candidate, 2, SeparableReading::Distinct)
}

/// Packs sum vectors (coordinates in `[0, 2q-2]`) into fixed-width keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SumPacker {
    bits: u32,
    n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum SumKey {
    Narrow(u128),
    Wide(Vec<u64>),
}

impl SumPacker {
    fn new(params: CodeParams) -> Self {
        let max_sum = 2 * (params.q() as u64 - 1);
        let bits = 64 - max_sum.leading_zeros();
        Self { bits, n: params.n() }
    }

    fn key(&self, a: &[Symbol], b: &[Symbol]) -> SumKey {
        let sums = a.iter().zip(b).map(|(&x, &y)| x as u64 + y as u64);
        if self.bits as usize * self.n <= 128 {
            SumKey::Narrow(sums.fold(0u128, |acc, s| (acc << self.bits) | s as u128))
        } else {
            let mut limbs = vec![0u64; (self.bits as usize * self.n).div_ceil(64)];
            for (i, s) in sums.enumerate() {
                let pos = i * self.bits as usize;
                let (limb, off) = (pos / 64, pos % 64);
                limbs[limb] |= s << off;
                if off + self.bits as usize > 64 {
                    limbs[limb + 1] |= s >> (64 - off);
                }
            }
            SumKey::Wide(limbs)
        }
    }
}

/// The set of all sums `c_i + c_j` (`i <= j`) of a B₂ code under
/// construction.
#[derive(Debug, Clone)]
pub struct SumSet {
    packer: SumPacker,
    sums: HashSet<SumKey>,
}

impl SumSet {
    pub fn new(params: CodeParams) -> Self {
        Self {
            packer: SumPacker::new(params),
            sums: HashSet::new(),
        }
    }

    /// Builds the sum-set of a B₂ word list. Returns `None` if the words are
    /// not B₂.
    pub fn from_words(params: CodeParams, words: &[Codeword]) -> Option<Self> {
        let mut set = Self::new(params);
        for (i, w) in words.iter().enumerate() {
            if !b2_extends(&set, &words[..i], w) {
                return None;
            }
            set.insert(&words[..i], w);
        }
        Some(set)
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Adds the sums of `word` with each of `words` and with itself.
    pub fn insert(&mut self, words: &[Codeword], word: &Codeword) {
        let w = word.symbols();
        self.sums.insert(self.packer.key(w, w));
        for c in words {
            self.sums.insert(self.packer.key(w, c.symbols()));
        }
    }

    /// Reverses [`SumSet::insert`] for the same arguments.
    pub fn remove(&mut self, words: &[Codeword], word: &Codeword) {
        let w = word.symbols();
        self.sums.remove(&self.packer.key(w, w));
        for c in words {
            self.sums.remove(&self.packer.key(w, c.symbols()));
        }
    }
}

/// Whether `words ∪ {candidate}` is B₂, given `sums` is the sum-set of
/// `words`.
///
/// The new sums `candidate + c` are automatically distinct from each other
/// and from `2·candidate`, so only freshness against `sums` is checked.
pub fn b2_extends(sums: &SumSet, words: &[Codeword], candidate: &Codeword) -> bool {
    debug_assert_eq!(
        sums.len(),
        words.len() * (words.len() + 1) / 2,
        "sum cache out of sync with the code"
    );
    let cand = candidate.symbols();
    if sums.sums.contains(&sums.packer.key(cand, cand)) {
        return false;
    }
    words
        .iter()
        .all(|c| !sums.sums.contains(&sums.packer.key(cand, c.symbols())))
}

/// First pair of index pairs with equal sums, if any.
pub fn b2_violation(code: &Code) -> Option<Violation> {
    let packer = SumPacker::new(code.params());
    let words = code.words();
    let mut seen: HashMap<SumKey, (usize, usize)> = HashMap::new();
    for j in 0..words.len() {
        for i in 0..=j {
            let key = packer.key(words[i].symbols(), words[j].symbols());
            if let Some(&first) = seen.get(&key) {
                return Some(Violation::B2 {
                    first,
                    second: (i, j),
                });
            }
            seen.insert(key, (i, j));
        }
    }
    None
}

pub fn is_b2(code: &Code) -> bool {
    b2_violation(code).is_none()
}

/// Dispatches to the batch check for `property`.
pub fn property_violation(
    code: &Code,
    property: CodeProperty,
    check: SeparableCheck,
) -> Result<Option<Violation>, PredicateError> {
    match property.validate()? {
        CodeProperty::Frameproof(t) => frameproof_violation(code, t),
        CodeProperty::SeparableBar(t) => separable_violation(code, t, check),
        CodeProperty::B2 => Ok(b2_violation(code)),
    }
}

pub fn satisfies(code: &Code, property: CodeProperty) -> Result<bool, PredicateError> {
    Ok(property_violation(code, property, SeparableCheck::default())?.is_none())
}

/// Independently confirms that `violation` is a genuine counterexample in
/// `code`.
pub fn violation_holds(code: &Code, violation: &Violation) -> bool {
    let words = code.words();
    let valid = |i: &usize| *i < words.len();
    match violation {
        Violation::Frameproof { target, coalition } => {
            valid(target)
                && coalition.iter().all(valid)
                && !coalition.contains(target)
                && (0..code.n()).all(|k| {
                    coalition
                        .iter()
                        .any(|&s| words[s].symbols()[k] == words[*target].symbols()[k])
                })
        }
        Violation::Separable { first, second } => {
            if !first.iter().chain(second).all(valid) {
                return false;
            }
            let as_set = |s: &[usize]| s.iter().copied().collect::<HashSet<_>>();
            if first.is_empty() || second.is_empty() || as_set(first) == as_set(second) {
                return false;
            }
            (0..code.n()).all(|k| {
                let column = |s: &[usize]| {
                    s.iter()
                        .map(|&i| words[i].symbols()[k])
                        .collect::<HashSet<_>>()
                };
                column(first) == column(second)
            })
        }
        Violation::B2 { first, second } => {
            let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
            if ![first.0, first.1, second.0, second.1].iter().all(valid)
                || norm(*first) == norm(*second)
            {
                return false;
            }
            (0..code.n()).all(|k| {
                let s = |i: usize| words[i].symbols()[k] as u32;
                s(first.0) + s(first.1) == s(second.0) + s(second.1)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(q: u32, rows: &[&[Symbol]]) -> Code {
        Code::from_rows(q, rows).unwrap()
    }

    fn w(s: &[Symbol]) -> Codeword {
        Codeword::new(s.to_vec())
    }

    #[test]
    fn frameproof_examples() {
        let three = code(2, &[&[0, 0], &[0, 1], &[1, 0]]);
        let four = code(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(is_frameproof(&three, 1).unwrap());
        assert!(is_frameproof(&four, 1).unwrap());
        assert!(!is_frameproof(&three, 2).unwrap());
        assert!(!is_frameproof(&four, 2).unwrap());
        let v = frameproof_violation(&three, 2).unwrap().unwrap();
        assert_eq!(
            v,
            Violation::Frameproof {
                target: 0,
                coalition: vec![1, 2]
            }
        );
        assert!(violation_holds(&three, &v));
        assert!(frameproof_violation(&three, 0).is_err());
    }

    #[test]
    fn frameproof_single_word_is_vacuous() {
        let single = code(3, &[&[1, 2]]);
        assert!(is_frameproof(&single, 5).unwrap());
    }

    #[test]
    fn separable_examples() {
        let four = code(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let v = separable_violation(&four, 2, SeparableCheck::default())
            .unwrap()
            .unwrap();
        assert_eq!(
            v,
            Violation::Separable {
                first: vec![0, 3],
                second: vec![1, 2]
            }
        );
        assert!(violation_holds(&four, &v));
        assert!(is_separable(&code(2, &[&[0, 0], &[0, 1], &[1, 0]]), 2).unwrap());
        assert!(is_separable(&code(2, &[&[0], &[1]]), 2).unwrap());
        assert!(is_separable(&code(2, &[&[1]]), 2).unwrap());
        assert!(is_separable(&four, 1).is_err());
    }

    #[test]
    fn separable_budget_guard() {
        let four = code(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let tight = SeparableCheck {
            budget: 5,
            ..SeparableCheck::default()
        };
        assert!(matches!(
            separable_violation(&four, 2, tight),
            Err(PredicateError::BudgetExceeded { work: 20, budget: 5 })
        ));
    }

    #[test]
    fn b2_examples() {
        assert!(is_b2(&code(2, &[&[0, 0], &[0, 1], &[1, 1]])));
        let four = code(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let v = b2_violation(&four).unwrap();
        assert_eq!(
            v,
            Violation::B2 {
                first: (1, 2),
                second: (0, 3)
            }
        );
        assert!(violation_holds(&four, &v));
        assert!(is_b2(&code(5, &[&[4, 4, 4]])));
    }

    #[test]
    fn b2_self_sum_collision() {
        // 2·(1) = 0 + 2
        let c = code(3, &[&[0], &[1], &[2]]);
        let v = b2_violation(&c).unwrap();
        assert!(violation_holds(&c, &v));
    }

    #[test]
    fn b2_extends_examples() {
        let params = CodeParams::new(2, 2).unwrap();
        let two = vec![w(&[0, 0]), w(&[0, 1])];
        let sums = SumSet::from_words(params, &two).unwrap();
        assert!(b2_extends(&sums, &two, &w(&[1, 1])));

        let three = vec![w(&[0, 0]), w(&[0, 1]), w(&[1, 0])];
        let sums = SumSet::from_words(params, &three).unwrap();
        assert!(!b2_extends(&sums, &three, &w(&[1, 1])));

        let empty = SumSet::new(params);
        assert!(b2_extends(&empty, &[], &w(&[1, 0])));
    }

    #[test]
    fn sum_set_insert_remove_roundtrip() {
        let params = CodeParams::new(3, 2).unwrap();
        let words = vec![w(&[0, 0]), w(&[0, 1])];
        let mut sums = SumSet::from_words(params, &words).unwrap();
        let before = sums.len();
        sums.insert(&words, &w(&[2, 2]));
        assert_eq!(sums.len(), before + 3);
        sums.remove(&words, &w(&[2, 2]));
        assert_eq!(sums.len(), before);
    }

    #[test]
    fn wide_sum_keys() {
        // 3 bits per coordinate * 50 coordinates does not fit in 128 bits.
        let a: Vec<Symbol> = (0..50).map(|i| (i % 3) as Symbol).collect();
        let b: Vec<Symbol> = (0..50).map(|i| ((i + 1) % 3) as Symbol).collect();
        let mut c = a.clone();
        c[49] = (c[49] + 1) % 3;
        let mut d = b.clone();
        d[49] = (d[49] + 2) % 3;
        let sum = |x: &[Symbol], y: &[Symbol]| x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<_>>();
        let code = Code::from_rows(3, &[a.clone(), b.clone(), c.clone(), d.clone()]).unwrap();
        assert_eq!(is_b2(&code), {
            let all = [&a, &b, &c, &d];
            let mut sums = Vec::new();
            for j in 0..4 {
                for i in 0..=j {
                    sums.push(sum(all[i], all[j]));
                }
            }
            let n = sums.len();
            sums.sort();
            sums.dedup();
            sums.len() == n
        });
    }

    #[test]
    fn sep2_extends_examples() {
        let two = vec![w(&[0, 0]), w(&[0, 1])];
        assert!(sep2_extends(&two, &w(&[1, 0])));
        let three = vec![w(&[0, 0]), w(&[0, 1]), w(&[1, 0])];
        assert!(!sep2_extends(&three, &w(&[1, 1])));
        assert!(sep2_extends(&[], &w(&[1, 1])));
    }

    #[test]
    fn fp_extends_examples() {
        let two = vec![w(&[0, 0]), w(&[0, 1])];
        assert!(!fp_extends(&two, &w(&[1, 0]), 2));
        assert!(fp_extends(&two, &w(&[1, 0]), 1));
        assert!(fp_extends(&[], &w(&[1, 0]), 3));
    }

    #[test]
    fn separable_index_push_pop() {
        let mut index = SeparableIndex::new(2, SeparableReading::Distinct);
        index.push(w(&[0, 0]));
        index.push(w(&[0, 1]));
        index.push(w(&[1, 0]));
        assert!(!index.allows(&w(&[1, 1])));
        index.pop();
        assert!(index.allows(&w(&[1, 1])));
        assert_eq!(index.words().len(), 2);
    }

    #[test]
    fn readings_differ_at_three() {
        // Only overlapping subsets share unions here: {a, b, c} vs {a, d}
        // with a=000, d=111, b=101, c=011.
        let c = code(2, &[&[0, 0, 0], &[1, 1, 1], &[1, 0, 1], &[0, 1, 1]]);
        let distinct = separable_violation(&c, 3, SeparableCheck::default())
            .unwrap()
            .expect("overlapping clash");
        assert!(violation_holds(&c, &distinct));
        let disjoint_only = SeparableCheck {
            reading: SeparableReading::Disjoint,
            ..SeparableCheck::default()
        };
        assert_eq!(separable_violation(&c, 3, disjoint_only).unwrap(), None);
        // The readings agree at t = 2.
        assert!(is_separable(&c, 2).unwrap());
    }

    #[test]
    fn property_parsing() {
        assert_eq!("sep2".parse(), Ok(CodeProperty::SeparableBar(2)));
        assert_eq!("sep:3".parse(), Ok(CodeProperty::SeparableBar(3)));
        assert_eq!("fp:1".parse(), Ok(CodeProperty::Frameproof(1)));
        assert_eq!("b2".parse(), Ok(CodeProperty::B2));
        assert!("sep:1".parse::<CodeProperty>().is_err());
        assert!("fp:0".parse::<CodeProperty>().is_err());
        assert!("sidon".parse::<CodeProperty>().is_err());
        assert_eq!(CodeProperty::SeparableBar(2).to_string(), "sep2");
        assert_eq!(CodeProperty::Frameproof(3).to_string(), "fp:3");
    }
}
