//! Exhaustive maximum-code search at small `(q, n)`.
//!
//! Codewords are enumerated lexicographically and a partial code only grows
//! by words larger than its last one, so every code is visited once as a
//! sorted sequence. Each node keeps the remaining words that can still be
//! added on their own (all three properties are hereditary) together with
//! which pairs of them can be added together. A greedy colouring of that
//! compatibility graph bounds how many more words fit. Partial codes that
//! are not lexicographically minimal under the symmetries of the property
//! are skipped.
//!
//! The tree is cut at its first one or two levels into independent tasks,
//! run in a fixed batch schedule, so the result (witness, node count,
//! completeness) does not depend on how many workers run them.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{rate_bound_b2, rate_bound_reference, rate_bound_sep2, ReferenceBound};
use crate::code::{Code, CodeError, CodeParams, Codeword};
use crate::predicates::{
    b2_extends, fp_extends, CodeProperty, PredicateError, SeparableIndex, SeparableReading, SumSet,
};

/// Largest `q^n` the search accepts.
pub const MAX_SEARCH_SPACE: u64 = 1 << 24;
pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;
const PROGRESS_INTERVAL: u64 = 1_000_000;
/// Below this many admissible first words, tasks are cut at depth two.
const SPLIT_DEPTH_TWO_BELOW: usize = 32;
/// Search tasks run in batches of this size.
const TASK_BATCH: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search space q^n = {q}^{n} exceeds the exhaustive limit of 2^24 words")]
    SpaceTooLarge { q: u32, n: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Knobs shared by single searches and search tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Node cap for each independent subtree task.
    pub node_limit: u64,
    /// Restrict the first codeword using symmetries of the property.
    pub use_symmetry: bool,
    pub workers: usize,
    /// Reading of the separability condition (irrelevant for other
    /// properties).
    pub reading: SeparableReading,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
            use_symmetry: true,
            workers: 1,
            reading: SeparableReading::Distinct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub params: CodeParams,
    pub property: CodeProperty,
    pub options: SearchOptions,
}

impl SearchConfig {
    pub fn new(params: CodeParams, property: CodeProperty) -> Self {
        Self {
            params,
            property,
            options: SearchOptions::default(),
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.options.workers = workers;
        self
    }

    pub fn symmetry(mut self, on: bool) -> Self {
        self.options.use_symmetry = on;
        self
    }

    pub fn node_limit(mut self, limit: u64) -> Self {
        self.options.node_limit = limit;
        self
    }

    pub fn reading(mut self, reading: SeparableReading) -> Self {
        self.options.reading = reading;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub max_size: usize,
    /// Lexicographically smallest code of size `max_size`, words sorted.
    pub witness: Code,
    pub nodes_explored: u64,
    /// `false` if some task hit the node limit; `max_size` is then only a
    /// lower bound.
    pub complete: bool,
}

impl SearchResult {
    pub fn summary_line(&self) -> String {
        format!(
            "max_size={} nodes={} complete={}",
            self.max_size, self.nodes_explored, self.complete
        )
    }
}

impl fmt::Display for SearchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.witness.to_text(), self.summary_line())
    }
}

/// Word lists up to this size get a full table of pair keys.
const PAIR_TABLE_WORDS: usize = 1024;
/// Largest pair-key space backed by a bitset (bits).
const PAIR_KEY_SPACE_LIMIT: u64 = 1 << 27;

/// How a pair of words maps to its key.
#[derive(Debug)]
enum PairKeyKind {
    /// Coordinatewise sum: word `i` has digits in base `2q - 1`, so adding
    /// the spread values never carries.
    Sum(Vec<u64>),
    /// Coordinatewise symbol sets, each coded in `0..q(q+1)/2`.
    Union { symbol_set: Vec<u64>, base: u64 },
}

/// Both B₂ and 2̄-separability say that some key of the unordered pair
/// `{a, b}` (with `a = b` allowed) is injective on the code.
#[derive(Debug)]
struct PairKeys {
    kind: PairKeyKind,
    q: usize,
    n: usize,
    space: u64,
    words: usize,
    /// Every pair's key, when the word list is small.
    pairs: Option<Vec<u32>>,
    /// The inverse of `pairs`.
    by_key: Option<PairsByKey>,
}

/// Unordered pairs `(a, b)`, `a <= b`, grouped by key.
#[derive(Debug)]
struct PairsByKey {
    offsets: Vec<u32>,
    pairs: Vec<(u32, u32)>,
}

impl PairKeys {
    fn for_property(config: &SearchConfig, table: &[Codeword]) -> Option<Self> {
        let q = config.params.q() as u64;
        let n = config.params.n();
        let base = match config.property {
            CodeProperty::B2 => 2 * q - 1,
            // Both readings coincide at t = 2.
            CodeProperty::SeparableBar(2) => q * (q + 1) / 2,
            _ => return None,
        };
        let space = base.checked_pow(n as u32).filter(|&s| s <= PAIR_KEY_SPACE_LIMIT)?;
        let kind = match config.property {
            CodeProperty::B2 => {
                let spread = table
                    .iter()
                    .map(|w| w.symbols().iter().fold(0u64, |acc, &s| acc * base + s as u64))
                    .collect();
                PairKeyKind::Sum(spread)
            }
            _ => {
                let mut symbol_set = vec![0; (q * q) as usize];
                for x in 0..q {
                    for y in 0..q {
                        let (lo, hi) = (x.min(y), x.max(y));
                        symbol_set[(x * q + y) as usize] =
                            if lo == hi { lo } else { q + hi * (hi - 1) / 2 + lo };
                    }
                }
                PairKeyKind::Union { symbol_set, base }
            }
        };
        let mut keys = Self {
            kind,
            q: q as usize,
            n,
            space,
            words: table.len(),
            pairs: None,
            by_key: None,
        };
        if table.len() <= PAIR_TABLE_WORDS {
            let words = table.len() as u32;
            let pairs: Vec<u32> = (0..words)
                .flat_map(|a| (0..words).map(move |b| (a, b)))
                .map(|(a, b)| keys.compute(table, a, b) as u32)
                .collect();
            let mut offsets = vec![0u32; space as usize + 1];
            for a in 0..words {
                for b in a..words {
                    offsets[pairs[(a * words + b) as usize] as usize + 1] += 1;
                }
            }
            for i in 1..offsets.len() {
                offsets[i] += offsets[i - 1];
            }
            let mut fill = offsets.clone();
            let mut grouped = vec![(0, 0); *offsets.last().expect("nonempty") as usize];
            for a in 0..words {
                for b in a..words {
                    let slot = &mut fill[pairs[(a * words + b) as usize] as usize];
                    grouped[*slot as usize] = (a, b);
                    *slot += 1;
                }
            }
            keys.pairs = Some(pairs);
            keys.by_key = Some(PairsByKey { offsets, pairs: grouped });
        }
        Some(keys)
    }

    fn key(&self, table: &[Codeword], a: u32, b: u32) -> usize {
        match &self.pairs {
            Some(pairs) => pairs[a as usize * self.words + b as usize] as usize,
            None => self.compute(table, a, b),
        }
    }

    /// Table lookup; only valid when the table exists.
    fn key_of(&self, a: u32, b: u32) -> usize {
        self.pairs.as_ref().expect("pair table")[a as usize * self.words + b as usize] as usize
    }

    fn pairs_with(&self, key: usize) -> &[(u32, u32)] {
        let by_key = self.by_key.as_ref().expect("pair table");
        &by_key.pairs[by_key.offsets[key] as usize..by_key.offsets[key + 1] as usize]
    }

    fn compute(&self, table: &[Codeword], a: u32, b: u32) -> usize {
        match &self.kind {
            PairKeyKind::Sum(spread) => (spread[a as usize] + spread[b as usize]) as usize,
            PairKeyKind::Union { symbol_set, base } => {
                let (a, b) = (table[a as usize].symbols(), table[b as usize].symbols());
                (0..self.n).fold(0u64, |acc, i| {
                    acc * base + symbol_set[a[i] as usize * self.q + b[i] as usize]
                }) as usize
            }
        }
    }
}

/// Bitset of keys in use by the current partial code.
#[derive(Debug, Clone)]
struct KeySet {
    bits: Vec<u64>,
}

impl KeySet {
    fn new(space: u64) -> Self {
        Self {
            bits: vec![0; space.div_ceil(64) as usize],
        }
    }

    fn contains(&self, key: usize) -> bool {
        self.bits[key / 64] >> (key % 64) & 1 == 1
    }

    fn toggle(&mut self, key: usize) {
        self.bits[key / 64] ^= 1 << (key % 64);
    }
}

/// Per-property incremental admissibility state.
#[derive(Debug, Clone)]
enum Extender {
    Keys(KeySet),
    B2(SumSet),
    Separable(SeparableIndex),
    Frameproof(usize),
}

#[derive(Debug, Clone)]
struct PartialCode {
    indices: Vec<u32>,
    words: Vec<Codeword>,
    extender: Extender,
}

impl PartialCode {
    fn new(ctx: &Context<'_>) -> Self {
        let config = ctx.config;
        let extender = match (&ctx.keys, config.property) {
            (Some(keys), _) => Extender::Keys(KeySet::new(keys.space)),
            (None, CodeProperty::B2) => Extender::B2(SumSet::new(config.params)),
            (None, CodeProperty::SeparableBar(t)) => {
                Extender::Separable(SeparableIndex::new(t, config.options.reading))
            }
            (None, CodeProperty::Frameproof(t)) => Extender::Frameproof(t),
        };
        Self {
            indices: Vec::new(),
            words: Vec::new(),
            extender,
        }
    }

    /// Keys of the new pairs are pairwise distinct whenever `candidate` is
    /// not in the code, so only collisions with existing keys matter.
    fn allows(&self, ctx: &Context<'_>, candidate: u32) -> bool {
        let word = &ctx.table[candidate as usize];
        match &self.extender {
            Extender::Keys(used) => {
                let keys = ctx.keys.as_ref().expect("key extender without keys");
                !used.contains(keys.key(&ctx.table, candidate, candidate))
                    && self
                        .indices
                        .iter()
                        .all(|&w| !used.contains(keys.key(&ctx.table, candidate, w)))
            }
            Extender::B2(sums) => b2_extends(sums, &self.words, word),
            Extender::Separable(index) => index.allows(word),
            Extender::Frameproof(t) => fp_extends(&self.words, word, *t),
        }
    }

    fn toggle_keys(&mut self, ctx: &Context<'_>, index: u32) {
        if let Extender::Keys(used) = &mut self.extender {
            let keys = ctx.keys.as_ref().expect("key extender without keys");
            used.toggle(keys.key(&ctx.table, index, index));
            for &w in &self.indices {
                used.toggle(keys.key(&ctx.table, index, w));
            }
        }
    }

    fn push(&mut self, ctx: &Context<'_>, index: u32) {
        let word = ctx.table[index as usize].clone();
        self.toggle_keys(ctx, index);
        match &mut self.extender {
            Extender::B2(sums) => sums.insert(&self.words, &word),
            Extender::Separable(sep) => sep.push(word.clone()),
            Extender::Keys(_) | Extender::Frameproof(_) => {}
        }
        self.indices.push(index);
        self.words.push(word);
    }

    fn pop(&mut self, ctx: &Context<'_>) {
        let index = self.indices.pop().expect("pop on empty partial code");
        let word = self.words.pop().expect("pop on empty partial code");
        self.toggle_keys(ctx, index);
        match &mut self.extender {
            Extender::B2(sums) => sums.remove(&self.words, &word),
            Extender::Separable(sep) => {
                sep.pop();
            }
            Extender::Keys(_) | Extender::Frameproof(_) => {}
        }
    }
}

/// Largest symmetry set used for canonicity pruning.
const MAX_SYMMETRIES: usize = 4096;

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for x in 0..k {
            if !prefix.contains(&x) {
                prefix.push(x);
                extend(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(k), k, &mut out);
    out
}

/// Symmetries of the property, as permutations of word indices, used to
/// discard partial codes that are not the lexicographically smallest in
/// their orbit. Removing the largest word of such a minimal code leaves a
/// minimal code, so the lexicographically smallest maximum code and all its
/// prefixes survive. Any subset of the group is sound; the identity is left
/// out.
#[derive(Debug, Default)]
struct Symmetries {
    count: usize,
    /// `images[w * count + g]` is the image of word `w` under map `g`.
    images: Vec<u32>,
}

impl Symmetries {
    fn new(config: &SearchConfig, table: &[Codeword]) -> Self {
        if !config.options.use_symmetry {
            return Self::default();
        }
        let q = config.params.q() as usize;
        let n = config.params.n();
        let factorial = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k));
        if factorial.is_none_or(|f| f > MAX_SYMMETRIES) || table.len() > MAX_SYMMETRIES {
            return Self::default();
        }
        // Per-coordinate symbol maps: for separable and frameproof codes any
        // permutation fixing 0; for B₂ the reversal s ↦ q - 1 - s.
        let mut symbol_maps: Vec<Vec<usize>> = match config.property {
            CodeProperty::B2 => vec![(0..q).collect(), (0..q).rev().collect()],
            _ => permutations(q - 1)
                .into_iter()
                .map(|p| std::iter::once(0).chain(p.into_iter().map(|x| x + 1)).collect())
                .collect(),
        };
        let coordinate_perms = permutations(n);
        let total = (symbol_maps.len() as u64)
            .checked_pow(n as u32)
            .and_then(|t| t.checked_mul(coordinate_perms.len() as u64));
        if total.is_none_or(|t| t > MAX_SYMMETRIES as u64) {
            symbol_maps.truncate(1);
        }

        let q_pow: Vec<u64> = (0..n).map(|i| (q as u64).pow((n - 1 - i) as u32)).collect();
        let mut maps = Vec::new();
        let mut choice = vec![0usize; n];
        for perm in &coordinate_perms {
            loop {
                let identity = perm.iter().enumerate().all(|(i, &p)| i == p)
                    && choice.iter().all(|&c| c == 0);
                if !identity {
                    let map = table
                        .iter()
                        .map(|w| {
                            let s = w.symbols();
                            (0..n)
                                .map(|i| symbol_maps[choice[i]][s[perm[i]] as usize] as u64 * q_pow[i])
                                .sum::<u64>() as u32
                        })
                        .collect();
                    maps.push(map);
                }
                // Odometer over the per-coordinate symbol maps.
                let mut i = 0;
                while i < n {
                    choice[i] += 1;
                    if choice[i] < symbol_maps.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        let count = maps.len();
        let images = (0..table.len())
            .flat_map(|w| maps.iter().map(move |m: &Vec<u32>| m[w]))
            .collect();
        Self { count, images }
    }

    /// `false` if some map sends the sorted set `code` to a lexicographically
    /// smaller set.
    fn is_canonical(&self, code: &[u32]) -> bool {
        if self.count == 0 {
            return true;
        }
        let mut orbit = OrbitImages::new(self);
        code.iter().for_each(|&w| orbit.push(self, w));
        orbit.is_canonical()
    }
}

/// Images of the current partial code under every symmetry, as bitsets over
/// word indices. For sorted sets of equal size, `A < B` exactly when the
/// smallest element of `A △ B` lies in `A`; that element is cached per map.
#[derive(Debug, Clone)]
struct OrbitImages {
    stride: usize,
    current: Vec<u64>,
    images: Vec<u64>,
    /// Smallest element of `image △ current` per map, `NONE` if equal.
    first_diff: Vec<u32>,
    saved: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl OrbitImages {
    fn new(symmetries: &Symmetries) -> Self {
        let words = symmetries.images.len().checked_div(symmetries.count).unwrap_or(0);
        let stride = if symmetries.count == 0 { 0 } else { words.div_ceil(64) };
        Self {
            stride,
            current: vec![0; stride],
            images: vec![0; stride * symmetries.count],
            first_diff: vec![NONE; symmetries.count],
            saved: Vec::new(),
        }
    }

    fn images_of<'s>(&self, symmetries: &'s Symmetries, word: u32) -> &'s [u32] {
        let start = word as usize * symmetries.count;
        &symmetries.images[start..start + symmetries.count]
    }

    fn diff_of(&self, g: usize) -> u32 {
        let image = &self.images[g * self.stride..(g + 1) * self.stride];
        image
            .iter()
            .zip(&self.current)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map_or(NONE, |(i, (a, b))| (i * 64) as u32 + (a ^ b).trailing_zeros())
    }

    fn is_smaller(&self, g: usize) -> bool {
        let d = self.first_diff[g];
        d != NONE && self.images[g * self.stride + d as usize / 64] >> (d % 64) & 1 == 1
    }

    /// Adds `word`, larger than every word already present.
    fn push(&mut self, symmetries: &Symmetries, word: u32) {
        if self.stride == 0 {
            return;
        }
        self.saved.extend_from_slice(&self.first_diff);
        self.current[word as usize / 64] ^= 1 << (word % 64);
        for (g, &w) in self.images_of(symmetries, word).iter().enumerate() {
            self.images[g * self.stride + w as usize / 64] ^= 1 << (w % 64);
            let d = self.first_diff[g];
            if d == NONE {
                self.first_diff[g] = if w == word { NONE } else { w.min(word) };
            } else if w <= d || word <= d {
                self.first_diff[g] = self.diff_of(g);
            }
        }
    }

    fn pop(&mut self, symmetries: &Symmetries, word: u32) {
        if self.stride == 0 {
            return;
        }
        self.current[word as usize / 64] ^= 1 << (word % 64);
        for (g, &w) in self.images_of(symmetries, word).iter().enumerate() {
            self.images[g * self.stride + w as usize / 64] ^= 1 << (w % 64);
        }
        let count = self.first_diff.len();
        let at = self.saved.len() - count;
        self.first_diff.copy_from_slice(&self.saved[at..]);
        self.saved.truncate(at);
    }

    fn is_canonical(&self) -> bool {
        (0..self.first_diff.len()).all(|g| !self.is_smaller(g))
    }

    /// Whether a canonical code stays canonical once `word`, larger than all
    /// its words, is added.
    fn allows(&self, symmetries: &Symmetries, word: u32) -> bool {
        if self.stride == 0 {
            return true;
        }
        let (cw, cb) = (word as usize / 64, 1u64 << (word % 64));
        self.images_of(symmetries, word)
            .iter()
            .zip(&self.first_diff)
            .enumerate()
            .all(|(g, (&w, &d))| {
                if d == NONE {
                    return w >= word;
                }
                if w != d {
                    return w > d;
                }
                let base = &self.images[g * self.stride..(g + 1) * self.stride];
                let (iw, ib) = (w as usize / 64, 1u64 << (w % 64));
                (0..self.stride)
                    .map(|i| {
                        let a = if i == iw { base[i] ^ ib } else { base[i] };
                        let b = if i == cw { self.current[i] | cb } else { self.current[i] };
                        (a, b)
                    })
                    .find(|(a, b)| a != b)
                    .is_none_or(|(a, b)| {
                        let diff = a ^ b;
                        b & diff & diff.wrapping_neg() != 0
                    })
            })
    }
}

struct Context<'a> {
    config: &'a SearchConfig,
    space: u32,
    table: Vec<Codeword>,
    keys: Option<PairKeys>,
    symmetries: Symmetries,
}

impl<'a> Context<'a> {
    fn new(config: &'a SearchConfig, space: u32) -> Self {
        let table: Vec<Codeword> = (0..space as u64)
            .map(|i| Codeword::from_index(config.params, i))
            .collect();
        Self {
            config,
            space,
            keys: PairKeys::for_property(config, &table),
            symmetries: Symmetries::new(config, &table),
            table,
        }
    }

    /// Indices that may start a code.
    fn first_words(&self) -> Vec<u32> {
        if !self.config.options.use_symmetry {
            return (0..self.space).collect();
        }
        match self.config.property {
            // Per-coordinate symbol permutations map any codeword to 0^n.
            CodeProperty::SeparableBar(_) | CodeProperty::Frameproof(_) => vec![0],
            // For q = 2, per-coordinate reversal s ↦ 1 - s does the same.
            CodeProperty::B2 if self.config.params.q() == 2 => vec![0],
            // Subtracting each coordinate's minimum keeps sums distinct, so
            // the smallest word can be assumed to start with 0.
            CodeProperty::B2 => (0..self.space / self.config.params.q()).collect(),
        }
    }

    /// Lexicographically first maximal code starting at `first`.
    fn greedy(&self, first: u32) -> Vec<u32> {
        let mut partial = PartialCode::new(self);
        partial.push(self, first);
        for i in first + 1..self.space {
            if partial.allows(self, i) {
                partial.push(self, i);
            }
        }
        partial.indices
    }
}

/// Canonicity is only enforced on this many leading words of a code.
const CANONICAL_DEPTH: usize = 8;

/// Largest compatibility matrix kept for one node, in 64-bit words. Bigger
/// nodes fall back to the plain `|code| + |candidates|` bound.
const MATRIX_WORDS_LIMIT: usize = 1 << 24;

fn has(bits: &[u64], i: u32) -> bool {
    bits[i as usize / 64] >> (i % 64) & 1 == 1
}

fn set_bit(bits: &mut [u64], i: u32) {
    bits[i as usize / 64] |= 1 << (i % 64);
}

fn clear_bit(bits: &mut [u64], i: u32) {
    bits[i as usize / 64] &= !(1 << (i % 64));
}

fn ones(bits: &[u64]) -> impl Iterator<Item = u32> + '_ {
    bits.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let b = w.trailing_zeros();
                w &= w - 1;
                (i * 64) as u32 + b
            })
        })
    })
}

fn highest(bits: &[u64]) -> Option<u32> {
    bits.iter()
        .rposition(|&w| w != 0)
        .map(|i| (i * 64) as u32 + 63 - bits[i].leading_zeros())
}

/// Candidates of one search node. With `rows`, row `j` is the set of
/// candidates that can join the code together with `words[j]`; all sets
/// are bitsets over word indices.
#[derive(Debug, Default)]
struct Level {
    words: Vec<u32>,
    set: Vec<u64>,
    rows: Option<Vec<u64>>,
    /// `bound[j]` caps how many of `words[j..]` can still be added.
    bound: Vec<usize>,
}

impl Level {
    fn position(&self, word: u32) -> usize {
        self.words.binary_search(&word).expect("word is a candidate")
    }

    /// Removes the pair `{a, b}` from the compatibility rows.
    fn cut(&mut self, stride: usize, a: u32, b: u32) {
        let (ia, ib) = (self.position(a), self.position(b));
        let rows = self.rows.as_mut().expect("rows present");
        clear_bit(&mut rows[ia * stride..(ia + 1) * stride], b);
        clear_bit(&mut rows[ib * stride..(ib + 1) * stride], a);
    }

    /// Fills the rows by testing every pair against `partial`.
    fn fill_rows(&mut self, ctx: &Context<'_>, partial: &mut PartialCode, stride: usize) {
        let k = self.words.len();
        if k * stride > MATRIX_WORDS_LIMIT {
            self.rows = None;
            return;
        }
        let mut rows = self.rows.take().unwrap_or_default();
        rows.clear();
        rows.resize(k * stride, 0);
        for (i, &a) in self.words.iter().enumerate() {
            partial.push(ctx, a);
            for (j, &b) in self.words.iter().enumerate().skip(i + 1) {
                if partial.allows(ctx, b) {
                    set_bit(&mut rows[i * stride..(i + 1) * stride], b);
                    set_bit(&mut rows[j * stride..(j + 1) * stride], a);
                }
            }
            partial.pop(ctx);
        }
        self.rows = Some(rows);
    }

    /// Greedy colouring of the candidates from last to first into classes of
    /// pairwise incompatible words, one class at a time. A code takes at most
    /// one word per class, so `bound[j]` is the number of classes met by
    /// `words[j..]`.
    fn colour(&mut self, stride: usize, rest: &mut Vec<u64>, avail: &mut Vec<u64>) {
        let k = self.words.len();
        self.bound.clear();
        let Some(rows) = &self.rows else {
            self.bound.extend((1..=k).rev());
            return;
        };
        self.bound.resize(k, 0);
        rest.clear();
        rest.extend_from_slice(&self.set);
        let mut colour = 0;
        while rest.iter().any(|&w| w != 0) {
            colour += 1;
            avail.clear();
            avail.extend_from_slice(rest);
            while let Some(v) = highest(avail) {
                let p = self.words.binary_search(&v).expect("word is a candidate");
                self.bound[p] = colour;
                clear_bit(rest, v);
                clear_bit(avail, v);
                for (a, r) in avail.iter_mut().zip(&rows[p * stride..(p + 1) * stride]) {
                    *a &= !r;
                }
            }
        }
        let mut running = 0;
        for b in self.bound.iter_mut().rev() {
            running = running.max(*b);
            *b = running;
        }
    }
}

#[derive(Debug)]
struct TaskOutcome {
    best: Vec<u32>,
    nodes: u64,
    complete: bool,
}

struct Task<'a> {
    ctx: &'a Context<'a>,
    floor: usize,
    stride: usize,
    orbit: OrbitImages,
    partial: PartialCode,
    /// Bitset of the words in `partial`.
    in_code: Vec<u64>,
    /// One entry per depth, reused across siblings.
    levels: Vec<Level>,
    scratch: (Vec<u64>, Vec<u64>),
    best: Vec<u32>,
    nodes: u64,
    aborted: bool,
}

impl Task<'_> {
    fn bar(&self) -> usize {
        self.best.len().max(self.floor)
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes > self.ctx.config.options.node_limit {
            self.aborted = true;
            return;
        }
        if self.nodes.is_multiple_of(PROGRESS_INTERVAL) {
            log::debug!(
                "task {:?}: {} nodes, best {}",
                &self.partial.indices[..self.partial.indices.len().min(2)],
                self.nodes,
                self.best.len()
            );
        }
        let size = self.partial.indices.len();
        if size > self.best.len() {
            self.best = self.partial.indices.clone();
        }
        let k = self.levels[depth].words.len();
        if size + k <= self.bar() {
            return;
        }
        let (rest, avail) = &mut self.scratch;
        self.levels[depth].colour(self.stride, rest, avail);
        if self.levels.len() == depth + 1 {
            self.levels.push(Level::default());
        }
        for j in 0..k {
            let level = &self.levels[depth];
            let c = level.words[j];
            if self.aborted || size + level.bound[j] <= self.bar() {
                break;
            }
            let sym = size < CANONICAL_DEPTH;
            if sym && !self.orbit.allows(&self.ctx.symmetries, c) {
                continue;
            }
            if sym {
                self.orbit.push(&self.ctx.symmetries, c);
            }
            self.partial.push(self.ctx, c);
            set_bit(&mut self.in_code, c);
            self.descend(depth, j);
            self.dfs(depth + 1);
            clear_bit(&mut self.in_code, c);
            self.partial.pop(self.ctx);
            if sym {
                self.orbit.pop(&self.ctx.symmetries, c);
            }
        }
    }

    /// Builds the candidates of the child reached by adding `words[j]` of
    /// level `depth`, which is already pushed.
    fn descend(&mut self, depth: usize, j: usize) {
        let stride = self.stride;
        let (head, tail) = self.levels.split_at_mut(depth + 1);
        let parent = &head[depth];
        let child = &mut tail[0];
        let x = parent.words[j];
        let Some(parent_rows) = &parent.rows else {
            child.words.clear();
            child
                .words
                .extend(parent.words[j + 1..].iter().copied().filter(|&w| self.partial.allows(self.ctx, w)));
            child.set.clear();
            child.set.resize(stride, 0);
            for &w in &child.words {
                set_bit(&mut child.set, w);
            }
            child.fill_rows(self.ctx, &mut self.partial, stride);
            return;
        };

        // Compatibility only shrinks as the code grows: start from the
        // parent's rows restricted to the words compatible with `x`.
        child.set.clear();
        child.set.extend_from_slice(&parent_rows[j * stride..(j + 1) * stride]);
        let (w, b) = (x as usize / 64, x % 64);
        child.set[..w].fill(0);
        child.set[w] &= !(u64::MAX >> (63 - b));
        child.words.clear();
        child.words.extend(ones(&child.set));
        let mut rows = child.rows.take().unwrap_or_default();
        rows.clear();
        let mut p = j + 1;
        for &y in &child.words {
            while parent.words[p] != y {
                p += 1;
            }
            let row = &parent_rows[p * stride..(p + 1) * stride];
            rows.extend(row.iter().zip(&child.set).map(|(r, s)| r & s));
        }
        child.rows = Some(rows);

        match self.ctx.keys.as_ref().filter(|k| k.by_key.is_some()) {
            Some(keys) => key_conflicts(keys, &self.partial.indices, &self.in_code, child, stride),
            None => {
                for i in 0..child.words.len() {
                    let a = child.words[i];
                    self.partial.push(self.ctx, a);
                    let row = &child.rows.as_ref().expect("rows present")[i * stride..(i + 1) * stride];
                    let lost: Vec<u32> = ones(row)
                        .filter(|&b| b > a && !self.partial.allows(self.ctx, b))
                        .collect();
                    self.partial.pop(self.ctx);
                    for b in lost {
                        child.cut(stride, a, b);
                    }
                }
            }
        }
    }
}

/// Removes the candidate pairs that clash once the last word `x` of `code`
/// is added. Keys of `x` with the code are now in use, and every candidate
/// `y` brings the new key `key(y, x)`, which must differ from `key(z, z)`
/// and from every `key(z, c)`, `c` in the code, of a partner `z`.
fn key_conflicts(keys: &PairKeys, code: &[u32], in_code: &[u64], child: &mut Level, stride: usize) {
    let (&x, old) = code.split_last().expect("x was pushed");
    for key in std::iter::once(x).chain(old.iter().copied()).map(|c| keys.key_of(x, c)) {
        for &(a, b) in keys.pairs_with(key) {
            if a != b && has(&child.set, a) && has(&child.set, b) {
                child.cut(stride, a, b);
            }
        }
    }
    for i in 0..child.words.len() {
        let y = child.words[i];
        for &(a, b) in keys.pairs_with(keys.key_of(y, x)) {
            let z = if a == b {
                a
            } else if has(in_code, a) {
                b
            } else if has(in_code, b) {
                a
            } else {
                continue;
            };
            if z != y && has(&child.set, z) {
                child.cut(stride, y, z);
            }
        }
    }
}

fn run_task(ctx: &Context<'_>, prefix: &[u32], floor: usize) -> TaskOutcome {
    let stride = (ctx.space as usize).div_ceil(64);
    let mut partial = PartialCode::new(ctx);
    let mut orbit = OrbitImages::new(&ctx.symmetries);
    let mut in_code = vec![0; stride];
    for &i in prefix {
        partial.push(ctx, i);
        orbit.push(&ctx.symmetries, i);
        set_bit(&mut in_code, i);
    }
    let last = *prefix.last().expect("non-empty task prefix");
    let mut root = Level {
        words: (last + 1..ctx.space).filter(|&x| partial.allows(ctx, x)).collect(),
        set: vec![0; stride],
        ..Level::default()
    };
    for &w in &root.words {
        set_bit(&mut root.set, w);
    }
    root.fill_rows(ctx, &mut partial, stride);
    let mut task = Task {
        ctx,
        floor,
        stride,
        orbit,
        partial,
        in_code,
        levels: vec![root],
        scratch: (Vec::new(), Vec::new()),
        best: Vec::new(),
        nodes: 0,
        aborted: false,
    };
    task.dfs(0);
    log::debug!(
        "task {prefix:?}: {} nodes, best {}, complete {}",
        task.nodes,
        task.best.len(),
        !task.aborted
    );
    TaskOutcome {
        best: task.best,
        nodes: task.nodes,
        complete: !task.aborted,
    }
}

fn validate(config: &SearchConfig) -> Result<u32, SearchError> {
    config.property.validate()?;
    if config.options.node_limit == 0 {
        return Err(SearchError::InvalidConfig("node_limit must be at least 1".into()));
    }
    if config.options.workers == 0 {
        return Err(SearchError::InvalidConfig("workers must be at least 1".into()));
    }
    let q = config.params.q();
    let n = config.params.n();
    match config.params.space_size() {
        Some(space) if space <= MAX_SEARCH_SPACE => Ok(space as u32),
        _ => Err(SearchError::SpaceTooLarge { q, n }),
    }
}

/// Finds the largest code with the configured property and its
/// lexicographically smallest instance.
pub fn max_code_search(config: &SearchConfig) -> Result<SearchResult, SearchError> {
    let space = validate(config)?;
    let ctx = Context::new(config, space);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.options.workers)
        .build()
        .map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let firsts = ctx.first_words();
    let greedy = ctx.greedy(firsts[0]);
    let floor = greedy.len().saturating_sub(1);

    let mut prefixes: Vec<Vec<u32>> = Vec::new();
    if firsts.len() >= SPLIT_DEPTH_TWO_BELOW {
        prefixes.extend(firsts.iter().map(|&w| vec![w]));
    } else {
        for &w1 in &firsts {
            let mut partial = PartialCode::new(&ctx);
            partial.push(&ctx, w1);
            prefixes.extend(
                (w1 + 1..space)
                    .filter(|&w2| partial.allows(&ctx, w2))
                    .map(|w2| vec![w1, w2]),
            );
        }
    }
    prefixes.retain(|p| ctx.symmetries.is_canonical(p));
    log::info!(
        "searching {} q={} n={}: {} tasks, greedy lower bound {}",
        config.property,
        config.params.q(),
        config.params.n(),
        prefixes.len(),
        greedy.len()
    );

    let mut nodes = 0;
    // Tasks run in lexicographic order in batches of sizes 1, 2, 4, ..., each batch
    // seeded with the best size found by the batches before it. A later
    // task only counts if it beats that size, so the earliest largest code
    // wins whatever the worker count.
    let mut best: Vec<u32> = vec![firsts[0]];
    let mut complete = true;
    let mut start = 0;
    let mut batch_len = 1;
    while start < prefixes.len() {
        let batch = &prefixes[start..(start + batch_len).min(prefixes.len())];
        start += batch.len();
        batch_len = (batch_len * 2).min(TASK_BATCH);
        let bar = floor.max(best.len());
        let outcomes: Vec<TaskOutcome> = pool.install(|| {
            batch
                .par_iter()
                .map(|prefix| run_task(&ctx, prefix, bar))
                .collect()
        });
        for outcome in outcomes {
            nodes += outcome.nodes;
            complete &= outcome.complete;
            if outcome.best.len() > best.len() {
                best = outcome.best;
            }
        }
    }
    if greedy.len() > best.len() {
        best = greedy;
    }

    let words = best.iter().map(|&i| ctx.table[i as usize].clone()).collect();
    let witness = Code::new(config.params, words)?;
    Ok(SearchResult {
        max_size: witness.len(),
        witness,
        nodes_explored: nodes,
        complete,
    })
}

/// Asymptotic rate bound matching `property`, for context in tables.
pub fn asymptotic_bound(property: CodeProperty, q: u32) -> Option<f64> {
    let ratio = |r: num_rational::Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
    match property {
        CodeProperty::B2 => rate_bound_b2(q).ok(),
        CodeProperty::SeparableBar(2) => rate_bound_sep2(q).ok().map(ratio),
        CodeProperty::SeparableBar(t) => rate_bound_reference(ReferenceBound::SeparableGeneral, t)
            .ok()
            .map(ratio),
        CodeProperty::Frameproof(t) => rate_bound_reference(ReferenceBound::Frameproof, t)
            .ok()
            .map(ratio),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTableRow {
    pub n: usize,
    pub max_size: usize,
    /// `log_q(max_size) / n`.
    pub rate: f64,
    pub bound: Option<f64>,
    /// The finite-length rate is above the asymptotic bound; expected for
    /// small `n` and not an error.
    pub exceeds_bound: bool,
    pub complete: bool,
}

/// Runs [`max_code_search`] for `n = 1..=n_max`.
pub fn search_table(
    q: u32,
    n_max: usize,
    property: CodeProperty,
    options: SearchOptions,
) -> Result<Vec<SearchTableRow>, SearchError> {
    (1..=n_max)
        .map(|n| {
            let config = SearchConfig {
                params: CodeParams::new(q, n)?,
                property,
                options,
            };
            let result = max_code_search(&config)?;
            let rate = result.witness.rate();
            let bound = asymptotic_bound(property, q);
            Ok(SearchTableRow {
                n,
                max_size: result.max_size,
                rate,
                bound,
                exceeds_bound: bound.is_some_and(|b| rate > b + 1e-12),
                complete: result.complete,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::{satisfies, violation_holds, property_violation, SeparableCheck};

    fn config(q: u32, n: usize, property: CodeProperty) -> SearchConfig {
        SearchConfig::new(CodeParams::new(q, n).unwrap(), property)
    }

    #[test]
    fn binary_b2_small() {
        let r = max_code_search(&config(2, 1, CodeProperty::B2)).unwrap();
        assert_eq!(r.max_size, 2);
        assert_eq!(r.witness.to_text(), "q=2 n=1\n0\n1\n");
        assert!(r.complete);

        let r = max_code_search(&config(2, 2, CodeProperty::B2)).unwrap();
        assert_eq!(r.max_size, 3);
        assert_eq!(r.witness.to_text(), "q=2 n=2\n0 0\n0 1\n1 0\n");
        assert!(r.complete);
    }

    #[test]
    fn binary_sep2_matches_b2() {
        let r = max_code_search(&config(2, 2, CodeProperty::SeparableBar(2))).unwrap();
        assert_eq!(r.max_size, 3);
    }

    #[test]
    fn witness_satisfies_property() {
        for property in [CodeProperty::B2, CodeProperty::SeparableBar(2), CodeProperty::Frameproof(2)] {
            for n in 1..=3 {
                let r = max_code_search(&config(3, n, property)).unwrap();
                assert!(satisfies(&r.witness, property).unwrap(), "{property} n={n}");
            }
        }
    }

    #[test]
    fn node_limit_marks_incomplete() {
        let r = max_code_search(&config(2, 4, CodeProperty::B2).node_limit(1)).unwrap();
        assert!(!r.complete);
        assert!(property_violation(&r.witness, CodeProperty::B2, SeparableCheck::default())
            .unwrap()
            .is_none());
        let full = max_code_search(&config(2, 4, CodeProperty::B2)).unwrap();
        assert!(r.max_size <= full.max_size);
    }

    #[test]
    fn guards() {
        let big = config(2, 25, CodeProperty::B2);
        assert_eq!(
            max_code_search(&big),
            Err(SearchError::SpaceTooLarge { q: 2, n: 25 })
        );
        assert!(max_code_search(&config(2, 2, CodeProperty::B2).workers(0)).is_err());
        assert!(max_code_search(&config(2, 2, CodeProperty::B2).node_limit(0)).is_err());
        assert!(max_code_search(&config(2, 2, CodeProperty::SeparableBar(1))).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = search_table(2, 2, CodeProperty::B2, SearchOptions::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].n, rows[0].max_size), (1, 2));
        assert!((rows[0].rate - 1.0).abs() < 1e-12);
        assert_eq!((rows[1].n, rows[1].max_size), (2, 3));
        assert!((rows[1].rate - 3f64.log2() / 2.0).abs() < 1e-12);
        assert!(rows[0].exceeds_bound && rows[1].exceeds_bound);
        assert!(search_table(2, 0, CodeProperty::B2, SearchOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn frameproof_witness_has_no_cover() {
        let r = max_code_search(&config(2, 3, CodeProperty::Frameproof(2))).unwrap();
        let v = crate::predicates::frameproof_violation(&r.witness, 2).unwrap();
        assert!(v.is_none(), "{:?}", v.map(|v| violation_holds(&r.witness, &v)));
    }
}
