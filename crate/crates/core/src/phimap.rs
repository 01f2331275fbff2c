//! The difference-detecting maps applied to suffix pairs, injectivity checks
//! over prefix partitions, and per-coordinate zero frequencies.
//!
//! Two variants are supported:
//!
//! * [`PhiVariant::Separable`] maps a symbol pair to `0` when the symbols are
//!   equal and to the ordered pair otherwise. Pairs are encoded as integers
//!   in `[1, q² - q]`, row-major over `(x, y)` with the diagonal skipped, so
//!   `(0, 1) ↦ 1`, `(0, 2) ↦ 2`, …, `(1, 0) ↦ q`, ….
//! * [`PhiVariant::B2Diff`] maps a symbol pair to the integer `x - y`.
//!
//! In both variants the zero element is encoded as `0`, so a [`PhiWord`] is
//! all-zero exactly when its two arguments are equal.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::code::{Code, Codeword, PrefixClass, PrefixPartition, Symbol};
use crate::predicates::{CodeProperty, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhiError {
    #[error("symbol {symbol} out of range for q={q}")]
    SymbolOutOfRange { symbol: Symbol, q: u32 },
    #[error("suffix lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty class")]
    EmptyClass,
    #[error("coordinate {coordinate} out of range for suffix length {f}")]
    CoordinateOutOfRange { coordinate: usize, f: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiVariant {
    /// `D = {(x, y) : x ≠ y} ∪ {0}`, for 2̄-separable codes.
    Separable,
    /// `D = {-q+1, …, q-1}`, for B₂ codes.
    B2Diff,
}

impl PhiVariant {
    /// `|D|` for alphabet size `q`.
    pub fn alphabet_size(self, q: u32) -> u64 {
        let q = q as u64;
        match self {
            Self::Separable => q * (q - 1) + 1,
            Self::B2Diff => 2 * q - 1,
        }
    }

    /// The code property under which Φ is injective on same-class pairs.
    pub fn property(self) -> CodeProperty {
        match self {
            Self::Separable => CodeProperty::SeparableBar(2),
            Self::B2Diff => CodeProperty::B2,
        }
    }
}

impl fmt::Display for PhiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Separable => "sep",
            Self::B2Diff => "b2diff",
        })
    }
}

impl FromStr for PhiVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sep" => Ok(Self::Separable),
            "b2diff" => Ok(Self::B2Diff),
            _ => Err(format!("unknown variant `{s}` (expected sep or b2diff)")),
        }
    }
}

/// Single-coordinate map for `variant` over alphabet `[0, q-1]`.
pub fn phi(variant: PhiVariant, q: u32, x: Symbol, y: Symbol) -> Result<i32, PhiError> {
    for s in [x, y] {
        if s as u32 >= q {
            return Err(PhiError::SymbolOutOfRange { symbol: s, q });
        }
    }
    Ok(phi_unchecked(variant, q, x, y))
}

#[inline]
fn phi_unchecked(variant: PhiVariant, q: u32, x: Symbol, y: Symbol) -> i32 {
    let (x, y) = (x as i32, y as i32);
    match variant {
        PhiVariant::B2Diff => x - y,
        PhiVariant::Separable if x == y => 0,
        PhiVariant::Separable => 1 + x * (q as i32 - 1) + if y < x { y } else { y - 1 },
    }
}

/// Inverse of the separable pair encoding; `None` for `0` or out-of-range
/// values.
pub fn decode_pair(q: u32, value: i32) -> Option<(Symbol, Symbol)> {
    let q = q as i32;
    if value < 1 || value > q * (q - 1) {
        return None;
    }
    let v = value - 1;
    let x = v / (q - 1);
    let r = v % (q - 1);
    let y = if r < x { r } else { r + 1 };
    Some((x as Symbol, y as Symbol))
}

/// Image of an ordered suffix pair under Φ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiWord {
    pub variant: PhiVariant,
    pub symbols: Vec<i32>,
}

impl PhiWord {
    pub fn is_zero(&self) -> bool {
        self.symbols.iter().all(|&s| s == 0)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for PhiWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// Componentwise Φ of two equal-length suffixes.
pub fn phi_word(
    variant: PhiVariant,
    q: u32,
    w1: &[Symbol],
    w2: &[Symbol],
) -> Result<PhiWord, PhiError> {
    if w1.len() != w2.len() {
        return Err(PhiError::LengthMismatch(w1.len(), w2.len()));
    }
    let symbols = w1
        .iter()
        .zip(w2)
        .map(|(&x, &y)| phi(variant, q, x, y))
        .collect::<Result<_, _>>()?;
    Ok(PhiWord { variant, symbols })
}

fn phi_symbols(variant: PhiVariant, q: u32, w1: &[Symbol], w2: &[Symbol]) -> Vec<i32> {
    w1.iter()
        .zip(w2)
        .map(|(&x, &y)| phi_unchecked(variant, q, x, y))
        .collect()
}

/// An ordered pair of distinct members `(j, k)` of prefix class `class`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuffixPair {
    pub class: usize,
    pub j: usize,
    pub k: usize,
}

impl SuffixPair {
    /// The two full codewords of the pair.
    pub fn codewords(&self, partition: &PrefixPartition) -> (Codeword, Codeword) {
        let class = &partition.classes()[self.class];
        (class.codeword(self.j), class.codeword(self.k))
    }
}

/// Two same-class pairs with the same Φ image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub first: SuffixPair,
    pub second: SuffixPair,
    pub image: PhiWord,
}

impl Collision {
    /// The four codewords `(l_h, w1), (l_h, w2), (l_m, w3), (l_m, w4)` with
    /// `Φ(w1, w2) = Φ(w3, w4)`.
    pub fn codewords(&self, partition: &PrefixPartition) -> [Codeword; 4] {
        let (c1, c2) = self.first.codewords(partition);
        let (c3, c4) = self.second.codewords(partition);
        [c1, c2, c3, c4]
    }

    /// Translates the collision into the predicate violation it implies:
    /// `{c1, c4}` and `{c2, c3}` have equal coordinate unions (separable
    /// variant), or `c1 + c4 = c2 + c3` (difference variant).
    ///
    /// Returns `None` if one of the codewords is not in `code`.
    pub fn violation(&self, partition: &PrefixPartition, code: &Code) -> Option<Violation> {
        let position = |w: &Codeword| code.words().iter().position(|c| c == w);
        let [c1, c2, c3, c4] = self.codewords(partition);
        let (i1, i2, i3, i4) = (position(&c1)?, position(&c2)?, position(&c3)?, position(&c4)?);
        Some(match self.image.variant {
            PhiVariant::Separable => Violation::Separable {
                first: vec![i1, i4],
                second: vec![i2, i3],
            },
            PhiVariant::B2Diff => Violation::B2 {
                first: (i1, i4),
                second: (i2, i3),
            },
        })
    }
}

/// Outcome of [`check_injectivity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injectivity {
    pub injective: bool,
    /// Number of ordered distinct same-class pairs examined.
    pub pairs: u64,
    /// Earliest collision in enumeration order, if any.
    pub collision: Option<Collision>,
}

/// Checks that Φ is injective on the ordered pairs of distinct suffixes taken
/// from a common class, over all classes at once.
///
/// Pairs are enumerated by class (prefix order), then `j`, then `k`; the
/// reported collision is the first repeated image in that order, paired with
/// the pair that produced the image first.
pub fn check_injectivity(partition: &PrefixPartition, variant: PhiVariant) -> Injectivity {
    let q = partition.q();
    let mut seen: HashMap<Vec<i32>, SuffixPair> = HashMap::new();
    let mut pairs = 0u64;
    for (ci, class) in partition.classes().iter().enumerate() {
        for (j, wj) in class.suffixes.iter().enumerate() {
            for (k, wk) in class.suffixes.iter().enumerate() {
                if j == k {
                    continue;
                }
                pairs += 1;
                let image = phi_symbols(variant, q, wj, wk);
                let here = SuffixPair { class: ci, j, k };
                if let Some(&first) = seen.get(&image) {
                    return Injectivity {
                        injective: false,
                        pairs,
                        collision: Some(Collision {
                            first,
                            second: here,
                            image: PhiWord {
                                variant,
                                symbols: image,
                            },
                        }),
                    };
                }
                seen.insert(image, here);
            }
        }
    }
    Injectivity {
        injective: true,
        pairs,
        collision: None,
    }
}

/// `Σ_s f_s²`, where `f_s` is the fraction of the class's suffixes with symbol
/// `s` at `coordinate`. This equals the fraction of zero symbols at that
/// coordinate of Φ over all ordered pairs from the class, equal pairs
/// included, and is never below `1/q`.
pub fn zero_frequency(suffixes: &[Vec<Symbol>], coordinate: usize) -> Result<Ratio<u64>, PhiError> {
    let first = suffixes.first().ok_or(PhiError::EmptyClass)?;
    if coordinate >= first.len() {
        return Err(PhiError::CoordinateOutOfRange {
            coordinate,
            f: first.len(),
        });
    }
    let mut counts: HashMap<Symbol, u64> = HashMap::new();
    for s in suffixes {
        *counts.entry(s[coordinate]).or_default() += 1;
    }
    let total = suffixes.len() as u64;
    let same: u64 = counts.values().map(|c| c * c).sum();
    Ok(Ratio::new(same, total * total))
}

/// [`zero_frequency`] for a [`PrefixClass`].
pub fn class_zero_frequency(class: &PrefixClass, coordinate: usize) -> Result<Ratio<u64>, PhiError> {
    zero_frequency(&class.suffixes, coordinate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::partition_by_prefix;
    use crate::predicates::violation_holds;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(PhiVariant::Separable, 4, 3, 3), Ok(0));
        let v = phi(PhiVariant::Separable, 4, 1, 2).unwrap();
        assert_eq!(decode_pair(4, v), Some((1, 2)));
        assert_eq!(phi(PhiVariant::B2Diff, 3, 0, 2), Ok(-2));
        assert!(phi(PhiVariant::B2Diff, 3, 0, 3).is_err());
    }

    #[test]
    fn separable_encoding_is_a_bijection() {
        for q in 2..=7u32 {
            let mut seen = vec![false; (q * (q - 1) + 1) as usize];
            for x in 0..q as Symbol {
                for y in 0..q as Symbol {
                    let v = phi(PhiVariant::Separable, q, x, y).unwrap();
                    if x == y {
                        assert_eq!(v, 0);
                        continue;
                    }
                    assert!(!seen[v as usize], "q={q} ({x},{y}) reused {v}");
                    seen[v as usize] = true;
                    assert_eq!(decode_pair(q, v), Some((x, y)));
                }
            }
            assert!(seen[1..].iter().all(|&b| b));
        }
        assert_eq!(phi(PhiVariant::Separable, 3, 0, 1), Ok(1));
        assert_eq!(phi(PhiVariant::Separable, 3, 1, 0), Ok(3));
        assert_eq!(decode_pair(3, 0), None);
        assert_eq!(decode_pair(3, 7), None);
    }

    #[test]
    fn phi_word_examples() {
        let w = phi_word(PhiVariant::Separable, 2, &[0, 1], &[1, 1]).unwrap();
        assert_eq!(w.symbols.len(), 2);
        assert_eq!(decode_pair(2, w.symbols[0]), Some((0, 1)));
        assert_eq!(w.symbols[1], 0);

        let d = phi_word(PhiVariant::B2Diff, 2, &[0, 1], &[1, 1]).unwrap();
        assert_eq!(d.symbols, vec![-1, 0]);

        for v in [PhiVariant::Separable, PhiVariant::B2Diff] {
            assert!(phi_word(v, 3, &[2, 0, 1], &[2, 0, 1]).unwrap().is_zero());
            assert!(!phi_word(v, 3, &[2, 0, 1], &[2, 0, 2]).unwrap().is_zero());
        }
        assert_eq!(
            phi_word(PhiVariant::B2Diff, 2, &[0], &[0, 1]),
            Err(PhiError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn injectivity_on_separable_code() {
        let code = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0]]).unwrap();
        for e in 0..=2 {
            let p = partition_by_prefix(&code, e).unwrap();
            assert!(check_injectivity(&p, PhiVariant::Separable).injective);
        }
    }

    #[test]
    fn injectivity_failure_on_full_square() {
        let code = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0], [1, 1]]).unwrap();
        let p = partition_by_prefix(&code, 0).unwrap();
        let result = check_injectivity(&p, PhiVariant::Separable);
        assert!(!result.injective);
        let c = result.collision.unwrap();
        // Pairs in order (0,1), (0,2), (0,3), (1,0), (1,2), (1,3): the first
        // repeat is Φ(01, 11) = ((0,1), 0) = Φ(00, 10).
        assert_eq!(c.first, SuffixPair { class: 0, j: 0, k: 2 });
        assert_eq!(c.second, SuffixPair { class: 0, j: 1, k: 3 });
        assert_eq!(result.pairs, 6);
        let v = c.violation(&p, &code).unwrap();
        assert!(violation_holds(&code, &v));

        let result = check_injectivity(&p, PhiVariant::B2Diff);
        let v = result.collision.unwrap().violation(&p, &code).unwrap();
        assert!(violation_holds(&code, &v));
    }

    #[test]
    fn injectivity_single_suffix() {
        let code = Code::from_rows(3, &[[2, 2]]).unwrap();
        let p = partition_by_prefix(&code, 1).unwrap();
        let r = check_injectivity(&p, PhiVariant::B2Diff);
        assert!(r.injective);
        assert_eq!(r.pairs, 0);
    }

    #[test]
    fn zero_frequency_examples() {
        assert_eq!(zero_frequency(&[vec![0], vec![1]], 0), Ok(Ratio::new(1, 2)));
        assert_eq!(
            zero_frequency(&[vec![1, 2], vec![0, 2], vec![1, 2]], 1),
            Ok(Ratio::from_integer(1))
        );
        let uniform: Vec<Vec<Symbol>> = (0..5).map(|s| vec![s]).collect();
        assert_eq!(zero_frequency(&uniform, 0), Ok(Ratio::new(1, 5)));
        assert_eq!(zero_frequency(&[], 0), Err(PhiError::EmptyClass));
        assert!(matches!(
            zero_frequency(&[vec![0]], 1),
            Err(PhiError::CoordinateOutOfRange { .. })
        ));
    }

    #[test]
    fn variant_alphabets() {
        assert_eq!(PhiVariant::Separable.alphabet_size(2), 3);
        assert_eq!(PhiVariant::Separable.alphabet_size(5), 21);
        assert_eq!(PhiVariant::B2Diff.alphabet_size(5), 9);
        assert_eq!("b2diff".parse(), Ok(PhiVariant::B2Diff));
        assert!("diff".parse::<PhiVariant>().is_err());
    }
}
