//! Code data model: parameters, codewords, validated codes, the text file
//! format, and the split of a code into prefix classes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Read;

use thiserror::Error;

/// Largest supported alphabet size.
pub const MAX_Q: u32 = 1 << 16;

/// A single code symbol in `[0, q-1]`.
pub type Symbol = u16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("alphabet size q={0} must be in [2, {MAX_Q}]")]
    InvalidAlphabet(u32),
    #[error("word length n must be at least 1")]
    InvalidLength,
    #[error("line {line}: symbol {symbol} out of range for q={q}")]
    SymbolOutOfRange { line: usize, symbol: u64, q: u32 },
    #[error("line {line}: expected {expected} symbols, found {found}")]
    RaggedLine {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate codeword")]
    DuplicateCodeword { line: usize },
    #[error("empty input: no header line")]
    MissingHeader,
    #[error("empty code: no codewords")]
    EmptyCode,
    #[error("line {line}: malformed header, expected `q=<int> n=<int>`")]
    BadHeader { line: usize },
    #[error("line {line}: `{token}` is not a decimal symbol")]
    BadSymbol { line: usize, token: String },
    #[error("prefix length e={e} exceeds word length n={n}")]
    PrefixOutOfRange { e: usize, n: usize },
    #[error("io error: {0}")]
    Io(String),
}

/// Alphabet size and word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    q: u32,
    n: usize,
}

impl CodeParams {
    pub fn new(q: u32, n: usize) -> Result<Self, CodeError> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(CodeError::InvalidAlphabet(q));
        }
        if n == 0 {
            return Err(CodeError::InvalidLength);
        }
        Ok(Self { q, n })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`, or `None` if it does not fit in a `u64`.
    pub fn space_size(&self) -> Option<u64> {
        (self.q as u64).checked_pow(self.n as u32)
    }
}

/// A fixed-length word over `[0, q-1]`.
///
/// Ordering is lexicographic over the symbols, which is the enumeration order
/// used by the search.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(Vec<Symbol>);

impl Codeword {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `index`-th word of `[0, q-1]^n` in lexicographic order.
    pub fn from_index(params: CodeParams, mut index: u64) -> Self {
        let q = params.q as u64;
        let mut symbols = vec![0; params.n];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % q) as Symbol;
            index /= q;
        }
        Self(symbols)
    }

    fn check(&self, params: CodeParams, line: usize) -> Result<(), CodeError> {
        if self.0.len() != params.n {
            return Err(CodeError::RaggedLine {
                line,
                expected: params.n,
                found: self.0.len(),
            });
        }
        if let Some(&s) = self.0.iter().find(|&&s| s as u32 >= params.q) {
            return Err(CodeError::SymbolOutOfRange {
                line,
                symbol: s as u64,
                q: params.q,
            });
        }
        Ok(())
    }
}

impl From<Vec<Symbol>> for Codeword {
    fn from(symbols: Vec<Symbol>) -> Self {
        Self(symbols)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A non-empty set of distinct codewords of equal length, kept in insertion
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    params: CodeParams,
    words: Vec<Codeword>,
}

impl Code {
    /// Validates length, symbol range, distinctness, and non-emptiness.
    pub fn new(params: CodeParams, words: Vec<Codeword>) -> Result<Self, CodeError> {
        if words.is_empty() {
            return Err(CodeError::EmptyCode);
        }
        let mut seen = HashSet::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            w.check(params, i + 1)?;
            if !seen.insert(w) {
                return Err(CodeError::DuplicateCodeword { line: i + 1 });
            }
        }
        Ok(Self { params, words })
    }

    /// Convenience constructor from rows of symbols.
    pub fn from_rows<R: AsRef<[Symbol]>>(q: u32, rows: &[R]) -> Result<Self, CodeError> {
        let n = rows.first().map(|r| r.as_ref().len()).ok_or(CodeError::EmptyCode)?;
        let params = CodeParams::new(q, n)?;
        let words = rows.iter().map(|r| Codeword::new(r.as_ref().to_vec())).collect();
        Self::new(params, words)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    /// Number of codewords, `M`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Base-`q` rate `log_q M / n`.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).ln() / (self.q() as f64).ln() / self.n() as f64
    }

    /// The subcode made of the words at `indices`, in that order.
    pub fn subcode(&self, indices: &[usize]) -> Result<Self, CodeError> {
        let words = indices.iter().map(|&i| self.words[i].clone()).collect();
        Self::new(self.params, words)
    }

    /// Serializes to the text file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("q={} n={}\n", self.q(), self.n());
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<CodeParams, CodeError> {
    let bad = || CodeError::BadHeader { line: line_no };
    let mut q = None;
    let mut n = None;
    for token in line.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(bad)?;
        let value: u64 = value.parse().map_err(|_| bad())?;
        match key {
            "q" if q.is_none() => q = Some(value),
            "n" if n.is_none() => n = Some(value),
            _ => return Err(bad()),
        }
    }
    let (q, n) = q.zip(n).ok_or_else(bad)?;
    let q = u32::try_from(q).map_err(|_| CodeError::InvalidAlphabet(u32::MAX))?;
    let n = usize::try_from(n).map_err(|_| bad())?;
    CodeParams::new(q, n)
}

/// Parses the text format: a `q=<int> n=<int>` header, then one codeword per
/// non-empty line. Lines starting with `#` are comments.
pub fn parse_code(text: &str) -> Result<Code, CodeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_no, header) = lines.next().ok_or(CodeError::MissingHeader)?;
    let params = parse_header(header, header_no)?;

    let mut words = Vec::new();
    let mut seen = HashSet::new();
    for (line_no, line) in lines {
        let mut symbols = Vec::with_capacity(params.n);
        for token in line.split_whitespace() {
            let value: u64 = token.parse().map_err(|_| CodeError::BadSymbol {
                line: line_no,
                token: token.to_string(),
            })?;
            if value >= params.q as u64 {
                return Err(CodeError::SymbolOutOfRange {
                    line: line_no,
                    symbol: value,
                    q: params.q,
                });
            }
            symbols.push(value as Symbol);
        }
        let word = Codeword::new(symbols);
        word.check(params, line_no)?;
        if !seen.insert(word.clone()) {
            return Err(CodeError::DuplicateCodeword { line: line_no });
        }
        words.push(word);
    }
    if words.is_empty() {
        return Err(CodeError::EmptyCode);
    }
    Ok(Code { params, words })
}

/// Reads and parses a code from any byte stream.
pub fn read_code<R: Read>(mut reader: R) -> Result<Code, CodeError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| CodeError::Io(e.to_string()))?;
    parse_code(&text)
}

/// One prefix class: the shared prefix and the suffixes of its members, in
/// order of appearance in the source code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixClass {
    pub prefix: Vec<Symbol>,
    pub suffixes: Vec<Vec<Symbol>>,
}

impl PrefixClass {
    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    /// Rebuilds the full codeword of the `i`-th member.
    pub fn codeword(&self, i: usize) -> Codeword {
        let mut symbols = self.prefix.clone();
        symbols.extend_from_slice(&self.suffixes[i]);
        Codeword::new(symbols)
    }
}

/// A code split by its first `e` symbols. Only nonempty classes are stored,
/// sorted by prefix; the `q^e - classes().len()` empty ones are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixPartition {
    params: CodeParams,
    e: usize,
    classes: Vec<PrefixClass>,
}

impl PrefixPartition {
    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    /// Prefix length.
    pub fn e(&self) -> usize {
        self.e
    }

    /// Suffix length `n - e`.
    pub fn f(&self) -> usize {
        self.params.n - self.e
    }

    pub fn classes(&self) -> &[PrefixClass] {
        &self.classes
    }

    /// Total number of codewords across classes.
    pub fn total(&self) -> usize {
        self.classes.iter().map(PrefixClass::len).sum()
    }

    /// Number of prefix classes including empty ones, `q^e`, or `None` on
    /// overflow.
    pub fn class_count(&self) -> Option<u128> {
        (self.params.q as u128).checked_pow(self.e as u32)
    }

    /// `Σ |P_i|²`, the number of ordered same-class pairs (equal pairs
    /// included).
    pub fn sum_of_squares(&self) -> u64 {
        self.classes.iter().map(|c| (c.len() as u64).pow(2)).sum()
    }
}

/// Splits `code` into classes keyed by the first `e` symbols.
pub fn partition_by_prefix(code: &Code, e: usize) -> Result<PrefixPartition, CodeError> {
    if e > code.n() {
        return Err(CodeError::PrefixOutOfRange { e, n: code.n() });
    }
    let mut map: BTreeMap<&[Symbol], Vec<Vec<Symbol>>> = BTreeMap::new();
    for w in code.words() {
        let (prefix, suffix) = w.symbols().split_at(e);
        map.entry(prefix).or_default().push(suffix.to_vec());
    }
    let classes = map
        .into_iter()
        .map(|(prefix, suffixes)| PrefixClass {
            prefix: prefix.to_vec(),
            suffixes,
        })
        .collect();
    Ok(PrefixPartition {
        params: code.params(),
        e,
        classes,
    })
}

/// `Σ |P_i|²` over the classes of `partition`.
pub fn sum_of_squares(partition: &PrefixPartition) -> u64 {
    partition.sum_of_squares()
}
