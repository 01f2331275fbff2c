//! Evaluates every finite-length step of the entropy argument on a concrete
//! code and prefix length.
//!
//! With `(X, Y)` uniform over ordered pairs of suffixes from a common prefix
//! class and `Z = Φ(X, Y)`, the steps are:
//!
//! | step                   | checked relation                                   |
//! |------------------------|----------------------------------------------------|
//! | `cauchy_schwarz`       | `M² / q^e <= Σ|P_i|²`                               |
//! | `pair_entropy`         | `H(X,Y) = log₂ Σ|P_i|²`                             |
//! | `injectivity`          | Φ is one-to-one on distinct same-class pairs        |
//! | `pr_zero_identity`     | `Pr(Z = 0) = M / Σ|P_i|²`                           |
//! | `pr_zero_bound`        | `Pr(Z = 0) <= q^e / M`                              |
//! | `conditional_entropy`  | `H(X,Y | Z = 0) = log₂ M`                           |
//! | `zero_frequency`       | zero mass of each coordinate, in each class, `>= 1/q` |
//! | `coordinate_entropy`   | `Σ H(Z_i) <= f · cap`                               |
//! | `combined`             | `log₂ Σ|P_i|² <= f · cap + Pr(Z = 0) · log₂ M`      |
//!
//! `cap` is the per-coordinate maximum entropy from
//! [`coordinate_entropy_cap`](super::coordinate_entropy_cap). The empirical
//! `H(Z)` and the prefix term `(q^e / M) log₂ M` are reported but not
//! judged.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_rational::Ratio;
use thiserror::Error;

use super::entropy::{coordinate_entropy_cap, entropy, EntropyDistribution};
use crate::code::{partition_by_prefix, Code, CodeError};
use crate::phimap::{check_injectivity, class_zero_frequency, PhiVariant};
use crate::predicates::{property_violation, CodeProperty, PredicateError, SeparableCheck, Violation};

/// Absolute slack for floating-point comparisons.
const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error("code is not {property}: {description}")]
    NotInFamily {
        property: CodeProperty,
        violation: Violation,
        description: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

impl Relation {
    /// Whether `lhs relation rhs` holds up to `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Self::Le => lhs <= rhs + tol,
            Self::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Le => "<=",
            Self::Eq => "==",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub name: &'static str,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub pass: bool,
}

impl ChainStep {
    fn float(name: &'static str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self {
            name,
            lhs,
            relation,
            rhs,
            pass: relation.holds(lhs, rhs, FLOAT_TOL),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub variant: PhiVariant,
    pub q: u32,
    pub n: usize,
    /// Code size `M`.
    pub m: usize,
    pub e: usize,
    /// `q^e`, or `None` if it does not fit in 128 bits.
    pub r: Option<u128>,
    pub f: usize,
    pub sum_sq: u64,
    /// `H(X, Y)` in bits, computed class by class.
    pub h_xy: f64,
    /// Per-coordinate entropy cap in bits.
    pub coordinate_cap: f64,
    /// `f · coordinate_cap`.
    pub h_z_cap: f64,
    pub pr_zero: Ratio<u64>,
    /// `H(X, Y | Z = 0)` in bits.
    pub h_cond: f64,
    pub injective: bool,
    /// Smallest per-class, per-coordinate zero frequency (1 when `f = 0`).
    pub min_zero_frequency: Ratio<u64>,
    /// `Σ H(Z_i)` from the per-coordinate histograms of `Z`.
    pub sum_h_zi: f64,
    /// Empirical `H(Z)`; informational.
    pub h_z: f64,
    /// `(q^e / M) log₂ M`; informational.
    pub prefix_term: f64,
    pub steps: Vec<ChainStep>,
}

fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl ChainReport {
    /// Conjunction of every step.
    pub fn pass(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }

    pub fn step(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Aligned, human-readable table of the steps.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "proof chain: variant={} q={} n={} M={} e={} f={}",
            self.variant, self.q, self.n, self.m, self.e, self.f
        );
        out.push_str("step                                  lhs     rhs                result\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{:<22} {:>18.10} {:>3} {:<18.10} {}",
                s.name,
                s.lhs,
                s.relation,
                s.rhs,
                if s.pass { "ok" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "informational: H(Z)={:.10} prefix_term={:.10}",
            self.h_z, self.prefix_term
        );
        out
    }

    /// One `key=value` per line.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let r = self.r.map_or_else(|| "overflow".to_string(), |r| r.to_string());
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("variant", self.variant.to_string());
        kv("q", self.q.to_string());
        kv("n", self.n.to_string());
        kv("m", self.m.to_string());
        kv("e", self.e.to_string());
        kv("r", r);
        kv("f", self.f.to_string());
        kv("sum_sq", self.sum_sq.to_string());
        kv("h_xy", format!("{:.12}", self.h_xy));
        kv("h_z_cap", format!("{:.12}", self.h_z_cap));
        kv("pr_zero", self.pr_zero.to_string());
        kv("h_cond", format!("{:.12}", self.h_cond));
        kv("injective", self.injective.to_string());
        kv("min_zero_frequency", self.min_zero_frequency.to_string());
        kv("sum_h_zi", format!("{:.12}", self.sum_h_zi));
        kv("h_z", format!("{:.12}", self.h_z));
        kv("prefix_term", format!("{:.12}", self.prefix_term));
        for s in &self.steps {
            kv(&format!("step.{}", s.name), if s.pass { "pass" } else { "fail" }.to_string());
        }
        kv("pass", self.pass().to_string());
        out
    }
}

/// Prefix length `⌊log_q(2M) - log_q log₂ M⌋`, i.e. the largest `e` with
/// `q^e · log₂ M <= 2M`. Returns 0 for `M <= 1` and when the expression is
/// negative. Callers cap the result at the word length.
pub fn choose_prefix_length(m: u64, q: u32) -> usize {
    if m <= 1 || q < 2 {
        return 0;
    }
    let log_m = (m as f64).log2();
    let raw = ((2.0 * m as f64).log2() - log_m.log2()) / (q as f64).log2();
    if raw < 0.0 {
        return 0;
    }
    // Settle values that land within rounding error of an integer.
    let fits = |e: i32| (q as f64).powi(e) * log_m <= 2.0 * m as f64 * (1.0 + 1e-12);
    let mut e = raw.floor() as i32;
    while e > 0 && !fits(e) {
        e -= 1;
    }
    while fits(e + 1) {
        e += 1;
    }
    e as usize
}

/// Evaluates the proof chain on `code` split at prefix length `e`.
///
/// The code must satisfy the property matching `variant` (2̄-separable for
/// [`PhiVariant::Separable`], B₂ for [`PhiVariant::B2Diff`]).
pub fn verify_proof_chain(code: &Code, e: usize, variant: PhiVariant) -> Result<ChainReport, ChainError> {
    let property = variant.property();
    if let Some(violation) = property_violation(code, property, SeparableCheck::default())? {
        return Err(ChainError::NotInFamily {
            property,
            description: violation.describe(code),
            violation,
        });
    }
    let partition = partition_by_prefix(code, e)?;
    let q = code.q();
    let m = code.len() as u64;
    let f = partition.f();
    let sum_sq = partition.sum_of_squares();
    let r = partition.class_count();
    let mut steps = Vec::new();

    // Cauchy–Schwarz, exactly: M² <= q^e Σ|P_i|².
    let m_sq = (m as u128) * (m as u128);
    let cs_exact = r.and_then(|r| r.checked_mul(sum_sq as u128)).is_none_or(|rhs| m_sq <= rhs);
    let r_f64 = (q as f64).powi(e as i32);
    steps.push(ChainStep {
        name: "cauchy_schwarz",
        lhs: m_sq as f64 / r_f64,
        relation: Relation::Le,
        rhs: sum_sq as f64,
        pass: cs_exact,
    });

    // H(X,Y) = H(class) + Σ Pr(class) · H(pair | class), each class uniform
    // over |P_i|² pairs.
    let class_sizes: Vec<u64> = partition.classes().iter().map(|c| (c.len() as u64).pow(2)).collect();
    let class_dist = EntropyDistribution::from_counts(class_sizes.iter().copied()).expect("nonempty code");
    let within: f64 = class_sizes
        .iter()
        .map(|&s| s as f64 / sum_sq as f64 * (s as f64).log2())
        .sum();
    let h_xy = entropy(&class_dist) + within;
    steps.push(ChainStep::float("pair_entropy", h_xy, Relation::Eq, (sum_sq as f64).log2()));

    // Histogram Z over all ordered same-class pairs, equal pairs included.
    let mut images: HashMap<Vec<i32>, u64> = HashMap::new();
    let mut columns: Vec<HashMap<i32, u64>> = vec![HashMap::new(); f];
    for class in partition.classes() {
        for wj in &class.suffixes {
            for wk in &class.suffixes {
                let image = crate::phimap::phi_word(variant, q, wj, wk)
                    .expect("suffixes share the code's alphabet and length")
                    .symbols;
                for (col, &z) in columns.iter_mut().zip(&image) {
                    *col.entry(z).or_default() += 1;
                }
                *images.entry(image).or_default() += 1;
            }
        }
    }
    let zero_count = images.get(&vec![0; f]).copied().unwrap_or(0);
    let distinct_pairs = sum_sq - zero_count;
    let distinct_images = images.len() as u64 - u64::from(zero_count > 0);

    let injectivity = check_injectivity(&partition, variant);
    steps.push(ChainStep {
        name: "injectivity",
        lhs: distinct_images as f64,
        relation: Relation::Eq,
        rhs: distinct_pairs as f64,
        pass: injectivity.injective && distinct_images == distinct_pairs,
    });

    let pr_zero = Ratio::new(zero_count, sum_sq);
    steps.push(ChainStep {
        name: "pr_zero_identity",
        lhs: ratio_f64(&pr_zero),
        relation: Relation::Eq,
        rhs: m as f64 / sum_sq as f64,
        pass: pr_zero == Ratio::new(m, sum_sq),
    });
    let pr_bound_exact = r
        .and_then(|r| r.checked_mul(sum_sq as u128))
        .is_none_or(|rhs| (zero_count as u128) * (m as u128) <= rhs);
    steps.push(ChainStep {
        name: "pr_zero_bound",
        lhs: ratio_f64(&pr_zero),
        relation: Relation::Le,
        rhs: r_f64 / m as f64,
        pass: pr_bound_exact,
    });

    // Conditioned on Z = 0 the pair is (w, w), one per codeword.
    let zero_fiber = EntropyDistribution::from_counts(std::iter::repeat_n(1u64, zero_count as usize))
        .expect("every codeword pairs with itself");
    let h_cond = entropy(&zero_fiber);
    steps.push(ChainStep::float("conditional_entropy", h_cond, Relation::Eq, (m as f64).log2()));

    let mut min_zero_frequency = Ratio::from_integer(1u64);
    for class in partition.classes() {
        for coordinate in 0..f {
            let z = class_zero_frequency(class, coordinate).expect("nonempty class, coordinate < f");
            min_zero_frequency = min_zero_frequency.min(z);
        }
    }
    let inv_q = Ratio::new(1u64, q as u64);
    steps.push(ChainStep {
        name: "zero_frequency",
        lhs: 1.0 / q as f64,
        relation: Relation::Le,
        rhs: ratio_f64(&min_zero_frequency),
        pass: inv_q <= min_zero_frequency,
    });

    let coordinate_cap = coordinate_entropy_cap(variant, q);
    let h_z_cap = f as f64 * coordinate_cap;
    let sum_h_zi: f64 = columns
        .iter()
        .map(|col| entropy(&EntropyDistribution::from_counts(col.values().copied()).expect("nonempty column")))
        .sum();
    steps.push(ChainStep::float("coordinate_entropy", sum_h_zi, Relation::Le, h_z_cap));

    let h_cond_weighted = ratio_f64(&pr_zero) * (m as f64).log2();
    steps.push(ChainStep::float(
        "combined",
        (sum_sq as f64).log2(),
        Relation::Le,
        h_z_cap + h_cond_weighted,
    ));

    let h_z = entropy(&EntropyDistribution::from_counts(images.values().copied()).expect("nonempty"));
    let prefix_term = if m > 1 { r_f64 / m as f64 * (m as f64).log2() } else { 0.0 };

    Ok(ChainReport {
        variant,
        q,
        n: code.n(),
        m: code.len(),
        e,
        r,
        f,
        sum_sq,
        h_xy,
        coordinate_cap,
        h_z_cap,
        pr_zero,
        h_cond,
        injective: injectivity.injective,
        min_zero_frequency,
        sum_h_zi,
        h_z,
        prefix_term,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_length_examples() {
        assert_eq!(choose_prefix_length(1000, 2), 7);
        assert_eq!(choose_prefix_length(2, 2), 2);
        assert_eq!(choose_prefix_length(1, 5), 0);
        // q^e log₂M <= 2M with e maximal.
        for m in 2..2000u64 {
            for q in 2..9u32 {
                let e = choose_prefix_length(m, q) as i32;
                let lm = (m as f64).log2();
                assert!((q as f64).powi(e) * lm <= 2.0 * m as f64 + 1e-9);
                assert!((q as f64).powi(e + 1) * lm > 2.0 * m as f64);
            }
        }
    }

    #[test]
    fn three_word_chain() {
        let code = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0]]).unwrap();
        let report = verify_proof_chain(&code, 1, PhiVariant::Separable).unwrap();
        assert_eq!(report.m, 3);
        assert_eq!(report.r, Some(2));
        assert_eq!(report.sum_sq, 5);
        assert!((report.h_xy - 5f64.log2()).abs() < 1e-12);
        assert_eq!(report.pr_zero, Ratio::new(3, 5));
        assert!(report.pass(), "{}", report.to_text());
        assert_eq!(report.steps.len(), 9);
    }

    #[test]
    fn single_word_chain() {
        let code = Code::from_rows(3, &[[1, 2, 0]]).unwrap();
        for variant in [PhiVariant::Separable, PhiVariant::B2Diff] {
            for e in 0..=3 {
                let report = verify_proof_chain(&code, e, variant).unwrap();
                assert_eq!(report.sum_sq, 1);
                assert_eq!(report.h_xy, 0.0);
                assert_eq!(report.pr_zero, Ratio::from_integer(1));
                assert_eq!(report.h_cond, 0.0);
                assert!(report.pass());
            }
        }
    }

    #[test]
    fn rejects_codes_outside_the_family() {
        let four = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0], [1, 1]]).unwrap();
        let err = verify_proof_chain(&four, 0, PhiVariant::Separable).unwrap_err();
        assert!(matches!(err, ChainError::NotInFamily { property: CodeProperty::SeparableBar(2), .. }));
        let err = verify_proof_chain(&four, 0, PhiVariant::B2Diff).unwrap_err();
        assert!(matches!(err, ChainError::NotInFamily { property: CodeProperty::B2, .. }));
        let three = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0]]).unwrap();
        assert!(matches!(
            verify_proof_chain(&three, 3, PhiVariant::Separable),
            Err(ChainError::Code(CodeError::PrefixOutOfRange { .. }))
        ));
    }

    #[test]
    fn report_renders() {
        let code = Code::from_rows(2, &[[0, 0], [0, 1], [1, 0]]).unwrap();
        let report = verify_proof_chain(&code, 1, PhiVariant::Separable).unwrap();
        let kv = report.to_key_values();
        assert!(kv.contains("sum_sq=5\n"));
        assert!(kv.contains("pr_zero=3/5\n"));
        assert!(kv.ends_with("pass=true\n"));
        assert!(report.to_text().contains("cauchy_schwarz"));
    }
}
