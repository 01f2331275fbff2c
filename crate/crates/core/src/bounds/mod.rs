//! Closed-form rate bounds, the constrained entropy maximum behind them, the
//! finite-length proof-chain verifier, and CSV emission of bound curves.

mod chain;
mod entropy;
mod table;

pub use chain::{choose_prefix_length, verify_proof_chain, ChainError, ChainReport, ChainStep, Relation};
pub use entropy::{
    coordinate_entropy_cap, entropy, max_constrained_entropy, max_constrained_entropy_numeric,
    maximize_entropy, EntropyDistribution, NumericMaximum, NUMERIC_ITERATION_BUDGET,
};
pub use table::{emit_bound_table, format_significant, write_csv, BoundRow, CSV_HEADER};

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("alphabet size q={0} must be at least 2")]
    InvalidAlphabet(u32),
    #[error("numeric maximizer supports q in [2, 64], got {0}")]
    UnsupportedAlphabet(u32),
    #[error("{kind} bound requires t >= {min}, got t={t}")]
    InvalidStrength {
        kind: ReferenceBound,
        min: usize,
        t: usize,
    },
    #[error("invalid q range [{0}, {1}]")]
    InvalidRange(u32, u32),
    #[error("distribution has a negative mass {0}")]
    NegativeMass(f64),
    #[error("distribution masses sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("numeric maximizer did not converge in {0} iterations")]
    NoConvergence(usize),
}

fn check_alphabet(q: u32) -> Result<(), BoundsError> {
    if q < 2 {
        Err(BoundsError::InvalidAlphabet(q))
    } else {
        Ok(())
    }
}

/// Asymptotic rate bound `(2q - 1) / (3q - 1)` for q-ary 2̄-separable codes.
pub fn rate_bound_sep2(q: u32) -> Result<Ratio<u64>, BoundsError> {
    check_alphabet(q)?;
    let q = q as u64;
    Ok(Ratio::new(2 * q - 1, 3 * q - 1))
}

/// Asymptotic rate bound `(q + (q-1) log_q 2) / (2q + (q-1) log_q 2)` for
/// q-ary B₂ codes.
pub fn rate_bound_b2(q: u32) -> Result<f64, BoundsError> {
    check_alphabet(q)?;
    let qf = q as f64;
    let log_q_2 = 1.0 / qf.log2();
    let extra = (qf - 1.0) * log_q_2;
    Ok((qf + extra) / (2.0 * qf + extra))
}

/// Earlier rate bounds for general strength `t`, kept for comparison
/// curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceBound {
    /// `1/t` for t-frameproof codes.
    Frameproof,
    /// `1/(t-1)` for t̄-separable codes, via the frameproof containment.
    SeparableGeneral,
    /// `2/t` under the weaker `k = m = t` separability notion.
    Dyachkov,
}

impl fmt::Display for ReferenceBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Frameproof => "frameproof",
            Self::SeparableGeneral => "separable_general",
            Self::Dyachkov => "dyachkov",
        })
    }
}

impl FromStr for ReferenceBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "frameproof" => Ok(Self::Frameproof),
            "separable_general" => Ok(Self::SeparableGeneral),
            "dyachkov" => Ok(Self::Dyachkov),
            _ => Err(format!("unknown reference bound `{s}`")),
        }
    }
}

pub fn rate_bound_reference(kind: ReferenceBound, t: usize) -> Result<Ratio<u64>, BoundsError> {
    let min = match kind {
        ReferenceBound::Frameproof => 1,
        _ => 2,
    };
    if t < min {
        return Err(BoundsError::InvalidStrength { kind, min, t });
    }
    let t = t as u64;
    Ok(match kind {
        ReferenceBound::Frameproof => Ratio::new(1, t),
        ReferenceBound::SeparableGeneral => Ratio::new(1, t - 1),
        ReferenceBound::Dyachkov => Ratio::new(2, t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sep2_values() {
        assert_eq!(rate_bound_sep2(2), Ok(Ratio::new(3, 5)));
        assert_eq!(rate_bound_sep2(13), Ok(Ratio::new(25, 38)));
        assert_eq!(rate_bound_sep2(1), Err(BoundsError::InvalidAlphabet(1)));
        let big = rate_bound_sep2(1_000_000).unwrap();
        let v = *big.numer() as f64 / *big.denom() as f64;
        assert!(v < 2.0 / 3.0 && 2.0 / 3.0 - v < 1e-6);
    }

    #[test]
    fn b2_values() {
        assert_eq!(rate_bound_b2(2).unwrap(), 3.0 / 5.0);
        assert!((rate_bound_b2(4).unwrap() - 5.5 / 9.5).abs() < 1e-15);
        let far = rate_bound_b2(1 << 30).unwrap();
        assert!(far > 0.5 && far - 0.5 < 0.02);
        assert!(rate_bound_b2(0).is_err());
    }

    #[test]
    fn reference_values() {
        use ReferenceBound::*;
        assert_eq!(rate_bound_reference(Frameproof, 2), Ok(Ratio::new(1, 2)));
        assert_eq!(rate_bound_reference(SeparableGeneral, 2), Ok(Ratio::from_integer(1)));
        assert_eq!(rate_bound_reference(Dyachkov, 2), Ok(Ratio::from_integer(1)));
        assert_eq!(rate_bound_reference(Dyachkov, 5), Ok(Ratio::new(2, 5)));
        assert!(rate_bound_reference(Frameproof, 0).is_err());
        assert!(rate_bound_reference(SeparableGeneral, 1).is_err());
    }

    #[test]
    fn ordering_between_theorems() {
        assert_eq!(
            rate_bound_b2(2).unwrap(),
            *rate_bound_sep2(2).unwrap().numer() as f64 / 5.0
        );
        for q in 3..200 {
            let sep = rate_bound_sep2(q).unwrap();
            let sep = *sep.numer() as f64 / *sep.denom() as f64;
            let b2 = rate_bound_b2(q).unwrap();
            assert!(b2 < sep, "q={q}");
            assert!(sep < 2.0 / 3.0 && b2 > 0.5);
        }
    }
}
