use num_rational::Ratio;

use super::BoundsError;
use crate::phimap::PhiVariant;

/// Iteration cap for [`maximize_entropy`].
pub const NUMERIC_ITERATION_BUDGET: usize = 100_000;

const NORMALIZATION_TOL: f64 = 1e-12;

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyDistribution {
    masses: Vec<f64>,
}

impl EntropyDistribution {
    /// Masses must be non-negative and sum to 1 within `1e-12`.
    pub fn new(masses: Vec<f64>) -> Result<Self, BoundsError> {
        if masses.is_empty() {
            return Err(BoundsError::EmptyDistribution);
        }
        if let Some(&m) = masses.iter().find(|m| m.is_nan() || **m < 0.0) {
            return Err(BoundsError::NegativeMass(m));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(BoundsError::NotNormalized(total));
        }
        Ok(Self { masses })
    }

    /// Exact-mode constructor: the rationals must sum to exactly 1.
    pub fn from_ratios(masses: &[Ratio<u64>]) -> Result<Self, BoundsError> {
        if masses.is_empty() {
            return Err(BoundsError::EmptyDistribution);
        }
        let total = masses
            .iter()
            .fold(Ratio::from_integer(0u64), |acc, m| acc + m);
        let as_f64 = |r: &Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
        if total != Ratio::from_integer(1) {
            return Err(BoundsError::NotNormalized(as_f64(&total)));
        }
        Ok(Self {
            masses: masses.iter().map(as_f64).collect(),
        })
    }

    /// Normalizes non-negative weights (e.g. counts).
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Result<Self, BoundsError> {
        let counts: Vec<u64> = counts.into_iter().collect();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(BoundsError::EmptyDistribution);
        }
        Ok(Self {
            masses: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self, BoundsError> {
        if size == 0 {
            return Err(BoundsError::EmptyDistribution);
        }
        Ok(Self {
            masses: vec![1.0 / size as f64; size],
        })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(dist: &EntropyDistribution) -> f64 {
    -dist
        .masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Closed-form maximum of `H(α)` over distributions on `size` symbols with
/// `α₀ >= floor`: the floor is met with equality and the rest is spread
/// evenly, unless the uniform distribution already satisfies it.
fn capped_maximum(size: u64, floor: f64) -> (f64, Vec<f64>) {
    let k = size as f64;
    if size == 1 || 1.0 / k >= floor {
        return (k.log2(), vec![1.0 / k; size as usize]);
    }
    let rest = (1.0 - floor) / (k - 1.0);
    let bits = -floor * floor.log2() - (1.0 - floor) * rest.log2();
    let mut masses = vec![rest; size as usize];
    masses[0] = floor;
    (bits, masses)
}

/// Maximum entropy of one coordinate of Φ: alphabet `D` of the variant with
/// the zero symbol carrying at least `1/q` of the mass.
///
/// For the separable variant this is `log₂q · (2q - 1)/q`; for the
/// difference variant `log₂q + (q - 1)/q`.
pub fn coordinate_entropy_cap(variant: PhiVariant, q: u32) -> f64 {
    capped_maximum(variant.alphabet_size(q), 1.0 / q as f64).0
}

/// Maximum of `H(α₀, …, α_{q²-q})` subject to `α₀ >= 1/q`, with its
/// maximizer `α₀ = 1/q`, `αᵢ = 1/q²`.
pub fn max_constrained_entropy(q: u32) -> Result<(f64, EntropyDistribution), BoundsError> {
    super::check_alphabet(q)?;
    let qf = q as f64;
    let bits = qf.log2() * (2.0 * qf - 1.0) / qf;
    let size = (q as usize) * (q as usize - 1) + 1;
    let mut masses = vec![1.0 / (qf * qf); size];
    masses[0] = 1.0 / qf;
    Ok((bits, EntropyDistribution { masses }))
}

/// Result of [`maximize_entropy`].
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMaximum {
    pub bits: f64,
    pub distribution: EntropyDistribution,
    pub iterations: usize,
}

/// Information projection onto `{α : α₀ >= floor}`: raise `α₀` to the floor
/// and scale the other masses down uniformly.
fn project_floor(p: &mut [f64], floor: f64) {
    if p[0] >= floor {
        return;
    }
    let scale = (1.0 - floor) / (1.0 - p[0]);
    p[0] = floor;
    for x in &mut p[1..] {
        *x *= scale;
    }
}

/// Maximizes entropy over the simplex of `init.len()` symbols subject to
/// `α₀ >= floor`, by exponentiated-gradient ascent with step 1/2 followed by
/// the information projection onto the constraint set after each step.
///
/// Stops once no log-mass moves by more than `tol`.
pub fn maximize_entropy(
    init: &EntropyDistribution,
    floor: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<NumericMaximum, BoundsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(BoundsError::InvalidTolerance(tol));
    }
    let mut p = init.masses.clone();
    // Exponentiated gradient needs full support.
    let tiny = f64::MIN_POSITIVE.sqrt();
    for x in &mut p {
        *x = x.max(tiny);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    project_floor(&mut p, floor);

    for iteration in 1..=max_iterations {
        // ∂H/∂αᵢ = -log αᵢ - const, so a step of size η multiplies αᵢ by
        // αᵢ^{-η} before renormalizing.
        let mut next: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
        let z: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= z);
        project_floor(&mut next, floor);

        let moved = p
            .iter()
            .zip(&next)
            .map(|(a, b)| (a.ln() - b.ln()).abs())
            .fold(0.0, f64::max);
        p = next;
        if moved < tol {
            let distribution = EntropyDistribution { masses: p };
            return Ok(NumericMaximum {
                bits: entropy(&distribution),
                distribution,
                iterations: iteration,
            });
        }
    }
    Err(BoundsError::NoConvergence(max_iterations))
}

/// Numeric counterpart of [`max_constrained_entropy`], started from the
/// uniform distribution on `q² - q + 1` symbols.
pub fn max_constrained_entropy_numeric(q: u32, tol: f64) -> Result<f64, BoundsError> {
    if !(2..=64).contains(&q) {
        return Err(BoundsError::UnsupportedAlphabet(q));
    }
    let size = (q as usize) * (q as usize - 1) + 1;
    let init = EntropyDistribution::uniform(size)?;
    // Log-mass movement below tol·1e-3 keeps the entropy error well under
    // tol.
    let result = maximize_entropy(&init, 1.0 / q as f64, tol * 1e-3, NUMERIC_ITERATION_BUDGET)?;
    Ok(result.bits)
}
