//! Weighted mixed norms of the sampled time-frequency transform.
//!
//! Position-first nesting gives the modulation norm
//! (∫(∫|V_gf(x,ω)|^p dx)^{q/p} ⟨ω⟩^{sq} dω)^{1/q}; frequency-first nesting
//! gives the Wiener amalgam norm (∫(∫|V_gf(z,ζ)|^p ⟨ζ⟩^{sp} dζ)^{q/p}
//! ⟨z⟩^{γq} dz)^{1/q}. Integrals are Riemann sums with cells h^d and (1/L)^d;
//! ∞-exponents are (weighted) grid maxima, which under-approximate the
//! essential sup by at most the grid modulus of continuity.
//!
//! Both weights use true (non-periodized) magnitudes on symmetric windows:
//! frequencies on [−N/(2L), N/(2L))^d, and the outer position weight on the
//! analysis-window offset wrapped to [−L/2, L/2)^d.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{PlateError, Result};
use crate::gabor::StftMatrix;
use crate::numerics::pairwise_sum;

/// Lebesgue exponent in [1, ∞], with ∞ encoded explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Exponent> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(PlateError::InvalidParameter(format!(
                "exponent must lie in [1, inf], got {p}"
            )))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// 1/p, with 1/∞ = 0.
    pub fn inv(&self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// Conjugate exponent: 1/p + 1/p′ = 1.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if *p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = PlateError;

    fn from_str(s: &str) -> Result<Exponent> {
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = s.parse().map_err(|_| {
            PlateError::InvalidParameter(format!("cannot parse exponent '{s}' (use a number or 'inf')"))
        })?;
        Exponent::finite(p)
    }
}

/// Which variable the inner integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    /// Inner integral over position: modulation norm M^{p,q}_s.
    PositionFirst,
    /// Inner integral over frequency: Wiener amalgam norm W(FL^p_s, L^q_γ).
    FrequencyFirst,
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::PositionFirst => write!(f, "position-first (modulation)"),
            NormOrder::FrequencyFirst => write!(f, "frequency-first (Wiener amalgam)"),
        }
    }
}

/// Exponents and weights of one mixed norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub s: f64,
    pub gamma: f64,
    pub order: NormOrder,
}

impl MixedNormSpec {
    pub fn new(p: Exponent, q: Exponent, s: f64, gamma: f64, order: NormOrder) -> Result<Self> {
        if order == NormOrder::PositionFirst && gamma != 0.0 {
            return Err(PlateError::InvalidParameter(format!(
                "modulation norms carry no position weight; gamma must be 0, got {gamma}"
            )));
        }
        if !s.is_finite() || !gamma.is_finite() {
            return Err(PlateError::InvalidParameter(format!(
                "weight exponents must be finite, got s={s}, gamma={gamma}"
            )));
        }
        Ok(MixedNormSpec { p, q, s, gamma, order })
    }

    /// M^{p,q}_s.
    pub fn modulation(p: Exponent, q: Exponent, s: f64) -> Result<Self> {
        Self::new(p, q, s, 0.0, NormOrder::PositionFirst)
    }

    /// W(FL^p_s, L^q_γ).
    pub fn wiener(p: Exponent, q: Exponent, s: f64, gamma: f64) -> Result<Self> {
        Self::new(p, q, s, gamma, NormOrder::FrequencyFirst)
    }
}

fn expect_order(spec: &MixedNormSpec, expected: NormOrder) -> Result<()> {
    if spec.order == expected {
        Ok(())
    } else {
        Err(PlateError::NormOrderMismatch {
            expected: expected.to_string(),
            actual: spec.order.to_string(),
        })
    }
}

/// Weighted ℓ^p reduction of `values[i]·weights[i]` with cell volume `cell`.
fn lp_reduce(values: &[f64], weights: Option<&[f64]>, p: Exponent, cell: f64) -> f64 {
    match p {
        Exponent::Infinity => match weights {
            Some(w) => values
                .iter()
                .zip(w)
                .map(|(v, w)| v * w)
                .fold(0.0, f64::max),
            None => values.iter().copied().fold(0.0, f64::max),
        },
        Exponent::Finite(p) => {
            let powed: Vec<f64> = match weights {
                Some(w) => values
                    .iter()
                    .zip(w)
                    .map(|(v, w)| pow_abs(v * w, p))
                    .collect(),
                None => values.iter().map(|v| pow_abs(*v, p)).collect(),
            };
            (cell * pairwise_sum(&powed)).powf(1.0 / p)
        }
    }
}

fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == p.trunc() && p <= 8.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// ‖f‖_{M^{p,q}_s}: inner L^p over position, outer weighted L^q over frequency.
pub fn modulation_norm(matrix: &StftMatrix, spec: &MixedNormSpec) -> Result<f64> {
    expect_order(spec, NormOrder::PositionFirst)?;
    let lat = matrix.lattice();
    let n = matrix.num_points();

    // Inner reduction runs over rows (positions) at fixed column (frequency).
    let inner: Vec<f64> = match spec.p {
        Exponent::Infinity => {
            let mut acc = vec![0.0f64; n];
            for p in 0..n {
                for (w, v) in matrix.row(p).iter().enumerate() {
                    acc[w] = acc[w].max(v.norm());
                }
            }
            acc
        }
        Exponent::Finite(pv) => {
            let cell = lat.spatial_cell();
            let mut col = vec![0.0f64; n];
            let mut acc = vec![0.0f64; n];
            for (w, out) in acc.iter_mut().enumerate() {
                for (p, slot) in col.iter_mut().enumerate() {
                    *slot = pow_abs(matrix.value(p, w).norm(), pv);
                }
                *out = (cell * pairwise_sum(&col)).powf(1.0 / pv);
            }
            acc
        }
    };

    let weights: Vec<f64> = (0..n)
        .map(|w| crate::lattice::bracket_weight(&lat.frequency(w), spec.s))
        .collect();
    Ok(lp_reduce(&inner, Some(&weights), spec.q, lat.frequency_cell()))
}

/// ‖f‖_{W(FL^p_s, L^q_γ)}: inner weighted L^p over frequency, outer weighted
/// L^q over position.
///
/// The outer weight ⟨z⟩^γ acts on the analysis-window position relative to
/// the torus center, i.e. the translation offset wrapped to [−L/2, L/2)^d.
pub fn wiener_norm(matrix: &StftMatrix, spec: &MixedNormSpec) -> Result<f64> {
    expect_order(spec, NormOrder::FrequencyFirst)?;
    let lat = matrix.lattice();
    let n = matrix.num_points();

    let freq_weights: Vec<f64> = (0..n)
        .map(|w| crate::lattice::bracket_weight(&lat.frequency(w), spec.s))
        .collect();

    let mut scratch = vec![0.0f64; n];
    let mut inner = vec![0.0f64; n];
    for (p, out) in inner.iter_mut().enumerate() {
        for (slot, (v, w)) in scratch.iter_mut().zip(matrix.row(p).iter().zip(&freq_weights)) {
            *slot = v.norm() * w;
        }
        *out = lp_reduce(&scratch, None, spec.p, lat.frequency_cell());
    }

    let pos_weights: Vec<f64> = (0..n)
        .map(|p| crate::lattice::bracket_weight(&lat.signed_position(p), spec.gamma))
        .collect();
    Ok(lp_reduce(&inner, Some(&pos_weights), spec.q, lat.spatial_cell()))
}

/// A point (1/p, 1/q) of the unit square of exponent reciprocals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexPoint {
    inv_p: f64,
    inv_q: f64,
}

impl IndexPoint {
    pub fn new(inv_p: f64, inv_q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&inv_p) || !(0.0..=1.0).contains(&inv_q) {
            return Err(PlateError::InvalidParameter(format!(
                "index point ({inv_p}, {inv_q}) must lie in the unit square"
            )));
        }
        Ok(IndexPoint { inv_p, inv_q })
    }

    pub fn from_exponents(p: &Exponent, q: &Exponent) -> Self {
        IndexPoint {
            inv_p: p.inv(),
            inv_q: q.inv(),
        }
    }

    pub fn inv_p(&self) -> f64 {
        self.inv_p
    }

    pub fn inv_q(&self) -> f64 {
        self.inv_q
    }

    /// (1/p, 1/q) ↦ (1/p′, 1/q′), total on the unit square.
    pub fn conjugate(&self) -> IndexPoint {
        IndexPoint {
            inv_p: 1.0 - self.inv_p,
            inv_q: 1.0 - self.inv_q,
        }
    }
}

/// Classification tolerance for floating-point region membership.
const REGION_TOL: f64 = 1e-12;

/// Dilation exponents (μ₁, μ₂) of the index point.
///
/// μ₁ is resolved on the starred regions, μ₂ on the unstarred ones:
///   I₁  = max(1/p, 1/p′) ≤ 1/q    I₁* = min(1/p, 1/p′) ≥ 1/q
///   I₂  = max(1/q, 1/2) ≤ 1/p′    I₂* = min(1/q, 1/2) ≥ 1/p′
///   I₃  = max(1/q, 1/2) ≤ 1/p     I₃* = min(1/q, 1/2) ≥ 1/p
/// with branch values −1/p, 1/q − 1 and −2/p + 1/q respectively. On region
/// boundaries the applicable branches agree, so the first match is returned.
pub fn mu_exponents(pt: &IndexPoint) -> (f64, f64) {
    let a = pt.inv_p;
    let b = pt.inv_q;
    let ap = 1.0 - a; // 1/p′

    let mu1 = if a.min(ap) >= b - REGION_TOL {
        -a
    } else if b.min(0.5) >= ap - REGION_TOL {
        b - 1.0
    } else if b.min(0.5) >= a - REGION_TOL {
        -2.0 * a + b
    } else {
        unreachable!("starred regions cover the unit square")
    };

    let mu2 = if a.max(ap) <= b + REGION_TOL {
        -a
    } else if b.max(0.5) <= ap + REGION_TOL {
        b - 1.0
    } else if b.max(0.5) <= a + REGION_TOL {
        -2.0 * a + b
    } else {
        unreachable!("unstarred regions cover the unit square")
    };

    // + 0.0 turns a signed zero from -a into plain 0.
    (mu1 + 0.0, mu2 + 0.0)
}

/// Exact-rational route for the same region arithmetic.
pub mod exact {
    use num_rational::Ratio;

    /// Exact rational, used when index points are given as fractions.
    pub type Q = Ratio<i64>;

    fn one() -> Q {
        Q::from_integer(1)
    }

    fn half() -> Q {
        Q::new(1, 2)
    }

    /// All starred-region memberships of (1/p, 1/q).
    pub fn starred_regions(a: Q, b: Q) -> [bool; 3] {
        let ap = one() - a;
        [
            a.min(ap) >= b,
            b.min(half()) >= ap,
            b.min(half()) >= a,
        ]
    }

    /// All unstarred-region memberships of (1/p, 1/q).
    pub fn unstarred_regions(a: Q, b: Q) -> [bool; 3] {
        let ap = one() - a;
        [
            a.max(ap) <= b,
            b.max(half()) <= ap,
            b.max(half()) <= a,
        ]
    }

    /// Branch values (same order as the region arrays).
    pub fn branch_values(a: Q, b: Q) -> [Q; 3] {
        [-a, b - one(), -(a + a) + b]
    }

    /// Exact (μ₁, μ₂).
    pub fn mu_exponents(a: Q, b: Q) -> (Q, Q) {
        let values = branch_values(a, b);
        let starred = starred_regions(a, b);
        let unstarred = unstarred_regions(a, b);
        let mu1 = values[starred.iter().position(|&m| m).expect("starred cover")];
        let mu2 = values[unstarred.iter().position(|&m| m).expect("unstarred cover")];
        (mu1, mu2)
    }
}

/// Convenience: exact μ from integer fractions, as f64.
pub fn mu_exponents_rational(inv_p: Ratio<i64>, inv_q: Ratio<i64>) -> (f64, f64) {
    let (m1, m2) = exact::mu_exponents(inv_p, inv_q);
    (
        *m1.numer() as f64 / *m1.denom() as f64,
        *m2.numer() as f64 / *m2.denom() as f64,
    )
}
