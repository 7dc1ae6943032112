//! Periodic spatial lattice, its dual frequency lattice, and the discrete
//! Fourier transform under the normalization f̂(ξ) = ∫ f(y) e^{−2πi y·ξ} dy.
//!
//! Functions on ℝ^d are modeled by periodization on the torus [0,L)^d. The
//! rule of thumb is L ≥ 16 for unit-width Gaussians, which keeps the
//! truncation error below the discretization error. Test functions should be
//! centered at L/2 to avoid wrap-around.
//!
//! Grid points are x_j = j·h with h = L/N; the frequency lattice is
//! {k/L : k ∈ ℤ^d, −N/2 ≤ k_j < N/2}, stored in FFT order (index m maps to
//! the integer mode m for m < N/2 and m − N otherwise).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{PlateError, Result};
use crate::numerics::pairwise_sum;

/// Default cap on d·log2(N): at most 2^24 grid points per field.
pub const DEFAULT_POINT_BUDGET_LOG2: u32 = 24;

/// Uniform periodic grid on [0,L)^d together with its dual frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    dim: usize,
    points_per_axis: usize,
    side_length: f64,
}

impl Lattice {
    /// A lattice with the default memory budget (d·log2(N) ≤ 24).
    pub fn new(dim: usize, points_per_axis: usize, side_length: f64) -> Result<Self> {
        Self::with_point_budget(dim, points_per_axis, side_length, DEFAULT_POINT_BUDGET_LOG2)
    }

    /// A lattice with an explicit cap on d·log2(N).
    pub fn with_point_budget(
        dim: usize,
        points_per_axis: usize,
        side_length: f64,
        max_log2_points: u32,
    ) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(PlateError::InvalidLattice {
                reason: format!("dimension must be 1, 2 or 3, got {dim}"),
            });
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(PlateError::InvalidLattice {
                reason: format!(
                    "points per axis must be a power of two >= 2, got {points_per_axis}"
                ),
            });
        }
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(PlateError::InvalidLattice {
                reason: format!("side length must be a positive real, got {side_length}"),
            });
        }
        let log2_points = dim as u32 * points_per_axis.trailing_zeros();
        if log2_points > max_log2_points {
            return Err(PlateError::InvalidLattice {
                reason: format!(
                    "d*log2(N) = {log2_points} exceeds the configured budget {max_log2_points}"
                ),
            });
        }
        Ok(Lattice {
            dim,
            points_per_axis,
            side_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    /// Spatial step h = L/N.
    pub fn spatial_step(&self) -> f64 {
        self.side_length / self.points_per_axis as f64
    }

    /// Frequency step 1/L.
    pub fn frequency_step(&self) -> f64 {
        1.0 / self.side_length
    }

    /// Total number of grid points N^d.
    pub fn num_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Volume h^d of one spatial cell.
    pub fn spatial_cell(&self) -> f64 {
        self.spatial_step().powi(self.dim as i32)
    }

    /// Volume (1/L)^d of one frequency cell.
    pub fn frequency_cell(&self) -> f64 {
        self.side_length.powi(-(self.dim as i32))
    }

    /// Center of the torus, c = (L/2, …, L/2).
    pub fn center(&self) -> Vec<f64> {
        vec![self.side_length / 2.0; self.dim]
    }

    /// Per-axis indices of a flat index, axis 0 slowest (row-major).
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let n = self.points_per_axis;
        let mut out = vec![0usize; self.dim];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            out[a] = rest % n;
            rest /= n;
        }
        out
    }

    /// Flat index from per-axis indices.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let n = self.points_per_axis;
        idx.iter().fold(0usize, |acc, &i| acc * n + (i % n))
    }

    /// Grid point x_j = j·h for flat index j.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        let h = self.spatial_step();
        self.multi_index(flat).iter().map(|&j| j as f64 * h).collect()
    }

    /// Position relative to the torus center, in [−L/2, L/2)^d.
    pub fn centered_position(&self, flat: usize) -> Vec<f64> {
        let c = self.side_length / 2.0;
        self.position(flat).iter().map(|x| x - c).collect()
    }

    /// Translation offset x_j wrapped to the symmetric window [−L/2, L/2)^d.
    ///
    /// A window translated by x_j sits at c + x_j on the torus, so this is
    /// the analysis-window position relative to the torus center — the
    /// coordinate the outer weights of frequency-first norms act on.
    pub fn signed_position(&self, flat: usize) -> Vec<f64> {
        let h = self.spatial_step();
        self.multi_index(flat)
            .iter()
            .map(|&j| self.mode_of(j) as f64 * h)
            .collect()
    }

    /// Integer mode of storage index m along one axis: m for m < N/2, m − N otherwise.
    pub fn mode_of(&self, storage: usize) -> i64 {
        let n = self.points_per_axis as i64;
        let m = storage as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Frequency lattice point ξ = k/L for flat storage index.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let inv_l = self.frequency_step();
        self.multi_index(flat)
            .iter()
            .map(|&m| self.mode_of(m) as f64 * inv_l)
            .collect()
    }

    /// |ξ|² for flat storage index, allocation-free.
    pub fn frequency_norm_sq(&self, flat: usize) -> f64 {
        let n = self.points_per_axis;
        let inv_l = self.frequency_step();
        let mut rest = flat;
        let mut acc = 0.0;
        for _ in 0..self.dim {
            let m = rest % n;
            rest /= n;
            let xi = self.mode_of(m) as f64 * inv_l;
            acc += xi * xi;
        }
        acc
    }

    /// Storage index of the integer mode k, if −N/2 ≤ k_a < N/2 on every axis.
    pub fn index_of_mode(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let n = self.points_per_axis as i64;
        let mut flat = 0usize;
        for &ka in k {
            if ka < -n / 2 || ka >= n / 2 {
                return None;
            }
            let storage = if ka >= 0 { ka } else { ka + n };
            flat = flat * self.points_per_axis + storage as usize;
        }
        Some(flat)
    }

    pub(crate) fn ensure_same(&self, other: &Lattice) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(PlateError::LatticeMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

/// Complex samples of a function on a [`Lattice`], in row-major grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub(crate) lattice: Lattice,
    pub(crate) samples: Vec<Complex64>,
}

impl Field {
    /// Wraps raw samples, checking length and finiteness.
    pub fn new(lattice: Lattice, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != lattice.num_points() {
            return Err(PlateError::InvalidParameter(format!(
                "sample count {} does not match the {} grid points",
                samples.len(),
                lattice.num_points()
            )));
        }
        let field = Field { lattice, samples };
        field.ensure_finite("construction")?;
        Ok(field)
    }

    pub(crate) fn ensure_finite(&self, context: &str) -> Result<()> {
        let count = self
            .samples
            .iter()
            .filter(|z| !(z.re.is_finite() && z.im.is_finite()))
            .count();
        if count == 0 {
            Ok(())
        } else {
            Err(PlateError::NonFiniteField {
                context: context.to_string(),
                count,
            })
        }
    }

    pub fn zero(lattice: Lattice) -> Self {
        Field {
            lattice,
            samples: vec![Complex64::new(0.0, 0.0); lattice.num_points()],
        }
    }

    pub fn constant(lattice: Lattice, value: Complex64) -> Self {
        Field {
            lattice,
            samples: vec![value; lattice.num_points()],
        }
    }

    /// Samples f at every grid point.
    pub fn from_fn(lattice: Lattice, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let samples = (0..lattice.num_points())
            .map(|i| f(&lattice.position(i)))
            .collect();
        Field::new(lattice, samples)
    }

    /// The lattice plane wave e^{2πi (k/L)·x}.
    pub fn plane_wave(lattice: Lattice, k: &[i64]) -> Result<Self> {
        if lattice.index_of_mode(k).is_none() {
            return Err(PlateError::InvalidParameter(format!(
                "mode {k:?} is not on the frequency lattice of N={}",
                lattice.points_per_axis()
            )));
        }
        let inv_l = lattice.frequency_step();
        Field::from_fn(lattice, |x| {
            let phase: f64 = x
                .iter()
                .zip(k)
                .map(|(&xa, &ka)| xa * ka as f64 * inv_l)
                .sum();
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
        })
    }

    /// L-periodization of the Gaussian e^{−π|x−center|²/width²}.
    pub fn gaussian(lattice: Lattice, center: &[f64], width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        if center.len() != lattice.dim() {
            return Err(PlateError::InvalidParameter(format!(
                "gaussian center has {} components on a {}-dimensional lattice",
                center.len(),
                lattice.dim()
            )));
        }
        let l = lattice.side_length();
        Field::from_fn(lattice, |x| {
            Complex64::new(periodized_gaussian_value(x, center, width, l), 0.0)
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.lattice.ensure_same(&other.lattice)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Field {
            lattice: self.lattice,
            samples,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.lattice.ensure_same(&other.lattice)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field {
            lattice: self.lattice,
            samples,
        })
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            lattice: self.lattice,
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    /// Pointwise product (used by windowed transforms and product estimates).
    pub fn product(&self, other: &Field) -> Result<Field> {
        self.lattice.ensure_same(&other.lattice)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Field {
            lattice: self.lattice,
            samples,
        })
    }

    /// max_j |f(x_j)|.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm, (h^d Σ |f|²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        (self.lattice.spatial_cell() * pairwise_sum(&sq)).sqrt()
    }
}

/// Σ_{|m_a| ≤ 3} e^{−π|x + mL − center|²/width²}, the torus periodization.
pub fn periodized_gaussian_value(x: &[f64], center: &[f64], width: f64, l: f64) -> f64 {
    const IMAGES: i64 = 3;
    let inv_w2 = 1.0 / (width * width);
    // The Gaussian factorizes, so periodize each axis independently and take
    // the product.
    let mut prod = 1.0;
    for (xa, ca) in x.iter().zip(center) {
        let mut axis = 0.0;
        for m in -IMAGES..=IMAGES {
            let dx = xa + m as f64 * l - ca;
            axis += (-std::f64::consts::PI * dx * dx * inv_w2).exp();
        }
        prod *= axis;
    }
    prod
}

/// Weight ⟨v⟩^s = (1+|v|²)^{s/2}.
pub fn bracket_weight(v: &[f64], s: f64) -> f64 {
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    (1.0 + norm_sq).powf(s / 2.0)
}

pub(crate) struct AxisFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisFft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        AxisFft {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized DFT along every axis of a row-major d-dimensional array.
    pub(crate) fn transform_nd(&self, data: &mut [Complex64], dim: usize, forward: bool) {
        let n = self.n;
        let total = data.len();
        debug_assert_eq!(total, n.pow(dim as u32));
        let plan = if forward { &self.forward } else { &self.inverse };
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                // Contiguous lines; rustfft batches chunks of length n.
                plan.process(data);
            } else {
                let group = stride * n;
                for base in (0..total).step_by(group) {
                    for off in 0..stride {
                        for t in 0..n {
                            scratch[t] = data[base + off + t * stride];
                        }
                        plan.process(&mut scratch);
                        for t in 0..n {
                            data[base + off + t * stride] = scratch[t];
                        }
                    }
                }
            }
        }
    }
}

/// Samples of f̂ on the frequency lattice: h^d times the DFT of the samples,
/// so the discrete sum approximates ∫ f(y) e^{−2πi y·ξ} dy.
pub fn forward_transform(f: &Field) -> Field {
    let fft = AxisFft::new(f.lattice.points_per_axis());
    forward_transform_with(&fft, f)
}

pub(crate) fn forward_transform_with(fft: &AxisFft, f: &Field) -> Field {
    let mut data = f.samples.clone();
    fft.transform_nd(&mut data, f.lattice.dim(), true);
    let scale = f.lattice.spatial_cell();
    for z in &mut data {
        *z *= scale;
    }
    Field {
        lattice: f.lattice,
        samples: data,
    }
}

/// Exact discrete inverse of [`forward_transform`]: (1/L)^d times the
/// unnormalized inverse DFT.
pub fn inverse_transform(f: &Field) -> Field {
    let fft = AxisFft::new(f.lattice.points_per_axis());
    inverse_transform_with(&fft, f)
}

pub(crate) fn inverse_transform_with(fft: &AxisFft, f: &Field) -> Field {
    let mut data = f.samples.clone();
    fft.transform_nd(&mut data, f.lattice.dim(), false);
    let scale = f.lattice.frequency_cell();
    for z in &mut data {
        *z *= scale;
    }
    Field {
        lattice: f.lattice,
        samples: data,
    }
}
