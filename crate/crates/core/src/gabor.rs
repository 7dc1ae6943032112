//! Short-time Fourier transform on the product lattice.
//!
//! V_g f(x,ω) = ⟨f, M_ω T_x g⟩ = ∫ e^{−2πi ω·y} f(y) conj(g(y−x)) dy,
//! sampled on the full grid: step h in position, 1/L in frequency. The
//! translation T_x is the periodic (circular) shift of the window samples.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PlateError, Result};
use crate::lattice::{AxisFft, Field, Lattice};
use crate::numerics::pairwise_sum;

/// Largest N^d for which the full N^d × N^d transform matrix is materialized.
const MAX_STFT_POINTS: usize = 4096;

/// Analysis window g with its cached L² norm.
#[derive(Debug, Clone)]
pub struct Window {
    field: Field,
    l2_norm: f64,
}

impl Window {
    /// The default window: the L-periodized standard Gaussian
    /// g(x) = e^{−π|x−c|²} centered at the torus midpoint c.
    pub fn gaussian(lattice: Lattice) -> Window {
        Self::gaussian_with_width(lattice, 1.0)
    }

    /// Periodized Gaussian of the given width, centered at the torus midpoint.
    pub fn gaussian_with_width(lattice: Lattice, width: f64) -> Window {
        let center = lattice.center();
        let field = Field::gaussian(lattice, &center, width)
            .expect("gaussian window construction cannot fail on a valid lattice");
        Self::from_field(field).expect("gaussian window is nonzero")
    }

    /// Uses an arbitrary nonzero field as the window.
    pub fn from_field(field: Field) -> Result<Window> {
        let l2_norm = field.l2_norm();
        if !l2_norm.is_finite() || l2_norm <= 0.0 {
            return Err(PlateError::InvalidParameter(
                "window must be a non-zero function".to_string(),
            ));
        }
        Ok(Window { field, l2_norm })
    }

    /// Same window scaled to unit L² norm.
    pub fn normalized(&self) -> Window {
        let field = self.field.scale(Complex64::new(1.0 / self.l2_norm, 0.0));
        Window {
            l2_norm: field.l2_norm(),
            field,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn lattice(&self) -> &Lattice {
        self.field.lattice()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }
}

/// Sampled V_g f on the N^d × N^d product lattice.
///
/// Row index is the flat spatial position, column index the flat frequency
/// storage index of the underlying lattice.
#[derive(Debug, Clone)]
pub struct StftMatrix {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl StftMatrix {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Number of positions (= number of frequencies).
    pub fn num_points(&self) -> usize {
        self.lattice.num_points()
    }

    pub fn value(&self, position: usize, frequency: usize) -> Complex64 {
        self.values[position * self.num_points() + frequency]
    }

    pub fn row(&self, position: usize) -> &[Complex64] {
        let n = self.num_points();
        &self.values[position * n..(position + 1) * n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// h^d (1/L)^d Σ |V|², the discrete analogue of ‖V_g f‖²_{L²(ℝ^{2d})}.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        self.lattice.spatial_cell() * self.lattice.frequency_cell() * pairwise_sum(&sq)
    }

    /// CSV dump of |V|: header `x_index,omega_index,abs_value`, row-major.
    pub fn abs_csv(&self) -> String {
        let n = self.num_points();
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str("x_index,omega_index,abs_value\n");
        for p in 0..n {
            for w in 0..n {
                out.push_str(&format!("{},{},{:.16e}\n", p, w, self.value(p, w).norm()));
            }
        }
        out
    }
}

/// Computes V_g f on the full product lattice.
///
/// Each row (one per position x) is the forward transform of
/// y ↦ f(y)·conj(g(y−x)); rows are independent and computed in parallel.
pub fn stft(f: &Field, g: &Window) -> Result<StftMatrix> {
    let lattice = *f.lattice();
    lattice.ensure_same(g.lattice())?;
    let total = lattice.num_points();
    if total > MAX_STFT_POINTS {
        return Err(PlateError::InvalidParameter(format!(
            "full transform matrix needs {total}x{total} entries; \
             the cap is {MAX_STFT_POINTS} grid points"
        )));
    }
    let n = lattice.points_per_axis();
    let dim = lattice.dim();
    let h_d = lattice.spatial_cell();
    let fft = AxisFft::new(n);
    let fs = f.samples();
    let gs = g.field().samples();

    let mut values = vec![Complex64::new(0.0, 0.0); total * total];
    values
        .par_chunks_mut(total)
        .enumerate()
        .for_each(|(pos, row)| {
            // row[j] = f(y_j) · conj(g(y_j − x_pos)), circular shift by pos.
            if dim == 1 {
                for j in 0..total {
                    let shifted = (j + total - pos) % total;
                    row[j] = fs[j] * gs[shifted].conj();
                }
            } else {
                let pidx = lattice.multi_index(pos);
                for (j, slot) in row.iter_mut().enumerate() {
                    let jidx = lattice.multi_index(j);
                    let mut shifted = 0usize;
                    for a in 0..dim {
                        shifted = shifted * n + (jidx[a] + n - pidx[a]) % n;
                    }
                    *slot = fs[j] * gs[shifted].conj();
                }
            }
            fft.transform_nd(row, dim, true);
            for z in row.iter_mut() {
                *z *= h_d;
            }
        });

    Ok(StftMatrix { lattice, values })
}
