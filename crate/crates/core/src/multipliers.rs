//! Fourier multipliers H_σ f = ∫ e^{2πi x·ξ} σ(ξ) f̂(ξ) dξ and the symbol
//! library of the plate propagators:
//!
//!   σ₀(ξ) = cos(4π²t|ξ|²)                σ̃₀(ξ) = cos|ξ|²
//!   σ₁(ξ) = sin(4π²t|ξ|²)/(4π²|ξ|²)      σ̃₁(ξ) = sin|ξ|²/|ξ|²
//!   τ(ξ)  = e^{πi t|ξ|²}                 (chirp)
//!
//! plus the dilation f_λ(x) = f(λx). Symbols dilate by exact pointwise
//! re-evaluation σ(λξ); fields dilate by trigonometric interpolation of the
//! periodic extension.

use std::io::BufRead;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{PlateError, Result};
use crate::gabor::{stft, Window};
use crate::lattice::{forward_transform, inverse_transform, Field, Lattice};
use crate::mixed_norms::{modulation_norm, wiener_norm, MixedNormSpec, NormOrder};

/// sin(z)/z with the removable singularity handled by its Taylor series.
///
/// The series 1 − z²/6 + z⁴/120 is used for |z| < 1e−4, which avoids the
/// cancellation in sin(z)/z near z = 0.
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    }
}

/// Lookup table for tabulated symbols: exact lattice match required.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    lattice: Lattice,
    values: Vec<Option<Complex64>>,
}

impl SymbolTable {
    /// Parses `xi_components...,re,im` rows. Each ξ must be a point of the
    /// frequency lattice; linear interpolation is not performed.
    pub fn from_csv(reader: impl BufRead, lattice: Lattice, path: &str) -> Result<Self> {
        let mut values = vec![None; lattice.num_points()];
        let inv_l = lattice.frequency_step();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split(',').collect();
            if parts.len() != lattice.dim() + 2 {
                return Err(PlateError::FileFormat {
                    path: path.to_string(),
                    line: line_no + 1,
                    reason: format!(
                        "expected {} comma-separated values (xi components, re, im), got {}",
                        lattice.dim() + 2,
                        parts.len()
                    ),
                });
            }
            let mut modes = Vec::with_capacity(lattice.dim());
            for (axis, raw) in parts[..lattice.dim()].iter().enumerate() {
                let xi: f64 = raw.trim().parse().map_err(|_| PlateError::FileFormat {
                    path: path.to_string(),
                    line: line_no + 1,
                    reason: format!("cannot parse xi component '{raw}'"),
                })?;
                let k = (xi / inv_l).round();
                if (xi - k * inv_l).abs() > 1e-9 * inv_l.max(xi.abs()) {
                    return Err(PlateError::FileFormat {
                        path: path.to_string(),
                        line: line_no + 1,
                        reason: format!(
                            "xi component {xi} (axis {axis}) is not on the frequency lattice \
                             with step {inv_l}"
                        ),
                    });
                }
                modes.push(k as i64);
            }
            let re: f64 = parts[lattice.dim()].trim().parse().map_err(|_| PlateError::FileFormat {
                path: path.to_string(),
                line: line_no + 1,
                reason: "cannot parse re".to_string(),
            })?;
            let im: f64 = parts[lattice.dim() + 1].trim().parse().map_err(|_| {
                PlateError::FileFormat {
                    path: path.to_string(),
                    line: line_no + 1,
                    reason: "cannot parse im".to_string(),
                }
            })?;
            let flat = lattice.index_of_mode(&modes).ok_or_else(|| PlateError::FileFormat {
                path: path.to_string(),
                line: line_no + 1,
                reason: format!("mode {modes:?} outside the lattice frequency window"),
            })?;
            values[flat] = Some(Complex64::new(re, im));
        }
        Ok(SymbolTable { lattice, values })
    }

    fn lookup(&self, xi: &[f64]) -> Result<Complex64> {
        let inv_l = self.lattice.frequency_step();
        let mut modes = Vec::with_capacity(xi.len());
        for &c in xi {
            let k = (c / inv_l).round();
            if (c - k * inv_l).abs() > 1e-9 * inv_l.max(c.abs()) {
                return Err(PlateError::SymbolTableMiss { xi: xi.to_vec() });
            }
            modes.push(k as i64);
        }
        self.lattice
            .index_of_mode(&modes)
            .and_then(|flat| self.values[flat])
            .ok_or_else(|| PlateError::SymbolTableMiss { xi: xi.to_vec() })
    }
}

type SymbolFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Clone)]
enum SymbolKind {
    /// cos(4π²t|ξ|²), the cosine propagator symbol
    PropagatorCos { t: f64 },
    /// sin(4π²t|ξ|²)/(4π²|ξ|²), equal to t at ξ = 0, the sine propagator symbol
    PropagatorSinc { t: f64 },
    /// cos|ξ|²
    CosSquare,
    /// sin|ξ|²/|ξ|², equal to 1 at ξ = 0
    SincSquare,
    /// e^{πi t|ξ|²}
    Chirp { t: f64 },
    Custom(SymbolFn),
    Table(SymbolTable),
}

/// A multiplier symbol ξ ↦ σ(λξ), with λ the accumulated dilation.
#[derive(Clone)]
pub struct Symbol {
    kind: SymbolKind,
    arg_scale: f64,
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match &self.kind {
            SymbolKind::PropagatorCos { t } => format!("propagator_cos(t={t})"),
            SymbolKind::PropagatorSinc { t } => format!("propagator_sinc(t={t})"),
            SymbolKind::CosSquare => "cos_square".to_string(),
            SymbolKind::SincSquare => "sinc_square".to_string(),
            SymbolKind::Chirp { t } => format!("chirp(t={t})"),
            SymbolKind::Custom(_) => "custom".to_string(),
            SymbolKind::Table(_) => "table".to_string(),
        };
        write!(f, "Symbol({name}, arg_scale={})", self.arg_scale)
    }
}

impl Symbol {
    pub fn propagator_cos(t: f64) -> Symbol {
        Symbol {
            kind: SymbolKind::PropagatorCos { t },
            arg_scale: 1.0,
        }
    }

    pub fn propagator_sinc(t: f64) -> Symbol {
        Symbol {
            kind: SymbolKind::PropagatorSinc { t },
            arg_scale: 1.0,
        }
    }

    pub fn cos_square() -> Symbol {
        Symbol {
            kind: SymbolKind::CosSquare,
            arg_scale: 1.0,
        }
    }

    pub fn sinc_square() -> Symbol {
        Symbol {
            kind: SymbolKind::SincSquare,
            arg_scale: 1.0,
        }
    }

    pub fn chirp(t: f64) -> Symbol {
        Symbol {
            kind: SymbolKind::Chirp { t },
            arg_scale: 1.0,
        }
    }

    pub fn identity() -> Symbol {
        Symbol::custom(|_| Complex64::new(1.0, 0.0))
    }

    pub fn custom(f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> Symbol {
        Symbol {
            kind: SymbolKind::Custom(Arc::new(f)),
            arg_scale: 1.0,
        }
    }

    pub fn from_table(table: SymbolTable) -> Symbol {
        Symbol {
            kind: SymbolKind::Table(table),
            arg_scale: 1.0,
        }
    }

    /// The dilated symbol ξ ↦ σ(λξ), evaluated exactly.
    pub fn dilated(&self, lambda: f64) -> Result<Symbol> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "dilation factor must be positive, got {lambda}"
            )));
        }
        Ok(Symbol {
            kind: self.kind.clone(),
            arg_scale: self.arg_scale * lambda,
        })
    }

    /// σ(arg_scale·ξ). Tabulated symbols fail when the scaled argument leaves
    /// the stored frequency window.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        let mut scaled = [0.0f64; 3];
        for (slot, &c) in scaled.iter_mut().zip(xi) {
            *slot = self.arg_scale * c;
        }
        let scaled = &scaled[..xi.len()];
        let r2: f64 = scaled.iter().map(|c| c * c).sum();
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        Ok(match &self.kind {
            SymbolKind::PropagatorCos { t } => Complex64::new((four_pi_sq * t * r2).cos(), 0.0),
            SymbolKind::PropagatorSinc { t } => Complex64::new(t * sinc(four_pi_sq * t * r2), 0.0),
            SymbolKind::CosSquare => Complex64::new(r2.cos(), 0.0),
            SymbolKind::SincSquare => Complex64::new(sinc(r2), 0.0),
            SymbolKind::Chirp { t } => Complex64::from_polar(1.0, std::f64::consts::PI * t * r2),
            SymbolKind::Custom(f) => f(scaled),
            SymbolKind::Table(table) => table.lookup(scaled)?,
        })
    }
}

/// Applies H_σ: forward transform, multiply by σ on the frequency lattice,
/// inverse transform. A symbol value that is not finite at some lattice
/// frequency is rejected with that ξ.
pub fn apply_multiplier(sigma: &Symbol, f: &Field) -> Result<Field> {
    let lat = *f.lattice();
    let mut spectrum = forward_transform(f);
    for flat in 0..lat.num_points() {
        let xi = lat.frequency(flat);
        let value = sigma.eval(&xi)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(PlateError::NonFiniteSymbol { xi });
        }
        spectrum.samples[flat] *= value;
    }
    let out = inverse_transform(&spectrum);
    out.ensure_finite("multiplier application")?;
    Ok(out)
}

/// Samples of x ↦ f(λx), by evaluating the trigonometric interpolant of the
/// periodic extension at the points λx_j.
///
/// Direct O(N^{2d}) evaluation; intended for the moderate grids where the
/// dilation studies run.
pub fn dilate(f: &Field, lambda: f64) -> Result<Field> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    let lat = *f.lattice();
    if (lambda - 1.0).abs() < f64::EPSILON {
        return Ok(f.clone());
    }
    let total = lat.num_points();
    let n = lat.points_per_axis();
    let spectrum = forward_transform(f);
    let coeff_scale = lat.frequency_cell();

    // f(λ x_j) = (1/L)^d Σ_k f̂(k/L) e^{2πi λ k·j / N}
    let mut samples = vec![Complex64::new(0.0, 0.0); total];
    let modes: Vec<Vec<i64>> = (0..total)
        .map(|flat| lat.multi_index(flat).iter().map(|&m| lat.mode_of(m)).collect())
        .collect();
    for (j, slot) in samples.iter_mut().enumerate() {
        let jidx = lat.multi_index(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for (kflat, kmodes) in modes.iter().enumerate() {
            let dot: f64 = kmodes
                .iter()
                .zip(&jidx)
                .map(|(&k, &ji)| k as f64 * ji as f64)
                .sum();
            let phase = 2.0 * std::f64::consts::PI * lambda * dot / n as f64;
            acc += spectrum.samples[kflat] * Complex64::from_polar(1.0, phase);
        }
        *slot = acc * coeff_scale;
    }
    Field::new(lat, samples)
}

/// Truncated Wiener-amalgam norm of a symbol: σ is sampled on the centered
/// grid of a torus of side `l_sym` (the symbol's own variable playing the
/// position role), and the norm of that field is returned at the two
/// truncation scales (side l_sym/2 with n_sym/2 points, and side l_sym with
/// n_sym points — same grid step). Callers assert stabilization of the pair;
/// membership claims at this scale are refinement statements, not proofs.
pub fn symbol_wiener_norm(
    sigma: &Symbol,
    dim: usize,
    spec: &MixedNormSpec,
    l_sym: f64,
    n_sym: usize,
) -> Result<(f64, f64)> {
    if n_sym < 4 || !n_sym.is_power_of_two() {
        return Err(PlateError::InvalidParameter(format!(
            "n_sym must be a power of two >= 4, got {n_sym}"
        )));
    }
    let coarse = sampled_symbol_norm(sigma, dim, spec, l_sym / 2.0, n_sym / 2)?;
    let fine = sampled_symbol_norm(sigma, dim, spec, l_sym, n_sym)?;
    Ok((coarse, fine))
}

/// Fraction of the half-window over which the truncation taper rolls off.
const TAPER_FRACTION: f64 = 0.2;

/// Raised-cosine edge taper: 1 on the inner 80% of [−R, R], smooth roll-off
/// to 0 at the edges. Kills the periodization seam, which would otherwise
/// contribute a spurious broadband jump to the sampled symbol.
fn edge_taper(z: &[f64], half_side: f64) -> f64 {
    let start = (1.0 - TAPER_FRACTION) * half_side;
    let mut w = 1.0;
    for &za in z {
        let a = za.abs();
        if a > start {
            let phase = (a - start) / (half_side - start) * std::f64::consts::FRAC_PI_2;
            w *= phase.cos().powi(2);
        }
    }
    w
}

/// Samples σ on the centered grid of a fresh lattice (with the edge taper)
/// and evaluates `spec`.
pub fn sampled_symbol_norm(
    sigma: &Symbol,
    dim: usize,
    spec: &MixedNormSpec,
    side: f64,
    points: usize,
) -> Result<f64> {
    let lat = Lattice::new(dim, points, side)?;
    let total = lat.num_points();
    let half_side = side / 2.0;
    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let z = lat.centered_position(flat);
        let value = sigma.eval(&z)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(PlateError::NonFiniteSymbol { xi: z });
        }
        samples.push(value * edge_taper(&z, half_side));
    }
    let field = Field::new(lat, samples)?;
    let matrix = stft(&field, &Window::gaussian(lat))?;
    match spec.order {
        NormOrder::FrequencyFirst => wiener_norm(&matrix, spec),
        NormOrder::PositionFirst => modulation_norm(&matrix, spec),
    }
}
