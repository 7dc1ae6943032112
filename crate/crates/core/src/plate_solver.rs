//! Spectral solver for ∂²_t u + Δ²_x u = F(u) on the torus.
//!
//! The homogeneous flow is exact per Fourier mode: with a = 4π²|ξ|²,
//!   û(t,ξ) = cos(a t)·û₀(ξ) + sin(a t)/a·û₁(ξ),
//! so linear propagation carries no time-marching error. The forced problem
//! is solved as the fixed point u = u_lin + 𝓑F(u) of the Duhamel integral
//! equation, with 𝓑 = ∫₀^t K(t−τ)·dτ discretized by composite trapezoid on a
//! uniform time grid and iterated à la Picard.

use num_complex::Complex64;

use crate::error::{PlateError, Result};
use crate::gabor::{stft, Window};
use crate::lattice::{forward_transform, inverse_transform, Field, Lattice};
use crate::mixed_norms::{modulation_norm, Exponent, MixedNormSpec};
use crate::numerics::pairwise_sum;

/// Pointwise nonlinearity F with F(0) = 0.
#[derive(Debug, Clone)]
pub enum Nonlinearity {
    Zero,
    /// λ|u|^{2k}u = λ u^{k+1} ū^k.
    PowerLaw { lambda: Complex64, k: u32 },
    /// Truncated double series Σ c_{j,k} u^j ū^k, degree j+k ≤ truncation.
    EntireSeries {
        coefficients: Vec<((u32, u32), Complex64)>,
        truncation_degree: u32,
    },
}

/// Default truncation degree for entire-series nonlinearities.
pub const DEFAULT_SERIES_DEGREE: u32 = 8;

impl Nonlinearity {
    pub fn power_law(lambda: Complex64, k: u32) -> Nonlinearity {
        Nonlinearity::PowerLaw { lambda, k }
    }

    /// [`Nonlinearity::entire_series`] with the default truncation degree.
    pub fn entire_series_default(
        coefficients: Vec<((u32, u32), Complex64)>,
    ) -> Result<Nonlinearity> {
        Self::entire_series(coefficients, DEFAULT_SERIES_DEGREE)
    }

    /// Builds a truncated entire series. The constant term must vanish;
    /// coefficients of degree beyond `truncation_degree` are dropped with a
    /// warning on stderr.
    pub fn entire_series(
        coefficients: Vec<((u32, u32), Complex64)>,
        truncation_degree: u32,
    ) -> Result<Nonlinearity> {
        let mut kept = Vec::new();
        let mut dropped = 0usize;
        for ((j, k), c) in coefficients {
            if j == 0 && k == 0 && c != Complex64::new(0.0, 0.0) {
                return Err(PlateError::InvalidParameter(
                    "entire series must satisfy F(0) = 0: constant coefficient c_{0,0} must vanish"
                        .to_string(),
                ));
            }
            if j + k > truncation_degree {
                dropped += 1;
            } else {
                kept.push(((j, k), c));
            }
        }
        if dropped > 0 {
            eprintln!(
                "warning: {dropped} series coefficients beyond degree {truncation_degree} ignored"
            );
        }
        Ok(Nonlinearity::EntireSeries {
            coefficients: kept,
            truncation_degree,
        })
    }

    /// Applies F sample by sample.
    pub fn apply(&self, u: &Field) -> Field {
        match self {
            Nonlinearity::Zero => Field::zero(*u.lattice()),
            Nonlinearity::PowerLaw { lambda, k } => {
                let samples = u
                    .samples()
                    .iter()
                    .map(|&z| lambda * z.norm_sqr().powi(*k as i32) * z)
                    .collect();
                Field {
                    lattice: *u.lattice(),
                    samples,
                }
            }
            Nonlinearity::EntireSeries { coefficients, .. } => {
                let samples = u
                    .samples()
                    .iter()
                    .map(|&z| {
                        let zc = z.conj();
                        coefficients
                            .iter()
                            .map(|&((j, k), c)| c * z.powu(j) * zc.powu(k))
                            .sum()
                    })
                    .collect();
                Field {
                    lattice: *u.lattice(),
                    samples,
                }
            }
        }
    }
}

/// Distance used to declare the Picard iteration converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvergenceMetric {
    /// Sup over time nodes and grid points. Equivalent to the modulation
    /// metric at fixed N and far cheaper.
    GridSup,
    /// Sup over time nodes of ‖·‖_{M^{p,1}_s}; costs one transform matrix per
    /// node per iteration.
    ModulationP1 { p: Exponent, s: f64 },
}

/// Time horizon, grid resolution and stopping rule for [`picard_solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub horizon: f64,
    pub time_nodes: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub metric: ConvergenceMetric,
}

impl SolverConfig {
    pub fn new(horizon: f64, time_nodes: usize) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            horizon,
            time_nodes,
            picard_tol: 1e-10,
            picard_max_iter: 50,
            metric: ConvergenceMetric::GridSup,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerance(mut self, tol: f64, max_iter: usize) -> Result<SolverConfig> {
        self.picard_tol = tol;
        self.picard_max_iter = max_iter;
        self.validate()?;
        Ok(self)
    }

    pub fn with_metric(mut self, metric: ConvergenceMetric) -> SolverConfig {
        self.metric = metric;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "time horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.time_nodes < 2 {
            return Err(PlateError::InvalidParameter(format!(
                "time grid needs at least 2 nodes, got {}",
                self.time_nodes
            )));
        }
        if !self.picard_tol.is_finite() || self.picard_tol <= 0.0 {
            return Err(PlateError::InvalidParameter(format!(
                "picard tolerance must be positive, got {}",
                self.picard_tol
            )));
        }
        Ok(())
    }

    /// Uniform step T/(M−1).
    pub fn time_step(&self) -> f64 {
        self.horizon / (self.time_nodes - 1) as f64
    }

    /// t_m = m·T/(M−1).
    pub fn node_time(&self, m: usize) -> f64 {
        m as f64 * self.time_step()
    }
}

/// Discrete solution of the integral equation on the time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub states: Vec<Field>,
    pub iterations_used: usize,
    pub converged: bool,
    pub final_increment: f64,
    /// Convergence history, one increment per Picard iteration.
    pub increments: Vec<f64>,
}

/// a(ξ) = 4π²|ξ|² per flat storage index.
fn dispersion_table(lat: &Lattice) -> Vec<f64> {
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    (0..lat.num_points())
        .map(|flat| four_pi_sq * lat.frequency_norm_sq(flat))
        .collect()
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z * z * z * z / 120.0
    } else {
        z.sin() / z
    }
}

/// u(t) = K'(t)u₀ + K(t)u₁, exact per mode.
pub fn propagate_linear(u0: &Field, u1: &Field, t: f64) -> Result<Field> {
    u0.lattice().ensure_same(u1.lattice())?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "propagation time must be >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let lat = *u0.lattice();
    let a = dispersion_table(&lat);
    let s0 = forward_transform(u0);
    let s1 = forward_transform(u1);
    let samples = (0..lat.num_points())
        .map(|i| {
            let at = a[i] * t;
            s0.samples[i] * at.cos() + s1.samples[i] * (t * sinc(at))
        })
        .collect();
    let spectrum = Field {
        lattice: lat,
        samples,
    };
    let out = inverse_transform(&spectrum);
    out.ensure_finite("linear propagation")?;
    Ok(out)
}

/// ∂_t u(t) = −a·sin(at)·û₀ + cos(at)·û₁ per mode.
pub fn time_derivative_linear(u0: &Field, u1: &Field, t: f64) -> Result<Field> {
    u0.lattice().ensure_same(u1.lattice())?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "propagation time must be >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(u1.clone());
    }
    let lat = *u0.lattice();
    let a = dispersion_table(&lat);
    let s0 = forward_transform(u0);
    let s1 = forward_transform(u1);
    let samples = (0..lat.num_points())
        .map(|i| {
            let at = a[i] * t;
            s0.samples[i] * (-a[i] * at.sin()) + s1.samples[i] * at.cos()
        })
        .collect();
    let spectrum = Field {
        lattice: lat,
        samples,
    };
    let out = inverse_transform(&spectrum);
    out.ensure_finite("linear propagation derivative")?;
    Ok(out)
}

/// Conserved functional of the homogeneous flow:
/// (1/L)^d Σ_ξ (|û_t(ξ)|² + (4π²|ξ|²)²|û(ξ)|²), i.e. ‖∂_t u‖²_{L²} + ‖Δu‖²_{L²}.
pub fn energy(u: &Field, ut: &Field) -> Result<f64> {
    u.lattice().ensure_same(ut.lattice())?;
    let lat = u.lattice();
    let a = dispersion_table(lat);
    let su = forward_transform(u);
    let st = forward_transform(ut);
    let terms: Vec<f64> = (0..lat.num_points())
        .map(|i| st.samples[i].norm_sqr() + a[i] * a[i] * su.samples[i].norm_sqr())
        .collect();
    Ok(lat.frequency_cell() * pairwise_sum(&terms))
}

/// Spectral accumulation of the Duhamel quadrature at node `t_index`:
/// Σ_m w_m σ₁(ξ; t_i − τ_m) ĝ_m(ξ), composite trapezoid on the nodes ≤ t_i.
fn duhamel_spectrum(
    spectra: &[Vec<Complex64>],
    a: &[f64],
    step: f64,
    t_index: usize,
) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); a.len()];
    if t_index == 0 {
        return acc;
    }
    for (m, spectrum) in spectra.iter().enumerate().take(t_index + 1) {
        let weight = if m == 0 || m == t_index {
            step / 2.0
        } else {
            step
        };
        let dt = (t_index - m) as f64 * step;
        for (i, slot) in acc.iter_mut().enumerate() {
            let s1 = dt * sinc(a[i] * dt);
            *slot += spectrum[i] * (weight * s1);
        }
    }
    acc
}

/// 𝓑g(t_i) = ∫₀^{t_i} K(t_i−τ) g(τ) dτ by composite trapezoid over the
/// uniform grid τ_m = m·step; quadrature error O(step²) for smooth g.
pub fn duhamel(g: &[Field], step: f64, t_index: usize) -> Result<Field> {
    if t_index >= g.len() {
        return Err(PlateError::TimeIndexOutOfRange {
            index: t_index,
            nodes: g.len(),
        });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "time step must be positive, got {step}"
        )));
    }
    let lat = *g[0].lattice();
    for node in g.iter().skip(1) {
        lat.ensure_same(node.lattice())?;
    }
    let a = dispersion_table(&lat);
    let spectra: Vec<Vec<Complex64>> = g[..=t_index]
        .iter()
        .map(|node| forward_transform(node).into_samples())
        .collect();
    let samples = duhamel_spectrum(&spectra, &a, step, t_index);
    let out = inverse_transform(&Field {
        lattice: lat,
        samples,
    });
    out.ensure_finite("duhamel quadrature")?;
    Ok(out)
}

fn metric_distance(metric: &ConvergenceMetric, diff: &Field) -> Result<f64> {
    match metric {
        ConvergenceMetric::GridSup => Ok(diff.sup_norm()),
        ConvergenceMetric::ModulationP1 { p, s } => {
            let spec = MixedNormSpec::modulation(*p, Exponent::Finite(1.0), *s)?;
            let matrix = stft(diff, &Window::gaussian(*diff.lattice()))?;
            modulation_norm(&matrix, &spec)
        }
    }
}

/// Picard iteration for u = u_lin + 𝓑F(u) on the time grid.
///
/// The initial guess is the linear flow at every node; iterates stop when the
/// increment (in the configured metric, sup over nodes) drops below
/// `picard_tol`, or `converged = false` after `picard_max_iter` sweeps.
/// Non-finite samples abort with a blow-up diagnostic naming the iterate and
/// node.
pub fn picard_solve(
    u0: &Field,
    u1: &Field,
    nonlinearity: &Nonlinearity,
    config: &SolverConfig,
) -> Result<Trajectory> {
    config.validate()?;
    u0.lattice().ensure_same(u1.lattice())?;
    let lat = *u0.lattice();
    let nodes = config.time_nodes;
    let step = config.time_step();
    let a = dispersion_table(&lat);

    let mut u_lin = Vec::with_capacity(nodes);
    u_lin.push(u0.clone());
    for m in 1..nodes {
        u_lin.push(propagate_linear(u0, u1, config.node_time(m))?);
    }

    let mut current = u_lin.clone();
    let mut increments = Vec::new();
    let mut converged = false;

    for iteration in 1..=config.picard_max_iter {
        // F(u) per node, with blow-up detection.
        let mut spectra = Vec::with_capacity(nodes);
        for (node, u) in current.iter().enumerate() {
            let fu = nonlinearity.apply(u);
            if fu.ensure_finite("nonlinearity").is_err() {
                return Err(PlateError::BlowUp { iteration, node });
            }
            spectra.push(forward_transform(&fu).into_samples());
        }

        let mut increment = 0.0f64;
        let mut next = Vec::with_capacity(nodes);
        for m in 0..nodes {
            let correction = inverse_transform(&Field {
                lattice: lat,
                samples: duhamel_spectrum(&spectra, &a, step, m),
            });
            let candidate = u_lin[m].add(&correction)?;
            if candidate.ensure_finite("picard update").is_err() {
                return Err(PlateError::BlowUp { iteration, node: m });
            }
            let diff = candidate.sub(&current[m])?;
            increment = increment.max(metric_distance(&config.metric, &diff)?);
            next.push(candidate);
        }
        if !increment.is_finite() {
            return Err(PlateError::BlowUp {
                iteration,
                node: 0,
            });
        }
        increments.push(increment);
        current = next;
        if increment < config.picard_tol {
            converged = true;
            break;
        }
    }

    let iterations_used = increments
        .iter()
        .filter(|&&inc| inc >= config.picard_tol)
        .count();
    let final_increment = increments.last().copied().unwrap_or(0.0);
    Ok(Trajectory {
        config: *config,
        states: current,
        iterations_used,
        converged,
        final_increment,
        increments,
    })
}

/// The power-law admissibility criterion q′ > kd, with the auxiliary index
/// r = q/(2k(1−q)+1) reported when its denominator is positive.
pub fn check_power_law_admissible(
    p: &Exponent,
    q: &Exponent,
    s: f64,
    k: u32,
    d: usize,
) -> (bool, String) {
    let kd = (k as usize * d) as f64;
    let q_conj = q.conjugate();
    let admissible = match q_conj {
        Exponent::Infinity => true,
        Exponent::Finite(qp) => qp > kd,
    };
    let r_part = match q {
        Exponent::Infinity => "r undefined at these indices".to_string(),
        Exponent::Finite(qv) => {
            let denom = 2.0 * k as f64 * (1.0 - qv) + 1.0;
            if denom > 0.0 {
                format!("r = {}", qv / denom)
            } else {
                "r undefined at these indices".to_string()
            }
        }
    };
    let verdict = if admissible { "admissible" } else { "not admissible" };
    let diagnostic = format!(
        "q' = {q_conj}, k*d = {kd}: {verdict} (need q' > kd); {r_part}; p = {p}, s = {s}"
    );
    (admissible, diagnostic)
}
