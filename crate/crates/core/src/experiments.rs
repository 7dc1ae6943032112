//! Scripted numerical studies that confront the boundedness, growth, dilation
//! and unboundedness estimates with grid measurements.
//!
//! Finite grids cannot witness true (un)boundedness, so boundedness is
//! operationalized as refinement stability of ratio maxima and unboundedness
//! as monotone super-constant growth along a designed family. Every verdict
//! threshold is declared in the report parameters, and each negative-result
//! experiment carries a bounded control arm in the same run.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlateError, Result};
use crate::gabor::{stft, Window};
use crate::lattice::{periodized_gaussian_value, Field, Lattice};
use crate::mixed_norms::{
    modulation_norm, mu_exponents, wiener_norm, Exponent, IndexPoint, MixedNormSpec,
};
use crate::multipliers::{apply_multiplier, sampled_symbol_norm, Symbol};
use crate::numerics::linear_slope;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One Gaussian bump with a time-frequency shift: c · M_ω T_shift G_width.
///
/// Shifts are stored as multiples of L/32 and modulations as integer lattice
/// modes, so the same member is lattice-aligned at every N ≥ 32 over a fixed
/// side length.
#[derive(Debug, Clone)]
pub struct GaussianTerm {
    pub coefficient: Complex64,
    pub width: f64,
    /// Spatial shift in units of L/32 per axis, in [−4, 4].
    pub shift_32nds: Vec<i64>,
    /// Modulation as an integer frequency mode per axis, in [−8, 8].
    pub mod_mode: Vec<i64>,
}

/// A finite combination of Gaussian terms.
#[derive(Debug, Clone)]
pub struct MemberSpec {
    pub terms: Vec<GaussianTerm>,
}

impl MemberSpec {
    /// Samples the member on a lattice. Requires N ≥ 32 so that the stored
    /// shifts and modes are lattice-aligned.
    pub fn materialize(&self, lattice: &Lattice) -> Result<Field> {
        if lattice.points_per_axis() < 32 {
            return Err(PlateError::InvalidParameter(format!(
                "family members need N >= 32 for lattice-aligned shifts, got {}",
                lattice.points_per_axis()
            )));
        }
        let l = lattice.side_length();
        let center = lattice.center();
        let inv_l = lattice.frequency_step();
        let field = Field::from_fn(*lattice, |x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for term in &self.terms {
                let shifted_center: Vec<f64> = center
                    .iter()
                    .zip(&term.shift_32nds)
                    .map(|(c, &s)| c + s as f64 * l / 32.0)
                    .collect();
                let envelope = periodized_gaussian_value(x, &shifted_center, term.width, l);
                let phase: f64 = x
                    .iter()
                    .zip(&term.mod_mode)
                    .map(|(&xa, &ka)| xa * ka as f64 * inv_l)
                    .sum();
                acc += term.coefficient
                    * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
                    * envelope;
            }
            acc
        })?;
        let l2 = field.l2_norm();
        if !l2.is_finite() || l2 <= 1e-9 {
            return Err(PlateError::InvalidParameter(
                "family member materialized to the zero function".to_string(),
            ));
        }
        Ok(field)
    }
}

/// Reproducible family of smooth test functions standing in for the
/// "for all f" quantifiers.
#[derive(Debug, Clone)]
pub struct TestFamily {
    pub seed: u64,
    pub dim: usize,
    pub members: Vec<MemberSpec>,
}

impl TestFamily {
    pub fn new(seed: u64, dim: usize, count: usize) -> TestFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut members = Vec::with_capacity(count);
        for _ in 0..count {
            let n_terms = rng.gen_range(2..=4usize);
            let mut terms: Vec<GaussianTerm> = Vec::with_capacity(n_terms);
            for _ in 0..n_terms {
                // Distinct modulation modes keep terms from cancelling.
                let mod_mode: Vec<i64> = loop {
                    let candidate: Vec<i64> =
                        (0..dim).map(|_| rng.gen_range(-8i64..=8)).collect();
                    if !terms.iter().any(|t: &GaussianTerm| t.mod_mode == candidate) {
                        break candidate;
                    }
                };
                let modulus = rng.gen_range(0.3..=1.0);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                terms.push(GaussianTerm {
                    coefficient: Complex64::from_polar(modulus, phase),
                    width: rng.gen_range(0.5..=2.0),
                    shift_32nds: (0..dim).map(|_| rng.gen_range(-4i64..=4)).collect(),
                    mod_mode,
                });
            }
            members.push(MemberSpec { terms });
        }
        TestFamily { seed, dim, members }
    }

    pub fn materialize_all(&self, lattice: &Lattice) -> Result<Vec<Field>> {
        if lattice.dim() != self.dim {
            return Err(PlateError::InvalidParameter(format!(
                "family dimension {} does not match lattice dimension {}",
                self.dim,
                lattice.dim()
            )));
        }
        self.members.iter().map(|m| m.materialize(lattice)).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent => write!(f, "Consistent"),
            Verdict::Inconsistent => write!(f, "Inconsistent"),
            Verdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// CSV-serializable record of one study, with the verdict a deterministic
/// function of the rows and the declared thresholds.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub verdict: Verdict,
    pub justification: String,
}

impl ExperimentReport {
    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn verdict_text(&self) -> String {
        let mut out = format!("verdict: {}\njustification: {}\n", self.verdict, self.justification);
        out.push_str("parameters:\n");
        for (k, v) in &self.parameters {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        out
    }

    pub fn parameter(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    fn param_f64(&mut self, key: &str, value: f64) {
        self.parameters.insert(key.to_string(), num(value));
    }
}

/// Merges per-arm reports into one, prefixing rows with an `arm` column.
fn merge_arms(name: &str, arms: Vec<(String, ExperimentReport)>) -> ExperimentReport {
    let mut columns = vec!["arm".to_string()];
    columns.extend(arms[0].1.columns.clone());
    let mut rows = Vec::new();
    let mut parameters = BTreeMap::new();
    let mut verdict = Verdict::Consistent;
    let mut justification = Vec::new();
    for (arm_name, arm) in arms {
        for row in arm.rows {
            let mut tagged = vec![arm_name.clone()];
            tagged.extend(row);
            rows.push(tagged);
        }
        for (k, v) in arm.parameters {
            parameters.insert(format!("{arm_name}.{k}"), v);
        }
        match arm.verdict {
            Verdict::Inconsistent => verdict = Verdict::Inconsistent,
            Verdict::Inconclusive if verdict == Verdict::Consistent => {
                verdict = Verdict::Inconclusive
            }
            _ => {}
        }
        justification.push(format!("{arm_name}: {} ({})", arm.verdict, arm.justification));
    }
    ExperimentReport {
        name: name.to_string(),
        parameters,
        columns,
        rows,
        verdict,
        justification: justification.join("; "),
    }
}

/// Measures ‖H_{σ̃ⱼ}f‖_{M^{p,q}_{s+2j}} / ‖f‖_{M^{p,q}_s} across the family at
/// two grid resolutions. Consistent when the ratio maximum moves by less than
/// 10% under refinement — the desk-scale surrogate for boundedness.
pub fn run_multiplier_bound(
    p: Exponent,
    q: Exponent,
    s: f64,
    j: u8,
    family: &TestFamily,
    lattice: &Lattice,
) -> Result<ExperimentReport> {
    if family.is_empty() {
        return Err(PlateError::InvalidParameter(
            "multiplier bound experiment needs a nonempty family".to_string(),
        ));
    }
    if j > 1 {
        return Err(PlateError::InvalidParameter(format!(
            "symbol index j must be 0 or 1, got {j}"
        )));
    }
    let sigma = if j == 0 {
        Symbol::cos_square()
    } else {
        Symbol::sinc_square()
    };
    let spec_in = MixedNormSpec::modulation(p, q, s)?;
    let spec_out = MixedNormSpec::modulation(p, q, s + 2.0 * j as f64)?;

    let n = lattice.points_per_axis();
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for points in [n / 2, n] {
        let lat = Lattice::new(lattice.dim(), points, lattice.side_length())?;
        let window = Window::gaussian(lat);
        let mut max_ratio = 0.0f64;
        for (idx, f) in family.materialize_all(&lat)?.into_iter().enumerate() {
            let hf = apply_multiplier(&sigma, &f)?;
            let numerator = modulation_norm(&stft(&hf, &window)?, &spec_out)?;
            let denominator = modulation_norm(&stft(&f, &window)?, &spec_in)?;
            let ratio = numerator / denominator;
            max_ratio = max_ratio.max(ratio);
            rows.push(vec![idx.to_string(), points.to_string(), num(ratio)]);
        }
        maxima.push(max_ratio);
    }
    let drift = (maxima[1] - maxima[0]).abs() / maxima[0];
    let threshold = 0.10;
    let verdict = if drift < threshold {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    let mut report = ExperimentReport {
        name: format!("multiplier_bound_j{j}"),
        parameters: BTreeMap::new(),
        columns: vec!["member".into(), "points_per_axis".into(), "ratio".into()],
        rows,
        verdict,
        justification: format!(
            "max ratio {} at N/2 vs {} at N: relative drift {:.3} against threshold {threshold}",
            num(maxima[0]),
            num(maxima[1]),
            drift
        ),
    };
    report.parameters.insert("p".into(), p.to_string());
    report.parameters.insert("q".into(), q.to_string());
    report.param_f64("s", s);
    report.parameters.insert("j".into(), j.to_string());
    report.param_f64("refinement_drift_threshold", threshold);
    report.param_f64("max_ratio_coarse", maxima[0]);
    report.param_f64("max_ratio_fine", maxima[1]);
    report
        .parameters
        .insert("family_seed".into(), family.seed.to_string());
    Ok(report)
}

/// Records ‖σ(λ·)‖ for a geometric ladder of dilations and fits the log-log
/// slope over the top decade. Consistent when the slope lies inside the
/// two-sided dilation bracket
/// [d·μ₂(p′,q′) + min(0,γ) + min(0,−s) − 0.15, d·μ₁(p′,q′) + max(0,γ) + max(0,−s) + 0.15].
pub fn run_dilation_scaling(
    symbol: &Symbol,
    dim: usize,
    spec: &MixedNormSpec,
    lambdas: &[f64],
    l_sym: f64,
    n_sym: usize,
) -> Result<ExperimentReport> {
    if lambdas.len() < 2 {
        return Err(PlateError::InvalidParameter(
            "dilation study needs at least two lambda values".to_string(),
        ));
    }
    for pair in lambdas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(PlateError::InvalidParameter(
                "lambda values must be strictly increasing".to_string(),
            ));
        }
    }
    if lambdas[0] < 1.0 {
        return Err(PlateError::DilationOutOfWindow {
            lambda: lambdas[0],
            detail: "dilation ladder must start at lambda >= 1".to_string(),
        });
    }

    let mut rows = Vec::new();
    let mut log_l = Vec::new();
    let mut log_n = Vec::new();
    for &lambda in lambdas {
        let dilated = symbol.dilated(lambda)?;
        let norm = sampled_symbol_norm(&dilated, dim, spec, l_sym, n_sym)?;
        rows.push(vec![num(lambda), num(norm)]);
        log_l.push(lambda.ln());
        log_n.push(norm.ln());
    }

    // Fit over the top decade of lambda.
    let lambda_max = *lambdas.last().unwrap();
    let cut = lambda_max / 10.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        if lambda >= cut {
            xs.push(log_l[i]);
            ys.push(log_n[i]);
        }
    }
    if xs.len() < 2 {
        let k = lambdas.len();
        xs = log_l[k - 2..].to_vec();
        ys = log_n[k - 2..].to_vec();
    }
    let slope = linear_slope(&xs, &ys);

    let conj = IndexPoint::from_exponents(&spec.p, &spec.q).conjugate();
    let (mu1, mu2) = mu_exponents(&conj);
    let d = dim as f64;
    let margin = 0.15;
    let lo = d * mu2 + spec.gamma.min(0.0) + (-spec.s).min(0.0) - margin;
    let hi = d * mu1 + spec.gamma.max(0.0) + (-spec.s).max(0.0) + margin;
    let verdict = if slope >= lo && slope <= hi {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };

    let mut report = ExperimentReport {
        name: "dilation_scaling".to_string(),
        parameters: BTreeMap::new(),
        columns: vec!["lambda".into(), "norm".into()],
        rows,
        verdict,
        justification: format!(
            "top-decade log-log slope {slope:.4} against bracket [{lo:.4}, {hi:.4}]"
        ),
    };
    report.param_f64("slope", slope);
    report.param_f64("bracket_lo", lo);
    report.param_f64("bracket_hi", hi);
    report.param_f64("mu1_conjugate", mu1);
    report.param_f64("mu2_conjugate", mu2);
    report.param_f64("slope_margin", margin);
    report.param_f64("l_sym", l_sym);
    report.parameters.insert("n_sym".into(), n_sym.to_string());
    report.parameters.insert("p".into(), spec.p.to_string());
    report.parameters.insert("q".into(), spec.q.to_string());
    report.param_f64("s", spec.s);
    report.param_f64("gamma", spec.gamma);
    Ok(report)
}

/// Measures the operator growth of K'(t) and K(t) in M^{p,1}_s against the
/// envelopes (1+t)^{d/2} and t(1+t)^{d/2+1}. Consistent when the normalized
/// curve (measured sup-ratio ÷ envelope) is flat within max/min < 50.
pub fn run_growth_study(
    p: Exponent,
    s: f64,
    family: &TestFamily,
    lattice: &Lattice,
    times: &[f64],
) -> Result<ExperimentReport> {
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0 && t <= 10.0)) {
        return Err(PlateError::InvalidParameter(
            "growth study times must lie in (0, 10]".to_string(),
        ));
    }
    let d = lattice.dim() as f64;
    let spec_s = MixedNormSpec::modulation(p, Exponent::Finite(1.0), s)?;
    let spec_sm2 = MixedNormSpec::modulation(p, Exponent::Finite(1.0), s - 2.0)?;
    let window = Window::gaussian(*lattice);
    let fields = family.materialize_all(lattice)?;
    let denom_kprime: Vec<f64> = fields
        .iter()
        .map(|f| modulation_norm(&stft(f, &window)?, &spec_s))
        .collect::<Result<_>>()?;
    let denom_k: Vec<f64> = fields
        .iter()
        .map(|f| modulation_norm(&stft(f, &window)?, &spec_sm2))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut normalized_kprime = Vec::new();
    let mut normalized_k = Vec::new();
    for &t in times {
        let mut sup_kprime = 0.0f64;
        let mut sup_k = 0.0f64;
        for (i, f) in fields.iter().enumerate() {
            let kp = apply_multiplier(&Symbol::propagator_cos(t), f)?;
            let ratio = modulation_norm(&stft(&kp, &window)?, &spec_s)? / denom_kprime[i];
            sup_kprime = sup_kprime.max(ratio);
            let kf = apply_multiplier(&Symbol::propagator_sinc(t), f)?;
            let ratio = modulation_norm(&stft(&kf, &window)?, &spec_s)? / denom_k[i];
            sup_k = sup_k.max(ratio);
        }
        let env_kprime = (1.0 + t).powf(d / 2.0);
        let env_k = t * (1.0 + t).powf(d / 2.0 + 1.0);
        normalized_kprime.push(sup_kprime / env_kprime);
        normalized_k.push(sup_k / env_k);
        rows.push(vec![
            num(t),
            "kprime".into(),
            num(sup_kprime),
            num(env_kprime),
            num(sup_kprime / env_kprime),
        ]);
        rows.push(vec![
            num(t),
            "k".into(),
            num(sup_k),
            num(env_k),
            num(sup_k / env_k),
        ]);
    }

    let flatness = |v: &[f64]| {
        let max = v.iter().copied().fold(f64::MIN, f64::max);
        let min = v.iter().copied().fold(f64::MAX, f64::min);
        max / min
    };
    let threshold = 50.0;
    let (fk, fkp) = (flatness(&normalized_k), flatness(&normalized_kprime));
    let verdict = if fk < threshold && fkp < threshold {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    let mut report = ExperimentReport {
        name: "growth_study".to_string(),
        parameters: BTreeMap::new(),
        columns: vec![
            "time".into(),
            "operator".into(),
            "sup_ratio".into(),
            "envelope".into(),
            "normalized".into(),
        ],
        rows,
        verdict,
        justification: format!(
            "normalized-curve max/min: K'(t) {fkp:.3}, K(t) {fk:.3}, threshold {threshold}"
        ),
    };
    report.parameters.insert("p".into(), p.to_string());
    report.param_f64("s", s);
    report.param_f64("flatness_threshold", threshold);
    report.param_f64("flatness_kprime", fkp);
    report.param_f64("flatness_k", fk);
    report
        .parameters
        .insert("family_seed".into(), family.seed.to_string());
    Ok(report)
}

/// Checks ‖Π u_i‖_{M^{p,r}_s} ≤ C·Π ‖u_i‖_{M^{p,q}_s} with N/q = N−1+1/r on
/// random tuples, with refinement stability of the worst ratio standing in
/// for a uniform constant.
pub fn run_product_inequality(
    n_factors: usize,
    p: Exponent,
    q: Exponent,
    s: f64,
    family: &TestFamily,
    lattice: &Lattice,
) -> Result<ExperimentReport> {
    if n_factors == 0 {
        return Err(PlateError::InvalidParameter(
            "product inequality needs at least one factor".to_string(),
        ));
    }
    if s < 0.0 {
        return Err(PlateError::InvalidParameter(format!(
            "product inequality requires s >= 0, got {s}"
        )));
    }
    let nf = n_factors as f64;
    let inv_r = nf * q.inv() - (nf - 1.0);
    if !(-1e-12..=1.0 + 1e-12).contains(&inv_r) {
        return Err(PlateError::InadmissibleProduct {
            n_factors,
            q: q.to_string(),
            inv_r,
        });
    }
    let r = if inv_r < 1e-12 {
        Exponent::Infinity
    } else {
        Exponent::finite(1.0 / inv_r)?
    };
    let spec_q = MixedNormSpec::modulation(p, q, s)?;
    let spec_r = MixedNormSpec::modulation(p, r, s)?;

    let mut rng = ChaCha8Rng::seed_from_u64(family.seed.wrapping_add(0x9e3779b9));
    let tuples: Vec<Vec<usize>> = (0..family.len())
        .map(|_| (0..n_factors).map(|_| rng.gen_range(0..family.len())).collect())
        .collect();

    let n = lattice.points_per_axis();
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for points in [n / 2, n] {
        let lat = Lattice::new(lattice.dim(), points, lattice.side_length())?;
        let window = Window::gaussian(lat);
        let fields = family.materialize_all(&lat)?;
        let norms_q: Vec<f64> = fields
            .iter()
            .map(|f| modulation_norm(&stft(f, &window)?, &spec_q))
            .collect::<Result<_>>()?;
        let mut max_ratio = 0.0f64;
        for (ti, tuple) in tuples.iter().enumerate() {
            let mut prod = fields[tuple[0]].clone();
            let mut denom = norms_q[tuple[0]];
            for &idx in &tuple[1..] {
                prod = prod.product(&fields[idx])?;
                denom *= norms_q[idx];
            }
            let numer = modulation_norm(&stft(&prod, &window)?, &spec_r)?;
            let ratio = numer / denom;
            max_ratio = max_ratio.max(ratio);
            let tuple_str = tuple
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join("+");
            rows.push(vec![
                ti.to_string(),
                points.to_string(),
                tuple_str,
                num(ratio),
            ]);
        }
        maxima.push(max_ratio);
    }
    let drift = (maxima[1] - maxima[0]).abs() / maxima[0];
    let threshold = 0.10;
    let verdict = if drift < threshold {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    let mut report = ExperimentReport {
        name: "product_inequality".to_string(),
        parameters: BTreeMap::new(),
        columns: vec![
            "tuple".into(),
            "points_per_axis".into(),
            "members".into(),
            "ratio".into(),
        ],
        rows,
        verdict,
        justification: format!(
            "max ratio {} at N/2 vs {} at N: relative drift {:.3} against threshold {threshold}",
            num(maxima[0]),
            num(maxima[1]),
            drift
        ),
    };
    report.parameters.insert("n_factors".into(), n_factors.to_string());
    report.parameters.insert("p".into(), p.to_string());
    report.parameters.insert("q".into(), q.to_string());
    report.parameters.insert("r".into(), r.to_string());
    report.param_f64("s", s);
    report.param_f64("refinement_drift_threshold", threshold);
    report.param_f64("max_ratio_coarse", maxima[0]);
    report.param_f64("max_ratio_fine", maxima[1]);
    Ok(report)
}

/// Chirp multiplier on W(FL^p, L^q): records
/// R(t) = max over the enriched family of ‖T_τ f‖/‖f‖.
///
/// For p ≠ q (the growth arm) the family is enriched with width-√t Gaussians
/// matched to each chirp time; Consistent means R is monotone and grows by at
/// least a factor 10 over the ladder. For p = q (the control arm) Consistent
/// means R varies by less than a factor 2.
pub fn run_chirp_unboundedness(
    p: Exponent,
    q: Exponent,
    t_values: &[f64],
    family: &TestFamily,
    lattice: &Lattice,
) -> Result<ExperimentReport> {
    if t_values.len() < 2 || t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PlateError::InvalidParameter(
            "chirp study needs an increasing ladder of at least two times".to_string(),
        ));
    }
    if t_values[0] < 0.0 {
        return Err(PlateError::InvalidParameter(
            "chirp times must be nonnegative".to_string(),
        ));
    }
    let control = p == q;
    let spec = MixedNormSpec::wiener(p, q, 0.0, 0.0)?;
    let window = Window::gaussian(*lattice);

    let mut fields: Vec<(String, Field)> = family
        .materialize_all(lattice)?
        .into_iter()
        .enumerate()
        .map(|(i, f)| (format!("base{i}"), f))
        .collect();
    // Chirp-matched members: Gaussians of width √t for each ladder time.
    for &t in t_values {
        if t == 0.0 {
            continue;
        }
        let width = t.sqrt();
        let f = Field::gaussian(*lattice, &lattice.center(), width)?;
        fields.push((format!("matched_w{width}"), f));
    }

    let denominators: Vec<f64> = fields
        .iter()
        .map(|(_, f)| wiener_norm(&stft(f, &window)?, &spec))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut r_curve = Vec::new();
    for &t in t_values {
        let chirp = Symbol::chirp(t);
        let mut r_max = 0.0f64;
        for ((label, f), denom) in fields.iter().zip(&denominators) {
            let tf = apply_multiplier(&chirp, f)?;
            let ratio = wiener_norm(&stft(&tf, &window)?, &spec)? / denom;
            r_max = r_max.max(ratio);
            rows.push(vec![num(t), label.clone(), num(ratio)]);
        }
        r_curve.push(r_max);
    }

    let growth_factor = r_curve.last().unwrap() / r_curve[0];
    let monotone = r_curve.windows(2).all(|w| w[1] >= w[0]);
    let spread = r_curve.iter().copied().fold(f64::MIN, f64::max)
        / r_curve.iter().copied().fold(f64::MAX, f64::min);
    let (verdict, justification) = if control {
        let ok = spread < 2.0;
        (
            if ok { Verdict::Consistent } else { Verdict::Inconsistent },
            format!("control arm (p = q): R spread {spread:.6} against threshold 2"),
        )
    } else {
        let ok = monotone && growth_factor >= 10.0;
        (
            if ok { Verdict::Consistent } else { Verdict::Inconsistent },
            format!(
                "growth arm (p ≠ q): R({}) / R({}) = {growth_factor:.3} against threshold 10, monotone = {monotone}",
                t_values.last().unwrap(),
                t_values[0]
            ),
        )
    };

    let mut report = ExperimentReport {
        name: if control {
            "chirp_control".to_string()
        } else {
            "chirp_growth".to_string()
        },
        parameters: BTreeMap::new(),
        columns: vec!["t".into(), "member".into(), "ratio".into()],
        rows,
        verdict,
        justification,
    };
    report.parameters.insert("p".into(), p.to_string());
    report.parameters.insert("q".into(), q.to_string());
    report.param_f64("growth_threshold", 10.0);
    report.param_f64("control_spread_threshold", 2.0);
    for (t, r) in t_values.iter().zip(&r_curve) {
        report.param_f64(&format!("R(t={t})"), *r);
    }
    report.param_f64("growth_factor", growth_factor);
    report
        .parameters
        .insert("monotone".into(), monotone.to_string());
    report
        .parameters
        .insert("family_seed".into(), family.seed.to_string());
    Ok(report)
}

/// Shared inputs of the packaged experiments.
#[derive(Debug, Clone)]
pub struct ExperimentEnv {
    pub lattice: Lattice,
    pub seed: u64,
    pub family_size: usize,
}

impl ExperimentEnv {
    fn family(&self) -> TestFamily {
        TestFamily::new(self.seed, self.lattice.dim(), self.family_size)
    }
}

/// Multiplier boundedness study: σ̃₀ and σ̃₁ arms at the requested indices
/// plus the unimodular Plancherel control at p = q = 2, s = 0.
pub fn multiplier_experiment(
    env: &ExperimentEnv,
    p: Exponent,
    q: Exponent,
    s: f64,
) -> Result<ExperimentReport> {
    let family = env.family();
    let j0 = run_multiplier_bound(p, q, s, 0, &family, &env.lattice)?;
    let j1 = run_multiplier_bound(p, q, s, 1, &family, &env.lattice)?;
    let control = run_multiplier_bound(
        Exponent::Finite(2.0),
        Exponent::Finite(2.0),
        0.0,
        0,
        &family,
        &env.lattice,
    )?;
    let mut merged = merge_arms(
        "multiplier",
        vec![
            ("cos_square".to_string(), j0),
            ("sinc_square".to_string(), j1),
            ("plancherel_control".to_string(), control),
        ],
    );
    // The control arm additionally obeys the exact Plancherel bound: every
    // ratio with |σ̃₀| ≤ 1 on M² stays at or below 1.
    let control_max: f64 = merged
        .parameter("plancherel_control.max_ratio_fine")
        .unwrap()
        .parse()
        .unwrap();
    if control_max > 1.0 + 1e-6 {
        merged.verdict = Verdict::Inconsistent;
        merged.justification = format!(
            "{}; plancherel control exceeded 1: {control_max}",
            merged.justification
        );
    }
    merged.param_f64("plancherel_control_cap", 1.0 + 1e-6);
    Ok(merged)
}

/// Default grid for symbol-norm evaluation in the dilation study: fine enough
/// to resolve a width-1/64 Gaussian, small enough for the full transform
/// matrix.
pub const DILATION_SYMBOL_SIDE: f64 = 8.0;
pub const DILATION_SYMBOL_POINTS: usize = 2048;

/// Dilation-scaling study: σ̃₀ in W(FL¹,L^∞), a Gaussian control in
/// W(FL²,L²) = M² (slope exactly −d/2), and a constant-symbol control
/// (slope 0).
pub fn dilation_experiment(env: &ExperimentEnv, lambdas: &[f64]) -> Result<ExperimentReport> {
    let dim = env.lattice.dim();
    let w_l1_linf = MixedNormSpec::wiener(Exponent::Finite(1.0), Exponent::Infinity, 0.0, 0.0)?;
    let m2 = MixedNormSpec::wiener(Exponent::Finite(2.0), Exponent::Finite(2.0), 0.0, 0.0)?;

    let chirp_arm = run_dilation_scaling(
        &Symbol::cos_square(),
        dim,
        &w_l1_linf,
        lambdas,
        DILATION_SYMBOL_SIDE,
        DILATION_SYMBOL_POINTS,
    )?;
    let gaussian = Symbol::custom(|xi| {
        let r2: f64 = xi.iter().map(|c| c * c).sum();
        Complex64::new((-std::f64::consts::PI * r2).exp(), 0.0)
    });
    let mut gauss_arm = run_dilation_scaling(
        &gaussian,
        dim,
        &m2,
        lambdas,
        DILATION_SYMBOL_SIDE,
        DILATION_SYMBOL_POINTS,
    )?;
    // The L² change of variables pins this arm to slope −d/2 exactly; tighten
    // the generic bracket to ±0.02 around it.
    let slope: f64 = gauss_arm.parameter("slope").unwrap().parse().unwrap();
    let target = -(dim as f64) / 2.0;
    if (slope - target).abs() > 0.02 {
        gauss_arm.verdict = Verdict::Inconsistent;
        gauss_arm.justification = format!(
            "gaussian control slope {slope:.4} deviates from {target} by more than 0.02"
        );
    }
    gauss_arm.param_f64("control_slope_target", target);
    gauss_arm.param_f64("control_slope_margin", 0.02);

    let mut const_arm = run_dilation_scaling(
        &Symbol::identity(),
        dim,
        &w_l1_linf,
        lambdas,
        DILATION_SYMBOL_SIDE,
        DILATION_SYMBOL_POINTS,
    )?;
    let slope: f64 = const_arm.parameter("slope").unwrap().parse().unwrap();
    if slope.abs() > 1e-3 {
        const_arm.verdict = Verdict::Inconsistent;
        const_arm.justification =
            format!("constant symbol must be dilation invariant, slope {slope}");
    }
    const_arm.param_f64("control_slope_margin", 1e-3);

    let mut merged = merge_arms(
        "dilation",
        vec![
            ("cos_square".to_string(), chirp_arm),
            ("gaussian_control".to_string(), gauss_arm),
            ("constant_control".to_string(), const_arm),
        ],
    );
    merged.name = "dilation".to_string();
    Ok(merged)
}

/// Growth study over p ∈ {1, 2, ∞} at s = 0.
pub fn growth_experiment(env: &ExperimentEnv, times: &[f64]) -> Result<ExperimentReport> {
    let family = env.family();
    let mut arms = Vec::new();
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        let arm = run_growth_study(p, 0.0, &family, &env.lattice, times)?;
        arms.push((format!("p{p}"), arm));
    }
    let mut merged = merge_arms("growth", arms);
    merged.name = "growth".to_string();
    Ok(merged)
}

/// Product estimate in the cubic configuration N = 3, q = r = 1 plus the
/// trivial single-factor control.
pub fn product_experiment(env: &ExperimentEnv, p: Exponent, s: f64) -> Result<ExperimentReport> {
    let family = env.family();
    let cubic = run_product_inequality(
        3,
        p,
        Exponent::Finite(1.0),
        s,
        &family,
        &env.lattice,
    )?;
    let mut single = run_product_inequality(
        1,
        p,
        Exponent::Finite(2.0),
        s,
        &family,
        &env.lattice,
    )?;
    // One factor with q = r leaves the ratio at exactly 1.
    let fine: f64 = single.parameter("max_ratio_fine").unwrap().parse().unwrap();
    if (fine - 1.0).abs() > 1e-12 {
        single.verdict = Verdict::Inconsistent;
        single.justification = format!("single-factor ratio must equal 1, got {fine}");
    }
    let mut merged = merge_arms(
        "product",
        vec![
            ("cubic".to_string(), cubic),
            ("single_factor_control".to_string(), single),
        ],
    );
    merged.name = "product".to_string();
    Ok(merged)
}

/// Chirp dichotomy: growth arm at the requested (p, q), control arm at
/// p = q = 2, same ladder.
pub fn chirp_experiment(
    env: &ExperimentEnv,
    p: Exponent,
    q: Exponent,
    t_values: &[f64],
) -> Result<ExperimentReport> {
    if p == q {
        return Err(PlateError::InvalidParameter(
            "the chirp growth arm needs p != q (the p = q control runs alongside)".to_string(),
        ));
    }
    let family = env.family();
    let growth = run_chirp_unboundedness(p, q, t_values, &family, &env.lattice)?;
    let control = run_chirp_unboundedness(
        Exponent::Finite(2.0),
        Exponent::Finite(2.0),
        t_values,
        &family,
        &env.lattice,
    )?;
    let mut merged = merge_arms(
        "chirp",
        vec![
            ("growth".to_string(), growth),
            ("control".to_string(), control),
        ],
    );
    merged.name = "chirp".to_string();
    Ok(merged)
}
