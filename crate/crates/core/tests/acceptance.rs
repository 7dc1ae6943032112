//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantities and the pinned tolerance.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see every line.

use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;

use platelab::experiments::{
    dilation_experiment, multiplier_experiment, run_chirp_unboundedness, run_growth_study,
    ExperimentEnv, TestFamily,
};
use platelab::gabor::{stft, Window};
use platelab::lattice::{forward_transform, inverse_transform, Field, Lattice};
use platelab::mixed_norms::{
    exact, modulation_norm, mu_exponents, wiener_norm, Exponent, IndexPoint, MixedNormSpec,
};
use platelab::plate_solver::{
    check_power_law_admissible, duhamel, energy, picard_solve, propagate_linear, time_derivative_linear,
    Nonlinearity, SolverConfig,
};

const SEED: u64 = 7;

fn report(number: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {number:2} {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// O(N²) direct-summation DFT oracle with the h^d scaling.
fn direct_forward(f: &Field) -> Vec<Complex64> {
    let lat = f.lattice();
    let n = lat.points_per_axis();
    let h_d = lat.spatial_cell();
    let mut out = vec![Complex64::new(0.0, 0.0); lat.num_points()];
    for (m, slot) in out.iter_mut().enumerate() {
        let midx = lat.multi_index(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &fj) in f.samples().iter().enumerate() {
            let jidx = lat.multi_index(j);
            let dot: f64 = jidx
                .iter()
                .zip(&midx)
                .map(|(&ja, &ma)| (ja * ma) as f64)
                .sum();
            acc += fj * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * dot / n as f64);
        }
        *slot = acc * h_d;
    }
    out
}

fn member_fields(lat: Lattice, count: usize) -> Vec<Field> {
    TestFamily::new(SEED, lat.dim(), count)
        .materialize_all(&lat)
        .unwrap()
}

#[test]
fn criterion_01_fft_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [4usize, 8, 16, 32, 64] {
        let lat = Lattice::new(1, n, 9.0).unwrap();
        let f = Field::from_fn(lat, |x| {
            Complex64::new((2.7 * x[0]).sin() + 0.3, (1.3 * x[0] - 0.8).cos())
        })
        .unwrap();
        let fast = forward_transform(&f);
        let slow = direct_forward(&f);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.samples().iter().zip(&slow) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    for n in [4usize, 8, 16] {
        let lat = Lattice::new(2, n, 5.0).unwrap();
        let f = Field::from_fn(lat, |x| {
            Complex64::new((3.1 * x[0] - x[1]).sin(), (x[0] * x[1] + 0.3).cos())
        })
        .unwrap();
        let fast = forward_transform(&f);
        let slow = direct_forward(&f);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.samples().iter().zip(&slow) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-12 && elapsed < 5.0;
    report(
        1,
        "fft-oracle-equivalence",
        pass,
        &format!("worst relative deviation {worst:.2e} (tol 1e-12), runtime {elapsed:.2}s (cap 5s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_gaussian_stft_closed_form() {
    let start = Instant::now();
    let lat = Lattice::new(1, 512, 32.0).unwrap();
    let f = Field::gaussian(lat, &[0.0], 1.0).unwrap();
    let g = Window::gaussian(lat);
    let m = stft(&f, &g).unwrap();
    let c = lat.side_length() / 2.0;
    let mut worst = 0.0f64;
    for p in 0..m.num_points() {
        let x = lat.position(p)[0];
        for w in 0..m.num_points() {
            let omega = lat.frequency(w)[0];
            let expected = 0.5f64.sqrt()
                * (-std::f64::consts::PI * ((x - c) * (x - c) + omega * omega) / 2.0).exp();
            worst = worst.max((m.value(p, w).norm() - expected).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-6 && elapsed < 10.0;
    report(
        2,
        "gaussian-stft-closed-form",
        pass,
        &format!("worst absolute deviation {worst:.2e} (tol 1e-6), runtime {elapsed:.2}s (cap 10s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_stft_parseval() {
    let lat = Lattice::new(1, 256, 32.0).unwrap();
    let g = Window::gaussian(lat);
    let mut worst = 0.0f64;
    for f in member_fields(lat, 20) {
        let m = stft(&f, &g).unwrap();
        let lhs = m.energy();
        let rhs = g.l2_norm().powi(2) * f.l2_norm().powi(2);
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    let pass = worst < 1e-8;
    report(
        3,
        "stft-parseval",
        pass,
        &format!("worst relative deviation {worst:.2e} over 20 members (tol 1e-8)"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_diagonal_wiener_equals_modulation() {
    let lat = Lattice::new(1, 256, 32.0).unwrap();
    let g = Window::gaussian(lat);
    let mut worst = 0.0f64;
    for f in member_fields(lat, 10) {
        let m = stft(&f, &g).unwrap();
        for p in [
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
            Exponent::Finite(3.0),
            Exponent::Infinity,
        ] {
            let ms = MixedNormSpec::modulation(p, p, 0.0).unwrap();
            let ws = MixedNormSpec::wiener(p, p, 0.0, 0.0).unwrap();
            let a = modulation_norm(&m, &ms).unwrap();
            let b = wiener_norm(&m, &ws).unwrap();
            worst = worst.max((a - b).abs() / a);
        }
    }
    let pass = worst <= 1e-13;
    report(
        4,
        "diagonal-norms-coincide",
        pass,
        &format!("worst relative gap {worst:.2e} for p in {{1,2,3,inf}} on 10 members (tol 1e-13)"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_mu_exponent_table() {
    // (p,q) = (∞,1) must give exactly (1, 0).
    let (m1, m2) = mu_exponents(&IndexPoint::new(0.0, 1.0).unwrap());
    let table_ok = m1 == 1.0 && m2 == 0.0;

    // Branch consistency and cover on the 101×101 rational grid.
    let mut grid_ok = true;
    for i in 0..=100i64 {
        for j in 0..=100i64 {
            let a = Ratio::new(i, 100);
            let b = Ratio::new(j, 100);
            let values = exact::branch_values(a, b);
            let starred = exact::starred_regions(a, b);
            let unstarred = exact::unstarred_regions(a, b);
            for mask in [starred, unstarred] {
                let active: Vec<_> = mask
                    .iter()
                    .zip(&values)
                    .filter(|(m, _)| **m)
                    .map(|(_, v)| *v)
                    .collect();
                if active.is_empty() || active.iter().any(|v| *v != active[0]) {
                    grid_ok = false;
                }
            }
        }
    }
    let pass = table_ok && grid_ok;
    report(
        5,
        "mu-exponent-table",
        pass,
        &format!("mu(inf,1) = ({m1}, {m2}) expected (1, 0); 101x101 branch consistency = {grid_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_linear_propagator_exactness() {
    let lat = Lattice::new(1, 256, 32.0).unwrap();

    // Single-mode closed forms.
    let mut worst_mode = 0.0f64;
    for (k, t) in [(1i64, 0.3), (5, 1.7), (20, 0.05)] {
        let u0 = Field::plane_wave(lat, &[k]).unwrap();
        let xi = k as f64 * lat.frequency_step();
        let a = 4.0 * std::f64::consts::PI.powi(2) * xi * xi;
        let got = propagate_linear(&u0, &Field::zero(lat), t).unwrap();
        let expected = u0.scale(Complex64::new((a * t).cos(), 0.0));
        worst_mode = worst_mode.max(got.sub(&expected).unwrap().sup_norm());
        let got = propagate_linear(&Field::zero(lat), &u0, t).unwrap();
        let expected = u0.scale(Complex64::new((a * t).sin() / a, 0.0));
        worst_mode = worst_mode.max(got.sub(&expected).unwrap().sup_norm());
    }

    // Group law.
    let members = member_fields(lat, 2);
    let (u0, u1) = (&members[0], &members[1]);
    let (t1, t2) = (0.6, 0.9);
    let direct = propagate_linear(u0, u1, t1 + t2).unwrap();
    let mid = propagate_linear(u0, u1, t1).unwrap();
    let mid_t = time_derivative_linear(u0, u1, t1).unwrap();
    let composed = propagate_linear(&mid, &mid_t, t2).unwrap();
    let group_err = composed.sub(&direct).unwrap().sup_norm();

    // Energy conservation over [0, 10].
    let e0 = energy(u0, u1).unwrap();
    let mut worst_energy = 0.0f64;
    for &t in &[0.5, 1.0, 2.5, 5.0, 7.5, 10.0] {
        let u = propagate_linear(u0, u1, t).unwrap();
        let ut = time_derivative_linear(u0, u1, t).unwrap();
        worst_energy = worst_energy.max((energy(&u, &ut).unwrap() - e0).abs() / e0);
    }

    let pass = worst_mode < 1e-12 && group_err < 1e-10 && worst_energy < 1e-10;
    report(
        6,
        "linear-propagator-exactness",
        pass,
        &format!(
            "single-mode error {worst_mode:.2e} (tol 1e-12), group law {group_err:.2e} (tol 1e-10), \
             energy drift {worst_energy:.2e} (tol 1e-10)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_duhamel_quadrature_order() {
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    let t = 1.0;
    let mut ratios = Vec::new();

    // k ≠ 0: closed form (1 − cos(a t))/a².
    let k = 2i64;
    let xi = k as f64 * lat.frequency_step();
    let a = 4.0 * std::f64::consts::PI.powi(2) * xi * xi;
    let closed = (1.0 - (a * t).cos()) / (a * a);
    let mode = Field::plane_wave(lat, &[k]).unwrap();
    let mut errors = Vec::new();
    for &m in &[33usize, 65, 129] {
        let g = vec![mode.clone(); m];
        let out = duhamel(&g, t / (m - 1) as f64, m - 1).unwrap();
        let expected = mode.scale(Complex64::new(closed, 0.0));
        errors.push(out.sub(&expected).unwrap().sup_norm());
    }
    for pair in errors.windows(2) {
        ratios.push(pair[0] / pair[1]);
    }

    // k = 0 with g(τ) = (1+τ)·1: ∫₀^t (t−τ)(1+τ) dτ = t²/2 + t³/6. The
    // τ-dependence makes the trapezoid error genuinely O(M⁻²) (a τ-constant
    // integrand is integrated exactly because the kernel t−τ is linear).
    let ones = Field::constant(lat, Complex64::new(1.0, 0.0));
    let mut errors = Vec::new();
    for &m in &[33usize, 65, 129] {
        let step = t / (m - 1) as f64;
        let g: Vec<Field> = (0..m)
            .map(|i| ones.scale(Complex64::new(1.0 + i as f64 * step, 0.0)))
            .collect();
        let out = duhamel(&g, step, m - 1).unwrap();
        let expected = ones.scale(Complex64::new(t * t / 2.0 + t * t * t / 6.0, 0.0));
        errors.push(out.sub(&expected).unwrap().sup_norm());
    }
    for pair in errors.windows(2) {
        ratios.push(pair[0] / pair[1]);
    }

    let pass = ratios.iter().all(|r| (3.7..=4.3).contains(r));
    report(
        7,
        "duhamel-quadrature-order",
        pass,
        &format!("error ratios under M doubling: {ratios:.3?} (required 4.0 ± 0.3)"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_picard_contraction() {
    let start = Instant::now();
    let lat = Lattice::new(1, 128, 32.0).unwrap();
    let u0 = Field::gaussian(lat, &lat.center(), 1.0)
        .unwrap()
        .scale(Complex64::new(0.5, 0.0));
    let u1 = Field::zero(lat);
    let nl = Nonlinearity::power_law(Complex64::new(1e-3, 0.0), 1);
    let cfg = SolverConfig::new(0.1, 65).unwrap();
    let traj = picard_solve(&u0, &u1, &nl, &cfg).unwrap();

    let mut geometric = true;
    for pair in traj.increments.windows(2).skip(1) {
        if pair[0] >= cfg.picard_tol && pair[1] / pair[0] >= 0.5 {
            geometric = false;
        }
    }

    // Fixed-point residual through the public Duhamel operator.
    let f_nodes: Vec<Field> = traj.states.iter().map(|u| nl.apply(u)).collect();
    let mut residual = 0.0f64;
    for m in 0..cfg.time_nodes {
        let lin = if m == 0 {
            u0.clone()
        } else {
            propagate_linear(&u0, &u1, cfg.node_time(m)).unwrap()
        };
        let rhs = lin
            .add(&duhamel(&f_nodes, cfg.time_step(), m).unwrap())
            .unwrap();
        residual = residual.max(traj.states[m].sub(&rhs).unwrap().sup_norm());
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = traj.converged
        && traj.iterations_used <= 15
        && geometric
        && residual < 1e-9
        && elapsed < 60.0;
    report(
        8,
        "picard-contraction",
        pass,
        &format!(
            "converged={} in {} iterations (cap 15), geometric={geometric}, increments {:?}, \
             residual {residual:.2e} (tol 1e-9), runtime {elapsed:.2}s (cap 60s)",
            traj.converged,
            traj.iterations_used,
            traj.increments
                .iter()
                .map(|x| format!("{x:.2e}"))
                .collect::<Vec<_>>()
        ),
    );
    assert!(pass);
}

/// Classical RK4 on the first-order system in Fourier variables:
/// v = û, w = û_t, v' = w, w' = −a²v + F̂(u).
fn rk4_reference(
    u0: &Field,
    u1: &Field,
    nl: &Nonlinearity,
    horizon: f64,
    steps: usize,
) -> Field {
    let lat = *u0.lattice();
    let n = lat.num_points();
    let a2: Vec<f64> = (0..n)
        .map(|i| {
            let a = 4.0 * std::f64::consts::PI.powi(2) * lat.frequency_norm_sq(i);
            a * a
        })
        .collect();
    let mut v = forward_transform(u0).into_samples();
    let mut w = forward_transform(u1).into_samples();
    let dt = horizon / steps as f64;

    let rhs = |v: &[Complex64], w: &[Complex64]| -> (Vec<Complex64>, Vec<Complex64>) {
        let u = inverse_transform(&Field::new(lat, v.to_vec()).unwrap());
        let fu = forward_transform(&nl.apply(&u)).into_samples();
        let dv = w.to_vec();
        let dw: Vec<Complex64> = (0..v.len()).map(|i| -a2[i] * v[i] + fu[i]).collect();
        (dv, dw)
    };

    for _ in 0..steps {
        let (k1v, k1w) = rhs(&v, &w);
        let v2: Vec<Complex64> = (0..n).map(|i| v[i] + 0.5 * dt * k1v[i]).collect();
        let w2: Vec<Complex64> = (0..n).map(|i| w[i] + 0.5 * dt * k1w[i]).collect();
        let (k2v, k2w) = rhs(&v2, &w2);
        let v3: Vec<Complex64> = (0..n).map(|i| v[i] + 0.5 * dt * k2v[i]).collect();
        let w3: Vec<Complex64> = (0..n).map(|i| w[i] + 0.5 * dt * k2w[i]).collect();
        let (k3v, k3w) = rhs(&v3, &w3);
        let v4: Vec<Complex64> = (0..n).map(|i| v[i] + dt * k3v[i]).collect();
        let w4: Vec<Complex64> = (0..n).map(|i| w[i] + dt * k3w[i]).collect();
        let (k4v, k4w) = rhs(&v4, &w4);
        for i in 0..n {
            v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            w[i] += dt / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
        }
    }
    inverse_transform(&Field::new(lat, v).unwrap())
}

#[test]
fn criterion_09_solver_oracle_equivalence() {
    let lat = Lattice::new(1, 128, 32.0).unwrap();
    let u0 = Field::gaussian(lat, &lat.center(), 1.0)
        .unwrap()
        .scale(Complex64::new(0.5, 0.0));
    let u1 = Field::zero(lat);
    let cfg = SolverConfig::new(0.1, 65).unwrap();
    // λ = 1e-3 as in criterion 8, plus the stronger λ = 1e-2 cross-check.
    let mut gaps = Vec::new();
    for lambda in [1e-3, 1e-2] {
        let nl = Nonlinearity::power_law(Complex64::new(lambda, 0.0), 1);
        let traj = picard_solve(&u0, &u1, &nl, &cfg).unwrap();
        let reference = rk4_reference(&u0, &u1, &nl, 0.1, 2048);
        gaps.push(
            traj.states[cfg.time_nodes - 1]
                .sub(&reference)
                .unwrap()
                .sup_norm(),
        );
    }
    let pass = gaps.iter().all(|g| *g < 1e-6);
    report(
        9,
        "solver-oracle-equivalence",
        pass,
        &format!(
            "Picard vs RK4(2048 steps) sup-norm gap at t = 0.1: {:.2e} (λ=1e-3), {:.2e} (λ=1e-2), tol 1e-6",
            gaps[0], gaps[1]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_growth_envelope() {
    let lat = Lattice::new(1, 256, 32.0).unwrap();
    let family = TestFamily::new(SEED, 1, 10);
    let times = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
    let mut pass = true;
    let mut details = Vec::new();
    for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
        let rep = run_growth_study(p, 0.0, &family, &lat, &times).unwrap();
        let fk: f64 = rep.parameter("flatness_k").unwrap().parse().unwrap();
        let fkp: f64 = rep.parameter("flatness_kprime").unwrap().parse().unwrap();
        if fk >= 50.0 || fkp >= 50.0 {
            pass = false;
        }
        details.push(format!("p={p}: K' {fkp:.1}, K {fk:.1}"));
    }
    report(
        10,
        "growth-envelope",
        pass,
        &format!(
            "normalized-curve max/min (threshold 50): {}",
            details.join("; ")
        ),
    );
    assert!(
        pass,
        "the K(t) arm exceeds the flatness threshold at p in {{2, inf}}: measured growth \
         follows the discrete zero-mode law ~t while the envelope t(1+t)^{{3/2}} grows faster, \
         so the normalized curve spans more than 50x at desk scale"
    );
}

#[test]
fn criterion_11_dilation_bracket() {
    let env = ExperimentEnv {
        lattice: Lattice::new(1, 256, 32.0).unwrap(),
        seed: SEED,
        family_size: 4,
    };
    let lambdas = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let rep = dilation_experiment(&env, &lambdas).unwrap();
    let slope: f64 = rep.parameter("cos_square.slope").unwrap().parse().unwrap();
    let gauss: f64 = rep
        .parameter("gaussian_control.slope")
        .unwrap()
        .parse()
        .unwrap();
    let pass = (-0.15..=1.15).contains(&slope) && (gauss + 0.5).abs() <= 0.02;
    report(
        11,
        "dilation-bracket",
        pass,
        &format!(
            "cos-square slope {slope:.4} in [-0.15, 1.15]; gaussian control slope {gauss:.4} \
             within -0.5 ± 0.02"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_12_chirp_dichotomy() {
    let start = Instant::now();
    let lat = Lattice::new(1, 512, 128.0).unwrap();
    let family = TestFamily::new(SEED, 1, 6);
    let t_values = [1.0, 4.0, 16.0, 64.0];

    let growth = run_chirp_unboundedness(
        Exponent::Infinity,
        Exponent::Finite(1.0),
        &t_values,
        &family,
        &lat,
    )
    .unwrap();
    let factor: f64 = growth.parameter("growth_factor").unwrap().parse().unwrap();
    let monotone = growth.parameter("monotone").unwrap() == "true";

    let control = run_chirp_unboundedness(
        Exponent::Finite(2.0),
        Exponent::Finite(2.0),
        &t_values,
        &family,
        &lat,
    )
    .unwrap();
    let mut control_ok = true;
    for &t in &t_values {
        let r: f64 = control
            .parameter(&format!("R(t={t})"))
            .unwrap()
            .parse()
            .unwrap();
        if (r - 1.0).abs() > 1e-6 {
            control_ok = false;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let pass = factor >= 10.0 && monotone && control_ok && elapsed < 300.0;
    report(
        12,
        "chirp-dichotomy",
        pass,
        &format!(
            "growth arm R(64)/R(1) = {factor:.2} (threshold 10), monotone = {monotone}; \
             control arm within 1e-6 of 1 = {control_ok}; runtime {elapsed:.1}s (cap 300s)"
        ),
    );
    assert!(
        pass,
        "growth-arm quotient {factor:.2} < 10: the chirp ratio follows the sharp one-dimensional \
         law ~(1+t^2)^(1/4), which caps R(64)/R(1) at (4097/2)^(1/4) ≈ 6.7 for any family, so \
         the factor-10 threshold is unattainable at d = 1 (monotone growth itself holds: {monotone})"
    );
}

#[test]
fn criterion_13_power_law_admissibility() {
    let (a, _) = check_power_law_admissible(&Exponent::Finite(2.0), &Exponent::Finite(1.0), 2.0, 5, 3);
    let (b, _) = check_power_law_admissible(&Exponent::Finite(2.0), &Exponent::Finite(2.0), 2.0, 1, 1);
    let (c, _) = check_power_law_admissible(&Exponent::Finite(2.0), &Exponent::Finite(2.0), 2.0, 1, 2);
    let pass = a && b && !c;
    report(
        13,
        "power-law-admissibility",
        pass,
        &format!("q=1 any k,d -> {a} (want true); d=1,k=1,q=2 -> {b} (want true); d=2,k=1,q=2 -> {c} (want false)"),
    );
    assert!(pass);
}

#[test]
fn criterion_14_experiment_determinism() {
    let env = ExperimentEnv {
        lattice: Lattice::new(1, 128, 32.0).unwrap(),
        seed: SEED,
        family_size: 4,
    };
    let a = multiplier_experiment(&env, Exponent::Finite(2.0), Exponent::Finite(1.0), 0.0).unwrap();
    let b = multiplier_experiment(&env, Exponent::Finite(2.0), Exponent::Finite(1.0), 0.0).unwrap();
    let pass = a.csv() == b.csv() && a.verdict_text() == b.verdict_text();
    report(
        14,
        "experiment-determinism",
        pass,
        &format!(
            "two runs with seed {SEED}: identical CSV bytes = {}, identical verdict files = {}",
            a.csv() == b.csv(),
            a.verdict_text() == b.verdict_text(),
        ),
    );
    assert!(pass);
}
