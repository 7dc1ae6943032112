//! Property-based invariants of the transform and norm layers.

use num_complex::Complex64;
use proptest::prelude::*;

use platelab::gabor::{stft, Window};
use platelab::lattice::{forward_transform, inverse_transform, Field, Lattice};
use platelab::mixed_norms::{
    exact, modulation_norm, mu_exponents, wiener_norm, Exponent, IndexPoint, MixedNormSpec,
};
use platelab::multipliers::{apply_multiplier, Symbol};
use platelab::numerics::pairwise_sum;

fn complex_samples(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(
        (-100i32..=100, -100i32..=100)
            .prop_map(|(re, im)| Complex64::new(re as f64 / 25.0, im as f64 / 25.0)),
        n,
    )
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::Finite(1.0)),
        Just(Exponent::Finite(2.0)),
        Just(Exponent::Finite(3.0)),
        Just(Exponent::Infinity),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_inverts_forward(samples in complex_samples(32)) {
        let lat = Lattice::new(1, 32, 11.0).unwrap();
        let f = Field::new(lat, samples).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        let err = back.sub(&f).unwrap().sup_norm();
        prop_assert!(err <= 1e-12 * f.sup_norm().max(1e-300));
    }

    #[test]
    fn round_trip_inverts_forward_2d(samples in complex_samples(64)) {
        let lat = Lattice::new(2, 8, 3.0).unwrap();
        let f = Field::new(lat, samples).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        let err = back.sub(&f).unwrap().sup_norm();
        prop_assert!(err <= 1e-12 * f.sup_norm().max(1e-300));
    }

    #[test]
    fn parseval_identity(samples in complex_samples(64)) {
        let lat = Lattice::new(1, 64, 5.0).unwrap();
        let f = Field::new(lat, samples).unwrap();
        let fh = forward_transform(&f);
        let spatial: Vec<f64> = f.samples().iter().map(|z| z.norm_sqr()).collect();
        let freq: Vec<f64> = fh.samples().iter().map(|z| z.norm_sqr()).collect();
        let lhs = lat.spatial_cell() * pairwise_sum(&spatial);
        let rhs = lat.frequency_cell() * pairwise_sum(&freq);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn stft_linearity(
        sa in complex_samples(32),
        sb in complex_samples(32),
        are in -40i32..=40, aim in -40i32..=40,
    ) {
        let lat = Lattice::new(1, 32, 16.0).unwrap();
        let g = Window::gaussian(lat);
        let a = Complex64::new(are as f64 / 10.0, aim as f64 / 10.0);
        let fa = Field::new(lat, sa).unwrap();
        let fb = Field::new(lat, sb).unwrap();
        let combo = fa.scale(a).add(&fb).unwrap();
        let lhs = stft(&combo, &g).unwrap();
        let ma = stft(&fa, &g).unwrap();
        let mb = stft(&fb, &g).unwrap();
        let scale = lhs.values().iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..lhs.values().len() {
            let rhs = a * ma.values()[i] + mb.values()[i];
            prop_assert!((lhs.values()[i] - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn modulation_norm_homogeneity(
        samples in complex_samples(32),
        cre in -40i32..=40, cim in -40i32..=40,
        p in exponent(), q in exponent(),
    ) {
        let lat = Lattice::new(1, 32, 16.0).unwrap();
        let g = Window::gaussian(lat);
        let f = Field::new(lat, samples).unwrap();
        let c = Complex64::new(cre as f64 / 10.0, cim as f64 / 10.0);
        let spec = MixedNormSpec::modulation(p, q, 0.5).unwrap();
        let base = modulation_norm(&stft(&f, &g).unwrap(), &spec).unwrap();
        let scaled = modulation_norm(&stft(&f.scale(c), &g).unwrap(), &spec).unwrap();
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-12 * scaled.max(1e-300));
    }

    #[test]
    fn diagonal_norms_commute(samples in complex_samples(32), p in exponent()) {
        let lat = Lattice::new(1, 32, 16.0).unwrap();
        let g = Window::gaussian(lat);
        let f = Field::new(lat, samples).unwrap();
        let m = stft(&f, &g).unwrap();
        let ms = MixedNormSpec::modulation(p, p, 0.0).unwrap();
        let ws = MixedNormSpec::wiener(p, p, 0.0, 0.0).unwrap();
        let a = modulation_norm(&m, &ms).unwrap();
        let b = wiener_norm(&m, &ws).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
    }

    #[test]
    fn chirp_multiplier_is_an_l2_isometry(samples in complex_samples(64), t in 0.0f64..20.0) {
        let lat = Lattice::new(1, 64, 8.0).unwrap();
        let f = Field::new(lat, samples).unwrap();
        let out = apply_multiplier(&Symbol::chirp(t), &f).unwrap();
        prop_assert!((out.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm().max(1e-300));
    }

    #[test]
    fn mu_regions_cover_and_agree(num_a in 0i64..=240, num_b in 0i64..=240) {
        // Random rational points of the unit square, denominator 240.
        let a = num_rational::Ratio::new(num_a, 240);
        let b = num_rational::Ratio::new(num_b, 240);
        let starred = exact::starred_regions(a, b);
        let unstarred = exact::unstarred_regions(a, b);
        prop_assert!(starred.iter().any(|&m| m));
        prop_assert!(unstarred.iter().any(|&m| m));
        let values = exact::branch_values(a, b);
        for mask in [starred, unstarred] {
            let active: Vec<_> = mask.iter().zip(&values).filter(|(m, _)| **m).map(|(_, v)| *v).collect();
            for v in &active {
                prop_assert_eq!(*v, active[0]);
            }
        }
        // The float route agrees with the exact one.
        let pt = IndexPoint::new(num_a as f64 / 240.0, num_b as f64 / 240.0).unwrap();
        let (f1, f2) = mu_exponents(&pt);
        let (e1, e2) = exact::mu_exponents(a, b);
        let to_f = |r: num_rational::Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        prop_assert!((f1 - to_f(e1)).abs() < 1e-12);
        prop_assert!((f2 - to_f(e2)).abs() < 1e-12);
    }

    #[test]
    fn conjugate_index_map_is_an_involution(num_a in 0i64..=100, num_b in 0i64..=100) {
        let pt = IndexPoint::new(num_a as f64 / 100.0, num_b as f64 / 100.0).unwrap();
        let back = pt.conjugate().conjugate();
        prop_assert!((back.inv_p() - pt.inv_p()).abs() < 1e-15);
        prop_assert!((back.inv_q() - pt.inv_q()).abs() < 1e-15);
    }
}
