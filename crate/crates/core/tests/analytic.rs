use heegner_core::analytic::constants::{c2, c56_odd_spec, f_one_third};
use heegner_core::analytic::eisenstein::sample_points;
use heegner_core::analytic::*;
use heegner_core::arith::{gcd, is_squarefree_trial};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CUT: u64 = 100_000;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn rho_closed_form_matches_brute_force() {
    let mut checked = 0;
    for l in 1..=12u64 {
        for m in (1..=30u64).step_by(2) {
            for d in [1u64, 3, 7] {
                if m % d != 0 {
                    continue;
                }
                for r in 1..=200u64 {
                    let r_odd = r >> r.trailing_zeros();
                    if gcd(l * m, r_odd) != 1 || !is_squarefree_trial(l) {
                        assert!(rho_density(m, l, d, r).is_err());
                        continue;
                    }
                    let closed = rho_density(m, l, d, r).unwrap();
                    let brute = rho_brute(m, l, d, r).unwrap();
                    assert_eq!(closed, brute, "m={m} l={l} d={d} r={r}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn gamma_recurrence_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let s: f64 = rng.gen_range(0.01..5.0);
        let a = gamma_real(s + 1.0, 15).unwrap().value;
        let b = s * gamma_real(s, 15).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}

#[test]
fn i_series_agrees_with_closed_form() {
    for j in 0..50 {
        let re = 0.6 + 0.8 * (j as f64 + 0.5) / 50.0;
        let im = ((j * 37) % 11) as f64 * 0.1 - 0.5;
        let s = Complex64::new(re, im);
        let closed = i_of(s).unwrap();
        let (series, _) = i_series(s).unwrap();
        assert!((closed - series).norm() <= 1e-10, "s={s}: {closed} vs {series}");
    }
}

#[test]
fn i_two_thirds_both_evaluators() {
    let closed = i_of(c(2.0 / 3.0)).unwrap();
    let (series, _) = i_series(c(2.0 / 3.0)).unwrap();
    assert!((closed.re - 4.371571166197647).abs() < 1e-12);
    assert!((closed - series).norm() < 1e-10);
}

#[test]
fn j_symmetry_and_difference_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let w = Complex64::new(rng.gen_range(0.6..1.4), rng.gen_range(-1.0..1.0));
        let s = Complex64::new(rng.gen_range(0.6..1.4), rng.gen_range(-1.0..1.0));
        let a = j_of(w, s).unwrap();
        let b = j_of(s, w).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        let lhs = a * (w - s) + i_of(s).unwrap();
        assert!((lhs - i_of(w).unwrap()).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn eisenstein_identity_on_samples() {
    for (x, y) in sample_points() {
        let s = eisenstein_kernel_sum(x, y, 1e-10).unwrap();
        assert!((s.value - 0.5).abs() < 1e-8, "z = {x} + {y}i: {}", s.value);
    }
}

#[test]
fn mellin_phi_closed_form_vs_quadrature() {
    let g = SmoothTestFunction::gaussian();
    let closed = mellin_phi(c(2.0), c(2.0), c(2.0), 3, &g, &g).unwrap().re;
    let (num, _) = mellin_phi_numeric(1.0, 1.0, 2.0, 2.0, 2.0, 3, &g, &g, 1e-9).unwrap();
    assert!((num - closed).abs() <= 1e-6 * closed.abs(), "{num} vs {closed}");
    assert!((closed - 0.166167).abs() < 1e-5);
}

#[test]
fn mellin_phi_scaling_law() {
    let g = SmoothTestFunction::gaussian();
    let (d, y) = (2.0, 1.5);
    let scaled = mellin_phi_scaled(d, y, c(2.0), c(2.0), c(2.0), 3, &g, &g).unwrap().re;
    let (num, _) = mellin_phi_numeric(d, y, 2.0, 2.0, 2.0, 3, &g, &g, 1e-9).unwrap();
    assert!((num - scaled).abs() <= 1e-6 * scaled.abs(), "{num} vs {scaled}");
}

#[test]
fn psi_transform_examples() {
    let one = mellin_psi(c(1.0)).unwrap().re;
    assert!((one - std::f64::consts::PI / 6.0).abs() < 1e-14);
    for h in [1e-5, 1e-7] {
        let r = mellin_psi(c(h)).unwrap().re * h;
        assert!((r - 0.5).abs() < 10.0 * h);
    }
}

#[test]
fn secondary_cross_identities() {
    let cs = secondary_constants(3, CUT).unwrap();
    assert!((cs.c56.value - 1.2 * cs.c1k.value).abs() < 1e-8);
    let f = f_of(1.0 / 3.0, CUT).unwrap();
    let i23 = i_of(c(2.0 / 3.0)).unwrap().re;
    assert!((f.value * i23 / 12.0 - cs.c56.value / 2.0).abs() < 1e-8);
    // two displayed forms of F(1/3)
    let g = f_one_third(CUT).unwrap();
    assert!((f.value - g.value).abs() < 1e-10);
    for k in [3, 5, 7, 9] {
        assert!(c1k(k, CUT).unwrap().value < 0.0);
    }
    assert!(cs.c56.value < 0.0);
}

#[test]
fn euler_products_stable_under_refinement() {
    let a = c56_odd_spec().with_cutoff(50_000).evaluate().unwrap();
    let b = c56_odd_spec().with_cutoff(100_000).evaluate().unwrap();
    assert!((a.value - b.value).abs() <= a.err + b.err);
    for k in [3, 9] {
        let x = c1k(k, 50_000).unwrap();
        let y = c1k(k, 100_000).unwrap();
        assert!((x.value - y.value).abs() <= x.err + y.err, "k={k}");
    }
    let x = local_constant_c(1, 1, 50_000).unwrap();
    let y = local_constant_c(1, 1, 100_000).unwrap();
    assert!((x.value - y.value).abs() <= x.err + y.err);
}

#[test]
fn local_constant_examples() {
    let v = local_constant_c(1, 1, CUT).unwrap().value;
    assert!((v - 0.3425996045416755).abs() < 1e-12);
    assert_eq!(c2(2, 1).unwrap(), 4.0);
    assert_eq!(c2(1, 2).unwrap(), 4.0 / 3.0);
    assert_eq!(c2(1, 1).unwrap(), 0.8);
}

#[test]
fn density_slope_converges() {
    let target = local_constant_c(1, 1, CUT).unwrap().value;
    let mut errs = Vec::new();
    for z in [10_000u64, 100_000] {
        let s = local_density_sum(z, 1, 1, 1000).unwrap();
        errs.push((s / z as f64 / target - 1.0).abs());
    }
    assert!(errs[1] < 0.02, "{errs:?}");
}

#[test]
fn density_slope_other_pairs() {
    for (l, t) in [(2u64, 1u64), (1, 2), (3, 1), (1, 3), (6, 5)] {
        let target = local_constant_c(l, t, CUT).unwrap().value;
        let z = 100_000;
        let s = local_density_sum(z, l, t, 300).unwrap();
        let ratio = s / z as f64 / target;
        assert!((ratio - 1.0).abs() < 0.05, "(l,t)=({l},{t}) ratio {ratio}");
    }
}

#[test]
fn density_z_truncation() {
    let z = 20_000;
    let a = local_density_sum(z, 1, 1, 1_000).unwrap();
    let b = local_density_sum(z, 1, 1, 10_000).unwrap();
    assert!((a - b).abs() <= z as f64 * 1e-3 * 4.0, "{a} {b}");
}

proptest! {
    #[test]
    fn rho_is_bounded_by_divisor_count(l in 1u64..40, m in (0u64..40).prop_map(|x| 2 * x + 1), r in 1u64..500) {
        prop_assume!(is_squarefree_trial(l));
        let r_odd = r >> r.trailing_zeros();
        prop_assume!(gcd(l * m, r_odd) == 1);
        let v = rho_density(m, l, 1, r).unwrap();
        let omega = heegner_core::arith::factor_trial(r_odd).len() as u32;
        prop_assert!(v <= 4 * 2u64.pow(omega));
        prop_assert_eq!(v, rho_brute(m, l, 1, r).unwrap());
    }

    #[test]
    fn zeta_functional_equation(s in -6.0f64..-1.05) {
        prop_assume!((s - s.round()).abs() > 1e-3);
        let lhs = zeta_real(s, 15).unwrap().value;
        let pi = std::f64::consts::PI;
        let g = gamma_real(1.0 - s, 15).unwrap().value;
        let z = zeta_real(1.0 - s, 15).unwrap().value;
        let rhs = 2f64.powf(s) * pi.powf(s - 1.0) * (pi * s / 2.0).sin() * g * z;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-3));
    }

    #[test]
    fn psi_kernel_matches_dual_form(y in 1e-3f64..3.0) {
        let (direct, err) = psi_kernel(y, 1e-14).unwrap();
        let pi = std::f64::consts::PI;
        let dual: f64 = 0.5 - 2.0 * pi * y.powf(-1.5) * (1..60).map(|m| {
            let m = m as f64;
            m * m * (-pi * m * m / y).exp()
        }).sum::<f64>();
        prop_assert!((direct - dual).abs() <= err + 1e-12);
    }
}
