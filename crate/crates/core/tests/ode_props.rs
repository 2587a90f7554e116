use hillspec::ode::{self, matrix_distance, matrix_product};
use hillspec::{Complex64, IntegratorConfig, PotentialSpec};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex64::new(a, b))
}

fn potential() -> impl Strategy<Value = PotentialSpec> {
    (complex(2.0), prop::collection::vec(complex(2.0), 0..3), prop::collection::vec(complex(2.0), 0..3))
        .prop_map(|(a0, c, s)| PotentialSpec::fourier(a0, c, s))
}

fn real_potential() -> impl Strategy<Value = PotentialSpec> {
    (-2.0..2.0f64, prop::collection::vec(-2.0..2.0f64, 0..3), prop::collection::vec(-2.0..2.0f64, 0..3)).prop_map(
        |(a0, c, s)| {
            let r = |v: Vec<f64>| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
            PotentialSpec::fourier(Complex64::new(a0, 0.0), r(c), r(s))
        },
    )
}

/// `μ` in the disk `|μ| <= 400`.
fn mu() -> impl Strategy<Value = Complex64> {
    (0.0..400.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian_stays_one(q in potential(), mu in mu()) {
        let xs: Vec<f64> = (1..=8).map(|k| k as f64 / 8.0).collect();
        let path = ode::transfer_path(&q, mu, 0.0, &xs, &cfg(), false).unwrap();
        for st in &path {
            // size of the cancelling products; 1 when the solutions stay bounded
            let scale = (st.c * st.sp).norm().max((st.cp * st.s).norm()).max(1.0);
            prop_assert!((st.wronskian() - 1.0).norm() < 10.0 * cfg().rel_tol * scale,
                "drift {} at x = {}", (st.wronskian() - 1.0).norm(), st.x);
        }
    }

    #[test]
    fn wronskian_absolute_for_bounded_solutions(q in real_potential(), mu in 0.0..400.0f64) {
        let m = ode::monodromy(&q, Complex64::new(mu, 0.0), &cfg(), false).unwrap();
        if m.matrix().iter().flatten().all(|z| z.norm() < 3.0) {
            prop_assert!((m.wronskian() - 1.0).norm() < 10.0 * cfg().rel_tol);
        }
    }

    #[test]
    fn composition_and_periodicity(q in potential(), mu in mu()) {
        let full = ode::monodromy(&q, mu, &cfg(), false).unwrap();
        let a = ode::transfer(&q, mu, 0.0, 0.5, &cfg(), false).unwrap();
        let b = ode::transfer(&q, mu, 0.5, 1.0, &cfg(), false).unwrap();
        let next = ode::transfer(&q, mu, 1.0, 2.0, &cfg(), false).unwrap();
        let norm = |m: &[[Complex64; 2]; 2]| m.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        let tol = 10.0 * cfg().rel_tol * norm(&a.matrix()) * norm(&b.matrix());
        prop_assert!(matrix_distance(&full.matrix(), &matrix_product(&b.matrix(), &a.matrix())) < tol);
        prop_assert!(matrix_distance(&full.matrix(), &next.matrix()) < tol);
    }

    #[test]
    fn derivative_matches_central_difference(q in potential(), mu in mu()) {
        let (_, d) = ode::discriminant(&q, mu, &cfg(), true).unwrap();
        let d = d.unwrap();
        let h = 1e-5 * (1.0 + mu.norm());
        let f = |z: Complex64| ode::discriminant(&q, z, &cfg(), false).unwrap().0;
        let fd = (f(mu + h) - f(mu - h)) / (2.0 * h);
        prop_assert!((fd - d).norm() <= 1e-4 * d.norm(), "{fd} vs {d}");
    }

    #[test]
    fn real_potentials_have_real_discriminant(q in real_potential(), mu in -50.0..400.0f64) {
        let (d, _) = ode::discriminant(&q, Complex64::new(mu, 0.0), &cfg(), false).unwrap();
        prop_assert!(d.im.abs() < 10.0 * cfg().rel_tol * d.norm().max(1.0));
    }

    #[test]
    fn free_system_matches_closed_forms(mu in mu(), x in 0.05..1.0f64) {
        let st = ode::fundamental_at(&PotentialSpec::zero(), mu, x, &cfg()).unwrap();
        let l = mu.sqrt();
        let (c, s, cp, sp) = if l.norm() < 1e-8 {
            (Complex64::new(1.0, 0.0), Complex64::new(x, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        } else {
            ((l * x).cos(), (l * x).sin() / l, -l * (l * x).sin(), (l * x).cos())
        };
        for (a, b) in [(st.c, c), (st.s, s), (st.cp, cp), (st.sp, sp)] {
            prop_assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{a} vs {b}");
        }
        let delta = ode::discriminant(&PotentialSpec::zero(), mu, &cfg(), false).unwrap().0;
        let exact = 2.0 * l.cos();
        prop_assert!((delta - exact).norm() < 1e-9 * exact.norm().max(1.0));
    }
}

#[test]
fn sampled_potential_wronskian() {
    let v: Vec<Complex64> = (0..=64)
        .map(|j| Complex64::new((j as f64 * 0.3).sin(), 0.2 * (j % 2) as f64))
        .collect();
    let mut v = v;
    v[64] = v[0];
    let q = PotentialSpec::samples(v).unwrap();
    for mu in [Complex64::new(0.0, 0.0), Complex64::new(150.0, -20.0)] {
        let m = ode::monodromy(&q, mu, &cfg(), false).unwrap();
        assert!((m.wronskian() - 1.0).norm() < 1e-8);
    }
}
