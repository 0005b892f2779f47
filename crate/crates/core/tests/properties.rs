use proptest::prelude::*;

use quadmap::format::fmt12;
use quadmap::operators::{jacobian, DiffScheme};
use quadmap::rng::PointSampler;
use quadmap::spectra::{dual_parameters, hydrogen_energy, oscillator_energy, spectrum_table, PhysicalConstants};
use quadmap::{FamilyDescriptor, OscPoint, Transform};

fn family_and_point() -> impl Strategy<Value = (u32, Vec<f64>)> {
    (1u32..=4).prop_flat_map(|m| (Just(m), prop::collection::vec(-2.0f64..2.0, 1usize << m)))
}

fn constants() -> impl Strategy<Value = PhysicalConstants> {
    (0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0)
        .prop_map(|(hbar, mu, e, omega)| PhysicalConstants { hbar, mu, e, omega })
}

fn transform(m: u32) -> Transform {
    Transform::canonical(FamilyDescriptor::new(m).unwrap())
}

proptest! {
    #[test]
    fn euler_identity((m, u) in family_and_point()) {
        let u = OscPoint::new(u);
        let x = transform(m).map(&u).unwrap();
        let u_sq = u.norm_sq();
        prop_assert!((x.norm() - u_sq).abs() <= 1e-12 * u_sq.max(1e-300));
    }

    #[test]
    fn map_is_even((m, u) in family_and_point()) {
        let t = transform(m);
        let u = OscPoint::new(u);
        prop_assert_eq!(t.map(&u).unwrap(), t.map(&u.negated()).unwrap());
    }

    #[test]
    fn ks_map_matches_closed_form(u in prop::collection::vec(-2.0f64..2.0, 4)) {
        let x = transform(2).map(&OscPoint::new(u.clone())).unwrap();
        let expected = [
            u[0] * u[0] - u[1] * u[1] - u[2] * u[2] + u[3] * u[3],
            2.0 * (u[0] * u[1] - u[2] * u[3]),
            2.0 * (u[0] * u[2] + u[1] * u[3]),
        ];
        for (a, b) in x.coords().iter().zip(expected) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn lc_map_is_complex_squaring(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let x = transform(1).map(&OscPoint::new(vec![a, b])).unwrap();
        prop_assert!((x.coords()[0] - (a * a - b * b)).abs() <= 1e-14);
        prop_assert!((x.coords()[1] - 2.0 * a * b).abs() <= 1e-14);
    }

    #[test]
    fn jacobian_is_twice_the_template((m, u) in family_and_point()) {
        let t = transform(m);
        let u = OscPoint::new(u);
        let jac = jacobian(&t, &u, &DiffScheme::default()).unwrap();
        for (row, exact) in jac.iter().zip(t.coordinate_rows(&u).unwrap()) {
            for (a, b) in row.iter().zip(exact) {
                prop_assert!((a - 2.0 * b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn duality_closure(m in 1u32..=4, n in 0i64..=40, c in constants()) {
        let e = hydrogen_energy(n, m, &c).unwrap();
        let dual = dual_parameters(e, &c).unwrap();
        let eps = oscillator_energy(n, m, &c.with_omega(dual.omega)).unwrap();
        prop_assert!((eps - 4.0 * c.e * c.e).abs() <= 1e-12 * eps.abs().max(1.0));
        prop_assert!((dual.epsilon - 4.0 * c.e * c.e).abs() <= 1e-12 * dual.epsilon);
    }

    #[test]
    fn spectra_are_monotone(m in 1u32..=4, n_max in 1i64..=30, c in constants()) {
        let rows = spectrum_table(m, n_max, &c).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].energy > w[0].energy && w[1].energy < 0.0);
            prop_assert!(w[1].epsilon > w[0].epsilon && w[0].epsilon > 0.0);
        }
        let k = |n: u32| n as f64 + (1u32 << (m - 1)) as f64;
        let invariant = rows[0].energy * k(0) * k(0);
        for r in &rows {
            prop_assert!((r.energy * k(r.n) * k(r.n) - invariant).abs() <= 1e-12 * invariant.abs());
            prop_assert_eq!(r.physical_dual, r.n % 2 == 0);
        }
    }

    #[test]
    fn spectra_scale_with_constants(m in 1u32..=4, n in 0i64..=20, c in constants()) {
        let e = hydrogen_energy(n, m, &c).unwrap();
        let e2 = hydrogen_energy(n, m, &PhysicalConstants { e: 2.0 * c.e, ..c }).unwrap();
        let h2 = hydrogen_energy(n, m, &PhysicalConstants { hbar: 2.0 * c.hbar, ..c }).unwrap();
        prop_assert!((e2 / e - 16.0).abs() < 1e-12);
        prop_assert!((h2 / e - 0.25).abs() < 1e-12);
        let w = oscillator_energy(n, m, &c).unwrap();
        let w2 = oscillator_energy(n, m, &c.with_omega(2.0 * c.omega)).unwrap();
        prop_assert!((w2 / w - 2.0).abs() < 1e-12);
    }

    #[test]
    fn even_levels_match_textbook_coulomb(m in 1u32..=4, n in 1i64..=15, c in constants()) {
        // D-dimensional hydrogen: −μe⁴ / (2ħ²(n + (D−3)/2)²), D = 2^(m−1) + 1
        let closed = hydrogen_energy(2 * n - 2, m, &c).unwrap();
        let shift = (1u32 << m) as f64 / 4.0 - 1.0;
        let textbook = -c.mu * c.e.powi(4) / (2.0 * c.hbar * c.hbar * (n as f64 + shift).powi(2));
        prop_assert!((closed - textbook).abs() <= 1e-12 * textbook.abs());
    }

    #[test]
    fn twelve_digit_output_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt12(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }

    #[test]
    fn shell_samples_stay_in_shell(seed in any::<u64>(), d in 2usize..=16) {
        let mut s = PointSampler::new(seed);
        let p = s.shell(d, 0.5, 2.0);
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((0.5..=2.0).contains(&r));
    }

    #[test]
    fn sampler_is_reproducible(seed in any::<u64>()) {
        prop_assert_eq!(PointSampler::new(seed).cube(8, 2.0), PointSampler::new(seed).cube(8, 2.0));
    }
}
