use proptest::prelude::*;
use tact_core::{
    bethe_residual, build_state, build_tridiagonal, energy_from_zeros, enumerate_sectors, find_zeros, full_spectrum,
    residual_norm, solve_sector, symmetric_functions, Precision, SectorLabel,
};

fn sector(max_j: u32) -> impl Strategy<Value = SectorLabel> {
    (0..=max_j, 0u8..2, 0u8..2, 0u8..2)
        .prop_filter_map("J - n1 - n2 - nu must be even and non-negative", |(j, n1, n2, nu)| {
            SectorLabel::new(j, n1, n2, nu)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_solution_is_an_eigenvector_of_the_sector_matrix(s in sector(60)) {
        let system = build_tridiagonal(s);
        let sols = solve_sector(s).unwrap();
        prop_assert_eq!(sols.len(), s.k() as usize + 1);
        for sol in &sols {
            let b = sol.coefficients();
            prop_assert_eq!(b[b.len() - 1], 1.0);
            let fb = system.apply(b);
            let scale = system.to_dense().iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
            let bnorm = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (x, y) in fb.iter().zip(b) {
                prop_assert!((x - sol.g0() * y).abs() <= 1e-9 * scale * bnorm);
            }
        }
    }

    #[test]
    fn sector_counts_add_up_to_the_multiplet(j in 0u32..200) {
        let catalog = enumerate_sectors(j).unwrap();
        let total: usize = catalog.sectors().iter().map(|(_, n)| n).sum();
        prop_assert_eq!(total, 2 * j as usize + 1);
        for (s, n) in catalog.sectors() {
            prop_assert_eq!(2 * s.k() + u32::from(s.n1() + s.n2() + s.nu()), j);
            prop_assert_eq!(*n, s.k() as usize + 1);
        }
    }

    #[test]
    fn balanced_sectors_have_symmetric_spectral_parameters(k in 0u32..40, n in 0u8..2, nu in 0u8..2) {
        let s = SectorLabel::new(2 * k + 2 * u32::from(n) + u32::from(nu), n, n, nu).unwrap();
        let g: Vec<f64> = solve_sector(s).unwrap().iter().map(|x| x.g0()).collect();
        let mut sorted = g.clone();
        sorted.sort_by(f64::total_cmp);
        let scale = sorted.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in sorted.iter().zip(sorted.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn full_spectrum_is_sorted_complete_and_symmetric(j in 0u32..80, chi in 0.1f64..10.0) {
        let report = full_spectrum(j, chi).unwrap();
        prop_assert!(report.is_complete());
        let e = report.energies();
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        let scale = 1.0 + report.diameter;
        for (a, b) in e.iter().zip(e.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-9 * scale * chi);
        }
        for (x, y) in e.iter().zip(report.energies_over_chi()) {
            prop_assert!((x - chi * y).abs() <= 1e-12 * scale * chi);
        }
    }

    #[test]
    fn zeros_are_real_inside_the_interval_and_reproduce_the_energy(s in sector(40)) {
        for sol in solve_sector(s).unwrap() {
            let zeros = find_zeros(&sol).unwrap();
            prop_assert_eq!(zeros.len(), s.k() as usize);
            prop_assert!(zeros.zeros_u().iter().all(|u| u.abs() < 1.0));
            prop_assert!(zeros.zeros_u().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(bethe_residual(&zeros).max_relative() <= 1e-8);
            let e = sol.energy_over_chi();
            prop_assert!((energy_from_zeros(&zeros, 1.0) - e).abs() <= 1e-8 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn states_are_normalized_eigenvectors(s in sector(16)) {
        for sol in solve_sector(s).unwrap() {
            let st = build_state(&sol, &symmetric_functions(&sol).unwrap()).unwrap();
            prop_assert!((st.norm() - 1.0).abs() <= 1e-12);
            let r = residual_norm(&st, sol.energy_over_chi(), 1.0);
            prop_assert!(r <= 1e-8 * (1.0 + sol.energy_over_chi().abs()));
        }
    }

    #[test]
    fn precision_round_trips_through_text(bits in 24u32..=65536) {
        let p = Precision::Bits(bits);
        prop_assert_eq!(p.to_string().parse::<Precision>().unwrap(), p);
    }
}
