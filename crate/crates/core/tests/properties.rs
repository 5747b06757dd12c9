use std::f64::consts::PI;

use oldroyd_core::decay::{convolution_bound, convolution_decay_check, random_field};
use oldroyd_core::energy::{Energy, FunctionalWeights};
use oldroyd_core::solver::{read_state, simulate, write_state, InitSpec, SimConfig, Trajectory};
use oldroyd_core::spectral::{bernstein_check, Fft3};
use oldroyd_core::symbol::{op_norm, semigroup};
use oldroyd_core::{Coeffs, FrequencySplit, Grid, ModelParams, SymbolMatrix2, SymbolMatrix4};
use proptest::prelude::*;

fn coeffs() -> Coeffs {
    Coeffs::new(ModelParams::default()).unwrap()
}

fn sim(seed: u64, h3: f64, steps: usize) -> SimConfig {
    SimConfig {
        n: 8,
        length: 4.0 * PI,
        dt: 0.01,
        t_end: 0.01 * steps as f64,
        init: InitSpec {
            seed,
            h3,
            rho_mean: 0.0,
            eta_mean: 0.0,
            ..Default::default()
        },
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn real_transform_round_trip(seed in 0u64..1000) {
        let fft = Fft3::new(8);
        let f: Vec<f64> = (0..512).map(|i| ((i as u64 * 2654435761 + seed) % 1000) as f64 / 500.0 - 1.0).collect();
        let back = fft.inverse_real(&fft.forward_real(&f));
        prop_assert!(f.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn semigroup_obeys_gap_bound(r in 1e-3f64..0.325, t in 0.0f64..1e3) {
        let c = coeffs();
        let n4 = op_norm(&semigroup(&SymbolMatrix4::new(r, &c).m, t).unwrap());
        let n2 = op_norm(&semigroup(&SymbolMatrix2::new(r, &c).m, t).unwrap());
        prop_assert!(n4 <= 10.0 * (-0.5 * r * r * t).exp() * (1.0 + 1e-9));
        prop_assert!(n2 <= 10.0 * (-r * r * t).exp() * (1.0 + 1e-9));
    }

    #[test]
    fn high_part_obeys_bernstein(seed in 0u64..10_000, c0 in 0.5f64..1.0) {
        let grid = Grid::cube(8, 4.0 * PI).unwrap();
        let split = FrequencySplit::new(c0).unwrap();
        let f = random_field(grid, seed);
        for (m1, m2) in [(1, 0), (2, 1), (3, 1)] {
            prop_assert!(bernstein_check(&f, m1, m2, &split).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn convolution_ratio_is_bounded(a in 1.2f64..4.0, frac in 0.05f64..0.95) {
        let b = a * frac;
        let ts = [1.0, 10.0, 100.0, 1e3, 1e4];
        let bound = convolution_bound(a, b);
        for ratio in convolution_decay_check(a, b, &ts).unwrap() {
            prop_assert!(ratio <= bound);
        }
    }

    #[test]
    fn weights_satisfy_constraints(c_gen in 1.0f64..100.0, c0 in 0.1f64..1.0) {
        let c = coeffs();
        let w = FunctionalWeights::construct(&c, c_gen, c0, 1e-2).unwrap();
        prop_assert!(w.check(&c).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn means_are_invariant(seed in 0u64..1000, rho in -0.01f64..0.01, eta in -0.01f64..0.01) {
        let mut cfg = sim(seed, 1e-2, 20);
        cfg.init.rho_mean = rho;
        cfg.init.eta_mean = eta;
        let mut tr = Trajectory::default();
        simulate(&cfg, &mut tr).unwrap();
        let m0 = tr.monitors[0];
        prop_assert!((m0.mean_rho - rho).abs() < 1e-15 && (m0.mean_eta - eta).abs() < 1e-15);
        for m in &tr.monitors {
            prop_assert!((m.mean_rho - m0.mean_rho).abs() < 1e-14);
            prop_assert!((m.mean_eta - m0.mean_eta).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_tracks_reformulation(seed in 0u64..1000) {
        let mut cfg = sim(seed, 1e-2, 20);
        cfg.oracle = true;
        let run = simulate(&cfg, &mut Trajectory::default()).unwrap();
        prop_assert!(run.max_defect.unwrap() < 1e-12);
    }

    #[test]
    fn state_file_round_trip(seed in 0u64..1000, t in 0.0f64..10.0) {
        let cfg = sim(seed, 1e-1, 0);
        let s = cfg.init.generate(cfg.grid().unwrap()).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &s, t).unwrap();
        let (back, tb) = read_state(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(tb, t);
        prop_assert!(back.sub(&s).unwrap().l2_norm() < 1e-14 * s.l2_norm().max(1.0));
    }

    #[test]
    fn linear_energy_decreases(seed in 0u64..1000) {
        let c = coeffs();
        let mut cfg = sim(seed, 1e-3, 10);
        cfg.linear = true;
        cfg.snapshot_every = 1;
        let mut tr = Trajectory::default();
        simulate(&cfg, &mut tr).unwrap();
        let energy = Energy::new(cfg.grid().unwrap(), c, FunctionalWeights::default_for(&c).unwrap()).unwrap();
        let h: Vec<f64> = tr
            .snapshots
            .iter()
            .map(|s| energy.functional(1, &energy.sample(s.t, &s.state).unwrap()).unwrap())
            .collect();
        prop_assert!(h.windows(2).all(|w| w[1] <= w[0]));
    }
}
