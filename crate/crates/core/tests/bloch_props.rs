use fluorospec::bloch::{bloch_rhs, correlation, default_correlation_steps, evolve, steady_state};
use fluorospec::{BlochState, Complex64, DriveParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = DriveParams> {
    (0.1f64..10.0, 0.0f64..200.0, -400.0f64..400.0, 0.0f64..400.0)
        .prop_map(|(g, o, d, l)| DriveParams::new(g, o, d, l).unwrap())
}

fn ball_state() -> impl Strategy<Value = BlochState> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU, -1.0f64..1.0).prop_map(|(r, th, cz)| {
        // radius r inside the ball, direction from (th, cz)
        let sz = r * cz;
        let rho = r * (1.0 - cz * cz).sqrt();
        BlochState::new(Complex64::from_polar(0.5 * rho, th), sz)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn steady_state_is_stationary(p in params()) {
        let ss = steady_state(&p);
        prop_assert!(bloch_rhs(&ss, &p).norm() < 1e-12);
        prop_assert!(ss.is_physical());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trajectories_stay_in_ball(p in params(), s0 in ball_state()) {
        let dt = 0.05 / p.max_rate();
        let tr = evolve(&s0, &p, 2000.0 * dt, dt).unwrap();
        for s in &tr.states {
            prop_assert!(s.bloch_norm_sq() <= 1.0 + 1e-6, "{}", s.bloch_norm_sq());
        }
    }

    #[test]
    fn conjugation_closure(p in params(), s0 in ball_state()) {
        let dt = 0.05 / p.max_rate();
        let q = p.with_detuning(-p.detuning()).unwrap();
        let a = evolve(&s0, &p, 500.0 * dt, dt).unwrap();
        let b = evolve(&s0.reflected(), &q, 500.0 * dt, dt).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert!((x.reflected().sigma_minus - y.sigma_minus).norm() < 1e-12);
            prop_assert!((x.sigma_z - y.sigma_z).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_halving_dt(p in params(), s0 in ball_state()) {
        let dt = 0.01 / p.max_rate();
        let t_end = 400.0 * dt;
        let a = evolve(&s0, &p, t_end, dt).unwrap();
        let b = evolve(&s0, &p, t_end, 0.5 * dt).unwrap();
        for (k, s) in a.states.iter().enumerate() {
            let r = &b.states[2 * k];
            prop_assert!((s.sigma_minus - r.sigma_minus).norm() < 1e-8);
            prop_assert!((s.sigma_z - r.sigma_z).abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn correlation_halving_dt_and_limit(p in params()) {
        let (tau_max, dtau) = default_correlation_steps(&p);
        // Whole number of steps so every grid nests in the finer ones.
        let tau_max = (tau_max / dtau).ceil() * dtau;
        let a = correlation(&p, tau_max, dtau).unwrap();
        let b = correlation(&p, tau_max, 0.5 * dtau).unwrap();
        let c = correlation(&p, tau_max, 0.25 * dtau).unwrap();
        let diff = |x: &[Complex64], y: &[Complex64]| {
            x.iter().enumerate().map(|(k, v)| (v - y[2 * k]).norm()).fold(0.0, f64::max)
        };
        let e1 = diff(&a.values, &b.values);
        let e2 = diff(&b.values, &c.values);
        prop_assert!(e1 < 1e-5 * a.g0().norm(), "{e1}");
        if e2 > 1e-12 {
            prop_assert!((14.0..18.0).contains(&(e1 / e2)), "order ratio {}", e1 / e2);
        }
        // Long-delay value against the steady coherence, computed separately.
        let s = steady_state(&p).sigma_minus.norm_sqr();
        prop_assert!((a.values.last().unwrap() - s).norm() < 1e-6 * a.g0().norm().max(1e-300) + 1e-14);
    }
}

#[test]
fn populations_relax_to_steady_state_from_either_pole() {
    let p = DriveParams::new(1.0, 3.0, 1.0, 2.0).unwrap();
    let ss = steady_state(&p);
    for s0 in [BlochState::ground(), BlochState::excited()] {
        let tr = evolve(&s0, &p, 30.0, 1e-3).unwrap();
        let last = tr.last();
        assert!((last.sigma_z - ss.sigma_z).abs() < 1e-10);
        assert!((last.sigma_minus - ss.sigma_minus).norm() < 1e-10);
    }
}
