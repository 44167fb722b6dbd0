use fluorospec::features::asymmetry;
use fluorospec::spectrum::spectrum_exact;
use fluorospec::stochastic::{
    mc_average_trajectory, mc_steady_spectrum, McSpectrumConfig, McTrajectoryConfig,
};
use fluorospec::{DriveParams, FrequencyGrid};

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let p = DriveParams::new(1.0, 5.0, 1.0, 2.0).unwrap();
    let tc = McTrajectoryConfig::new(2e-3, 1.0, 150, 77);
    let a = pool(1).install(|| mc_average_trajectory(&p, &tc).unwrap());
    let b = pool(3).install(|| mc_average_trajectory(&p, &tc).unwrap());
    assert_eq!(a, b);

    let sc = McSpectrumConfig::default_for(&p, 150, 77);
    let w = [-3.0, 0.0, 1.5];
    let a = pool(1).install(|| mc_steady_spectrum(&p, &w, &sc).unwrap());
    let b = pool(4).install(|| mc_steady_spectrum(&p, &w, &sc).unwrap());
    assert_eq!(a, b);
}

#[test]
fn stderr_shrinks_as_inverse_root_n() {
    let p = DriveParams::new(1.0, 5.0, 0.0, 2.0).unwrap();
    let small = mc_average_trajectory(&p, &McTrajectoryConfig::new(2e-3, 2.0, 500, 1)).unwrap();
    let large = mc_average_trajectory(&p, &McTrajectoryConfig::new(2e-3, 2.0, 1000, 2)).unwrap();
    for (a, b) in small.sigma_z.iter().zip(&large.sigma_z) {
        assert!(a.stderr > 0.0 && b.stderr > 0.0);
        let r = a.stderr / b.stderr / 2f64.sqrt();
        assert!((r - 1.0).abs() < 0.3, "{r}");
    }
}

#[test]
fn halving_dt_is_within_noise() {
    // Each dt draws its own increments, so the two runs are independent
    // estimates; their difference is judged against the combined error.
    let p = DriveParams::new(1.0, 5.0, 0.0, 2.0).unwrap();
    let a = mc_average_trajectory(&p, &McTrajectoryConfig::new(4e-3, 2.0, 2000, 5)).unwrap();
    let b = mc_average_trajectory(&p, &McTrajectoryConfig::new(2e-3, 2.0, 2000, 5)).unwrap();
    let z: Vec<f64> = a
        .sigma_z
        .iter()
        .zip(&b.sigma_z)
        .map(|(x, y)| (x.mean - y.mean) / x.stderr.hypot(y.stderr))
        .collect();
    let rms = (z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64).sqrt();
    assert!(z.iter().all(|v| v.abs() < 3.0), "{z:?}");
    assert!(rms < 1.5, "{rms}");
}

#[test]
fn spectrum_converges_with_realizations() {
    let p = DriveParams::new(1.0, 5.0, 0.0, 1.0).unwrap();
    let w: Vec<f64> = (0..41).map(|k| -10.0 + 0.5 * k as f64).collect();
    let exact = spectrum_exact(&p, &w).unwrap();
    let mut errors = Vec::new();
    let mut last = None;
    for n in [1000, 4000, 16000] {
        let mut cfg = McSpectrumConfig::default_for(&p, n, 1);
        cfg.dt = 0.01;
        let mc = mc_steady_spectrum(&p, &w, &cfg).unwrap();
        let err = mc
            .spectrum
            .values
            .iter()
            .zip(&exact.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errors.push(err);
        last = Some(mc);
    }
    assert!(
        errors[2] < errors[0] && errors[1] < 1.25 * errors[0],
        "{errors:?}"
    );

    let mc = last.unwrap();
    for ((m, e), se) in mc.spectrum.values.iter().zip(&exact.values).zip(&mc.stderr) {
        assert!(
            (m - e).abs() <= (0.05 * e.abs()).max(3.0 * se),
            "{m} {e} {se}"
        );
    }
}

#[test]
fn central_hole_is_resolved() {
    let p = DriveParams::new(1.0, 50.0, 0.0, 100.0).unwrap();
    let w: Vec<f64> = vec![-43.0, 0.0, 43.0];
    let mc = mc_steady_spectrum(&p, &w, &McSpectrumConfig::default_for(&p, 1000, 2)).unwrap();
    let v = &mc.spectrum.values;
    let se = &mc.stderr;
    for side in [0, 2] {
        assert!(v[side] - v[1] > 3.0 * se[side].hypot(se[1]), "{v:?} {se:?}");
    }
}

#[test]
fn asymmetry_sign_matches_exact() {
    let p = DriveParams::new(1.0, 50.0, 100.0, 200.0).unwrap();
    let w = FrequencyGrid::symmetric(200.0, 201).unwrap().omegas();
    let mc = mc_steady_spectrum(&p, &w, &McSpectrumConfig::default_for(&p, 500, 2)).unwrap();
    let exact = spectrum_exact(&p, &w).unwrap();
    let a = asymmetry(&mc.spectrum).unwrap();
    let b = asymmetry(&exact).unwrap();
    assert!(b.abs() > 0.05);
    assert_eq!(a.signum(), b.signum(), "{a} {b}");
}
