use fluorospec::dressed::{
    coherence_eigenvalues, coherence_generator, dressed_total, evolve_dressed, lambda0,
    DressedState,
};
use fluorospec::features::hole_metrics;
use fluorospec::{Complex64, DriveParams, FrequencyGrid};
use nalgebra::Matrix2;
use proptest::prelude::*;

fn resonant(o: f64, l: f64) -> DriveParams {
    DriveParams::new(1.0, o, 0.0, l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn total_is_physical(l in 0.0f64..400.0) {
        let p = resonant(50.0, l);
        let w = FrequencyGrid::symmetric(400.0, 801).unwrap().omegas();
        let s = dressed_total(&p, &w).unwrap();
        for v in &s.values {
            prop_assert!(*v >= -1e-6, "{v}");
        }
        let l0 = lambda0(&p, &w).unwrap();
        prop_assert!(l0.values.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn eigenvalues_match_numerical_diagonalization(
        g in 0.1f64..10.0, o in 0.0f64..200.0, l in 0.0f64..400.0
    ) {
        let p = DriveParams::new(g, o, 0.0, l).unwrap();
        let m = coherence_generator(&p);
        let mat = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
        let num = mat.eigenvalues().expect("2x2 eigenvalues");
        let ana = coherence_eigenvalues(&p);
        let scale = ana[0].norm().max(ana[1].norm()).max(1.0);
        // Pair up regardless of ordering.
        let d = |a: Complex64, b: Complex64| (a - b).norm();
        let direct = d(num[0], ana[0]).max(d(num[1], ana[1]));
        let swapped = d(num[0], ana[1]).max(d(num[1], ana[0]));
        prop_assert!(direct.min(swapped) <= 1e-12 * scale, "{num:?} {ana:?}");
        if o > p.gamma_minus() {
            prop_assert!((ana[0] - ana[1].conj()).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn hole_narrows_with_linewidth() {
    let w = FrequencyGrid::symmetric(200.0, 4001).unwrap().omegas();
    let widths: Vec<f64> = [100.0, 200.0, 400.0]
        .iter()
        .map(|&l| hole_metrics(&dressed_total(&resonant(50.0, l), &w).unwrap()).1)
        .collect();
    assert!(widths[0] > widths[1] && widths[1] > widths[2], "{widths:?}");
    assert!(widths[2] > 0.0);
}

#[test]
fn populations_relax_at_big_gamma() {
    let p = resonant(50.0, 30.0);
    let start = DressedState::new(1.0, 0.0, Complex64::new(0.1, 0.2));
    let tr = evolve_dressed(&start, &p, 0.2, 1e-4).unwrap();
    // Slope of ln(r_pp - 1/2) between two well separated samples.
    let (i, j) = (100, 1500);
    let a = (tr.states[i].r_pp - 0.5).ln();
    let b = (tr.states[j].r_pp - 0.5).ln();
    let rate = -(b - a) / (tr.times[j] - tr.times[i]);
    assert!((rate / p.big_gamma() - 1.0).abs() < 0.05, "{rate}");
    let last = tr.states.last().unwrap();
    assert!((last.r_pp - 0.5).abs() < 1e-2);
}

#[test]
fn lambda0_lineshape() {
    let p = resonant(50.0, 100.0);
    let g = p.big_gamma();
    let s = lambda0(&p, &[0.0, g, -g]).unwrap();
    let peak = 1.0 / (4.0 * g);
    assert!((s.values[0] - peak).abs() < 1e-9 * peak);
    // Half maximum at +-Gamma, so the FWHM is 2 Gamma.
    assert!((s.values[1] - 0.5 * peak).abs() < 1e-9 * peak);
    assert!((s.values[2] - 0.5 * peak).abs() < 1e-9 * peak);
}
