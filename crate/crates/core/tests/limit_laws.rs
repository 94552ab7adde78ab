//! Distributional checks of the Wiener paths and limit samplers.

use vervaat::harness::{ks_two_sample, median};
use vervaat::limits::{
    limit_path_vervaat, sample_limit_bk, sample_limit_verror, sample_limit_vervaat,
    sup_half_norm_reference_with_mesh, wiener_path, z_n_functional, z_n_functional_with_steps,
};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn wiener_increments_have_the_right_covariance() {
    let paths: Vec<_> = (0..10_000).map(|s| wiener_path(1.0, 1.0 / 64.0, s).unwrap()).collect();
    let w1: Vec<f64> = paths.iter().map(|w| w.value_at(1.0)).collect();
    let var = mean(&w1.iter().map(|x| x * x).collect::<Vec<_>>());
    assert!((0.94..=1.06).contains(&var), "{var}");
    let cov = mean(&paths.iter().map(|w| w.value_at(0.3) * w.value_at(0.7)).collect::<Vec<_>>());
    assert!((cov - 0.3).abs() < 0.03, "{cov}");
}

#[test]
fn product_normal_moments() {
    // E|N| E|N'|^{1/2} = sqrt(2/pi) · 2^{1/4} Γ(3/4) / sqrt(pi) = 0.65607
    let bk: Vec<f64> = (0..100_000).map(|s| sample_limit_bk(1.0, 1.0, 1.0, s).unwrap().abs()).collect();
    assert!((mean(&bk) - 0.65607).abs() < 0.01, "{}", mean(&bk));
    // E|N| E|N'|^{3/2} / sqrt 3 = sqrt(2/pi) · 2^{3/4} Γ(5/4) / sqrt(pi) / sqrt 3 = 0.39760
    let ve: Vec<f64> = (0..100_000).map(|s| sample_limit_verror(1.0, 1.0, 1.0, s).unwrap().abs()).collect();
    assert!((mean(&ve) - 0.39760).abs() < 0.01, "{}", mean(&ve));
}

#[test]
fn verror_law_is_symmetric() {
    let a: Vec<f64> = (0..20_000).map(|s| sample_limit_verror(1.0, 1.0, 1.0, s).unwrap()).collect();
    let b: Vec<f64> = a.iter().map(|x| -x).collect();
    assert!(ks_two_sample(&a, &b).unwrap().d < 0.03);
}

#[test]
fn sup_norm_median() {
    let draws: Vec<f64> = (0..4_000)
        .map(|s| sup_half_norm_reference_with_mesh(1.0, 1.0, s, 1.0 / 16384.0).unwrap().powi(2))
        .collect();
    let m = median(&draws).unwrap();
    assert!((m - 1.14897).abs() < 0.03, "{m}");
    let coarse: Vec<f64> = (0..4_000)
        .map(|s| sup_half_norm_reference_with_mesh(1.0, 1.0, s, 1.0 / 1024.0).unwrap().powi(2))
        .collect();
    // Different meshes give unrelated paths; the discretization bias at
    // mesh 2^-10 is about 0.58·2^-5 ≈ 0.018.
    let mc = median(&coarse).unwrap();
    assert!((m - mc).abs() / m < 0.03, "{mc} vs {m}");
}

#[test]
fn vervaat_limit_mean() {
    let (sigma, mu, drift) = (2.0, 1.0, -0.5);
    let draws: Vec<f64> = (0..50_000)
        .map(|s| sample_limit_vervaat(1.0, sigma, mu, drift, s).unwrap())
        .collect();
    let expected = 0.5 * (sigma / mu).powi(2) + drift;
    // Var = (sigma/mu)^4 / 2 = 8
    assert!((mean(&draws) - expected).abs() < 4.0 * (8.0f64 / 50_000.0).sqrt());

    let w = wiener_path(1.0, 1.0 / 8.0, 3).unwrap();
    let vals = limit_path_vervaat(&w, sigma, mu, drift, &[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(vals[0], 0.0);
    let w1 = w.value_at(1.0);
    assert!((vals[2] - (2.0 * w1 * w1 + drift)).abs() < 1e-15);
}

#[test]
fn zn_inner_mesh_converged() {
    let n: f64 = 2_000.0;
    let mut diff = 0.0;
    let mut scale = 0.0;
    for s in 0..50 {
        let w = wiener_path(n + 10.0 * n.sqrt() + 1.0, 1.0 / 16.0, s).unwrap();
        let c = w.value_at(n).abs();
        let steps = ((4.0 * c * 16.0).ceil() as usize).max(256);
        let a = z_n_functional_with_steps(&w, n, 1.0, 1.0, 1.0, steps).unwrap().value;
        let b = z_n_functional_with_steps(&w, n, 1.0, 1.0, 1.0, 2 * steps).unwrap().value;
        assert_eq!(a, z_n_functional(&w, n, 1.0, 1.0, 1.0).unwrap().value);
        diff += (a - b).abs();
        scale += a.abs();
    }
    assert!(diff / scale < 1e-3, "{}", diff / scale);
}
