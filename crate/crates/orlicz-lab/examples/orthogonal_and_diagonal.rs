//! Composition with orthogonal and diagonal maps.
//!
//! Signed permutations preserve boxes exactly, so the norm of f(psi(x)) can be
//! compared to the norm of f with no rasterization error. General rotations go
//! through the rasterized path. Diagonal maps get a certified lower bound
//! phi(prod d)^(1/n) plus an empirical chain estimate.

use orlicz_lab::compose::{
    diag_empirical_opnorm, diag_opnorm_lower, orthogonal_invariance_check, svd_small, MapSpec,
};
use orlicz_lab::domain::{BoxN, SimpleFunction};
use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::norms::SearchSpec;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let phi_y = YoungFunction::power(2.0)?;
    let phi_g = GrowthFunction::ball_power(2, 4.0)?;
    let search = SearchSpec::default();

    // Signed permutation (x, y) -> (y, -x): exact path, ratio 1.
    let spec: MapSpec = serde_json::from_str(r#"{"kind":"perm","perm":[1,0],"signs":[1,-1]}"#).unwrap();
    let map = spec.build()?;
    let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 2.0), (-1.0, 1.0)])?);
    let rep = orthogonal_invariance_check(&map.a, &f, &phi_y, &phi_g, &search, None)?;
    println!(
        "signed permutation: |f o psi| = {:.10}, |f| = {:.10}, ratio = {:.10} (exact: {})",
        rep.norm_composed, rep.norm_original, rep.ratio, rep.exact_path
    );
    assert!(rep.exact_path);
    assert!((rep.ratio - 1.0).abs() <= 1e-6);

    // Quarter-turn written as a dense rotation matrix: the entries are not
    // axis-aligned floats anymore, the rasterized path takes over.
    let angle = std::f64::consts::FRAC_PI_4;
    let rot = orlicz_lab::compose::Mat::from_rows(&[
        vec![angle.cos(), -angle.sin()],
        vec![angle.sin(), angle.cos()],
    ])?;
    let rep = orthogonal_invariance_check(&rot, &f, &phi_y, &phi_g, &search, None)?;
    println!(
        "pi/4 rotation:      ratio = {:.6} (exact: {}), tolerance {:.1e}",
        rep.ratio, rep.exact_path, rep.tol
    );
    assert!(!rep.exact_path);
    assert!((rep.ratio - 1.0).abs() <= 2e-2);

    // Diagonal contraction d = (1/4, 1/4): operator norm comparator. The
    // lower bound wants the full decreasing-class certificate, which the
    // normalized power r^{-1/2} satisfies with constants 1.
    let phi_m = GrowthFunction::morrey(2, 4.0)?;
    let d = vec![0.25, 0.25];
    let emp = diag_empirical_opnorm(&d, &phi_y, &phi_m)?;
    let low = diag_opnorm_lower(&phi_m, &d, Some(emp.max_ratio))?;
    println!(
        "diag (1/4, 1/4): lower = {:.10}, empirical = {:.10}, slack = {:.4}",
        low.lower_bound, emp.max_ratio, low.slack
    );
    for (i, ratio) in emp.per_step.iter().enumerate() {
        println!("  chain step {i}: ratio = {ratio:.10}");
    }
    assert_eq!(low.pass, Some(true));

    // Singular values come from the built-in Jacobi SVD.
    let svd = svd_small(&rot)?;
    println!(
        "rotation SVD: sigma = {:?}, orthogonality residual = {:.2e}",
        svd.sigma, svd.orthogonality_residual
    );
    assert!(svd.sigma.iter().all(|s| (s - 1.0).abs() <= 1e-12));

    Ok(())
}
