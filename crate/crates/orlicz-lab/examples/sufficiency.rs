//! Sufficiency bound for composition operators.
//!
//! For a box-preserving bi-Lipschitz map psi with measure-dilation constant
//! K = 1/|det A| and Lipschitz constant L, membership of phi in the
//! decreasing classes yields the operator bound
//!     |f o psi| <= K (C1 + C2 phi(L) L^n) |f|.
//! The check composes each test function exactly, recomputes both norms, and
//! compares every ratio against the bound.

use orlicz_lab::compose::{sufficiency_bound, MapSpec};
use orlicz_lab::domain::{BoxN, SimpleFunction};
use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::norms::SearchSpec;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    // Halving map on the line, Morrey data phi(r) = r^{-1/2}, Phi(t) = t.
    let map = serde_json::from_str::<MapSpec>(r#"{"kind":"diag","d":[0.5]}"#)
        .unwrap()
        .build()?;
    let phi_y = YoungFunction::power(1.0)?;
    let phi_g = GrowthFunction::morrey(1, 2.0)?;

    let tests = vec![
        SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?),
        SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 4.0)])?).scaled(2.0)?,
        SimpleFunction::indicator(BoxN::from_bounds(&[(-1.0, 1.0)])?)
            .add(&SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?).scaled(3.0)?)?,
    ];

    let rep = sufficiency_bound(&map, &phi_y, &phi_g, &tests, &SearchSpec::default(), 1e-10)?;
    println!(
        "K = {:.4}, L = {:.4}, C1 = {:.4}, C2 = {:.4} => bound {:.10}",
        rep.k_measure, rep.lipschitz, rep.c1, rep.c2, rep.bound
    );
    println!("{:>4} {:>16} {:>16} {:>12}", "fn", "|f o psi|", "|f|", "ratio");
    for r in &rep.ratios {
        println!(
            "{:>4} {:>16.10} {:>16.10} {:>12.8}",
            r.index, r.norm_composed, r.norm_original, r.ratio
        );
        assert!(r.ratio <= rep.bound * (1.0 + 1e-9));
    }
    assert!(rep.pass);

    // For the halving map the bound is K (C1 + C2 phi(1/2) / 2) with exact
    // class constants 1, i.e. 2 (1 + sqrt(2)/2) = 2 + sqrt(2); the sharpest
    // test function reaches sqrt(2).
    let expect = 2.0 + std::f64::consts::SQRT_2;
    println!("closed-form bound: {expect:.10}");
    assert!((rep.bound - expect).abs() <= 1e-9);

    // Expanding maps are cheap: composition with a dilation by 4 shrinks
    // norms for decreasing phi, and the bound reflects it through K < 1.
    let grow = serde_json::from_str::<MapSpec>(r#"{"kind":"diag","d":[4.0]}"#)
        .unwrap()
        .build()?;
    let rep4 = sufficiency_bound(&grow, &phi_y, &phi_g, &tests, &SearchSpec::default(), 1e-10)?;
    println!("dilation by 4: bound = {:.10}, worst ratio = {:.10}", rep4.bound, rep4
        .ratios
        .iter()
        .map(|r| r.ratio)
        .fold(0.0, f64::max));
    assert!(rep4.pass);

    Ok(())
}
