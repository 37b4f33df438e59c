//! Exact composition with box-preserving maps and indicator transfer.
//!
//! Maps with exactly one nonzero entry per row and column send boxes to
//! boxes, so f(psi(x)) is again a simple function with no approximation.
//! The transfer report tracks how indicator norms move under preimages.

use orlicz_lab::compose::{compose_simple, indicator_transfer_check, MapSpec};
use orlicz_lab::domain::{BoxN, SimpleFunction};
use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    // psi(x, y) = (2y + 1, -x): a signed permutation with scaling and shift.
    let map = serde_json::from_str::<MapSpec>(
        r#"{"kind":"perm","perm":[1,0],"signs":[1,-1],"shift":[1.0,0.0]}"#,
    )
    .unwrap()
    .build()?;
    let scaled = serde_json::from_str::<MapSpec>(r#"{"kind":"diag","d":[0.5,2.0]}"#)
        .unwrap()
        .build()?;

    let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 2.0), (0.0, 1.0)])?).scaled(3.0)?;
    let g = compose_simple(&f, &map)?;
    println!("composed cells:");
    for cell in g.cells() {
        let b = &cell.region;
        println!(
            "  value {} on {:?} x {:?}",
            cell.value,
            (b.intervals[0].lo, b.intervals[0].hi),
            (b.intervals[1].lo, b.intervals[1].hi)
        );
    }
    // Spot check: f(psi(-0.5, 0.25)) = f(1.5, 0.5) = 3.
    assert_eq!(g.eval(&[-0.5, 0.25]), f.eval(&[1.5, 0.5]));
    assert_eq!(g.eval(&[-0.5, 0.25]), 3.0);

    // Indicator transfer for the diagonal map: preimages of boxes stretch by
    // 1/d per axis, and the norm ratio reflects the measure change.
    let phi_y = YoungFunction::power(2.0)?;
    let phi_g = GrowthFunction::morrey(2, 4.0)?;
    let regions = vec![
        BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)])?,
        BoxN::from_bounds(&[(0.0, 4.0), (0.0, 0.5)])?,
        BoxN::from_bounds(&[(-2.0, 0.0), (-1.0, 3.0)])?,
    ];
    let rep = indicator_transfer_check(&scaled, &regions, &phi_y, &phi_g)?;
    println!("\ntransfer (K = {}):", rep.k_measure);
    for item in &rep.items {
        println!(
            "  region {}: |chi_pre| / |chi| = {:.10} ({:.6} / {:.6})",
            item.index, item.ratio, item.norm_preimage, item.norm_region
        );
    }
    println!("max ratio = {:.10}", rep.max_ratio);
    assert!(rep.max_ratio >= 1.0 - 1e-9);

    // Rotations are not box-preserving: the exact path refuses them.
    let rot = serde_json::from_str::<MapSpec>(
        r#"{"kind":"affine","A":[[0.7071067811865476,-0.7071067811865475],[0.7071067811865475,0.7071067811865476]]}"#,
    )
    .unwrap()
    .build()?;
    assert!(compose_simple(&f, &rot).is_err());
    println!("\nrotation rejected by the exact path (rasterized path handles it)");

    Ok(())
}
