//! Weak Orlicz-Morrey norms.
//!
//! The weak window norm replaces the modular with the distribution bound
//! sup_t Phi(t) |{ |f|/lambda > t } ∩ B| <= |B|. It never exceeds the strong
//! norm, and for simple functions it equals the supremum over levels v of
//! v times the norm of the superlevel indicator.

use orlicz_lab::domain::{BoxN, SimpleFunction};
use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::norms::{
    orlicz_morrey_norm, weak_norm_identity, weak_orlicz_morrey_norm, SearchSpec, WindowKind,
};
use orlicz_lab::young::YoungFunction;

fn staircase() -> orlicz_lab::Result<SimpleFunction> {
    let mut f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)])?).scaled(4.0)?;
    f = f.add(&SimpleFunction::indicator(BoxN::from_bounds(&[(1.0, 2.0), (0.0, 1.0)])?).scaled(2.0)?)?;
    f = f.add(&SimpleFunction::indicator(BoxN::from_bounds(&[(2.0, 4.0), (0.0, 1.0)])?))?;
    Ok(f)
}

fn main() -> orlicz_lab::Result<()> {
    let phi_y = YoungFunction::power(2.0)?;
    let phi_g = GrowthFunction::morrey(2, 4.0)?;
    let search = SearchSpec::with_window(WindowKind::Cube);
    let f = staircase()?;

    let strong = orlicz_morrey_norm(&f, &phi_y, &phi_g, &search, 1e-10)?;
    let weak = weak_orlicz_morrey_norm(&f, &phi_y, &phi_g, &search, 1e-10)?;
    println!("strong = {:.10}", strong.value);
    println!("weak   = {:.10}", weak.value);
    assert!(weak.value <= strong.value * (1.0 + 1e-9));

    // Level decomposition: the weak norm is the best product
    // v * norm(indicator of {f >= v}) over the finitely many cell values.
    let identity = weak_norm_identity(&f, &phi_y, &phi_g, &search, 1e-10)?;
    println!("level supremum = {:.10} (relative gap {:.3e})", identity.level_supremum, identity.relative_gap);
    for term in &identity.levels {
        println!(
            "  level {:>4}: indicator norm {:.6}, product {:.6}",
            term.level, term.indicator_norm, term.product
        );
    }
    assert!(identity.relative_gap <= 1e-6);

    // For a single indicator the two norms agree.
    let ind = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)])?);
    let s = orlicz_morrey_norm(&ind, &phi_y, &phi_g, &search, 1e-10)?;
    let w = weak_orlicz_morrey_norm(&ind, &phi_y, &phi_g, &search, 1e-10)?;
    println!("indicator: strong = {:.10}, weak = {:.10}", s.value, w.value);
    assert!((s.value - w.value).abs() <= 1e-6 * s.value);

    Ok(())
}
