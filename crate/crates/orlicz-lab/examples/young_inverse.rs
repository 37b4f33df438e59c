//! Young functions and their generalized inverses.
//!
//! Builds three Young functions (a power, the exponential preset, and a
//! piecewise function with a flat segment), evaluates each together with its
//! generalized inverse, and verifies the two-sided sandwich
//! `Phi(inv(u)-) <= u <= Phi(inv(u)+)` on a log grid.

use orlicz_lab::growth::log_spaced;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let power = YoungFunction::power(2.0)?;
    let expn = YoungFunction::appendix_exp(1)?;
    let flat = YoungFunction::flat_segment();

    for (name, phi) in [("t^2", &power), ("exp preset n=1", &expn), ("flat segment", &flat)] {
        println!("{name}");
        for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let v = phi.value_at(t);
            let back = phi.inverse_value(v);
            println!("  Phi({t}) = {v:.6e}   inv(Phi({t})) = {back:.6}");
        }
        let us = log_spaced(1e-6, 1e6, 2000);
        let sandwich = phi.verify_inverse_sandwich(&us, 1e-9)?;
        println!(
            "  inverse sandwich: {} points checked, {} violations",
            sandwich.checked,
            sandwich.violations.len()
        );
        assert!(sandwich.passed());
    }

    // The flat segment sends all of [0, 1] to zero, so the generalized
    // inverse at u = 0 is the right edge of the plateau, not 0.
    let inv0 = flat.generalized_inverse(0.0, 1e-12, 1e-300)?;
    println!("flat segment: inv(0) = {} (bracket [{}, {}])", inv0.value, inv0.lo, inv0.hi);
    assert!((inv0.value - 1.0).abs() <= 1e-9);

    Ok(())
}
