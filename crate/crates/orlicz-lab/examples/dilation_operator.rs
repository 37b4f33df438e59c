//! Dilation operators f -> f(c x).
//!
//! Composing with the uniform dilation x -> c x rescales every window, so the
//! operator norm on the Orlicz-Morrey space is controlled by the ratio
//! phi(c r) / phi(r). The report brackets the operator norm by the inf and sup
//! of that ratio over a log grid and records phi(c) for comparison.

use orlicz_lab::compose::dilation_opnorm;
use orlicz_lab::growth::{log_spaced, GrowthFunction};

fn main() -> orlicz_lab::Result<()> {
    let grid = log_spaced(1e-6, 1e6, 400);

    // Pure power: the ratio is constant, both bounds collapse onto phi(c).
    let power = GrowthFunction::morrey(2, 4.0)?;
    println!("phi(r) = r^(-1/2):");
    println!("{:>8} {:>14} {:>14} {:>14}", "c", "lower", "upper", "phi(c)");
    for j in [-4i32, -2, 0, 2, 4] {
        let c = (2.0f64).powi(j);
        let rep = dilation_opnorm(&power, c, &grid)?;
        println!("{:>8} {:>14.10} {:>14.10} {:>14.10}", c, rep.lower, rep.upper, rep.phi_c);
        assert!((rep.lower - rep.phi_c).abs() <= 1e-9 * rep.phi_c);
        assert!((rep.upper - rep.phi_c).abs() <= 1e-9 * rep.phi_c);
    }

    // Oscillating phi: the ratio genuinely moves, so the bracket opens up,
    // but class constants still pin it to phi(c) within certified slack.
    let osc = GrowthFunction::osc_log(-1.0, 2.0, 1.0)?;
    let cert = osc.certify(&log_spaced(1e-6, 1e6, 48), &Default::default())?;
    let c2 = cert.submultiplicative.value;
    let c3 = cert.reciprocal.value;
    println!("\nphi(r) = r^(-1) 2^sin(log2 r)  (C2 = {c2:.4}, C3 = {c3:.4}):");
    for c in [0.25, 4.0] {
        let rep = dilation_opnorm(&osc, c, &grid)?;
        println!(
            "  c = {c}: bracket [{:.6}, {:.6}], phi(c) = {:.6}",
            rep.lower, rep.upper, rep.phi_c
        );
        assert!(rep.lower <= c2 * rep.phi_c * (1.0 + 1e-9));
        assert!(rep.upper * (1.0 + 1e-9) >= rep.phi_c / (c2 * c3));
    }

    // The grid must span enough decades to be trusted.
    let short = log_spaced(0.5, 2.0, 50);
    assert!(dilation_opnorm(&power, 2.0, &short).is_err());
    println!("\nshort grid rejected as expected");

    Ok(())
}
