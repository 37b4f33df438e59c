//! Growth-function class certificates.
//!
//! A growth function phi belongs to the decreasing classes when, on the
//! certification grid, it is almost decreasing (constant C1), submultiplicative
//! (C2), and satisfies the reciprocal bound phi(r) * phi(1/r) <= C3 * phi(1).
//! Pure powers r^e with e in [-n, 0) sit in all three with constants exactly 1;
//! a log-oscillating phi keeps membership but with genuinely larger constants.

use orlicz_lab::growth::{log_spaced, CertifyOptions, GrowthFunction};

fn main() -> orlicz_lab::Result<()> {
    let grid = log_spaced(1e-6, 1e6, 48);
    let opts = CertifyOptions::default();

    let cases = vec![
        ("r^{-1/2} (Morrey n=2, p=4)", GrowthFunction::morrey(2, 4.0)?),
        ("|B(0,r)|^{-1/4} in R^2", GrowthFunction::ball_power(2, 4.0)?),
        ("r^{-1} (1 + |log r|)", GrowthFunction::power_log(-1.0)),
        ("r^{-1} * 2^{sin(log2 r)}", GrowthFunction::osc_log(-1.0, 2.0, 1.0)?),
        ("constant 3", GrowthFunction::constant(3.0)?),
        ("increasing r^{1/2}", GrowthFunction::power(0.5)),
    ];

    println!(
        "{:<34} {:>6} {:>10} {:>10} {:>10} {:>7} {:>7} {:>7}",
        "phi", "in_G0", "C1", "C2", "C3", "G^dec", "G1^dec", "G2^dec"
    );
    for (name, phi) in &cases {
        let c = phi.certify(&grid, &opts)?;
        println!(
            "{:<34} {:>6} {:>10.4} {:>10.4} {:>10.4} {:>7} {:>7} {:>7}",
            name,
            c.in_g0,
            c.almost_decreasing.value,
            c.submultiplicative.value,
            c.reciprocal.value,
            c.in_g_dec(),
            c.in_g1_dec(),
            c.in_g2_dec()
        );
    }

    // Doubling constants follow from C1 and C2: they bracket phi(r)/phi(2r).
    let osc = GrowthFunction::osc_log(-1.0, 2.0, 1.0)?;
    let cert = osc.certify(&grid, &opts)?;
    let (cl, cu) = cert.doubling_constants()?;
    println!("\noscillating phi doubling bracket: {cl:.4} <= phi(r)/phi(2r)... <= {cu:.4}");
    for r in [0.1, 1.0, 10.0] {
        let lhs = cl * osc.value_at(2.0 * r);
        let rhs = cu * osc.value_at(2.0 * r);
        assert!(lhs <= osc.value_at(r) * 1.000001 && osc.value_at(r) <= rhs * 1.000001);
        println!("  r = {r:>5}: phi(r) = {:.4}, bracket [{lhs:.4}, {rhs:.4}]", osc.value_at(r));
    }

    Ok(())
}
