//! Monotonicity profiles Psi_k and the Morrey window.
//!
//! For the Morrey pair phi(r) = r^{-n/p}, Phi(t) = t^q the profile
//! Psi_k(C, r) = 1 / (phi(r) inv_Phi(C r^k)) is the pure power
//! C^{-1/q} r^{n/p - k/q}, so its direction flips at p = n q / k.
//! The closed-form box asymptotics need the pair condition
//! "Psi_{k-1} almost increasing and Psi_k almost decreasing", which for
//! powers is exactly the window n q / k < p < n q / (k - 1).

use orlicz_lab::growth::{log_spaced, psi_monotonicity, GrowthFunction, PSI_DIRECTION_THRESHOLD};
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let n = 2usize;
    let q = 1.0;
    let phi_y = YoungFunction::power(q)?;
    let c_grid = [0.25, 1.0, 4.0];
    let r_grid = log_spaced(1e-6, 1e6, 48);

    println!("single profile, k = 2 (flip at p = n q / k = {}):", n as f64 * q / 2.0);
    println!("{:>6} {:>22} {:>12} {:>12}", "p", "direction", "C_inc", "C_dec");
    for p in [0.6, 0.8, 1.0, 1.2, 1.5, 2.0, 3.0] {
        let phi_g = GrowthFunction::morrey(n, p)?;
        let prof = psi_monotonicity(&phi_g, &phi_y, 2, &c_grid, &r_grid, PSI_DIRECTION_THRESHOLD)?;
        println!(
            "{:>6} {:>22} {:>12.4} {:>12.4}",
            p,
            format!("{:?}", prof.direction),
            prof.increasing_constant,
            prof.decreasing_constant
        );
    }

    // Pair condition for k = 2: window (n q / 2, n q) = (1, 2).
    println!("\npair condition Psi_1 up / Psi_2 down, window (1, 2):");
    for p in [0.8, 1.2, 1.5, 1.9, 2.5] {
        let phi_g = GrowthFunction::morrey(n, p)?;
        let p1 = psi_monotonicity(&phi_g, &phi_y, 1, &c_grid, &r_grid, PSI_DIRECTION_THRESHOLD)?;
        let p2 = psi_monotonicity(&phi_g, &phi_y, 2, &c_grid, &r_grid, PSI_DIRECTION_THRESHOLD)?;
        let in_window = p1.direction.is_almost_increasing() && p2.direction.is_almost_decreasing();
        println!("  p = {p:>4}: Psi_1 {:?}, Psi_2 {:?} -> window {in_window}", p1.direction, p2.direction);
        assert_eq!(in_window, p > 1.0 && p < 2.0);
    }

    Ok(())
}
