//! Closed-form norms of box indicators.
//!
//! For E = [0,a_1] x ... x [0,a_k] x R^{n-k} (sides ascending) the cube-window
//! norm of the indicator reduces to a one-dimensional supremum over the window
//! side R:
//!     E(R) = (1 / phi(R)) / inv_Phi( R^k / prod_j min(a_j, R) ).
//! The scan splits R at the critical radii a_j, refines each regime, and
//! reports where the supremum sits. Closed-form asymptotics are available when
//! the relevant Psi profiles are monotone.

use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::indicators::{box_indicator_norm, box_norm_asymptotic, halfcylinder_norm, BoxSpec};
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let phi_y = YoungFunction::power(2.0)?;
    let phi_g = GrowthFunction::ball_power(2, 4.0)?;

    // With phi(R) = |B(0,R)|^{-1/4} and Phi(t) = t^2 in the plane, the profile
    // E(R) is constant between the two sides: every window side in [1, 4]
    // attains the same value.
    let spec = BoxSpec::new(vec![1.0, 4.0], 2)?;
    let rep = box_indicator_norm(&spec, &phi_y, &phi_g, 1e-12)?;
    println!(
        "sides (1,4): value = {:.10}, argmax R = {:.6}, regime = {}",
        rep.value, rep.argmax_scale, rep.regime
    );
    assert_eq!(rep.regime, "between");

    // Norm grows with the sides.
    let mut last = 0.0;
    for a in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let spec = BoxSpec::new(vec![a, 4.0 * a], 2)?;
        let rep = box_indicator_norm(&spec, &phi_y, &phi_g, 1e-12)?;
        println!("sides ({a}, {}): value = {:.10}", 4.0 * a, rep.value);
        assert!(rep.value >= last);
        last = rep.value;
    }

    // Morrey window: for phi = r^{-n/p}, Phi = t^q with nq/k < p < nq/(k-1)
    // the supremum concentrates at the second-largest side and the candidate
    // (1/phi(a_{k-1})) / inv_Phi(a_{k-1}^{k-1} / prod_{j<k-1} a_j)
    // matches the scan exactly.
    let phi_m = GrowthFunction::morrey(2, 1.5)?;
    let phi_q = YoungFunction::power(1.0)?;
    let spec = BoxSpec::new(vec![1.0, 4.0], 2)?;
    let asym = box_norm_asymptotic(&spec, &phi_q, &phi_m, 2)?;
    println!(
        "asymptotic: candidate = {:.10}, scan = {:.10}, ratio = {:.10}",
        asym.candidate, asym.scan_value, asym.ratio_scan_over_candidate
    );
    assert!(asym.comparable);
    assert!((asym.ratio_scan_over_candidate - 1.0).abs() <= 1e-6);

    // Half-cylinder [0, a_1] x R: one bounded side in the plane. When Psi_1
    // decreases the norm equals 1/phi(a_1) up to certified slack.
    let half = BoxSpec::new(vec![2.0], 2)?;
    let hrep = halfcylinder_norm(&half, &phi_q, &GrowthFunction::morrey(2, 3.0)?)?;
    println!(
        "half-cylinder a = 2: candidate = {:.10}, scan = {:.10}, comparable = {}",
        hrep.candidate, hrep.scan_value, hrep.comparable
    );
    assert!(hrep.comparable);

    Ok(())
}
