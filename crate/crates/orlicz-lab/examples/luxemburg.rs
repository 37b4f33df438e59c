//! Luxemburg norms over a fixed window.
//!
//! The norm uses the mean modular: lux(f, B) is the smallest lambda with
//! (1/|B|) integral of Phi(|f|/lambda) over B at most 1. Two closed forms
//! anchor the bisection:
//!   * a constant c on all of B has norm exactly c;
//!   * an indicator occupying the fraction theta of B has norm
//!     1 / inv_Phi(1/theta).

use orlicz_lab::domain::{Ball, BoxN, Cube, Region, SimpleFunction};
use orlicz_lab::norms::luxemburg_norm;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let phi = YoungFunction::power(2.0)?;

    // Constant over the window.
    let ball = Region::Ball(Ball::new(vec![0.0, 0.0], 1.0)?);
    let f = SimpleFunction::indicator(BoxN::from_bounds(&[(-2.0, 2.0), (-2.0, 2.0)])?).scaled(3.0)?;
    let est = luxemburg_norm(&f, &ball, &phi, 1e-12)?;
    println!("constant 3 on the ball: lux = {:.12} (exact geometry: {})", est.value, est.exact_geometry);
    assert!((est.value - 3.0).abs() <= 1e-9);

    // Indicator occupying a quarter of a cube: theta = 1/4, so with
    // Phi(t) = t^2 the norm is 1/sqrt(4)... inverted: 1/inv_Phi(4) = 1/2.
    let cube = Region::Cube(Cube::new(vec![0.0, 0.0], 1.0)?);
    let quarter = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (0.0, 1.0)])?);
    let est = luxemburg_norm(&quarter, &cube, &phi, 1e-12)?;
    println!("quarter indicator: lux = {:.12}", est.value);
    assert!((est.value - 0.5).abs() <= 1e-9);

    // Same occupancy fraction, different Young function.
    for q in [1.0, 1.5, 3.0] {
        let phi_q = YoungFunction::power(q)?;
        let est = luxemburg_norm(&quarter, &cube, &phi_q, 1e-12)?;
        let expected = 0.25f64.powf(1.0 / q);
        println!("q = {q}: lux = {:.12}, closed form {expected:.12}", est.value);
        assert!((est.value - expected).abs() <= 1e-8 * expected);
    }

    // Two-level staircase: the modular mixes both levels, and the bracket
    // [lo, hi] from bisection encloses the reported value.
    let step = SimpleFunction::indicator(BoxN::from_bounds(&[(-1.0, 0.0), (-1.0, 1.0)])?)
        .scaled(2.0)?
        .add(&SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0), (-1.0, 1.0)])?))?;
    let est = luxemburg_norm(&step, &cube, &phi, 1e-12)?;
    println!("staircase: lux = {:.12} in [{:.12}, {:.12}]", est.value, est.lo, est.hi);
    assert!(est.lo <= est.value && est.value <= est.hi);
    let modular = |lam: f64| 0.5 * (2.0f64 / lam).powi(2) + 0.5 * (1.0f64 / lam).powi(2);
    assert!((modular(est.value) - 1.0).abs() <= 1e-6);

    Ok(())
}
