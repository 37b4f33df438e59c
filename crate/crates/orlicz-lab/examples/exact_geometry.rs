//! Exact window geometry.
//!
//! Modular integrals need |window ∩ cell| for every cell of a simple
//! function. Box-box intersections are closed form in any dimension;
//! ball-box intersections are closed form on the line and in the plane
//! (circular segments), sliced in dimension 3, and certified brackets from
//! adaptive subdivision beyond that.

use orlicz_lab::domain::{ball_box_volume, circle_box_area, Ball, BoxN, Region};
use std::f64::consts::PI;

fn main() -> orlicz_lab::Result<()> {
    // A quadrant of the unit disk, exactly pi/4.
    let area = circle_box_area(1.0, 0.0, 2.0, 0.0, 2.0);
    println!("quadrant of unit disk: {area:.12} (pi/4 = {:.12})", PI / 4.0);
    assert!((area - PI / 4.0).abs() <= 1e-12);

    // Ball-box volume in the plane is exact.
    let ball = Ball::new(vec![0.0, 0.0], 1.0)?;
    let bx = BoxN::from_bounds(&[(-0.5, 0.5), (-2.0, 2.0)])?;
    let v = ball_box_volume(&ball, &bx, 1e-12, 1 << 16);
    // Vertical strip of the unit disk: 2 * (asin(1/2) + (1/2) sqrt(3)/2).
    let strip = 2.0 * (0.5f64.asin() + 0.5 * (3.0f64).sqrt() / 2.0);
    println!("strip of unit disk: [{:.12}, {:.12}], exact = {}", v.lo, v.hi, v.exact);
    assert!(v.exact && (v.mid() - strip).abs() <= 1e-12);

    // In dimension 4 the result is a certified bracket instead; the
    // tolerance is relative to the full ball volume, and subdivision
    // converges slowly there, so ask for a percent, not machine epsilon.
    let ball4 = Ball::new(vec![0.0; 4], 1.0)?;
    let bx4 = BoxN::from_bounds(&[(0.0, 1.0); 4])?;
    let v4 = ball_box_volume(&ball4, &bx4, 0.01, 1 << 22);
    let exact4 = ball4.volume() / 16.0;
    println!(
        "orthant of 4-ball: [{:.10}, {:.10}] width {:.2e}, certified = {}",
        v4.lo, v4.hi, v4.width(), v4.certified
    );
    assert!(v4.lo <= exact4 && exact4 <= v4.hi);
    assert!(v4.certified);

    // Region::intersect_box is the uniform entry point used by the norms.
    let region = Region::Ball(ball);
    let b = region.intersect_box(&BoxN::from_bounds(&[(0.0, 3.0), (0.0, 3.0)])?);
    println!("disk orthant via Region: {:.12}", b.mid());
    assert!((b.mid() - PI / 4.0).abs() <= 1e-12);

    Ok(())
}
