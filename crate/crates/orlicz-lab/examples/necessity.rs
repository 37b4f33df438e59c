//! Necessity certificate from sampled Jacobians.
//!
//! If composition with psi is bounded both ways, then for each sample point
//! the product of the Jacobian's singular values sigma must keep
//! v = phi(prod sigma) inside a band around 1 determined by the class
//! constants of phi. Volume-preserving maps sit at v = phi(1) exactly; a
//! uniformly contracting map drifts out of any tight band.

use orlicz_lab::compose::{necessity_certificate, DiffeoSample, JacobianSample, Mat};
use orlicz_lab::growth::GrowthFunction;

fn rotation_sample(x: [f64; 2], theta: f64) -> orlicz_lab::Result<JacobianSample> {
    let j = Mat::from_rows(&[
        vec![theta.cos(), -theta.sin()],
        vec![theta.sin(), theta.cos()],
    ])?;
    Ok(JacobianSample { x: x.to_vec(), jacobian: j })
}

fn main() -> orlicz_lab::Result<()> {
    let phi_g = GrowthFunction::morrey(2, 4.0)?;

    // A field of rotations (volume preserving): every sample passes.
    let mut samples = Vec::new();
    for (i, x) in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 3.0]].iter().enumerate() {
        samples.push(rotation_sample(*x, 0.3 * i as f64)?);
    }
    let rep = necessity_certificate(&DiffeoSample { samples }, &phi_g, None)?;
    println!("rotations: band = {:.4}, pass = {}", rep.band, rep.pass);
    for s in &rep.samples {
        println!(
            "  sample {}: sigma = {:?}, v = {:.10}, in band: {}",
            s.index, s.singular_values, s.value, s.in_band
        );
        assert!((s.value - 1.0).abs() <= 1e-9);
    }
    assert!(rep.pass);

    // Strong contraction x -> x/8 against a tight band: the sampled value
    // phi(1/64) = 8 escapes, flagging that no two-sided boundedness is
    // possible for this phi without further structure.
    let contract = DiffeoSample {
        samples: vec![JacobianSample {
            x: vec![0.0, 0.0],
            jacobian: Mat::diagonal(&[0.125, 0.125])?,
        }],
    };
    let rep = necessity_certificate(&contract, &phi_g, Some(2.0))?;
    println!("contraction x/8: v = {:.4}, band = {:.4}, pass = {}", rep.samples[0].value, rep.band, rep.pass);
    assert!(!rep.pass);

    // Singular Jacobians cannot be certified; the sample is recorded with a
    // note and the certificate as a whole fails.
    let bad = DiffeoSample {
        samples: vec![JacobianSample {
            x: vec![0.0, 0.0],
            jacobian: Mat::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]])?,
        }],
    };
    let rep = necessity_certificate(&bad, &phi_g, None)?;
    println!("singular sample: pass = {}, note = {:?}", rep.pass, rep.samples[0].note);
    assert!(!rep.pass);

    Ok(())
}
