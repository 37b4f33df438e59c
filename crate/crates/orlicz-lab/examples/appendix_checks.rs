//! Two worked estimates with the exponential Young preset.
//!
//! Check 1 embeds the quadratic ball-power space into the exponential space
//! with growth index -1/4: for simple functions bounded by 2^{-n} the target
//! norm is at most a dimensional constant times the source norm.
//! Check 2 sandwiches the sup norm between inf/sup of phi times inv_Phi(1)
//! times the Orlicz-Morrey norm, for bounded phi.

use orlicz_lab::appendix::{
    appendix_a_embedding, appendix_b_sandwich, embedding_chain_constant, majorant_constant,
};
use orlicz_lab::domain::{BoxN, SimpleFunction};
use orlicz_lab::growth::GrowthFunction;
use orlicz_lab::norms::SearchSpec;
use orlicz_lab::young::YoungFunction;

fn main() -> orlicz_lab::Result<()> {
    let search = SearchSpec::default();

    println!("chain constants: n = 1 -> {:.6}, n = 2 -> {:.6}", embedding_chain_constant(1), embedding_chain_constant(2));
    println!("majorant kappa:  n = 1 -> {:.6}, n = 2 -> {:.6}", majorant_constant(1), majorant_constant(2));

    // Small staircase on the line (values stay below 2^{-1} = 0.5).
    let f = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?)
        .scaled(0.25)?
        .add(&SimpleFunction::indicator(BoxN::from_bounds(&[(1.0, 3.0)])?).scaled(0.125)?)?;
    let rep = appendix_a_embedding(&f, &search)?;
    println!(
        "embedding: target = {:.8}, source = {:.8}, bound = {:.8}, ratio = {:.4}",
        rep.norm_target, rep.norm_source, rep.bound, rep.ratio
    );
    assert!(rep.pass);

    // Values at or above 2^{-n} are outside the working range of the chain.
    let big = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?).scaled(0.6)?;
    assert!(appendix_a_embedding(&big, &search).is_err());
    println!("value 0.6 rejected (working range is < 0.5 on the line)");

    // Sup-norm sandwich with a bounded oscillating phi: 1 <= phi <= 3.
    let phi_y = YoungFunction::power(2.0)?;
    let phi_g = GrowthFunction::custom(|r| 2.0 + (r.ln()).sin());
    let g = SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?)
        .add(&SimpleFunction::indicator(BoxN::from_bounds(&[(0.25, 0.75)])?).scaled(2.0)?)?;
    let rep = appendix_b_sandwich(&g, &phi_y, &phi_g, &search, 1e-6)?;
    println!(
        "sandwich: {:.8} <= |f|_inf = {:.8} <= {:.8}  (inf phi = {:.6}, sup phi = {:.6})",
        rep.lhs, rep.mid, rep.rhs, rep.inf_phi, rep.sup_phi
    );
    assert!(rep.pass);

    // Unbounded phi has no sandwich: the precondition is enforced.
    let unbounded = GrowthFunction::morrey(1, 2.0)?;
    assert!(appendix_b_sandwich(&g, &phi_y, &unbounded, &search, 1e-6).is_err());
    println!("unbounded phi rejected");

    Ok(())
}
