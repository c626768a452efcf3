//! Exact 4-wise independence of the polynomial hash family, checked by
//! walking every seed, and uniform subspace sampling over F₂.

use shallow_prs::gf2::{exhaustive_joint_counts, sample_subspace, verify_kwise, FieldElement, KWiseFamily};
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    let mut rng = Seed(2024).rng();

    // GF(4): every seed, all four inputs.
    let counts = exhaustive_joint_counts(2, 4, &[0, 1, 2, 3])?;
    println!("GF(4) joint counts over 256 seeds: {counts:?}");

    // GF(16): 50 random 4-subsets of inputs, 65536 seeds each.
    let v = verify_kwise(4, 4, 50, &mut rng)?;
    println!("GF(16): {} input sets, every pattern seen {}..={} times (expected {}), uniform = {}", v.inputs.len(), v.min_count, v.max_count, v.expected_count, v.uniform);

    let fam = KWiseFamily::sample(10, 4, &mut rng)?;
    let bits: String = (0..32u64).map(|x| if fam.eval_value(x) { '1' } else { '0' }).collect();
    println!("one member on inputs 0..32: {bits}");
    let x = FieldElement::new(4, 0b0010)?;
    println!("x in GF(16) projects to {}", x.projection());

    let s = sample_subspace(8, 3, &mut rng)?;
    println!("random 3-dimensional subspace of F₂⁸, basis {:?}", s.to_hex_rows());
    for v in s.enumerate()? {
        print!("{v} ");
    }
    println!();
    Ok(())
}
