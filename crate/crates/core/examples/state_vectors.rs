//! Reduced states, entropies and Schmidt decompositions of a small register.

use shallow_prs::ensembles::sample_haar_state;
use shallow_prs::rng::Seed;
use shallow_prs::statevec::{
    distance_to_maximally_mixed, entanglement_entropy, partial_trace, purity, schmidt, tensor, vn_entropy, StateVector, SubsystemMask,
};

fn main() -> shallow_prs::Result<()> {
    let mut rng = Seed(7).rng();
    let psi = sample_haar_state(6, &mut rng)?;

    for k in 1..6 {
        let rho = partial_trace(&psi, &SubsystemMask::prefix(k))?;
        println!(
            "first {k} qubits: purity {:.4}, entropy {:.4} bits, ‖ρ − I/2^k‖₁ = {:.4}",
            purity(&rho),
            vn_entropy(&rho),
            distance_to_maximally_mixed(&rho)
        );
        assert!((entanglement_entropy(&psi, k)? - vn_entropy(&rho)).abs() < 1e-9);
    }

    // A product state across 2|4 has Schmidt rank 1.
    let product = tensor(&StateVector::plus(2)?, &sample_haar_state(4, &mut rng)?)?;
    let cut = SubsystemMask::prefix(2);
    println!("product state rank across 2|4: {}", schmidt(&product, &cut)?.rank());
    let d = schmidt(&psi, &cut)?;
    println!("Haar state rank across 2|4: {}, coefficients {:.4?}", d.rank(), d.coeffs);
    println!("reconstruction fidelity {:.12}", d.reconstruct().fidelity(&psi)?);
    Ok(())
}
