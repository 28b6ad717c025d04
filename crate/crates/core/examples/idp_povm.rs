//! Unambiguous discrimination of two nonorthogonal qubit states, as used
//! inside each two-dimensional subspace.

use qubit_teleport::measurement::{build_idp_povm, povm_branches};
use qubit_teleport::statevec::{QubitLabel, StateVector};

fn main() -> qubit_teleport::Result<()> {
    let (a2, b2) = (0.8_f64, 0.2_f64);
    let n = (a2 * a2 + b2 * b2).sqrt();
    let u_plus = StateVector::from_real(&[a2 / n, b2 / n])?;
    let u_minus = StateVector::from_real(&[a2 / n, -b2 / n])?;
    let povm = build_idp_povm(&u_plus, &u_minus)?;

    println!("overlap |⟨u+|u-⟩| = {:.6}", u_plus.inner(&u_minus)?.norm());
    println!("validation: {:?}", povm.validation());
    for (name, u) in [("u+", &u_plus), ("u-", &u_minus)] {
        println!("{name}: conclusive probability {:.6}", povm.conclusive_probability(u));
        for b in povm_branches(u, &povm, QubitLabel(0))? {
            println!("  {:?}: {:.6}", povm.labels()[b.outcome_index], b.probability);
        }
    }
    println!("2β⁴/(α⁴+β⁴) = {:.6}", 2.0 * b2 * b2 / (a2 * a2 + b2 * b2));
    Ok(())
}
