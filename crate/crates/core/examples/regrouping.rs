//! The four-qubit product state rewritten over the Φ basis of Alice's
//! three qubits, and the projector set built from it.

use qubit_teleport::measurement::born_probabilities;
use qubit_teleport::protocols::{
    build_phi_basis, build_projectors, prepare_joint_state, regrouped_joint_state, ChannelSpec, InputQubit,
};

fn main() -> qubit_teleport::Result<()> {
    let basis = build_phi_basis();
    for n in 1..=8 {
        println!("Φ{n} = {}", basis.phi(n));
    }
    println!("Gram defect {:.3e}", basis.gram_defect());

    let channel = ChannelSpec::from_alpha_sq(0.7)?;
    let input = InputQubit::real(0.28, 0.96)?;
    let product = prepare_joint_state(&input, &channel);
    let regrouped = regrouped_joint_state(&input, &channel, &basis);
    println!("max amplitude difference {:.3e}", product.max_abs_diff(&regrouped)?);

    let projectors = build_projectors(&basis);
    println!("completeness residual {:.3e}", projectors.completeness_residual());
    for (i, p) in born_probabilities(&product, &projectors)?.iter().enumerate() {
        println!("P{} {:.10}", i + 1, p);
    }
    Ok(())
}
