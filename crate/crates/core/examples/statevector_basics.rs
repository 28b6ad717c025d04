//! Build small registers, apply gates and pull a qubit back out of a
//! product state.

use qubit_teleport::statevec::{
    apply_gate, extract_subsystem, fidelity, tensor_product, QubitLabel, SingleQubitGate, StateVector,
};

fn main() -> qubit_teleport::Result<()> {
    let plus = StateVector::plus();
    let pair = StateVector::from_real(&[0.8, 0.0, 0.0, 0.6])?;
    let register = tensor_product(&plus, &pair);
    println!("|+⟩ ⊗ (0.8|00⟩ + 0.6|11⟩) = {register}");

    let flipped = apply_gate(&register, QubitLabel(0), &SingleQubitGate::pauli_z())?;
    println!("after σz on qubit 0:      {flipped}");

    let product = tensor_product(&StateVector::one(), &plus);
    let second = extract_subsystem(&product, &[QubitLabel(0)], &StateVector::one())?;
    println!("qubit 1 of |1⟩|+⟩ = {second}, fidelity with |+⟩ {:.12}", fidelity(&second, &plus)?);
    Ok(())
}
