//! One seeded run of each protocol: outcome, classical message and Bob's
//! corrected qubit.

use qubit_teleport::protocols::{encode_classical_message, ChannelSpec, InputQubit, Protocol};
use qubit_teleport::random::RandomSource;

fn main() -> qubit_teleport::Result<()> {
    let channel = ChannelSpec::from_alpha_sq(0.8)?;
    let input = InputQubit::real(0.6, 0.8)?;
    for protocol in Protocol::ALL {
        let teleporter = protocol.prepare(channel);
        let mut rng = RandomSource::seeded(5);
        for _ in 0..3 {
            let record = teleporter.run(&input, &mut rng);
            let bob = record.bob_state.as_ref().map_or("-".to_string(), |s| s.to_string());
            let fid = record.fidelity_with(&input).map_or("-".to_string(), |f| format!("{f:.12}"));
            println!(
                "{:<15} {:<16} message {} bob {bob} fidelity {fid}",
                protocol.as_str(),
                record.outcome_label.as_str(),
                encode_classical_message(&record),
            );
        }
    }
    Ok(())
}
