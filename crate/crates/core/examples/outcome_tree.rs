//! Exhaustive outcome tree of the qubit-assisted protocol next to the
//! closed-form branch probabilities.

use qubit_teleport::analysis::analytic_outcome_probs;
use qubit_teleport::protocols::{enumerate_branches, success_probability, ChannelSpec, InputQubit};

fn main() -> qubit_teleport::Result<()> {
    let channel = ChannelSpec::from_alpha_sq(0.8)?;
    let input = InputQubit::real(0.6, 0.8)?;
    let tree = enumerate_branches(&input, &channel);
    let analytic = analytic_outcome_probs(&channel, &input);

    println!("{:<16} {:>12} {:>12} {:>8} {:>10}", "branch", "enumerated", "closed form", "success", "fidelity");
    for r in &tree {
        let fid = r.fidelity_with(&input).map_or("-".into(), |f| format!("{f:.6}"));
        println!(
            "{:<16} {:>12.8} {:>12.8} {:>8} {:>10}",
            r.outcome_label.as_str(),
            r.branch_probability,
            analytic.per_outcome[&r.outcome_label],
            r.success,
            fid
        );
    }
    println!("total success {:.12} (2β² = {:.12})", success_probability(&tree), analytic.success_total);
    Ok(())
}
