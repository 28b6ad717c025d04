//! The verification check list in its quick configuration.

use qubit_teleport::verify::{run_checks, VerifyConfig};

fn main() {
    let checks = run_checks(&VerifyConfig { seed: 42, quick: true });
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    std::process::exit(i32::from(failed > 0));
}
