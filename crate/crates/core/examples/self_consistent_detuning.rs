//! Radiation pressure shifts the cavity; solves for the effective detuning
//! and shows a bistable case.

use ringcavity::params::{self, SystemParams};

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference();
    for power in [0.0, 2e-3, 15e-3] {
        let branches = params::self_consistent_detuning(&p, p.omega_m, power)?;
        for b in &branches {
            println!(
                "{:>4.0} mW  bare 1.0  effective {:.8}  G1/omega_m {:.5}",
                power * 1e3,
                b.detuning / p.omega_m,
                b.drive.g_eff_1 / p.omega_m
            );
        }
    }

    let mut strong = p;
    strong.pull_parameter *= 4.0;
    let branches = params::self_consistent_detuning(&strong, 3.0 * p.omega_m, 15e-3)?;
    let values: Vec<String> = branches.iter().map(|b| format!("{:.5}", b.detuning / p.omega_m)).collect();
    println!("stronger pull, bare 3.0: {} branches [{}]", branches.len(), values.join(", "));
    Ok(())
}
