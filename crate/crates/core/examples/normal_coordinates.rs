//! Relative and center-of-mass mirror coordinates and the mixing term chi.

use ringcavity::normalcoords;
use ringcavity::params::{self, SystemParams};

fn main() -> ringcavity::Result<()> {
    for (name, p) in [
        ("unequal", SystemParams::reference()),
        ("equal", SystemParams::reference().with_equal_frequencies()),
    ] {
        let (g1, g2) = params::derive_couplings(&p)?;
        let c = normalcoords::transformed_coeffs(&p)?;
        println!(
            "{name:<8} g1 {g1:.1} g2 {g2:.1} rad/s  omega/omega_m {:.5}  chi/omega_m {:+.5}  {:?}",
            c.omega / p.omega_m,
            c.chi / p.omega_m,
            c.regime
        );
        let x = normalcoords::to_collective(0.3, 0.0, -0.1, 0.2, g1, g2)?;
        let back = normalcoords::from_collective(&x, g1, g2)?;
        println!("         q_a {:+.5} q_s {:+.5}  back {:+.5} {:+.5}", x.q_a, x.q_s, back.0, back.2);
    }
    Ok(())
}
