//! Stokes four-wave mixing: nearly cancelled at omega_m for unequal mirrors,
//! strong there for equal ones.

use ringcavity::params::{self, SystemParams};
use ringcavity::response::{self, Observable};

fn main() -> ringcavity::Result<()> {
    let grid = response::uniform_grid(0.5, 1.5, 20_001);
    for (name, p) in [
        ("unequal", SystemParams::reference()),
        ("equal", SystemParams::reference().with_equal_frequencies()),
    ] {
        for power in [2e-3, 15e-3] {
            let drive = params::pump_steady_state(&p, power)?;
            let spectrum = response::scan_spectrum(&p, &drive, &grid)?;
            let max = spectrum.max_of(Observable::StokesIntensity);
            let at = spectrum.nearest(1.0).stokes_intensity;
            println!("{name:<8} {:>2.0} mW  max {max:.4}  at omega_m {at:.3e}  ratio {:.2e}", power * 1e3, at / max);
        }
    }

    // The exact zero for the unequal pair, where the coupling bracket's real part cancels.
    let p = SystemParams::reference();
    let drive = params::pump_steady_state(&p, 2e-3)?;
    let model = response::ResponseModel::new(&p, &drive)?;
    let s = model.system();
    let zero = ((s.omega_1.powi(2) + s.omega_2.powi(2)) / 2.0).sqrt();
    println!("unequal  2 mW  at {zero:.7}: {:.3e}", model.point(zero)?.stokes_intensity);
    Ok(())
}
