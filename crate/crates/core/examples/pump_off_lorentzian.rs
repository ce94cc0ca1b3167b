//! With the pump off the probe sees a bare cavity Lorentzian of width 2 kappa.

use ringcavity::features::{self, FeatureOptions};
use ringcavity::params::{self, SystemParams};
use ringcavity::response::{self, ResponseModel};

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference();
    let drive = params::pump_steady_state(&p, 0.0)?;
    let model = ResponseModel::new(&p, &drive)?;
    let kappa = model.system().kappa;

    // The window must reach far into the tails for the half maximum to be exact.
    let xs = response::uniform_grid(-9.0, 11.0, 80_001);
    let ys: Vec<f64> = model.scan(&xs)?.iter().map(|pt| pt.nu_p).collect();
    let report = features::extract_from_samples(&xs, &ys, &FeatureOptions::default())?;
    let peak = &report.features[0];

    println!("kappa/omega_m       {kappa:.6}");
    println!("peak at             {:.6}  value {:.6}", peak.center, peak.extremum_value);
    println!("fwhm / 2 kappa      {:.5}", peak.fwhm / (2.0 * kappa));
    println!("stokes at resonance {:e}", model.point(1.0)?.stokes_intensity);
    Ok(())
}
