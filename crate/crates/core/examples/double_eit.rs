//! Two mirrors at 0.9 and 1.1 omega_m open two transparency windows with an
//! absorption peak between them. Compares the measured widths to the closed forms.

use ringcavity::features::{self, FeatureOptions, FrequencyMode, RefineOptions};
use ringcavity::params::{self, SystemParams};
use ringcavity::response::{self, Observable};

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference();
    for power in [2e-3, 15e-3] {
        let drive = params::pump_steady_state(&p, power)?;
        let spectrum = features::refined_spectrum(
            &p,
            &drive,
            &response::default_grid(),
            Observable::ProbeQuadrature,
            &RefineOptions::default(),
        )?;
        let report = features::extract_features(&spectrum, Observable::ProbeQuadrature, &FeatureOptions::default())?;
        println!("{:.0} mW, {} grid points", power * 1e3, spectrum.grid.len());
        for f in &report.features {
            println!("  {:<4} at {:.5}  fwhm {:.5}", f.kind.name(), f.center, f.fwhm);
        }
        let predictions = features::analytic_widths(&p, &drive, FrequencyMode::Unequal)?;
        for c in features::compare(&predictions, &report, 0.15) {
            println!(
                "  {:<26} numeric {:>9}  analytic {:.5}  regime ok {}",
                c.label,
                c.numeric.map_or("-".into(), |n| format!("{n:.5}")),
                c.analytic,
                c.valid
            );
        }
    }
    Ok(())
}
