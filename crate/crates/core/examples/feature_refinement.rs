//! Adaptive refinement resolving the mechanical-width dips at very low power.

use ringcavity::features::{self, FeatureKind, FeatureOptions, RefineOptions};
use ringcavity::params::{self, SystemParams};
use ringcavity::response::{self, Observable, ResponseModel};

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference();
    let drive = params::pump_steady_state(&p, 1e-6)?;
    let model = ResponseModel::new(&p, &drive)?;
    let initial = response::default_grid();
    for threshold in [1e-2, 1e-3, 1e-4] {
        let opts = RefineOptions {
            threshold,
            ..RefineOptions::default()
        };
        let grid = features::refine_grid(&model, &initial, Observable::ProbeQuadrature, &opts)?;
        let spectrum = response::ResponseSpectrum {
            points: model.scan(&grid)?,
            grid,
            drive,
            params: p,
        };
        let floor = FeatureOptions { prominence_floor: 1e-5 };
        match features::extract_features(&spectrum, Observable::ProbeQuadrature, &floor) {
            Ok(report) => {
                let dips: Vec<String> = report
                    .of_kind(FeatureKind::Dip)
                    .map(|f| format!("{:.6} (fwhm {:.2e})", f.center, f.fwhm))
                    .collect();
                println!("threshold {threshold:.0e}: {} points, dips {}", spectrum.grid.len(), dips.join(", "));
            }
            Err(e) => println!("threshold {threshold:.0e}: {} points, {e}", spectrum.grid.len()),
        }
    }
    Ok(())
}
