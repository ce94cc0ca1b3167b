//! Strong-coupling dressed-mode estimates against the exact roots, and the
//! stability check for red- and blue-detuned pumps.

use ringcavity::modes;
use ringcavity::params::{self, SystemParams};

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference().with_equal_frequencies();
    for power in [2e-3, 15e-3, 30e-3] {
        let drive = params::pump_steady_state(&p, power)?;
        let dressed = modes::dressed_mode_predictions(&p, &drive)?;
        let set = modes::find_roots(&modes::build_denominator(&p, &drive)?, power)?;
        println!(
            "{:>2.0} mW  ratio {:>6.2} strong {:<5}  predicted {:.4} {:.4} {:.4}",
            power * 1e3,
            dressed.coupling_ratio,
            dressed.strong_coupling,
            dressed.lower.re,
            dressed.central.re,
            dressed.upper.re
        );
        let exact: Vec<String> = set.positive_branch().iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
        println!("        exact {}", exact.join(" "));
    }

    for (name, sign) in [("red", 1.0), ("blue", -1.0)] {
        let mut q = SystemParams::reference();
        q.effective_detuning = sign * q.omega_m;
        let drive = params::pump_steady_state(&q, 2e-3)?;
        let set = modes::find_roots(&modes::build_denominator(&q, &drive)?, 2e-3)?;
        let st = modes::stability_check(&set);
        let worst = st.margins.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("{name:<4} detuned  stable {}  smallest decay margin {worst:+.3e}", st.stable);
    }
    Ok(())
}
