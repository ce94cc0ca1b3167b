//! Follows the six roots of the response denominator from 0 to 15 mW.

use ringcavity::modes;
use ringcavity::SystemParams;

fn main() -> ringcavity::Result<()> {
    let p = SystemParams::reference();
    let powers: Vec<f64> = (0..=15).map(|i| 1e-3 * i as f64).collect();
    let t = modes::sweep_roots(&p, &powers)?;
    println!("power_mW  positive-frequency roots (re, im)");
    for (i, &power) in t.powers.iter().enumerate() {
        let roots: Vec<String> = t
            .at(i)
            .iter()
            .filter(|z| z.re > 0.0)
            .map(|z| format!("({:.5}, {:+.5})", z.re, z.im))
            .collect();
        println!("{:>8.1}  {}", power * 1e3, roots.join("  "));
    }
    Ok(())
}
