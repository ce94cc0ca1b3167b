//! Writes the full CSV set into `figures/` (or the first argument):
//! probe and Stokes spectra for both mirror configurations, root
//! trajectories and the feature reports.

use ringcavity::cli::{self, Command, CommonArgs, FormatArg};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    let runs = [
        ("unequal", false, "0,2mW,15mW"),
        ("equal", true, "2mW,15mW"),
    ];
    for (name, equal, powers) in runs {
        let args = |sub: &str| CommonArgs {
            out: Some(format!("{out}/{name}/{sub}").into()),
            format: vec![FormatArg::Csv],
            power: Some(powers.into()),
            equal_frequencies: equal,
            ..CommonArgs::default()
        };
        let commands = [
            Command::Spectrum(args("spectrum")),
            Command::Stokes(args("stokes")),
            Command::Features(args("features")),
        ];
        for command in &commands {
            report(command);
        }
    }
    let sweep = CommonArgs {
        out: Some(format!("{out}/unequal/roots").into()),
        power: Some((0..=30).map(|i| format!("{}mW", 0.5 * i as f64)).collect::<Vec<_>>().join(",")),
        ..CommonArgs::default()
    };
    report(&Command::Roots(sweep));
}

fn report(command: &Command) {
    match cli::execute(command) {
        Ok(m) => m.files.iter().for_each(|f| println!("{:<9} {}", command.name(), f.path)),
        Err(e) => {
            eprintln!("{}: {e}", command.name());
            std::process::exit(e.exit_code());
        }
    }
}
