//! Command-line front end: config loading, the four subcommands and their outputs.
//!
//! Every command computes all results before touching the output directory,
//! so a failing run leaves no partial files behind.

pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{
    self, AnalyticComparison, FeatureKind, FeatureReport, FrequencyMode,
};
use crate::modes::{self, DressedModes, RootSet, Stability};
use crate::normalcoords::{self, MirrorRegime};
use crate::params::{self, DriveState, SystemParams};
use crate::response::{self, Observable, ResponseSpectrum};

pub use config::{GridSpec, OutputFormat, PowerSpec, RunConfig, SweepScale, PAPER_CONFIG};
pub use output::{FileRecord, RunManifest, MANIFEST_NAME};
use output::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "ringcavity", version, about = "Probe and Stokes response of a two-mirror optomechanical ring cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probe transmission quadrature versus detuning.
    Spectrum(CommonArgs),
    /// Stokes four-wave-mixing intensity versus detuning.
    Stokes(CommonArgs),
    /// Denominator roots along the power list, with dressed-mode predictions.
    Roots(CommonArgs),
    /// Peaks, dips, widths and analytic comparisons.
    Features(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Run config; the bundled operating point when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; repeat for both.
    #[arg(long, value_enum)]
    pub format: Vec<FormatArg>,
    /// Comma-separated pump powers with units, e.g. `0,2mW,15mW`.
    #[arg(long, allow_hyphen_values = true)]
    pub power: Option<String>,
    /// Put both mirrors at omega_m.
    #[arg(long)]
    pub equal_frequencies: bool,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Stokes(_) => "stokes",
            Command::Roots(_) => "roots",
            Command::Features(_) => "features",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a) | Command::Stokes(a) | Command::Roots(a) | Command::Features(a) => a,
        }
    }
}

/// Config after command-line overrides.
pub fn resolve_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::parse(PAPER_CONFIG)?,
    };
    if let Some(list) = &args.power {
        config.powers = PowerSpec::List(config::parse_power_list(list)?);
    }
    if args.equal_frequencies {
        config.set_equal_frequencies();
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if !args.format.is_empty() {
        config.formats = args
            .format
            .iter()
            .map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            })
            .collect();
        config.formats.dedup();
    }
    config.params()?;
    if config.powers.powers().is_empty() {
        return Err(Error::Usage("no pump powers given".into()));
    }
    Ok(config)
}

/// Runs one subcommand and writes its outputs plus the manifest.
pub fn execute(command: &Command) -> Result<RunManifest> {
    let config = resolve_config(command.args())?;
    let artifacts = match command {
        Command::Spectrum(_) => spectrum_artifacts(&config, Observable::ProbeQuadrature)?,
        Command::Stokes(_) => spectrum_artifacts(&config, Observable::StokesIntensity)?,
        Command::Roots(_) => roots_artifacts(&config)?,
        Command::Features(_) => features_artifacts(&config)?,
    };
    output::write_run(
        &config.output_dir,
        command.name(),
        config.render(),
        config.powers.powers(),
        &artifacts,
    )
}

/// `2 mW` -> `2mW`, `0.5 mW` -> `0p5mW`.
pub fn power_label(power: f64) -> String {
    let mw = (power * 1e3 * 1e9).round() / 1e9;
    format!("{mw}mW").replace('.', "p").replace('-', "m")
}

fn spectrum_for(config: &RunConfig, params: &SystemParams, drive: &DriveState, observable: Observable) -> Result<ResponseSpectrum> {
    let grid = config.grid.points();
    if config.refine {
        features::refined_spectrum(params, drive, &grid, observable, &config.refine_options())
    } else {
        response::scan_spectrum(params, drive, &grid)
    }
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    power_w: f64,
    observable: &'static str,
    g_eff_1_over_omega_m: f64,
    g_eff_2_over_omega_m: f64,
    delta_over_omega_m: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    nu_p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_eps_out_plus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im_eps_out_plus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stokes_intensity: Option<Vec<f64>>,
}

fn spectrum_artifacts(config: &RunConfig, observable: Observable) -> Result<Vec<(String, String)>> {
    let params = config.params()?;
    let stem = match observable {
        Observable::ProbeQuadrature => "spectrum",
        Observable::StokesIntensity => "stokes",
    };
    let mut out = Vec::new();
    for power in config.powers.powers() {
        let drive = params::pump_steady_state(&params, power)?;
        let spectrum = spectrum_for(config, &params, &drive, observable)?;
        let label = power_label(power);
        for format in &config.formats {
            let body = match format {
                OutputFormat::Csv => spectrum_csv(&spectrum, observable),
                OutputFormat::Json => {
                    let pts = &spectrum.points;
                    let probe = observable == Observable::ProbeQuadrature;
                    output::json(&SpectrumJson {
                        power_w: power,
                        observable: stem,
                        g_eff_1_over_omega_m: drive.g_eff_1 / params.omega_m,
                        g_eff_2_over_omega_m: drive.g_eff_2 / params.omega_m,
                        delta_over_omega_m: &spectrum.grid,
                        nu_p: probe.then(|| pts.iter().map(|p| p.nu_p).collect()),
                        re_eps_out_plus: probe.then(|| pts.iter().map(|p| p.eps_out_plus.re).collect()),
                        im_eps_out_plus: probe.then(|| pts.iter().map(|p| p.eps_out_plus.im).collect()),
                        stokes_intensity: (!probe).then(|| pts.iter().map(|p| p.stokes_intensity).collect()),
                    })
                }
            };
            out.push((format!("{stem}_{label}.{}", format.name()), body));
        }
    }
    Ok(out)
}

fn spectrum_csv(spectrum: &ResponseSpectrum, observable: Observable) -> String {
    match observable {
        Observable::ProbeQuadrature => {
            let mut t = Table::new(&["delta_over_omega_m", "nu_p", "re_eps_out_plus", "im_eps_out_plus"]);
            for (x, p) in spectrum.grid.iter().zip(&spectrum.points) {
                t.row(vec![(*x).into(), p.nu_p.into(), p.eps_out_plus.re.into(), p.eps_out_plus.im.into()]);
            }
            t.finish()
        }
        Observable::StokesIntensity => {
            let mut t = Table::new(&["delta_over_omega_m", "stokes_intensity"]);
            for (x, p) in spectrum.grid.iter().zip(&spectrum.points) {
                t.row(vec![(*x).into(), p.stokes_intensity.into()]);
            }
            t.finish()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RootsRow {
    power_w: f64,
    /// Path order: root `k` is continuous in power across rows.
    roots: Vec<[f64; 2]>,
    residuals: [f64; 6],
    dressed: DressedModes,
    stability: Stability,
}

#[derive(Serialize)]
struct RootsJson {
    rows: Vec<RootsRow>,
}

fn root_rows(params: &SystemParams, powers: &[f64]) -> Result<Vec<RootsRow>> {
    let (ordered, sets): (Vec<[Complex64; 6]>, Vec<RootSet>) = if powers.len() == 1 {
        let drive = params::pump_steady_state(params, powers[0])?;
        let set = modes::find_roots(&modes::build_denominator(params, &drive)?, powers[0])?;
        (vec![set.roots], vec![set])
    } else {
        let t = modes::sweep_roots(params, powers)?;
        ((0..powers.len()).map(|i| t.at(i)).collect(), t.sets)
    };
    ordered
        .into_iter()
        .zip(sets)
        .map(|(roots, set)| {
            let drive = params::pump_steady_state(params, set.power)?;
            Ok(RootsRow {
                power_w: set.power,
                roots: roots.iter().map(|z| [z.re, z.im]).collect(),
                residuals: set.residuals,
                dressed: modes::dressed_mode_predictions(params, &drive)?,
                stability: modes::stability_check(&set),
            })
        })
        .collect()
}

fn roots_artifacts(config: &RunConfig) -> Result<Vec<(String, String)>> {
    let params = config.params()?;
    let rows = root_rows(&params, &config.powers.powers())?;
    let mut out = Vec::new();
    for format in &config.formats {
        let body = match format {
            OutputFormat::Json => output::json(&RootsJson { rows: rows.clone() }),
            OutputFormat::Csv => {
                let mut header = vec!["power_mW".to_string()];
                for k in 1..=6 {
                    header.push(format!("root{k}_re"));
                    header.push(format!("root{k}_im"));
                }
                for name in ["central", "lower", "upper"] {
                    header.push(format!("dressed_{name}_re"));
                    header.push(format!("dressed_{name}_im"));
                }
                header.extend(["coupling_ratio", "strong_coupling", "stable", "min_decay_margin", "max_residual"].map(String::from));
                let mut t = Table::new(&header);
                for r in &rows {
                    let mut cells: Vec<Cell> = vec![(r.power_w * 1e3).into()];
                    for z in &r.roots {
                        cells.push(z[0].into());
                        cells.push(z[1].into());
                    }
                    for z in [r.dressed.central, r.dressed.lower, r.dressed.upper] {
                        cells.push(z.re.into());
                        cells.push(z.im.into());
                    }
                    cells.push(r.dressed.coupling_ratio.into());
                    cells.push(r.dressed.strong_coupling.into());
                    cells.push(r.stability.stable.into());
                    cells.push(r.stability.margins.iter().cloned().fold(f64::INFINITY, f64::min).into());
                    cells.push(r.residuals.iter().cloned().fold(0.0, f64::max).into());
                    t.row(cells);
                }
                t.finish()
            }
        };
        out.push((format!("roots.{}", format.name()), body));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct StokesSummary {
    max: f64,
    max_at: f64,
    at_omega_m: f64,
    ratio_at_omega_m: f64,
}

#[derive(Debug, Clone, Serialize)]
struct RegimeFlags {
    frequency_mode: FrequencyMode,
    sideband_resolution: f64,
    coupling_ratio: f64,
    strong_coupling: bool,
    stable: bool,
}

#[derive(Debug, Clone, Serialize)]
struct PowerFeatures {
    power_w: f64,
    g_eff_1_over_omega_m: f64,
    g_eff_2_over_omega_m: f64,
    grid_points: usize,
    probe: FeatureReport,
    comparisons: Vec<AnalyticComparison>,
    stokes: StokesSummary,
    regime: RegimeFlags,
}

#[derive(Debug, Clone, Serialize)]
struct NormalCoordinates {
    omega_over_omega_m: f64,
    chi_over_omega_m: f64,
    cavity_coupling_over_omega_m: f64,
    regime: MirrorRegime,
}

#[derive(Serialize)]
struct FeaturesJson {
    tolerance: f64,
    normal_coordinates: NormalCoordinates,
    powers: Vec<PowerFeatures>,
}

fn power_features(config: &RunConfig, params: &SystemParams, power: f64) -> Result<PowerFeatures> {
    let drive = params::pump_steady_state(params, power)?;
    let grid = config.grid.points();
    let refine = config.refine_options();
    let spectrum = features::refined_spectrum(params, &drive, &grid, Observable::ProbeQuadrature, &refine)?;
    let probe = features::extract_features(&spectrum, Observable::ProbeQuadrature, &config.feature_options())?;
    let mode = FrequencyMode::of(params);
    let predictions = features::analytic_widths(params, &drive, mode)?;
    let comparisons = features::compare(&predictions, &probe, config.tolerance);

    let model = response::ResponseModel::new(params, &drive)?;
    let (max, max_at) = spectrum
        .grid
        .iter()
        .zip(&spectrum.points)
        .map(|(x, p)| (p.stokes_intensity, *x))
        .fold((f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    let at_omega_m = Observable::StokesIntensity.of(&model.point(1.0)?);
    let stokes = StokesSummary {
        max,
        max_at,
        at_omega_m,
        ratio_at_omega_m: if max > 0.0 { at_omega_m / max } else { 0.0 },
    };

    let dressed = modes::dressed_mode_predictions(params, &drive)?;
    let set = modes::find_roots(&modes::build_denominator(params, &drive)?, power)?;
    Ok(PowerFeatures {
        power_w: power,
        g_eff_1_over_omega_m: drive.g_eff_1 / params.omega_m,
        g_eff_2_over_omega_m: drive.g_eff_2 / params.omega_m,
        grid_points: spectrum.grid.len(),
        probe,
        comparisons,
        stokes,
        regime: RegimeFlags {
            frequency_mode: mode,
            sideband_resolution: params.sideband_resolution(),
            coupling_ratio: dressed.coupling_ratio,
            strong_coupling: dressed.strong_coupling,
            stable: modes::stability_check(&set).stable,
        },
    })
}

fn features_artifacts(config: &RunConfig) -> Result<Vec<(String, String)>> {
    let params = config.params()?;
    let nc = normalcoords::transformed_coeffs(&params)?;
    let powers = config
        .powers
        .powers()
        .into_iter()
        .map(|p| power_features(config, &params, p))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for format in &config.formats {
        let body = match format {
            OutputFormat::Json => output::json(&FeaturesJson {
                tolerance: config.tolerance,
                normal_coordinates: NormalCoordinates {
                    omega_over_omega_m: nc.omega / params.omega_m,
                    chi_over_omega_m: nc.chi / params.omega_m,
                    cavity_coupling_over_omega_m: nc.cavity_coupling / params.omega_m,
                    regime: nc.regime,
                },
                powers: powers.clone(),
            }),
            OutputFormat::Csv => {
                let mut t = Table::new(&["power_mW", "kind", "center", "fwhm", "prominence", "extremum_value"]);
                for pf in &powers {
                    for f in &pf.probe.features {
                        t.row(vec![
                            (pf.power_w * 1e3).into(),
                            Cell::Text(match f.kind {
                                FeatureKind::Peak => "peak",
                                FeatureKind::Dip => "dip",
                            }),
                            f.center.into(),
                            f.fwhm.into(),
                            f.prominence.into(),
                            f.extremum_value.into(),
                        ]);
                    }
                }
                t.finish()
            }
        };
        out.push((format!("features.{}", format.name()), body));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(power_label(0.0), "0mW");
        assert_eq!(power_label(2e-3), "2mW");
        assert_eq!(power_label(15e-3), "15mW");
        assert_eq!(power_label(1e-6), "0p001mW");
    }

    #[test]
    fn empty_power_override_is_usage_error() {
        let args = CommonArgs {
            power: Some(String::new()),
            ..CommonArgs::default()
        };
        assert!(matches!(resolve_config(&args), Err(Error::Usage(_))));
    }
}
