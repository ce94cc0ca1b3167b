//! Physical parameters, derived couplings and the pump-only steady state.
//!
//! Everything here is SI with angular frequencies in rad/s. [`ScaledSystem`]
//! is the bridge to the rest of the crate: it divides every rate by the
//! reference mechanical frequency `omega_m`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ring cavity plus two mirror oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Pump wavelength, m.
    pub wavelength: f64,
    /// Cavity frequency pull per unit mirror displacement (`2 omega_0 / L`), rad/s/m.
    pub pull_parameter: f64,
    /// Effective mirror masses, kg.
    pub mass_1: f64,
    pub mass_2: f64,
    /// Mechanical resonances, rad/s.
    pub omega_1: f64,
    pub omega_2: f64,
    /// Mechanical damping rates, rad/s.
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// Cavity decay rate, rad/s.
    pub kappa: f64,
    /// Fold angle between incident and reflected beams, rad.
    pub theta: f64,
    /// Effective pump detuning including the radiation-pressure shift, rad/s.
    pub effective_detuning: f64,
    /// Reference mechanical frequency used to nondimensionalize, rad/s.
    pub omega_m: f64,
}

impl SystemParams {
    /// The operating point of the two-mirror double-EIT configuration:
    /// mirrors at `1.1 omega_m` and `0.9 omega_m`, pump on the red sideband.
    pub fn reference() -> Self {
        // value * unit, as the config parser computes it
        let omega_m_hz = 51.8 * 1e6;
        SystemParams {
            wavelength: 775.0 * 1e-9,
            pull_parameter: TAU * (12.0 * 1e9 / 1e-9),
            mass_1: 20.0 * 1e-12,
            mass_2: 20.0 * 1e-12,
            omega_1: TAU * (1.1 * omega_m_hz),
            omega_2: TAU * (0.9 * omega_m_hz),
            gamma_1: TAU * (4.1 * 1e3),
            gamma_2: TAU * (4.1 * 1e3),
            kappa: TAU * (15.0 * 1e6),
            theta: std::f64::consts::PI / 3.0,
            effective_detuning: TAU * omega_m_hz,
            omega_m: TAU * omega_m_hz,
        }
    }

    /// Same system with both mirrors at `omega_m`.
    pub fn with_equal_frequencies(mut self) -> Self {
        self.omega_1 = self.omega_m;
        self.omega_2 = self.omega_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("pull_parameter", self.pull_parameter),
            ("mass_1", self.mass_1),
            ("mass_2", self.mass_2),
            ("omega_1", self.omega_1),
            ("omega_2", self.omega_2),
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("kappa", self.kappa),
            ("omega_m", self.omega_m),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.theta.is_finite() && (0.0..std::f64::consts::PI).contains(&self.theta)) {
            return Err(Error::invalid("theta", format!("must lie in [0, pi), got {}", self.theta)));
        }
        if !self.effective_detuning.is_finite() {
            return Err(Error::invalid("effective_detuning", "must be finite"));
        }
        Ok(())
    }

    /// Pump angular frequency `2 pi c / lambda`.
    pub fn pump_frequency(&self) -> f64 {
        TAU * SPEED_OF_LIGHT / self.wavelength
    }

    /// `kappa / min(omega_1, omega_2)`; below 1 is the resolved-sideband regime.
    pub fn sideband_resolution(&self) -> f64 {
        self.kappa / self.omega_1.min(self.omega_2)
    }

    pub fn geometry_factor(&self) -> f64 {
        (self.theta / 2.0).cos()
    }
}

/// Single-photon couplings `g_j = pull * sqrt(hbar / (m_j omega_j))`.
pub fn derive_couplings(params: &SystemParams) -> Result<(f64, f64)> {
    params.validate()?;
    let g = |m: f64, w: f64| params.pull_parameter * (HBAR / (m * w)).sqrt();
    Ok((g(params.mass_1, params.omega_1), g(params.mass_2, params.omega_2)))
}

/// Pump-only steady state at a given pump power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveState {
    /// Pump power, W.
    pub power: f64,
    /// Effective detuning this state was solved at, rad/s.
    pub detuning: f64,
    /// Drive amplitude, rad/s; real and non-negative.
    pub epsilon: f64,
    /// Intracavity pump amplitude.
    #[serde(serialize_with = "serialize_complex")]
    pub c0: Complex64,
    /// Effective couplings `G_j = g_j |c0| cos(theta/2)`, rad/s.
    pub g_eff_1: f64,
    pub g_eff_2: f64,
    /// Static mirror displacements (dimensionless quadratures).
    pub q10: f64,
    pub q20: f64,
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl DriveState {
    pub fn intracavity_photons(&self) -> f64 {
        self.c0.norm_sqr()
    }
}

/// Steady state at the configured effective detuning.
pub fn pump_steady_state(params: &SystemParams, power: f64) -> Result<DriveState> {
    pump_steady_state_at(params, power, params.effective_detuning)
}

/// Steady state at an explicit effective detuning (rad/s).
pub fn pump_steady_state_at(params: &SystemParams, power: f64, detuning: f64) -> Result<DriveState> {
    let (g1, g2) = derive_couplings(params)?;
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Domain(format!("pump power must be finite and >= 0, got {power}")));
    }
    if !detuning.is_finite() {
        return Err(Error::Domain("detuning must be finite".into()));
    }
    let epsilon = (2.0 * params.kappa * power / (HBAR * params.pump_frequency())).sqrt();
    let c0 = Complex64::new(epsilon, 0.0) / Complex64::new(params.kappa, detuning);
    let amplitude = c0.norm();
    let g_eff_1 = g1 * amplitude * params.geometry_factor();
    let g_eff_2 = g2 * amplitude * params.geometry_factor();
    Ok(DriveState {
        power,
        detuning,
        epsilon,
        c0,
        g_eff_1,
        g_eff_2,
        q10: -(g_eff_1 / params.omega_1) * amplitude,
        q20: (g_eff_2 / params.omega_2) * amplitude,
    })
}

/// One real solution of the radiation-pressure detuning fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningBranch {
    pub detuning: f64,
    pub drive: DriveState,
}

/// Solves `D = D0 - (g1^2/w1 + g2^2/w2) cos^2(theta/2) eps^2 / (kappa^2 + D^2)`
/// for the effective detuning `D`, given the bare pump detuning `D0`.
///
/// Returns every real branch sorted by detuning; more than one means the
/// pump is bistable. No branch is preferred.
pub fn self_consistent_detuning(
    params: &SystemParams,
    bare_detuning: f64,
    power: f64,
) -> Result<Vec<DetuningBranch>> {
    let (g1, g2) = derive_couplings(params)?;
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Domain(format!("pump power must be finite and >= 0, got {power}")));
    }
    if !bare_detuning.is_finite() {
        return Err(Error::Domain("bare detuning must be finite".into()));
    }

    let wm = params.omega_m;
    let shift = (g1 * g1 / params.omega_1 + g2 * g2 / params.omega_2) * params.geometry_factor().powi(2);
    let epsilon_sq = 2.0 * params.kappa * power / (HBAR * params.pump_frequency());
    let a = shift * epsilon_sq / wm.powi(3);
    let d0 = bare_detuning / wm;
    let k = params.kappa / wm;

    let solutions: Vec<f64> = if a == 0.0 {
        vec![d0]
    } else {
        cubic_real_roots(d0, k, a)?
    };

    solutions
        .into_iter()
        .map(|x| {
            let detuning = x * wm;
            pump_steady_state_at(params, power, detuning).map(|drive| DetuningBranch { detuning, drive })
        })
        .collect()
}

/// Real roots of `(x - d0)(k^2 + x^2) + a`.
fn cubic_real_roots(d0: f64, k: f64, a: f64) -> Result<Vec<f64>> {
    let f = |x: f64| (x - d0) * (k * k + x * x) + a;
    let df = |x: f64| (k * k + x * x) + 2.0 * x * (x - d0);
    let coeffs = [
        Complex64::new(a - d0 * k * k, 0.0),
        Complex64::new(k * k, 0.0),
        Complex64::new(-d0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    let roots = poly::aberth(&coeffs, &poly::circle_guesses(&coeffs), 500)?.roots;
    let scale = d0.abs().max(k).max(a.abs().cbrt());

    let mut real: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * scale)
        .map(|z| {
            let mut x = z.re;
            for _ in 0..8 {
                let slope = df(x);
                if slope == 0.0 {
                    break;
                }
                let step = f(x) / slope;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(scale) {
                    break;
                }
            }
            x
        })
        .collect();
    real.sort_by(|a, b| a.total_cmp(b));
    real.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * scale);
    if real.is_empty() {
        // A real cubic always has a real root; fall back to the least-imaginary one.
        let z = roots
            .iter()
            .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
            .copied()
            .unwrap_or_default();
        real.push(z.re);
    }
    Ok(real)
}

/// All rates of one operating point in units of `omega_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSystem {
    pub kappa: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub detuning: f64,
    pub g_eff_1: f64,
    pub g_eff_2: f64,
    /// `c0^2 / |c0|^2`, absent when the pump is off.
    pub pump_phase: Option<Complex64>,
}

impl ScaledSystem {
    pub fn new(params: &SystemParams, drive: &DriveState) -> Self {
        let wm = params.omega_m;
        let amplitude_sq = drive.c0.norm_sqr();
        let pump_phase = (amplitude_sq > 0.0).then(|| drive.c0 * drive.c0 / amplitude_sq);
        ScaledSystem {
            kappa: params.kappa / wm,
            gamma_1: params.gamma_1 / wm,
            gamma_2: params.gamma_2 / wm,
            omega_1: params.omega_1 / wm,
            omega_2: params.omega_2 / wm,
            detuning: drive.detuning / wm,
            g_eff_1: drive.g_eff_1 / wm,
            g_eff_2: drive.g_eff_2 / wm,
            pump_phase,
        }
    }

    /// Mean mechanical damping.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_1 + self.gamma_2)
    }

    /// `G1^2 + G2^2`.
    pub fn total_coupling_sq(&self) -> f64 {
        self.g_eff_1 * self.g_eff_1 + self.g_eff_2 * self.g_eff_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Frozen from a 40-digit evaluation of the same closed forms.
    const G1_REFERENCE: f64 = 9150.2516955111643389;
    const G2_REFERENCE: f64 = 10115.983870441285813;
    const EPS_2MW: f64 = 1212768880747.9060591;
    const C0SQ_2MW: f64 = 12810500.831671576667;
    const GEFF1_2MW: f64 = 28362644.828385211626;
    const GEFF2_2MW: f64 = 31356083.652622589414;

    #[test]
    fn reference_couplings_match_high_precision_values() {
        let (g1, g2) = derive_couplings(&SystemParams::reference()).unwrap();
        assert_relative_eq!(g1, G1_REFERENCE, max_relative = 1e-13);
        assert_relative_eq!(g2, G2_REFERENCE, max_relative = 1e-13);
        assert_relative_eq!(g1 / g2, (9.0f64 / 11.0).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn equal_mirrors_have_equal_couplings() {
        let (g1, g2) = derive_couplings(&SystemParams::reference().with_equal_frequencies()).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn validation_names_offending_field() {
        let mut p = SystemParams::reference();
        p.mass_2 = 0.0;
        match derive_couplings(&p) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "mass_2"),
            other => panic!("unexpected {other:?}"),
        }
        let mut p = SystemParams::reference();
        p.theta = std::f64::consts::PI;
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { field: "theta", .. })));
    }

    #[test]
    fn sideband_resolution_is_reported_not_enforced() {
        let p = SystemParams::reference();
        assert_relative_eq!(p.kappa / p.omega_m, 0.2895752895752896, max_relative = 1e-12);
        let mut bad = p;
        bad.kappa = 3.0 * p.omega_m;
        assert!(bad.validate().is_ok());
        assert!(bad.sideband_resolution() > 1.0);
    }

    #[test]
    fn drive_off_is_all_zero() {
        let d = pump_steady_state(&SystemParams::reference(), 0.0).unwrap();
        assert_eq!(d.epsilon, 0.0);
        assert_eq!(d.c0.norm(), 0.0);
        assert_eq!((d.g_eff_1, d.g_eff_2, d.q10, d.q20), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn negative_power_is_a_domain_error() {
        assert!(matches!(
            pump_steady_state(&SystemParams::reference(), -1e-3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn resonant_drive_gives_real_amplitude() {
        let mut p = SystemParams::reference();
        p.effective_detuning = 0.0;
        let d = pump_steady_state(&p, 1e-3).unwrap();
        assert_eq!(d.c0.im, 0.0);
        assert!(d.c0.re > 0.0);
        assert_relative_eq!(d.c0.re, d.epsilon / p.kappa, max_relative = 1e-15);
    }

    #[test]
    fn two_milliwatt_state_matches_high_precision_values() {
        let p = SystemParams::reference();
        let d = pump_steady_state(&p, 2e-3).unwrap();
        assert_relative_eq!(d.epsilon, EPS_2MW, max_relative = 1e-13);
        assert_relative_eq!(d.c0.norm_sqr(), C0SQ_2MW, max_relative = 1e-13);
        assert_relative_eq!(d.g_eff_1, GEFF1_2MW, max_relative = 1e-13);
        assert_relative_eq!(d.g_eff_2, GEFF2_2MW, max_relative = 1e-13);
        assert!(d.q10 < 0.0 && d.q20 > 0.0);
        assert_relative_eq!(d.c0.arg(), -(Complex64::new(p.kappa, p.effective_detuning).arg()), max_relative = 1e-15);
    }

    #[test]
    fn self_consistency_without_light_or_coupling_is_identity() {
        let p = SystemParams::reference();
        let b = self_consistent_detuning(&p, 0.7 * p.omega_m, 0.0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].detuning, 0.7 * p.omega_m);

        let mut weak = p;
        weak.pull_parameter = f64::MIN_POSITIVE;
        let b = self_consistent_detuning(&weak, 0.7 * p.omega_m, 1e-3).unwrap();
        assert_eq!(b.len(), 1);
        assert_relative_eq!(b[0].detuning, 0.7 * p.omega_m, max_relative = 1e-15);
    }

    /// Sign-change scan of the cubic on a dense grid, independent of the
    /// polynomial root finder.
    fn scan_roots(p: &SystemParams, d0: f64, power: f64) -> Vec<f64> {
        let (g1, g2) = derive_couplings(p).unwrap();
        let shift = (g1 * g1 / p.omega_1 + g2 * g2 / p.omega_2) * p.geometry_factor().powi(2);
        let eps_sq = 2.0 * p.kappa * power / (HBAR * p.pump_frequency());
        let f = |x: f64| x - d0 + shift * eps_sq / (p.kappa * p.kappa + x * x);
        let lo = d0 - 5.0 * p.omega_m;
        let hi = d0 + 5.0 * p.omega_m;
        let n = 200_000;
        let mut roots = Vec::new();
        let mut prev = f(lo);
        for i in 1..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let v = f(x);
            if prev.signum() != v.signum() {
                let (mut a, mut b) = (x - (hi - lo) / n as f64, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() {
                        a = m
                    } else {
                        b = m
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev = v;
        }
        roots
    }

    #[test]
    fn low_power_fixed_point_is_unique_and_matches_scan() {
        let p = SystemParams::reference();
        let d0 = 1.02 * p.omega_m;
        let branches = self_consistent_detuning(&p, d0, 1e-3).unwrap();
        let scanned = scan_roots(&p, d0, 1e-3);
        assert_eq!(branches.len(), 1);
        assert_eq!(scanned.len(), 1);
        assert_relative_eq!(branches[0].detuning, scanned[0], max_relative = 1e-10);
        assert!(branches[0].detuning < d0);
    }

    #[test]
    fn bistable_branches_match_scan() {
        // Far blue of the cavity with a large pull to force three branches.
        let mut p = SystemParams::reference();
        p.pull_parameter *= 4.0;
        let d0 = 3.0 * p.omega_m;
        let branches = self_consistent_detuning(&p, d0, 15e-3).unwrap();
        let scanned = scan_roots(&p, d0, 15e-3);
        assert_eq!(branches.len(), scanned.len());
        assert_eq!(branches.len(), 3, "expected a bistable window");
        for (b, s) in branches.iter().zip(&scanned) {
            assert_relative_eq!(b.detuning, *s, max_relative = 1e-9);
        }
        assert!(branches.windows(2).all(|w| w[0].detuning < w[1].detuning));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn photon_number_balances_drive(power in 0.0f64..0.05, detuning in -3.0f64..3.0) {
                let p = SystemParams::reference();
                let d = pump_steady_state_at(&p, power, detuning * p.omega_m).unwrap();
                let lhs = d.c0.norm_sqr() * (p.kappa.powi(2) + d.detuning.powi(2));
                let rhs = 2.0 * p.kappa * power / (HBAR * p.pump_frequency());
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
            }

            #[test]
            fn couplings_grow_with_power_and_scale_as_sqrt(power in 1e-6f64..0.05) {
                let p = SystemParams::reference();
                let a = pump_steady_state(&p, power).unwrap();
                let b = pump_steady_state(&p, 2.0 * power).unwrap();
                prop_assert!(b.c0.norm() > a.c0.norm());
                prop_assert!(b.g_eff_1 > a.g_eff_1 && b.g_eff_2 > a.g_eff_2);
                prop_assert!((b.g_eff_1 / a.g_eff_1 - 2f64.sqrt()).abs() < 1e-12 * 2f64.sqrt());
                prop_assert!((b.g_eff_2 / a.g_eff_2 - 2f64.sqrt()).abs() < 1e-12 * 2f64.sqrt());
            }

            #[test]
            fn fixed_point_solutions_satisfy_equation(power in 0.0f64..0.05, d0 in -2.0f64..4.0, boost in 1.0f64..40.0) {
                let mut p = SystemParams::reference();
                p.pull_parameter *= boost;
                let (g1, g2) = derive_couplings(&p).unwrap();
                let shift = (g1 * g1 / p.omega_1 + g2 * g2 / p.omega_2) * p.geometry_factor().powi(2);
                for b in self_consistent_detuning(&p, d0 * p.omega_m, power).unwrap() {
                    let rhs = d0 * p.omega_m - shift * b.drive.epsilon.powi(2)
                        / (p.kappa.powi(2) + b.detuning.powi(2));
                    let scale = b.detuning.abs().max(p.kappa);
                    prop_assert!((b.detuning - rhs).abs() <= 1e-10 * scale);
                }
            }
        }
    }
}
