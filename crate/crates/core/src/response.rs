//! Probe and Stokes response coefficients.
//!
//! `delta` is the probe–pump detuning in units of `omega_m`; the coefficients
//! `c_plus`, `c_minus` are in units of `1/omega_m` so that the output-field
//! components `2 kappa c_(+/-)` come out dimensionless.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modes::{self, DenominatorPoly};
use crate::params::{DriveState, ScaledSystem, SystemParams};

/// Below this `|d(delta)|` the response is treated as singular.
pub const SINGULARITY_FLOOR: f64 = 1e-30;

/// Default probe window `[0.5, 1.5] omega_m` with 4001 points.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(0.5, 1.5, 4001)
}

pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponsePoint {
    pub delta: f64,
    #[serde(skip)]
    pub c_plus: Complex64,
    #[serde(skip)]
    pub c_minus: Complex64,
    #[serde(skip)]
    pub eps_out_plus: Complex64,
    #[serde(skip)]
    pub eps_out_minus: Complex64,
    /// Probe quadrature `Re(eps_out_plus)`.
    pub nu_p: f64,
    /// `|eps_out_minus|^2`.
    pub stokes_intensity: f64,
}

/// Which real observable a spectrum is read through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    ProbeQuadrature,
    StokesIntensity,
}

impl Observable {
    pub fn of(self, point: &ResponsePoint) -> f64 {
        match self {
            Observable::ProbeQuadrature => point.nu_p,
            Observable::StokesIntensity => point.stokes_intensity,
        }
    }
}

/// Closed-form response at one operating point.
#[derive(Debug, Clone)]
pub struct ResponseModel {
    denominator: DenominatorPoly,
}

impl ResponseModel {
    pub fn new(params: &SystemParams, drive: &DriveState) -> Result<Self> {
        Ok(ResponseModel {
            denominator: modes::build_denominator(params, drive)?,
        })
    }

    pub fn from_scaled(system: &ScaledSystem) -> Self {
        ResponseModel {
            denominator: DenominatorPoly::from_scaled(system),
        }
    }

    pub fn system(&self) -> &ScaledSystem {
        &self.denominator.system
    }

    pub fn denominator(&self) -> &DenominatorPoly {
        &self.denominator
    }

    fn checked_denominator(&self, delta: f64) -> Result<Complex64> {
        let d = self.denominator.eval_factored(Complex64::new(delta, 0.0));
        if !(d.norm() >= SINGULARITY_FLOOR) {
            return Err(Error::Singular {
                delta,
                magnitude: d.norm(),
            });
        }
        Ok(d)
    }

    /// Mechanical factors `omega_j^2 - delta^2 - i gamma_j delta`.
    fn mechanical(&self, delta: f64) -> (Complex64, Complex64) {
        let s = self.system();
        let q = |w: f64, g: f64| Complex64::new(w * w - delta * delta, -g * delta);
        (q(s.omega_1, s.gamma_1), q(s.omega_2, s.gamma_2))
    }

    pub fn c_plus(&self, delta: f64) -> Result<Complex64> {
        let d = self.checked_denominator(delta)?;
        let s = self.system();
        let (q1, q2) = self.mechanical(delta);
        let bracket = s.g_eff_1 * s.g_eff_1 * s.omega_1 * q2 + s.g_eff_2 * s.g_eff_2 * s.omega_2 * q1;
        let cavity = Complex64::new(s.kappa, -(s.detuning + delta));
        Ok((cavity * q1 * q2 + Complex64::i() * bracket) / d)
    }

    /// Zero when the pump is off.
    pub fn c_minus(&self, delta: f64) -> Result<Complex64> {
        let d = self.checked_denominator(delta)?;
        let s = self.system();
        let Some(phase) = s.pump_phase else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let (q1, q2) = self.mechanical(delta);
        let bracket = s.g_eff_1 * s.g_eff_1 * s.omega_1 * q2.conj() + s.g_eff_2 * s.g_eff_2 * s.omega_2 * q1.conj();
        Ok(Complex64::i() * phase * bracket / d.conj())
    }

    pub fn point(&self, delta: f64) -> Result<ResponsePoint> {
        let two_kappa = 2.0 * self.system().kappa;
        let c_plus = self.c_plus(delta)?;
        let c_minus = self.c_minus(delta)?;
        let eps_out_plus = two_kappa * c_plus;
        let eps_out_minus = two_kappa * c_minus;
        Ok(ResponsePoint {
            delta,
            c_plus,
            c_minus,
            eps_out_plus,
            eps_out_minus,
            nu_p: eps_out_plus.re,
            stokes_intensity: eps_out_minus.norm_sqr(),
        })
    }

    pub fn scan(&self, grid: &[f64]) -> Result<Vec<ResponsePoint>> {
        check_grid(grid)?;
        grid.iter().map(|&x| self.point(x)).collect()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("detuning grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("detuning grid contains a non-finite value".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!(
            "detuning grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Response over a detuning grid at one drive state.
#[derive(Debug, Clone)]
pub struct ResponseSpectrum {
    pub grid: Vec<f64>,
    pub points: Vec<ResponsePoint>,
    pub drive: DriveState,
    pub params: SystemParams,
}

impl ResponseSpectrum {
    pub fn values(&self, observable: Observable) -> Vec<f64> {
        self.points.iter().map(|p| observable.of(p)).collect()
    }

    pub fn max_of(&self, observable: Observable) -> f64 {
        self.points.iter().map(|p| observable.of(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nearest sample to `delta`.
    pub fn nearest(&self, delta: f64) -> &ResponsePoint {
        let idx = self.grid.partition_point(|&x| x < delta);
        let candidates = [idx.saturating_sub(1), idx.min(self.grid.len() - 1)];
        let best = candidates
            .into_iter()
            .min_by(|&a, &b| (self.grid[a] - delta).abs().total_cmp(&(self.grid[b] - delta).abs()))
            .expect("non-empty spectrum");
        &self.points[best]
    }
}

pub fn scan_spectrum(params: &SystemParams, drive: &DriveState, grid: &[f64]) -> Result<ResponseSpectrum> {
    let model = ResponseModel::new(params, drive)?;
    let points = model.scan(grid)?;
    Ok(ResponseSpectrum {
        grid: grid.to_vec(),
        points,
        drive: *drive,
        params: *params,
    })
}
