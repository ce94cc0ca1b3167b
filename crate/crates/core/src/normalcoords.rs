//! Relative and center-of-mass coordinates of the two mirrors.
//!
//! Only the coupling-weighted relative coordinate `Q_a` couples to the cavity
//! field. The center-of-mass coordinate `Q_s` couples to `Q_a` through the
//! cross term `chi`; when `chi` vanishes it is dark and the spectrum shows a
//! single EIT dip, otherwise it feeds the narrow central absorption peak.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{derive_couplings, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectiveCoords {
    pub q_a: f64,
    pub p_a: f64,
    pub q_s: f64,
    pub p_s: f64,
}

/// Rows map `(x_1, x_2)` to `(x_a, x_s)`.
pub fn mixing_matrix(g1: f64, g2: f64) -> Result<[[f64; 2]; 2]> {
    let norm = (g1 * g1 + g2 * g2).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain("collective coordinates need g1^2 + g2^2 > 0".into()));
    }
    Ok([[g1 / norm, -g2 / norm], [g1 / norm, g2 / norm]])
}

pub fn to_collective(q1: f64, p1: f64, q2: f64, p2: f64, g1: f64, g2: f64) -> Result<CollectiveCoords> {
    let m = mixing_matrix(g1, g2)?;
    Ok(CollectiveCoords {
        q_a: m[0][0] * q1 + m[0][1] * q2,
        p_a: m[0][0] * p1 + m[0][1] * p2,
        q_s: m[1][0] * q1 + m[1][1] * q2,
        p_s: m[1][0] * p1 + m[1][1] * p2,
    })
}

/// Inverse of [`to_collective`]: returns `(q1, p1, q2, p2)`. Needs both
/// couplings nonzero; with one of them zero `x_a` and `x_s` coincide.
pub fn from_collective(c: &CollectiveCoords, g1: f64, g2: f64) -> Result<(f64, f64, f64, f64)> {
    if g1 == 0.0 || g2 == 0.0 {
        return Err(Error::Domain("collective map is singular when a coupling vanishes".into()));
    }
    let norm = (g1 * g1 + g2 * g2).sqrt();
    let back = |a: f64, s: f64| (norm * (a + s) / (2.0 * g1), norm * (s - a) / (2.0 * g2));
    let (q1, q2) = back(c.q_a, c.q_s);
    let (p1, p2) = back(c.p_a, c.p_s);
    Ok((q1, p1, q2, p2))
}

/// `[x_a, p_b]` in units of `i` for `a, b` in `{a, s}`: the diagonal entries
/// are 1 and the off-diagonal one is `(g1^2 - g2^2) / (g1^2 + g2^2)`, so the
/// map is canonical only for `g1 = g2`.
pub fn commutators(g1: f64, g2: f64) -> Result<[[f64; 2]; 2]> {
    let m = mixing_matrix(g1, g2)?;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| m[i][0] * m[j][0] + m[i][1] * m[j][1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorRegime {
    /// `chi = 0`: the center of mass decouples, single EIT dip.
    EitDip,
    /// `chi != 0`: relative and center-of-mass motion mix, narrow central peak.
    CentralPeak,
}

/// Frequencies in the collective basis, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedHamiltonianCoeffs {
    /// `(g1^2 + g2^2)(omega_1/g1^2 + omega_2/g2^2) / 4`.
    pub omega: f64,
    /// `(g1^2 + g2^2)(omega_1/g1^2 - omega_2/g2^2) / 4`.
    pub chi: f64,
    /// `sqrt(g1^2 + g2^2) cos(theta/2)`.
    pub cavity_coupling: f64,
    pub regime: MirrorRegime,
}

pub fn transformed_coeffs(params: &SystemParams) -> Result<TransformedHamiltonianCoeffs> {
    let (g1, g2) = derive_couplings(params)?;
    Ok(coeffs_from(g1, g2, params.omega_1, params.omega_2, params.geometry_factor()))
}

pub fn coeffs_from(g1: f64, g2: f64, omega_1: f64, omega_2: f64, geometry: f64) -> TransformedHamiltonianCoeffs {
    let total = g1 * g1 + g2 * g2;
    let a = omega_1 / (g1 * g1);
    let b = omega_2 / (g2 * g2);
    let chi = 0.25 * total * (a - b);
    TransformedHamiltonianCoeffs {
        omega: 0.25 * total * (a + b),
        chi,
        cavity_coupling: total.sqrt() * geometry,
        regime: if chi == 0.0 {
            MirrorRegime::EitDip
        } else {
            MirrorRegime::CentralPeak
        },
    }
}
