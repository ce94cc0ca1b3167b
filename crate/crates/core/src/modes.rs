//! Normal modes of the driven system: the poles of the probe response.
//!
//! The response denominator `d(delta)` is a sextic in the probe detuning.
//! Its roots are the dressed modes; real parts give line positions and
//! `-Im` gives half-widths (fields evolve as `exp(-i delta t)`).

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{self, DriveState, ScaledSystem, SystemParams};
use crate::poly;

/// Iteration cap for the root finder.
pub const MAX_ITERATIONS: usize = 500;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `omega^2 - delta^2 - i gamma delta` as ascending coefficients.
fn mechanical_factor(omega: f64, gamma: f64) -> [Complex64; 3] {
    [re(omega * omega), Complex64::new(0.0, -gamma), re(-1.0)]
}

/// `d(delta)` in units of `omega_m`, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DenominatorPoly {
    pub coefficients: [Complex64; 7],
    pub system: ScaledSystem,
}

impl DenominatorPoly {
    pub fn from_scaled(system: &ScaledSystem) -> Self {
        let s = system;
        let cavity_lower = [Complex64::new(s.kappa, s.detuning), -I];
        let cavity_upper = [Complex64::new(s.kappa, -s.detuning), -I];
        let q1 = mechanical_factor(s.omega_1, s.gamma_1);
        let q2 = mechanical_factor(s.omega_2, s.gamma_2);

        let bare = poly::mul(&poly::mul(&cavity_lower, &cavity_upper), &poly::mul(&q1, &q2));
        let bracket = coupling_bracket(s);
        let full = poly::add(&bare, &poly::scale(&bracket, re(-2.0 * s.detuning)));

        let mut coefficients = [Complex64::default(); 7];
        coefficients.copy_from_slice(&full);
        DenominatorPoly {
            coefficients,
            system: *s,
        }
    }

    pub fn eval(&self, delta: Complex64) -> Complex64 {
        poly::eval(&self.coefficients, delta)
    }

    /// `d(delta)` from its factored form; accurate near the mechanical resonances.
    pub fn eval_factored(&self, delta: Complex64) -> Complex64 {
        let s = &self.system;
        let q = |w: f64, g: f64| w * w - delta * delta - I * g * delta;
        let (q1, q2) = (q(s.omega_1, s.gamma_1), q(s.omega_2, s.gamma_2));
        let lower = Complex64::new(s.kappa, s.detuning) - I * delta;
        let upper = Complex64::new(s.kappa, -s.detuning) - I * delta;
        let bracket = s.g_eff_1 * s.g_eff_1 * s.omega_1 * q2 + s.g_eff_2 * s.g_eff_2 * s.omega_2 * q1;
        lower * upper * q1 * q2 - 2.0 * s.detuning * bracket
    }

    /// The polynomial with conjugated coefficients; equals `d(delta)*` on the real axis.
    pub fn conjugate_eval(&self, delta: Complex64) -> Complex64 {
        let conj: Vec<Complex64> = self.coefficients.iter().map(|c| c.conj()).collect();
        poly::eval(&conj, delta)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Roots of the pump-off factorization, in the same units.
    pub fn uncoupled_roots(&self) -> [Complex64; 6] {
        let s = &self.system;
        let mech = |w: f64, g: f64| {
            let half = (re(w * w - g * g / 4.0)).sqrt();
            [half - I * (g / 2.0), -half - I * (g / 2.0)]
        };
        let [a, b] = mech(s.omega_1, s.gamma_1);
        let [c, d] = mech(s.omega_2, s.gamma_2);
        [
            Complex64::new(s.detuning, -s.kappa),
            Complex64::new(-s.detuning, -s.kappa),
            a,
            b,
            c,
            d,
        ]
    }
}

/// `G1^2 omega_1 (omega_2^2 - delta^2 - i gamma_2 delta) + G2^2 omega_2 (omega_1^2 - ...)`.
pub(crate) fn coupling_bracket(s: &ScaledSystem) -> Vec<Complex64> {
    let q1 = mechanical_factor(s.omega_1, s.gamma_1);
    let q2 = mechanical_factor(s.omega_2, s.gamma_2);
    poly::add(
        &poly::scale(&q2, re(s.g_eff_1 * s.g_eff_1 * s.omega_1)),
        &poly::scale(&q1, re(s.g_eff_2 * s.g_eff_2 * s.omega_2)),
    )
}

pub fn build_denominator(params: &SystemParams, drive: &DriveState) -> Result<DenominatorPoly> {
    params.validate()?;
    Ok(DenominatorPoly::from_scaled(&ScaledSystem::new(params, drive)))
}

/// The six roots of `d(delta)` at one pump power, in units of `omega_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub power: f64,
    #[serde(serialize_with = "serialize_roots")]
    pub roots: [Complex64; 6],
    /// `|d(root)| / max|coefficient|` per root.
    pub residuals: [f64; 6],
}

fn serialize_roots<S: serde::Serializer>(r: &[Complex64; 6], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(6))?;
    for z in r {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Roots with positive real part, ascending.
    pub fn positive_branch(&self) -> Vec<Complex64> {
        self.roots.iter().copied().filter(|z| z.re > 0.0).collect()
    }
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Deterministic offsets that keep coincident guesses apart.
fn perturb(guesses: &[Complex64], size: f64) -> Vec<Complex64> {
    guesses
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / guesses.len() as f64 + 0.4;
            z + Complex64::from_polar(size * z.norm().max(1.0), phase)
        })
        .collect()
}

/// Roots seeded from the pump-off factorization.
pub fn find_roots(poly: &DenominatorPoly, power: f64) -> Result<RootSet> {
    let seeds = perturb(&poly.uncoupled_roots(), 1e-3);
    find_roots_from(poly, power, &seeds)
}

/// Roots seeded from explicit guesses (continuation).
pub fn find_roots_from(poly: &DenominatorPoly, power: f64, guesses: &[Complex64]) -> Result<RootSet> {
    let outcome = poly::aberth(&poly.coefficients, guesses, MAX_ITERATIONS)?;
    let mut roots = [Complex64::default(); 6];
    roots.copy_from_slice(&outcome.roots);
    sort_roots(&mut roots);
    let scale = poly.max_coefficient();
    let residuals = roots.map(|z| poly.eval(z).norm() / scale);
    Ok(RootSet {
        power,
        roots,
        residuals,
    })
}

/// Root sets along a power sweep with each root followed continuously.
#[derive(Debug, Clone, Serialize)]
pub struct RootTrajectory {
    pub powers: Vec<f64>,
    pub sets: Vec<RootSet>,
    /// `paths[k][i]` is root `k` at `powers[i]`.
    #[serde(skip)]
    pub paths: Vec<Vec<Complex64>>,
}

impl RootTrajectory {
    /// Roots at power index `i` in path order.
    pub fn at(&self, i: usize) -> [Complex64; 6] {
        std::array::from_fn(|k| self.paths[k][i])
    }
}

/// Minimal-total-distance bijection from `from` onto `to`:
/// `to[result[k]]` continues `from[k]`.
pub fn match_roots(from: &[Complex64; 6], to: &[Complex64; 6]) -> [usize; 6] {
    let mut best = [0usize; 6];
    let mut best_cost = f64::INFINITY;
    for perm in (0..6).permutations(6) {
        let cost: f64 = perm.iter().enumerate().map(|(k, &j)| (from[k] - to[j]).norm()).sum();
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&perm);
        }
    }
    best
}

pub fn sweep_roots(params: &SystemParams, powers: &[f64]) -> Result<RootTrajectory> {
    if powers.len() < 2 {
        return Err(Error::Domain("a root sweep needs at least two powers".into()));
    }
    if powers.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("sweep powers must be ascending".into()));
    }

    let mut sets: Vec<RootSet> = Vec::with_capacity(powers.len());
    for &power in powers {
        let drive = params::pump_steady_state(params, power)?;
        let poly = build_denominator(params, &drive)?;
        let attempt = match sets.last() {
            Some(prev) => find_roots_from(&poly, power, &perturb(&prev.roots, 1e-7)),
            None => find_roots(&poly, power),
        };
        // A warm start that stalls is retried from the uncoupled seeds.
        let set = match attempt {
            Ok(set) => Ok(set),
            Err(_) if !sets.is_empty() => find_roots(&poly, power),
            Err(e) => Err(e),
        }
        .map_err(|e| match e {
            Error::NoConvergence { iterations, best, residuals, max_residual } => {
                Error::Domain(format!(
                    "root finding failed at {power:e} W after {iterations} iterations \
                     (max residual {max_residual:e}, best {best:?}, residuals {residuals:?})"
                ))
            }
            other => other,
        })?;
        sets.push(set);
    }

    let mut paths: Vec<Vec<Complex64>> = sets[0].roots.iter().map(|&z| vec![z]).collect();
    for window in sets.windows(2) {
        let last: [Complex64; 6] = std::array::from_fn(|k| *paths[k].last().expect("seeded"));
        let assignment = match_roots(&last, &window[1].roots);
        for (k, &j) in assignment.iter().enumerate() {
            paths[k].push(window[1].roots[j]);
        }
    }

    Ok(RootTrajectory {
        powers: powers.to_vec(),
        sets,
        paths,
    })
}

/// Approximate dressed-mode positions in the strong-coupling limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DressedModes {
    #[serde(serialize_with = "serialize_complex")]
    pub central: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    pub lower: Complex64,
    #[serde(serialize_with = "serialize_complex")]
    pub upper: Complex64,
    /// `2(G1^2 + G2^2) / (kappa - gamma/2)^2`.
    pub coupling_ratio: f64,
    /// `coupling_ratio >= STRONG_COUPLING_THRESHOLD`.
    pub strong_coupling: bool,
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub const STRONG_COUPLING_THRESHOLD: f64 = 10.0;

impl DressedModes {
    pub fn splitting(&self) -> f64 {
        self.upper.re - self.lower.re
    }
}

pub fn dressed_mode_predictions(params: &SystemParams, drive: &DriveState) -> Result<DressedModes> {
    params.validate()?;
    Ok(dressed_modes_scaled(&ScaledSystem::new(params, drive)))
}

pub(crate) fn dressed_modes_scaled(s: &ScaledSystem) -> DressedModes {
    let gamma = s.gamma();
    let half_split = 0.5 * (2.0 * s.total_coupling_sq()).sqrt();
    let side_im = -0.5 * (s.kappa + gamma / 2.0);
    let coupling_ratio = 2.0 * s.total_coupling_sq() / (s.kappa - gamma / 2.0).powi(2);
    DressedModes {
        central: Complex64::new(1.0, -gamma / 2.0),
        lower: Complex64::new(1.0 - half_split, side_im),
        upper: Complex64::new(1.0 + half_split, side_im),
        coupling_ratio,
        strong_coupling: coupling_ratio >= STRONG_COUPLING_THRESHOLD,
    }
}

/// Decay margins `-Im(root)`; stable iff every margin is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub stable: bool,
    pub margins: [f64; 6],
}

pub fn stability_check(set: &RootSet) -> Stability {
    let margins = set.roots.map(|z| -z.im);
    Stability {
        stable: margins.iter().all(|&m| m > 0.0),
        margins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_at(power: f64) -> (SystemParams, DenominatorPoly) {
        let p = SystemParams::reference();
        let d = params::pump_steady_state(&p, power).unwrap();
        (p, build_denominator(&p, &d).unwrap())
    }

    /// Direct evaluation of the four-factor product minus the coupling term.
    fn product_form(s: &ScaledSystem, x: Complex64) -> Complex64 {
        let q1 = s.omega_1 * s.omega_1 - x * x - I * s.gamma_1 * x;
        let q2 = s.omega_2 * s.omega_2 - x * x - I * s.gamma_2 * x;
        (s.kappa + I * (s.detuning - x)) * (s.kappa - I * (s.detuning + x)) * q1 * q2
            - 2.0 * s.detuning * (s.g_eff_1.powi(2) * s.omega_1 * q2 + s.g_eff_2.powi(2) * s.omega_2 * q1)
    }

    #[test]
    fn leading_coefficient_is_minus_one() {
        let (_, poly) = reference_at(2e-3);
        assert_eq!(poly.coefficients[6], re(-1.0));
    }

    #[test]
    fn coupling_off_reduces_to_factor_product() {
        let (_, poly) = reference_at(0.0);
        let s = poly.system;
        let expanded = poly::mul(
            &poly::mul(&[Complex64::new(s.kappa, s.detuning), -I], &[Complex64::new(s.kappa, -s.detuning), -I]),
            &poly::mul(&mechanical_factor(s.omega_1, s.gamma_1), &mechanical_factor(s.omega_2, s.gamma_2)),
        );
        for (a, b) in poly.coefficients.iter().zip(&expanded) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }

    #[test]
    fn lossless_uncoupled_roots_are_exact() {
        let (_, poly) = reference_at(0.0);
        let mut s = poly.system;
        s.gamma_1 = 0.0;
        s.gamma_2 = 0.0;
        let poly = DenominatorPoly::from_scaled(&s);
        let set = find_roots(&poly, 0.0).unwrap();
        let mut expected = [
            Complex64::new(1.0, -s.kappa),
            Complex64::new(-1.0, -s.kappa),
            re(1.1),
            re(-1.1),
            re(0.9),
            re(-0.9),
        ];
        sort_roots(&mut expected);
        for (a, b) in set.roots.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn built_polynomial_matches_product_form() {
        use rand::{Rng, SeedableRng};
        let (_, poly) = reference_at(2e-3);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let x = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
            let direct = product_form(&poly.system, x);
            assert!((poly.eval(x) - direct).norm() <= 1e-10 * direct.norm());
            assert!((poly.eval_factored(x) - direct).norm() <= 1e-14 * direct.norm());
        }
    }

    #[test]
    fn pump_off_roots_match_factorization() {
        let (_, poly) = reference_at(0.0);
        let set = find_roots(&poly, 0.0).unwrap();
        let mut expected = poly.uncoupled_roots();
        sort_roots(&mut expected);
        for (a, b) in set.roots.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
        assert!(set.max_residual() <= 1e-8);
    }

    #[test]
    fn low_power_positive_roots_sit_at_bare_frequencies() {
        let (_, poly) = reference_at(1e-6);
        let set = find_roots(&poly, 1e-6).unwrap();
        let pos = set.positive_branch();
        assert_eq!(pos.len(), 3);
        for (z, target) in pos.iter().zip([0.9, 1.0, 1.1]) {
            assert!((z.re - target).abs() < 1e-3, "{z}");
        }
    }

    #[test]
    fn equal_frequency_center_of_mass_root_is_pinned() {
        let p = SystemParams::reference().with_equal_frequencies();
        let powers: Vec<f64> = (0..=30).map(|i| 15e-3 * i as f64 / 30.0).collect();
        let traj = sweep_roots(&p, &powers).unwrap();
        let s = ScaledSystem::new(&p, &params::pump_steady_state(&p, 0.0).unwrap());
        for i in 1..powers.len() {
            let pinned = traj
                .at(i)
                .iter()
                .filter(|z| z.re > 0.0)
                .map(|z| (z.re - 1.0).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(pinned < 1e-6, "power {} drift {pinned}", powers[i]);
        }
        // Two side modes share a width, the pinned one keeps gamma/2.
        let last = traj.sets.last().unwrap().positive_branch();
        let mut ims: Vec<f64> = last.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] - ims[1]).abs() <= 0.01 * ims[0].abs());
        assert!(ims[2].abs() < s.gamma());
    }

    #[test]
    fn identical_consecutive_powers_do_not_hop() {
        let traj = sweep_roots(&SystemParams::reference(), &[2e-3, 2e-3]).unwrap();
        for path in &traj.paths {
            assert!((path[0] - path[1]).norm() < 1e-10);
        }
    }

    #[test]
    fn side_branch_separation_grows_with_power() {
        let traj = sweep_roots(&SystemParams::reference(), &[0.0, 2e-3, 15e-3]).unwrap();
        let sep = |i: usize| {
            let pos = traj.sets[i].positive_branch();
            pos[2].re - pos[0].re
        };
        assert!(sep(2) > sep(1));
    }

    #[test]
    fn sweep_is_continuous_under_step_halving() {
        let p = SystemParams::reference();
        let coarse: Vec<f64> = (0..=60).map(|i| 15e-3 * i as f64 / 60.0).collect();
        let fine: Vec<f64> = (0..=120).map(|i| 15e-3 * i as f64 / 120.0).collect();
        let a = sweep_roots(&p, &coarse).unwrap();
        let b = sweep_roots(&p, &fine).unwrap();
        for i in 1..coarse.len() {
            for k in 0..6 {
                let hop = (a.paths[k][i].re - a.paths[k][i - 1].re).abs();
                // Drift across the two half steps covering the same interval.
                let half = (b.paths[k][2 * i].re - b.paths[k][2 * i - 2].re).abs()
                    .max((b.paths[k][2 * i].re - b.paths[k][2 * i - 1].re).abs()
                        + (b.paths[k][2 * i - 1].re - b.paths[k][2 * i - 2].re).abs());
                assert!(hop <= 10.0 * half + 1e-9, "root {k} at step {i}: hop {hop}, half-step drift {half}");
            }
        }
        // Both sweeps agree on where each path ends.
        for k in 0..6 {
            assert!((a.paths[k][60] - b.paths[k][120]).norm() < 1e-10);
        }
    }

    #[test]
    fn sweep_preconditions() {
        let p = SystemParams::reference();
        assert!(sweep_roots(&p, &[1e-3]).is_err());
        assert!(sweep_roots(&p, &[2e-3, 1e-3]).is_err());
    }

    #[test]
    fn matching_is_optimal_assignment() {
        let from: [Complex64; 6] = std::array::from_fn(|k| re(k as f64));
        let to = [re(5.1), re(0.1), re(3.2), re(1.05), re(4.0), re(2.1)];
        assert_eq!(match_roots(&from, &to), [1, 3, 5, 2, 4, 0]);
    }

    #[test]
    fn dressed_modes_without_coupling() {
        let (p, _) = reference_at(0.0);
        let d = params::pump_steady_state(&p, 0.0).unwrap();
        let m = dressed_mode_predictions(&p, &d).unwrap();
        let s = ScaledSystem::new(&p, &d);
        assert_eq!(m.central, Complex64::new(1.0, -s.gamma() / 2.0));
        assert_eq!(m.lower, m.upper);
        assert_relative_eq!(m.upper.im, -0.5 * (s.kappa + s.gamma() / 2.0));
        assert!(!m.strong_coupling);
        assert_eq!(m.coupling_ratio, 0.0);
    }

    #[test]
    fn dressed_modes_approach_exact_roots_deep_in_strong_coupling() {
        // Equal mirrors at fixed G; narrowing the cavity deepens the strong-coupling regime.
        let p = SystemParams::reference().with_equal_frequencies();
        let base = ScaledSystem::new(&p, &params::pump_steady_state(&p, 2e-3).unwrap());
        let errors: Vec<f64> = [0.1, 0.03, 0.01]
            .iter()
            .map(|&kappa| {
                let s = ScaledSystem {
                    kappa,
                    g_eff_1: 0.1,
                    g_eff_2: 0.1,
                    ..base
                };
                let m = dressed_modes_scaled(&s);
                let set = find_roots(&DenominatorPoly::from_scaled(&s), 0.0).unwrap();
                let pos = set.positive_branch();
                assert_eq!(pos.len(), 3);
                let central = pos[1];
                assert!((central.re - 1.0).abs() < 1e-6);
                assert_relative_eq!(central.im, m.central.im, max_relative = 1e-3);
                if m.strong_coupling {
                    for (z, w) in [(pos[0], m.lower), (pos[2], m.upper)] {
                        assert_relative_eq!(z.im, w.im, max_relative = 1e-3);
                    }
                }
                (pos[2].re - pos[0].re - m.splitting()).abs() / m.splitting()
            })
            .collect();
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
        assert!(errors[2] < 0.01, "{errors:?}");
    }

    #[test]
    fn stability_flags() {
        let (_, poly) = reference_at(0.0);
        let st = stability_check(&find_roots(&poly, 0.0).unwrap());
        assert!(st.stable);
        let s = poly.system;
        for m in st.margins {
            assert!((m - s.kappa).abs() < 1e-10 || (m - s.gamma() / 2.0).abs() < 1e-10);
        }

        let (_, poly) = reference_at(15e-3);
        assert!(stability_check(&find_roots(&poly, 15e-3).unwrap()).stable);

        let mut flipped = poly.system;
        flipped.kappa = -flipped.kappa;
        let poly = DenominatorPoly::from_scaled(&flipped);
        let st = stability_check(&find_roots(&poly, 15e-3).unwrap());
        assert!(!st.stable);
    }

    #[test]
    fn real_axis_root_is_unstable() {
        let set = RootSet {
            power: 0.0,
            roots: [re(1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0)],
            residuals: [0.0; 6],
        };
        let st = stability_check(&set);
        assert!(!st.stable);
        assert_eq!(st.margins[0], 0.0);
    }
}
