//! Peaks, dips and their widths.
//!
//! Widths are measured at half prominence: halfway between the extremum and
//! the higher of its two bases. The central absorption peak of the double-EIT
//! spectrum sits between two dips on a raised baseline, so an absolute
//! half-maximum would not describe it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modes::{self, STRONG_COUPLING_THRESHOLD};
use crate::params::{DriveState, ScaledSystem, SystemParams};
use crate::response::{self, Observable, ResponseModel, ResponseSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Peak,
    Dip,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Peak => "peak",
            FeatureKind::Dip => "dip",
        }
    }
}

/// All positions and widths in units of `omega_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralFeature {
    pub kind: FeatureKind,
    pub center: f64,
    pub extremum_value: f64,
    pub fwhm: f64,
    pub prominence: f64,
    pub left_crossing: f64,
    pub right_crossing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureOptions {
    /// Minimum prominence as a fraction of the spectrum's dynamic range.
    pub prominence_floor: f64,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions { prominence_floor: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureReport {
    /// Sorted by center.
    pub features: Vec<SpectralFeature>,
    /// Extrema rejected by the prominence floor.
    pub dropped: usize,
}

impl FeatureReport {
    pub fn of_kind(&self, kind: FeatureKind) -> impl Iterator<Item = &SpectralFeature> {
        self.features.iter().filter(move |f| f.kind == kind)
    }

    pub fn nearest(&self, kind: FeatureKind, center: f64) -> Option<&SpectralFeature> {
        self.of_kind(kind)
            .min_by(|a, b| (a.center - center).abs().total_cmp(&(b.center - center).abs()))
    }
}

pub fn extract_features(
    spectrum: &ResponseSpectrum,
    observable: Observable,
    options: &FeatureOptions,
) -> Result<FeatureReport> {
    extract_from_samples(&spectrum.grid, &spectrum.values(observable), options)
}

/// Feature extraction on raw samples; `xs` must be strictly increasing.
pub fn extract_from_samples(xs: &[f64], ys: &[f64], options: &FeatureOptions) -> Result<FeatureReport> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "{} grid points but {} samples",
            xs.len(),
            ys.len()
        )));
    }
    response::check_grid(xs)?;
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Ok(FeatureReport { features: Vec::new(), dropped: 0 });
    }
    let floor = options.prominence_floor * range;

    let mut features = Vec::new();
    let mut dropped = 0;
    let negated: Vec<f64> = ys.iter().map(|y| -y).collect();
    for (kind, values) in [(FeatureKind::Peak, ys), (FeatureKind::Dip, negated.as_slice())] {
        for i in local_maxima(values) {
            let prominence = prominence(values, i);
            if prominence < floor {
                dropped += 1;
                continue;
            }
            features.push(measure(xs, values, i, prominence, kind)?);
        }
    }
    features.sort_by(|a, b| a.center.total_cmp(&b.center));
    Ok(FeatureReport { features, dropped })
}

fn local_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .collect()
}

/// Height above the higher of the two bases, where each base is the lowest
/// sample between the peak and the nearest higher sample (or the edge).
fn prominence(ys: &[f64], i: usize) -> f64 {
    let peak = ys[i];
    let left_min = ys[..i]
        .iter()
        .rev()
        .take_while(|&&y| y <= peak)
        .fold(peak, |m, &y| m.min(y));
    let right_min = ys[i + 1..]
        .iter()
        .take_while(|&&y| y <= peak)
        .fold(peak, |m, &y| m.min(y));
    peak - left_min.max(right_min)
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        0.5 * (x0 + x1)
    } else {
        x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    }
}

/// Vertex of the parabola through three samples.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d12 - d01) / (x[2] - x[0]);
    if !(curvature < 0.0) {
        return (x[1], y[1]);
    }
    // y = y1 + s (t - x1) + curvature (t - x1)^2 with s the slope at x1.
    let slope = d01 + curvature * (x[1] - x[0]);
    let offset = (-slope / (2.0 * curvature)).clamp(x[0] - x[1], x[2] - x[1]);
    (x[1] + offset, y[1] + slope * offset + curvature * offset * offset)
}

fn measure(xs: &[f64], ys: &[f64], i: usize, prominence: f64, kind: FeatureKind) -> Result<SpectralFeature> {
    let level = ys[i] - prominence / 2.0;

    let mut l = i;
    while l > 0 && ys[l] > level {
        l -= 1;
    }
    let left = crossing(xs[l], ys[l], xs[l + 1], ys[l + 1], level);
    let mut r = i;
    while r + 1 < ys.len() && ys[r] > level {
        r += 1;
    }
    let right = crossing(xs[r - 1], ys[r - 1], xs[r], ys[r], level);

    let (center, value) = parabolic_vertex([xs[i - 1], xs[i], xs[i + 1]], [ys[i - 1], ys[i], ys[i + 1]]);
    let fwhm = right - left;
    let step = (xs[i + 1] - xs[i]).max(xs[i] - xs[i - 1]);
    let sign = match kind {
        FeatureKind::Peak => 1.0,
        FeatureKind::Dip => -1.0,
    };
    if !(fwhm >= 3.0 * step) {
        return Err(Error::Unresolved {
            kind: kind.name(),
            center,
            fwhm,
            step,
        });
    }
    Ok(SpectralFeature {
        kind,
        center,
        extremum_value: sign * value,
        fwhm,
        prominence,
        left_crossing: left,
        right_crossing: right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefineOptions {
    /// Bisect where neighbouring samples differ by more than this fraction of the range.
    pub threshold: f64,
    /// Smallest step produced; default is a twentieth of the narrower mechanical linewidth.
    pub min_step: Option<f64>,
    /// Maximum number of grid points.
    pub budget: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            threshold: 1e-3,
            min_step: None,
            budget: 1_000_000,
        }
    }
}

/// Adaptive bisection of a detuning grid.
///
/// Every interval across which the observable jumps by more than
/// `threshold` of its dynamic range is halved until its width reaches the
/// floor step. The returned grid contains the initial one.
pub fn refine_grid(
    model: &ResponseModel,
    initial: &[f64],
    observable: Observable,
    options: &RefineOptions,
) -> Result<Vec<f64>> {
    response::check_grid(initial)?;
    let s = model.system();
    let min_step = options
        .min_step
        .unwrap_or(s.gamma_1.min(s.gamma_2) / 20.0);
    if !(min_step > 0.0) {
        return Err(Error::Domain("refinement floor step must be positive".into()));
    }
    if initial.len() > options.budget {
        return Err(Error::Budget { budget: options.budget });
    }

    let mut samples: Vec<(f64, f64)> = initial
        .iter()
        .map(|&x| model.point(x).map(|p| (x, observable.of(&p))))
        .collect::<Result<_>>()?;

    loop {
        let (lo, hi) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
        let threshold = options.threshold * (hi - lo);
        if !(threshold > 0.0) {
            break;
        }
        let mut next = Vec::with_capacity(samples.len());
        let mut inserted = 0usize;
        for w in samples.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            next.push(w[0]);
            if (y1 - y0).abs() > threshold && x1 - x0 > min_step {
                let xm = 0.5 * (x0 + x1);
                next.push((xm, observable.of(&model.point(xm)?)));
                inserted += 1;
            }
        }
        next.push(*samples.last().expect("non-empty grid"));
        if next.len() > options.budget {
            return Err(Error::Budget { budget: options.budget });
        }
        samples = next;
        if inserted == 0 {
            break;
        }
    }
    Ok(samples.into_iter().map(|(x, _)| x).collect())
}

/// Refines `initial` for `observable` and evaluates the full response on the result.
pub fn refined_spectrum(
    params: &SystemParams,
    drive: &DriveState,
    initial: &[f64],
    observable: Observable,
    options: &RefineOptions,
) -> Result<ResponseSpectrum> {
    let model = ResponseModel::new(params, drive)?;
    let grid = refine_grid(&model, initial, observable, options)?;
    let points = model.scan(&grid)?;
    Ok(ResponseSpectrum {
        grid,
        points,
        drive: *drive,
        params: *params,
    })
}

/// Whether the two mirrors share a frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyMode {
    Unequal,
    Equal,
}

impl FrequencyMode {
    pub fn of(params: &SystemParams) -> Self {
        if params.omega_1 == params.omega_2 {
            FrequencyMode::Equal
        } else {
            FrequencyMode::Unequal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Width,
    Position,
    Separation,
}

/// One analytic estimate and where in the spectrum it applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticPrediction {
    pub label: &'static str,
    pub formula: &'static str,
    pub quantity: Quantity,
    pub kind: FeatureKind,
    pub value: f64,
    /// Expected feature center; for separations, the lower of the pair.
    pub center_hint: f64,
    /// Upper member of a separation pair.
    pub partner_hint: Option<f64>,
    pub regime: &'static str,
    pub valid: bool,
}

/// Closed-form width, position and splitting estimates in units of `omega_m`.
pub fn analytic_widths(
    params: &SystemParams,
    drive: &DriveState,
    mode: FrequencyMode,
) -> Result<Vec<AnalyticPrediction>> {
    params.validate()?;
    if mode == FrequencyMode::Equal && params.omega_1 != params.omega_2 {
        return Err(Error::invalid("omega_2", "equal-frequency formulas need omega_1 = omega_2"));
    }
    let s = ScaledSystem::new(params, drive);
    let gamma = s.gamma();
    let total = s.total_coupling_sq();
    let strong = modes::dressed_modes_scaled(&s);
    let strong_valid = strong.coupling_ratio >= STRONG_COUPLING_THRESHOLD;
    let side_half = 0.5 * strong.splitting();
    let side_width = s.kappa + gamma / 2.0;

    let p = |label, formula, quantity, kind, value, center_hint, regime, valid| AnalyticPrediction {
        label,
        formula,
        quantity,
        kind,
        value,
        center_hint,
        partner_hint: None,
        regime,
        valid,
    };

    let mut out = Vec::new();
    match mode {
        FrequencyMode::Unequal => {
            let spacing = (s.omega_1 - s.omega_2).abs();
            let dip_1 = gamma + s.g_eff_1.powi(2) / s.kappa;
            let dip_2 = gamma + s.g_eff_2.powi(2) / s.kappa;
            let central = spacing - (gamma + total / (2.0 * s.kappa));
            let weak = "dips narrower than half the mechanical spacing";
            out.push(p("dip_omega_1_width", "gamma + G1^2/kappa", Quantity::Width, FeatureKind::Dip,
                dip_1, s.omega_1, weak, dip_1 < spacing / 2.0));
            out.push(p("dip_omega_2_width", "gamma + G2^2/kappa", Quantity::Width, FeatureKind::Dip,
                dip_2, s.omega_2, weak, dip_2 < spacing / 2.0));
            out.push(p("central_peak_width", "(omega_1 - omega_2) - (gamma + (G1^2 + G2^2)/(2 kappa))",
                Quantity::Width, FeatureKind::Peak, central, 1.0, "positive formula value", central > 0.0));
            let strong_regime = "2(G1^2 + G2^2) >= 10 (kappa - gamma/2)^2";
            out.push(p("central_peak_width_strong", "gamma", Quantity::Width, FeatureKind::Peak,
                gamma, 1.0, strong_regime, strong_valid));
            out.push(p("lower_side_peak_width", "kappa + gamma/2", Quantity::Width, FeatureKind::Peak,
                side_width, 1.0 - side_half, strong_regime, strong_valid));
            out.push(p("upper_side_peak_width", "kappa + gamma/2", Quantity::Width, FeatureKind::Peak,
                side_width, 1.0 + side_half, strong_regime, strong_valid));
            let mut split = p("side_peak_separation", "sqrt(2(G1^2 + G2^2))", Quantity::Separation,
                FeatureKind::Peak, strong.splitting(), 1.0 - side_half, strong_regime, strong_valid);
            split.partner_hint = Some(1.0 + side_half);
            out.push(split);
        }
        FrequencyMode::Equal => {
            // Only G1^2 + G2^2 enters with equal frequencies; G is its rms.
            let g = (total / 2.0).sqrt();
            let dip = gamma + 2.0 * g * g / s.kappa;
            out.push(p("central_dip_width", "gamma + 2 G^2/kappa", Quantity::Width, FeatureKind::Dip,
                dip, s.omega_1, "2G < kappa", 2.0 * g < s.kappa));
            let strong_regime = "2G > kappa";
            let strong_valid = 2.0 * g > s.kappa;
            out.push(p("lower_peak_position", "omega_m - G", Quantity::Position, FeatureKind::Peak,
                1.0 - g, 1.0 - g, strong_regime, strong_valid));
            out.push(p("upper_peak_position", "omega_m + G", Quantity::Position, FeatureKind::Peak,
                1.0 + g, 1.0 + g, strong_regime, strong_valid));
            out.push(p("lower_peak_width", "kappa + gamma/2", Quantity::Width, FeatureKind::Peak,
                side_width, 1.0 - g, strong_regime, strong_valid));
            out.push(p("upper_peak_width", "kappa + gamma/2", Quantity::Width, FeatureKind::Peak,
                side_width, 1.0 + g, strong_regime, strong_valid));
            let mut split = p("peak_separation", "2G", Quantity::Separation, FeatureKind::Peak,
                2.0 * g, 1.0 - g, strong_regime, strong_valid);
            split.partner_hint = Some(1.0 + g);
            out.push(split);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticComparison {
    pub label: &'static str,
    pub formula: &'static str,
    pub numeric: Option<f64>,
    pub analytic: f64,
    /// `|numeric - analytic| / |analytic|`.
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub within_tolerance: Option<bool>,
    pub regime: &'static str,
    pub valid: bool,
}

/// Measures each prediction on the nearest feature of the matching kind.
pub fn compare(predictions: &[AnalyticPrediction], report: &FeatureReport, tolerance: f64) -> Vec<AnalyticComparison> {
    predictions
        .iter()
        .map(|pred| {
            let nearest = |hint| report.nearest(pred.kind, hint);
            let numeric = match pred.quantity {
                Quantity::Width => nearest(pred.center_hint).map(|f| f.fwhm),
                Quantity::Position => nearest(pred.center_hint).map(|f| f.center),
                Quantity::Separation => match (nearest(pred.center_hint), pred.partner_hint.and_then(nearest)) {
                    (Some(a), Some(b)) if a != b => Some(b.center - a.center),
                    _ => None,
                },
            };
            let deviation = numeric
                .filter(|_| pred.value != 0.0)
                .map(|n| (n - pred.value).abs() / pred.value.abs());
            AnalyticComparison {
                label: pred.label,
                formula: pred.formula,
                numeric,
                analytic: pred.value,
                deviation,
                tolerance,
                within_tolerance: deviation.map(|d| d <= tolerance),
                regime: pred.regime,
                valid: pred.valid,
            }
        })
        .collect()
}
