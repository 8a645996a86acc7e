//! Level-k theta functions with characteristics on `E = C / (Z + tau Z)` and
//! their values at the k Bohr-Sommerfeld fibers `b = j/k` of the projection
//! onto the circle base.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::params::Level;

pub const DEFAULT_EPS: f64 = 1e-12;
/// Hard cap on the truncation half-width.
pub const MAX_WINDOW: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("tau = {re} + {im}i is not in the upper half plane")]
    NotUpperHalfPlane { re: f64, im: f64 },
    #[error("characteristic numerator {numerator} must be below the level {level}")]
    BadCharacteristic { numerator: u32, level: u32 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("normalization constant must be positive and finite, got {0}")]
    BadNormalization(f64),
    #[error("series truncation failed: {0}")]
    TruncationFailure(String),
}

/// Period `tau` of the lattice `Z + tau Z`, `Im tau > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularParameter(Complex64);

impl ModularParameter {
    pub fn new(tau: Complex64) -> Result<Self, ThetaError> {
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
            return Err(ThetaError::NotUpperHalfPlane {
                re: tau.re,
                im: tau.im,
            });
        }
        Ok(ModularParameter(tau))
    }

    pub fn get(self) -> Complex64 {
        self.0
    }
}

impl Default for ModularParameter {
    /// The square torus, `tau = i`.
    fn default() -> Self {
        ModularParameter(Complex64::new(0.0, 1.0))
    }
}

/// Characteristic `w = numerator / k` with `0 <= numerator < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ThetaCharacteristic {
    level: Level,
    numerator: u32,
}

impl ThetaCharacteristic {
    pub fn new(level: Level, numerator: u32) -> Result<Self, ThetaError> {
        if numerator >= level.get() {
            return Err(ThetaError::BadCharacteristic {
                numerator,
                level: level.get(),
            });
        }
        Ok(ThetaCharacteristic { level, numerator })
    }

    pub fn level(self) -> Level {
        self.level
    }

    pub fn numerator(self) -> u32 {
        self.numerator
    }

    pub fn w(self) -> f64 {
        f64::from(self.numerator) / f64::from(self.level.get())
    }
}

/// Bohr-Sommerfeld point `b = numerator / k` on the base circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BsFiberPoint {
    pub numerator: u32,
    pub level: Level,
}

impl BsFiberPoint {
    pub fn b(self) -> f64 {
        f64::from(self.numerator) / f64::from(self.level.get())
    }
}

/// Uniform positive multiplier from the half-form normalization. For a flat
/// circle fiber the half-density is constant, so one scalar suffices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HalfFormNormalization(f64);

impl HalfFormNormalization {
    pub fn new(constant: f64) -> Result<Self, ThetaError> {
        if !constant.is_finite() || constant <= 0.0 {
            return Err(ThetaError::BadNormalization(constant));
        }
        Ok(HalfFormNormalization(constant))
    }

    pub fn constant(self) -> f64 {
        self.0
    }
}

impl Default for HalfFormNormalization {
    fn default() -> Self {
        HalfFormNormalization(1.0)
    }
}

/// A truncated theta series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaSeries {
    pub value: Complex64,
    /// Terms `|n| <= window` were summed.
    pub window: u64,
    /// Modulus of the largest retained term.
    pub largest_term: f64,
    /// Upper bound on the modulus of the omitted tail, `eps * largest_term`.
    pub truncation_bound: f64,
}

/// Smallest half-width `d >= 1` of a Gaussian window such that the two tails
/// beyond distance `d` from the peak, relative to the largest lattice term,
/// stay below `eps`.
///
/// With `a = pi k Im tau`, terms at distance `x` from the continuous peak have
/// relative size `exp(-a x^2)`; one tail is at most
/// `exp(-a d^2) / (1 - exp(-2 a d))`, and the lattice term nearest the peak is
/// at least `exp(-a / 4)` of the peak.
fn tail_half_width(a: f64, eps: f64) -> Option<u64> {
    let target = eps.ln();
    let mut d = 1u64;
    while d <= MAX_WINDOW {
        let df = d as f64;
        let log_tail =
            std::f64::consts::LN_2 - a * df * df - (-(-2.0 * a * df).exp()).ln_1p() + a / 4.0;
        if log_tail < target {
            return Some(d);
        }
        // the exponent is quadratic; step faster once far from the answer
        d = if log_tail - target > 50.0 {
            d * 2
        } else {
            d + 1
        };
    }
    None
}

/// `sum_n exp(pi i k tau (n+w)^2 + 2 pi i k (n+w) z)` truncated to `|n| <= N`
/// so that the omitted tail is below `eps` times the largest retained term.
pub fn theta_series(
    ch: ThetaCharacteristic,
    z: Complex64,
    tau: ModularParameter,
    eps: f64,
) -> Result<ThetaSeries, ThetaError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(ThetaError::BadTolerance(eps));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(ThetaError::TruncationFailure(format!(
            "non-finite argument {z}"
        )));
    }
    let k = f64::from(ch.level.get());
    let w = ch.w();
    let tau = tau.get();
    let a = PI * k * tau.im;
    // term modulus is exp(-a (x - x0)^2 + a x0^2) with x = n + w
    let x0 = -z.im / tau.im;
    let peak_log = a * x0 * x0;
    if peak_log > 700.0 {
        return Err(ThetaError::TruncationFailure(format!(
            "peak term exp({peak_log:.1}) overflows; |Im z| too large for Im tau"
        )));
    }
    let d = tail_half_width(a, eps).ok_or_else(|| {
        ThetaError::TruncationFailure(format!("tail bound needs more than {MAX_WINDOW} terms"))
    })?;
    let center = (x0 - w).abs().ceil();
    let window = center as u64 + d;
    if window > MAX_WINDOW {
        return Err(ThetaError::TruncationFailure(format!(
            "window {window} exceeds the cap of {MAX_WINDOW}"
        )));
    }
    let n_max = window as i64;
    let i_pi_k = Complex64::new(0.0, PI * k);
    let mut value = Complex64::new(0.0, 0.0);
    let mut largest: f64 = 0.0;
    for n in -n_max..=n_max {
        let x = n as f64 + w;
        let term = (i_pi_k * (tau * x * x + 2.0 * x * z)).exp();
        largest = largest.max(term.norm());
        value += term;
    }
    Ok(ThetaSeries {
        value,
        window,
        largest_term: largest,
        truncation_bound: eps * largest,
    })
}

pub fn theta_value(
    ch: ThetaCharacteristic,
    z: Complex64,
    tau: ModularParameter,
    eps: f64,
) -> Result<Complex64, ThetaError> {
    theta_series(ch, z, tau, eps).map(|s| s.value)
}

/// The k points of order k on the base circle, `j/k` for `j = 0..k`.
pub fn bs_points(k: Level) -> Vec<BsFiberPoint> {
    (0..k.get())
        .map(|numerator| BsFiberPoint {
            numerator,
            level: k,
        })
        .collect()
}

/// Theta basis evaluated at the Bohr-Sommerfeld fibers:
/// `entries[(w, j)] = c * theta_{w/k}(j/k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaBasisMatrix {
    pub level: Level,
    pub tau: ModularParameter,
    pub eps: f64,
    pub norm: HalfFormNormalization,
    pub entries: DMatrix<Complex64>,
    /// Per-entry truncation bounds, already scaled by the normalization.
    pub truncation_bounds: DMatrix<f64>,
}

impl ThetaBasisMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.clone().determinant()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .entries
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.singular_values()
            .iter()
            .filter(|&&s| s > threshold)
            .count()
    }

    /// Column `j` scaled to unit norm with its first nonzero entry made real
    /// and positive: the point of projective space it represents.
    pub fn projective_column(&self, j: usize) -> Vec<Complex64> {
        let col = self.entries.column(j);
        let norm = col.norm();
        let pivot = col
            .iter()
            .find(|c| c.norm() > 0.0)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot / pivot.norm();
        col.iter().map(|c| c / (phase * norm)).collect()
    }
}

pub fn bpu_matrix(
    k: Level,
    tau: ModularParameter,
    eps: f64,
    norm: HalfFormNormalization,
) -> Result<ThetaBasisMatrix, ThetaError> {
    let n = k.get() as usize;
    let points = bs_points(k);
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut bounds = DMatrix::zeros(n, n);
    let c = norm.constant();
    for w in 0..n {
        let ch = ThetaCharacteristic::new(k, w as u32)?;
        for (j, p) in points.iter().enumerate() {
            let s = theta_series(ch, Complex64::new(p.b(), 0.0), tau, eps)?;
            entries[(w, j)] = s.value * c;
            bounds[(w, j)] = s.truncation_bound * c;
        }
    }
    Ok(ThetaBasisMatrix {
        level: k,
        tau,
        eps,
        norm,
        entries,
        truncation_bounds: bounds,
    })
}
