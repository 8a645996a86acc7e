//! Complex Bohr-Sommerfeld locus over the circle base of the elliptic curve.
//!
//! Holonomy data on a fiber circle is an exponent in `C mod Z`. Over the base
//! point `b` the prequantum connection of level k has exponent `k b`, and a
//! flat supercycle connection with class `s` contributes `u s`. A point
//! `(b, s)` lies on the locus at level `u` when `k b + u s` is an integer `m`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::Level;

/// Maximum residual-correction steps per candidate in [`trace_slice`].
const MAX_REFINE_STEPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UCurveError {
    #[error("u must be nonzero for a traced slice")]
    ZeroU,
    #[error("grid must have at least 2 nodes, got {0}")]
    GridTooSmall(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("window [{min}, {max}] is empty or not finite")]
    BadWindow { min: f64, max: f64 },
}

/// `(b, s, u, m)` with `b` in `[0, 1)` and `m` the integer matched by `k b + u s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupercyclePoint {
    pub b: f64,
    pub s: Complex64,
    pub u: Complex64,
    pub m: i64,
}

impl SupercyclePoint {
    /// `|k b + u s - m|` for this point's own branch.
    pub fn residual(&self, k: Level) -> f64 {
        (f64::from(k.get()) * self.b + self.u * self.s - self.m as f64).norm()
    }
}

/// A candidate that did not reach the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoConvergence {
    pub b: f64,
    pub m: i64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UCurveSlice {
    pub u: Complex64,
    pub points: Vec<SupercyclePoint>,
    pub failures: Vec<NoConvergence>,
}

/// Square window `[min, max] x [min, max]` for `(Re s, Im s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SWindow {
    pub min: f64,
    pub max: f64,
}

impl SWindow {
    pub fn new(min: f64, max: f64) -> Result<Self, UCurveError> {
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(UCurveError::BadWindow { min, max });
        }
        Ok(SWindow { min, max })
    }

    pub fn contains(&self, s: Complex64) -> bool {
        (self.min..=self.max).contains(&s.re) && (self.min..=self.max).contains(&s.im)
    }

    fn radius(&self) -> f64 {
        self.min.abs().max(self.max.abs()) * std::f64::consts::SQRT_2
    }
}

/// Distance of the holonomy exponent `k b + u s` from the integers.
pub fn complex_bs_residual(k: Level, b: f64, s: Complex64, u: Complex64) -> f64 {
    let z = f64::from(k.get()) * b + u * s;
    let re = z.re - z.re.round();
    re.hypot(z.im)
}

/// The slice over `u = 0`: exactly the k points `b = j/k`, `s = 0`.
pub fn zero_level_fiber(k: Level) -> UCurveSlice {
    let kk = k.get();
    let zero = Complex64::new(0.0, 0.0);
    let points = (0..kk)
        .map(|j| SupercyclePoint {
            b: f64::from(j) / f64::from(kk),
            s: zero,
            u: zero,
            m: i64::from(j),
        })
        .collect();
    UCurveSlice {
        u: zero,
        points,
        failures: Vec::new(),
    }
}

/// On-locus points over a fixed `u != 0`.
///
/// For every branch `m` that can meet the window and every grid node
/// `b = i / grid`, solves `k b + u s = m` for `s`, corrects the residual until
/// it drops below `tol`, and keeps the point when `s` lies in the window.
/// Points whose `b` and `s` both agree within `10 tol` are merged, keeping the
/// one with smaller `b`, then smaller `|s|`. Output is sorted by `(m, b)`.
pub fn trace_slice(
    k: Level,
    u: Complex64,
    window: SWindow,
    grid: usize,
    tol: f64,
) -> Result<UCurveSlice, UCurveError> {
    if u.norm() == 0.0 || !u.re.is_finite() || !u.im.is_finite() {
        return Err(UCurveError::ZeroU);
    }
    if grid < 2 {
        return Err(UCurveError::GridTooSmall(grid));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(UCurveError::BadTolerance(tol));
    }
    let kf = f64::from(k.get());
    // |m - k b| = |u s| <= |u| * radius, b in [0, 1)
    let reach = u.norm() * window.radius();
    let m_lo = (-reach).floor() as i64;
    let m_hi = (kf + reach).ceil() as i64;

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for m in m_lo..=m_hi {
        for i in 0..grid {
            let b = i as f64 / grid as f64;
            let target = Complex64::new(m as f64 - kf * b, 0.0);
            let mut s = target / u;
            if !window.contains(s) {
                continue;
            }
            let mut residual = (target - u * s).norm();
            let mut steps = 0;
            while residual >= tol && steps < MAX_REFINE_STEPS {
                s += (target - u * s) / u;
                residual = (target - u * s).norm();
                steps += 1;
            }
            if residual < tol {
                if window.contains(s) {
                    points.push(SupercyclePoint { b, s, u, m });
                }
            } else {
                failures.push(NoConvergence { b, m, residual });
            }
        }
    }

    let merge = 10.0 * tol;
    points.sort_by(|p, q| p.b.total_cmp(&q.b).then(p.s.norm().total_cmp(&q.s.norm())));
    let mut kept: Vec<SupercyclePoint> = Vec::with_capacity(points.len());
    for p in points {
        let dup = kept
            .iter()
            .rev()
            .take_while(|q| p.b - q.b < merge)
            .any(|q| (p.s - q.s).norm() < merge);
        if !dup {
            kept.push(p);
        }
    }
    kept.sort_by(|p, q| p.m.cmp(&q.m).then(p.b.total_cmp(&q.b)));
    Ok(UCurveSlice {
        u,
        points: kept,
        failures,
    })
}

/// Translation by the order-k point: `b -> b + 1/k (mod 1)`, `m -> m + 1`,
/// minus `k` when `b` wraps. The residual is unchanged.
pub fn deck_translate(p: SupercyclePoint, k: Level) -> SupercyclePoint {
    let kk = i64::from(k.get());
    let kf = f64::from(k.get());
    let mut q = p.b * kf + 1.0;
    // keep lattice points j/k exact
    if (q - q.round()).abs() < 1e-9 {
        q = q.round();
    }
    let mut m = p.m + 1;
    if q >= kf {
        q -= kf;
        m -= kk;
    }
    SupercyclePoint {
        b: q / kf,
        s: p.s,
        u: p.u,
        m,
    }
}

/// Pairs of points, one from each slice, whose `b` and `s` agree within
/// `10 tol`.
pub fn shared_points(
    a: &UCurveSlice,
    b: &UCurveSlice,
    tol: f64,
) -> Vec<(SupercyclePoint, SupercyclePoint)> {
    let merge = 10.0 * tol;
    let mut out = Vec::new();
    for p in &a.points {
        for q in &b.points {
            if (p.b - q.b).abs() < merge && (p.s - q.s).norm() < merge {
                out.push((*p, *q));
            }
        }
    }
    out
}
