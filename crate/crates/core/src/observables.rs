//! Densities, position moments, spreading exponents and front speeds.
//!
//! Positions on the ring are unwrapped by cutting the lattice at a seam,
//! so moments behave as on a line as long as no probability sits on the
//! seam. [`moments`] picks the emptiest arc; [`moments_about`] cuts
//! opposite a reference position, which is what a time series wants once
//! two fronts leave an empty gap between them.

use crate::engine::WalkRun;
use crate::error::{Error, Result};
use crate::types::{SpinorField, WalkModel};

/// Probability allowed inside the seam window before moments are refused.
pub const SEAM_TOL: f64 = 1e-8;

/// Default fit window for the spreading exponent.
pub const DEFAULT_EXPONENT_WINDOW: (usize, usize) = (100, 800);

/// `|u_m|² + |d_m|²`.
pub fn density(field: &SpinorField) -> Vec<f64> {
    field
        .u
        .iter()
        .zip(&field.d)
        .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
        .collect()
}

fn seam_width(n: usize) -> usize {
    (n / 64).max(1)
}

/// Per-site probability regarded as empty when choosing the seam.
const EMPTY_SITE: f64 = 1e-15;

/// Middle of the longest circular run of empty sites, or of the lightest
/// width-`w` window when no site is empty.
fn seam_center(rho: &[f64], w: usize) -> usize {
    let n = rho.len();
    let Some(anchor) = rho.iter().position(|&r| r >= EMPTY_SITE) else {
        return 0;
    };
    let mut best: Option<(usize, usize)> = None; // (start, length)
    let mut run_start = None;
    for k in 1..=n {
        let m = (anchor + k) % n;
        let empty = rho[m] < EMPTY_SITE;
        match (empty, run_start) {
            (true, None) => run_start = Some(k),
            (false, Some(start)) => {
                let len = k - start;
                if best.is_none_or(|(_, l)| len > l) {
                    best = Some(((anchor + start) % n, len));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some((start, len)) = best {
        return (start + len / 2) % n;
    }
    let mut mass: f64 = rho[..w].iter().sum();
    let mut lightest = (0, mass);
    for start in 1..n {
        mass += rho[(start + w - 1) % n] - rho[start - 1];
        if mass < lightest.1 {
            lightest = (start, mass);
        }
    }
    (lightest.0 + w / 2) % n
}

/// Probability within `w / 2` sites of `center`.
fn window_mass(rho: &[f64], center: usize, w: usize) -> f64 {
    let n = rho.len() as i64;
    let half = (w / 2) as i64;
    (-half..=half)
        .map(|k| rho[(center as i64 + k).rem_euclid(n) as usize])
        .sum()
}

/// Site coordinates unwrapped with the seam at `seam`. Returns
/// `(index, unwrapped position)` pairs covering the ring once.
fn unwrap_positions(rho: &[f64], seam: usize) -> Result<Vec<(usize, f64)>> {
    let n = rho.len();
    let w = seam_width(n);
    let mass = window_mass(rho, seam, w);
    if mass > SEAM_TOL {
        return Err(Error::WrapAmbiguity(mass));
    }
    let first = (seam + 1) % n;
    Ok((0..n)
        .map(|k| {
            let idx = (first + k) % n;
            let pos = if idx >= first {
                idx as f64
            } else {
                (idx + n) as f64
            };
            (idx, pos)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Mean position in sites, reduced into `[0, n)`.
    pub mean: f64,
    /// Standard deviation in sites.
    pub sigma: f64,
    pub mean_x: f64,
    pub sigma_x: f64,
}

/// Moments with the ring cut at its emptiest arc.
pub fn moments(rho: &[f64], dx: f64) -> Result<Moments> {
    let seam = seam_center(rho, seam_width(rho.len()));
    moments_with_seam(rho, dx, seam)
}

/// Moments with the ring cut opposite `reference` (in sites).
pub fn moments_about(rho: &[f64], dx: f64, reference: f64) -> Result<Moments> {
    let n = rho.len();
    let seam = (reference + n as f64 / 2.0).round().rem_euclid(n as f64) as usize % n;
    moments_with_seam(rho, dx, seam)
}

fn moments_with_seam(rho: &[f64], dx: f64, seam: usize) -> Result<Moments> {
    let total: f64 = rho.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(total));
    }
    let n = rho.len() as f64;
    let positions = unwrap_positions(rho, seam)?;
    let mean: f64 = positions.iter().map(|&(i, x)| rho[i] * x).sum();
    let var: f64 = positions
        .iter()
        .map(|&(i, x)| rho[i] * (x - mean).powi(2))
        .sum();
    let sigma = var.max(0.0).sqrt();
    let mean = mean.rem_euclid(n);
    Ok(Moments {
        mean,
        sigma,
        mean_x: mean * dx,
        sigma_x: sigma * dx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEntry {
    pub j: usize,
    pub norm: f64,
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSeries {
    pub model: WalkModel,
    pub entries: Vec<SpreadEntry>,
}

impl SpreadSeries {
    /// Each snapshot is cut opposite the previous mean, so the series
    /// follows the packet continuously.
    pub fn from_run(run: &WalkRun) -> Result<Self> {
        let mut reference = None;
        let entries = run
            .snapshots
            .iter()
            .map(|s| {
                let rho = density(&s.field);
                let norm: f64 = rho.iter().sum();
                let m = match reference {
                    None => moments(&rho, s.field.dx())?,
                    Some(r) => moments_about(&rho, s.field.dx(), r)?,
                };
                reference = Some(m.mean);
                Ok(SpreadEntry {
                    j: s.step,
                    norm,
                    mean: m.mean,
                    sigma: m.sigma,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: run.model,
            entries,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub eta: f64,
    pub fit_window: (usize, usize),
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least-squares `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Slope of `log σ_j` against `log j` over `window` (inclusive).
pub fn spreading_exponent(series: &SpreadSeries, window: (usize, usize)) -> Result<ExponentFit> {
    const MIN_POINTS: usize = 8;
    let (lo, hi) = (window.0.max(1), window.1);
    let inside: Vec<&SpreadEntry> = series
        .entries
        .iter()
        .filter(|e| e.j >= lo && e.j <= hi)
        .collect();
    if inside.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_POINTS,
            found: inside.len(),
        });
    }
    if let Some(e) = inside.iter().find(|e| e.sigma <= 0.0) {
        return Err(Error::ZeroSigma(e.j));
    }
    let xs: Vec<f64> = inside.iter().map(|e| (e.j as f64).ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|e| e.sigma.ln()).collect();
    let (eta, _, residual) = linear_fit(&xs, &ys);
    Ok(ExponentFit {
        eta,
        fit_window: (lo, hi),
        residual,
        points: inside.len(),
    })
}

/// Smallest `r` such that the sites within circular distance `r` of
/// `center` carry at least `quantile` of the probability.
fn quantile_radius(rho: &[f64], center: f64, quantile: f64) -> usize {
    let n = rho.len();
    let c = center.round() as i64;
    let mut acc = rho[c.rem_euclid(n as i64) as usize];
    let mut r = 0usize;
    while acc < quantile && r < n / 2 {
        r += 1;
        let right = (c + r as i64).rem_euclid(n as i64) as usize;
        let left = (c - r as i64).rem_euclid(n as i64) as usize;
        acc += rho[right];
        if left != right {
            acc += rho[left];
        }
    }
    r
}

/// Speed (sites per step) at which the `quantile` probability radius around
/// the initial centroid grows, fitted by least squares over snapshots with
/// `j ≥ steps / 8`.
pub fn front_velocity(run: &WalkRun, quantile: f64) -> Result<f64> {
    if !(quantile > 0.5 && quantile < 1.0) {
        return Err(Error::InvalidQuantile(quantile));
    }
    let n = run.n;
    let init = density(run.initial_field());
    let center = moments(&init, 1.0)?.mean;
    let first = run.steps / 8;
    let mut js = Vec::new();
    let mut rs = Vec::new();
    for s in &run.snapshots {
        let rho = density(&s.field);
        // probability on the far side of the ring means the front wrapped
        let antipode = (center + n as f64 / 2.0).round() as usize % n;
        let seam = window_mass(&rho, antipode, seam_width(n));
        if seam > SEAM_TOL {
            return Err(Error::WrappedFront(s.step));
        }
        if s.step >= first {
            js.push(s.step as f64);
            rs.push(quantile_radius(&rho, center, quantile) as f64);
        }
    }
    if js.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            found: js.len(),
        });
    }
    Ok(linear_fit(&js, &rs).0)
}
