use super::MetricsError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write;

pub const DEFAULT_GRID: usize = 100;
pub const GRID_PAD_BANDWIDTHS: f64 = 3.0;
/// Bandwidth used along an axis with zero spread.
pub const MIN_BANDWIDTH: f64 = 1e-6;

/// Gaussian product-kernel density on a regular grid, scaled so its maximum
/// is 1. `density[j][i]` is the value at `(x_axis[i], y_axis[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeGrid {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub density: Vec<Vec<f64>>,
    pub bandwidths: [f64; 2],
    /// Unnormalized density at the grid maximum.
    pub peak_density: f64,
}

impl KdeGrid {
    /// Grid indices `(i, j)` of the maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for (j, row) in self.density.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if v > self.density[best.1][best.0] {
                    best = (i, j);
                }
            }
        }
        best
    }
}

fn scott(values: impl Iterator<Item = f64> + Clone, n: usize) -> f64 {
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var.sqrt() * (n as f64).powf(-1.0 / 6.0)).max(MIN_BANDWIDTH)
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn kde_2d(
    points: &[(f64, f64)],
    resolution: usize,
    bandwidth: Option<(f64, f64)>,
) -> Result<KdeGrid, MetricsError> {
    let n = points.len();
    if n < 2 {
        return Err(MetricsError::TooFew { what: "points", need: 2, got: n });
    }
    if resolution < 2 {
        return Err(MetricsError::TooFew { what: "grid nodes per axis", need: 2, got: resolution });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let (hx, hy) = match bandwidth {
        Some((hx, hy)) => (hx.max(MIN_BANDWIDTH), hy.max(MIN_BANDWIDTH)),
        None => (scott(points.iter().map(|p| p.0), n), scott(points.iter().map(|p| p.1), n)),
    };

    let range = |f: fn(&(f64, f64)) -> f64| {
        points.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let x_axis = axis(x0 - GRID_PAD_BANDWIDTHS * hx, x1 + GRID_PAD_BANDWIDTHS * hx, resolution);
    let y_axis = axis(y0 - GRID_PAD_BANDWIDTHS * hy, y1 + GRID_PAD_BANDWIDTHS * hy, resolution);

    // The kernel separates, so tabulate each axis once.
    let kx: Vec<Vec<f64>> =
        points.iter().map(|p| x_axis.iter().map(|x| (-0.5 * ((x - p.0) / hx).powi(2)).exp()).collect()).collect();
    let ky: Vec<Vec<f64>> =
        points.iter().map(|p| y_axis.iter().map(|y| (-0.5 * ((y - p.1) / hy).powi(2)).exp()).collect()).collect();
    let scale = 1.0 / (n as f64 * 2.0 * PI * hx * hy);
    let mut density = vec![vec![0.0; resolution]; resolution];
    for (j, row) in density.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            *cell = scale * (0..n).map(|k| kx[k][i] * ky[k][j]).sum::<f64>();
        }
    }

    let peak = density.iter().flatten().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        for v in density.iter_mut().flatten() {
            *v /= peak;
        }
    }
    Ok(KdeGrid { x_axis, y_axis, density, bandwidths: [hx, hy], peak_density: peak })
}

/// Matrix CSV: a header of x values, then one row per y value.
pub fn render_kde_csv(grid: &KdeGrid) -> String {
    let mut out = String::from("y\\x");
    for x in &grid.x_axis {
        write!(out, ",{x}").unwrap();
    }
    out.push('\n');
    for (y, row) in grid.y_axis.iter().zip(&grid.density) {
        write!(out, "{y}").unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}
