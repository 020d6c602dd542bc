//! Momentum-space view of lattice states through the type-I discrete sine
//! transform.
//!
//! With open boundaries the zero-field eigenmodes are
//! `sqrt(2/(L+1)) sin(m p pi/(L+1))`, so the orthonormal DST-I is the
//! natural momentum basis. The transform matrix is real, symmetric and its
//! own inverse.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::GroundStateRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentumSource {
    Wavefunction,
    Density,
}

impl std::str::FromStr for MomentumSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wavefunction" | "psi" => Ok(MomentumSource::Wavefunction),
            "density" => Ok(MomentumSource::Density),
            other => Err(Error::invalid(format!("unknown momentum source '{other}'"))),
        }
    }
}

/// Coefficients on the grid `k_m = m pi/(rows+1)`, `k_n = n pi/(cols+1)`,
/// stored row-major over `(m, n)` with `1 <= m <= rows`, `1 <= n <= cols`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumMap {
    pub rows: usize,
    pub cols: usize,
    pub source: MomentumSource,
    pub coefficients: Vec<Complex64>,
}

impl MomentumMap {
    pub fn kp(&self, m: usize) -> f64 {
        m as f64 * PI / (self.rows as f64 + 1.0)
    }

    pub fn kq(&self, n: usize) -> f64 {
        n as f64 * PI / (self.cols as f64 + 1.0)
    }

    pub fn coefficient(&self, m: usize, n: usize) -> Complex64 {
        self.coefficients[(m - 1) * self.cols + (n - 1)]
    }

    pub fn magnitude(&self, m: usize, n: usize) -> f64 {
        self.coefficient(m, n).norm()
    }

    /// `sum |c|^2`.
    pub fn weight(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn dst_matrix(n: usize) -> Vec<f64> {
    let scale = (2.0 / (n as f64 + 1.0)).sqrt();
    let mut s = vec![0.0; n * n];
    for m in 1..=n {
        for p in 1..=n {
            s[(m - 1) * n + (p - 1)] = scale * ((m * p) as f64 * PI / (n as f64 + 1.0)).sin();
        }
    }
    s
}

/// Orthonormal DST-I along both axes of a row-major `rows x cols` field.
/// Applying it twice returns the input.
pub fn dst2(rows: usize, cols: usize, field: &[Complex64]) -> Result<Vec<Complex64>> {
    if rows == 0 || cols == 0 || field.len() != rows * cols {
        return Err(Error::invalid(format!(
            "field of length {} does not fit a {rows}x{cols} grid",
            field.len()
        )));
    }
    let sp = dst_matrix(rows);
    let sq = dst_matrix(cols);
    // Transform along q, then along p.
    let mut tmp = vec![Complex64::new(0.0, 0.0); rows * cols];
    for p in 0..rows {
        for n in 0..cols {
            tmp[p * cols + n] = (0..cols)
                .map(|q| field[p * cols + q] * sq[n * cols + q])
                .sum();
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    for m in 0..rows {
        for n in 0..cols {
            out[m * cols + n] = (0..rows)
                .map(|p| tmp[p * cols + n] * sp[m * rows + p])
                .sum();
        }
    }
    Ok(out)
}

pub fn sine_transform_2d(state: &GroundStateRecord, source: MomentumSource) -> Result<MomentumMap> {
    let (rows, cols) = (state.lattice.rows(), state.lattice.cols());
    let field: Vec<Complex64> = match source {
        MomentumSource::Wavefunction => state.amplitudes.clone(),
        MomentumSource::Density => state
            .amplitudes
            .iter()
            .map(|z| Complex64::new(z.norm_sqr(), 0.0))
            .collect(),
    };
    Ok(MomentumMap {
        rows,
        cols,
        source,
        coefficients: dst2(rows, cols, &field)?,
    })
}

/// Real-space field recovered from a momentum map.
pub fn inverse_sine_transform_2d(map: &MomentumMap) -> Result<Vec<Complex64>> {
    dst2(map.rows, map.cols, &map.coefficients)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub m: usize,
    pub n: usize,
    pub kp: f64,
    pub kq: f64,
    pub magnitude: f64,
}

/// Relative floor below which a grid point is not reported as a peak.
const PEAK_FLOOR: f64 = 1e-12;

/// Up to `count` local maxima of `|c|` (not exceeded by any of the eight
/// neighbours), largest first; ties go to the smaller `(m, n)`.
pub fn find_peaks(map: &MomentumMap, count: usize) -> Result<Vec<Peak>> {
    if count == 0 {
        return Err(Error::invalid("peak count must be at least 1"));
    }
    let (rows, cols) = (map.rows, map.cols);
    let mags: Vec<f64> = map.coefficients.iter().map(|c| c.norm()).collect();
    let floor = PEAK_FLOOR * mags.iter().copied().fold(0.0, f64::max);
    let at = |m: usize, n: usize| mags[(m - 1) * cols + (n - 1)];

    let mut peaks = Vec::new();
    for m in 1..=rows {
        for n in 1..=cols {
            let v = at(m, n);
            if v <= floor {
                continue;
            }
            let is_max = (m.saturating_sub(1).max(1)..=(m + 1).min(rows)).all(|mm| {
                (n.saturating_sub(1).max(1)..=(n + 1).min(cols)).all(|nn| v >= at(mm, nn))
            });
            if is_max {
                peaks.push(Peak {
                    m,
                    n,
                    kp: map.kp(m),
                    kq: map.kq(n),
                    magnitude: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then((a.m, a.n).cmp(&(b.m, b.n)))
    });
    peaks.truncate(count);
    Ok(peaks)
}
