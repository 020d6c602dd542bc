//! Ground states, fidelity traces and level crossings.
//!
//! The ground-state fidelity `F(alpha) = |<Phi(alpha)|Phi(alpha + step)>|`
//! stays close to one while the ground state evolves smoothly and collapses
//! towards zero when two levels cross. Crossings are bracketed on a grid and
//! then sharpened by bisection on the overlap with the state at the lower
//! end of the bracket, which homes in on the leftmost crossing inside it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, ground_pair};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, Gauge, GaugeConfig, LatticeSpec};
use crate::matrix::inner;
use crate::ordered_try_map;

pub const DEFAULT_FIDELITY_STEP: f64 = 1e-3;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_REFINE_WIDTH: f64 = 1e-5;

/// Flux window searched by [`fit_alpha0`].
pub const FIT_WINDOW: (f64, f64) = (0.0, 0.6);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateRecord {
    pub lattice: LatticeSpec,
    pub gauge: GaugeConfig,
    pub energy: f64,
    /// Row-major amplitudes, phase-fixed by the eigensolver convention.
    pub amplitudes: Vec<Complex64>,
    pub gap: f64,
    pub degenerate: bool,
}

impl GroundStateRecord {
    pub fn alpha(&self) -> f64 {
        self.gauge.alpha
    }

    pub fn amplitude(&self, p: usize, q: usize) -> Result<Complex64> {
        Ok(self.amplitudes[self.lattice.index(p, q)?])
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn ground_state(lattice: &LatticeSpec, gauge: &GaugeConfig) -> Result<GroundStateRecord> {
    let h = build_hamiltonian(lattice, gauge)?;
    let dec = eigh(&h).map_err(|e| e.at_alpha(gauge.alpha))?;
    let g = ground_pair(&dec)?;
    Ok(GroundStateRecord {
        lattice: *lattice,
        gauge: *gauge,
        energy: g.energy,
        amplitudes: g.vector,
        gap: g.gap,
        degenerate: g.degenerate,
    })
}

/// `|<a|b>|`.
pub fn overlap(a: &GroundStateRecord, b: &GroundStateRecord) -> f64 {
    inner(&a.amplitudes, &b.amplitudes).norm()
}

/// `|<Phi(alpha)|Phi(alpha + delta)>|`; exactly one for `delta == 0`.
pub fn fidelity(lattice: &LatticeSpec, gauge: Gauge, alpha: f64, delta: f64) -> Result<f64> {
    let a = ground_state(lattice, &GaugeConfig::new(alpha, gauge))?;
    if delta == 0.0 {
        return Ok(1.0);
    }
    let b = ground_state(lattice, &GaugeConfig::new(alpha + delta, gauge))?;
    Ok(overlap(&a, &b))
}

/// Exact open-boundary ground state at zero field,
/// `psi(p,q) ∝ sin(p pi/(L_p+1)) sin(q pi/(L_q+1))`, normalized.
pub fn zero_field_ground_state(lattice: &LatticeSpec) -> Vec<f64> {
    let (lp, lq) = (lattice.rows() as f64, lattice.cols() as f64);
    let pref = 2.0 / ((lp + 1.0) * (lq + 1.0)).sqrt();
    lattice
        .sites()
        .map(|s| pref * (s.p as f64 * PI / (lp + 1.0)).sin() * (s.q as f64 * PI / (lq + 1.0)).sin())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub lattice: LatticeSpec,
    pub gauge: Gauge,
    pub step: f64,
    pub alphas: Vec<f64>,
    /// `fidelities[i] = |<Phi(alphas[i])|Phi(alphas[i] + step)>|`.
    pub fidelities: Vec<f64>,
    /// Ground level at `alphas[i]` is degenerate within tolerance.
    pub degenerate: Vec<bool>,
}

impl FidelityTrace {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Index of the smallest fidelity.
    pub fn argmin(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| self.fidelities[a].total_cmp(&self.fidelities[b]))
    }
}

/// Samples `F` on `alpha_min + i * step` for every grid point not beyond
/// `alpha_max`.
pub fn fidelity_trace(
    lattice: &LatticeSpec,
    gauge: Gauge,
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
) -> Result<FidelityTrace> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!(
            "fidelity step must be positive, got {step}"
        )));
    }
    if !(alpha_min.is_finite() && alpha_max.is_finite()) || alpha_max < alpha_min {
        return Err(Error::invalid(format!(
            "invalid range [{alpha_min}, {alpha_max}]"
        )));
    }
    let count = ((alpha_max - alpha_min) / step + 1e-9).floor() as usize + 1;
    // One extra point so the last grid value has a right neighbour.
    let points: Vec<f64> = (0..=count).map(|i| alpha_min + i as f64 * step).collect();
    let states = ordered_try_map(&points, |&a| {
        ground_state(lattice, &GaugeConfig::new(a, gauge))
    })?;
    let fidelities = states.windows(2).map(|w| overlap(&w[0], &w[1])).collect();
    let degenerate = states[..count].iter().map(|s| s.degenerate).collect();
    Ok(FidelityTrace {
        lattice: *lattice,
        gauge,
        step,
        alphas: points[..count].to_vec(),
        fidelities,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Grid bracket.
    pub lo: f64,
    pub hi: f64,
    /// Bisection bracket; equals the grid bracket when not refined.
    pub refined_lo: f64,
    pub refined_hi: f64,
    /// Midpoint of the refined bracket.
    pub alpha: f64,
    pub min_fidelity: f64,
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub rows: usize,
    pub cols: usize,
    pub gauge: Gauge,
    pub threshold: f64,
    pub crossings: Vec<Crossing>,
    /// Location of the first crossing.
    pub alpha0: Option<f64>,
    /// `2 / (L + 1)` for square lattices.
    pub fit_prediction: Option<f64>,
    /// `1.5 / (L + 1)` for square lattices.
    pub perturbation_prediction: Option<f64>,
}

/// Brackets every grid interval with `F < threshold`, plus the two
/// intervals around any grid point whose ground level is exactly
/// degenerate, and merges touching brackets. With `refine_width`, each
/// bracket is bisected down to that width.
pub fn detect_crossings(
    trace: &FidelityTrace,
    threshold: f64,
    refine_width: Option<f64>,
) -> Result<CrossingReport> {
    if trace.is_empty() {
        return Err(Error::invalid("empty fidelity trace"));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    if let Some(w) = refine_width {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid(format!(
                "refinement width must be positive, got {w}"
            )));
        }
    }
    let n = trace.len();
    let point = |i: usize| trace.alphas[0] + i as f64 * trace.step;

    // Hits as index ranges [a, b] over grid points (b may equal n).
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        if trace.fidelities[i] < threshold {
            hits.push((i, i + 1));
        }
        if trace.degenerate[i] {
            hits.push((i.saturating_sub(1), i + 1));
        }
    }
    hits.sort_unstable();
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (a, b) in hits {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }

    let crossings = ordered_try_map(&merged, |&(a, b)| {
        let lo = point(a);
        let hi = point(b);
        let min_fidelity = trace.fidelities[a..b.min(n)]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let (refined_lo, refined_hi, refined) = match refine_width {
            Some(w) => refine(trace.lattice, trace.gauge, lo, hi, threshold, w)?,
            None => (lo, hi, false),
        };
        Ok(Crossing {
            lo,
            hi,
            refined_lo,
            refined_hi,
            alpha: 0.5 * (refined_lo + refined_hi),
            min_fidelity,
            refined,
        })
    })?;

    let side = trace.lattice.side();
    Ok(CrossingReport {
        rows: trace.lattice.rows(),
        cols: trace.lattice.cols(),
        gauge: trace.gauge,
        threshold,
        alpha0: crossings.first().map(|c| c.alpha),
        crossings,
        fit_prediction: side.map(|l| 2.0 / (l as f64 + 1.0)),
        perturbation_prediction: side.map(|l| 1.5 / (l as f64 + 1.0)),
    })
}

/// Bisects `[lo, hi]` for the first point whose ground state has
/// `|<Phi(lo)|Phi>| < threshold`. The reference stays at `lo` so that an
/// exactly degenerate midpoint, whose state mixes both branches, cannot
/// drag the bracket. Returns the input bracket unrefined when its ends are
/// not nearly orthogonal.
fn refine(
    lattice: LatticeSpec,
    gauge: Gauge,
    lo: f64,
    hi: f64,
    threshold: f64,
    width: f64,
) -> Result<(f64, f64, bool)> {
    let state = |a: f64| ground_state(&lattice, &GaugeConfig::new(a, gauge));
    let reference = state(lo)?;
    if overlap(&reference, &state(hi)?) >= threshold {
        return Ok((lo, hi, false));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > width {
        let m = 0.5 * (a + b);
        if overlap(&reference, &state(m)?) < threshold {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((a, b, true))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alpha0Fit {
    pub size: usize,
    pub alpha0: f64,
    pub prediction: f64,
    /// `|alpha0 - prediction| / prediction`.
    pub deviation: f64,
}

/// First crossing on `L x L` lattices compared with `2 / (L + 1)`.
pub fn fit_alpha0(sizes: &[usize], gauge: Gauge) -> Result<Vec<Alpha0Fit>> {
    sizes
        .iter()
        .map(|&size| {
            if size < 5 {
                return Err(Error::invalid(format!(
                    "the first-crossing law applies to L >= 5, got {size}"
                )));
            }
            let lattice = LatticeSpec::square(size)?;
            let (lo, hi) = FIT_WINDOW;
            let trace = fidelity_trace(&lattice, gauge, lo, hi, DEFAULT_FIDELITY_STEP)?;
            let report = detect_crossings(&trace, DEFAULT_THRESHOLD, Some(DEFAULT_REFINE_WIDTH))?;
            let alpha0 = report.alpha0.ok_or(Error::NoCrossing {
                size,
                alpha_min: lo,
                alpha_max: hi,
            })?;
            let prediction = 2.0 / (size as f64 + 1.0);
            Ok(Alpha0Fit {
                size,
                alpha0,
                prediction,
                deviation: (alpha0 - prediction).abs() / prediction,
            })
        })
        .collect()
}

/// Continuum estimate of the first crossing on an `L x L` lattice.
///
/// Zero-field levels are `E(p,q) = [(pi p/L)^2 + (pi q/L)^2] / 2m` with
/// `m = 1/(2J)`. A weak field in the Landau gauge shifts them at first order
/// by `(1/L^2)(1/2m) sum_{y=1}^{L} 2 (pi p/L)(-2 pi alpha y)`, and levels
/// `(1,1)` and `(2,1)` meet at `alpha_c = 1.5 / (L + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEstimate {
    pub size: usize,
    pub hopping: f64,
    pub alpha_c: f64,
}

impl PerturbationEstimate {
    pub fn mass(&self) -> f64 {
        1.0 / (2.0 * self.hopping)
    }

    pub fn zero_field_level(&self, p: usize, q: usize) -> f64 {
        let l = self.size as f64;
        let kp = PI * p as f64 / l;
        let kq = PI * q as f64 / l;
        (kp * kp + kq * kq) / (2.0 * self.mass())
    }

    /// Zero-field level plus its first-order shift.
    pub fn first_order_level(&self, p: usize, q: usize, alpha: f64) -> f64 {
        self.zero_field_level(p, q) + alpha * self.first_order_slope(p)
    }

    fn first_order_slope(&self, p: usize) -> f64 {
        let l = self.size as f64;
        let kp = PI * p as f64 / l;
        let ysum: f64 = (1..=self.size).map(|y| y as f64).sum();
        (1.0 / (l * l)) / (2.0 * self.mass()) * 2.0 * kp * (-2.0 * PI * ysum)
    }

    /// Where the first-order levels `(1,1)` and `(2,1)` meet.
    pub fn crossing_from_levels(&self) -> f64 {
        let de = self.zero_field_level(2, 1) - self.zero_field_level(1, 1);
        de / (self.first_order_slope(1) - self.first_order_slope(2))
    }
}

pub fn perturbation_estimate(size: usize, hopping: f64) -> Result<PerturbationEstimate> {
    if size < 2 {
        return Err(Error::invalid(format!("need L >= 2, got {size}")));
    }
    if !(hopping.is_finite() && hopping > 0.0) {
        return Err(Error::invalid(format!(
            "hopping must be positive, got {hopping}"
        )));
    }
    Ok(PerturbationEstimate {
        size,
        hopping,
        alpha_c: 1.5 / (size as f64 + 1.0),
    })
}
