//! Hofstadter butterfly sweeps and gauge-invariance checks.

use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, Gauge, GaugeConfig, LatticeSpec};
use crate::ordered_try_map;

/// Default number of grid points on `[0, 1]`.
pub const DEFAULT_STEPS: usize = 201;

/// All eigenvalues (units of `J`) at every point of an ascending `alpha`
/// grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButterflySpectrum {
    pub lattice: LatticeSpec,
    pub gauge: Gauge,
    pub alphas: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

impl ButterflySpectrum {
    /// Largest `|E| / J` over the whole scan.
    pub fn max_abs_energy(&self) -> f64 {
        let j = self.lattice.hopping();
        self.energies
            .iter()
            .flatten()
            .fold(0.0, |m, e| m.max(e.abs() / j))
    }
}

/// Uniform grid of `steps` points including both endpoints.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 grid points, got {steps}"
        )));
    }
    if !(min.is_finite() && max.is_finite()) || min >= max {
        return Err(Error::invalid(format!("invalid range [{min}, {max}]")));
    }
    let width = max - min;
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                max
            } else {
                min + width * (i as f64 / last)
            }
        })
        .collect())
}

/// Sorted eigenvalues of the lattice Hamiltonian at one flux value.
pub fn spectrum_at(lattice: &LatticeSpec, gauge: &GaugeConfig) -> Result<Vec<f64>> {
    let h = build_hamiltonian(lattice, gauge)?;
    let dec = eigh(&h).map_err(|e| e.at_alpha(gauge.alpha))?;
    Ok(dec.into_parts().0)
}

pub fn butterfly_scan(
    lattice: &LatticeSpec,
    gauge: Gauge,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
) -> Result<ButterflySpectrum> {
    let alphas = uniform_grid(alpha_min, alpha_max, steps)?;
    let energies = ordered_try_map(&alphas, |&a| {
        spectrum_at(lattice, &GaugeConfig::new(a, gauge))
    })?;
    Ok(ButterflySpectrum {
        lattice: *lattice,
        gauge,
        alphas,
        energies,
    })
}

/// `max_k |E_k(symmetric) - E_k(landau)|` at one flux value.
pub fn gauge_invariance_check(lattice: &LatticeSpec, alpha: f64) -> Result<f64> {
    let sym = spectrum_at(lattice, &GaugeConfig::symmetric(alpha))?;
    let lan = spectrum_at(lattice, &GaugeConfig::landau(alpha))?;
    Ok(max_abs_diff(&sym, &lan))
}

/// Largest elementwise difference of two equally long sorted spectra.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra must have equal length");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Discrepancy between `E` and `-reverse(E)` for a sorted spectrum.
pub fn particle_hole_defect(sorted: &[f64]) -> f64 {
    sorted
        .iter()
        .zip(sorted.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_includes_endpoints() {
        let g = uniform_grid(0.0, 1.0, 201).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 1.0);
        assert!((g[100] - 0.5).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(uniform_grid(0.0, 1.0, 1).is_err());
        assert!(uniform_grid(1.0, 0.0, 5).is_err());
        assert!(uniform_grid(0.0, f64::NAN, 5).is_err());
    }

    #[test]
    fn zero_field_column_matches_closed_form() {
        let spec = LatticeSpec::square(5).unwrap();
        let bf = butterfly_scan(&spec, Gauge::Symmetric, 0.0, 1.0, 11).unwrap();
        let mut closed: Vec<f64> = (1..=5)
            .flat_map(|m| (1..=5).map(move |n| (m, n)))
            .map(|(m, n)| -2.0 * ((m as f64 * PI / 6.0).cos() + (n as f64 * PI / 6.0).cos()))
            .collect();
        closed.sort_by(f64::total_cmp);
        assert!(max_abs_diff(&bf.energies[0], &closed) < 1e-12);
        assert!(bf.max_abs_energy() <= 4.0);
    }

    #[test]
    fn gauge_check_zero_field_is_exact() {
        let spec = LatticeSpec::square(4).unwrap();
        assert_eq!(gauge_invariance_check(&spec, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gauge_check_at_third_and_near_crossing() {
        let d5 = gauge_invariance_check(&LatticeSpec::square(5).unwrap(), 1.0 / 3.0).unwrap();
        assert!(d5 <= 1e-9, "{d5}");
        let d10 = gauge_invariance_check(&LatticeSpec::square(10).unwrap(), 0.181).unwrap();
        assert!(d10 <= 1e-9, "{d10}");
    }

    #[test]
    fn flux_reversal_and_particle_hole() {
        let spec = LatticeSpec::new(4, 3, 1.0).unwrap();
        for &a in &[0.1, 0.23, 0.4] {
            let e = spectrum_at(&spec, &GaugeConfig::symmetric(a)).unwrap();
            let mirror = spectrum_at(&spec, &GaugeConfig::symmetric(1.0 - a)).unwrap();
            let shifted = spectrum_at(&spec, &GaugeConfig::symmetric(a + 1.0)).unwrap();
            assert!(max_abs_diff(&e, &mirror) < 1e-9);
            assert!(max_abs_diff(&e, &shifted) < 1e-9);
            assert!(particle_hole_defect(&e) < 1e-9);
        }
    }
}
