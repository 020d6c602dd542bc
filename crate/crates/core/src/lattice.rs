//! Square-lattice geometry, gauge choices and the single-polariton hopping
//! Hamiltonian.
//!
//! Sites are labelled `(p, q)` with `1 <= p <= rows` and `1 <= q <= cols`.
//! Storage is row-major and 0-based: `i = (p - 1) * cols + (q - 1)`.
//!
//! The hopping Hamiltonian with open boundaries is
//!
//! ```text
//! H = -J sum_{p,q} [ e^{i(th(p,q) - th(p+1,q))} |p,q><p+1,q|
//!                  + e^{i(th(p,q+1) - th(p,q))} |p,q><p,q+1| + h.c. ]
//! ```
//!
//! where the symmetric gauge uses `th(p,q) = -pi p q alpha`. Both gauges
//! thread a flux of `+2 pi alpha` through every plaquette, taken around the
//! loop `(p,q) -> (p,q+1) -> (p+1,q+1) -> (p+1,q) -> (p,q)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// Lattice dimensions and hopping energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    rows: usize,
    cols: usize,
    hopping: f64,
}

impl LatticeSpec {
    pub fn new(rows: usize, cols: usize, hopping: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "lattice must have at least one site, got {rows}x{cols}"
            )));
        }
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(Error::invalid(format!(
                "hopping must be positive and finite, got {hopping}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            hopping,
        })
    }

    /// `L x L` lattice with `J = 1`.
    pub fn square(size: usize) -> Result<Self> {
        Self::new(size, size, 1.0)
    }

    pub fn with_hopping(self, hopping: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, hopping)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    /// Hilbert-space dimension of the single-polariton sector.
    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    /// Side length when the lattice is square.
    pub fn side(&self) -> Option<usize> {
        (self.rows == self.cols).then_some(self.rows)
    }

    /// Maps a 1-based site label to its storage index.
    pub fn index(&self, p: usize, q: usize) -> Result<usize> {
        Ok(self.site(p, q)?.index(self))
    }

    pub fn site(&self, p: usize, q: usize) -> Result<Site> {
        if p == 0 || q == 0 || p > self.rows || q > self.cols {
            return Err(Error::SiteOutOfRange {
                p,
                q,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(Site { p, q })
    }

    /// Inverse of [`LatticeSpec::index`].
    pub fn site_at(&self, index: usize) -> Result<Site> {
        if index >= self.dim() {
            return Err(Error::invalid(format!(
                "index {index} outside lattice of {} sites",
                self.dim()
            )));
        }
        Ok(Site {
            p: index / self.cols + 1,
            q: index % self.cols + 1,
        })
    }

    /// All sites in storage order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (1..=self.rows).flat_map(move |p| (1..=self.cols).map(move |q| Site { p, q }))
    }

    /// Number of nearest-neighbour links with open boundaries.
    pub fn link_count(&self) -> usize {
        self.rows * (self.cols - 1) + self.cols * (self.rows - 1)
    }
}

/// A lattice site with 1-based coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub p: usize,
    pub q: usize,
}

impl Site {
    pub fn index(&self, spec: &LatticeSpec) -> usize {
        (self.p - 1) * spec.cols + (self.q - 1)
    }
}

/// Checked `(p, q) -> i -> (p, q)` round trip.
pub fn site_index_roundtrip(p: usize, q: usize, spec: &LatticeSpec) -> Result<(usize, Site)> {
    let i = spec.index(p, q)?;
    let back = spec.site_at(i)?;
    debug_assert_eq!((back.p, back.q), (p, q));
    Ok((i, back))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// `th(p,q) = -pi p q alpha`.
    Symmetric,
    /// Peierls phase `2 pi alpha q` on hops along `p`; hops along `q` are real.
    Landau,
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gauge::Symmetric => "symmetric",
            Gauge::Landau => "landau",
        })
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(Gauge::Symmetric),
            "landau" => Ok(Gauge::Landau),
            other => Err(Error::invalid(format!("unknown gauge '{other}'"))),
        }
    }
}

/// Flux per plaquette in units of the flux quantum, plus a gauge choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub alpha: f64,
    pub gauge: Gauge,
}

impl GaugeConfig {
    pub fn new(alpha: f64, gauge: Gauge) -> Self {
        Self { alpha, gauge }
    }

    pub fn symmetric(alpha: f64) -> Self {
        Self::new(alpha, Gauge::Symmetric)
    }

    pub fn landau(alpha: f64) -> Self {
        Self::new(alpha, Gauge::Landau)
    }

    /// Symmetric-gauge phase `th(p,q)`.
    pub fn theta(&self, p: usize, q: usize) -> f64 {
        -PI * (p as f64) * (q as f64) * self.alpha
    }

    /// Phase of `<p,q|H|p+1,q>` relative to `-J`.
    pub fn row_hop_phase(&self, p: usize, q: usize) -> f64 {
        match self.gauge {
            Gauge::Symmetric => self.theta(p, q) - self.theta(p + 1, q),
            // The hop (p,q) -> (p+1,q), i.e. <p+1,q|H|p,q>, carries e^{-i 2 pi alpha q}.
            Gauge::Landau => 2.0 * PI * self.alpha * q as f64,
        }
    }

    /// Phase of `<p,q|H|p,q+1>` relative to `-J`.
    pub fn col_hop_phase(&self, p: usize, q: usize) -> f64 {
        match self.gauge {
            Gauge::Symmetric => self.theta(p, q + 1) - self.theta(p, q),
            Gauge::Landau => 0.0,
        }
    }
}

/// Single-polariton Hamiltonian with open boundary conditions.
pub fn build_hamiltonian(spec: &LatticeSpec, gauge: &GaugeConfig) -> Result<HermitianMatrix> {
    if spec.dim() == 0 {
        return Err(Error::invalid("empty lattice"));
    }
    if !gauge.alpha.is_finite() {
        return Err(Error::invalid(format!(
            "alpha must be finite, got {}",
            gauge.alpha
        )));
    }
    let j = spec.hopping;
    let mut h = HermitianMatrix::zeros(spec.dim());
    for site in spec.sites() {
        let (p, q) = (site.p, site.q);
        let i = site.index(spec);
        if p < spec.rows {
            let k = Site { p: p + 1, q }.index(spec);
            h.set_pair(i, k, Complex64::from_polar(-j, gauge.row_hop_phase(p, q)));
        }
        if q < spec.cols {
            let k = Site { p, q: q + 1 }.index(spec);
            h.set_pair(i, k, Complex64::from_polar(-j, gauge.col_hop_phase(p, q)));
        }
    }
    Ok(h)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Loop phase of every plaquette, row-major over `(p, q)` with
/// `1 <= p < rows`, `1 <= q < cols`, wrapped into `(-pi, pi]`.
pub fn plaquette_fluxes(h: &HermitianMatrix, spec: &LatticeSpec) -> Result<Vec<f64>> {
    if h.dim() != spec.dim() {
        return Err(Error::invalid(format!(
            "matrix dimension {} does not match lattice with {} sites",
            h.dim(),
            spec.dim()
        )));
    }
    let link = |a: usize, b: usize| -> Result<Complex64> {
        let z = h.get(a, b);
        if z.norm() == 0.0 {
            Err(Error::MissingLink { from: a, to: b })
        } else {
            Ok(z)
        }
    };
    let mut out = Vec::with_capacity((spec.rows - 1) * (spec.cols.saturating_sub(1)));
    for p in 1..spec.rows {
        for q in 1..spec.cols {
            let s1 = Site { p, q }.index(spec);
            let s2 = Site { p, q: q + 1 }.index(spec);
            let s3 = Site { p: p + 1, q: q + 1 }.index(spec);
            let s4 = Site { p: p + 1, q }.index(spec);
            let prod = link(s1, s2)? * link(s2, s3)? * link(s3, s4)? * link(s4, s1)?;
            out.push(wrap_phase(prod.arg()));
        }
    }
    Ok(out)
}
