//! Microscopic spin-ensemble/resonator chain and its reduction to the
//! hopping model.
//!
//! Each site carries `N` driven spins, treated collectively through Dicke
//! states `|k>` (`k` spins in the upper dressed level), and one resonator
//! mode `b` truncated at `photon_cutoff` photons. In the frame rotating with
//! the drive the chain Hamiltonian is
//!
//! ```text
//! H = Omega sum_i k_i + (delta - Omega) sum_i n_i
//!     - (g/2) sum_i (e^{i th_i} b_i^dag S_i^+ + h.c.)
//!     - T sum_i (b_{i+1}^dag b_i + h.c.)
//! ```
//!
//! which conserves `Q = sum k - sum n`. Creating a photon together with a
//! spin excitation costs `delta`, so for `delta >> g, T` the photons can be
//! eliminated and a single spin excitation hops with
//! `J = N T g^2 / (4 delta^2) e^{i(th_1 - th_2)}`.
//!
//! Basis states are enumerated lexicographically in
//! `(k_1, .., k_s, n_1, .., n_s)` with the last entry running fastest.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, GaugeConfig, LatticeSpec};
use crate::matrix::HermitianMatrix;

/// Largest basis accepted by [`build_micro_hamiltonian`].
pub const MAX_MICRO_DIM: usize = 1024;

const RESONANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullModelSpec {
    pub sites: usize,
    pub g: f64,
    pub t: f64,
    pub delta: f64,
    pub theta: Vec<f64>,
    /// Spins per site.
    pub spins: usize,
    pub photon_cutoff: usize,
    /// Rabi frequency of the drive; only shifts the conserved sectors.
    pub omega: f64,
}

impl FullModelSpec {
    /// Chain with zero drive phases, one spin per site, one photon per mode
    /// and `Omega = 10 delta`.
    pub fn chain(sites: usize, g: f64, t: f64, delta: f64) -> Self {
        Self {
            sites,
            g,
            t,
            delta,
            theta: vec![0.0; sites],
            spins: 1,
            photon_cutoff: 1,
            omega: 10.0 * delta,
        }
    }

    /// `g = 8`, `T = 4`, `delta = 40`, `Omega = 400`, in units of `2 pi MHz`.
    pub fn paper_preset() -> Self {
        Self {
            omega: 400.0,
            ..Self::chain(2, 8.0, 4.0, 40.0)
        }
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_spins(mut self, spins: usize) -> Self {
        self.spins = spins;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.sites) {
            return Err(Error::invalid(format!(
                "chain needs 1 to 3 sites, got {}",
                self.sites
            )));
        }
        if self.theta.len() != self.sites {
            return Err(Error::invalid(format!(
                "{} drive phases for {} sites",
                self.theta.len(),
                self.sites
            )));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("drive phases must be finite"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid(format!(
                "detuning must be positive, got {}",
                self.delta
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(format!(
                "Rabi frequency must be positive, got {}",
                self.omega
            )));
        }
        if !(self.g.is_finite() && self.t.is_finite()) {
            return Err(Error::invalid("coupling and tunneling must be finite"));
        }
        if self.photon_cutoff < 1 {
            return Err(Error::invalid("photon cutoff must be at least 1"));
        }
        if self.spins < 1 {
            return Err(Error::invalid("need at least one spin per site"));
        }
        Ok(())
    }

    /// Photon energy in the rotating frame.
    pub fn photon_energy(&self) -> f64 {
        self.delta - self.omega
    }

    pub fn g_over_delta(&self) -> f64 {
        self.g / self.delta
    }

    pub fn t_over_delta(&self) -> f64 {
        self.t / self.delta
    }
}

/// `N T g^2 / (4 delta^2) e^{i(th_1 - th_2)}`.
pub fn predicted_hopping(spec: &FullModelSpec) -> Complex64 {
    let j = spec.t * spec.g * spec.g / (4.0 * spec.delta * spec.delta);
    let dtheta =
        spec.theta.first().copied().unwrap_or(0.0) - spec.theta.get(1).copied().unwrap_or(0.0);
    Complex64::from_polar(spec.spins as f64 * j, dtheta)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MicroState {
    pub spins: Vec<usize>,
    pub photons: Vec<usize>,
}

impl MicroState {
    /// `Q = sum k - sum n`.
    pub fn excitation_number(&self) -> i64 {
        self.spins.iter().sum::<usize>() as i64 - self.photons.iter().sum::<usize>() as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroModel {
    pub states: Vec<MicroState>,
    pub hamiltonian: HermitianMatrix,
}

impl MicroModel {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

fn enumerate_states(spec: &FullModelSpec) -> Vec<MicroState> {
    let s = spec.sites;
    let mut radices = vec![spec.spins + 1; s];
    radices.resize(2 * s, spec.photon_cutoff + 1);
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; 2 * s];
    for _ in 0..total {
        out.push(MicroState {
            spins: digits[..s].to_vec(),
            photons: digits[s..].to_vec(),
        });
        for pos in (0..2 * s).rev() {
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    out
}

fn full_dim(spec: &FullModelSpec) -> usize {
    (spec.spins + 1)
        .saturating_pow(spec.sites as u32)
        .saturating_mul((spec.photon_cutoff + 1).saturating_pow(spec.sites as u32))
}

/// Hamiltonian on a basis closed under `H`; couplings leaving the basis are
/// dropped.
fn assemble(spec: &FullModelSpec, states: Vec<MicroState>) -> MicroModel {
    let lookup: HashMap<&MicroState, usize> =
        states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n_spins = spec.spins;
    let mut h = HermitianMatrix::zeros(states.len());
    for (src, st) in states.iter().enumerate() {
        let k_sum: usize = st.spins.iter().sum();
        let n_sum: usize = st.photons.iter().sum();
        let diag = spec.omega * k_sum as f64 + spec.photon_energy() * n_sum as f64;
        h.set_pair(src, src, Complex64::new(diag, 0.0));

        for i in 0..spec.sites {
            let (k, n) = (st.spins[i], st.photons[i]);
            if k < n_spins && n < spec.photon_cutoff {
                let mut to = st.clone();
                to.spins[i] += 1;
                to.photons[i] += 1;
                if let Some(&dst) = lookup.get(&to) {
                    let amp = -0.5
                        * spec.g
                        * (((k + 1) * (n_spins - k)) as f64).sqrt()
                        * ((n + 1) as f64).sqrt();
                    h.set_pair(dst, src, Complex64::from_polar(amp, spec.theta[i]));
                }
            }
            if i + 1 < spec.sites && n > 0 && st.photons[i + 1] < spec.photon_cutoff {
                let mut to = st.clone();
                to.photons[i] -= 1;
                to.photons[i + 1] += 1;
                if let Some(&dst) = lookup.get(&to) {
                    let amp = -spec.t * (n as f64).sqrt() * ((st.photons[i + 1] + 1) as f64).sqrt();
                    h.set_pair(dst, src, Complex64::new(amp, 0.0));
                }
            }
        }
    }
    MicroModel {
        states,
        hamiltonian: h,
    }
}

/// Full truncated Hilbert space.
pub fn build_micro_hamiltonian(spec: &FullModelSpec) -> Result<MicroModel> {
    spec.validate()?;
    let dim = full_dim(spec);
    if dim > MAX_MICRO_DIM {
        return Err(Error::invalid(format!(
            "micro model has {dim} states, limit is {MAX_MICRO_DIM}"
        )));
    }
    Ok(assemble(spec, enumerate_states(spec)))
}

/// Block with a fixed excitation number `Q`.
pub fn sector_hamiltonian(spec: &FullModelSpec, q: i64) -> Result<MicroModel> {
    spec.validate()?;
    let states: Vec<MicroState> = enumerate_states(spec)
        .into_iter()
        .filter(|s| s.excitation_number() == q)
        .collect();
    if states.is_empty() {
        return Err(Error::invalid(format!(
            "excitation sector Q = {q} is empty"
        )));
    }
    Ok(assemble(spec, states))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMethod {
    SchurComplement,
    SpectralProjection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorResult {
    pub method: ReductionMethod,
    pub j_effective: Complex64,
    pub j_predicted: Complex64,
    pub relative_error: f64,
    pub g_over_delta: f64,
    pub t_over_delta: f64,
    /// Effective Hamiltonian on the single-excitation, zero-photon states.
    pub h_eff: Vec<Vec<Complex64>>,
}

impl ValidatorResult {
    fn new(spec: &FullModelSpec, method: ReductionMethod, h_eff: Vec<Vec<Complex64>>) -> Self {
        // Adding zero turns a negative zero into +0.
        let j_effective = -h_eff[0][1] + Complex64::new(0.0, 0.0);
        let j_predicted = predicted_hopping(spec);
        Self {
            method,
            j_effective,
            j_predicted,
            relative_error: (j_effective - j_predicted).norm() / j_predicted.norm(),
            g_over_delta: spec.g_over_delta(),
            t_over_delta: spec.t_over_delta(),
            h_eff,
        }
    }
}

/// Splits the `Q = 1` sector into zero-photon states `S` (ordered by site)
/// and the rest.
fn partition(model: &MicroModel, sites: usize) -> (Vec<usize>, Vec<usize>) {
    let mut s_idx = vec![usize::MAX; sites];
    let mut p_idx = Vec::new();
    for (i, st) in model.states.iter().enumerate() {
        if st.photons.iter().all(|&n| n == 0) {
            let site = st.spins.iter().position(|&k| k == 1).unwrap_or(0);
            s_idx[site] = i;
        } else {
            p_idx.push(i);
        }
    }
    (s_idx, p_idx)
}

fn check_chain(spec: &FullModelSpec) -> Result<()> {
    spec.validate()?;
    if spec.sites < 2 {
        return Err(Error::invalid("hopping needs at least two sites"));
    }
    Ok(())
}

/// `H_eff = H_SS - H_SP (H_PP - E0)^{-1} H_PS` with `E0` the mean energy
/// of the zero-photon single-excitation states.
pub fn schur_effective_hamiltonian(spec: &FullModelSpec) -> Result<Vec<Vec<Complex64>>> {
    check_chain(spec)?;
    let model = sector_hamiltonian(spec, 1)?;
    let h = &model.hamiltonian;
    let (s_idx, p_idx) = partition(&model, spec.sites);
    let e0 = s_idx.iter().map(|&i| h.get(i, i).re).sum::<f64>() / s_idx.len() as f64;

    let dec = eigh(&h.submatrix(&p_idx))?;
    let scale = e0.abs().max(spec.delta).max(1.0);
    if dec
        .eigenvalues()
        .iter()
        .any(|&l| (l - e0).abs() <= RESONANCE_TOL * scale)
    {
        return Err(Error::Resonance);
    }
    // W[k][s] = <v_k| H_PS |s>.
    let w: Vec<Vec<Complex64>> = dec
        .vectors()
        .iter()
        .map(|v| {
            s_idx
                .iter()
                .map(|&s| {
                    p_idx
                        .iter()
                        .zip(v)
                        .map(|(&p, c)| c.conj() * h.get(p, s))
                        .sum()
                })
                .collect()
        })
        .collect();
    let ns = s_idx.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ns]; ns];
    for a in 0..ns {
        for b in 0..ns {
            let corr: Complex64 = dec
                .eigenvalues()
                .iter()
                .zip(&w)
                .map(|(&l, wk)| wk[a].conj() * wk[b] / (l - e0))
                .sum();
            out[a][b] = h.get(s_idx[a], s_idx[b]) - corr;
        }
    }
    Ok(out)
}

pub fn schur_effective_hopping(spec: &FullModelSpec) -> Result<ValidatorResult> {
    let h_eff = schur_effective_hamiltonian(spec)?;
    Ok(ValidatorResult::new(
        spec,
        ReductionMethod::SchurComplement,
        h_eff,
    ))
}

/// Hermitian effective Hamiltonian `O E O^dag` built from the lowest exact
/// eigenstates of the `Q = 1` sector projected on the zero-photon states,
/// with `O = B (B^dag B)^{-1/2}`.
pub fn spectral_effective_hamiltonian(spec: &FullModelSpec) -> Result<Vec<Vec<Complex64>>> {
    check_chain(spec)?;
    let model = sector_hamiltonian(spec, 1)?;
    let (s_idx, _) = partition(&model, spec.sites);
    let dec = eigh(&model.hamiltonian)?;
    let ns = s_idx.len();
    // B[a][k] = <s_a|psi_k>.
    let b: Vec<Vec<Complex64>> = s_idx
        .iter()
        .map(|&s| (0..ns).map(|k| dec.vector(k)[s]).collect())
        .collect();
    let mut gram = vec![Complex64::new(0.0, 0.0); ns * ns];
    for k in 0..ns {
        for l in 0..ns {
            gram[k * ns + l] = (0..ns).map(|a| b[a][k].conj() * b[a][l]).sum();
        }
    }
    let gram = eigh(&HermitianMatrix::from_rows(ns, gram)?)?;
    if gram.eigenvalues()[0] < 1e-8 {
        return Err(Error::invalid(
            "lowest states have no weight on the photon-free subspace",
        ));
    }
    // M^{-1/2}[k][l] = sum_r u_r[k] u_r[l]^* / sqrt(mu_r).
    let inv_sqrt = |k: usize, l: usize| -> Complex64 {
        gram.eigenvalues()
            .iter()
            .zip(gram.vectors())
            .map(|(&mu, u)| u[k] * u[l].conj() / mu.sqrt())
            .sum()
    };
    let o: Vec<Vec<Complex64>> = (0..ns)
        .map(|a| {
            (0..ns)
                .map(|l| (0..ns).map(|k| b[a][k] * inv_sqrt(k, l)).sum())
                .collect()
        })
        .collect();
    let energies = dec.eigenvalues();
    Ok((0..ns)
        .map(|a| {
            (0..ns)
                .map(|c| {
                    (0..ns)
                        .map(|k| o[a][k] * energies[k] * o[c][k].conj())
                        .sum()
                })
                .collect()
        })
        .collect())
}

pub fn spectral_effective_hopping(spec: &FullModelSpec) -> Result<ValidatorResult> {
    let h_eff = spectral_effective_hamiltonian(spec)?;
    Ok(ValidatorResult::new(
        spec,
        ReductionMethod::SpectralProjection,
        h_eff,
    ))
}

/// Eigenbasis of a driven two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedStates {
    /// Rows are `|->` and `|+>` written in the `(|g>, |e>)` basis.
    pub vectors: [[Complex64; 2]; 2],
    /// `[-Omega/2, +Omega/2]`.
    pub energies: [f64; 2],
}

impl DressedStates {
    /// Matrix taking `(|g>, |e>)` amplitudes to `(|->, |+>)` amplitudes.
    pub fn change_of_basis(&self) -> [[Complex64; 2]; 2] {
        let v = &self.vectors;
        [
            [v[0][0].conj(), v[0][1].conj()],
            [v[1][0].conj(), v[1][1].conj()],
        ]
    }
}

/// `|+-> = (|g> +- e^{i th}|e>)/sqrt 2`, eigenstates of
/// `(Omega/2)(e^{i th}|e><g| + h.c.)`.
pub fn dressed_states(omega: f64, theta: f64) -> Result<DressedStates> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!(
            "Rabi frequency must be positive, got {omega}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::invalid("drive phase must be finite"));
    }
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let e = Complex64::from_polar(FRAC_1_SQRT_2, theta);
    Ok(DressedStates {
        vectors: [[s, -e], [s, e]],
        energies: [-0.5 * omega, 0.5 * omega],
    })
}

/// Compares the collective-spin hopping model with `N` spins per site,
/// restricted to one excitation in the symmetric states, with the boson
/// model at `J = N J'`. Returns the larger of the entrywise mismatch and
/// the leakage of `H` out of the symmetric subspace.
pub fn hp_equivalence(
    spins: usize,
    lattice: &LatticeSpec,
    gauge: &GaugeConfig,
    j_prime: f64,
) -> Result<f64> {
    if spins == 0 {
        return Err(Error::invalid("need at least one spin per site"));
    }
    let unit = build_hamiltonian(&lattice.with_hopping(1.0)?, gauge)?;
    let boson = build_hamiltonian(&lattice.with_hopping(spins as f64 * j_prime)?, gauge)?;
    let sites = lattice.dim();
    let n = spins;

    // Individual spins: <a,i|H|b,j> = J' h_ab, from S_a^+ S_b^- with S^+- = sum_i sigma_i^+-.
    let dim = sites * n;
    let mut spin_h = vec![Complex64::new(0.0, 0.0); dim * dim];
    for a in 0..sites {
        for b in 0..sites {
            let v = unit.get(a, b) * j_prime;
            for i in 0..n {
                for j in 0..n {
                    spin_h[(a * n + i) * dim + b * n + j] = v;
                }
            }
        }
    }
    let bright = |a: usize| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..n {
            v[a * n + i] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        }
        v
    };
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        (0..dim)
            .map(|r| (0..dim).map(|c| spin_h[r * dim + c] * v[c]).sum())
            .collect()
    };

    let mut worst: f64 = 0.0;
    let brights: Vec<Vec<Complex64>> = (0..sites).map(bright).collect();
    for b in 0..sites {
        let hb = apply(&brights[b]);
        let mut residual = hb.clone();
        for a in 0..sites {
            let elem: Complex64 = brights[a].iter().zip(&hb).map(|(x, y)| x.conj() * y).sum();
            worst = worst.max((elem - boson.get(a, b)).norm());
            for (r, x) in residual.iter_mut().zip(&brights[a]) {
                *r -= elem * x;
            }
        }
        worst = worst.max(residual.iter().fold(0.0, |m, z| m.max(z.norm())));
    }
    Ok(worst)
}
