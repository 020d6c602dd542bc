//! Numerical laboratory for finite Harper-Hofstadter lattices.
//!
//! A polariton hops on an `L_p x L_q` square lattice with open boundaries;
//! complex tunneling phases thread a uniform flux `alpha` (in flux quanta)
//! through each plaquette. The crate builds that Hamiltonian in symmetric
//! or Landau gauge, diagonalizes it exactly and analyses the result:
//!
//! - [`spectrum`]: butterfly spectra over an `alpha` grid, gauge checks.
//! - [`ground`]: ground states, fidelity traces, level crossings and the
//!   `2/(L+1)` first-crossing law.
//! - [`momentum`]: sine-transform momentum maps and peak finding.
//! - [`effective`]: microscopic spin-ensemble/resonator chains reduced to
//!   the hopping model by a Schur complement, plus the collective
//!   enhancement `J = N J'`.
//! - [`io`]: CSV/JSON encodings shared with the command-line tool.
//!
//! Sweeps over `alpha` run on the ambient rayon pool and are merged in grid
//! order, so results do not depend on the number of threads.

pub mod effective;
pub mod eigen;
pub mod error;
pub mod ground;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod momentum;
pub mod spectrum;

pub use eigen::{eigh, ground_pair, EigenDecomposition, GroundPair};
pub use error::{Error, Result};
pub use lattice::{build_hamiltonian, plaquette_fluxes, Gauge, GaugeConfig, LatticeSpec, Site};
pub use matrix::HermitianMatrix;

use rayon::prelude::*;

/// Maps `f` over `items` in parallel, keeping input order. On failure the
/// error from the earliest item is returned.
pub(crate) fn ordered_try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    let results: Vec<Result<U>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}
