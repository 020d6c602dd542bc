//! Full eigendecomposition of dense complex Hermitian matrices.
//!
//! `H = A + iB` is embedded into the real symmetric matrix
//! `[[A, -B], [B, A]]` of twice the size. Every eigenvalue of `H` appears
//! there exactly twice, and an eigenvector `(x, y)` of the embedding gives
//! the complex eigenvector `x + iy` of `H`. The real problem is solved with
//! Householder tridiagonalization followed by implicit QL.
//!
//! Output eigenvalues are ascending. Each eigenvector is unit-norm with its
//! largest-modulus component real and positive; when several components tie
//! (relative tolerance [`PHASE_TIE_TOL`]) the lowest index wins.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{inner, HermitianMatrix, HERMITIAN_TOL};

/// QL iterations allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 100;

/// Relative gap below which the ground level is flagged degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative modulus tolerance used to detect ties in the phase convention.
pub const PHASE_TIE_TOL: f64 = 1e-9;

/// Width (relative to the spectral scale) of an eigenvalue cluster whose
/// vectors are re-orthonormalized together.
const CLUSTER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector paired with `eigenvalues()[k]`.
    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.eigenvectors[k]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.eigenvectors
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        (self.eigenvalues, self.eigenvectors)
    }
}

/// Lowest eigenpair and the gap to the next level.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundPair {
    pub energy: f64,
    pub vector: Vec<Complex64>,
    pub gap: f64,
    pub degenerate: bool,
}

pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::invalid("cannot diagonalize an empty matrix"));
    }
    if h.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }

    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so the real problem is exactly symmetric.
            let z = 0.5 * (h.get(i, j) + h.get(j, i).conj());
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let (w, rows) = symmetric_eigen(m, a)?;
    collapse_pairs(n, &w, &rows)
}

/// Ground state, gap and degeneracy flag. Needs at least two levels.
pub fn ground_pair(dec: &EigenDecomposition) -> Result<GroundPair> {
    if dec.dim() < 2 {
        return Err(Error::invalid("ground_pair needs at least two levels"));
    }
    let e0 = dec.eigenvalues[0];
    let gap = dec.eigenvalues[1] - e0;
    Ok(GroundPair {
        energy: e0,
        vector: dec.eigenvectors[0].clone(),
        gap,
        degenerate: gap < DEGENERACY_TOL * e0.abs().max(1.0),
    })
}

/// Rotates `v` so its largest-modulus component is real and positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let cutoff = max * (1.0 - PHASE_TIE_TOL);
    let k = v.iter().position(|z| z.norm() >= cutoff).unwrap_or(0);
    let pivot = v[k];
    let rot = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[k] = Complex64::new(v[k].norm(), 0.0);
}

fn collapse_pairs(n: usize, w: &[f64], rows: &[Vec<f64>]) -> Result<EigenDecomposition> {
    let m = 2 * n;
    let scale = w.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    let tol = CLUSTER_TOL * scale;

    let to_complex =
        |u: &[f64]| -> Vec<Complex64> { (0..n).map(|i| Complex64::new(u[i], u[i + n])).collect() };

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && (w[end] - w[end - 1] <= tol || (end - start) % 2 == 1) {
            end += 1;
        }
        let size = end - start;
        if size % 2 == 1 {
            return Err(Error::invalid(
                "real embedding produced an unpaired eigenvalue",
            ));
        }
        let want = size / 2;
        for k in 0..want {
            eigenvalues.push(0.5 * (w[start + 2 * k] + w[start + 2 * k + 1]));
        }
        if want == 1 {
            let mut v = to_complex(&rows[start]);
            normalize(&mut v);
            eigenvectors.push(v);
        } else {
            let candidates: Vec<_> = rows[start..end].iter().map(|u| to_complex(u)).collect();
            eigenvectors.extend(pivoted_gram_schmidt(candidates, want));
        }
        start = end;
    }
    for v in eigenvectors.iter_mut() {
        fix_phase(v);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Picks `want` orthonormal vectors spanning the candidates, taking the
/// largest remaining residual at each step.
fn pivoted_gram_schmidt(mut cands: Vec<Vec<Complex64>>, want: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(want);
    let mut used = vec![false; cands.len()];
    for _ in 0..want {
        let mut best = None;
        let mut best_norm = -1.0;
        for (k, c) in cands.iter().enumerate() {
            if used[k] {
                continue;
            }
            let nrm = crate::matrix::norm(c);
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(k);
            }
        }
        let k = best.expect("cluster holds twice as many candidates as needed");
        used[k] = true;
        let mut q = cands[k].clone();
        normalize(&mut q);
        for (j, c) in cands.iter_mut().enumerate() {
            if used[j] {
                continue;
            }
            let proj = inner(&q, c);
            for (ci, qi) in c.iter_mut().zip(&q) {
                *ci -= proj * qi;
            }
        }
        basis.push(q);
    }
    basis
}

fn normalize(v: &mut [Complex64]) {
    let nrm = crate::matrix::norm(v);
    if nrm > 0.0 {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
}

/// Eigenvalues (ascending) and eigenvectors (as rows) of a real symmetric
/// `n x n` matrix given row-major.
pub fn symmetric_eigen(n: usize, a: Vec<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    assert_eq!(a.len(), n * n);
    let mut v = a;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    // Rows of the transpose are the eigenvectors; QL rotations then touch
    // contiguous memory.
    let mut vt: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    tql2(n, &mut vt, &mut d, &mut e)?;
    Ok((d, vt))
}

/// Householder reduction to tridiagonal form, accumulating the transform in
/// `v` (row-major). Afterwards `d` holds the diagonal and `e[1..]` the
/// subdiagonal.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal matrix; eigenvectors are the rows of `vt`.
fn tql2(n: usize, vt: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = vt.split_at_mut(i + 1);
                    let row_i = &mut lo[i];
                    let row_i1 = &mut hi[0];
                    for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort keeps equal eigenvalues in their QL order.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            vt.swap(i, k);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, GaugeConfig, LatticeSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(h: &HermitianMatrix, lambda: f64, v: &[Complex64]) -> f64 {
        let hv = h.mul_vec(v);
        hv.iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn one_by_one() {
        let h = HermitianMatrix::from_real_rows(1, &[2.0]).unwrap();
        let dec = eigh(&h).unwrap();
        assert_eq!(dec.eigenvalues(), &[2.0]);
        assert_eq!(dec.vector(0), &[c(1.0, 0.0)]);
    }

    #[test]
    fn pauli_y_spectrum() {
        let h = HermitianMatrix::from_rows(2, vec![c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)])
            .unwrap();
        let dec = eigh(&h).unwrap();
        assert!((dec.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            assert!(residual(&h, dec.eigenvalues()[k], dec.vector(k)) < 1e-14);
        }
    }

    #[test]
    fn two_by_two_lattice_spectrum() {
        let spec = LatticeSpec::square(2).unwrap();
        let h = build_hamiltonian(&spec, &GaugeConfig::symmetric(0.0)).unwrap();
        let dec = eigh(&h).unwrap();
        for (got, want) in dec.eigenvalues().iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        let g = ground_pair(&dec).unwrap();
        assert!((g.energy + 2.0).abs() < 1e-13);
        assert!((g.gap - 2.0).abs() < 1e-13);
        assert!(!g.degenerate);
        // The degenerate zero level still gets two orthonormal eigenvectors.
        let ov = inner(dec.vector(1), dec.vector(2));
        assert!(ov.norm() < 1e-12);
        for k in 1..3 {
            assert!(residual(&h, dec.eigenvalues()[k], dec.vector(k)) < 1e-12);
        }
    }

    #[test]
    fn three_site_chain_gap_matches_closed_form() {
        // Open chain: E_m = -2J cos(m pi / 4), m = 1..3.
        let spec = LatticeSpec::new(1, 3, 1.0).unwrap();
        let h = build_hamiltonian(&spec, &GaugeConfig::symmetric(0.37)).unwrap();
        let dec = eigh(&h).unwrap();
        let closed: Vec<f64> = (1..=3)
            .map(|m| -2.0 * (m as f64 * PI / 4.0).cos())
            .collect();
        for (a, b) in dec.eigenvalues().iter().zip(&closed) {
            assert!((a - b).abs() < 1e-13);
        }
        let g = ground_pair(&dec).unwrap();
        assert!((g.gap - (closed[1] - closed[0])).abs() < 1e-13);
        assert!((g.gap - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn ground_pair_needs_two_levels() {
        let h = HermitianMatrix::from_real_rows(1, &[0.5]).unwrap();
        assert!(ground_pair(&eigh(&h).unwrap()).is_err());
    }

    #[test]
    fn degenerate_ground_is_flagged() {
        let h = HermitianMatrix::from_real_rows(3, &[1., 0., 0., 0., 1., 0., 0., 0., 3.]).unwrap();
        let g = ground_pair(&eigh(&h).unwrap()).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.gap, 0.0);
    }

    #[test]
    fn phase_convention_largest_component_positive() {
        let h =
            HermitianMatrix::from_rows(2, vec![c(1., 0.), c(0.3, 0.4), c(0.3, -0.4), c(-1., 0.)])
                .unwrap();
        let dec = eigh(&h).unwrap();
        for v in dec.vectors() {
            let k = (0..2)
                .max_by(|&a, &b| v[a].norm().partial_cmp(&v[b].norm()).unwrap())
                .unwrap();
            assert_eq!(v[k].im, 0.0);
            assert!(v[k].re > 0.0);
        }
    }

    #[test]
    fn phase_ties_pick_lowest_index() {
        let mut v = vec![c(0.0, 0.5), c(-0.5, 0.0), c(0.1, 0.0)];
        fix_phase(&mut v);
        assert_eq!(v[0], c(0.5, 0.0));
        assert!((v[1] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let mut h = HermitianMatrix::zeros(2);
        h.set_pair(0, 1, c(f64::NAN, 0.0));
        assert!(eigh(&h).is_err());
    }

    #[test]
    fn identity_cluster_is_orthonormal() {
        let n = 6;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        let dec = eigh(&HermitianMatrix::from_real_rows(n, &data).unwrap()).unwrap();
        for j in 0..n {
            for k in 0..n {
                let ov = inner(dec.vector(j), dec.vector(k));
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((ov - want).norm() < 1e-12);
            }
        }
    }

    fn hermitian_strategy(max_n: usize) -> impl Strategy<Value = HermitianMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |raw| {
                let mut h = HermitianMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        let re = raw[2 * (i * n + j)];
                        let im = if i == j {
                            0.0
                        } else {
                            raw[2 * (i * n + j) + 1]
                        };
                        h.set_pair(i, j, c(re, im));
                    }
                }
                h
            })
        })
    }

    /// Eigenvalues below `sigma`, from the signs of the pivots of an
    /// `LDL^dag` elimination of `H - sigma` (Sylvester's law of inertia).
    fn count_below(h: &HermitianMatrix, sigma: f64) -> usize {
        let n = h.dim();
        let mut a: Vec<Complex64> = h.as_slice().to_vec();
        for i in 0..n {
            a[i * n + i] -= sigma;
        }
        let mut negative = 0;
        for k in 0..n {
            let mut d = a[k * n + k].re;
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                negative += 1;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / d;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        negative
    }

    fn bisect_eigenvalue(h: &HermitianMatrix, k: usize) -> f64 {
        let r = h.frobenius_norm() + 1.0;
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(h, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    proptest! {
        #[test]
        fn matches_inertia_bisection(h in hermitian_strategy(8)) {
            let dec = eigh(&h).unwrap();
            for k in 0..h.dim() {
                let oracle = bisect_eigenvalue(&h, k);
                prop_assert!((dec.eigenvalues()[k] - oracle).abs() <= 1e-8, "k = {}: {} vs {}", k, dec.eigenvalues()[k], oracle);
            }
        }

        #[test]
        fn residual_orthonormality_trace(h in hermitian_strategy(10)) {
            let dec = eigh(&h).unwrap();
            let n = h.dim();
            let w = dec.eigenvalues();
            for k in 1..n {
                prop_assert!(w[k] >= w[k - 1]);
            }
            for k in 0..n {
                prop_assert!(residual(&h, w[k], dec.vector(k)) <= 1e-10 * (1.0 + w[k].abs()));
                for j in 0..n {
                    let ov = inner(dec.vector(j), dec.vector(k));
                    let want = if j == k { 1.0 } else { 0.0 };
                    prop_assert!((ov - want).norm() <= 1e-10);
                }
            }
            prop_assert!((w.iter().sum::<f64>() - h.trace()).abs() <= 1e-9 * n as f64);
        }

        #[test]
        fn deterministic(h in hermitian_strategy(8)) {
            let a = eigh(&h).unwrap();
            let b = eigh(&h).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
