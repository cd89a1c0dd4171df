use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{LatticeSpec, Sector};
use crate::error::{Error, Result};

/// Open tight-binding chain with hopping `bond/2` between neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    bonds: Vec<f64>,
}

impl Chain {
    /// `bonds[k]` couples sites `k` and `k+1` (0-based).
    pub fn new(bonds: Vec<f64>) -> Result<Self> {
        if bonds.is_empty() {
            return Err(Error::invalid("Chain", "need at least two sites"));
        }
        if bonds.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("Chain", "non-finite bond"));
        }
        Ok(Self { bonds })
    }

    /// Uniform hopping `j` with the two end bonds set to `j0_left`, `j0_right`.
    pub fn with_end_bonds(n: usize, j: f64, j0_left: f64, j0_right: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("Chain", format!("n = {n} < 2")));
        }
        let mut bonds = vec![j; n - 1];
        bonds[0] = j0_left;
        *bonds.last_mut().unwrap() = j0_right;
        Self::new(bonds)
    }

    pub fn sites(&self) -> usize {
        self.bonds.len() + 1
    }

    pub fn bonds(&self) -> &[f64] {
        &self.bonds
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.sites();
        let mut h = DMatrix::zeros(n, n);
        for (k, b) in self.bonds.iter().enumerate() {
            h[(k, k + 1)] = 0.5 * b;
            h[(k + 1, k)] = 0.5 * b;
        }
        h
    }
}

/// Real symmetric matrix in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseHamiltonian {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseHamiltonian {
    fn from_rows(rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.cols[lo..hi].binary_search(&c) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    /// `out = scale·(H − shift)·x`.
    pub fn apply_shifted(&self, x: &[Complex64], shift: f64, scale: f64, out: &mut [Complex64]) {
        for r in 0..self.dim {
            let mut acc = -shift * x[r];
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            out[r] = acc * scale;
        }
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        self.apply_shifted(x, 0.0, 1.0, out);
    }

    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut hx = vec![Complex64::default(); self.dim];
        self.apply(x, &mut hx);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut diag = 0.0;
            let mut radius = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    diag = v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(diag - radius);
            hi = hi.max(diag + radius);
        }
        (lo, hi)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, v)| self.get(c, r) == v))
    }
}

/// Index of the symmetrized pair `(i, j)`, `i <= j`, in row-major upper
/// triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // pairs with a smaller first index: Σ_{a<i} (n − a)
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

pub fn pair_basis(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            v.push((i, j));
        }
    }
    v
}

pub fn sector_dim(n: usize, sector: Sector) -> usize {
    match sector {
        Sector::Distinguishable => n * n,
        Sector::SymmetricIdentical => n * (n + 1) / 2,
    }
}

/// Two-particle Hamiltonian of `spec` in the requested sector.
pub fn build_hamiltonian(spec: &LatticeSpec, sector: Sector) -> Result<SparseHamiltonian> {
    spec.validate()?;
    let chain = spec.chain()?;
    let n = spec.n;
    let hop = |a: usize, b: usize| -> f64 {
        if a + 1 == b {
            0.5 * chain.bonds()[a]
        } else if b + 1 == a {
            0.5 * chain.bonds()[b]
        } else {
            0.0
        }
    };
    let neighbours = |s: usize| {
        let mut v = Vec::with_capacity(2);
        if s > 0 {
            v.push(s - 1);
        }
        if s + 1 < n {
            v.push(s + 1);
        }
        v
    };
    match sector {
        Sector::Distinguishable => {
            let mut rows = vec![BTreeMap::new(); n * n];
            for i in 0..n {
                for j in 0..n {
                    let r = i * n + j;
                    if i == j && spec.u_updown != 0.0 {
                        rows[r].insert(r, spec.u_updown);
                    }
                    for k in neighbours(i) {
                        *rows[r].entry(k * n + j).or_insert(0.0) += hop(k, i);
                    }
                    for k in neighbours(j) {
                        *rows[r].entry(i * n + k).or_insert(0.0) += hop(k, j);
                    }
                }
            }
            Ok(SparseHamiltonian::from_rows(rows))
        }
        Sector::SymmetricIdentical => {
            // First-quantized expansion: |S(i,j)⟩ = (|ij⟩ + |ji⟩)/n_ij with
            // n_ij = √(2(1+δ_ij)), and ⟨S(k,l)|k,l⟩ = (1+δ_kl)/n_kl.
            let norm = |i: usize, j: usize| if i == j { 2.0 } else { std::f64::consts::SQRT_2 };
            let basis = pair_basis(n);
            let mut rows = vec![BTreeMap::new(); basis.len()];
            for (col, &(i, j)) in basis.iter().enumerate() {
                let w_in = 1.0 / norm(i, j);
                for &(x, y) in &[(i, j), (j, i)] {
                    // h acting on the first and on the second coordinate
                    let mut images = Vec::with_capacity(4);
                    for k in neighbours(x) {
                        images.push((k, y, hop(k, x)));
                    }
                    for k in neighbours(y) {
                        images.push((x, k, hop(k, y)));
                    }
                    for (k, l, h) in images {
                        let proj = if k == l { 2.0 } else { 1.0 } / norm(k, l);
                        let row = pair_index(n, k, l);
                        *rows[row].entry(col).or_insert(0.0) += w_in * h * proj;
                    }
                }
            }
            // the two triangles accumulate rounding differently; mirror the upper one
            for r in 0..rows.len() {
                let lower: Vec<usize> = rows[r].keys().copied().filter(|&c| c < r).collect();
                for c in lower {
                    let v = rows[c][&r];
                    rows[r].insert(c, v);
                }
            }
            Ok(SparseHamiltonian::from_rows(rows))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    #[test]
    fn pair_index_matches_enumeration() {
        for n in [1, 2, 3, 7] {
            for (k, &(i, j)) in pair_basis(n).iter().enumerate() {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
            }
        }
    }

    #[test]
    fn n3_distinguishable_entries() {
        let spec = LatticeSpec::new(3, 1.0, 0.6, 0.8).unwrap();
        let h = build_hamiltonian(&spec, Sector::Distinguishable).unwrap();
        assert_eq!(h.dim(), 9);
        // (A at 1, B at 1) ↔ (A at 2, B at 1): index 0 ↔ 3
        assert_eq!(h.get(0, 3), 0.3);
        assert_eq!(h.get(3, 0), 0.3);
        assert_eq!(h.get(0, 0), 0.8);
        assert_eq!(h.get(1, 1), 0.0);
        assert!(h.is_symmetric());
    }

    #[test]
    fn two_site_block_eigenvalues() {
        let h = Chain::new(vec![1.4]).unwrap().hamiltonian();
        let e = SymmetricEigen::new(h).eigenvalues;
        let mut e: Vec<f64> = e.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 0.7).abs() < 1e-15 && (e[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn symmetric_sector_spectrum_matches_first_quantized() {
        // free bosons: spectrum = {e_a + e_b, a <= b}
        let spec = LatticeSpec::new(6, 1.0, 0.55, 0.0).unwrap();
        let h = build_hamiltonian(&spec, Sector::SymmetricIdentical).unwrap();
        assert!(h.is_symmetric());
        let e2 = SymmetricEigen::new(h.to_dense()).eigenvalues;
        let e1 = SymmetricEigen::new(spec.chain().unwrap().hamiltonian()).eigenvalues;
        let mut want = Vec::new();
        for a in 0..6 {
            for b in a..6 {
                want.push(e1[a] + e1[b]);
            }
        }
        let mut got: Vec<f64> = e2.iter().copied().collect();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn distinguishable_u_zero_is_kronecker_sum() {
        let spec = LatticeSpec::new(4, 1.0, 0.7, 0.0).unwrap();
        let h = build_hamiltonian(&spec, Sector::Distinguishable).unwrap().to_dense();
        let h1 = spec.chain().unwrap().hamiltonian();
        let id = DMatrix::<f64>::identity(4, 4);
        let want = h1.kronecker(&id) + id.kronecker(&h1);
        assert_eq!(h, want);
    }

    #[test]
    fn gershgorin_brackets_spectrum() {
        let spec = LatticeSpec::new(5, 1.0, 0.5, 2.0).unwrap();
        let h = build_hamiltonian(&spec, Sector::Distinguishable).unwrap();
        let (lo, hi) = h.spectral_bounds();
        let e = SymmetricEigen::new(h.to_dense()).eigenvalues;
        assert!(e.iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12));
    }
}
