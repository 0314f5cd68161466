//! Sparse `L D L^T` factorization of `A - shift I` without pivoting, in a fixed
//! fill-reducing order (up-looking, row by row along the elimination tree).

use std::sync::Arc;

use super::sparse::SymmetricCsr;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Elimination tree and column pointers of `L`, shared by every shift.
#[derive(Debug, Clone)]
pub struct Symbolic {
    n: usize,
    perm: Vec<usize>,
    pinv: Vec<usize>,
    parent: Vec<usize>,
    lp: Vec<usize>,
}

impl Symbolic {
    /// `perm[k]` is the original index eliminated at step `k`.
    pub fn analyze(a: &SymmetricCsr, perm: Vec<usize>) -> Self {
        let n = a.n;
        let mut pinv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            pinv[i] = k;
        }
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for (j, _) in a.row(perm[k]) {
                let mut i = pinv[j];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        Self {
            n,
            perm,
            pinv,
            parent,
            lp,
        }
    }

    /// Off-diagonal entries of `L`.
    pub fn nnz(&self) -> usize {
        self.lp[self.n]
    }
}

/// Sylvester inertia of `A - shift I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub positive: usize,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    symbolic: Arc<Symbolic>,
    li: Vec<u32>,
    lx: Vec<f64>,
    d: Vec<f64>,
    pub shift: f64,
}

/// Pivots below this fraction of the matrix scale count as breakdown.
pub const PIVOT_TOL: f64 = 1e-14;

impl Factorization {
    pub fn new(a: &SymmetricCsr, symbolic: Arc<Symbolic>, shift: f64) -> Result<Self> {
        let n = a.n;
        let sym = &*symbolic;
        let (glo, ghi) = a.gershgorin();
        let scale = (glo - shift).abs().max((ghi - shift).abs()).max(f64::MIN_POSITIVE);
        let mut li = vec![0u32; sym.nnz()];
        let mut lx = vec![0.0; sym.nnz()];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            for (j, v) in a.row(sym.perm[k]) {
                let mut i = sym.pinv[j];
                if i <= k {
                    y[i] += if i == k { v - shift } else { v };
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = sym.parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            let mut dk = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let p0 = sym.lp[i];
                let p2 = p0 + lnz[i];
                for p in p0..p2 {
                    y[li[p] as usize] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                dk -= l_ki * yi;
                li[p2] = k as u32;
                lx[p2] = l_ki;
                lnz[i] += 1;
            }
            if !(dk.abs() > PIVOT_TOL * scale) {
                return Err(Error::Solver(format!(
                    "pivot {dk:e} at step {k} of {n} (shift {shift})"
                )));
            }
            d[k] = dk;
        }
        Ok(Self {
            symbolic,
            li,
            lx,
            d,
            shift,
        })
    }

    /// Factors at `shift`, nudging it by growing relative amounts on breakdown.
    pub fn new_perturbed(a: &SymmetricCsr, symbolic: Arc<Symbolic>, shift: f64) -> Result<Self> {
        let scale = shift.abs().max(1.0);
        let mut last = None;
        for k in 0..6 {
            let s = if k == 0 { shift } else { shift + scale * 1e-12 * 10f64.powi(k) };
            match Self::new(a, symbolic.clone(), s) {
                Ok(f) => return Ok(f),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }

    pub fn inertia(&self) -> Inertia {
        let negative = self.d.iter().filter(|&&v| v < 0.0).count();
        Inertia {
            negative,
            positive: self.d.len() - negative,
        }
    }

    /// Solves `(A - shift I) x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let sym = &*self.symbolic;
        let n = sym.n;
        let mut x: Vec<f64> = (0..n).map(|k| b[sym.perm[k]]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in sym.lp[j]..sym.lp[j + 1] {
                x[self.li[p] as usize] -= self.lx[p] * xj;
            }
        }
        for j in 0..n {
            x[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for p in sym.lp[j]..sym.lp[j + 1] {
                s -= self.lx[p] * x[self.li[p] as usize];
            }
            x[j] = s;
        }
        for k in 0..n {
            b[sym.perm[k]] = x[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::sparse::nested_dissection;
    use super::*;

    fn laplacian(m: usize) -> (SymmetricCsr, Vec<(i32, i32)>) {
        let idx = |i: usize, j: usize| (i * m + j) as u32;
        let mut t = Vec::new();
        let mut coords = Vec::new();
        for i in 0..m {
            for j in 0..m {
                coords.push((i as i32, j as i32));
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        (SymmetricCsr::from_triplets(m * m, t), coords)
    }

    #[test]
    fn solve_and_inertia_match_dense() {
        let (a, coords) = laplacian(12);
        let sym = Arc::new(Symbolic::analyze(&a, nested_dissection(&coords)));
        let shift = 1.3;
        let f = Factorization::new(&a, sym, shift).unwrap();
        let b: Vec<f64> = (0..a.n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x = b.clone();
        f.solve(&mut x);
        let mut ax = vec![0.0; a.n];
        a.matvec(&x, &mut ax);
        for i in 0..a.n {
            assert!((ax[i] - shift * x[i] - b[i]).abs() < 1e-10);
        }
        // closed-form eigenvalues 4 - 2cos(pi p/13) - 2cos(pi q/13)
        let mut below = 0;
        for p in 1..=12 {
            for q in 1..=12 {
                let k = std::f64::consts::PI / 13.0;
                if 4.0 - 2.0 * (k * p as f64).cos() - 2.0 * (k * q as f64).cos() < shift {
                    below += 1;
                }
            }
        }
        assert_eq!(f.inertia().negative, below);
    }

    #[test]
    fn dissection_reduces_fill() {
        let (a, coords) = laplacian(40);
        let natural = Symbolic::analyze(&a, (0..a.n).collect());
        let nd = Symbolic::analyze(&a, nested_dissection(&coords));
        assert!(nd.nnz() < natural.nnz());
    }
}
