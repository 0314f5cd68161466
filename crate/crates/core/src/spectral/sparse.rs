use rayon::prelude::*;

/// Symmetric matrix in compressed rows, both triangles stored, sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCsr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SymmetricCsr {
    /// Builds from `(row, col, value)` triplets of the full matrix; duplicates add up.
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            indptr[r as usize + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Self {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .zip(&self.values[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        });
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0)))
    }

    /// Gershgorin interval containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let (mut d, mut off) = (0.0, 0.0);
            for (j, v) in self.row(i) {
                if j == i {
                    d = v;
                } else {
                    off += v.abs();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    }

    /// Principal submatrix on `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![u32::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            map[i] = k as u32;
        }
        let mut triplets = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if map[j] != u32::MAX {
                    triplets.push((k as u32, map[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), triplets)
    }

    /// `D A D` for a diagonal `D`.
    pub fn scaled_symmetric(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for p in out.indptr[i]..out.indptr[i + 1] {
                out.values[p] *= d[i] * d[out.indices[p] as usize];
            }
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Matrix Market coordinate format, lower triangle, `symmetric` qualifier.
    pub fn to_matrix_market(&self) -> String {
        let mut entries = Vec::new();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    entries.push(format!("{} {} {:?}", i + 1, j + 1, v));
                }
            }
        }
        let mut s = format!(
            "%%MatrixMarket matrix coordinate real symmetric\n{} {} {}\n",
            self.n,
            self.n,
            entries.len()
        );
        for e in entries {
            s.push_str(&e);
            s.push('\n');
        }
        s
    }
}

const LEAF: usize = 64;

/// Nested-dissection ordering of grid nodes with 5-point connectivity: the
/// node set is split at the median of its longer axis, the grid line there is
/// the separator and is numbered after both halves.
pub fn nested_dissection(coords: &[(i32, i32)]) -> Vec<usize> {
    let mut order = Vec::with_capacity(coords.len());
    let mut nodes: Vec<usize> = (0..coords.len()).collect();
    dissect(coords, &mut nodes, &mut order);
    order
}

fn dissect(coords: &[(i32, i32)], nodes: &mut [usize], order: &mut Vec<usize>) {
    if nodes.len() <= LEAF {
        order.extend_from_slice(nodes);
        return;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for &i in nodes.iter() {
        let (x, y) = coords[i];
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let by_x = xmax - xmin >= ymax - ymin;
    let key = |i: usize| if by_x { coords[i].0 } else { coords[i].1 };
    if (by_x && xmax == xmin) || (!by_x && ymax == ymin) {
        order.extend_from_slice(nodes);
        return;
    }
    nodes.sort_unstable_by_key(|&i| (key(i), i));
    let cut = key(nodes[nodes.len() / 2]);
    let lo_end = nodes.partition_point(|&i| key(i) < cut);
    let sep_end = nodes.partition_point(|&i| key(i) <= cut);
    let (left, rest) = nodes.split_at_mut(lo_end);
    let (sep, right) = rest.split_at_mut(sep_end - lo_end);
    dissect(coords, left, order);
    dissect(coords, right, order);
    order.extend_from_slice(sep);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_and_matvec() {
        let a = SymmetricCsr::from_triplets(
            3,
            vec![(0, 0, 2.0), (1, 1, 2.0), (2, 2, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 1.0)],
        );
        assert_eq!(a.get(2, 2), 3.0);
        assert!(a.is_symmetric(0.0));
        let mut y = vec![0.0; 3];
        a.matvec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![1.0, 0.0, 2.0]);
        assert_eq!(a.gershgorin(), (0.0, 4.0));
        let sub = a.submatrix(&[2, 1]);
        assert_eq!(sub.get(0, 0), 3.0);
        assert_eq!(sub.get(0, 1), -1.0);
        assert!(a.to_matrix_market().starts_with("%%MatrixMarket matrix coordinate real symmetric\n3 3 5\n"));
    }

    #[test]
    fn dissection_is_a_permutation_with_separators_last() {
        let coords: Vec<(i32, i32)> = (0..40).flat_map(|i| (0..30).map(move |j| (i, j))).collect();
        let order = nested_dissection(&coords);
        let mut seen = order.clone();
        seen.sort();
        assert_eq!(seen, (0..coords.len()).collect::<Vec<_>>());
        // top-level separator is a full column at the median x
        let last = &order[order.len() - 30..];
        assert!(last.iter().all(|&i| coords[i].0 == coords[last[0]].0));
    }
}
