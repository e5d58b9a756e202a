//! Dense exact linear algebra over F_p: row reduction, rank, and an
//! incremental echelon basis used for image/membership computations.

use crate::fp::Fp;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMatrix {
    pub p: u32,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u32, rows: Vec<Vec<u32>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Self {
            p,
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Matrix product; entries are accumulated in u64 and reduced once.
    pub fn mul(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.p, rhs.p);
        let mut out = FpMatrix::zeros(self.p, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * rhs.get(k, j) as u64;
                }
                out.set(i, j, (acc % self.p as u64) as u32);
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0u32; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for k in 0..self.cols {
                acc += self.get(i, k) as u64 * v[k] as u64;
            }
            *o = (acc % self.p as u64) as u32;
        }
        out
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let f = Fp(self.p);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.data.swap_chunks(r, pr, self.cols);
            let inv = f.inv(self.get(r, c));
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && self.get(i, c) != 0 {
                    let factor = self.get(i, c);
                    for j in c..self.cols {
                        let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl SwapChunks for Vec<u32> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.split_at_mut(hi * width);
        head[lo * width..(lo + 1) * width].swap_with_slice(&mut tail[..width]);
    }
}

/// Incrementally maintained fully-reduced row space of dimension `dim`.
///
/// Every stored row has its pivot entry normalized to 1 and pivot columns
/// of all other rows cleared, so membership coordinates can be read off
/// pivot positions. `rightmost` selects the pivot as the last instead of
/// the first nonzero coordinate (used where the *least* coordinate
/// positions should survive as the complement).
pub struct Echelon {
    p: u32,
    pub dim: usize,
    rightmost: bool,
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u32, dim: usize) -> Self {
        Self {
            p,
            dim,
            rightmost: false,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn new_rightmost(p: u32, dim: usize) -> Self {
        Self {
            rightmost: true,
            ..Self::new(p, dim)
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn pivot_of(&self, v: &[u32]) -> Option<usize> {
        if self.rightmost {
            v.iter().rposition(|&x| x != 0)
        } else {
            v.iter().position(|&x| x != 0)
        }
    }

    /// Reduces `v` against the basis in place; returns false if it vanishes.
    pub fn reduce(&self, v: &mut [u32]) -> bool {
        let f = Fp(self.p);
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row.iter()) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v.iter().any(|&x| x != 0)
    }

    /// Coordinates of `v` over the stored rows, or None if not in the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let mut w = v.to_vec();
        let coeffs: Vec<u32> = self.pivots.iter().map(|&piv| v[piv]).collect();
        if self.reduce(&mut w) {
            None
        } else {
            Some(coeffs)
        }
    }

    /// Inserts `v` if independent; returns true when the rank grew.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let f = Fp(self.p);
        let mut w = v.to_vec();
        if !self.reduce(&mut w) {
            return false;
        }
        let piv = self.pivot_of(&w).expect("nonzero row has a pivot");
        let inv = f.inv(w[piv]);
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // clear the new pivot column in the existing rows
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(w.iter()) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }

    /// Coordinate positions not used as pivots, in ascending order.
    pub fn complement_positions(&self) -> Vec<usize> {
        let used: std::collections::BTreeSet<usize> = self.pivots.iter().copied().collect();
        (0..self.dim).filter(|i| !used.contains(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_rref() {
        let mut m = FpMatrix::from_rows(
            7,
            vec![vec![1, 2, 3], vec![2, 4, 1], vec![3, 6, 4], vec![0, 0, 0]],
        );
        let pivots = m.row_reduce();
        assert_eq!(pivots, vec![0, 2]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn matrix_product() {
        let a = FpMatrix::from_rows(7, vec![vec![1, 2], vec![3, 4]]);
        let b = FpMatrix::from_rows(7, vec![vec![5, 6], vec![0, 1]]);
        let c = a.mul(&b);
        assert_eq!(c.row(0), &[5, 1]);
        assert_eq!(c.row(1), &[1, 1]);
    }

    #[test]
    fn echelon_membership_coordinates() {
        let mut e = Echelon::new(3, 4);
        assert!(e.insert(&[1, 2, 0, 1]));
        assert!(e.insert(&[0, 1, 1, 0]));
        assert!(!e.insert(&[1, 0, 1, 1])); // row1 - row2
        let v = vec![2, 2, 1, 2]; // 2*row1 + ... check roundtrip
        if let Some(coords) = e.coordinates(&v) {
            let f = Fp(3);
            let mut rec = vec![0u32; 4];
            for (c, row) in coords.iter().zip(&e.rows) {
                for (r, x) in row.iter().zip(rec.iter_mut()) {
                    *x = f.add(*x, f.mul(*c, *r));
                }
            }
            assert_eq!(rec, v);
        } else {
            panic!("v should be in the span");
        }
    }

    #[test]
    fn rightmost_pivots_leave_least_complement() {
        let mut e = Echelon::new_rightmost(2, 3);
        e.insert(&[1, 0, 1]);
        e.insert(&[0, 1, 1]);
        assert_eq!(e.complement_positions(), vec![0]);
    }
}
