//! Dense linear algebra over a prime field F_q (q < 256).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, CoreResult};

/// Arithmetic in F_q for a small prime q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fq {
    pub q: u32,
    inv: Vec<u8>,
}

impl Fq {
    pub fn new(q: u32) -> CoreResult<Self> {
        if !(2..256).contains(&q) || (2..q).any(|d| d * d <= q && q % d == 0) {
            return Err(CoreError::Other(alloc::format!("q = {} is not a prime below 256", q)));
        }
        let mut inv = vec![0u8; q as usize];
        for a in 1..q {
            let b = (1..q).find(|b| a * b % q == 1).unwrap();
            inv[a as usize] = b as u8;
        }
        Ok(Fq { q, inv })
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.q) as u8
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + self.q - b as u32) % self.q) as u8
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        (a as u32 * b as u32 % self.q) as u8
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        ((self.q - a as u32) % self.q) as u8
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    pub fn from_int(&self, n: i64) -> u8 {
        n.rem_euclid(self.q as i64) as u8
    }

    /// `q^k` as an integer.
    pub fn pow(&self, k: u32) -> u128 {
        (self.q as u128).pow(k)
    }
}

/// Row-major matrix with entries in F_q. A `r × c` matrix acts on column
/// vectors of length `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&r[..cols]);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<u8>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.set(i, j, c[i]);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u8) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, f: &Fq, o: &Mat) -> Mat {
        debug_assert_eq!(self.cols, o.rows);
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b != 0 {
                        let x = f.add(out.get(i, j), f.mul(a, b));
                        out.set(i, j, x);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &Fq, v: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0u32;
            for (j, &x) in v.iter().enumerate() {
                s += self.get(i, j) as u32 * x as u32;
            }
            *o = (s % f.q) as u8;
        }
        out
    }

    pub fn add(&self, f: &Fq, o: &Mat) -> Mat {
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, f: &Fq, o: &Mat) -> Mat {
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, f: &Fq, c: u8) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, o: &Mat) -> Mat {
        let mut m = Mat::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j));
            }
        }
        m
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, f: &Fq) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in 0..self.cols {
                let x = f.mul(self.get(r, j), inv);
                self.set(r, j, x);
            }
            for i in 0..self.rows {
                if i != r {
                    let k = self.get(i, c);
                    if k != 0 {
                        for j in 0..self.cols {
                            let x = f.sub(self.get(i, j), f.mul(k, self.get(r, j)));
                            self.set(i, j, x);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Fq) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of `{x : Ax = 0}`.
    pub fn kernel(&self, f: &Fq) -> Vec<Vec<u8>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u8; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// Is this square matrix invertible?
    pub fn is_invertible(&self, f: &Fq) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }
}

/// Row-reduced basis of the span of `vecs` (length `n` each).
pub fn span_basis(f: &Fq, vecs: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let mut m = Mat::from_rows(vecs, n);
    let r = m.rref(f).len();
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

/// Extend a basis of a subspace `sub` to one of `F_q^n`; returns only the
/// added vectors (standard basis vectors off the pivots).
pub fn complement(f: &Fq, sub: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    let b = span_basis(f, sub, n);
    let pivots: Vec<usize> = b.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|c| {
            let mut v = vec![0u8; n];
            v[c] = 1;
            v
        })
        .collect()
}

/// Coordinates of `v` in the (row-reduced) basis `b`, if `v` lies in its span.
pub fn coords_in(f: &Fq, b: &[Vec<u8>], v: &[u8]) -> Option<Vec<u8>> {
    let mut rest = v.to_vec();
    let mut out = vec![0u8; b.len()];
    for (k, r) in b.iter().enumerate() {
        let p = r.iter().position(|&x| x != 0)?;
        let c = f.mul(rest[p], f.inv(r[p]));
        if c != 0 {
            for (x, &y) in rest.iter_mut().zip(r) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
        out[k] = c;
    }
    if rest.iter().all(|&x| x == 0) {
        Some(out)
    } else {
        None
    }
}

/// All `k`-dimensional subspaces of `F_q^n`, each as a `k × n` matrix in
/// reduced row echelon form.
pub fn subspaces(f: &Fq, n: usize, k: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut pivots = Vec::with_capacity(k);
    choose(n, k, 0, &mut pivots, &mut |piv: &[usize]| {
        // Free positions: (row r, column c) with c > piv[r] and c not a pivot.
        let mut free = Vec::new();
        for (r, &p) in piv.iter().enumerate() {
            for c in p + 1..n {
                if !piv.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let total = (f.q as u64).pow(free.len() as u32);
        for mut t in 0..total {
            let mut m = Mat::zeros(k, n);
            for (r, &p) in piv.iter().enumerate() {
                m.set(r, p, 1);
            }
            for &(r, c) in &free {
                m.set(r, c, (t % f.q as u64) as u8);
                t /= f.q as u64;
            }
            out.push(m);
        }
    });
    out
}

fn choose(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        if n - c < k - cur.len() {
            break;
        }
        cur.push(c);
        choose(n, k, c + 1, cur, f);
        cur.pop();
    }
}

/// `|GL_m(F_Q)|`.
pub fn gl_order(big_q: u128, m: u32) -> u128 {
    let qm = big_q.pow(m);
    (0..m).map(|i| qm - big_q.pow(i)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        let f = Fq::new(3).unwrap();
        let m = Mat::from_rows(&[vec![1, 2, 0], vec![2, 1, 0]], 3);
        assert_eq!(m.rank(&f), 1);
        let k = m.kernel(&f);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(&f, v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn grassmannian_sizes() {
        let f = Fq::new(2).unwrap();
        // Gaussian binomials [4 choose 2]_2 = 35, [3 choose 1]_3 = 13.
        assert_eq!(subspaces(&f, 4, 2).len(), 35);
        let f3 = Fq::new(3).unwrap();
        assert_eq!(subspaces(&f3, 3, 1).len(), 13);
        assert_eq!(subspaces(&f3, 3, 0).len(), 1);
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(3, 2), 48);
        assert_eq!(gl_order(2, 0), 1);
    }

    #[test]
    fn rejects_composite() {
        assert!(Fq::new(4).is_err());
        assert!(Fq::new(5).is_ok());
    }
}
