//! Small dense matrices over exact rationals.

use num::{BigRational, One, Signed, ToPrimitive, Zero};

use crate::value::parse_rational;

/// Reads a float as the exact decimal it prints as (`0.95` → `19/20`).
pub fn decimal(x: f64) -> BigRational {
    assert!(x.is_finite(), "non-finite input {x}");
    match parse_rational(&format!("{x}")) {
        Some(Ok(r)) => r,
        _ => BigRational::from_float(x).expect("finite"),
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_f64(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        QMat { rows: r, cols: c, data: rows.iter().flat_map(|row| row.iter().map(|&x| decimal(x))).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(BigRational::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc + a * &v[j]
                    }
                })
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> QMat {
        (0..k).fold(QMat::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, s: &BigRational) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn abs(&self) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.abs()).collect() }
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Stacks `blocks` vertically.
    pub fn vstack(blocks: &[QMat]) -> QMat {
        let cols = blocks[0].cols;
        let rows = blocks.iter().map(|b| b.rows).sum();
        QMat { rows, cols, data: blocks.iter().flat_map(|b| b.data.iter().cloned()).collect() }
    }

    /// Stacks `blocks` horizontally.
    pub fn hstack(blocks: &[QMat]) -> QMat {
        let rows = blocks[0].rows;
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = QMat::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, off + j, b.get(i, j).clone());
                }
            }
            off += b.cols;
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                let x = a.get(col, j) / &p;
                a.set(col, j, x);
                let y = inv.get(col, j) / &p;
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let x = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, x);
                    let y = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, y);
                }
            }
        }
        Some(inv)
    }

    /// Exact rank by row reduction.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..a.cols {
                a.data.swap(pivot * a.cols + j, rank * a.cols + j);
            }
            for r in (rank + 1)..a.rows {
                let f = a.get(r, col) / a.get(rank, col);
                if f.is_zero() {
                    continue;
                }
                for j in col..a.cols {
                    let x = a.get(r, j) - &f * a.get(rank, j);
                    a.set(r, j, x);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn row_abs_sums(&self) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigRational::zero(), |acc, j| acc + self.get(i, j).abs()))
            .collect()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }
}

pub fn max_abs(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_are_read_exactly() {
        assert_eq!(decimal(0.95), q(19, 20));
        assert_eq!(decimal(-2.0), q(-2, 1));
        assert_eq!(decimal(0.01), q(1, 100));
    }

    #[test]
    fn inverse_round_trip() {
        let m = QMat::from_f64(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
        let singular = QMat::from_f64(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
        assert_eq!(m.rank(), 2);
        assert_eq!(QMat::zeros(3, 2).rank(), 0);
    }

    #[test]
    fn powers_and_stacks() {
        let j = QMat::from_f64(&[vec![2.0, 1.0], vec![0.0, 2.0]]);
        let j3 = j.pow(3);
        assert_eq!(j3, QMat::from_f64(&[vec![8.0, 12.0], vec![0.0, 8.0]]));
        let s = QMat::vstack(&[QMat::identity(2), j.clone()]);
        assert_eq!((s.rows, s.cols), (4, 2));
        let h = QMat::hstack(&[QMat::identity(2), j]);
        assert_eq!((h.rows, h.cols), (2, 4));
        assert_eq!(h.row_abs_sums(), vec![q(4, 1), q(3, 1)]);
    }
}
