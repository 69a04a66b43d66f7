//! Dense square matrices and LU factorization with partial pivoting.

use crate::error::{Error, Result};
use crate::numerics::scalar::Real;

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R> {
    n: usize,
    data: Vec<R>,
}

impl<R: Real> Matrix<R> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![R::zero(); n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<R>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Structural(format!(
                "{} entries do not form a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [R] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn mul_vec(&self, x: &[R]) -> Vec<R> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// Factorizes a copy of the matrix.
    pub fn lu(&self) -> Result<Lu<R>> {
        Lu::factor(self.clone())
    }

    pub fn solve(&self, b: &[R]) -> Result<Vec<R>> {
        self.clone().lu_in_place()?.solve(b)
    }

    /// Factorizes without copying.
    pub fn lu_in_place(self) -> Result<Lu<R>> {
        Lu::factor(self)
    }
}

impl<R> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        &self.data[i * self.n + j]
    }
}

impl<R> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        &mut self.data[i * self.n + j]
    }
}

/// `PA = LU` with unit lower-triangular `L` stored below the diagonal.
#[derive(Clone, Debug)]
pub struct Lu<R> {
    lu: Matrix<R>,
    perm: Vec<usize>,
    /// max |u_ii| / min |u_ii|, a cheap condition indicator.
    pub pivot_ratio: f64,
}

impl<R: Real> Lu<R> {
    fn factor(mut a: Matrix<R>) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.data.iter().fold(R::zero(), |m, v| m.max(v.abs()));
        if n > 0 && !(scale > R::zero()) {
            return Err(Error::SingularSystem { ratio: f64::INFINITY });
        }
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, R::from_f64(-1.0)), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > R::zero()) || !pmax.is_finite() {
                return Err(Error::SingularSystem { ratio: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            let (upper, lower) = a.data.split_at_mut((k + 1) * n);
            let prow = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != R::zero() {
                    for (x, &u) in row[k + 1..].iter_mut().zip(&prow[k + 1..]) {
                        *x -= l * u;
                    }
                }
            }
        }
        let (lo, hi) = (0..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let d = a[(i, i)].abs().to_f64();
            (lo.min(d), hi.max(d))
        });
        let pivot_ratio = if n == 0 { 1.0 } else { hi / lo };
        if !(pivot_ratio * R::epsilon().to_f64() < 1.0) {
            return Err(Error::SingularSystem { ratio: pivot_ratio });
        }
        Ok(Self { lu: a, perm, pivot_ratio })
    }

    pub fn solve(&self, b: &[R]) -> Result<Vec<R>> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(Error::Structural(format!("rhs length {} for {n}x{n} system", b.len())));
        }
        let mut y: Vec<R> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: R = row[..i].iter().zip(&y[..i]).map(|(a, b)| *a * *b).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: R = row[i + 1..].iter().zip(&y[i + 1..]).map(|(a, b)| *a * *b).sum();
            y[i] = (y[i] - s) / row[i];
        }
        Ok(y)
    }
}

/// Sup norm of a vector.
pub fn max_abs<R: Real>(v: &[R]) -> R {
    v.iter().fold(R::zero(), |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::DoubleDouble;
    use proptest::prelude::*;

    #[test]
    fn solves_small_system_needing_pivoting() {
        let a = Matrix::from_row_major(3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]).unwrap();
        let x = a.solve(&[5.0, 6.0, 13.0]).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip([5.0, 6.0, 13.0]) {
            assert!((ri - bi).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Matrix::from_row_major(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(a.solve(&[1.0, 1.0]), Err(Error::SingularSystem { .. })));
        let z = Matrix::<f64>::zeros(3);
        assert!(matches!(z.solve(&[0.0; 3]), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn extended_hilbert_solve_is_accurate() {
        let n = 8;
        let mut a = Matrix::<DoubleDouble>::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = DoubleDouble::ONE / DoubleDouble::from_f64((i + j + 1) as f64);
            }
        }
        let x_true: Vec<DoubleDouble> = (0..n).map(|i| DoubleDouble::from_f64(i as f64 + 1.0)).collect();
        let b = a.mul_vec(&x_true);
        let x = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            // cond(H_8) ~ 1.5e10
            assert!((*u - *v).abs().to_f64() < 1e-18);
        }
    }

    proptest! {
        #[test]
        fn diagonally_dominant_systems_solve(entries in proptest::collection::vec(-1.0f64..1.0, 36), rhs in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let n = 6;
            let mut a = Matrix::from_row_major(n, entries).unwrap();
            for i in 0..n {
                a[(i, i)] += 8.0;
            }
            let x = a.solve(&rhs).unwrap();
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&rhs) {
                prop_assert!((ri - bi).abs() < 1e-12);
            }
        }
    }
}
