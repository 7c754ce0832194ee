//! Small dense exact linear algebra over an arbitrary field.
//!
//! Plain fraction-full Gauss-Jordan: the matrices in this crate are modest
//! (a few hundred rows at the default budgets) and exactness matters more
//! than asymptotics.

use crate::scalar::Field;

/// Dense row-major matrix over a field.
#[derive(Clone, Debug)]
pub struct Mat<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, rhs.rows);
        let mut out: Mat<F> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).add(&a.mul(b));
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &F) -> Mat<F> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut out: Mat<F> = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    /// Supertrace-free plain trace.
    pub fn trace(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let mut acc = F::zero();
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }
}

/// Result of an in-place reduction to reduced row echelon form.
pub struct Rref<F: Field> {
    pub mat: Mat<F>,
    /// Column index of the pivot in each nonzero row, in order.
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form by exact Gauss-Jordan elimination.
pub fn rref<F: Field>(mut m: Mat<F>) -> Rref<F> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        let Some(pr) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
            continue;
        };
        if pr != row {
            for j in 0..m.cols {
                m.data.swap(pr * m.cols + j, row * m.cols + j);
            }
        }
        let inv = m.at(row, col).inv();
        for j in col..m.cols {
            let v = m.at(row, j).mul(&inv);
            *m.at_mut(row, j) = v;
        }
        for r in 0..m.rows {
            if r == row || m.at(r, col).is_zero() {
                continue;
            }
            let factor = m.at(r, col).clone();
            for j in col..m.cols {
                let v = m.at(r, j).sub(&factor.mul(m.at(row, j)));
                *m.at_mut(r, j) = v;
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.rows {
            break;
        }
    }
    Rref { mat: m, pivots }
}

pub fn rank<F: Field>(m: &Mat<F>) -> usize {
    rref(m.clone()).pivots.len()
}

/// Basis for the right nullspace (kernel of `m` acting on column vectors).
pub fn nullspace<F: Field>(m: &Mat<F>) -> Vec<Vec<F>> {
    let r = rref(m.clone());
    let pivot_cols = &r.pivots;
    let is_pivot = |c: usize| pivot_cols.contains(&c);
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if is_pivot(free) {
            continue;
        }
        let mut v = vec![F::zero(); m.cols];
        v[free] = F::one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = r.mat.at(row, free).neg();
        }
        basis.push(v);
    }
    basis
}

/// Does `target` lie in the column span of `m`? If so return coordinates.
pub fn solve_in_span<F: Field>(m: &Mat<F>, target: &[F]) -> Option<Vec<F>> {
    assert_eq!(m.rows, target.len());
    let mut aug = Mat::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, m.cols) = target[i].clone();
    }
    let r = rref(aug);
    if r.pivots.contains(&m.cols) {
        return None;
    }
    let mut x = vec![F::zero(); m.cols];
    for (row, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.mat.at(row, m.cols).clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Rat};

    fn m(rows: Vec<Vec<i64>>) -> Mat<Rat> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat_int).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 1, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 1);
        for row in 0..a.rows {
            let mut acc = Rat::from_integer(0.into());
            for col in 0..a.cols {
                acc += a.at(row, col) * &ns[0][col];
            }
            assert!(num_traits::Zero::is_zero(&acc));
        }
    }

    #[test]
    fn span_membership() {
        let a = m(vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        let t: Vec<Rat> = vec![rat_int(2), rat_int(3), rat_int(5)];
        let x = solve_in_span(&a, &t).unwrap();
        assert_eq!(x, vec![rat_int(2), rat_int(3)]);
        let t2: Vec<Rat> = vec![rat_int(2), rat_int(3), rat_int(6)];
        assert!(solve_in_span(&a, &t2).is_none());
    }
}
