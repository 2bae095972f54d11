//! Dense matrices over a quadratic tower.

use std::fmt;
use std::sync::Arc;

use super::{Embedding, Tower, TowerElement};
use crate::error::{Error, Result};

/// Counts of positive, negative and zero eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl fmt::Display for Inertia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.pos, self.neg, self.zero)
    }
}

#[derive(Clone)]
pub struct Matrix {
    tower: Arc<Tower>,
    rows: usize,
    cols: usize,
    data: Vec<TowerElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Matrix {
    /// Builds a matrix, lifting all entries into the largest tower among them.
    pub fn from_rows(tower: &Arc<Tower>, rows: Vec<Vec<TowerElement>>) -> Result<Matrix> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Precondition("ragged matrix rows".into()));
        }
        let mut t = tower.clone();
        for x in rows.iter().flatten() {
            if t.is_prefix_of(x.tower()) {
                t = x.tower().clone();
            }
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|x| x.lift(&t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix {
            tower: t,
            rows: n,
            cols: m,
            data,
        })
    }

    pub fn zeros(tower: &Arc<Tower>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            tower: tower.clone(),
            rows,
            cols,
            data: vec![TowerElement::zero(tower); rows * cols],
        }
    }

    pub fn identity(tower: &Arc<Tower>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(tower, n, n);
        for i in 0..n {
            m.set(i, i, TowerElement::one(tower));
        }
        m
    }

    pub fn diagonal(tower: &Arc<Tower>, d: &[TowerElement]) -> Result<Matrix> {
        let n = d.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { d[i].clone() } else { TowerElement::zero(tower) })
                    .collect()
            })
            .collect();
        Matrix::from_rows(tower, rows)
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TowerElement {
        &self.data[i * self.cols + j]
    }

    /// Sets an entry, lifting the whole matrix if the value needs a larger tower.
    pub fn set(&mut self, i: usize, j: usize, x: TowerElement) {
        if !x.tower().is_prefix_of(&self.tower) && self.tower.is_prefix_of(x.tower()) {
            let t = x.tower().clone();
            for y in &mut self.data {
                *y = y.lift(&t).expect("prefix lift");
            }
            self.tower = t;
        }
        self.data[i * self.cols + j] = x.lift(&self.tower).expect("entry from a compatible tower");
    }

    pub fn row(&self, i: usize) -> &[TowerElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<TowerElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn lift(&self, tower: &Arc<Tower>) -> Result<Matrix> {
        Ok(Matrix {
            tower: tower.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.lift(tower)).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.tower, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Precondition("matrix dimensions do not agree".into()));
        }
        let t = if self.tower.is_prefix_of(&other.tower) {
            other.tower.clone()
        } else if other.tower.is_prefix_of(&self.tower) {
            self.tower.clone()
        } else {
            return Err(Error::TowerMismatch);
        };
        let mut out = Matrix::zeros(&t, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = TowerElement::zero(&t);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(other.get(k, j))?)?;
                }
                out.data[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        self.submatrix(idx, idx)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
            .collect();
        Matrix {
            tower: self.tower.clone(),
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    /// Applies a Galois automorphism entrywise.
    pub fn galois_conjugate(&self, flips: u32) -> Result<Matrix> {
        Ok(Matrix {
            tower: self.tower.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| x.galois_conjugate(flips))
                .collect::<Result<_>>()?,
        })
    }

    pub fn det(&self) -> Result<TowerElement> {
        if !self.is_square() {
            return Err(Error::Precondition("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = TowerElement::one(&self.tower);
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(TowerElement::zero(&self.tower));
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let pivot = a[c][c].clone();
            det = det.checked_mul(&pivot)?;
            let inv = pivot.inv()?;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].checked_mul(&inv)?;
                #[allow(clippy::needless_range_loop)] // reads row c while writing row r
                for k in c..n {
                    let v = a[r][k].checked_sub(&f.checked_mul(&a[c][k])?)?;
                    a[r][k] = v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Precondition("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let t = &self.tower;
        let mut a = self.to_rows();
        let mut inv = Matrix::identity(t, n).to_rows();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::Degenerate("singular matrix".into()))?;
            a.swap(p, c);
            inv.swap(p, c);
            let pinv = a[c][c].inv()?;
            for k in 0..n {
                a[c][k] = a[c][k].checked_mul(&pinv)?;
                inv[c][k] = inv[c][k].checked_mul(&pinv)?;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..n {
                    a[r][k] = a[r][k].checked_sub(&f.checked_mul(&a[c][k])?)?;
                    inv[r][k] = inv[r][k].checked_sub(&f.checked_mul(&inv[c][k])?)?;
                }
            }
        }
        Matrix::from_rows(t, inv)
    }

    pub fn rank(&self) -> Result<usize> {
        let mut a = self.to_rows();
        let (n, m) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..m {
            let Some(p) = (rank..n).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(p, rank);
            let inv = a[rank][c].inv()?;
            for r in rank + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].checked_mul(&inv)?;
                #[allow(clippy::needless_range_loop)] // reads row c while writing row r
                for k in c..m {
                    a[r][k] = a[r][k].checked_sub(&f.checked_mul(&a[rank][k])?)?;
                }
            }
            rank += 1;
        }
        Ok(rank)
    }

    /// Congruence diagonalization of a symmetric matrix.
    ///
    /// Returns `(d, p)` with `p^T * self * p = diag(d)` and `p` invertible.
    pub fn diagonalize(&self) -> Result<(Vec<TowerElement>, Matrix)> {
        if !self.is_symmetric() {
            return Err(Error::Precondition("matrix is not symmetric".into()));
        }
        let n = self.rows;
        let t = self.tower.clone();
        let mut a = self.to_rows();
        // Columns of p are the current basis vectors.
        let mut p = Matrix::identity(&t, n).to_rows();
        let mut d = vec![TowerElement::zero(&t); n];
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let pivot = match active.iter().position(|&i| !a[i][i].is_zero()) {
                Some(k) => active[k],
                None => {
                    let pair = active.iter().enumerate().find_map(|(x, &i)| {
                        active[x + 1..]
                            .iter()
                            .find(|&&j| !a[i][j].is_zero())
                            .map(|&j| (i, j))
                    });
                    let Some((i, j)) = pair else {
                        // The remaining block is zero.
                        break;
                    };
                    // e_i += e_j makes the (i, i) entry 2 a_ij.
                    for &k in &active {
                        let v = a[i][k].checked_add(&a[j][k])?;
                        a[i][k] = v;
                    }
                    for &k in &active {
                        a[k][i] = a[i][k].clone();
                    }
                    let v = a[i][i].checked_add(&a[j][i])?;
                    a[i][i] = v;
                    for row in p.iter_mut() {
                        let v = row[i].checked_add(&row[j])?;
                        row[i] = v;
                    }
                    i
                }
            };
            let piv = a[pivot][pivot].clone();
            let inv = piv.inv()?;
            active.retain(|&k| k != pivot);
            for &r in &active {
                if a[r][pivot].is_zero() {
                    continue;
                }
                let f = a[r][pivot].checked_mul(&inv)?;
                for &k in &active {
                    let v = a[r][k].checked_sub(&f.checked_mul(&a[pivot][k])?)?;
                    a[r][k] = v;
                }
                // e_r -= f e_pivot
                for row in p.iter_mut() {
                    let v = row[r].checked_sub(&f.checked_mul(&row[pivot])?)?;
                    row[r] = v;
                }
                a[r][pivot] = TowerElement::zero(&t);
            }
            for &r in &active {
                a[pivot][r] = TowerElement::zero(&t);
            }
            d[pivot] = piv;
        }
        Ok((d, Matrix::from_rows(&t, p)?))
    }

    /// Signature under a real embedding, with certified signs.
    pub fn inertia_at(&self, emb: &Embedding) -> Result<Inertia> {
        let (d, _) = self.diagonalize()?;
        let mut out = Inertia {
            pos: 0,
            neg: 0,
            zero: 0,
        };
        for x in d {
            match x.sign_at(emb)? {
                1 => out.pos += 1,
                -1 => out.neg += 1,
                _ => out.zero += 1,
            }
        }
        Ok(out)
    }

    pub fn inertia(&self) -> Result<Inertia> {
        self.inertia_at(&Embedding::identity())
    }
}
