//! Exact linear algebra over ℚ(i).
//!
//! All pivot searches take the first nonzero entry of a column, scanning rows
//! from the lowest index, so results are reproducible bit for bit.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix of [`Scalar`]s.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![Scalar::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diag(entries: &[Scalar]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Matrix::new(r, c, rows.into_iter().flatten().collect()))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let data: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect();
        Matrix::from_rows(data).expect("ragged integer matrix")
    }

    pub fn column_vector(v: &[Scalar]) -> Self {
        Matrix::new(v.len(), 1, v.to_vec())
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

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn conj(&self) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(Scalar::conj).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        self.transpose().conj()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i..self.cols).all(|j| self[(i, j)] == self[(j, i)].conj()))
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(i, j)] += &p;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::new(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::new(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|a| a * s).collect())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        out
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    let mut prev = Scalar::one();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let piv = a[(r, c)].clone();
        for i in r + 1..a.rows {
            let lead = a[(i, c)].clone();
            for j in c + 1..a.cols {
                let v = &(&(&piv * &a[(i, j)]) - &(&lead * &a[(r, j)])) / &prev;
                a[(i, j)] = v;
            }
            a[(i, c)] = Scalar::zero();
        }
        prev = piv;
        r += 1;
    }
    r
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column of
/// the reduced echelon form, with that free coordinate set to 1.
pub fn nullspace(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); m.cols()];
            v[f] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[(row, f)];
            }
            v
        })
        .collect()
}

/// Solves `a x = b` column by column, returning the solution with free
/// variables set to zero, or `NoSolution` if some column is inconsistent.
pub fn solve_particular(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    assert_eq!(a.rows(), b.rows());
    let n = a.cols();
    let (r, pivots) = a.hstack(b).rref();
    if pivots.iter().any(|&p| p >= n) {
        return Err(Error::NoSolution);
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (row, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(pc, j)] = r[(row, n + j)].clone();
        }
    }
    Ok(x)
}

/// Solves `a X = c` for hermitian `a`, choosing every column of `X` inside
/// `Ran(a)` (orthogonal to `ker a`). `NoSolution` when `Ran(c) ⊄ Ran(a)`.
pub fn solve_in_range(a: &Matrix, c: &Matrix) -> Result<Matrix> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if a.rows() != c.rows() {
        return Err(Error::invalid("row count mismatch in solve_in_range"));
    }
    let x0 = solve_particular(a, c)?;
    let kernel = nullspace(a);
    if kernel.is_empty() {
        return Ok(x0);
    }
    // X = X0 - N (Nᴴ N)⁻¹ Nᴴ X0
    let n = Matrix::new(a.cols(), kernel.len(), {
        let cols = kernel.len();
        let mut d = vec![Scalar::zero(); a.cols() * cols];
        for (j, v) in kernel.iter().enumerate() {
            for (i, s) in v.iter().enumerate() {
                d[i * cols + j] = s.clone();
            }
        }
        d
    });
    let nh = n.adjoint();
    let coeff = solve_particular(&nh.mul(&n), &nh.mul(&x0))?;
    Ok(x0.sub(&n.mul(&coeff)))
}

/// One step of an exact LDLᴴ factorisation: `m = Σ d_k v_k v_kᴴ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub index: usize,
    pub weight: Scalar,
    pub vector: Vec<Scalar>,
}

/// Exact LDLᴴ decomposition of a hermitian PSD matrix by diagonal pivoting
/// with Schur complements. Returns `Ok(None)` when the matrix is not PSD.
pub fn ldl_psd(m: &Matrix) -> Result<Option<Vec<Pivot>>> {
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    loop {
        if active.iter().any(|&i| a[(i, i)].is_negative_real()) {
            return Ok(None);
        }
        let mut still = Vec::with_capacity(active.len());
        for &i in &active {
            if a[(i, i)].is_zero() {
                if active.iter().any(|&j| !a[(i, j)].is_zero()) {
                    return Ok(None);
                }
            } else {
                still.push(i);
            }
        }
        active = still;
        let Some(&p) = active.first() else {
            return Ok(Some(pivots));
        };
        let d = a[(p, p)].clone();
        let inv = d.inv().expect("positive pivot");
        let mut v = vec![Scalar::zero(); n];
        for &i in &active {
            v[i] = &a[(i, p)] * &inv;
        }
        for &i in &active {
            if v[i].is_zero() {
                continue;
            }
            for &j in &active {
                if v[j].is_zero() {
                    continue;
                }
                let t = &(&d * &v[i]) * &v[j].conj();
                a[(i, j)] -= &t;
            }
        }
        pivots.push(Pivot { index: p, weight: d, vector: v });
        active.retain(|&i| i != p);
    }
}

/// `vᴴ m v ≥ 0` for all `v`, decided exactly.
pub fn psd_check(m: &Matrix) -> Result<bool> {
    Ok(ldl_psd(m)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_ints(d: &[i64]) -> Matrix {
        Matrix::diag(&d.iter().map(|&v| Scalar::from_int(v)).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::identity(4)), 4);
        assert_eq!(rank(&Matrix::zeros(3, 5)), 0);
        // flat extension of the two-vertex fixture, a7=a8=0, a9=a10=1
        let m = Matrix::from_ints(&[
            &[1, 0, 0, 0, 1, 0],
            &[0, 1, 0, 0, 0, 1],
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 1, 0, 0],
            &[1, 0, 0, 0, 1, 0],
            &[0, 1, 0, 0, 0, 1],
        ]);
        assert_eq!(rank(&m), 4);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&Matrix::identity(3)).is_empty());
        let ns = nullspace(&Matrix::from_ints(&[&[1, 1]]));
        assert_eq!(ns, vec![vec![Scalar::from_int(-1), Scalar::one()]]);
        let m = Matrix::from_ints(&[
            &[1, 0, 0, 0, 1, 0],
            &[0, 1, 0, 0, 0, 1],
            &[0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 1, 0, 0],
            &[1, 0, 0, 0, 1, 0],
            &[0, 1, 0, 0, 0, 1],
        ]);
        let ns = nullspace(&m);
        let v = |x: &[i64]| x.iter().map(|&a| Scalar::from_int(a)).collect::<Vec<_>>();
        assert_eq!(ns, vec![v(&[-1, 0, 0, 0, 1, 0]), v(&[0, -1, 0, 0, 0, 1])]);
    }

    #[test]
    fn solve_in_range_examples() {
        let a = diag_ints(&[1, 0]);
        let c = Matrix::from_ints(&[&[0], &[1]]);
        assert_eq!(solve_in_range(&a, &c), Err(Error::NoSolution));

        let c = Matrix::from_ints(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(solve_in_range(&Matrix::identity(3), &c).unwrap(), c);

        // solution is pushed into Ran(a)
        let a = Matrix::from_ints(&[&[1, 1], &[1, 1]]);
        let c = Matrix::from_ints(&[&[2], &[2]]);
        let x = solve_in_range(&a, &c).unwrap();
        assert_eq!(x, Matrix::from_ints(&[&[1], &[1]]));
        assert!(solve_in_range(&Matrix::from_ints(&[&[0, 1], &[0, 0]]), &c).is_err());
    }

    #[test]
    fn psd_examples() {
        assert!(psd_check(&diag_ints(&[2, 3, 1, 1, 2, 3, 0])).unwrap());
        assert!(!psd_check(&diag_ints(&[1, -1])).unwrap());
        assert!(psd_check(&Matrix::from_ints(&[&[1, 1], &[1, 1]])).unwrap());
        assert!(!psd_check(&Matrix::from_ints(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(!psd_check(&Matrix::from_ints(&[&[1, 2], &[2, 1]])).unwrap());
        assert_eq!(psd_check(&Matrix::from_ints(&[&[1, 2], &[0, 1]])), Err(Error::NotHermitian));
        let h = Matrix::from_rows(vec![
            vec![Scalar::from_int(2), Scalar::complex(0, 1)],
            vec![Scalar::complex(0, -1), Scalar::from_int(1)],
        ])
        .unwrap();
        assert!(psd_check(&h).unwrap());
    }

    #[test]
    fn ldl_reassembles() {
        let m = Matrix::from_ints(&[&[4, 2, 0], &[2, 2, 1], &[0, 1, 1]]);
        let piv = ldl_psd(&m).unwrap().unwrap();
        let mut acc = Matrix::zeros(3, 3);
        for p in &piv {
            let v = Matrix::column_vector(&p.vector);
            acc = acc.add(&v.mul(&v.adjoint()).scale(&p.weight));
        }
        assert_eq!(acc, m);
        assert_eq!(piv.len(), rank(&m));
    }
}
