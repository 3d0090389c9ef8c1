//! Truncated hermitian functionals and their moment matrices.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::element::{echelon_basis, Element};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, psd_check, rank, solve_in_range, Matrix};
use crate::quiver::{Path, PathAlgebra};
use crate::scalar::Scalar;

/// Which length-0 paths take part in bases and moment matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Trivial,
    Nontrivial,
}

impl Window {
    pub fn from_flag(include_trivial: bool) -> Self {
        if include_trivial {
            Window::Trivial
        } else {
            Window::Nontrivial
        }
    }

    pub fn includes_trivial(self) -> bool {
        self == Window::Trivial
    }
}

/// A hermitian functional on the paths of length at most `2k` in the chosen
/// window. Only nonzero values are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedFunctional {
    algebra: Arc<PathAlgebra>,
    k: usize,
    include_trivial: bool,
    values: BTreeMap<Path, Scalar>,
}

impl TruncatedFunctional {
    /// Builds a functional from explicit values, filling in `L(p*)` as the
    /// conjugate of `L(p)` where omitted. Conflicting pairs are rejected.
    pub fn new(
        algebra: Arc<PathAlgebra>,
        k: usize,
        include_trivial: bool,
        entries: impl IntoIterator<Item = (Path, Scalar)>,
    ) -> Result<Self> {
        let mut given: BTreeMap<Path, Scalar> = BTreeMap::new();
        let mut f = TruncatedFunctional { algebra, k, include_trivial, values: BTreeMap::new() };
        for (p, v) in entries {
            f.check_window(&p)?;
            if let Some(old) = given.insert(p.clone(), v.clone()) {
                if old != v {
                    return Err(Error::invalid(format!(
                        "path {} given twice with different values",
                        f.algebra.fmt_path(&p)
                    )));
                }
            }
        }
        for (p, v) in &given {
            let ps = p.star();
            if let Some(w) = given.get(&ps) {
                if *w != v.conj() {
                    return Err(Error::invalid(format!(
                        "values of {} and {} are not conjugate",
                        f.algebra.fmt_path(p),
                        f.algebra.fmt_path(&ps)
                    )));
                }
            }
        }
        for (p, v) in given {
            if v.is_zero() {
                continue;
            }
            f.values.insert(p.star(), v.conj());
            f.values.insert(p, v);
        }
        Ok(f)
    }

    pub fn zero(algebra: Arc<PathAlgebra>, k: usize, include_trivial: bool) -> Self {
        TruncatedFunctional { algebra, k, include_trivial, values: BTreeMap::new() }
    }

    pub fn algebra(&self) -> &Arc<PathAlgebra> {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn include_trivial(&self) -> bool {
        self.include_trivial
    }

    pub fn window(&self) -> Window {
        Window::from_flag(self.include_trivial)
    }

    /// Nonzero values, ascending in default path order.
    pub fn values(&self) -> &BTreeMap<Path, Scalar> {
        &self.values
    }

    pub fn in_window(&self, p: &Path) -> bool {
        p.len() <= 2 * self.k && (self.include_trivial || !p.is_trivial())
    }

    fn check_window(&self, p: &Path) -> Result<()> {
        if self.in_window(p) {
            Ok(())
        } else {
            Err(Error::invalid(format!("path {} is outside the window of order {}", self.algebra.fmt_path(p), self.k)))
        }
    }

    pub fn value(&self, p: &Path) -> Result<Scalar> {
        self.check_window(p)?;
        Ok(self.values.get(p).cloned().unwrap_or_default())
    }

    /// `L(f)` by linearity.
    pub fn riesz_eval(&self, f: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (p, c) in f.terms() {
            let v = self.value(p)?;
            if !v.is_zero() {
                acc += &(c * &v);
            }
        }
        Ok(acc)
    }

    /// `L(p q*)`, zero when the product vanishes.
    pub fn pair(&self, p: &Path, q: &Path) -> Result<Scalar> {
        match p.compose(&q.star()) {
            Some(pq) => self.value(&pq),
            None => Ok(Scalar::zero()),
        }
    }

    /// Basis of the `S_t` window.
    pub fn basis(&self, t: usize) -> Vec<Path> {
        self.algebra.basis(t, self.include_trivial)
    }

    pub fn moment_matrix(&self, t: usize) -> Result<MomentMatrix> {
        if t > self.k {
            return Err(Error::invalid(format!("moment matrix order {t} exceeds {}", self.k)));
        }
        let basis = self.basis(t);
        let m = self.gram_on(&basis, &basis)?;
        Ok(MomentMatrix { basis, matrix: m })
    }

    /// Matrix `(L(p q*))` for `p` in `rows`, `q` in `cols`.
    pub fn gram_on(&self, rows: &[Path], cols: &[Path]) -> Result<Matrix> {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (i, p) in rows.iter().enumerate() {
            for (j, q) in cols.iter().enumerate() {
                m[(i, j)] = self.pair(p, q)?;
            }
        }
        Ok(m)
    }

    pub fn block_decompose(&self) -> Result<BlockDecomposition> {
        if self.k == 0 {
            return Err(Error::invalid("block decomposition needs order at least 1"));
        }
        let old = self.basis(self.k - 1);
        let new: Vec<Path> = self.basis(self.k).into_iter().filter(|p| p.len() == self.k).collect();
        Ok(BlockDecomposition {
            a: self.gram_on(&old, &old)?,
            c: self.gram_on(&old, &new)?,
            b: self.gram_on(&new, &new)?,
            old,
            new,
        })
    }

    /// Echelon basis of `{p ∈ V_k : L(p v*) = 0 for all v ∈ V_k}`, largest
    /// path of each element as pivot.
    pub fn kernel_basis(&self) -> Result<Vec<Element>> {
        let mm = self.moment_matrix(self.k)?;
        Ok(kernel_elements(&mm.matrix, &mm.basis, &self.algebra))
    }

    pub fn is_flat(&self) -> Result<FlatReport> {
        if self.k == 0 {
            return Err(Error::invalid("flatness needs order at least 1"));
        }
        let rank_k = rank(&self.moment_matrix(self.k)?.matrix);
        let blocks = self.block_decompose()?;
        let rank_km1 = rank(&blocks.a);
        let (range_contained, schur_matches) = match solve_in_range(&blocks.a, &blocks.c) {
            Ok(x) => (true, blocks.c.adjoint().mul(&x) == blocks.b),
            Err(Error::NoSolution) => (false, false),
            Err(e) => return Err(e),
        };
        let by_rank = rank_k == rank_km1;
        let by_blocks = range_contained && schur_matches;
        if by_rank != by_blocks {
            return Err(Error::invariant(format!(
                "rank criterion ({rank_k} vs {rank_km1}) disagrees with block criterion \
                 (range {range_contained}, schur {schur_matches})"
            )));
        }
        Ok(FlatReport { flat: by_rank, rank_k, rank_km1, range_contained, window: self.window() })
    }

    /// No nonzero kernel element of degree below `k`.
    pub fn is_tip_maximal(&self) -> Result<bool> {
        Ok(self.kernel_basis()?.iter().all(|p| p.tip_path(&self.algebra.order).map(Path::len) == Some(self.k)))
    }

    pub fn is_psd(&self) -> Result<bool> {
        psd_check(&self.moment_matrix(self.k)?.matrix)
    }

    /// The restriction to paths of length at most `2m`.
    pub fn restrict(&self, m: usize) -> Result<TruncatedFunctional> {
        if m > self.k {
            return Err(Error::invalid(format!("cannot restrict order {} to {m}", self.k)));
        }
        Ok(TruncatedFunctional {
            algebra: self.algebra.clone(),
            k: m,
            include_trivial: self.include_trivial,
            values: self.values.iter().filter(|(p, _)| p.len() <= 2 * m).map(|(p, v)| (p.clone(), v.clone())).collect(),
        })
    }
}

/// Elements `Σ c_i p_i` with `Σ_i c_i m(i, j) = 0` for all `j`, in echelon
/// form. For hermitian `m` these are the conjugates of `nullspace(m)`.
pub fn kernel_elements(m: &Matrix, basis: &[Path], algebra: &PathAlgebra) -> Vec<Element> {
    let vecs = nullspace(&m.transpose());
    let elems: Vec<Element> = vecs.into_iter().map(|v| Element::from_terms(basis.iter().cloned().zip(v))).collect();
    echelon_basis(&elems, &algebra.order)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    pub basis: Vec<Path>,
    pub matrix: Matrix,
}

/// `[[a, c], [cᴴ, b]]` with respect to `V_k = V_{k-1} ⊕ span(S_k \ S_{k-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub a: Matrix,
    pub c: Matrix,
    pub b: Matrix,
    pub old: Vec<Path>,
    pub new: Vec<Path>,
}

impl BlockDecomposition {
    pub fn reassemble(&self) -> Matrix {
        let n = self.old.len();
        let m = self.new.len();
        let mut out = Matrix::zeros(n + m, n + m);
        let ch = self.c.adjoint();
        for i in 0..n + m {
            for j in 0..n + m {
                out[(i, j)] = match (i < n, j < n) {
                    (true, true) => self.a[(i, j)].clone(),
                    (true, false) => self.c[(i, j - n)].clone(),
                    (false, true) => ch[(i - n, j)].clone(),
                    (false, false) => self.b[(i - n, j - n)].clone(),
                };
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatReport {
    pub flat: bool,
    pub rank_k: usize,
    pub rank_km1: usize,
    pub range_contained: bool,
    pub window: Window,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;

    fn a2() -> Arc<PathAlgebra> {
        Arc::new(PathAlgebra::new(Quiver::new(&["e1", "e2"], &[("x", "e1", "e2")])).unwrap())
    }

    fn func(a: &Arc<PathAlgebra>, k: usize, vals: &[(&str, i64)]) -> TruncatedFunctional {
        TruncatedFunctional::new(
            a.clone(),
            k,
            false,
            vals.iter().map(|(p, v)| (a.path(p).unwrap(), Scalar::from_int(*v))),
        )
        .unwrap()
    }

    fn fix_l2(a: &Arc<PathAlgebra>) -> TruncatedFunctional {
        func(a, 2, &[("x x*", 1), ("x* x", 1), ("x x* x x*", 1), ("x* x x* x", 1)])
    }

    fn fix_l2_ext(a: &Arc<PathAlgebra>, a9: i64) -> TruncatedFunctional {
        func(
            a,
            3,
            &[
                ("x x*", 1),
                ("x* x", 1),
                ("x x* x x*", 1),
                ("x* x x* x", 1),
                ("x x* x x* x x*", a9),
                ("x* x x* x x* x", 1),
            ],
        )
    }

    #[test]
    fn riesz_examples() {
        let a = a2();
        let l = fix_l2(&a);
        let f =
            Element::from_terms([(a.path("x x*").unwrap(), Scalar::one()), (a.path("x* x").unwrap(), Scalar::one())]);
        assert_eq!(l.riesz_eval(&f).unwrap(), Scalar::from_int(2));
        assert!(l.riesz_eval(&Element::zero()).unwrap().is_zero());
        assert!(l.riesz_eval(&Element::from_path(a.path("x x* x").unwrap())).unwrap().is_zero());
        assert!(l.riesz_eval(&Element::from_path(a.path("e:e1").unwrap())).is_err());
    }

    #[test]
    fn moment_matrix_examples() {
        let a = a2();
        assert_eq!(fix_l2(&a).moment_matrix(2).unwrap().matrix, Matrix::identity(4));
        let z = TruncatedFunctional::zero(a.clone(), 2, false);
        assert!(z.moment_matrix(2).unwrap().matrix.is_zero());
        let ext = fix_l2_ext(&a, 1);
        let mm = ext.moment_matrix(3).unwrap();
        assert_eq!(rank(&mm.matrix), 4);
        assert_eq!(mm.matrix.row(4), mm.matrix.row(0));
        assert_eq!(mm.matrix.row(5), mm.matrix.row(1));
    }

    #[test]
    fn hermitian_closure_and_conflict() {
        let a = a2();
        let l = TruncatedFunctional::new(a.clone(), 2, false, [(a.path("x x* x").unwrap(), Scalar::complex(1, 2))])
            .unwrap();
        assert_eq!(l.value(&a.path("x* x x*").unwrap()).unwrap(), Scalar::complex(1, -2));
        let bad = TruncatedFunctional::new(
            a.clone(),
            2,
            false,
            [(a.path("x x* x").unwrap(), Scalar::one()), (a.path("x* x x*").unwrap(), Scalar::from_int(2))],
        );
        assert!(bad.is_err());
        let selfadj = TruncatedFunctional::new(a.clone(), 2, false, [(a.path("x x*").unwrap(), Scalar::i())]);
        assert!(selfadj.is_err());
    }

    #[test]
    fn block_examples() {
        let a = a2();
        let ext = fix_l2_ext(&a, 1);
        let b = ext.block_decompose().unwrap();
        assert_eq!(b.a, Matrix::identity(4));
        assert_eq!(b.c, Matrix::from_ints(&[&[1, 0], &[0, 1], &[0, 0], &[0, 0]]));
        assert_eq!(b.reassemble(), ext.moment_matrix(3).unwrap().matrix);
    }

    #[test]
    fn kernel_and_flatness() {
        let a = a2();
        let ext = fix_l2_ext(&a, 1);
        let ker = ext.kernel_basis().unwrap();
        let names: Vec<String> = ker.iter().map(|e| e.format(&a.double, &a.order)).collect();
        assert_eq!(names, ["x* x x* - x*", "x x* x - x"]);
        let r = ext.is_flat().unwrap();
        assert!(r.flat && r.rank_k == 4 && r.rank_km1 == 4 && r.range_contained);
        let r = fix_l2_ext(&a, 2).is_flat().unwrap();
        assert!(!r.flat && r.rank_k == 5);
        assert!(TruncatedFunctional::zero(a.clone(), 3, false).is_flat().unwrap().flat);
        assert!(ext.is_tip_maximal().unwrap());
        assert!(fix_l2(&a).is_tip_maximal().unwrap());
        assert!(fix_l2(&a).kernel_basis().unwrap().is_empty());
        // kernel containing x alone
        let l = func(&a, 2, &[("x* x", 1), ("x* x x* x", 1)]);
        assert!(!l.is_tip_maximal().unwrap());
    }

    #[test]
    fn psd_examples() {
        let a = a2();
        assert!(fix_l2(&a).is_psd().unwrap());
        assert!(!func(&a, 1, &[("x x*", -1)]).is_psd().unwrap());
    }

    #[test]
    fn complex_kernel_uses_transpose() {
        let l = Arc::new(PathAlgebra::new(Quiver::new(&["e"], &[("x", "e", "e")])).unwrap());
        // L(x x*) = L(x* x) = 1, L(x x) = i: kernel of the form is x - i x*
        let f = TruncatedFunctional::new(
            l.clone(),
            1,
            false,
            [
                (l.path("x x*").unwrap(), Scalar::one()),
                (l.path("x* x").unwrap(), Scalar::one()),
                (l.path("x x").unwrap(), Scalar::i()),
            ],
        )
        .unwrap();
        for p in f.kernel_basis().unwrap() {
            for v in f.basis(1) {
                let pv = p.mul_path(&v.star());
                assert!(f.riesz_eval(&pv).unwrap().is_zero());
            }
        }
        assert_eq!(f.kernel_basis().unwrap().len(), 1);
    }
}
