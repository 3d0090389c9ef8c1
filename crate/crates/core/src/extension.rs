//! Flat completions and flat extensions of truncated functionals.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::groebner::{right_groebner, RightGroebnerBasis};
use crate::linalg::{solve_in_range, solve_particular, Matrix};
use crate::moment::TruncatedFunctional;
use crate::quiver::{Path, PathOrder};
use crate::scalar::Scalar;

/// `B = Cᴴ X` with `A X = C`, `X ⊂ Ran(A)`: the unique `B` making
/// `[[A, C], [Cᴴ, B]]` keep the rank of `A`.
pub fn schur_complete(a: &Matrix, c: &Matrix) -> Result<Matrix> {
    match solve_in_range(a, c) {
        Ok(x) => Ok(c.adjoint().mul(&x)),
        Err(Error::NoSolution) => Err(Error::NotFlat("Ran(C) is not contained in Ran(A)".into())),
        Err(e) => Err(e),
    }
}

/// Extends a tip-maximal functional of order `k-1` to a flat one of order
/// `k`. Values on odd length `2k-1` solve `L(p w) = 0` for every kernel
/// generator `p` and every path `w` of length `k`; values on length `2k`
/// come from the Schur completion.
///
/// Quivers with more than one vertex require `general_quiver`.
pub fn flat_extend_tip_maximal(l: &TruncatedFunctional, general_quiver: bool) -> Result<TruncatedFunctional> {
    let alg = l.algebra().clone();
    let single = alg.double.vertex_count() == 1;
    if !single && !general_quiver {
        return Err(Error::invalid(
            "tip-maximal extension is limited to single-vertex quivers without the general-quiver flag",
        ));
    }
    if !l.is_tip_maximal()? {
        return Err(Error::NotTipMaximal);
    }
    let obstructed = |msg: String| {
        if single {
            Error::invariant(msg)
        } else {
            Error::ExtensionObstructed(msg)
        }
    };
    let k = l.order() + 1;
    let order = &alg.order;

    // unknowns: one (re, im) pair per star orbit of length 2k-1
    let odd = alg.double.paths_of_length(order, 2 * k - 1);
    let mut reps: Vec<Path> = Vec::new();
    let mut slot: BTreeMap<Path, (usize, bool)> = BTreeMap::new();
    for u in &odd {
        if slot.contains_key(u) {
            continue;
        }
        let us = u.star();
        debug_assert_ne!(*u, us);
        slot.insert(u.clone(), (reps.len(), false));
        slot.insert(us, (reps.len(), true));
        reps.push(u.clone());
    }
    let nvars = 2 * reps.len();

    let kernel = l.kernel_basis()?;
    let words = alg.double.paths_of_length(order, k);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for p in &kernel {
        for w in &words {
            let pw = p.mul_path(w);
            if pw.is_zero() {
                continue;
            }
            let mut row = vec![Scalar::zero(); nvars];
            let mut known = Scalar::zero();
            for (q, c) in pw.terms() {
                match slot.get(q) {
                    Some(&(i, starred)) => {
                        // c·(re ± i·im)
                        row[2 * i] += c;
                        let ci = c * &Scalar::i();
                        if starred {
                            row[2 * i + 1] -= &ci;
                        } else {
                            row[2 * i + 1] += &ci;
                        }
                    }
                    None => known += &(c * &l.value(q)?),
                }
            }
            let target = -known;
            rows.push(row.iter().map(|s| Scalar::from_real(s.re().clone())).collect());
            rhs.push(Scalar::from_real(target.re().clone()));
            rows.push(row.iter().map(|s| Scalar::from_real(s.im().clone())).collect());
            rhs.push(Scalar::from_real(target.im().clone()));
        }
    }
    let solution = if rows.is_empty() || nvars == 0 {
        if rhs.iter().any(|s| !s.is_zero()) {
            return Err(obstructed("odd-degree system is inconsistent".into()));
        }
        vec![Scalar::zero(); nvars]
    } else {
        let a = Matrix::from_rows(rows)?;
        match solve_particular(&a, &Matrix::column_vector(&rhs)) {
            Ok(x) => x.column(0),
            Err(Error::NoSolution) => return Err(obstructed("odd-degree system is inconsistent".into())),
            Err(e) => return Err(e),
        }
    };

    let mut entries: Vec<(Path, Scalar)> = l.values().iter().map(|(p, v)| (p.clone(), v.clone())).collect();
    for (i, u) in reps.iter().enumerate() {
        let v = Scalar::new(solution[2 * i].re().clone(), solution[2 * i + 1].re().clone());
        entries.push((u.clone(), v));
    }
    let odd_filled = TruncatedFunctional::new(alg.clone(), k, l.include_trivial(), entries.clone())?;

    // even block by Schur completion
    let old = l.basis(k - 1);
    let new = words;
    let a = odd_filled.gram_on(&old, &old)?;
    let c = odd_filled.gram_on(&old, &new)?;
    let b = schur_complete(&a, &c).map_err(|e| obstructed(format!("Schur completion failed: {e}")))?;
    for (i, u) in new.iter().enumerate() {
        for (j, v) in new.iter().enumerate() {
            match u.compose(&v.star()) {
                Some(z) => {
                    if i <= j {
                        entries.push((z, b[(i, j)].clone()));
                    }
                }
                None if !b[(i, j)].is_zero() => {
                    return Err(obstructed(format!(
                        "completion needs a nonzero value on the vanishing product {} · {}*",
                        alg.fmt_path(u),
                        alg.fmt_path(v)
                    )));
                }
                None => {}
            }
        }
    }
    let out = TruncatedFunctional::new(alg.clone(), k, l.include_trivial(), entries)?;
    let report = out.is_flat()?;
    if !report.flat {
        return Err(obstructed(format!("extension is not flat (rank {} vs {})", report.rank_k, report.rank_km1)));
    }
    if out.restrict(l.order())? != *l {
        return Err(Error::invariant("extension does not restrict to its input"));
    }
    Ok(out)
}

/// The rank-preserving extension of a flat functional to all paths,
/// evaluated lazily through normal forms.
#[derive(Debug)]
pub struct FlatExtension {
    base: TruncatedFunctional,
    gb: RightGroebnerBasis,
    cache: Mutex<HashMap<Path, Scalar>>,
}

impl FlatExtension {
    pub fn new(base: TruncatedFunctional) -> Result<Self> {
        let gb = crate::groebner::kernel_groebner(&base)?;
        Ok(FlatExtension { base, gb, cache: Mutex::new(HashMap::new()) })
    }

    /// Uses a caller supplied generating set of the kernel and a possibly
    /// different admissible order. Every generator must lie in the kernel.
    pub fn from_generators(base: TruncatedFunctional, gens: &[Element], order: &PathOrder) -> Result<Self> {
        let report = base.is_flat()?;
        if !report.flat {
            return Err(Error::NotFlat(format!("rank {} vs {}", report.rank_k, report.rank_km1)));
        }
        let window = base.basis(base.order());
        for g in gens {
            if g.degree().unwrap_or(0) > base.order() {
                return Err(Error::invalid("generator exceeds the window degree"));
            }
            for v in &window {
                if !base.riesz_eval(&g.mul_path(&v.star()))?.is_zero() {
                    return Err(Error::invalid("generator is not in the kernel"));
                }
            }
        }
        let gb = right_groebner(gens, order);
        Ok(FlatExtension { base, gb, cache: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> &TruncatedFunctional {
        &self.base
    }

    pub fn groebner(&self) -> &RightGroebnerBasis {
        &self.gb
    }

    pub fn evaluate(&self, p: &Path) -> Result<Scalar> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(p) {
            return Ok(v.clone());
        }
        let v = if self.base.in_window(p) || p.is_trivial() {
            self.base.value(p)?
        } else if self.base.include_trivial() {
            self.base.riesz_eval(&self.reduced(p)?)?
        } else {
            // without the unit, L need not vanish on the kernel: pair the
            // normal forms of the two halves of p = u v*
            let d = &self.base.algebra().double;
            let (u, w) = d.split(p, p.len().div_ceil(2));
            let (nu, nv) = (self.reduced(&u)?, self.reduced(&w.star())?);
            let mut acc = Scalar::zero();
            for (a, ca) in nu.terms() {
                for (b, cb) in nv.terms() {
                    if let Some(ab) = a.compose(&b.star()) {
                        acc += &(&(ca * &cb.conj()) * &self.base.value(&ab)?);
                    }
                }
            }
            acc
        };
        self.cache.lock().expect("cache lock").insert(p.clone(), v.clone());
        Ok(v)
    }

    /// Normal form of `p`, which flatness keeps in degree below the order.
    fn reduced(&self, p: &Path) -> Result<Element> {
        let nf = self.gb.normal_form(&Element::from_path(p.clone()));
        let k = self.base.order();
        if nf.degree().is_some_and(|d| d + 1 > k) {
            let alg = self.base.algebra();
            return Err(Error::invariant(format!(
                "normal form {} of {} leaves V_{}",
                nf.format(&alg.double, &alg.order),
                alg.fmt_path(p),
                k.saturating_sub(1)
            )));
        }
        Ok(nf)
    }

    pub fn evaluate_element(&self, f: &Element) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (p, c) in f.terms() {
            acc += &(c * &self.evaluate(p)?);
        }
        Ok(acc)
    }

    /// The extension restricted to paths of length at most `2m`.
    pub fn truncated_view(&self, m: usize) -> Result<TruncatedFunctional> {
        if m < self.base.order() {
            return Err(Error::invalid("truncated view below the base order"));
        }
        let paths = self.base.algebra().basis(2 * m, self.base.include_trivial());
        let mut entries = Vec::with_capacity(paths.len());
        for p in paths {
            let v = self.evaluate(&p)?;
            entries.push((p, v));
        }
        TruncatedFunctional::new(self.base.algebra().clone(), m, self.base.include_trivial(), entries)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quiver::{PathAlgebra, Quiver};

    fn a2() -> Arc<PathAlgebra> {
        Arc::new(PathAlgebra::new(Quiver::new(&["e1", "e2"], &[("x", "e1", "e2")])).unwrap())
    }

    fn fix_l2(a: &Arc<PathAlgebra>) -> TruncatedFunctional {
        TruncatedFunctional::new(
            a.clone(),
            2,
            false,
            [("x x*", 1), ("x* x", 1), ("x x* x x*", 1), ("x* x x* x", 1)]
                .iter()
                .map(|(p, v)| (a.path(p).unwrap(), Scalar::from_int(*v))),
        )
        .unwrap()
    }

    #[test]
    fn schur_examples() {
        let c = Matrix::from_ints(&[&[1, 0], &[0, 1], &[0, 0], &[0, 0]]);
        assert_eq!(schur_complete(&Matrix::identity(4), &c).unwrap(), Matrix::identity(2));
        assert!(schur_complete(&Matrix::identity(4), &Matrix::zeros(4, 2)).unwrap().is_zero());
        let a = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
        assert_eq!(schur_complete(&a, &Matrix::from_ints(&[&[1], &[0]])).unwrap(), Matrix::from_ints(&[&[1]]));
        assert!(matches!(schur_complete(&a, &Matrix::from_ints(&[&[0], &[1]])), Err(Error::NotFlat(_))));
    }

    #[test]
    fn extends_fixture() {
        let a = a2();
        let l = fix_l2(&a);
        assert!(flat_extend_tip_maximal(&l, false).is_err());
        let ext = flat_extend_tip_maximal(&l, true).unwrap();
        assert_eq!(ext.value(&a.path("x x* x x* x").unwrap()).unwrap(), Scalar::zero());
        assert_eq!(ext.value(&a.path("x x* x x* x x*").unwrap()).unwrap(), Scalar::one());
        assert_eq!(ext.value(&a.path("x* x x* x x* x").unwrap()).unwrap(), Scalar::one());
    }

    #[test]
    fn lazy_evaluation() {
        let a = a2();
        let ext = flat_extend_tip_maximal(&fix_l2(&a), true).unwrap();
        let fe = FlatExtension::new(ext.clone()).unwrap();
        let p = |s: &str| a.path(s).unwrap();
        assert_eq!(fe.evaluate(&p("x x* x x* x x* x x*")).unwrap(), Scalar::one());
        assert_eq!(fe.evaluate(&p("x* x x* x x* x x* x x* x")).unwrap(), Scalar::one());
        for q in ext.basis(6) {
            assert_eq!(fe.evaluate(&q).unwrap(), ext.value(&q).unwrap());
        }
        assert_eq!(fe.truncated_view(3).unwrap(), ext);
    }

    #[test]
    fn kernel_values_without_unit() {
        // x* x spans the kernel together with x, yet L(x* x) = 4
        let a = a2();
        let l =
            TruncatedFunctional::new(a.clone(), 2, false, [(a.path("x* x").unwrap(), Scalar::from_int(4))]).unwrap();
        let fe = FlatExtension::new(l.clone()).unwrap();
        assert_eq!(fe.evaluate(&a.path("x* x").unwrap()).unwrap(), Scalar::from_int(4));
        let view = fe.truncated_view(4).unwrap();
        assert_eq!(view.restrict(2).unwrap(), l);
        assert_eq!(crate::linalg::rank(&view.moment_matrix(4).unwrap().matrix), 1);
    }
}
