//! Finite dimensional *-representations from positive functionals.
//!
//! Representations act on coset coordinates from the right: a path
//! `b1 b2 ... bn` acts as `M_bn ... M_b2 M_b1` on a column of coordinates.
//! The inner product is `<u, v> = uᵀ G v̄` for the Gram matrix `G`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::element::{echelon_basis, Element};
use crate::error::{Error, Result};
use crate::groebner::{kernel_groebner, RightGroebnerBasis};
use crate::linalg::{nullspace, psd_check, rank, solve_particular, Matrix};
use crate::moment::TruncatedFunctional;
use crate::quiver::{Letter, Path, PathAlgebra};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub algebra: Arc<PathAlgebra>,
    pub basis: Vec<Path>,
    pub gram: Matrix,
    pub arrows: BTreeMap<Letter, Matrix>,
    pub vertices: Vec<Matrix>,
    pub cyclic: Option<Vec<Scalar>>,
}

impl Representation {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn letter_matrix(&self, l: Letter) -> &Matrix {
        &self.arrows[&l]
    }

    /// Matrix of a path: the vertex projection for a trivial path, the
    /// reversed product of letter matrices otherwise.
    pub fn path_matrix(&self, p: &Path) -> Matrix {
        if p.is_trivial() {
            return self.vertices[p.origin()].clone();
        }
        let mut m = Matrix::identity(self.dim());
        for l in p.letters() {
            m = self.letter_matrix(*l).mul(&m);
        }
        m
    }

    pub fn element_matrix(&self, f: &Element) -> Matrix {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (p, c) in f.terms() {
            m = m.add(&self.path_matrix(p).scale(c));
        }
        m
    }

    /// `<u, v> = uᵀ G v̄`.
    pub fn inner(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let gv = self.gram.mul_vec(&v.iter().map(Scalar::conj).collect::<Vec<_>>());
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }

    /// `τ(f)ξ`, if a cyclic vector is present.
    pub fn apply_to_cyclic(&self, f: &Element) -> Option<Vec<Scalar>> {
        self.cyclic.as_ref().map(|xi| self.element_matrix(f).mul_vec(xi))
    }
}

/// Cosets of paths in the `S_{k-1}` window not reducible by the kernel
/// Gröbner basis, with the right-multiplication operators.
pub fn build_representation(l: &TruncatedFunctional) -> Result<Representation> {
    let report = l.is_flat()?;
    if !report.flat {
        return Err(Error::NotFlat(format!("rank {} vs {}", report.rank_k, report.rank_km1)));
    }
    if !l.is_psd()? {
        return Err(Error::NotPsd);
    }
    let gb = kernel_groebner(l)?;
    let alg = l.algebra().clone();
    let window = if l.order() == 0 { Vec::new() } else { l.basis(l.order() - 1) };
    let basis: Vec<Path> = window.into_iter().filter(|p| !gb.is_reducible(p)).collect();
    let gram = l.gram_on(&basis, &basis)?;
    let mut rep = assemble(alg, &gb, basis, gram).map_err(|e| match e {
        Error::InvalidInput(m) => Error::invariant(m),
        e => e,
    })?;
    if rep.dim() != report.rank_k {
        return Err(Error::invariant(format!(
            "representation has dimension {} but the moment matrix has rank {}",
            rep.dim(),
            report.rank_k
        )));
    }
    if l.include_trivial() {
        let unit = gb.normal_form(&Element::unit(&rep.algebra.double));
        rep.cyclic = Some(coordinates(&unit, &rep.basis).ok_or_else(|| Error::invariant("unit escapes the basis"))?);
    }
    Ok(rep)
}

/// Representation on a quotient given by a Gröbner basis, chosen coset
/// representatives and a Gram matrix.
pub fn from_groebner(
    algebra: Arc<PathAlgebra>,
    gb: &RightGroebnerBasis,
    basis: Vec<Path>,
    gram: Matrix,
) -> Result<Representation> {
    if gram.rows() != basis.len() || gram.cols() != basis.len() {
        return Err(Error::invalid("gram size does not match the basis"));
    }
    if let Some(p) = basis.iter().find(|p| gb.is_reducible(p)) {
        return Err(Error::invalid(format!("basis path {} is reducible", algebra.fmt_path(p))));
    }
    assemble(algebra, gb, basis, gram)
}

fn coordinates(f: &Element, basis: &[Path]) -> Option<Vec<Scalar>> {
    if f.support().any(|p| !basis.contains(p)) {
        return None;
    }
    Some(basis.iter().map(|p| f.coeff(p)).collect())
}

fn assemble(alg: Arc<PathAlgebra>, gb: &RightGroebnerBasis, basis: Vec<Path>, gram: Matrix) -> Result<Representation> {
    let n = basis.len();
    let mut arrows = BTreeMap::new();
    for l in alg.double.letters() {
        let lp = alg.double.letter_path(l);
        let mut m = Matrix::zeros(n, n);
        for (j, p) in basis.iter().enumerate() {
            let nf = gb.normal_form(&Element::from_path(p.clone()).mul_path(&lp));
            let col = coordinates(&nf, &basis).ok_or_else(|| {
                Error::invalid(format!(
                    "normal form of {} · {} is not spanned by the basis",
                    alg.fmt_path(p),
                    alg.double.letter_name(l)
                ))
            })?;
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        arrows.insert(l, m);
    }
    let vertices = vertex_projections(&alg, &basis);
    Ok(Representation { algebra: alg, basis, gram, arrows, vertices, cyclic: None })
}

fn vertex_projections(alg: &PathAlgebra, basis: &[Path]) -> Vec<Matrix> {
    (0..alg.double.vertex_count())
        .map(|e| {
            let mut m = Matrix::zeros(basis.len(), basis.len());
            for (i, p) in basis.iter().enumerate() {
                if p.terminal() == e {
                    m[(i, i)] = Scalar::one();
                }
            }
            m
        })
        .collect()
}

/// Compression of a positive functional of order `d+1` (trivial paths
/// included) to a representation `τ` with cyclic vector `ξ` such that
/// `L(f g*) = <τ(f)ξ, τ(g)ξ>` for `f, g` of degree at most `d`.
pub fn compress_representation(l: &TruncatedFunctional) -> Result<Representation> {
    if !l.include_trivial() {
        return Err(Error::invalid("compression needs the window with trivial paths"));
    }
    if l.order() == 0 {
        return Err(Error::invalid("compression needs order at least 1"));
    }
    if !l.is_psd()? {
        return Err(Error::NotPsd);
    }
    let alg = l.algebra().clone();
    let big = l.order();
    let d = big - 1;
    let window = l.basis(big);

    // representatives: greedy independent cosets in ascending order
    let mut reps: Vec<Path> = Vec::new();
    let mut current = 0;
    for p in &window {
        let mut trial = reps.clone();
        trial.push(p.clone());
        let r = rank(&l.gram_on(&trial, &trial)?);
        if r > current {
            reps = trial;
            current = r;
        }
    }
    let g = l.gram_on(&reps, &reps)?;
    let gt = g.transpose();
    let n = reps.len();

    let coords = |f: &Element| -> Result<Vec<Scalar>> {
        if f.is_zero() || n == 0 {
            return Ok(vec![Scalar::zero(); n]);
        }
        let mut rhs = vec![Scalar::zero(); n];
        for (j, q) in reps.iter().enumerate() {
            rhs[j] = l.riesz_eval(&f.mul_path(&q.star()))?;
        }
        solve_particular(&gt, &Matrix::column_vector(&rhs))
            .map(|x| x.column(0))
            .map_err(|_| Error::invariant("coset is not spanned by the representatives"))
    };

    let mut arrows = BTreeMap::new();
    for a in 0..alg.double.arrow_count() {
        let b = Letter::new(a, false);
        let bp = alg.double.letter_path(b);
        let e1 = alg.double.letter_origin(b);
        let short: Vec<Path> = l.basis(d).into_iter().filter(|s| s.terminal() == e1).collect();
        let short_images: Vec<Vec<Scalar>> =
            short.iter().map(|s| coords(&Element::from_path(s.clone()).mul_path(&bp))).collect::<Result<_>>()?;
        let gs = l.gram_on(&short, &short)?;
        let mut m = Matrix::zeros(n, n);
        for (j, r) in reps.iter().enumerate() {
            if r.terminal() != e1 {
                continue;
            }
            let col = if r.len() <= d {
                coords(&Element::from_path(r.clone()).mul_path(&bp))?
            } else {
                // project [r] onto the span of the shorter cosets at e1
                let rhs: Vec<Scalar> = short.iter().map(|s| l.pair(r, s)).collect::<Result<_>>()?;
                let a = solve_particular(&gs.transpose(), &Matrix::column_vector(&rhs))
                    .map_err(|_| Error::invariant("projection system is inconsistent"))?
                    .column(0);
                let mut col = vec![Scalar::zero(); n];
                for (ai, img) in a.iter().zip(&short_images) {
                    if ai.is_zero() {
                        continue;
                    }
                    for (c, v) in col.iter_mut().zip(img) {
                        *c += &(ai * v);
                    }
                }
                col
            };
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        // adjoint: M_{b*} = conj(G⁻¹ M_bᵀ G)
        let star = if n == 0 {
            Matrix::zeros(0, 0)
        } else {
            solve_particular(&g, &m.transpose().mul(&g))
                .map_err(|_| Error::invariant("gram of representatives is singular"))?
                .conj()
        };
        arrows.insert(b, m);
        arrows.insert(b.flipped(), star);
    }
    let xi = coords(&Element::unit(&alg.double))?;
    let rep = Representation {
        vertices: vertex_projections(&alg, &reps),
        algebra: alg,
        basis: reps,
        gram: g,
        arrows,
        cyclic: Some(xi),
    };
    let short = l.basis(d);
    let images: Vec<Vec<Scalar>> =
        short.iter().map(|f| rep.apply_to_cyclic(&Element::from_path(f.clone())).unwrap()).collect();
    for (i, f) in short.iter().enumerate() {
        for (j, h) in short.iter().enumerate() {
            if rep.inner(&images[i], &images[j]) != l.pair(f, h)? {
                return Err(Error::invariant(format!(
                    "compressed representation does not reproduce L({} ({})*)",
                    rep.algebra.fmt_path(f),
                    rep.algebra.fmt_path(h)
                )));
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, relation: String, pass: bool) {
        self.checks.push(RelationCheck { relation, pass });
    }
}

/// Path relations, vertex projection identities, adjointness and Gram
/// positivity, one entry per relation instance.
pub fn check_relations(r: &Representation) -> RelationReport {
    let d = &r.algebra.double;
    let n = r.dim();
    let id = Matrix::identity(n);
    let mut rep = RelationReport::default();
    let letters = d.letters();
    for &a in &letters {
        for &b in &letters {
            if d.letter_terminal(a) != d.letter_origin(b) {
                let prod = r.letter_matrix(b).mul(r.letter_matrix(a));
                rep.push(format!("{} {} = 0", d.letter_name(a), d.letter_name(b)), prod.is_zero());
            }
        }
    }
    let mut sum = Matrix::zeros(n, n);
    for (e, p) in r.vertices.iter().enumerate() {
        let name = format!("e:{}", d.vertex_name(e));
        rep.push(format!("{name} {name} = {name}"), p.mul(p) == *p);
        for (f, q) in r.vertices.iter().enumerate() {
            if f > e {
                rep.push(format!("{name} e:{} = 0", d.vertex_name(f)), p.mul(q).is_zero());
            }
        }
        sum = sum.add(p);
    }
    rep.push("sum of vertex idempotents = 1".into(), sum == id);
    for &l in &letters {
        let m = r.letter_matrix(l);
        let name = d.letter_name(l);
        let o = d.vertex_name(d.letter_origin(l));
        let t = d.vertex_name(d.letter_terminal(l));
        rep.push(format!("e:{o} {name} = {name}"), m.mul(&r.vertices[d.letter_origin(l)]) == *m);
        rep.push(format!("{name} e:{t} = {name}"), r.vertices[d.letter_terminal(l)].mul(m) == *m);
    }
    for a in 0..d.arrow_count() {
        let b = Letter::new(a, false);
        let lhs = r.letter_matrix(b).transpose().mul(&r.gram);
        let rhs = r.gram.mul(&r.letter_matrix(b.flipped()).conj());
        rep.push(format!("{} adjoint to {}", d.letter_name(b), d.letter_name(b.flipped())), lhs == rhs);
    }
    let psd = r.gram.is_hermitian() && psd_check(&r.gram).unwrap_or(false);
    rep.push("gram hermitian positive semidefinite".into(), psd);
    rep
}

/// Echelon basis of the elements of the `S_d` window acting as zero.
pub fn rep_kernel(r: &Representation, d: usize, include_trivial: bool) -> Vec<Element> {
    let window = r.algebra.basis(d, include_trivial);
    let n = r.dim();
    let mut m = Matrix::zeros(n * n, window.len());
    for (j, p) in window.iter().enumerate() {
        let pm = r.path_matrix(p);
        for a in 0..n {
            for b in 0..n {
                m[(a * n + b, j)] = pm[(a, b)].clone();
            }
        }
    }
    let elems: Vec<Element> =
        nullspace(&m).into_iter().map(|v| Element::from_terms(window.iter().cloned().zip(v))).collect();
    echelon_basis(&elems, &r.algebra.order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::flat_extend_tip_maximal;
    use crate::quiver::Quiver;

    fn a2() -> Arc<PathAlgebra> {
        Arc::new(PathAlgebra::new(Quiver::new(&["e1", "e2"], &[("x", "e1", "e2")])).unwrap())
    }

    fn fix_l2_ext(a: &Arc<PathAlgebra>) -> TruncatedFunctional {
        let l = TruncatedFunctional::new(
            a.clone(),
            2,
            false,
            [("x x*", 1), ("x* x", 1), ("x x* x x*", 1), ("x* x x* x", 1)]
                .iter()
                .map(|(p, v)| (a.path(p).unwrap(), Scalar::from_int(*v))),
        )
        .unwrap();
        flat_extend_tip_maximal(&l, true).unwrap()
    }

    #[test]
    fn builds_fixture_representation() {
        let a = a2();
        let rep = build_representation(&fix_l2_ext(&a)).unwrap();
        let names: Vec<String> = rep.basis.iter().map(|p| a.fmt_path(p)).collect();
        assert_eq!(names, ["x", "x*", "x x*", "x* x"]);
        assert_eq!(rep.gram, Matrix::identity(4));
        let mx = rep.letter_matrix(a.double.letter_by_name("x").unwrap());
        // columns: x ↦ 0, x* ↦ x* x, x x* ↦ x, x* x ↦ 0
        assert_eq!(mx, &Matrix::from_ints(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 1, 0, 0]]));
        let report = check_relations(&rep);
        assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
        assert!(mx.mul(mx).is_zero());
    }

    #[test]
    fn detects_bad_adjoint() {
        let a = a2();
        let mut rep = build_representation(&fix_l2_ext(&a)).unwrap();
        let xs = a.double.letter_by_name("x*").unwrap();
        rep.arrows.insert(xs, Matrix::zeros(4, 4));
        let report = check_relations(&rep);
        assert!(report.failures().any(|c| c.relation == "x adjoint to x*"));
    }

    #[test]
    fn zero_functional_gives_empty_representation() {
        let a = a2();
        let z = TruncatedFunctional::zero(a.clone(), 2, false);
        let rep = build_representation(&z).unwrap();
        assert_eq!(rep.dim(), 0);
        assert!(check_relations(&rep).all_pass());
    }

    #[test]
    fn compresses_point_evaluation() {
        let a = a2();
        // one vertex ↦ 1, arrows ↦ 0
        let l = TruncatedFunctional::new(a.clone(), 2, true, [(a.path("e:e1").unwrap(), Scalar::one())]).unwrap();
        let rep = compress_representation(&l).unwrap();
        assert_eq!(rep.dim(), 1);
        assert!(check_relations(&rep).all_pass());
    }

    #[test]
    fn kernel_of_fixture_representation() {
        let a = a2();
        let rep = build_representation(&fix_l2_ext(&a)).unwrap();
        let ker = rep_kernel(&rep, 3, false);
        let names: Vec<String> = ker.iter().map(|e| e.format(&a.double, &a.order)).collect();
        assert_eq!(names, ["x* x x* - x*", "x x* x - x"]);
    }
}
