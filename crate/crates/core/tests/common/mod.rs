//! Shared test support: fixture quivers and random data generators.
//!
//! Random functionals come from an explicit block-matrix representation
//! `π` of the path algebra (arrow `b: e_i → e_j` in block `(i, j)`,
//! `π(b*) = π(b)ᴴ`, words multiplied in reading order) and a vector `ξ`,
//! via `L(w) = ξᴴ π(w) ξ`. Such functionals are hermitian and positive
//! semidefinite by construction, independently of the library code paths
//! under test.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use pathmoment::{DoubleQuiver, Element, Matrix, Path, PathAlgebra, Quiver, Scalar, TruncatedFunctional};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn a2() -> Arc<PathAlgebra> {
    Arc::new(PathAlgebra::new(Quiver::new(&["e1", "e2"], &[("x", "e1", "e2")])).unwrap())
}

pub fn loop1() -> Arc<PathAlgebra> {
    Arc::new(PathAlgebra::new(Quiver::new(&["e"], &[("x", "e", "e")])).unwrap())
}

pub fn el(a: &PathAlgebra, terms: &[(&str, i64)]) -> Element {
    Element::from_terms(terms.iter().map(|(p, c)| (a.path(p).unwrap(), Scalar::from_int(*c))))
}

pub fn func(a: &Arc<PathAlgebra>, k: usize, trivial: bool, vals: &[(&str, i64)]) -> TruncatedFunctional {
    TruncatedFunctional::new(
        a.clone(),
        k,
        trivial,
        vals.iter().map(|(p, v)| (a.path(p).unwrap(), Scalar::from_int(*v))),
    )
    .unwrap()
}

pub fn fix_l2() -> TruncatedFunctional {
    func(&a2(), 2, false, &[("x x*", 1), ("x* x", 1), ("x x* x x*", 1), ("x* x x* x", 1)])
}

pub fn fix_l2_ext_with(a9: i64) -> TruncatedFunctional {
    func(
        &a2(),
        3,
        false,
        &[("x x*", 1), ("x* x", 1), ("x x* x x*", 1), ("x* x x* x", 1), ("x x* x x* x x*", a9), ("x* x x* x x* x", 1)],
    )
}

pub fn random_scalar(rng: &mut ChaCha8Rng, complex: bool, bound: i64) -> Scalar {
    let re = rng.gen_range(-bound..=bound);
    let im = if complex { rng.gen_range(-bound..=bound) } else { 0 };
    Scalar::complex(re, im)
}

/// A path starting at a random vertex with up to `max_len` random letters.
pub fn random_path(d: &DoubleQuiver, rng: &mut ChaCha8Rng, max_len: usize) -> Path {
    let start = rng.gen_range(0..d.vertex_count());
    let len = rng.gen_range(0..=max_len);
    walk(d, rng, start, len)
}

/// A path of exactly `len` letters from `start` when the quiver allows it.
pub fn walk(d: &DoubleQuiver, rng: &mut ChaCha8Rng, start: usize, len: usize) -> Path {
    let mut p = Path::trivial(start);
    for _ in 0..len {
        let opts: Vec<_> = d.letters().into_iter().filter(|l| d.letter_origin(*l) == p.terminal()).collect();
        if opts.is_empty() {
            break;
        }
        let l = opts[rng.gen_range(0..opts.len())];
        p = p.compose(&d.letter_path(l)).unwrap();
    }
    p
}

pub fn random_element(d: &DoubleQuiver, rng: &mut ChaCha8Rng, terms: usize, max_len: usize, complex: bool) -> Element {
    let mut e = Element::zero();
    for _ in 0..terms {
        e.add_term(random_path(d, rng, max_len), random_scalar(rng, complex, 3));
    }
    e
}

/// Block matrix representation with `dims[v]` coordinates at vertex `v`.
pub struct BlockRep {
    pub offsets: Vec<usize>,
    pub dims: Vec<usize>,
    pub total: usize,
    pub arrows: Vec<Matrix>,
}

impl BlockRep {
    pub fn random(d: &DoubleQuiver, dims: &[usize], rng: &mut ChaCha8Rng, complex: bool) -> Self {
        let mut offsets = Vec::new();
        let mut total = 0;
        for &n in dims {
            offsets.push(total);
            total += n;
        }
        let arrows = (0..d.arrow_count())
            .map(|a| {
                let l = pathmoment::Letter::new(a, false);
                let (i, j) = (d.letter_origin(l), d.letter_terminal(l));
                let mut m = Matrix::zeros(total, total);
                for r in 0..dims[i] {
                    for c in 0..dims[j] {
                        m[(offsets[i] + r, offsets[j] + c)] = random_scalar(rng, complex, 2);
                    }
                }
                m
            })
            .collect();
        BlockRep { offsets, dims: dims.to_vec(), total, arrows }
    }

    pub fn path(&self, p: &Path) -> Matrix {
        if p.is_trivial() {
            let v = p.origin();
            let mut m = Matrix::zeros(self.total, self.total);
            for r in 0..self.dims[v] {
                m[(self.offsets[v] + r, self.offsets[v] + r)] = Scalar::one();
            }
            return m;
        }
        let mut m = Matrix::identity(self.total);
        for l in p.letters() {
            let a = &self.arrows[l.arrow];
            m = m.mul(&if l.star { a.adjoint() } else { a.clone() });
        }
        m
    }
}

/// A representation with a fixed vector: `L(w) = ξᴴ π(w) ξ`.
pub struct Hom {
    pub rep: BlockRep,
    pub xi: Vec<Scalar>,
}

impl Hom {
    pub fn random(d: &DoubleQuiver, dims: &[usize], rng: &mut ChaCha8Rng, complex: bool) -> Self {
        let rep = BlockRep::random(d, dims, rng, complex);
        let xi = (0..rep.total).map(|_| random_scalar(rng, complex, 2)).collect();
        Hom { rep, xi }
    }

    pub fn value(&self, p: &Path) -> Scalar {
        let v = self.rep.path(p).mul_vec(&self.xi);
        self.xi.iter().zip(&v).map(|(a, b)| &a.conj() * b).sum()
    }

    pub fn functional(&self, alg: &Arc<PathAlgebra>, k: usize, include_trivial: bool) -> TruncatedFunctional {
        let entries: Vec<(Path, Scalar)> =
            alg.basis(2 * k, include_trivial).into_iter().map(|p| (p.clone(), self.value(&p))).collect();
        TruncatedFunctional::new(alg.clone(), k, include_trivial, entries).expect("hermitian by construction")
    }
}

pub fn hom_functional(
    alg: &Arc<PathAlgebra>,
    k: usize,
    include_trivial: bool,
    dims: &[usize],
    rng: &mut ChaCha8Rng,
    complex: bool,
) -> TruncatedFunctional {
    Hom::random(&alg.double, dims, rng, complex).functional(alg, k, include_trivial)
}

/// Random flat functionals of order `k` with their generating `Hom`.
pub fn flat_homs(
    alg: &Arc<PathAlgebra>,
    k: usize,
    include_trivial: bool,
    max_dim: usize,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<(Hom, TruncatedFunctional)> {
    let mut out = Vec::new();
    let n = alg.double.vertex_count();
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=max_dim)).collect();
        let complex = rng.gen_bool(0.5);
        let h = Hom::random(&alg.double, &dims, rng, complex);
        let l = h.functional(alg, k, include_trivial);
        if l.is_flat().unwrap().flat {
            out.push((h, l));
        }
    }
    assert_eq!(out.len(), count, "not enough flat samples");
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
