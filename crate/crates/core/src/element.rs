//! Elements of the path *-algebra.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::quiver::{DoubleQuiver, Letter, Path, PathOrder};
use crate::scalar::Scalar;

/// A finite linear combination of paths. Zero coefficients are never stored,
/// so equality is structural.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Path, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn from_path(p: Path) -> Self {
        Element::term(p, Scalar::one())
    }

    pub fn term(p: Path, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(p, c);
        e
    }

    /// The unit: sum of all trivial paths.
    pub fn unit(d: &DoubleQuiver) -> Self {
        d.trivial_paths().into_iter().map(Element::from_path).fold(Element::zero(), |a, b| &a + &b)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Path, Scalar)>) -> Self {
        let mut e = Element::zero();
        for (p, c) in terms {
            e.add_term(p, c);
        }
        e
    }

    pub fn add_term(&mut self, p: Path, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending default path order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Path, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Path) -> Scalar {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &Path> {
        self.terms.keys()
    }

    /// Largest path length, `None` for the zero element.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Path::len).max()
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect() }
    }

    /// Conjugate-linear anti-automorphism: star every path, conjugate every
    /// coefficient.
    pub fn star(&self) -> Element {
        Element { terms: self.terms.iter().map(|(p, c)| (p.star(), c.conj())).collect() }
    }

    pub fn is_hermitian(&self) -> bool {
        self.star() == *self
    }

    /// Right multiplication by a single path.
    pub fn mul_path(&self, w: &Path) -> Element {
        Element::from_terms(self.terms.iter().filter_map(|(p, c)| p.compose(w).map(|pw| (pw, c.clone()))))
    }

    /// Left multiplication by a single path.
    pub fn path_mul(&self, w: &Path) -> Element {
        Element::from_terms(self.terms.iter().filter_map(|(p, c)| w.compose(p).map(|wp| (wp, c.clone()))))
    }

    /// Order-largest support path with its coefficient.
    pub fn tip(&self, order: &PathOrder) -> Option<(&Path, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub fn tip_path(&self, order: &PathOrder) -> Option<&Path> {
        self.tip(order).map(|(p, _)| p)
    }

    /// Scales so that the tip coefficient is 1.
    pub fn monic(&self, order: &PathOrder) -> Element {
        match self.tip(order) {
            None => Element::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("stored coefficients are nonzero")),
        }
    }

    /// Drops support paths of length greater than `d`.
    pub fn truncate(&self, d: usize) -> Element {
        Element {
            terms: self.terms.iter().filter(|(p, _)| p.len() <= d).map(|(p, c)| (p.clone(), c.clone())).collect(),
        }
    }

    /// Terms sorted descending under `order`.
    pub fn sorted_desc(&self, order: &PathOrder) -> Vec<(&Path, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.compare(b.0, a.0));
        v
    }

    /// Canonical total order on elements: supports compared from the largest
    /// path down, then coefficients.
    pub fn canonical_cmp(&self, other: &Element, order: &PathOrder) -> Ordering {
        let a = self.sorted_desc(order);
        let b = other.sorted_desc(order);
        for (x, y) in a.iter().zip(&b) {
            let c = order.compare(x.0, y.0);
            if c != Ordering::Equal {
                return c;
            }
        }
        let c = a.len().cmp(&b.len());
        if c != Ordering::Equal {
            return c;
        }
        for (x, y) in a.iter().zip(&b) {
            let c = x.1.canonical_cmp(y.1);
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    }

    /// Human readable form, largest term first, e.g. `x x* x - x`.
    pub fn format(&self, d: &DoubleQuiver, order: &PathOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (p, c)) in self.sorted_desc(order).into_iter().enumerate() {
            let name = d.format_path(p);
            let (neg, mag) = if c.is_negative_real() { (true, -c) } else { (false, c.clone()) };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                out.push_str(&name);
            } else if mag.is_real() {
                out.push_str(&format!("{mag} {name}"));
            } else {
                out.push_str(&format!("({mag}) {name}"));
            }
        }
        out
    }
}

impl std::fmt::Debug for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, rhs: &'a Element) -> Element {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, rhs: &'a Element) -> Element {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(p.clone(), -c);
        }
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&Scalar::from_int(-1))
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, rhs: &'a Element) -> Element {
        let mut out = Element::zero();
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                if let Some(pq) = p.compose(q) {
                    out.add_term(pq, a * b);
                }
            }
        }
        out
    }
}

/// Reduced echelon basis of the span of `elems`, with the order-largest
/// path of each element as its pivot (coefficient 1). Sorted by pivot,
/// largest first.
pub fn echelon_basis(elems: &[Element], order: &PathOrder) -> Vec<Element> {
    let mut cols: Vec<Path> = elems.iter().flat_map(|e| e.support().cloned()).collect();
    cols.sort_by(|a, b| order.compare(b, a));
    cols.dedup();
    if cols.is_empty() {
        return Vec::new();
    }
    let rows: Vec<Vec<Scalar>> = elems.iter().map(|e| cols.iter().map(|p| e.coeff(p)).collect()).collect();
    let m = crate::linalg::Matrix::from_rows(rows).expect("rectangular");
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| Element::from_terms(cols.iter().cloned().zip(r.row(i).iter().cloned()))).collect()
}

/// Words of the free *-algebra on the base arrows, with coefficients.
pub type FreePoly = BTreeMap<Vec<Letter>, Scalar>;

/// Square matrix over the free *-algebra, the target of the embedding of a
/// path algebra with `n` vertices into `M_n` of a free algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMatrix {
    n: usize,
    entries: Vec<FreePoly>,
}

impl FreeMatrix {
    pub fn zeros(n: usize) -> Self {
        FreeMatrix { n, entries: vec![FreePoly::new(); n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &FreePoly {
        &self.entries[i * self.n + j]
    }

    fn add_word(&mut self, i: usize, j: usize, w: Vec<Letter>, c: Scalar) {
        let slot = &mut self.entries[i * self.n + j];
        let v = slot.entry(w.clone()).or_default();
        *v += &c;
        if v.is_zero() {
            slot.remove(&w);
        }
    }

    pub fn mul(&self, other: &FreeMatrix) -> FreeMatrix {
        assert_eq!(self.n, other.n);
        let mut out = FreeMatrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                for (u, a) in self.entry(i, k) {
                    for j in 0..self.n {
                        for (v, b) in other.entry(k, j) {
                            let mut w = u.clone();
                            w.extend_from_slice(v);
                            out.add_word(i, j, w, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Transpose with the involution applied entrywise.
    pub fn adjoint(&self) -> FreeMatrix {
        let mut out = FreeMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                for (w, c) in self.entry(i, j) {
                    let ws: Vec<Letter> = w.iter().rev().map(|l| l.flipped()).collect();
                    out.add_word(j, i, ws, c.conj());
                }
            }
        }
        out
    }
}

/// The embedding sending a trivial path `e_i` to `E_ii` and a path from
/// `e_i` to `e_j` to its word times `E_ij`.
pub fn embed_matrix_free(d: &DoubleQuiver, p: &Path) -> FreeMatrix {
    let mut m = FreeMatrix::zeros(d.vertex_count());
    m.add_word(p.origin(), p.terminal(), p.letters().to_vec(), Scalar::one());
    m
}

pub fn embed_element(d: &DoubleQuiver, f: &Element) -> FreeMatrix {
    let mut m = FreeMatrix::zeros(d.vertex_count());
    for (p, c) in f.terms() {
        m.add_word(p.origin(), p.terminal(), p.letters().to_vec(), c.clone());
    }
    m
}
