//! Right Gröbner bases of right ideals and normal forms.

use std::cmp::Ordering;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::moment::TruncatedFunctional;
use crate::quiver::{Path, PathOrder};

/// `Some(b)` with `m = t·b`, where `b` is trivial when `m = t`.
pub fn left_divides(t: &Path, m: &Path) -> Option<Path> {
    m.strip_prefix(t)
}

/// One rewriting step `target → target - c·g·cofactor` with `Tip(g) = by`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub target: Path,
    pub by: Path,
    pub cofactor: Path,
}

/// Picks the reducer for `m`: longest tip that is a prefix, ties broken by
/// the canonical element order.
fn reducer<'a>(m: &Path, basis: &'a [Element], order: &PathOrder) -> Option<(&'a Element, Path, Path)> {
    let mut best: Option<(&Element, Path, Path)> = None;
    for g in basis {
        let t = g.tip_path(order).expect("nonzero basis element");
        let Some(b) = left_divides(t, m) else { continue };
        let better = match &best {
            None => true,
            Some((bg, bt, _)) => match t.len().cmp(&bt.len()) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => g.canonical_cmp(bg, order) == Ordering::Less,
            },
        };
        if better {
            best = Some((g, t.clone(), b));
        }
    }
    best
}

/// Total reduction of `h` by monic `basis`: rewrites the largest reducible
/// support path until none is left. Events are appended to `trace`.
pub fn total_reduce(
    h: &Element,
    basis: &[Element],
    order: &PathOrder,
    mut trace: Option<&mut Vec<Reduction>>,
) -> Element {
    let mut h = h.clone();
    loop {
        let step = h
            .sorted_desc(order)
            .into_iter()
            .find_map(|(m, c)| reducer(m, basis, order).map(|r| (m.clone(), c.clone(), r)));
        let Some((m, c, (g, tip, cof))) = step else {
            return h;
        };
        h = &h - &g.mul_path(&cof).scale(&c);
        if let Some(t) = trace.as_deref_mut() {
            t.push(Reduction { target: m, by: tip, cofactor: cof });
        }
    }
}

/// Monic generators whose tips pairwise do not left-divide each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightGroebnerBasis {
    elements: Vec<Element>,
    order: PathOrder,
    trace: Vec<Reduction>,
}

impl RightGroebnerBasis {
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> &PathOrder {
        &self.order
    }

    pub fn trace(&self) -> &[Reduction] {
        &self.trace
    }

    pub fn tips(&self) -> Vec<&Path> {
        self.elements.iter().map(|g| g.tip_path(&self.order).expect("nonzero")).collect()
    }

    pub fn is_reducible(&self, p: &Path) -> bool {
        self.tips().into_iter().any(|t| left_divides(t, p).is_some())
    }

    pub fn normal_form(&self, f: &Element) -> Element {
        total_reduce(f, &self.elements, &self.order, None)
    }

    /// Wraps elements already known to form a basis (monic, tips pairwise
    /// non-dividing).
    pub fn from_elements(elements: Vec<Element>, order: PathOrder) -> Result<Self> {
        let elements: Vec<Element> = elements.into_iter().filter(|e| !e.is_zero()).map(|e| e.monic(&order)).collect();
        let tips: Vec<&Path> = elements.iter().map(|g| g.tip_path(&order).unwrap()).collect();
        for (i, a) in tips.iter().enumerate() {
            for (j, b) in tips.iter().enumerate() {
                if i != j && left_divides(a, b).is_some() {
                    return Err(Error::invalid("basis tips are not pairwise non-dividing"));
                }
            }
        }
        Ok(RightGroebnerBasis { elements, order, trace: Vec::new() })
    }
}

/// Monic, nonzero, deduplicated, canonically sorted.
fn normalize(gens: &[Element], order: &PathOrder) -> Vec<Element> {
    let mut v: Vec<Element> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic(order)).collect();
    v.sort_by(|a, b| a.canonical_cmp(b, order));
    v.dedup();
    v
}

/// Iterates: keep one element per tip that no other tip properly
/// left-divides, totally reduce the rest against the kept ones, repeat with
/// the nonzero remainders until nothing is reduced.
pub fn right_groebner(gens: &[Element], order: &PathOrder) -> RightGroebnerBasis {
    let mut h = normalize(gens, order);
    let mut trace = Vec::new();
    loop {
        let tips: Vec<Path> = h.iter().map(|g| g.tip_path(order).unwrap().clone()).collect();
        let selected = |t: &Path| !tips.iter().any(|s| s != t && left_divides(s, t).is_some());
        let mut kept: Vec<Element> = Vec::new();
        let mut rest: Vec<Element> = Vec::new();
        // h is canonically sorted, so the first element with a tip is the smallest
        for (g, t) in h.iter().zip(&tips) {
            if selected(t) && !kept.iter().any(|k| k.tip_path(order) == Some(t)) {
                kept.push(g.clone());
            } else {
                rest.push(g.clone());
            }
        }
        if rest.is_empty() {
            kept.sort_by(|a, b| order.compare(a.tip_path(order).unwrap(), b.tip_path(order).unwrap()));
            return RightGroebnerBasis { elements: kept, order: order.clone(), trace };
        }
        let mut next = kept.clone();
        for r in &rest {
            let red = total_reduce(r, &kept, order, Some(&mut trace));
            if !red.is_zero() {
                next.push(red);
            }
        }
        h = normalize(&next, order);
    }
}

/// Gröbner basis of the right ideal generated by the kernel of a flat
/// functional, checked to lie in the kernel on the window.
pub fn kernel_groebner(l: &TruncatedFunctional) -> Result<RightGroebnerBasis> {
    let report = l.is_flat()?;
    if !report.flat {
        return Err(Error::NotFlat(format!("rank {} vs {}", report.rank_k, report.rank_km1)));
    }
    let order = &l.algebra().order;
    let gb = right_groebner(&l.kernel_basis()?, order);
    let window = l.basis(l.order());
    for g in gb.elements() {
        if g.degree().unwrap_or(0) > l.order() {
            continue;
        }
        for v in &window {
            if !l.riesz_eval(&g.mul_path(&v.star()))?.is_zero() {
                return Err(Error::invariant(format!(
                    "basis element {} is not in the kernel",
                    g.format(&l.algebra().double, order)
                )));
            }
        }
    }
    Ok(gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{PathAlgebra, Quiver};
    use crate::scalar::Scalar;

    fn loop1() -> PathAlgebra {
        PathAlgebra::new(Quiver::new(&["e"], &[("x", "e", "e")])).unwrap()
    }

    fn el(a: &PathAlgebra, terms: &[(&str, i64)]) -> Element {
        Element::from_terms(terms.iter().map(|(p, c)| (a.path(p).unwrap(), Scalar::from_int(*c))))
    }

    #[test]
    fn left_divides_examples() {
        let a = loop1();
        let p = |s: &str| a.path(s).unwrap();
        assert_eq!(left_divides(&p("x x"), &p("x x x*")), Some(p("x*")));
        assert_eq!(left_divides(&p("x*"), &p("x x*")), None);
        assert_eq!(left_divides(&p("x x*"), &p("x x*")), Some(p("e:e")));
    }

    #[test]
    fn total_reduce_examples() {
        let a = loop1();
        let o = &a.order;
        let b = [el(&a, &[("x* x* x*", 1)])];
        assert!(total_reduce(&el(&a, &[("x* x* x* x", 1)]), &b, o, None).is_zero());
        let b = [el(&a, &[("x x", 1), ("e:e", -1)])];
        assert_eq!(total_reduce(&el(&a, &[("x x x", 1)]), &b, o, None), el(&a, &[("x", 1)]));
        let h = el(&a, &[("x x*", 3)]);
        assert_eq!(total_reduce(&h, &[], o, None), h);
    }

    #[test]
    fn groebner_examples() {
        let a = loop1();
        let o = &a.order;
        let gb = right_groebner(&[el(&a, &[("x x", 1)]), el(&a, &[("x x x*", 1), ("x", -1)])], o);
        assert_eq!(gb.elements(), [el(&a, &[("x", 1)])]);
        let gb = right_groebner(&[el(&a, &[("x", 2)])], o);
        assert_eq!(gb.elements(), [el(&a, &[("x", 1)])]);
        assert!(right_groebner(&[Element::zero()], o).elements().is_empty());
    }

    #[test]
    fn equal_tips_do_not_stall() {
        let a = loop1();
        let gb = right_groebner(&[el(&a, &[("x x", 1), ("x", 1)]), el(&a, &[("x x", 1), ("x*", 1)])], &a.order);
        assert_eq!(gb.elements().len(), 2);
        for g in gb.elements() {
            assert_eq!(g.degree(), Some(if g.coeff(&a.path("x x").unwrap()).is_zero() { 1 } else { 2 }));
        }
    }
}
