//! Verification of sum-of-hermitian-squares certificates.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::gns::Representation;
use crate::linalg::{ldl_psd, psd_check, Matrix};
use crate::quiver::Path;
use crate::scalar::Scalar;

/// `weight · g g*` with a positive rational weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSquare {
    pub weight: Scalar,
    pub element: Element,
}

impl WeightedSquare {
    pub fn unit(element: Element) -> Self {
        WeightedSquare { weight: Scalar::one(), element }
    }

    pub fn expand(&self) -> Element {
        (&self.element * &self.element.star()).scale(&self.weight)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Squares(Vec<WeightedSquare>),
    Gram { basis: Vec<Path>, gram: Matrix },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosCertificate {
    pub target: Element,
    pub witness: Witness,
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SosVerdict {
    pub valid: bool,
    /// Explicit squares: the given ones, or those extracted from a passing
    /// Gram witness.
    pub squares: Option<Vec<WeightedSquare>>,
}

impl SosCertificate {
    pub fn verify(&self) -> Result<SosVerdict> {
        match &self.witness {
            Witness::Squares(sq) => {
                let valid = verify_squares(&self.target, sq, self.degree)?;
                Ok(SosVerdict { valid, squares: valid.then(|| sq.clone()) })
            }
            Witness::Gram { basis, gram } => verify_gram(&self.target, basis, gram, self.degree),
        }
    }
}

fn check_degree(e: &Element, d: Option<usize>) -> Result<()> {
    match (d, e.degree()) {
        (Some(d), Some(deg)) if deg > d => Err(Error::invalid(format!("square of degree {deg} exceeds the bound {d}"))),
        _ => Ok(()),
    }
}

/// `q = Σ λ_i g_i g_i*` exactly.
pub fn verify_squares(q: &Element, squares: &[WeightedSquare], d: Option<usize>) -> Result<bool> {
    let mut sum = Element::zero();
    for s in squares {
        check_degree(&s.element, d)?;
        if !s.weight.is_positive_real() {
            return Err(Error::invalid(format!("square weight {} is not positive", s.weight)));
        }
        sum = &sum + &s.expand();
    }
    Ok(sum == *q)
}

/// `g` hermitian PSD and `Σ g(i,j) p_i p_j* = q`. A passing witness is
/// converted to weighted squares through an exact LDLᴴ factorisation.
pub fn verify_gram(q: &Element, basis: &[Path], g: &Matrix, d: Option<usize>) -> Result<SosVerdict> {
    if g.rows() != basis.len() || g.cols() != basis.len() {
        return Err(Error::invalid("gram size does not match the basis"));
    }
    if let Some(d) = d {
        if let Some(p) = basis.iter().find(|p| p.len() > d) {
            return Err(Error::invalid(format!("basis path of length {} exceeds the bound {d}", p.len())));
        }
    }
    if !g.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let fail = SosVerdict { valid: false, squares: None };
    let Some(pivots) = ldl_psd(g)? else {
        return Ok(fail);
    };
    let mut sum = Element::zero();
    for (i, p) in basis.iter().enumerate() {
        for (j, r) in basis.iter().enumerate() {
            if g[(i, j)].is_zero() {
                continue;
            }
            if let Some(pr) = p.compose(&r.star()) {
                sum.add_term(pr, g[(i, j)].clone());
            }
        }
    }
    if sum != *q {
        return Ok(fail);
    }
    let squares: Vec<WeightedSquare> = pivots
        .into_iter()
        .map(|pv| WeightedSquare {
            weight: pv.weight,
            element: Element::from_terms(basis.iter().cloned().zip(pv.vector)),
        })
        .collect();
    if !verify_squares(q, &squares, None)? {
        return Err(Error::invariant("squares extracted from the gram witness do not sum to the target"));
    }
    Ok(SosVerdict { valid: true, squares: Some(squares) })
}

/// The form `(u, v) ↦ <ρ(q) u, v>` is positive semidefinite.
pub fn positive_in(rep: &Representation, q: &Element) -> Result<bool> {
    let f = rep.element_matrix(q).transpose().mul(&rep.gram);
    psd_check(&f)
}
