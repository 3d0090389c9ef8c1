//! JSON file formats.

use std::collections::BTreeMap;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::gns::Representation;
use crate::groebner::{right_groebner, RightGroebnerBasis};
use crate::linalg::Matrix;
use crate::moment::TruncatedFunctional;
use crate::quiver::{DoubleQuiver, Path, PathAlgebra, PathOrder, Quiver};
use crate::scalar::Scalar;
use crate::sos::{SosCertificate, WeightedSquare, Witness};

/// A quiver given inline or as a file path relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuiverRef {
    File(String),
    Inline(Quiver),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFile {
    pub vertices: Vec<String>,
    pub letters: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub path: String,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub path: String,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub quiver: QuiverRef,
    pub k: usize,
    #[serde(default = "default_true")]
    pub include_trivial: bool,
    #[serde(default)]
    pub entries: Vec<EntryJson>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorsJson {
    pub quiver: QuiverRef,
    pub generators: Vec<ElementJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientJson {
    pub quiver: QuiverRef,
    pub groebner: Vec<ElementJson>,
    pub basis: Vec<String>,
    pub gram: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub quiver: QuiverRef,
    pub basis: Vec<String>,
    pub gram: Vec<Vec<Scalar>>,
    pub arrows: BTreeMap<String, Vec<Vec<Scalar>>>,
    pub vertices: BTreeMap<String, Vec<Vec<Scalar>>>,
    pub cyclic: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Scalar>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub quiver: QuiverRef,
    pub target: ElementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squares: Option<Vec<SquareJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

/// Reads and parses a JSON file, naming the file, line and column on failure.
pub fn read_json<T: DeserializeOwned>(file: &FsPath) -> Result<T> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::invalid(format!("{}: {e}", file.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim();
        Error::parse(format!("{}:{}:{}: {e} near `{line}`", file.display(), e.line(), e.column()))
    })
}

pub fn to_json_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn base_dir(file: &FsPath) -> PathBuf {
    file.parent().map(FsPath::to_path_buf).unwrap_or_default()
}

/// Loads a quiver reference and builds the algebra, with an optional order.
pub fn load_algebra(q: &QuiverRef, dir: &FsPath, order: Option<&OrderFile>) -> Result<Arc<PathAlgebra>> {
    let quiver = match q {
        QuiverRef::Inline(q) => q.clone(),
        QuiverRef::File(f) => read_json(&dir.join(f))?,
    };
    let double = DoubleQuiver::build(quiver)?;
    let ord = match order {
        Some(o) => PathOrder::from_names(&double, &o.vertices, &o.letters)?,
        None => PathOrder::default_for(&double),
    };
    Ok(Arc::new(PathAlgebra::with_order(double, ord)))
}

pub fn load_order(file: &FsPath) -> Result<OrderFile> {
    read_json(file)
}

/// Parses a path, or `1` for the unit.
pub fn parse_element_path(alg: &PathAlgebra, text: &str) -> Result<Element> {
    if text.trim() == "1" {
        return Ok(Element::unit(&alg.double));
    }
    Ok(Element::from_path(alg.path(text)?))
}

fn terms_to_element(alg: &PathAlgebra, terms: &[TermJson]) -> Result<Element> {
    let mut e = Element::zero();
    for t in terms {
        e = &e + &parse_element_path(alg, &t.path)?.scale(&t.coeff);
    }
    Ok(e)
}

pub fn element_from_json(alg: &PathAlgebra, j: &ElementJson) -> Result<Element> {
    terms_to_element(alg, &j.terms)
}

fn element_terms(alg: &PathAlgebra, e: &Element) -> Vec<TermJson> {
    e.sorted_desc(&alg.order).into_iter().map(|(p, c)| TermJson { path: alg.fmt_path(p), coeff: c.clone() }).collect()
}

pub fn element_to_json(alg: &PathAlgebra, e: &Element) -> ElementJson {
    ElementJson { terms: element_terms(alg, e) }
}

fn matrix_from_json(rows: &[Vec<Scalar>]) -> Result<Matrix> {
    Matrix::from_rows(rows.to_vec())
}

fn matrix_to_json(m: &Matrix) -> Vec<Vec<Scalar>> {
    m.to_rows()
}

fn parse_paths(alg: &PathAlgebra, names: &[String]) -> Result<Vec<Path>> {
    names.iter().map(|n| alg.path(n)).collect()
}

pub fn functional_from_json(
    j: &FunctionalJson,
    dir: &FsPath,
    order: Option<&OrderFile>,
) -> Result<TruncatedFunctional> {
    let alg = load_algebra(&j.quiver, dir, order)?;
    let entries = j.entries.iter().map(|e| Ok((alg.path(&e.path)?, e.value.clone()))).collect::<Result<Vec<_>>>()?;
    TruncatedFunctional::new(alg, j.k, j.include_trivial, entries)
}

pub fn load_functional(file: &FsPath, order: Option<&OrderFile>) -> Result<TruncatedFunctional> {
    let j: FunctionalJson = read_json(file)?;
    functional_from_json(&j, &base_dir(file), order)
}

pub fn functional_to_json(l: &TruncatedFunctional, quiver: QuiverRef) -> FunctionalJson {
    let alg = l.algebra();
    let mut entries: Vec<(&Path, &Scalar)> = l.values().iter().collect();
    entries.sort_by(|a, b| alg.order.compare(a.0, b.0));
    FunctionalJson {
        quiver,
        k: l.order(),
        include_trivial: l.include_trivial(),
        entries: entries.into_iter().map(|(p, v)| EntryJson { path: alg.fmt_path(p), value: v.clone() }).collect(),
    }
}

pub fn load_generators(file: &FsPath, order: Option<&OrderFile>) -> Result<(Arc<PathAlgebra>, Vec<Element>)> {
    let j: GeneratorsJson = read_json(file)?;
    let alg = load_algebra(&j.quiver, &base_dir(file), order)?;
    let gens = j.generators.iter().map(|g| element_from_json(&alg, g)).collect::<Result<Vec<_>>>()?;
    Ok((alg, gens))
}

pub fn generators_to_json(alg: &PathAlgebra, gens: &[Element], quiver: QuiverRef) -> GeneratorsJson {
    GeneratorsJson { quiver, generators: gens.iter().map(|g| element_to_json(alg, g)).collect() }
}

/// A quotient description: the Gröbner basis is recomputed from the listed
/// elements, so they need only generate the ideal.
pub struct Quotient {
    pub algebra: Arc<PathAlgebra>,
    pub groebner: RightGroebnerBasis,
    pub basis: Vec<Path>,
    pub gram: Matrix,
}

pub fn load_quotient(file: &FsPath, order: Option<&OrderFile>) -> Result<Quotient> {
    let j: QuotientJson = read_json(file)?;
    let alg = load_algebra(&j.quiver, &base_dir(file), order)?;
    let gens = j.groebner.iter().map(|g| element_from_json(&alg, g)).collect::<Result<Vec<_>>>()?;
    let groebner = right_groebner(&gens, &alg.order);
    Ok(Quotient { basis: parse_paths(&alg, &j.basis)?, gram: matrix_from_json(&j.gram)?, algebra: alg, groebner })
}

pub fn representation_from_json(
    j: &RepresentationJson,
    dir: &FsPath,
    order: Option<&OrderFile>,
) -> Result<Representation> {
    let alg = load_algebra(&j.quiver, dir, order)?;
    let basis = parse_paths(&alg, &j.basis)?;
    let n = basis.len();
    let sized = |m: Matrix, what: &str| -> Result<Matrix> {
        if m.rows() == n && m.cols() == n {
            Ok(m)
        } else {
            Err(Error::invalid(format!("{what} matrix is not {n}×{n}")))
        }
    };
    let empty = |rows: &[Vec<Scalar>]| -> Result<Matrix> {
        if rows.is_empty() {
            Ok(Matrix::zeros(0, 0))
        } else {
            matrix_from_json(rows)
        }
    };
    let gram = sized(empty(&j.gram)?, "gram")?;
    let mut arrows = BTreeMap::new();
    for l in alg.double.letters() {
        let name = alg.double.letter_name(l);
        let rows = j.arrows.get(&name).ok_or_else(|| Error::invalid(format!("missing matrix for arrow {name}")))?;
        arrows.insert(l, sized(empty(rows)?, &name)?);
    }
    if let Some(extra) = j.arrows.keys().find(|k| alg.double.letter_by_name(k).is_none()) {
        return Err(Error::invalid(format!("unknown arrow {extra:?}")));
    }
    let mut vertices = Vec::new();
    for v in 0..alg.double.vertex_count() {
        let name = alg.double.vertex_name(v);
        let rows = j.vertices.get(name).ok_or_else(|| Error::invalid(format!("missing matrix for vertex {name}")))?;
        vertices.push(sized(empty(rows)?, name)?);
    }
    if let Some(c) = &j.cyclic {
        if c.len() != n {
            return Err(Error::invalid("cyclic vector has the wrong length"));
        }
    }
    Ok(Representation { algebra: alg, basis, gram, arrows, vertices, cyclic: j.cyclic.clone() })
}

pub fn load_representation(file: &FsPath, order: Option<&OrderFile>) -> Result<Representation> {
    let j: RepresentationJson = read_json(file)?;
    representation_from_json(&j, &base_dir(file), order)
}

pub fn representation_to_json(r: &Representation, quiver: QuiverRef) -> RepresentationJson {
    let d = &r.algebra.double;
    RepresentationJson {
        quiver,
        basis: r.basis.iter().map(|p| d.format_path(p)).collect(),
        gram: matrix_to_json(&r.gram),
        arrows: r.arrows.iter().map(|(l, m)| (d.letter_name(*l), matrix_to_json(m))).collect(),
        vertices: r
            .vertices
            .iter()
            .enumerate()
            .map(|(v, m)| (d.vertex_name(v).to_string(), matrix_to_json(m)))
            .collect(),
        cyclic: r.cyclic.clone(),
    }
}

pub fn certificate_from_json(
    j: &CertificateJson,
    dir: &FsPath,
    order: Option<&OrderFile>,
) -> Result<(Arc<PathAlgebra>, SosCertificate)> {
    let alg = load_algebra(&j.quiver, dir, order)?;
    let target = element_from_json(&alg, &j.target)?;
    let witness = match (&j.squares, &j.basis, &j.gram) {
        (Some(sq), None, None) => Witness::Squares(
            sq.iter()
                .map(|s| {
                    Ok(WeightedSquare {
                        weight: s.weight.clone().unwrap_or_else(Scalar::one),
                        element: terms_to_element(&alg, &s.terms)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        (None, Some(b), Some(g)) => Witness::Gram { basis: parse_paths(&alg, b)?, gram: matrix_from_json(g)? },
        _ => return Err(Error::invalid("certificate needs either `squares` or both `basis` and `gram`")),
    };
    Ok((alg, SosCertificate { target, witness, degree: j.degree }))
}

pub fn load_certificate(file: &FsPath, order: Option<&OrderFile>) -> Result<(Arc<PathAlgebra>, SosCertificate)> {
    let j: CertificateJson = read_json(file)?;
    certificate_from_json(&j, &base_dir(file), order)
}

pub fn squares_to_json(alg: &PathAlgebra, squares: &[WeightedSquare]) -> Vec<SquareJson> {
    squares
        .iter()
        .map(|s| SquareJson {
            weight: (!s.weight.is_one()).then(|| s.weight.clone()),
            terms: element_terms(alg, &s.element),
        })
        .collect()
}

pub fn certificate_to_json(alg: &PathAlgebra, c: &SosCertificate, quiver: QuiverRef) -> CertificateJson {
    let (squares, basis, gram) = match &c.witness {
        Witness::Squares(sq) => (Some(squares_to_json(alg, sq)), None, None),
        Witness::Gram { basis, gram } => {
            (None, Some(basis.iter().map(|p| alg.fmt_path(p)).collect()), Some(matrix_to_json(gram)))
        }
    };
    CertificateJson { quiver, target: element_to_json(alg, &c.target), squares, basis, gram, degree: c.degree }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_ref() -> QuiverRef {
        QuiverRef::Inline(Quiver::new(&["e1", "e2"], &[("x", "e1", "e2")]))
    }

    #[test]
    fn functional_round_trip() {
        let text = r#"{"quiver":{"vertices":["e1","e2"],"arrows":[{"name":"x","from":"e1","to":"e2"}]},
            "k":2,"include_trivial":false,
            "entries":[{"path":"x x*","value":"1"},{"path":"x x* x","value":"1/2+i"}]}"#;
        let j: FunctionalJson = serde_json::from_str(text).unwrap();
        let l = functional_from_json(&j, FsPath::new("."), None).unwrap();
        let back = functional_to_json(&l, a2_ref());
        let again = functional_from_json(&back, FsPath::new("."), None).unwrap();
        assert_eq!(l, again);
        assert_eq!(l.value(&l.algebra().path("x* x x*").unwrap()).unwrap(), "1/2-i".parse().unwrap());
    }

    #[test]
    fn element_unit_token() {
        let alg = load_algebra(&a2_ref(), FsPath::new("."), None).unwrap();
        let j: ElementJson =
            serde_json::from_str(r#"{"terms":[{"path":"1","coeff":"2"},{"path":"x","coeff":-1}]}"#).unwrap();
        let e = element_from_json(&alg, &j).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(element_from_json(&alg, &element_to_json(&alg, &e)).unwrap(), e);
        let bad: ElementJson = serde_json::from_str(r#"{"terms":[{"path":"y","coeff":"1"}]}"#).unwrap();
        assert!(matches!(element_from_json(&alg, &bad), Err(Error::Parse(m)) if m.contains("\"y\"")));
    }
}
