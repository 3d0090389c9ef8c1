//! Quivers, their doubles, paths and the degree-lexicographic path order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// A finite quiver as declared by the user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Self {
        Quiver {
            vertices: vertices.iter().map(|v| v.to_string()).collect(),
            arrows: arrows
                .iter()
                .map(|(n, f, t)| Arrow { name: n.to_string(), from: f.to_string(), to: t.to_string() })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for name in self.vertices.iter().chain(self.arrows.iter().map(|a| &a.name)) {
            if name.is_empty()
                || name == "1"
                || name.ends_with('*')
                || name.contains(char::is_whitespace)
                || name.starts_with("e:")
            {
                return Err(Error::invalid(format!("illegal quiver name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate quiver name {name:?}")));
            }
        }
        for a in &self.arrows {
            for end in [&a.from, &a.to] {
                if !self.vertices.contains(end) {
                    return Err(Error::invalid(format!("arrow {:?} refers to undeclared vertex {end:?}", a.name)));
                }
            }
        }
        Ok(())
    }
}

/// One letter of the double quiver: a base arrow or its star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub arrow: usize,
    pub star: bool,
}

impl Letter {
    pub fn new(arrow: usize, star: bool) -> Self {
        Letter { arrow, star }
    }

    pub fn flipped(self) -> Self {
        Letter { arrow: self.arrow, star: !self.star }
    }
}

/// The double Γ* of a quiver: every arrow `b: e1 → e2` gains `b*: e2 → e1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleQuiver {
    base: Quiver,
    origin: Vec<VertexId>,
    terminal: Vec<VertexId>,
}

impl DoubleQuiver {
    pub fn build(q: Quiver) -> Result<Self> {
        q.validate()?;
        let idx = |v: &str| q.vertices.iter().position(|x| x == v).expect("validated");
        let origin = q.arrows.iter().map(|a| idx(&a.from)).collect();
        let terminal = q.arrows.iter().map(|a| idx(&a.to)).collect();
        Ok(DoubleQuiver { base: q, origin, terminal })
    }

    pub fn base(&self) -> &Quiver {
        &self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.base.arrows.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.base.vertices[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.base.vertices.iter().position(|v| v == name)
    }

    /// Letters of the double in default order: `b1 < b1* < b2 < b2* < …`.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.arrow_count()).flat_map(|a| [Letter::new(a, false), Letter::new(a, true)]).collect()
    }

    pub fn letter_origin(&self, l: Letter) -> VertexId {
        if l.star {
            self.terminal[l.arrow]
        } else {
            self.origin[l.arrow]
        }
    }

    pub fn letter_terminal(&self, l: Letter) -> VertexId {
        if l.star {
            self.origin[l.arrow]
        } else {
            self.terminal[l.arrow]
        }
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let base = &self.base.arrows[l.arrow].name;
        if l.star {
            format!("{base}*")
        } else {
            base.clone()
        }
    }

    pub fn letter_by_name(&self, name: &str) -> Option<Letter> {
        let (base, star) = match name.strip_suffix('*') {
            Some(b) => (b, true),
            None => (name, false),
        };
        self.base.arrows.iter().position(|a| a.name == base).map(|i| Letter::new(i, star))
    }

    pub fn letter_path(&self, l: Letter) -> Path {
        Path { start: self.letter_origin(l), end: self.letter_terminal(l), letters: vec![l] }
    }

    pub fn trivial_paths(&self) -> Vec<Path> {
        (0..self.vertex_count()).map(Path::trivial).collect()
    }

    /// Builds a path from letters, or `None` if consecutive letters do not
    /// compose.
    pub fn path_from_letters(&self, letters: &[Letter]) -> Option<Path> {
        let first = letters.first()?;
        for w in letters.windows(2) {
            if self.letter_terminal(w[0]) != self.letter_origin(w[1]) {
                return None;
            }
        }
        Some(Path {
            start: self.letter_origin(*first),
            end: self.letter_terminal(*letters.last().unwrap()),
            letters: letters.to_vec(),
        })
    }

    /// Parses whitespace separated tokens: arrow names with optional `*`,
    /// or `e:NAME` for a trivial path.
    pub fn parse_path(&self, text: &str) -> Result<Path> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        match toks.as_slice() {
            [] => Err(Error::parse("empty path")),
            [t] if t.starts_with("e:") => {
                let v = self.vertex_id(&t[2..]).ok_or_else(|| Error::parse(format!("unknown vertex in {t:?}")))?;
                Ok(Path::trivial(v))
            }
            _ => {
                let letters = toks
                    .iter()
                    .map(|t| {
                        self.letter_by_name(t)
                            .ok_or_else(|| Error::parse(format!("unknown arrow token {t:?} in path {text:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.path_from_letters(&letters).ok_or_else(|| Error::parse(format!("path {text:?} is not composable")))
            }
        }
    }

    pub fn format_path(&self, p: &Path) -> String {
        if p.is_trivial() {
            return format!("e:{}", self.vertex_name(p.start));
        }
        p.letters.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    /// All paths of length ≤ `max_len` (≥ 1 unless `include_trivial`),
    /// strictly increasing under `order`.
    pub fn enumerate_basis(&self, order: &PathOrder, max_len: usize, include_trivial: bool) -> Vec<Path> {
        let mut out: Vec<Path> = Vec::new();
        if include_trivial {
            out.extend(self.trivial_paths());
        }
        let mut layer: Vec<Path> = self.letters().into_iter().map(|l| self.letter_path(l)).collect();
        for len in 1..=max_len {
            if len > 1 {
                layer = layer
                    .iter()
                    .flat_map(|p| {
                        self.letters().into_iter().filter(move |&l| self.letter_origin(l) == p.end).map(move |l| {
                            let mut letters = p.letters.clone();
                            letters.push(l);
                            Path { start: p.start, end: self.letter_terminal(l), letters }
                        })
                    })
                    .collect();
            }
            out.extend(layer.iter().cloned());
        }
        out.sort_by(|a, b| order.compare(a, b));
        out
    }

    /// Paths of length exactly `len` (no trivial paths unless `len == 0`).
    pub fn paths_of_length(&self, order: &PathOrder, len: usize) -> Vec<Path> {
        self.enumerate_basis(order, len, len == 0).into_iter().filter(|p| p.len() == len).collect()
    }
}

/// A path of the double quiver: a trivial path at a vertex, or a composable
/// nonempty word of letters. The endpoints are cached so that composition
/// needs no quiver lookup.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Path {
    start: VertexId,
    end: VertexId,
    letters: Vec<Letter>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path { start: v, end: v, letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn origin(&self) -> VertexId {
        self.start
    }

    pub fn terminal(&self) -> VertexId {
        self.end
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Concatenation, or `None` (the zero of the path semigroup) when the
    /// terminal of `self` differs from the origin of `other`.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.end != other.start {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Some(Path { start: self.start, end: other.end, letters })
    }

    /// The involution: reverse and star every letter.
    pub fn star(&self) -> Path {
        Path { start: self.end, end: self.start, letters: self.letters.iter().rev().map(|l| l.flipped()).collect() }
    }

    /// If `self = prefix · b`, returns `b` (trivial at the terminal when
    /// `self == prefix`).
    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        if prefix.is_trivial() {
            return (prefix.start == self.start).then(|| self.clone());
        }
        if !self.letters.starts_with(&prefix.letters) {
            return None;
        }
        let rest = &self.letters[prefix.len()..];
        Some(Path { start: prefix.end, end: self.end, letters: rest.to_vec() })
    }
}

impl DoubleQuiver {
    /// Splits `p` after `i` letters into a composable pair.
    pub fn split(&self, p: &Path, i: usize) -> (Path, Path) {
        assert!(i <= p.len());
        let mid = if i == 0 { p.origin() } else { self.letter_terminal(p.letters()[i - 1]) };
        let left = if i == 0 {
            Path::trivial(mid)
        } else {
            Path { start: p.origin(), end: mid, letters: p.letters()[..i].to_vec() }
        };
        let right = if i == p.len() {
            Path::trivial(mid)
        } else {
            Path { start: mid, end: p.terminal(), letters: p.letters()[i..].to_vec() }
        };
        (left, right)
    }
}

/// Default total order on paths: shorter first; equal lengths letter by
/// letter (`b < b*`, arrows by declaration); trivial paths by vertex index.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.start.cmp(&other.start))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "e{}", self.start);
        }
        let s: Vec<String> =
            self.letters.iter().map(|l| format!("{}{}", l.arrow, if l.star { "*" } else { "" })).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

/// Left degree-lexicographic order driven by ranks of vertices and letters.
/// Vertices sit below every arrow because length dominates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathOrder {
    vertex_rank: Vec<usize>,
    letter_rank: BTreeMap<Letter, usize>,
}

impl PathOrder {
    pub fn default_for(d: &DoubleQuiver) -> Self {
        PathOrder {
            vertex_rank: (0..d.vertex_count()).collect(),
            letter_rank: d.letters().into_iter().enumerate().map(|(i, l)| (l, i)).collect(),
        }
    }

    /// Order from explicit lists of vertex names and letter names, lowest
    /// first. Each list must be a permutation of the quiver's names.
    pub fn from_names(d: &DoubleQuiver, vertices: &[String], letters: &[String]) -> Result<Self> {
        let mut vertex_rank = vec![usize::MAX; d.vertex_count()];
        for (r, name) in vertices.iter().enumerate() {
            let v = d.vertex_id(name).ok_or_else(|| Error::invalid(format!("order names unknown vertex {name:?}")))?;
            if vertex_rank[v] != usize::MAX {
                return Err(Error::invalid(format!("vertex {name:?} listed twice in order")));
            }
            vertex_rank[v] = r;
        }
        if vertex_rank.contains(&usize::MAX) {
            return Err(Error::invalid("order does not list every vertex"));
        }
        let mut letter_rank = BTreeMap::new();
        for (r, name) in letters.iter().enumerate() {
            let l =
                d.letter_by_name(name).ok_or_else(|| Error::invalid(format!("order names unknown arrow {name:?}")))?;
            if letter_rank.insert(l, r).is_some() {
                return Err(Error::invalid(format!("arrow {name:?} listed twice in order")));
            }
        }
        if letter_rank.len() != 2 * d.arrow_count() {
            return Err(Error::invalid("order does not list every arrow of the double"));
        }
        Ok(PathOrder { vertex_rank, letter_rank })
    }

    pub fn compare(&self, p: &Path, q: &Path) -> Ordering {
        p.len().cmp(&q.len()).then_with(|| {
            if p.is_trivial() {
                return self.vertex_rank[p.origin()].cmp(&self.vertex_rank[q.origin()]);
            }
            for (a, b) in p.letters().iter().zip(q.letters()) {
                let c = self.letter_rank[a].cmp(&self.letter_rank[b]);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }

    pub fn max<'a>(&self, paths: impl IntoIterator<Item = &'a Path>) -> Option<&'a Path> {
        paths.into_iter().max_by(|a, b| self.compare(a, b))
    }

    /// `b1 > b2` implies `b1 b3 > b2 b3` when both products are nonzero.
    pub fn a1_holds(&self, b1: &Path, b2: &Path, b3: &Path) -> bool {
        match (b1.compose(b3), b2.compose(b3)) {
            (Some(l), Some(r)) if self.compare(b1, b2) == Ordering::Greater => {
                self.compare(&l, &r) == Ordering::Greater
            }
            _ => true,
        }
    }

    /// `b1 > b2` implies `b3 b1 > b3 b2` when both products are nonzero.
    pub fn a2_holds(&self, b1: &Path, b2: &Path, b3: &Path) -> bool {
        match (b3.compose(b1), b3.compose(b2)) {
            (Some(l), Some(r)) if self.compare(b1, b2) == Ordering::Greater => {
                self.compare(&l, &r) == Ordering::Greater
            }
            _ => true,
        }
    }

    /// `b2 b3 b4 ≥ b3` when the product is nonzero.
    pub fn a3_holds(&self, b2: &Path, b3: &Path, b4: &Path) -> bool {
        match b2.compose(b3).and_then(|p| p.compose(b4)) {
            Some(p) => self.compare(&p, b3) != Ordering::Less,
            None => true,
        }
    }
}

/// Quiver double plus the chosen admissible order: the context every
/// algebraic computation runs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathAlgebra {
    pub double: DoubleQuiver,
    pub order: PathOrder,
}

impl PathAlgebra {
    pub fn new(q: Quiver) -> Result<Self> {
        let double = DoubleQuiver::build(q)?;
        let order = PathOrder::default_for(&double);
        Ok(PathAlgebra { double, order })
    }

    pub fn with_order(double: DoubleQuiver, order: PathOrder) -> Self {
        PathAlgebra { double, order }
    }

    pub fn basis(&self, max_len: usize, include_trivial: bool) -> Vec<Path> {
        self.double.enumerate_basis(&self.order, max_len, include_trivial)
    }

    pub fn path(&self, text: &str) -> Result<Path> {
        self.double.parse_path(text)
    }

    pub fn fmt_path(&self, p: &Path) -> String {
        self.double.format_path(p)
    }
}
