//! The host graphs: complete multipartite `K_{j×s}`, their canonical
//! vertex/edge orders, red/blue (partial) colorings, and per-vertex
//! degree splits.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("host needs at least 2 parts of size at least 1, got j={j}, s={s}")]
    DegenerateShape { j: u32, s: u32 },
    #[error("vertex {0} out of range for this shape")]
    BadVertex(Vertex),
    #[error("edge id {0} out of range")]
    BadEdge(usize),
    #[error("edge {0} is already set; clear it first")]
    AlreadySet(EdgeId),
    #[error("edge {0} is not set")]
    NotSet(EdgeId),
    #[error("coloring is not total")]
    PartialColoring,
    #[error("split length mismatch: {0} vs {1}")]
    SplitLength(usize, usize),
    #[error("malformed vertex label {0:?} (expected \"p.i\")")]
    BadLabel(String),
    #[error("edge {0:?}-{1:?} joins vertices of the same part")]
    SamePart(String, String),
    #[error("duplicate edge {0:?}-{1:?} in edge list")]
    DuplicateEdge(String, String),
    #[error("witness file is not a total coloring")]
    NotTotal,
    #[error("invalid witness json: {0}")]
    Json(String),
}

/// One of the two edge colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Red => write!(f, "red"),
            Color::Blue => write!(f, "blue"),
        }
    }
}

/// A host vertex, named `(part, index)` with both 1-based, displayed "p.i".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub part: u32,
    pub index: u32,
}

impl Vertex {
    pub fn new(part: u32, index: u32) -> Vertex {
        Vertex { part, index }
    }

    /// Parses a "p.i" label.
    pub fn parse(label: &str) -> Result<Vertex, GraphError> {
        let bad = || GraphError::BadLabel(label.to_string());
        let (p, i) = label.split_once('.').ok_or_else(bad)?;
        let part: u32 = p.parse().map_err(|_| bad())?;
        let index: u32 = i.parse().map_err(|_| bad())?;
        if part == 0 || index == 0 {
            return Err(bad());
        }
        Ok(Vertex { part, index })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.part, self.index)
    }
}

/// Canonical id of a host edge; edges are ordered lexicographically on
/// their ordered endpoint pair, so all edges at vertex 1.1 come first.
pub type EdgeId = usize;

/// The host `K_{j×s}`: `j` parts of `s` vertices each, all cross-part
/// edges present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSpec {
    j: u32,
    s: u32,
}

/// Builds the host shape, rejecting degenerate parameters.
pub fn make_shape(j: u32, s: u32) -> Result<ShapeSpec, GraphError> {
    if j < 2 || s < 1 {
        return Err(GraphError::DegenerateShape { j, s });
    }
    Ok(ShapeSpec { j, s })
}

impl ShapeSpec {
    pub fn parts(&self) -> u32 {
        self.j
    }

    pub fn part_size(&self) -> u32 {
        self.s
    }

    pub fn vertex_count(&self) -> usize {
        (self.j * self.s) as usize
    }

    pub fn edge_count(&self) -> usize {
        let j = self.j as usize;
        let s = self.s as usize;
        s * s * j * (j - 1) / 2
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v.part >= 1 && v.part <= self.j && v.index >= 1 && v.index <= self.s
    }

    /// Position of `v` in the fixed (p, i)-lexicographic vertex order.
    pub fn vertex_pos(&self, v: Vertex) -> Result<usize, GraphError> {
        if !self.contains_vertex(v) {
            return Err(GraphError::BadVertex(v));
        }
        Ok(((v.part - 1) * self.s + (v.index - 1)) as usize)
    }

    pub fn vertex_at(&self, pos: usize) -> Vertex {
        let s = self.s as usize;
        Vertex::new((pos / s) as u32 + 1, (pos % s) as u32 + 1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(|p| self.vertex_at(p))
    }

    /// Cross-part degree of every vertex.
    pub fn cross_degree(&self) -> usize {
        ((self.j - 1) * self.s) as usize
    }

    /// Edges in canonical order, smaller endpoint first.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in self.vertices() {
            for v in self.vertices() {
                if v > u && v.part != u.part {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> Result<(Vertex, Vertex), GraphError> {
        // Hosts are tiny; a linear walk keeps the order definition literal.
        self.edges().get(e).copied().ok_or(GraphError::BadEdge(e))
    }

    /// Canonical id of the edge between `u` and `v`, or `None` when the
    /// vertices share a part (including `u == v`).
    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Result<Option<EdgeId>, GraphError> {
        let up = self.vertex_pos(u)?;
        let vp = self.vertex_pos(v)?;
        if u.part == v.part {
            return Ok(None);
        }
        let (a, b) = if up < vp { (u, v) } else { (v, u) };
        let apos = self.vertex_pos(a)?;
        let bpos = self.vertex_pos(b)?;
        let n = self.vertex_count();
        let s = self.s as usize;
        // Edges with first endpoint before `a`.
        let mut id = 0usize;
        for w in 0..apos {
            let later = n - 1 - w;
            let wpart_start = (w / s) * s;
            let same_part_later = wpart_start + s - 1 - w;
            id += later - same_part_later;
        }
        // Rank of `b` among a's later cross-part neighbours.
        let apart_start = (apos / s) * s;
        let apart_end = apart_start + s;
        let between = bpos - apos - 1;
        let same_part_between = apart_end.saturating_sub(apos + 1).min(between);
        id += between - same_part_between;
        Ok(Some(id))
    }
}

/// A red/blue split: the non-increasing sequence of a vertex's
/// same-color degrees into the other `j−1` parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    counts: Vec<u32>,
}

impl Split {
    pub fn new(mut counts: Vec<u32>) -> Split {
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Split { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// Entrywise dominance: `actual` contains `required`.
pub fn contains_split(actual: &Split, required: &Split) -> Result<bool, GraphError> {
    if actual.counts.len() != required.counts.len() {
        return Err(GraphError::SplitLength(
            actual.counts.len(),
            required.counts.len(),
        ));
    }
    Ok(actual
        .counts
        .iter()
        .zip(&required.counts)
        .all(|(a, r)| a >= r))
}

/// A total or partial assignment of colors to host edges. Unset is a
/// first-class third state; the search engine works on partial
/// colorings throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    shape: ShapeSpec,
    colors: Vec<Option<Color>>,
    unset: usize,
}

impl Coloring {
    pub fn empty(shape: ShapeSpec) -> Coloring {
        let m = shape.edge_count();
        Coloring {
            shape,
            colors: vec![None; m],
            unset: m,
        }
    }

    /// Total coloring with every edge the same color.
    pub fn uniform(shape: ShapeSpec, c: Color) -> Coloring {
        let m = shape.edge_count();
        Coloring {
            shape,
            colors: vec![Some(c); m],
            unset: 0,
        }
    }

    pub fn shape(&self) -> ShapeSpec {
        self.shape
    }

    pub fn color(&self, e: EdgeId) -> Result<Option<Color>, GraphError> {
        self.colors
            .get(e)
            .copied()
            .ok_or(GraphError::BadEdge(e))
    }

    pub fn is_total(&self) -> bool {
        self.unset == 0
    }

    pub fn unset_count(&self) -> usize {
        self.unset
    }

    /// Assigns `c` to an unset edge; overwriting is an error.
    pub fn set_color(&mut self, e: EdgeId, c: Color) -> Result<(), GraphError> {
        match self.colors.get(e) {
            None => Err(GraphError::BadEdge(e)),
            Some(Some(_)) => Err(GraphError::AlreadySet(e)),
            Some(None) => {
                self.colors[e] = Some(c);
                self.unset -= 1;
                Ok(())
            }
        }
    }

    /// Reverts an assigned edge to unset (search-engine undo path).
    pub fn clear(&mut self, e: EdgeId) -> Result<(), GraphError> {
        match self.colors.get(e) {
            None => Err(GraphError::BadEdge(e)),
            Some(None) => Err(GraphError::NotSet(e)),
            Some(Some(_)) => {
                self.colors[e] = None;
                self.unset += 1;
                Ok(())
            }
        }
    }

    /// Edge ids currently carrying color `c`.
    pub fn edges_of(&self, c: Color) -> Vec<EdgeId> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == Some(c))
            .map(|(e, _)| e)
            .collect()
    }

    /// The §2 split of `v` in color `c`; requires a total coloring.
    pub fn degree_split(&self, v: Vertex, c: Color) -> Result<Split, GraphError> {
        if !self.is_total() {
            return Err(GraphError::PartialColoring);
        }
        let shape = self.shape;
        if !shape.contains_vertex(v) {
            return Err(GraphError::BadVertex(v));
        }
        let mut counts = Vec::with_capacity(shape.parts() as usize - 1);
        for q in 1..=shape.parts() {
            if q == v.part {
                continue;
            }
            let mut n = 0;
            for k in 1..=shape.part_size() {
                let w = Vertex::new(q, k);
                let e = shape.edge_between(v, w)?.expect("cross-part edge");
                if self.colors[e] == Some(c) {
                    n += 1;
                }
            }
            counts.push(n);
        }
        Ok(Split::new(counts))
    }
}

/// On-disk witness coloring: `{"j", "s", "red": [["p.i","q.k"], ...]}`,
/// blue implied as the complement. Always a total coloring.
#[derive(Debug, Serialize, Deserialize)]
struct ColoringFile {
    j: u32,
    s: u32,
    red: Vec<[String; 2]>,
}

/// Serializes a total coloring in the witness file layout (sorted red
/// edge list, smaller endpoint first).
pub fn coloring_to_json(coloring: &Coloring) -> Result<serde_json::Value, GraphError> {
    if !coloring.is_total() {
        return Err(GraphError::NotTotal);
    }
    let shape = coloring.shape();
    let edges = shape.edges();
    let mut red: Vec<[String; 2]> = coloring
        .edges_of(Color::Red)
        .into_iter()
        .map(|e| {
            let (u, v) = edges[e];
            [u.to_string(), v.to_string()]
        })
        .collect();
    red.sort();
    Ok(serde_json::json!({
        "j": shape.parts(),
        "s": shape.part_size(),
        "red": red,
    }))
}

/// Parses a total coloring from witness-file JSON, rejecting same-part
/// pairs, duplicates, and out-of-range labels.
pub fn coloring_from_json(value: &serde_json::Value) -> Result<Coloring, GraphError> {
    let file: ColoringFile =
        serde_json::from_value(value.clone()).map_err(|e| GraphError::Json(e.to_string()))?;
    let shape = make_shape(file.j, file.s)?;
    let mut coloring = Coloring::uniform(shape, Color::Blue);
    let mut seen = vec![false; shape.edge_count()];
    for [a, b] in &file.red {
        let u = Vertex::parse(a)?;
        let v = Vertex::parse(b)?;
        let e = shape
            .edge_between(u, v)?
            .ok_or_else(|| GraphError::SamePart(a.clone(), b.clone()))?;
        if seen[e] {
            return Err(GraphError::DuplicateEdge(a.clone(), b.clone()));
        }
        seen[e] = true;
        coloring.clear(e)?;
        coloring.set_color(e, Color::Red)?;
    }
    Ok(coloring)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts() {
        let k3x2 = make_shape(3, 2).unwrap();
        assert_eq!(k3x2.vertex_count(), 6);
        assert_eq!(k3x2.edge_count(), 12);
        let k6x3 = make_shape(6, 3).unwrap();
        assert_eq!(k6x3.vertex_count(), 18);
        assert_eq!(k6x3.edge_count(), 135);
        assert!(make_shape(1, 5).is_err());
        assert!(make_shape(3, 0).is_err());
    }

    #[test]
    fn edge_between_cases() {
        let shape = make_shape(3, 2).unwrap();
        assert!(shape
            .edge_between(Vertex::new(1, 1), Vertex::new(2, 1))
            .unwrap()
            .is_some());
        assert_eq!(
            shape
                .edge_between(Vertex::new(1, 1), Vertex::new(1, 2))
                .unwrap(),
            None
        );
        assert_eq!(
            shape
                .edge_between(Vertex::new(1, 1), Vertex::new(1, 1))
                .unwrap(),
            None
        );
        assert!(shape
            .edge_between(Vertex::new(4, 1), Vertex::new(1, 1))
            .is_err());
    }

    #[test]
    fn edge_order_is_a_stable_bijection() {
        for (j, s) in [(2, 1), (3, 2), (4, 2), (3, 3), (6, 3)] {
            let shape = make_shape(j, s).unwrap();
            let edges = shape.edges();
            assert_eq!(edges.len(), shape.edge_count());
            for (id, (u, v)) in edges.iter().enumerate() {
                assert_eq!(shape.edge_between(*u, *v).unwrap(), Some(id));
                assert_eq!(shape.edge_between(*v, *u).unwrap(), Some(id));
                assert_eq!(shape.edge_endpoints(id).unwrap(), (*u, *v));
            }
        }
    }

    #[test]
    fn first_vertex_edges_come_first() {
        let shape = make_shape(3, 2).unwrap();
        let edges = shape.edges();
        let v11 = Vertex::new(1, 1);
        for e in 0..shape.cross_degree() {
            assert_eq!(edges[e].0, v11);
        }
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        for (j, s) in [(2, 2), (3, 2), (5, 1), (4, 3)] {
            let shape = make_shape(j, s).unwrap();
            let total: usize = shape.vertices().map(|_| shape.cross_degree()).sum();
            assert_eq!(total, 2 * shape.edge_count());
        }
    }

    #[test]
    fn set_color_rules() {
        let shape = make_shape(3, 2).unwrap();
        let mut c = Coloring::empty(shape);
        c.set_color(0, Color::Red).unwrap();
        assert_eq!(c.edges_of(Color::Red), vec![0]);
        assert_eq!(c.set_color(0, Color::Red), Err(GraphError::AlreadySet(0)));
        assert_eq!(c.set_color(0, Color::Blue), Err(GraphError::AlreadySet(0)));
        let total = Coloring::uniform(shape, Color::Red);
        assert!(total.clone().set_color(3, Color::Blue).is_err());
        c.clear(0).unwrap();
        assert_eq!(c.clear(0), Err(GraphError::NotSet(0)));
    }

    #[test]
    fn all_red_split() {
        let shape = make_shape(3, 2).unwrap();
        let total = Coloring::uniform(shape, Color::Red);
        for v in shape.vertices() {
            let split = total.degree_split(v, Color::Red).unwrap();
            assert_eq!(split.counts(), &[2, 2]);
            let blue = total.degree_split(v, Color::Blue).unwrap();
            assert_eq!(blue.counts(), &[0, 0]);
        }
        let partial = Coloring::empty(shape);
        assert!(partial
            .degree_split(Vertex::new(1, 1), Color::Red)
            .is_err());
    }

    #[test]
    fn contains_split_dominance() {
        let a = Split::new(vec![3, 1]);
        assert!(contains_split(&a, &Split::new(vec![2, 1])).unwrap());
        assert!(!contains_split(&a, &Split::new(vec![2, 2])).unwrap());
        let b = Split::new(vec![2, 2]);
        assert!(contains_split(&b, &b.clone()).unwrap());
        assert!(contains_split(&a, &Split::new(vec![1])).is_err());
    }

    #[test]
    fn coloring_json_round_trip() {
        let shape = make_shape(3, 2).unwrap();
        let mut c = Coloring::uniform(shape, Color::Blue);
        for e in [0, 3, 7] {
            c.clear(e).unwrap();
            c.set_color(e, Color::Red).unwrap();
        }
        let json = coloring_to_json(&c).unwrap();
        let back = coloring_from_json(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn coloring_json_rejects_bad_edges() {
        let same_part = serde_json::json!({"j": 3, "s": 2, "red": [["1.1", "1.2"]]});
        assert!(matches!(
            coloring_from_json(&same_part),
            Err(GraphError::SamePart(_, _))
        ));
        let dup = serde_json::json!({"j": 3, "s": 2, "red": [["1.1", "2.1"], ["2.1", "1.1"]]});
        assert!(matches!(
            coloring_from_json(&dup),
            Err(GraphError::DuplicateEdge(_, _))
        ));
        let out_of_range = serde_json::json!({"j": 3, "s": 2, "red": [["1.1", "4.1"]]});
        assert!(coloring_from_json(&out_of_range).is_err());
    }
}
