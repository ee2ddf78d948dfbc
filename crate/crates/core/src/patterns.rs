//! The fixed target-graph catalog and all subgraph detection: full
//! embedding enumeration, containment queries over (partial)
//! colorings, and the incremental "does this edge complete a copy"
//! check the search engine leans on.
//!
//! Containment is non-induced throughout: a red `K4` contains a red
//! `B2`, and so on.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use crate::mpgraph::{Color, Coloring, EdgeId, GraphError, ShapeSpec};

/// Supports hosts up to 256 edges (largest shipped instance is
/// `K_{6×3}` with 135).
pub const MAX_EDGES: usize = 256;

/// A set of host edge ids as a fixed-width bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EdgeSet {
    words: [u64; 4],
}

impl EdgeSet {
    pub fn new() -> EdgeSet {
        EdgeSet::default()
    }

    pub fn insert(&mut self, e: EdgeId) {
        debug_assert!(e < MAX_EDGES);
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: EdgeId) {
        self.words[e / 64] &= !(1 << (e % 64));
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &EdgeSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn from_edges(edges: &[EdgeId]) -> EdgeSet {
        let mut s = EdgeSet::new();
        for &e in edges {
            s.insert(e);
        }
        s
    }
}

/// Canonical names of the catalog patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternName {
    P2,
    P3,
    P4,
    TwoK2,
    C3,
    K1_3,
    C4,
    Paw,
    B2,
    B,
    K4,
}

pub const ALL_PATTERNS: [PatternName; 11] = [
    PatternName::P2,
    PatternName::P3,
    PatternName::P4,
    PatternName::TwoK2,
    PatternName::C3,
    PatternName::K1_3,
    PatternName::C4,
    PatternName::Paw,
    PatternName::B2,
    PatternName::B,
    PatternName::K4,
];

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PatternName::P2 => "P2",
            PatternName::P3 => "P3",
            PatternName::P4 => "P4",
            PatternName::TwoK2 => "2K2",
            PatternName::C3 => "C3",
            PatternName::K1_3 => "K1_3",
            PatternName::C4 => "C4",
            PatternName::Paw => "PAW",
            PatternName::B2 => "B2",
            PatternName::B => "B",
            PatternName::K4 => "K4",
        };
        write!(f, "{s}")
    }
}

impl FromStr for PatternName {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<PatternName, GraphError> {
        let n = match s {
            "P2" => PatternName::P2,
            "P3" => PatternName::P3,
            "P4" => PatternName::P4,
            "2K2" => PatternName::TwoK2,
            "C3" => PatternName::C3,
            "K1_3" | "K1,3" => PatternName::K1_3,
            "C4" => PatternName::C4,
            "PAW" | "K1_3+e" | "K1,3+e" => PatternName::Paw,
            "B2" => PatternName::B2,
            "B" => PatternName::B,
            "K4" => PatternName::K4,
            _ => return Err(GraphError::Json(format!("unknown pattern name {s:?}"))),
        };
        Ok(n)
    }
}

/// A small target graph on vertex indices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGraph {
    pub name: PatternName,
    pub order: usize,
    pub edges: Vec<(usize, usize)>,
}

impl PatternGraph {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

/// The 11 canonical patterns: the 9 table columns plus `B` itself and
/// `K4` for diagnostics. Entries are immutable.
pub fn catalog() -> &'static [PatternGraph] {
    static CATALOG: OnceLock<Vec<PatternGraph>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let mk = |name, order, edges: &[(usize, usize)]| PatternGraph {
            name,
            order,
            edges: edges.to_vec(),
        };
        vec![
            mk(PatternName::P2, 2, &[(0, 1)]),
            mk(PatternName::P3, 3, &[(0, 1), (1, 2)]),
            mk(PatternName::P4, 4, &[(0, 1), (1, 2), (2, 3)]),
            mk(PatternName::TwoK2, 4, &[(0, 1), (2, 3)]),
            mk(PatternName::C3, 3, &[(0, 1), (1, 2), (0, 2)]),
            mk(PatternName::K1_3, 4, &[(0, 1), (0, 2), (0, 3)]),
            mk(PatternName::C4, 4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
            // Triangle 0-1-2 with pendant edge 0-3.
            mk(PatternName::Paw, 4, &[(0, 1), (1, 2), (0, 2), (0, 3)]),
            // K4 minus the edge 2-3: two triangles sharing edge 0-1.
            mk(
                PatternName::B2,
                4,
                &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)],
            ),
            // Centre 0, triangles {0,1,2} and {0,3,4}.
            mk(
                PatternName::B,
                5,
                &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)],
            ),
            mk(
                PatternName::K4,
                4,
                &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            ),
        ]
    })
}

pub fn lookup(name: PatternName) -> &'static PatternGraph {
    catalog().iter().find(|p| p.name == name).expect("catalog")
}

/// Genuine subgraph pairs over the catalog: `(small, large)` with
/// `small ⊆ large`. Hard-coded; the test suite re-derives it from the
/// naive embedding oracle.
pub fn subgraph_pairs() -> Vec<(PatternName, PatternName)> {
    use PatternName::*;
    let mut pairs = Vec::new();
    // P2 is a subgraph of everything with an edge.
    for large in ALL_PATTERNS {
        if large != P2 {
            pairs.push((P2, large));
        }
    }
    for (small, large) in [
        (P3, P4),
        (P3, C3),
        (P3, K1_3),
        (P3, C4),
        (P3, Paw),
        (P3, B2),
        (P3, B),
        (P3, K4),
        (P4, C4),
        (P4, Paw),
        (P4, B2),
        (P4, B),
        (P4, K4),
        (TwoK2, P4),
        (TwoK2, C4),
        (TwoK2, Paw),
        (TwoK2, B2),
        (TwoK2, B),
        (TwoK2, K4),
        (C3, Paw),
        (C3, B2),
        (C3, B),
        (C3, K4),
        (K1_3, Paw),
        (K1_3, B2),
        (K1_3, B),
        (K1_3, K4),
        (C4, B2),
        (C4, K4),
        (Paw, B2),
        (Paw, B),
        (Paw, K4),
        (B2, K4),
    ] {
        pairs.push((small, large));
    }
    pairs
}

/// A subgraph of the host isomorphic to a pattern, identified by its
/// edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub edges: Vec<EdgeId>,
    pub mask: EdgeSet,
}

impl Embedding {
    fn from_sorted(edges: Vec<EdgeId>) -> Embedding {
        let mask = EdgeSet::from_edges(&edges);
        Embedding { edges, mask }
    }
}

/// Every subgraph of the host isomorphic to `pattern`, deduplicated by
/// edge set, in a deterministic (sorted) order.
pub fn enumerate_embeddings(shape: ShapeSpec, pattern: &PatternGraph) -> Vec<Embedding> {
    assert!(shape.edge_count() <= MAX_EDGES, "host too large");
    let n = shape.vertex_count();
    let part_of: Vec<u32> = (0..n).map(|p| shape.vertex_at(p).part).collect();
    let edge_id: Vec<Vec<Option<EdgeId>>> = (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    shape
                        .edge_between(shape.vertex_at(u), shape.vertex_at(v))
                        .unwrap()
                })
                .collect()
        })
        .collect();

    // Pattern edges grouped by the later-mapped endpoint so adjacency
    // is checked as soon as both ends are placed.
    let k = pattern.order;
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in &pattern.edges {
        checks[a.max(b)].push(a.min(b));
    }

    let mut seen: std::collections::HashSet<Vec<EdgeId>> = std::collections::HashSet::new();
    let mut out: Vec<Vec<EdgeId>> = Vec::new();
    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; n];

    fn rec(
        t: usize,
        k: usize,
        n: usize,
        part_of: &[u32],
        edge_id: &[Vec<Option<EdgeId>>],
        checks: &[Vec<usize>],
        map: &mut [usize],
        used: &mut [bool],
        seen: &mut std::collections::HashSet<Vec<EdgeId>>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if t == k {
            let mut edges: Vec<EdgeId> = Vec::new();
            for (b, asides) in checks.iter().enumerate() {
                for &a in asides {
                    edges.push(edge_id[map[a]][map[b]].expect("checked adjacent"));
                }
            }
            edges.sort_unstable();
            if seen.insert(edges.clone()) {
                out.push(edges);
            }
            return;
        }
        'host: for h in 0..n {
            if used[h] {
                continue;
            }
            for &a in &checks[t] {
                let ha = map[a];
                if part_of[ha] == part_of[h] {
                    continue 'host;
                }
            }
            map[t] = h;
            used[h] = true;
            rec(t + 1, k, n, part_of, edge_id, checks, map, used, seen, out);
            used[h] = false;
            map[t] = usize::MAX;
        }
    }

    rec(
        0, k, n, &part_of, &edge_id, &checks, &mut map, &mut used, &mut seen, &mut out,
    );
    out.sort_unstable();
    out.into_iter().map(Embedding::from_sorted).collect()
}

pub fn count_embeddings(shape: ShapeSpec, pattern: &PatternGraph) -> usize {
    embedding_index(shape, pattern.name).embeddings.len()
}

/// Per-(shape, pattern) precomputed embedding list plus an edge →
/// embeddings-through-it index; built once per run and shared.
#[derive(Debug)]
pub struct EmbeddingIndex {
    pub shape: ShapeSpec,
    pub pattern: PatternName,
    pub embeddings: Vec<Embedding>,
    pub by_edge: Vec<Vec<u32>>,
}

impl EmbeddingIndex {
    fn build(shape: ShapeSpec, pattern: PatternName) -> EmbeddingIndex {
        let embeddings = enumerate_embeddings(shape, lookup(pattern));
        let mut by_edge = vec![Vec::new(); shape.edge_count()];
        for (i, emb) in embeddings.iter().enumerate() {
            for &e in &emb.edges {
                by_edge[e].push(i as u32);
            }
        }
        EmbeddingIndex {
            shape,
            pattern,
            embeddings,
            by_edge,
        }
    }
}

type IndexKey = (u32, u32, PatternName);

fn index_cache() -> &'static Mutex<HashMap<IndexKey, &'static EmbeddingIndex>> {
    static CACHE: OnceLock<Mutex<HashMap<IndexKey, &'static EmbeddingIndex>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, immutable embedding index for `(shape, pattern)`.
pub fn embedding_index(shape: ShapeSpec, pattern: PatternName) -> &'static EmbeddingIndex {
    let key = (shape.parts(), shape.part_size(), pattern);
    let mut cache = index_cache().lock().unwrap();
    if let Some(idx) = cache.get(&key) {
        return idx;
    }
    let idx: &'static EmbeddingIndex = Box::leak(Box::new(EmbeddingIndex::build(shape, pattern)));
    cache.insert(key, idx);
    idx
}

/// First embedding of `pattern` (in enumeration order) all of whose
/// edges currently carry color `c`, if any. The coloring may be
/// partial; unset edges never count.
pub fn contains(coloring: &Coloring, c: Color, pattern: PatternName) -> Option<Embedding> {
    let idx = embedding_index(coloring.shape(), pattern);
    let colored = EdgeSet::from_edges(&coloring.edges_of(c));
    idx.embeddings
        .iter()
        .find(|emb| emb.mask.is_subset(&colored))
        .cloned()
}

/// True iff assigning `c` to the unset edge `e` would complete at
/// least one all-`c` copy of `pattern` through `e`.
pub fn completes(
    coloring: &Coloring,
    e: EdgeId,
    c: Color,
    pattern: PatternName,
) -> Result<bool, GraphError> {
    if coloring.color(e)?.is_some() {
        return Err(GraphError::AlreadySet(e));
    }
    let idx = embedding_index(coloring.shape(), pattern);
    let mut colored = EdgeSet::from_edges(&coloring.edges_of(c));
    colored.insert(e);
    Ok(idx.by_edge[e]
        .iter()
        .any(|&i| idx.embeddings[i as usize].mask.is_subset(&colored)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpgraph::{make_shape, Vertex};

    #[test]
    fn catalog_shapes() {
        let b = lookup(PatternName::B);
        assert_eq!((b.order, b.size()), (5, 6));
        let b2 = lookup(PatternName::B2);
        assert_eq!((b2.order, b2.size()), (4, 5));
        let two = lookup(PatternName::TwoK2);
        assert_eq!((two.order, two.size()), (4, 2));
        // B: exactly one vertex of degree 4.
        let mut deg = [0usize; 5];
        for &(a, b) in &lookup(PatternName::B).edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert_eq!(deg.iter().filter(|d| **d == 4).count(), 1);
    }

    #[test]
    fn embedding_counts_small() {
        let k3x1 = make_shape(3, 1).unwrap();
        assert_eq!(count_embeddings(k3x1, lookup(PatternName::C3)), 1);
        assert_eq!(count_embeddings(k3x1, lookup(PatternName::P2)), 3);
        let k5x1 = make_shape(5, 1).unwrap();
        assert_eq!(count_embeddings(k5x1, lookup(PatternName::B)), 15);
        let k3x2 = make_shape(3, 2).unwrap();
        assert_eq!(count_embeddings(k3x2, lookup(PatternName::B)), 12);
        assert_eq!(count_embeddings(k3x2, lookup(PatternName::P3)), 36);
        let k2x2 = make_shape(2, 2).unwrap();
        assert_eq!(count_embeddings(k2x2, lookup(PatternName::C4)), 1);
        let k4 = make_shape(4, 1).unwrap();
        assert_eq!(count_embeddings(k4, lookup(PatternName::TwoK2)), 3);
    }

    #[test]
    fn contains_all_red_butterfly() {
        let shape = make_shape(3, 2).unwrap();
        let total = Coloring::uniform(shape, Color::Red);
        let emb = contains(&total, Color::Red, PatternName::B).expect("red B");
        assert_eq!(emb.edges.len(), 6);
        assert!(contains(&total, Color::Blue, PatternName::P2).is_none());
    }

    #[test]
    fn completes_cases() {
        let shape = make_shape(3, 2).unwrap();
        let mut partial = Coloring::empty(shape);
        // Red B-minus-one-edge with centre 1.1.
        let red = [
            (Vertex::new(1, 1), Vertex::new(2, 1)),
            (Vertex::new(1, 1), Vertex::new(3, 1)),
            (Vertex::new(2, 1), Vertex::new(3, 1)),
            (Vertex::new(1, 1), Vertex::new(2, 2)),
            (Vertex::new(1, 1), Vertex::new(3, 2)),
        ];
        for (u, v) in red {
            let e = shape.edge_between(u, v).unwrap().unwrap();
            partial.set_color(e, Color::Red).unwrap();
        }
        let closing = shape
            .edge_between(Vertex::new(2, 2), Vertex::new(3, 2))
            .unwrap()
            .unwrap();
        assert!(completes(&partial, closing, Color::Red, PatternName::B).unwrap());
        assert!(!completes(&partial, closing, Color::Blue, PatternName::B).unwrap());

        let empty = Coloring::empty(shape);
        assert!(completes(&empty, 0, Color::Blue, PatternName::P2).unwrap());
        assert!(!completes(&empty, 0, Color::Red, PatternName::B).unwrap());
        let mut set = Coloring::empty(shape);
        set.set_color(0, Color::Red).unwrap();
        assert!(completes(&set, 0, Color::Red, PatternName::P2).is_err());
    }

    #[test]
    fn edge_set_basics() {
        let mut s = EdgeSet::new();
        for e in [0, 63, 64, 130, 255] {
            s.insert(e);
            assert!(s.contains(e));
        }
        assert_eq!(s.len(), 5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 130, 255]);
        let t = EdgeSet::from_edges(&[0, 64]);
        assert!(t.is_subset(&s));
        assert!(!s.is_subset(&t));
        assert!(s.intersects(&t));
        s.remove(64);
        assert!(!s.contains(64));
    }
}
