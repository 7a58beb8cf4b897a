//! Graph family generators and the lazy-walk transform.
//!
//! All generators are deterministic; the random family takes an explicit
//! seed and derives everything from one seeded stream, so equal
//! specifications always produce byte-identical graphs.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest accepted gasket level; level L has `(3^(L+1) + 3) / 2` vertices.
pub const MAX_SIERPINSKI_LEVEL: usize = 10;

/// The supported graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    /// Cycle on `n >= 3` vertices.
    Cycle(usize),
    /// Path on `n >= 2` vertices.
    Path(usize),
    /// Grid of `width x height` vertices with nearest-neighbor edges.
    Lattice2d(usize, usize),
    /// Complete graph on `n >= 2` vertices.
    Complete(usize),
    /// Complete bipartite graph on `a + b` vertices.
    CompleteBipartite(usize, usize),
    /// Sierpinski gasket approximation at the given subdivision level.
    Sierpinski(usize),
    /// Erdos-Renyi style graph with uniform random weights; isolated
    /// vertices are patched with one deterministic edge.
    RandomWeighted { vertices: usize, density: f64, seed: u64 },
}

/// A graph family plus a uniform weight applied to every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub weight: f64,
}

impl GraphSpec {
    pub fn new(kind: GraphKind) -> Self {
        Self { kind, weight: 1.0 }
    }

    /// Sets the uniform edge weight (a multiplier for the random family).
    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight { u: 0, v: 0, weight });
        }
        self.weight = weight;
        Ok(self)
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cycle(n) => write!(f, "cycle:{n}"),
            Self::Path(n) => write!(f, "path:{n}"),
            Self::Lattice2d(w, h) => write!(f, "lattice2d:{w}x{h}"),
            Self::Complete(n) => write!(f, "complete:{n}"),
            Self::CompleteBipartite(a, b) => write!(f, "complete_bipartite:{a}x{b}"),
            Self::Sierpinski(level) => write!(f, "sierpinski:{level}"),
            Self::RandomWeighted { vertices, density, seed } => {
                write!(f, "random_weighted:{vertices}:{density}:{seed}")
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    /// Grammar: `cycle:N`, `path:N`, `lattice2d:WxH`, `complete:N`,
    /// `complete_bipartite:AxB`, `sierpinski:L`,
    /// `random_weighted:N:DENSITY:SEED`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: &str| Error::BadGraphSpec { spec: s.to_string(), detail: detail.into() };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |token: &str, what: &str| -> Result<usize> {
            token.parse().map_err(|_| bad(&format!("{what} {token:?} is not an integer")))
        };
        let pair = |token: &str, what: &str| -> Result<(usize, usize)> {
            let (a, b) = token
                .split_once('x')
                .ok_or_else(|| bad(&format!("{what} {token:?} must look like AxB")))?;
            Ok((int(a, what)?, int(b, what)?))
        };
        let kind = match (parts.first().copied(), parts.len()) {
            (Some("cycle"), 2) => GraphKind::Cycle(int(parts[1], "size")?),
            (Some("path"), 2) => GraphKind::Path(int(parts[1], "size")?),
            (Some("lattice2d"), 2) => {
                let (w, h) = pair(parts[1], "shape")?;
                GraphKind::Lattice2d(w, h)
            }
            (Some("complete"), 2) => GraphKind::Complete(int(parts[1], "size")?),
            (Some("complete_bipartite"), 2) => {
                let (a, b) = pair(parts[1], "shape")?;
                GraphKind::CompleteBipartite(a, b)
            }
            (Some("sierpinski"), 2) => GraphKind::Sierpinski(int(parts[1], "level")?),
            (Some("random_weighted"), 4) => GraphKind::RandomWeighted {
                vertices: int(parts[1], "size")?,
                density: parts[2]
                    .parse()
                    .map_err(|_| bad(&format!("density {:?} is not a number", parts[2])))?,
                seed: parts[3]
                    .parse()
                    .map_err(|_| bad(&format!("seed {:?} is not an integer", parts[3])))?,
            },
            _ => return Err(bad("unknown family or wrong number of fields")),
        };
        Ok(GraphSpec::new(kind))
    }
}

/// Builds the graph described by `spec`.
pub fn generate(spec: &GraphSpec) -> Result<WeightedGraph> {
    let w = spec.weight;
    let need = |ok: bool, detail: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::BadGraphSpec { spec: spec.kind.to_string(), detail: detail.into() })
        }
    };
    match spec.kind {
        GraphKind::Cycle(n) => {
            need(n >= 3, "a cycle needs at least 3 vertices")?;
            WeightedGraph::from_edges_on(n, (0..n).map(|i| (i, (i + 1) % n, w)))
        }
        GraphKind::Path(n) => {
            need(n >= 2, "a path needs at least 2 vertices")?;
            WeightedGraph::from_edges_on(n, (0..n - 1).map(|i| (i, i + 1, w)))
        }
        GraphKind::Lattice2d(width, height) => {
            need(width >= 1 && height >= 1 && width * height >= 2, "a lattice needs at least 2 vertices")?;
            let id = |r: usize, c: usize| r * width + c;
            let mut edges = Vec::new();
            for r in 0..height {
                for c in 0..width {
                    if c + 1 < width {
                        edges.push((id(r, c), id(r, c + 1), w));
                    }
                    if r + 1 < height {
                        edges.push((id(r, c), id(r + 1, c), w));
                    }
                }
            }
            WeightedGraph::from_edges_on(width * height, edges)
        }
        GraphKind::Complete(n) => {
            need(n >= 2, "a complete graph needs at least 2 vertices")?;
            let edges = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v, w)));
            WeightedGraph::from_edges_on(n, edges)
        }
        GraphKind::CompleteBipartite(a, b) => {
            need(a >= 1 && b >= 1, "both sides need at least 1 vertex")?;
            let edges = (0..a).flat_map(|u| (0..b).map(move |v| (u, a + v, w)));
            WeightedGraph::from_edges_on(a + b, edges)
        }
        GraphKind::Sierpinski(level) => {
            need(level <= MAX_SIERPINSKI_LEVEL, "gasket level is too large")?;
            Ok(sierpinski(level, w))
        }
        GraphKind::RandomWeighted { vertices, density, seed } => {
            need(vertices >= 2, "a random graph needs at least 2 vertices")?;
            need((0.0..=1.0).contains(&density), "density must lie in [0, 1]")?;
            Ok(random_weighted(vertices, density, seed, w))
        }
    }
}

/// Gasket at subdivision `level`: the corner triangle `(0,0), (2^L, 0),
/// (0, 2^L)` is subdivided `level` times, keeping the three corner
/// sub-triangles of each triangle. Vertex ids are assigned in traversal
/// order of the final triangles, so the construction is deterministic.
fn sierpinski(level: usize, w: f64) -> WeightedGraph {
    type Point = (i64, i64);
    let mid = |a: Point, b: Point| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    let side = 1i64 << level;
    let mut triangles: Vec<(Point, Point, Point)> = vec![((0, 0), (side, 0), (0, side))];
    for _ in 0..level {
        let mut next = Vec::with_capacity(triangles.len() * 3);
        for (a, b, c) in triangles {
            let (mab, mbc, mca) = (mid(a, b), mid(b, c), mid(c, a));
            next.push((a, mab, mca));
            next.push((mab, b, mbc));
            next.push((mca, mbc, c));
        }
        triangles = next;
    }
    let mut ids: HashMap<Point, usize> = HashMap::new();
    let id_of = |p: Point, ids: &mut HashMap<Point, usize>| -> usize {
        let next = ids.len();
        *ids.entry(p).or_insert(next)
    };
    let mut edges = Vec::with_capacity(triangles.len() * 3);
    for &(a, b, c) in &triangles {
        let (ia, ib, ic) = (id_of(a, &mut ids), id_of(b, &mut ids), id_of(c, &mut ids));
        edges.push((ia, ib, w));
        edges.push((ib, ic, w));
        edges.push((ia, ic, w));
    }
    WeightedGraph::from_edges_on(ids.len(), edges).expect("gasket construction is well formed")
}

/// Random graph: each pair is an edge with probability `density`, with
/// weight uniform in `[w/2, 3w/2)`. Vertices left isolated get one
/// deterministic unit-ish edge to their successor so every vertex keeps
/// positive measure.
fn random_weighted(n: usize, density: f64, seed: u64, w: f64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut touched = vec![false; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(density) {
                edges.push((u, v, w * rng.random_range(0.5..1.5)));
                touched[u] = true;
                touched[v] = true;
            }
        }
    }
    for v in 0..n {
        if !touched[v] {
            let partner = (v + 1) % n;
            edges.push((v, partner, w));
            touched[v] = true;
            touched[partner] = true;
        }
    }
    WeightedGraph::from_edges_on(n, edges).expect("every vertex was patched")
}

/// Lazy-walk transform with holding probability `alpha` in `[0, 1)`:
/// off-diagonal weights shrink to `(1 - alpha) mu_xy` and the loop weight
/// becomes `alpha m(x) + (1 - alpha) mu_xx`. Vertex measures are
/// preserved and the walk operator becomes `alpha I + (1 - alpha) P`,
/// shifting every eigenvalue `theta` to `alpha + (1 - alpha) theta`.
pub fn lazify(g: &WeightedGraph, alpha: f64) -> Result<WeightedGraph> {
    if !(alpha.is_finite() && (0.0..1.0).contains(&alpha)) {
        return Err(Error::InvalidParameter(format!(
            "holding probability must lie in [0, 1), got {alpha}"
        )));
    }
    let n = g.vertex_count();
    let mut edges = Vec::new();
    for x in 0..n {
        for &(y, w) in g.neighbors(x) {
            if y > x {
                edges.push((x, y, (1.0 - alpha) * w));
            }
        }
        let loop_weight = alpha * g.measure(x) + (1.0 - alpha) * g.weight(x, x);
        if loop_weight > 0.0 {
            edges.push((x, x, loop_weight));
        }
    }
    WeightedGraph::from_edges_on(n, edges)
}

/// A named graph from the standard test corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: WeightedGraph,
}

/// A fixed collection of small graphs exercising every structural regime:
/// both parities of cycles, trees, grids, expanders, gaskets, weighted and
/// lazy variants, seeded random graphs, loops, and a disconnected graph.
pub fn corpus() -> Vec<CorpusEntry> {
    let mut entries: Vec<CorpusEntry> = Vec::new();
    let mut push_spec = |spec: &str| {
        let parsed: GraphSpec = spec.parse().expect("corpus specs are valid");
        let graph = generate(&parsed).expect("corpus specs generate");
        entries.push(CorpusEntry { name: spec.to_string(), graph });
    };
    for spec in [
        "cycle:3",
        "cycle:4",
        "cycle:5",
        "cycle:6",
        "cycle:7",
        "cycle:8",
        "cycle:9",
        "cycle:10",
        "cycle:16",
        "cycle:20",
        "path:2",
        "path:3",
        "path:5",
        "path:10",
        "path:51",
        "lattice2d:5x5",
        "lattice2d:9x9",
        "lattice2d:3x2",
        "complete:3",
        "complete:4",
        "complete:5",
        "complete:8",
        "complete_bipartite:1x5",
        "complete_bipartite:2x3",
        "complete_bipartite:3x3",
        "sierpinski:1",
        "sierpinski:2",
        "sierpinski:3",
        "random_weighted:12:0.3:7",
        "random_weighted:20:0.2:21",
        "random_weighted:16:0.5:1",
    ] {
        push_spec(spec);
    }
    let mut push_graph = |name: &str, graph: Result<WeightedGraph>| {
        entries.push(CorpusEntry { name: name.to_string(), graph: graph.expect("corpus graphs build") });
    };
    let heavy_cycle: GraphSpec = "cycle:5".parse().unwrap();
    push_graph("cycle:5@w=2.5", generate(&heavy_cycle.with_weight(2.5).unwrap()));
    let light_path: GraphSpec = "path:10".parse().unwrap();
    push_graph("path:10@w=0.25", generate(&light_path.with_weight(0.25).unwrap()));
    let c4 = generate(&"cycle:4".parse().unwrap()).unwrap();
    push_graph("lazy:0.5:cycle:4", lazify(&c4, 0.5));
    let c5 = generate(&"cycle:5".parse().unwrap()).unwrap();
    push_graph("lazy:0.25:cycle:5", lazify(&c5, 0.25));
    let s2 = generate(&"sierpinski:2".parse().unwrap()).unwrap();
    push_graph("lazy:0.5:sierpinski:2", lazify(&s2, 0.5));
    push_graph("loopy-pair", WeightedGraph::from_edges([(0, 0, 1.0), (0, 1, 2.0)]));
    push_graph(
        "loopy-triangle",
        WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (0, 0, 0.5)]),
    );
    push_graph(
        "two-squares",
        WeightedGraph::from_edges([
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 3, 1.0),
            (3, 0, 1.0),
            (4, 5, 1.0),
            (5, 6, 1.0),
            (6, 7, 1.0),
            (7, 4, 1.0),
        ]),
    );
    push_graph(
        "uneven-star",
        WeightedGraph::from_edges([(0, 1, 4.0), (0, 2, 1.0), (0, 3, 0.25), (0, 4, 0.0625)]),
    );
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum;

    fn build(spec: &str) -> WeightedGraph {
        generate(&spec.parse::<GraphSpec>().unwrap()).unwrap()
    }

    #[test]
    fn family_shapes() {
        let c = build("cycle:7");
        assert_eq!((c.vertex_count(), c.edge_count()), (7, 7));
        let p = build("path:9");
        assert_eq!((p.vertex_count(), p.edge_count()), (9, 8));
        let l = build("lattice2d:4x3");
        assert_eq!((l.vertex_count(), l.edge_count()), (12, 17));
        let k = build("complete:6");
        assert_eq!((k.vertex_count(), k.edge_count()), (6, 15));
        let b = build("complete_bipartite:2x3");
        assert_eq!((b.vertex_count(), b.edge_count()), (5, 6));
        for g in [&c, &p, &l, &k, &b] {
            assert!(g.is_connected());
            assert!(!g.has_loops());
        }
    }

    #[test]
    fn gasket_counts() {
        for (level, vertices, edges) in [(0, 3, 3), (1, 6, 9), (2, 15, 27), (3, 42, 81)] {
            let g = build(&format!("sierpinski:{level}"));
            assert_eq!(g.vertex_count(), vertices, "level {level}");
            assert_eq!(g.edge_count(), edges, "level {level}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn random_graphs_are_reproducible() {
        let a = build("random_weighted:20:0.3:9");
        let b = build("random_weighted:20:0.3:9");
        assert_eq!(a, b);
        let c = build("random_weighted:20:0.3:10");
        assert_ne!(a, c);
        assert_eq!(a.vertex_count(), 20);
    }

    #[test]
    fn random_graph_patches_isolated_vertices() {
        let g = build("random_weighted:5:0:3");
        assert_eq!(g.vertex_count(), 5);
        // Density zero leaves everything to the successor patch.
        assert_eq!(g.edge_count(), 3);
        for x in 0..5 {
            assert!(g.measure(x) > 0.0);
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "cycle:12",
            "path:7",
            "lattice2d:3x9",
            "complete:4",
            "complete_bipartite:2x5",
            "sierpinski:2",
            "random_weighted:10:0.25:77",
        ] {
            let spec: GraphSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        for s in [
            "cycle",
            "cycle:2",
            "cycle:x",
            "torus:3",
            "lattice2d:3",
            "lattice2d:1x1",
            "random_weighted:5:1.5:3",
            "random_weighted:5:0.5",
            "sierpinski:99",
            "",
        ] {
            let result = s.parse::<GraphSpec>().and_then(|spec| generate(&spec));
            assert!(result.is_err(), "spec {s:?} should fail");
        }
    }

    #[test]
    fn uniform_weight_is_applied() {
        let spec = "cycle:4".parse::<GraphSpec>().unwrap().with_weight(2.5).unwrap();
        let g = generate(&spec).unwrap();
        assert_eq!(g.weight(0, 1), 2.5);
        assert_eq!(g.measure(0), 5.0);
        assert!("cycle:4".parse::<GraphSpec>().unwrap().with_weight(0.0).is_err());
    }

    #[test]
    fn lazify_preserves_measures_and_shifts_spectrum() {
        let g = build("cycle:4");
        let lazy = lazify(&g, 0.5).unwrap();
        assert_eq!(lazy.measures(), g.measures());
        // p'(x, x) m(x) = alpha on a loop-free graph.
        assert!((lazy.kernel(0, 0) * lazy.measure(0) - 0.5).abs() < 1e-15);
        let evs = spectrum(&g).unwrap();
        let lazy_evs = spectrum(&lazy).unwrap();
        for (a, b) in evs.iter().zip(&lazy_evs) {
            assert!((0.5 + 0.5 * a - b).abs() < 1e-12, "{evs:?} vs {lazy_evs:?}");
        }
    }

    #[test]
    fn lazify_on_weighted_loopy_graph() {
        let g = WeightedGraph::from_edges([(0, 0, 0.5), (0, 1, 2.0), (1, 2, 0.125)]).unwrap();
        let alpha = 0.3;
        let lazy = lazify(&g, alpha).unwrap();
        for x in 0..3 {
            assert!((lazy.measure(x) - g.measure(x)).abs() < 1e-12);
            let before = g.kernel(x, x) * g.measure(x);
            let after = lazy.kernel(x, x) * lazy.measure(x);
            assert!((after - (alpha + (1.0 - alpha) * before)).abs() < 1e-12);
        }
        assert!(lazify(&g, 1.0).is_err());
        assert!(lazify(&g, -0.1).is_err());
    }

    #[test]
    fn corpus_is_well_formed_and_named_uniquely() {
        let entries = corpus();
        assert!(entries.len() >= 30);
        let mut names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), entries.len());
        for entry in &entries {
            assert!(entry.graph.vertex_count() >= 2 || entry.graph.edge_count() >= 1);
        }
        assert!(entries.iter().any(|e| !e.graph.is_connected()));
        assert!(entries.iter().any(|e| e.graph.has_loops()));
    }
}
