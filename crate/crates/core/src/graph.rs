//! Finite weighted graphs carrying a reversible random walk.
//!
//! A graph is a finite symmetric weight family `mu_xy > 0` on unordered
//! vertex pairs (self-loops allowed). Each vertex gets the measure
//! `m(x) = sum over neighbors y of mu_xy`, with a loop weight counted once,
//! and the walk kernel is `p(x, y) = mu_xy / (m(x) m(y))`. The kernel is
//! symmetric, so the walk operator `P f(x) = sum_y p(x, y) f(y) m(y)` is
//! self-adjoint on l^2(m) and row-stochastic against the measure:
//! `sum_y p(x, y) m(y) = 1`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Finite weighted graph with positive vertex measures.
///
/// Vertices are dense indices `0..vertex_count()`. Adjacency lists are
/// sorted by neighbor index so that all summations run in a fixed
/// ascending order, which keeps every floating-point result reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    /// `adjacency[x]` holds `(y, mu_xy)` sorted by `y`; a loop appears once.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// `measure[x] = m(x)`, always positive.
    measure: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a graph from an edge list with arbitrary nonnegative vertex
    /// ids. Ids are compacted to `0..n` in ascending id order. Duplicate
    /// listings of the same unordered pair must carry the same weight.
    pub fn from_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let edges: Vec<(usize, usize, f64)> = edges.into_iter().collect();
        let mut ids: Vec<usize> = edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let dense = |id: usize| ids.binary_search(&id).expect("id was collected above");
        let compacted = edges.into_iter().map(|(u, v, w)| (dense(u), dense(v), w));
        Self::from_edges_on(ids.len(), compacted)
    }

    /// Builds a graph on exactly `vertex_count` vertices without id
    /// compaction. Every vertex must touch at least one edge, since a
    /// vertex without edges would have zero measure.
    pub fn from_edges_on<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertex_count];
        for (u, v, w) in edges {
            for &z in &[u, v] {
                if z >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: z, count: vertex_count });
                }
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            match adjacency[a].iter().find(|&&(y, _)| y == b) {
                Some(&(_, old)) if old == w => {}
                Some(&(_, old)) => {
                    return Err(Error::ConflictingWeight { u: a, v: b, first: old, second: w })
                }
                None => {
                    adjacency[a].push((b, w));
                    if a != b {
                        adjacency[b].push((a, w));
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(y, _)| y);
        }
        let mut measure = vec![0.0_f64; vertex_count];
        for (x, list) in adjacency.iter().enumerate() {
            let mut m = 0.0;
            for &(_, w) in list {
                m += w;
            }
            if m <= 0.0 {
                return Err(Error::IsolatedVertex { vertex: x });
            }
            measure[x] = m;
        }
        Ok(Self { adjacency, measure })
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of distinct edges, with each loop counted once.
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Vertex measure `m(x)`.
    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    /// All vertex measures, indexed by vertex.
    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    /// Total mass `m(V)`, summed in ascending vertex order.
    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Neighbors of `x` as `(y, mu_xy)` pairs sorted by `y`; includes
    /// `(x, mu_xx)` when `x` carries a loop.
    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    /// Weight `mu_xy`, or 0 when `x` and `y` are not adjacent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        match self.adjacency[x].binary_search_by_key(&y, |&(z, _)| z) {
            Ok(i) => self.adjacency[x][i].1,
            Err(_) => 0.0,
        }
    }

    /// Kernel entry `p(x, y) = mu_xy / (m(x) m(y))`.
    pub fn kernel(&self, x: usize, y: usize) -> f64 {
        self.weight(x, y) / (self.measure[x] * self.measure[y])
    }

    /// Distinct edges `(u, v, mu_uv)` with `u <= v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter_map(move |&(v, w)| (u <= v).then_some((u, v, w))))
    }

    /// True when some vertex carries a self-loop.
    pub fn has_loops(&self) -> bool {
        (0..self.vertex_count()).any(|x| self.weight(x, x) > 0.0)
    }

    /// Largest number of neighbors over all vertices, a loop counting as
    /// a neighbor. This is the local finiteness bound entering additive
    /// kernel estimates.
    pub fn local_finiteness_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Hop distances from `start` along positive-weight edges;
    /// `None` marks unreachable vertices.
    pub fn hop_distances(&self, start: usize) -> Result<Vec<Option<u32>>> {
        self.check_vertex(start)?;
        let mut dist = vec![None; self.vertex_count()];
        dist[start] = Some(0);
        let mut frontier = vec![start];
        let mut next = Vec::new();
        let mut level = 0u32;
        while !frontier.is_empty() {
            level += 1;
            for &x in &frontier {
                for &(y, _) in self.neighbors(x) {
                    if dist[y].is_none() {
                        dist[y] = Some(level);
                        next.push(y);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        Ok(dist)
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        self.hop_distances(0)
            .map(|d| d.iter().all(Option::is_some))
            .unwrap_or(false)
    }

    /// One step of the walk: `P f(x) = sum_y p(x, y) f(y) m(y)`, the sum
    /// running over neighbors in ascending order.
    pub fn apply_markov(&self, f: &VertexFunction) -> Result<VertexFunction> {
        self.check_len(f)?;
        let mut out = vec![0.0; self.vertex_count()];
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(y, w) in self.neighbors(x) {
                // p(x, y) m(y) = mu_xy / m(x)
                acc += w / self.measure[x] * f.values[y];
            }
            *slot = acc;
        }
        Ok(VertexFunction { values: out })
    }

    /// Laplacian `(I - P) f`.
    pub fn apply_laplacian(&self, f: &VertexFunction) -> Result<VertexFunction> {
        let pf = self.apply_markov(f)?;
        let values = f
            .values
            .iter()
            .zip(pf.values.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(VertexFunction { values })
    }

    /// Norm in `l^q(m)`: `(sum_x |f(x)|^q m(x))^(1/q)`, with the
    /// `q = infinity` case reading `max_x |f(x)|`.
    pub fn lp_norm(&self, f: &VertexFunction, q: LpExponent) -> Result<f64> {
        self.check_len(f)?;
        match q {
            LpExponent::Infinity => {
                Ok(f.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())))
            }
            LpExponent::Finite(q) => {
                if !(q.is_finite() && q >= 1.0) {
                    return Err(Error::InvalidExponent(q));
                }
                let mut acc = 0.0;
                for (x, v) in f.values.iter().enumerate() {
                    acc += v.abs().powf(q) * self.measure[x];
                }
                Ok(acc.powf(1.0 / q))
            }
        }
    }

    /// Inner product `<f, h> = sum_x f(x) h(x) m(x)`.
    pub fn inner_product(&self, f: &VertexFunction, h: &VertexFunction) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(h)?;
        let mut acc = 0.0;
        for x in 0..self.vertex_count() {
            acc += f.values[x] * h.values[x] * self.measure[x];
        }
        Ok(acc)
    }

    pub(crate) fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: x, count: self.vertex_count() })
        }
    }

    pub(crate) fn check_len(&self, f: &VertexFunction) -> Result<()> {
        if f.len() == self.vertex_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.vertex_count(), got: f.len() })
        }
    }
}

/// Real-valued function on the vertices of a graph, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    /// Wraps a value vector, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (vertex, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { vertex, value });
            }
        }
        Ok(Self { values })
    }

    /// Constant function `c` on `n` vertices.
    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    /// Zero function on `n` vertices.
    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    /// Indicator of `set` on `n` vertices.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut values = vec![0.0; n];
        for &x in set {
            values[x] = 1.0;
        }
        Self { values }
    }

    /// Builds pointwise from a closure.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self { values }
    }
}

impl std::ops::Index<usize> for VertexFunction {
    type Output = f64;
    fn index(&self, x: usize) -> &f64 {
        &self.values[x]
    }
}

/// Exponent for `l^q(m)` norms: a finite `q >= 1` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    /// Validates a finite exponent.
    pub fn finite(q: f64) -> Result<Self> {
        if q.is_finite() && q >= 1.0 {
            Ok(Self::Finite(q))
        } else {
            Err(Error::InvalidExponent(q))
        }
    }
}

impl FromStr for LpExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "oo" => Ok(Self::Infinity),
            t => {
                let q: f64 = t.parse().map_err(|_| Error::InvalidExponent(f64::NAN))?;
                Self::finite(q)
            }
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => write!(f, "inf"),
            Self::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Certified geometric constants of a graph: the local finiteness degree
/// together with volume-growth constants measured over radii `1..=scan_radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphConstants {
    pub vertex_count: usize,
    /// Largest neighbor count over all vertices.
    pub max_degree: usize,
    /// Smallest constant with `V(x, 2) <= c * m(x)` for all vertices.
    pub local_doubling: f64,
    /// Smallest constant with `V(x, 2r) <= c * V(x, r)` over the scan.
    pub doubling: f64,
    /// Smallest constant with `V(x, r) <= c * r^d * m(x)` over the scan,
    /// at the fitted exponent `d`.
    pub polynomial_constant: f64,
    /// Least-squares growth exponent of `max_x V(x, r) / m(x)` in `r`.
    pub growth_exponent: f64,
    /// Largest radius entering the doubling and polynomial scans.
    pub scan_radius: usize,
}

// ---------------------------------------------------------------------------
// Edge-list text format: one `u v weight` triple per line, `#` starts a
// comment, blank lines are skipped. Duplicate listings must agree.
// ---------------------------------------------------------------------------

/// Parses the edge-list text format.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::EdgeListSyntax {
                line,
                detail: format!("expected `u v weight`, found {} fields", tokens.len()),
            });
        }
        let u: usize = tokens[0].parse().map_err(|e| Error::EdgeListSyntax {
            line,
            detail: format!("bad vertex id {:?}: {e}", tokens[0]),
        })?;
        let v: usize = tokens[1].parse().map_err(|e| Error::EdgeListSyntax {
            line,
            detail: format!("bad vertex id {:?}: {e}", tokens[1]),
        })?;
        let w: f64 = tokens[2].parse().map_err(|e| Error::EdgeListSyntax {
            line,
            detail: format!("bad weight {:?}: {e}", tokens[2]),
        })?;
        edges.push((u, v, w));
    }
    WeightedGraph::from_edges(edges)
}

/// Reads and parses an edge-list file.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Canonical edge-list text: one `u v weight` line per distinct edge with
/// `u <= v`, sorted lexicographically. Round-trips through [`parse_edge_list`].
pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        out.push_str(&format!("{u} {v} {w:?}\n"));
    }
    out
}

/// Writes the canonical edge-list text to a file.
pub fn write_edge_list(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn triangle_measures_and_kernel() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.measures(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.kernel(0, 1), 0.25);
        assert_eq!(g.kernel(0, 0), 0.0);
        assert_eq!(g.total_mass(), 6.0);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.local_finiteness_degree(), 2);
        assert!(!g.has_loops());
        assert!(g.is_connected());
    }

    #[test]
    fn loop_counted_once_in_measure() {
        // Loop of weight 1 at vertex 0 plus an edge of weight 2 to vertex 1.
        let g = WeightedGraph::from_edges([(0, 0, 1.0), (0, 1, 2.0)]).unwrap();
        assert_eq!(g.measure(0), 3.0);
        assert_eq!(g.measure(1), 2.0);
        assert_eq!(g.kernel(0, 0), 1.0 / 9.0);
        assert_eq!(g.kernel(0, 1), 2.0 / 6.0);
        assert!(g.has_loops());
        assert_eq!(g.local_finiteness_degree(), 2);
    }

    #[test]
    fn row_sums_are_one_against_measure() {
        let g = WeightedGraph::from_edges([(0, 0, 0.5), (0, 1, 2.0), (1, 2, 0.25), (2, 3, 4.0)])
            .unwrap();
        for x in 0..g.vertex_count() {
            let sum: f64 = (0..g.vertex_count()).map(|y| g.kernel(x, y) * g.measure(y)).sum();
            assert!((sum - 1.0).abs() < 1e-15, "row {x} sums to {sum}");
        }
    }

    #[test]
    fn ids_are_compacted_in_ascending_order() {
        let g = WeightedGraph::from_edges([(10, 7, 1.0), (7, 3, 2.0)]).unwrap();
        // Original ids 3, 7, 10 become 0, 1, 2.
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.weight(0, 1), 2.0);
        assert_eq!(g.weight(1, 2), 1.0);
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let err = WeightedGraph::from_edges([(0, 1, 1.0), (1, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::ConflictingWeight { .. }), "{err}");
        // Agreeing duplicates collapse to one edge.
        let g = WeightedGraph::from_edges([(0, 1, 1.5), (1, 0, 1.5)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.measure(0), 1.5);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        for w in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = WeightedGraph::from_edges([(0, 1, w)]).unwrap_err();
            assert!(matches!(err, Error::InvalidWeight { .. }), "weight {w}");
        }
    }

    #[test]
    fn isolated_vertex_is_rejected() {
        let err = WeightedGraph::from_edges_on(3, [(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IsolatedVertex { vertex: 2 }), "{err}");
    }

    #[test]
    fn empty_graph_is_rejected() {
        assert!(matches!(WeightedGraph::from_edges([]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn markov_step_on_path() {
        // Path 0 - 1 - 2 with unit weights: m = (1, 2, 1).
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.measures(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.kernel(0, 1), 0.5);
        let f = VertexFunction::new(vec![0.0, 1.0, 2.0]).unwrap();
        let pf = g.apply_markov(&f).unwrap();
        assert_eq!(pf.values(), &[1.0, 1.0, 1.0]);
        let lap = g.apply_laplacian(&f).unwrap();
        assert_eq!(lap.values(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn markov_fixes_constants() {
        let g = triangle();
        let one = VertexFunction::constant(3, 1.0);
        let pone = g.apply_markov(&one).unwrap();
        for &v in pone.values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
        let lap = g.apply_laplacian(&one).unwrap();
        for &v in lap.values() {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn norms_on_triangle() {
        let g = triangle();
        let one = VertexFunction::constant(3, 1.0);
        let n2 = g.lp_norm(&one, LpExponent::Finite(2.0)).unwrap();
        assert!((n2 - 6.0_f64.sqrt()).abs() < 1e-15);
        let f = VertexFunction::new(vec![1.0, -2.0, 0.0]).unwrap();
        assert_eq!(g.lp_norm(&f, LpExponent::Infinity).unwrap(), 2.0);
        let n1 = g.lp_norm(&f, LpExponent::Finite(1.0)).unwrap();
        assert!((n1 - 6.0).abs() < 1e-15);
        assert!(g.lp_norm(&f, LpExponent::Finite(0.5)).is_err());
        assert!(LpExponent::finite(0.99).is_err());
    }

    #[test]
    fn self_adjoint_on_l2m() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 2, 1.0)])
            .unwrap();
        let f = VertexFunction::new(vec![1.0, -1.0, 2.0]).unwrap();
        let h = VertexFunction::new(vec![0.5, 3.0, -2.0]).unwrap();
        let lhs = g.inner_product(&g.apply_markov(&f).unwrap(), &h).unwrap();
        let rhs = g.inner_product(&f, &g.apply_markov(&h).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn hop_distances_on_path() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let d = g.hop_distances(0).unwrap();
        assert_eq!(d, vec![Some(0), Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn disconnected_graph_detected() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!g.is_connected());
        let d = g.hop_distances(0).unwrap();
        assert_eq!(d[2], None);
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "# weighted triangle with a loop\n0 1 1.0\n1 2 0.5  # trailing comment\n\n2 0 2.0\n2 2 1.25\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.measure(2), 3.75);
        let canon = format_edge_list(&g);
        let g2 = parse_edge_list(&canon).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = parse_edge_list("0 1 1.0\n0 1\n").unwrap_err();
        match err {
            Error::EdgeListSyntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        let err = parse_edge_list("0 1 1.0\n1 2 fast\n").unwrap_err();
        assert!(matches!(err, Error::EdgeListSyntax { line: 2, .. }));
        let err = parse_edge_list("0 1 1.0\n0 1 2.0\n").unwrap_err();
        assert!(matches!(err, Error::ConflictingWeight { .. }));
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("2".parse::<LpExponent>().unwrap(), LpExponent::Finite(2.0));
        assert!("0.5".parse::<LpExponent>().is_err());
        assert!("fast".parse::<LpExponent>().is_err());
    }
}
