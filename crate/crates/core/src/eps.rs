//! Threshold geometry of the walk kernel.
//!
//! Two vertices are eps-close when `p(x, y) * min(m(x), m(y)) > eps`
//! (strict). At `eps = 0` this recovers plain adjacency; raising `eps`
//! deletes weak edges and can disconnect the graph or leave vertices
//! without any eps-neighbor. A vertex with `p(x, x) m(x) > eps` is
//! eps-close to itself, which counts as an odd closed walk of length one.
//!
//! Balls, boundaries, and two-colorings here are all taken with respect
//! to the eps-edges, and certificates of failed two-colorings are
//! explicit closed walks of odd length.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest set size accepted by the exhaustive odd-walk search.
pub const ODD_WALK_ORACLE_MAX: usize = 16;

/// A graph filtered to its eps-edges.
#[derive(Clone, Debug)]
pub struct EpsView<'g> {
    graph: &'g WeightedGraph,
    eps: f64,
    /// `adjacency[x]` lists the eps-neighbors of `x` in ascending order;
    /// `x` itself appears when it carries an eps-loop.
    adjacency: Vec<Vec<usize>>,
}

/// Builds the view of all pairs with `p(x, y) * min(m(x), m(y)) > eps`.
pub fn eps_view(g: &WeightedGraph, eps: f64) -> Result<EpsView<'_>> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let adjacency = (0..g.vertex_count())
        .map(|x| {
            g.neighbors(x)
                .iter()
                .filter_map(|&(y, _)| {
                    let score = g.kernel(x, y) * g.measure(x).min(g.measure(y));
                    (score > eps).then_some(y)
                })
                .collect()
        })
        .collect();
    Ok(EpsView { graph: g, eps, adjacency })
}

impl<'g> EpsView<'g> {
    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Eps-neighbors of `x`, ascending; contains `x` when `x` has an eps-loop.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    /// True when `x` and `y` are eps-close.
    pub fn are_close(&self, x: usize, y: usize) -> bool {
        self.adjacency[x].binary_search(&y).is_ok()
    }

    /// True when `x` is eps-close to itself.
    pub fn has_loop(&self, x: usize) -> bool {
        self.are_close(x, x)
    }

    /// Number of eps-edges, loops counted once.
    pub fn edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(x, list)| list.iter().filter(|&&y| y >= x).count())
            .sum()
    }

    /// BFS distances along eps-edges; `None` marks unreachable vertices.
    pub fn distances(&self, start: usize) -> Result<Vec<Option<u32>>> {
        self.graph.check_vertex(start)?;
        let mut dist = vec![None; self.adjacency.len()];
        dist[start] = Some(0u32);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let next = dist[x].expect("queued vertices have distances") + 1;
            for &y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(next);
                    queue.push_back(y);
                }
            }
        }
        Ok(dist)
    }

    /// True when `walk` is a closed walk of odd length along eps-edges.
    pub fn is_closed_odd_walk(&self, walk: &[usize]) -> bool {
        if walk.len() < 2 || !walk.len().is_multiple_of(2) || walk[0] != walk[walk.len() - 1] {
            // An odd number of steps means an even number of vertices.
            return false;
        }
        walk.windows(2).all(|pair| pair[0] < self.adjacency.len() && self.are_close(pair[0], pair[1]))
    }

    fn member_mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.adjacency.len()];
        for &x in set {
            self.graph.check_vertex(x)?;
            mask[x] = true;
        }
        Ok(mask)
    }
}

/// Distance along eps-edges, `None` when `y` is unreachable from `x`.
pub fn eps_distance(view: &EpsView<'_>, x: usize, y: usize) -> Result<Option<usize>> {
    view.graph.check_vertex(y)?;
    Ok(view.distances(x)?[y].map(|d| d as usize))
}

/// Ball `{y : d_eps(center, y) < radius}` in the eps-metric.
///
/// The strict inequality makes `radius = 1` the singleton `{center}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsBall {
    pub center: usize,
    pub radius: usize,
    pub eps: f64,
    /// Ball members in ascending order.
    pub members: Vec<usize>,
}

impl EpsBall {
    /// Total measure of the members.
    pub fn mass(&self, g: &WeightedGraph) -> f64 {
        self.members.iter().map(|&x| g.measure(x)).sum()
    }
}

/// Collects the eps-ball of the given radius around `center`.
pub fn eps_ball(view: &EpsView<'_>, center: usize, radius: usize) -> Result<EpsBall> {
    if radius == 0 {
        return Err(Error::InvalidRadius(0));
    }
    let dist = view.distances(center)?;
    let members = (0..dist.len())
        .filter(|&y| matches!(dist[y], Some(d) if (d as usize) < radius))
        .collect();
    Ok(EpsBall { center, radius, eps: view.eps, members })
}

/// Inner vertex boundary: the members of `set` having an eps-neighbor
/// outside `set`. A member with no eps-neighbors at all is interior by
/// this reading, not boundary.
pub fn eps_boundary(view: &EpsView<'_>, set: &[usize]) -> Result<Vec<usize>> {
    let mask = view.member_mask(set)?;
    Ok((0..mask.len())
        .filter(|&x| mask[x] && view.neighbors(x).iter().any(|&y| !mask[y]))
        .collect())
}

/// Outcome of trying to two-color a vertex set along its eps-edges.
#[derive(Clone, Debug, PartialEq)]
pub enum BipartiteCertificate {
    /// A valid two-coloring. In every eps-connected component of the set
    /// the smallest vertex sits in `class0`, and both classes are sorted.
    Bipartite { class0: Vec<usize>, class1: Vec<usize> },
    /// A closed walk of odd length along eps-edges inside the set,
    /// listed as `witness[0], ..., witness[len-1] = witness[0]`.
    NotBipartite { witness: Vec<usize> },
}

impl BipartiteCertificate {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Self::Bipartite { .. })
    }
}

/// Two-colors `set` along the eps-edges joining its members, or exhibits
/// an odd closed walk within the set when no coloring exists.
///
/// Components are rooted at their smallest vertex and the root always
/// lands in class 0, which pins the otherwise arbitrary class swap.
pub fn bipartition(view: &EpsView<'_>, set: &[usize]) -> Result<BipartiteCertificate> {
    let mask = view.member_mask(set)?;
    let n = mask.len();
    const UNSET: u8 = u8::MAX;
    let mut color = vec![UNSET; n];
    let mut parent = vec![usize::MAX; n];
    let tree_path = |parent: &[usize], mut x: usize| {
        // Walks parent pointers up to the self-parented root, then reverses.
        let mut path = vec![x];
        while parent[x] != x {
            x = parent[x];
            path.push(x);
        }
        path.reverse();
        path
    };
    for root in 0..n {
        if !mask[root] || color[root] != UNSET {
            continue;
        }
        color[root] = 0;
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in view.neighbors(u) {
                if !mask[v] {
                    continue;
                }
                if color[v] == UNSET {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    // Tree path root..u, the conflicting edge (u, v), and
                    // the reversed tree path v..root form a closed walk of
                    // length d(u) + 1 + d(v), odd because the colors agree.
                    // For an eps-loop (v == u) this degenerates to the walk
                    // crossing the loop edge once.
                    let mut witness = tree_path(&parent, u);
                    let mut back = tree_path(&parent, v);
                    back.reverse();
                    witness.extend(back);
                    debug_assert!(view.is_closed_odd_walk(&witness));
                    return Ok(BipartiteCertificate::NotBipartite { witness });
                }
            }
        }
    }
    let class0 = (0..n).filter(|&x| mask[x] && color[x] == 0).collect();
    let class1 = (0..n).filter(|&x| mask[x] && color[x] == 1).collect();
    Ok(BipartiteCertificate::Bipartite { class0, class1 })
}

/// Exhaustive search for a closed walk of odd length within `set`,
/// independent of the coloring route: a depth-first sweep over the
/// memoized `(vertex, parity)` states reachable from each member.
///
/// Restricted to sets of at most [`ODD_WALK_ORACLE_MAX`] vertices.
pub fn odd_walk_oracle(view: &EpsView<'_>, set: &[usize]) -> Result<bool> {
    let mask = view.member_mask(set)?;
    let size = mask.iter().filter(|&&b| b).count();
    if size > ODD_WALK_ORACLE_MAX {
        return Err(Error::SubsetTooLarge { got: size, max: ODD_WALK_ORACLE_MAX });
    }
    let n = mask.len();
    for s in 0..n {
        if !mask[s] {
            continue;
        }
        let mut visited = vec![[false; 2]; n];
        visited[s][0] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((v, par)) = stack.pop() {
            let next_par = 1 - par;
            for &w in view.neighbors(v) {
                if !mask[w] {
                    continue;
                }
                if w == s && next_par == 1 {
                    return Ok(true);
                }
                if !visited[w][next_par] {
                    visited[w][next_par] = true;
                    stack.push((w, next_par));
                }
            }
        }
    }
    Ok(false)
}

/// Splits a ball by the parity of the eps-distance to its center:
/// even distances land in the first class (which contains the center),
/// odd distances in the second.
pub fn parity_partition_of_ball(
    view: &EpsView<'_>,
    ball: &EpsBall,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if ball.eps != view.eps {
        return Err(Error::ThresholdMismatch { ball_eps: ball.eps, view_eps: view.eps });
    }
    let dist = view.distances(ball.center)?;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for &x in &ball.members {
        view.graph.check_vertex(x)?;
        match dist[x] {
            None => return Err(Error::UnreachableMember { vertex: x, center: ball.center }),
            Some(d) if d % 2 == 0 => even.push(x),
            Some(_) => odd.push(x),
        }
    }
    Ok((even, odd))
}
