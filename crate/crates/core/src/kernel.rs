//! Iterated walk kernels and diagonal return-mass diagnostics.
//!
//! The k-step kernel is defined against the measure: `p_0(x, y) = delta(x, y) / m(y)`
//! and `p_{k+1}(x, y) = sum_z p(x, z) p_k(z, y) m(z)`. All kernels are
//! symmetric, and `sum_y p_k(x, y) m(y) = 1` for every `x` and `k`.
//!
//! The quantity driving everything here is the diagonal mass
//! `p_k(x, x) m(x)`: the probability of returning to the start in exactly
//! `k` steps. Its infimum over vertices at odd `k` vanishes exactly on the
//! graphs that admit no odd closed walk, which ties it to bipartiteness
//! and to the spectrum reaching -1.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Largest vertex count for which dense n-by-n kernels are materialized
/// by the default constructors.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Minimum vertex count before per-row work is distributed across threads.
const PAR_THRESHOLD: usize = 64;

/// Dense k-step kernel `p_k` on all vertex pairs.
#[derive(Clone, Debug)]
pub struct IteratedKernel<'g> {
    graph: &'g WeightedGraph,
    step: usize,
    /// Row-major `n * n` entries, `entries[x * n + y] = p_step(x, y)`.
    entries: Vec<f64>,
}

impl<'g> IteratedKernel<'g> {
    /// The underlying graph.
    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    /// Number of walk steps `k`.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Kernel entry `p_k(x, y)`.
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.graph.vertex_count() + y]
    }

    /// Row `p_k(x, .)`.
    pub fn row(&self, x: usize) -> &[f64] {
        let n = self.graph.vertex_count();
        &self.entries[x * n..(x + 1) * n]
    }

    /// Diagonal mass `p_k(x, x) m(x)`.
    pub fn diag_mass(&self, x: usize) -> f64 {
        self.entry(x, x) * self.graph.measure(x)
    }

    /// Advances the kernel by one step in place:
    /// `p_{k+1}(x, y) = sum_z p(x, z) p_k(z, y) m(z)`, the `z` sum running
    /// over the neighbors of `x` in ascending order.
    pub fn advance(&mut self) {
        let n = self.graph.vertex_count();
        let graph = self.graph;
        let old = &self.entries;
        let mut next = vec![0.0_f64; n * n];
        let fill_row = |x: usize, out: &mut [f64]| {
            let m_x = graph.measure(x);
            for &(z, w) in graph.neighbors(x) {
                // p(x, z) m(z) = mu_xz / m(x)
                let c = w / m_x;
                let src = &old[z * n..(z + 1) * n];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += c * s;
                }
            }
        };
        if n >= PAR_THRESHOLD {
            next.par_chunks_mut(n).enumerate().for_each(|(x, out)| fill_row(x, out));
        } else {
            for (x, out) in next.chunks_mut(n).enumerate() {
                fill_row(x, out);
            }
        }
        self.entries = next;
        self.step += 1;
    }
}

/// Materializes the dense k-step kernel, refusing graphs larger than
/// [`DEFAULT_DENSE_CAP`] vertices.
pub fn iterate_kernel(g: &WeightedGraph, k: usize) -> Result<IteratedKernel<'_>> {
    iterate_kernel_capped(g, k, DEFAULT_DENSE_CAP)
}

/// Materializes the dense k-step kernel under an explicit vertex cap.
pub fn iterate_kernel_capped(g: &WeightedGraph, k: usize, cap: usize) -> Result<IteratedKernel<'_>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::DenseCapExceeded { vertices: n, cap });
    }
    let mut entries = vec![0.0_f64; n * n];
    for x in 0..n {
        entries[x * n + x] = 1.0 / g.measure(x);
    }
    let mut kernel = IteratedKernel { graph: g, step: 0, entries };
    for _ in 0..k {
        kernel.advance();
    }
    Ok(kernel)
}

/// One in-place step of a single kernel row: given `r = p_j(x, .)`,
/// produces `p_{j+1}(x, y) = sum_z p(y, z) r(z) m(z)` for every `y`.
/// This right-sided update agrees with the defining recursion because all
/// iterated kernels are symmetric.
pub(crate) fn advance_row(g: &WeightedGraph, row: &[f64], out: &mut [f64]) {
    for (y, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(z, w) in g.neighbors(y) {
            // p(y, z) m(z) = mu_yz / m(y)
            acc += w * row[z];
        }
        *slot = acc / g.measure(y);
    }
}

/// The kernel row `p_k(x, .)` computed by `k` sparse row updates, with
/// O(k * edges) work and O(n) memory.
pub fn transition_row(g: &WeightedGraph, x: usize, k: usize) -> Result<Vec<f64>> {
    g.check_vertex(x)?;
    let n = g.vertex_count();
    let mut row = vec![0.0_f64; n];
    row[x] = 1.0 / g.measure(x);
    let mut scratch = vec![0.0_f64; n];
    for _ in 0..k {
        advance_row(g, &row, &mut scratch);
        std::mem::swap(&mut row, &mut scratch);
    }
    Ok(row)
}

/// Diagonal mass `p_k(x, x) m(x)` for one vertex.
pub fn diag_mass(g: &WeightedGraph, k: usize, x: usize) -> Result<f64> {
    Ok(transition_row(g, x, k)?[x] * g.measure(x))
}

/// The diagonal masses `p_j(x, x) m(x)` for `j = 0..=k_max` in one sweep.
pub fn diag_mass_profile(g: &WeightedGraph, x: usize, k_max: usize) -> Result<Vec<f64>> {
    g.check_vertex(x)?;
    let n = g.vertex_count();
    let m_x = g.measure(x);
    let mut row = vec![0.0_f64; n];
    row[x] = 1.0 / m_x;
    let mut scratch = vec![0.0_f64; n];
    let mut profile = Vec::with_capacity(k_max + 1);
    profile.push(row[x] * m_x);
    for _ in 0..k_max {
        advance_row(g, &row, &mut scratch);
        std::mem::swap(&mut row, &mut scratch);
        profile.push(row[x] * m_x);
    }
    Ok(profile)
}

/// Infimum of the k-step diagonal mass over all vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LbInfimum {
    pub k: usize,
    /// `min_x p_k(x, x) m(x)`.
    pub value: f64,
    /// Smallest vertex attaining the minimum.
    pub argmin: usize,
}

fn min_cell(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Scans every vertex for the minimal k-step diagonal mass.
pub fn lb_infimum(g: &WeightedGraph, k: usize) -> Result<LbInfimum> {
    let cells: Vec<(f64, usize)> = (0..g.vertex_count())
        .into_par_iter()
        .map(|x| {
            let v = diag_mass(g, k, x).expect("vertex index is in range");
            (v, x)
        })
        .collect();
    let (value, argmin) = cells.into_iter().fold((f64::INFINITY, usize::MAX), min_cell);
    Ok(LbInfimum { k, value, argmin })
}

/// Diagonal-mass infima at every odd step `k = 1, 3, ...` up to `k_max`,
/// computed with a single distance-`k_max` sweep per vertex.
pub fn lb_odd_profile(g: &WeightedGraph, k_max: usize) -> Result<Vec<LbInfimum>> {
    let ks: Vec<usize> = (1..=k_max).step_by(2).collect();
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let profiles: Vec<Vec<f64>> = (0..g.vertex_count())
        .into_par_iter()
        .map(|x| diag_mass_profile(g, x, k_max).expect("vertex index is in range"))
        .collect();
    Ok(ks
        .into_iter()
        .map(|k| {
            let (value, argmin) = profiles
                .iter()
                .enumerate()
                .map(|(x, p)| (p[k], x))
                .fold((f64::INFINITY, usize::MAX), min_cell);
            LbInfimum { k, value, argmin }
        })
        .collect())
}

/// True when the k-step diagonal mass is at least `eps` at every vertex.
pub fn check_lb(g: &WeightedGraph, k: usize, eps: f64) -> Result<bool> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(lb_infimum(g, k)?.value >= eps)
}

/// Result of comparing one closed walk's product against the diagonal mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedPathCheck {
    /// Walk length `k`.
    pub k: usize,
    /// `prod_i p(x_{i-1}, x_i) m(x_i)` along the walk.
    pub product: f64,
    /// `p_k(x_0, x_0) m(x_0)`.
    pub diagonal: f64,
    pub holds: bool,
}

/// Absolute slack allowed when comparing a single walk product against the
/// full diagonal mass it is a summand of.
pub const PATH_PRODUCT_TOL: f64 = 1e-12;

/// Checks that the probability mass of one closed walk is dominated by the
/// k-step diagonal mass at its base point: the diagonal sums the products
/// of all closed k-walks, so any single product is a lower bound.
pub fn closed_path_product_check(g: &WeightedGraph, path: &[usize]) -> Result<ClosedPathCheck> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "closed path needs at least one step, got {} vertices",
            path.len()
        )));
    }
    for &x in path {
        g.check_vertex(x)?;
    }
    let (start, end) = (path[0], path[path.len() - 1]);
    if start != end {
        return Err(Error::PathNotClosed { start, end });
    }
    let mut product = 1.0;
    for pair in path.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        if g.weight(u, v) <= 0.0 {
            return Err(Error::PathStepNotEdge { u, v });
        }
        product *= g.kernel(u, v) * g.measure(v);
    }
    let k = path.len() - 1;
    let diagonal = diag_mass(g, k, start)?;
    Ok(ClosedPathCheck { k, product, diagonal, holds: product <= diagonal + PATH_PRODUCT_TOL })
}

/// Result of the two-step diagonal lower bound against local volume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagVolumeCheck {
    /// `min_x p_2(x, x) m(x) V(x, 2) / m(x)`; at least 1 up to rounding.
    pub min_ratio: f64,
    pub argmin: usize,
    pub holds: bool,
}

/// Verifies `p_2(x, x) m(x) >= m(x) / V(x, 2)` at every vertex, where
/// `V(x, 2)` is the mass of the closed neighborhood. The bound is
/// Cauchy-Schwarz applied to the stochastic row `p(x, .) m(.)`, so it
/// holds on every graph; the check guards the implementation.
pub fn dvl_p2_check(g: &WeightedGraph) -> DiagVolumeCheck {
    let mut best = (f64::INFINITY, usize::MAX);
    for x in 0..g.vertex_count() {
        // p_2(x, x) = sum_z p(x, z)^2 m(z)
        let mut p2 = 0.0;
        let mut volume2 = g.measure(x);
        for &(z, _) in g.neighbors(x) {
            let p = g.kernel(x, z);
            p2 += p * p * g.measure(z);
            if z != x {
                volume2 += g.measure(z);
            }
        }
        let ratio = p2 * volume2;
        best = min_cell(best, (ratio, x));
    }
    DiagVolumeCheck { min_ratio: best.0, argmin: best.1, holds: best.0 >= 1.0 - 1e-12 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn cycle4() -> WeightedGraph {
        WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap()
    }

    #[test]
    fn zero_step_kernel_is_identity_over_measure() {
        let g = triangle();
        let k0 = iterate_kernel(&g, 0).unwrap();
        assert_eq!(k0.entry(0, 0), 0.5);
        assert_eq!(k0.entry(0, 1), 0.0);
        assert_eq!(k0.diag_mass(1), 1.0);
    }

    #[test]
    fn triangle_return_masses() {
        let g = triangle();
        assert_eq!(diag_mass(&g, 2, 0).unwrap(), 0.5);
        assert_eq!(diag_mass(&g, 3, 0).unwrap(), 0.25);
        let k2 = iterate_kernel(&g, 2).unwrap();
        assert_eq!(k2.entry(0, 0), 0.25);
        assert_eq!(k2.diag_mass(0), 0.5);
    }

    #[test]
    fn square_return_masses_and_cross_entries() {
        let g = cycle4();
        assert_eq!(diag_mass(&g, 2, 0).unwrap(), 0.5);
        // Four of the eight length-3 walks from 0 land on 1, each
        // contributing 1/16; stochasticity forces p3(0,1) m(1) = 1/2.
        let k3 = iterate_kernel(&g, 3).unwrap();
        assert_eq!(k3.entry(0, 1), 0.25);
        // No odd closed walk exists on an even cycle: exact zeros.
        assert_eq!(k3.entry(0, 0), 0.0);
        assert_eq!(diag_mass(&g, 5, 2).unwrap(), 0.0);
    }

    #[test]
    fn single_edge_alternates() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0)]).unwrap();
        for k in 0..8 {
            let d = diag_mass(&g, k, 0).unwrap();
            assert_eq!(d, if k % 2 == 0 { 1.0 } else { 0.0 }, "k = {k}");
        }
    }

    #[test]
    fn loop_gives_odd_return_mass() {
        let g = WeightedGraph::from_edges([(0, 0, 1.0), (0, 1, 2.0)]).unwrap();
        // p_1(0, 0) m(0) = mu_00 / m(0)^2 * m(0) = 1/3.
        let d = diag_mass(&g, 1, 0).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dense_kernel_matches_row_sweep() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 3, 1.5), (3, 3, 0.25)]).unwrap();
        let k = iterate_kernel(&g, 6).unwrap();
        for x in 0..g.vertex_count() {
            let row = transition_row(&g, x, 6).unwrap();
            for (y, &value) in row.iter().enumerate() {
                assert!((k.entry(x, y) - value).abs() < 1e-14, "({x}, {y})");
            }
        }
    }

    #[test]
    fn rows_stay_stochastic_and_symmetric() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (1, 3, 3.0)]).unwrap();
        let k = iterate_kernel(&g, 5).unwrap();
        let n = g.vertex_count();
        for x in 0..n {
            let sum: f64 = (0..n).map(|y| k.entry(x, y) * g.measure(y)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {x} sums to {sum}");
            for y in 0..n {
                assert!((k.entry(x, y) - k.entry(y, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn infimum_scan_on_triangle() {
        let g = triangle();
        let lb2 = lb_infimum(&g, 2).unwrap();
        assert_eq!(lb2.value, 0.5);
        assert_eq!(lb2.argmin, 0);
        let lb3 = lb_infimum(&g, 3).unwrap();
        assert_eq!(lb3.value, 0.25);
        assert!(check_lb(&g, 3, 0.25).unwrap());
        assert!(!check_lb(&g, 3, 0.2500001).unwrap());
        assert!(check_lb(&g, 3, -1.0).is_err());
    }

    #[test]
    fn odd_profile_matches_single_calls() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 3, 1.0)]).unwrap();
        let profile = lb_odd_profile(&g, 7).unwrap();
        assert_eq!(profile.len(), 4);
        for cell in &profile {
            let single = lb_infimum(&g, cell.k).unwrap();
            assert_eq!(cell.value, single.value, "k = {}", cell.k);
            assert_eq!(cell.argmin, single.argmin);
        }
    }

    #[test]
    fn closed_walk_product_bounds_diagonal() {
        let g = triangle();
        let check = closed_path_product_check(&g, &[0, 1, 2, 0]).unwrap();
        assert_eq!(check.k, 3);
        assert!((check.product - 0.125).abs() < 1e-15);
        assert_eq!(check.diagonal, 0.25);
        assert!(check.holds);
        // Walk that backtracks an edge.
        let check = closed_path_product_check(&g, &[0, 1, 0]).unwrap();
        assert!(check.holds);
    }

    #[test]
    fn path_check_rejects_bad_paths() {
        let g = triangle();
        assert!(matches!(
            closed_path_product_check(&g, &[0, 1]),
            Err(Error::PathNotClosed { start: 0, end: 1 })
        ));
        assert!(matches!(closed_path_product_check(&g, &[0]), Err(Error::InvalidParameter(_))));
        let g2 = cycle4();
        assert!(matches!(
            closed_path_product_check(&g2, &[0, 2, 0]),
            Err(Error::PathStepNotEdge { u: 0, v: 2 })
        ));
    }

    #[test]
    fn two_step_diagonal_dominates_inverse_volume() {
        for g in [
            triangle(),
            cycle4(),
            WeightedGraph::from_edges([(0, 0, 0.5), (0, 1, 2.0), (1, 2, 0.125)]).unwrap(),
        ] {
            let check = dvl_p2_check(&g);
            assert!(check.holds, "ratio {}", check.min_ratio);
            assert!(check.min_ratio >= 1.0 - 1e-12);
        }
        // Unit triangle: p_2 diag mass 0.5 against m/V = 2/6.
        let check = dvl_p2_check(&triangle());
        assert!((check.min_ratio - 1.5).abs() < 1e-15);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let g = triangle();
        assert!(matches!(
            iterate_kernel_capped(&g, 1, 2),
            Err(Error::DenseCapExceeded { vertices: 3, cap: 2 })
        ));
    }
}
