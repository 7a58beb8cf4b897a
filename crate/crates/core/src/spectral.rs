//! Spectrum of the walk operator and the gap at -1.
//!
//! `P` is self-adjoint on l^2(m) and unitarily equivalent to the symmetric
//! matrix `A(x, y) = mu_xy / sqrt(m(x) m(y))`, whose eigenvalues lie in
//! `[-1, 1]`. The distance `1 + lambda_min` from the bottom of the
//! spectrum to -1 controls the analyticity constants
//! `a_n = n * max |1 - theta| |theta|^(n-1)` and vanishes exactly on
//! connected loop-free graphs that are bipartite, which in turn is
//! equivalent to all odd-step return masses vanishing. The equivalence
//! report measures every leg of that equivalence on one graph and checks
//! the verdicts against each other.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eps::{
    bipartition, eps_ball, eps_boundary, eps_view, parity_partition_of_ball, EpsBall, EpsView,
};
use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::kernel::{lb_odd_profile, LbInfimum, DEFAULT_DENSE_CAP};
use crate::volume::local_doubling_constant;

/// Gaps below this threshold are treated as a spectrum reaching -1.
pub const GAP_ZERO_TOL: f64 = 1e-10;

/// Diagonal masses below this threshold are treated as exact zeros.
pub const DIAG_ZERO_TOL: f64 = 1e-12;

/// Eigendecomposition of the symmetrized walk matrix, reusable as a
/// functional calculus for `P` on l^2(m).
#[derive(Clone, Debug)]
pub struct ConjugateEigen {
    /// Eigenvalues in ascending order.
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of the symmetrized matrix, one column per
    /// eigenvalue, in the same order.
    vectors: DMatrix<f64>,
    sqrt_m: Vec<f64>,
}

impl ConjugateEigen {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Coefficients of `f` in the eigenbasis, after the unitary map
    /// `f -> sqrt(m) f` from l^2(m) onto plain l^2.
    pub fn coefficients(&self, f: &VertexFunction) -> Result<Vec<f64>> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: f.len() });
        }
        let u = DVector::from_iterator(
            self.len(),
            f.values().iter().zip(&self.sqrt_m).map(|(v, s)| v * s),
        );
        Ok((self.vectors.transpose() * u).data.into())
    }

    /// Applies `phi(P)` to `f` through the eigendecomposition.
    pub fn apply_spectral(
        &self,
        f: &VertexFunction,
        phi: impl Fn(f64) -> f64,
    ) -> Result<VertexFunction> {
        let coeffs = self.coefficients(f)?;
        let scaled = DVector::from_iterator(
            self.len(),
            coeffs.iter().zip(&self.eigenvalues).map(|(c, &l)| c * phi(l)),
        );
        let v = &self.vectors * scaled;
        let values = v.iter().zip(&self.sqrt_m).map(|(v, s)| v / s).collect();
        Ok(VertexFunction::from_raw(values))
    }
}

/// Symmetrized walk matrix `A(x, y) = mu_xy / sqrt(m(x) m(y))`.
pub fn conjugate_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut a = DMatrix::zeros(n, n);
    for x in 0..n {
        for &(y, w) in g.neighbors(x) {
            a[(x, y)] = w / (g.measure(x) * g.measure(y)).sqrt();
        }
    }
    a
}

/// Full eigendecomposition, refusing graphs above `cap` vertices.
pub fn conjugate_eigen_capped(g: &WeightedGraph, cap: usize) -> Result<ConjugateEigen> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::DenseCapExceeded { vertices: n, cap });
    }
    let eigen = nalgebra::SymmetricEigen::new(conjugate_matrix(g));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[i].partial_cmp(&eigen.eigenvalues[j]).expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eigen.eigenvectors[(r, order[c])]);
    let sqrt_m = g.measures().iter().map(|m| m.sqrt()).collect();
    Ok(ConjugateEigen { eigenvalues, vectors, sqrt_m })
}

/// Full eigendecomposition under the default dense cap.
pub fn conjugate_eigen(g: &WeightedGraph) -> Result<ConjugateEigen> {
    conjugate_eigen_capped(g, DEFAULT_DENSE_CAP)
}

/// All eigenvalues of the walk operator, ascending.
pub fn spectrum(g: &WeightedGraph) -> Result<Vec<f64>> {
    Ok(conjugate_eigen(g)?.eigenvalues)
}

/// `1 + lambda_min`, the distance from the bottom of the spectrum to -1.
pub fn gap_at_minus_one(g: &WeightedGraph) -> Result<f64> {
    Ok(1.0 + spectrum(g)?[0])
}

/// `a_n = n * max over the spectrum of (1 - theta) |theta|^(n-1)` for
/// `n = 1..=n_max`; these are the exact l^2(m) norms `n ||Delta P^(n-1)||`.
/// `|theta|^0 = 1` even at `theta = 0`.
pub fn analyticity_from_eigenvalues(eigenvalues: &[f64], n_max: usize) -> Vec<f64> {
    (1..=n_max)
        .map(|n| {
            let best = eigenvalues
                .iter()
                .map(|&t| (1.0 - t) * t.abs().powi(n as i32 - 1))
                .fold(0.0_f64, f64::max);
            n as f64 * best
        })
        .collect()
}

/// Analyticity constants computed from the full spectrum.
pub fn analyticity_constants(g: &WeightedGraph, n_max: usize) -> Result<Vec<f64>> {
    Ok(analyticity_from_eigenvalues(&spectrum(g)?, n_max))
}

fn l2m_norm(g: &WeightedGraph, values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(x, v)| v * v * g.measure(x))
        .sum::<f64>()
        .sqrt()
}

fn seeded_unit_vector(g: &WeightedGraph, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..g.vertex_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = l2m_norm(g, &v);
    for value in &mut v {
        *value /= norm;
    }
    v
}

/// Largest and smallest eigenvalues estimated by power iteration on the
/// positive semidefinite shifts `I + P` and `I - P`. Works at any graph
/// size; accuracy is governed by `tol` and `max_iters`.
pub fn extremal_eigenvalues(
    g: &WeightedGraph,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    let shifted_radius = |sign: f64| -> Result<f64> {
        let mut v = seeded_unit_vector(g, seed);
        let mut rayleigh = 0.0_f64;
        for _ in 0..max_iters {
            let f = VertexFunction::from_raw(v.clone());
            let pf = g.apply_markov(&f)?;
            // w = v + sign * P v
            let w: Vec<f64> =
                v.iter().zip(pf.values()).map(|(a, b)| a + sign * b).collect();
            let next = g.inner_product(&VertexFunction::from_raw(w.clone()), &f)?;
            let norm = l2m_norm(g, &w);
            if norm == 0.0 {
                return Ok(0.0);
            }
            v = w.into_iter().map(|x| x / norm).collect();
            if (next - rayleigh).abs() < tol {
                return Ok(next);
            }
            rayleigh = next;
        }
        Ok(rayleigh)
    };
    let lambda_max = shifted_radius(1.0)? - 1.0;
    let lambda_min = 1.0 - shifted_radius(-1.0)?;
    Ok((lambda_min, lambda_max))
}

/// Power-iteration estimate of `||Delta P^(n-1)||` on l^2(m), run on the
/// square of the operator so the iteration is positive semidefinite.
pub fn delta_power_norm_estimate(
    g: &WeightedGraph,
    n: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("operator power needs n >= 1".into()));
    }
    let apply_b = |values: &[f64]| -> Result<Vec<f64>> {
        let mut f = VertexFunction::from_raw(values.to_vec());
        for _ in 0..n - 1 {
            f = g.apply_markov(&f)?;
        }
        let lap = g.apply_laplacian(&f)?;
        Ok(lap.into_values())
    };
    let mut v = seeded_unit_vector(g, seed);
    let mut estimate = 0.0_f64;
    for _ in 0..max_iters {
        let bv = apply_b(&v)?;
        let bbv = apply_b(&bv)?;
        let norm = l2m_norm(g, &bbv);
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = g
            .inner_product(
                &VertexFunction::from_raw(bbv.clone()),
                &VertexFunction::from_raw(v.clone()),
            )?
            .max(0.0)
            .sqrt();
        v = bbv.into_iter().map(|x| x / norm).collect();
        if (next - estimate).abs() < tol {
            return Ok(next);
        }
        estimate = next;
    }
    Ok(estimate)
}

/// A signed indicator witness built from a two-colored ball.
#[derive(Clone, Debug)]
pub struct WitnessFunction {
    /// `+1` on the first class, `-1` on the second, `0` elsewhere.
    pub function: VertexFunction,
    pub ball: EpsBall,
    pub q: f64,
    /// `||(I + P) f||_q^q / ||f||_q^q`, computed with the full-graph walk.
    pub defect: f64,
}

/// Builds the signed indicator of a two-colored ball and measures how far
/// it is from being a `-1` eigenfunction. Small defects certify spectrum
/// near `-1` through the l^q functional calculus.
pub fn build_witness(
    view: &EpsView<'_>,
    ball: &EpsBall,
    class0: &[usize],
    class1: &[usize],
    q: f64,
) -> Result<WitnessFunction> {
    if ball.eps != view.eps() {
        return Err(Error::ThresholdMismatch { ball_eps: ball.eps, view_eps: view.eps() });
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    if ball.members.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = view.graph();
    let mut merged: Vec<usize> = class0.iter().chain(class1).copied().collect();
    merged.sort_unstable();
    if merged.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::ClassesDoNotPartition { detail: "classes overlap".into() });
    }
    if merged != ball.members {
        return Err(Error::ClassesDoNotPartition {
            detail: "union of classes differs from the ball members".into(),
        });
    }
    let mut values = vec![0.0_f64; g.vertex_count()];
    for &x in class0 {
        g.check_vertex(x)?;
        values[x] = 1.0;
    }
    for &x in class1 {
        g.check_vertex(x)?;
        values[x] = -1.0;
    }
    let function = VertexFunction::from_raw(values);
    let pf = g.apply_markov(&function)?;
    let mut numerator = 0.0_f64;
    let mut denominator = 0.0_f64;
    for x in 0..g.vertex_count() {
        let sum = function[x] + pf[x];
        numerator += sum.abs().powf(q) * g.measure(x);
        denominator += function[x].abs().powf(q) * g.measure(x);
    }
    Ok(WitnessFunction { function, ball: ball.clone(), q, defect: numerator / denominator })
}

/// A witness defect compared against its certified upper bound.
#[derive(Clone, Debug)]
pub struct DefectBoundCheck {
    pub witness: WitnessFunction,
    /// `2/p + 2^(q+1) eps (c_dvl + max_degree)`.
    pub bound: f64,
    pub holds: bool,
}

/// Builds the parity witness on a ball and checks its defect against the
/// bound `2/p + 2^(q+1) eps (c_dvl + max_degree)`.
///
/// Two certificates are required: the ball's inner eps-boundary must
/// carry at most a `1/p` fraction of the ball mass, and the ball must be
/// two-colorable along its eps-edges.
pub fn defect_bound_check(
    view: &EpsView<'_>,
    ball: &EpsBall,
    p: usize,
    q: f64,
) -> Result<DefectBoundCheck> {
    if p == 0 {
        return Err(Error::InvalidParameter("boundary fraction needs p >= 1".into()));
    }
    let g = view.graph();
    let boundary = eps_boundary(view, &ball.members)?;
    let boundary_mass: f64 = boundary.iter().map(|&x| g.measure(x)).sum();
    let ball_mass = ball.mass(g);
    if boundary_mass * (p as f64) > ball_mass {
        return Err(Error::BoundarySizeNotCertified {
            ratio: boundary_mass / ball_mass,
            p,
            center: ball.center,
            radius: ball.radius,
        });
    }
    if !bipartition(view, &ball.members)?.is_bipartite() {
        return Err(Error::BallNotBipartite { center: ball.center });
    }
    let (even, odd) = parity_partition_of_ball(view, ball)?;
    let witness = build_witness(view, ball, &even, &odd, q)?;
    let bound = 2.0 / (p as f64)
        + 2.0_f64.powf(q + 1.0)
            * view.eps()
            * (local_doubling_constant(g) + g.local_finiteness_degree() as f64);
    let holds = witness.defect <= bound;
    Ok(DefectBoundCheck { witness, bound, holds })
}

/// Ball two-colorability counts for one `(eps, radius)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BallScanCell {
    pub eps: f64,
    pub radius: usize,
    /// Number of centers scanned (all vertices).
    pub scanned: usize,
    /// Centers whose ball admits a two-coloring.
    pub bipartite: usize,
    /// Smallest center with a two-colorable ball.
    pub first_bipartite_center: Option<usize>,
}

/// Witness defect measured on one ball for one exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCell {
    pub eps: f64,
    pub radius: usize,
    pub center: usize,
    pub q: f64,
    pub defect: f64,
    pub ball_mass: f64,
    pub boundary_mass: f64,
    pub class_sizes: (usize, usize),
}

/// Joint verdict over the three faces of the equivalence.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyVerdict {
    /// The equivalence is only asserted for connected loop-free graphs.
    pub applicable: bool,
    /// `1 + lambda_min < 1e-10`.
    pub gap_is_zero: bool,
    /// The whole vertex set two-colors at `eps = 0`.
    pub bipartite_at_zero: bool,
    /// Every odd-step diagonal infimum in the profile is below `1e-12`.
    pub odd_infima_all_zero: bool,
    /// Either not applicable, or the three verdicts agree.
    pub consistent: bool,
}

/// Everything the equivalence scan measures on one graph.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    /// Full spectrum when the graph fits the dense cap.
    pub eigenvalues: Option<Vec<f64>>,
    pub gap: f64,
    /// True when the gap came from power iteration instead of a full
    /// decomposition.
    pub gap_is_estimate: bool,
    /// `a_n` for `n = 1..=analytic_n_max`; empty when the spectrum was
    /// not materialized.
    pub analyticity: Vec<f64>,
    /// Odd-step diagonal infima for `k = 1, 3, ...`.
    pub odd_diag: Vec<LbInfimum>,
    pub balls: Vec<BallScanCell>,
    pub witnesses: Vec<WitnessCell>,
    pub verdict: ConsistencyVerdict,
}

/// Scan parameters for [`equivalence_report`].
#[derive(Clone, Debug)]
pub struct EquivalenceParams {
    pub eps_grid: Vec<f64>,
    pub radii: Vec<usize>,
    pub odd_k_max: usize,
    pub q_list: Vec<f64>,
    pub analytic_n_max: usize,
    pub dense_cap: usize,
}

impl Default for EquivalenceParams {
    fn default() -> Self {
        Self {
            eps_grid: vec![0.0],
            radii: vec![2, 3, 4],
            odd_k_max: 9,
            q_list: vec![2.0],
            analytic_n_max: 8,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

/// A two-colorable ball together with its even and odd parity classes.
pub type ColoredBall = (EpsBall, Vec<usize>, Vec<usize>);

/// Two-colors the ball around every center at one radius and counts the
/// successes. Also returns the first bipartite ball in center order with
/// its parity classes, the seed for witness construction.
pub fn ball_scan(
    view: &EpsView<'_>,
    radius: usize,
) -> Result<(BallScanCell, Option<ColoredBall>)> {
    let n = view.graph().vertex_count();
    let mut bipartite = 0usize;
    let mut first: Option<ColoredBall> = None;
    for center in 0..n {
        let ball = eps_ball(view, center, radius)?;
        if bipartition(view, &ball.members)?.is_bipartite() {
            bipartite += 1;
            if first.is_none() {
                let (even, odd) = parity_partition_of_ball(view, &ball)?;
                first = Some((ball, even, odd));
            }
        }
    }
    let cell = BallScanCell {
        eps: view.eps(),
        radius,
        scanned: n,
        bipartite,
        first_bipartite_center: first.as_ref().map(|(b, _, _)| b.center),
    };
    Ok((cell, first))
}

/// Measures the spectral gap at -1, the odd-step return-mass infima, and
/// ball two-colorings with their witness defects, then cross-checks the
/// three verdicts. On connected loop-free graphs a zero gap, a valid
/// global two-coloring at `eps = 0`, and vanishing odd-step infima must
/// agree; `consistent = false` flags an internal contradiction.
pub fn equivalence_report(
    g: &WeightedGraph,
    params: &EquivalenceParams,
) -> Result<EquivalenceReport> {
    let n = g.vertex_count();
    let (eigenvalues, gap, gap_is_estimate) = if n <= params.dense_cap {
        let evs = conjugate_eigen_capped(g, params.dense_cap)?.eigenvalues;
        let gap = 1.0 + evs[0];
        (Some(evs), gap, false)
    } else {
        let (lambda_min, _) = extremal_eigenvalues(g, 4000, 1e-13, 7)?;
        (None, 1.0 + lambda_min, true)
    };
    let analyticity = eigenvalues
        .as_deref()
        .map(|evs| analyticity_from_eigenvalues(evs, params.analytic_n_max))
        .unwrap_or_default();

    let odd_diag = lb_odd_profile(g, params.odd_k_max)?;

    let all: Vec<usize> = (0..n).collect();
    let mut balls = Vec::new();
    let mut witnesses = Vec::new();
    for &eps in &params.eps_grid {
        let view = eps_view(g, eps)?;
        for &radius in &params.radii {
            let (cell, first) = ball_scan(&view, radius)?;
            balls.push(cell);
            if let Some((ball, even, odd)) = first {
                let boundary = eps_boundary(&view, &ball.members)?;
                let boundary_mass = boundary.iter().map(|&x| g.measure(x)).sum();
                for &q in &params.q_list {
                    let w = build_witness(&view, &ball, &even, &odd, q)?;
                    witnesses.push(WitnessCell {
                        eps,
                        radius,
                        center: ball.center,
                        q,
                        defect: w.defect,
                        ball_mass: ball.mass(g),
                        boundary_mass,
                        class_sizes: (even.len(), odd.len()),
                    });
                }
            }
        }
    }

    let view0 = eps_view(g, 0.0)?;
    let bipartite_at_zero = bipartition(&view0, &all)?.is_bipartite();
    let gap_is_zero = gap < GAP_ZERO_TOL;
    let odd_infima_all_zero = odd_diag.iter().all(|cell| cell.value < DIAG_ZERO_TOL);
    let applicable = !g.has_loops() && g.is_connected();
    let consistent = !applicable
        || (gap_is_zero == bipartite_at_zero && bipartite_at_zero == odd_infima_all_zero);
    Ok(EquivalenceReport {
        eigenvalues,
        gap,
        gap_is_estimate,
        analyticity,
        odd_diag,
        balls,
        witnesses,
        verdict: ConsistencyVerdict {
            applicable,
            gap_is_zero,
            bipartite_at_zero,
            odd_infima_all_zero,
            consistent,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn cycle(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges((0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn triangle_spectrum() {
        let evs = spectrum(&triangle()).unwrap();
        assert!((evs[0] + 0.5).abs() < 1e-12);
        assert!((evs[1] + 0.5).abs() < 1e-12);
        assert!((evs[2] - 1.0).abs() < 1e-12);
        let gap = gap_at_minus_one(&triangle()).unwrap();
        assert!((gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn square_spectrum_touches_minus_one() {
        let evs = spectrum(&cycle(4)).unwrap();
        let expected = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in evs.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{evs:?}");
        }
        assert!(gap_at_minus_one(&cycle(4)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lazy_square_spectrum_is_shifted() {
        // Half-lazy square: every edge weight halved, loops mu_xx = 1
        // keep the measures at 2 and send theta to (1 + theta) / 2.
        let mut edges: Vec<(usize, usize, f64)> =
            (0..4).map(|i| (i, (i + 1) % 4, 0.5)).collect();
        edges.extend((0..4).map(|i| (i, i, 1.0)));
        let g = WeightedGraph::from_edges(edges).unwrap();
        assert_eq!(g.measures(), &[2.0; 4]);
        let evs = spectrum(&g).unwrap();
        let expected = [0.0, 0.5, 0.5, 1.0];
        for (a, b) in evs.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{evs:?}");
        }
        // Nonnegative spectrum keeps every analyticity constant at most 1.
        let a = analyticity_constants(&g, 12).unwrap();
        for (i, &v) in a.iter().enumerate() {
            assert!(v <= 1.0 + 1e-12, "a_{} = {v}", i + 1);
        }
    }

    #[test]
    fn analyticity_starts_at_one_minus_lambda_min() {
        let g = cycle(4);
        let a = analyticity_constants(&g, 3).unwrap();
        assert!((a[0] - 2.0).abs() < 1e-12);
        // a_2 = 2 max (1-t)|t| over {-1, 0, 1} = 4.
        assert!((a[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_calculus_reproduces_the_walk() {
        let g = WeightedGraph::from_edges([(0, 1, 1.0), (1, 2, 2.0), (2, 0, 0.5), (2, 3, 1.0)])
            .unwrap();
        let eigen = conjugate_eigen(&g).unwrap();
        let f = VertexFunction::new(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let via_eigen = eigen.apply_spectral(&f, |t| t).unwrap();
        let direct = g.apply_markov(&f).unwrap();
        for (a, b) in via_eigen.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let id = eigen.apply_spectral(&f, |_| 1.0).unwrap();
        for (a, b) in id.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn power_iteration_matches_dense_extremes() {
        for g in [triangle(), cycle(4), cycle(5)] {
            let evs = spectrum(&g).unwrap();
            let (lo, hi) = extremal_eigenvalues(&g, 5000, 1e-14, 11).unwrap();
            assert!((lo - evs[0]).abs() < 1e-6, "min {lo} vs {}", evs[0]);
            assert!((hi - evs[evs.len() - 1]).abs() < 1e-6, "max {hi}");
        }
    }

    #[test]
    fn delta_power_norm_matches_spectral_value() {
        for (g, n) in [(cycle(5), 1), (cycle(5), 3), (triangle(), 2)] {
            let evs = spectrum(&g).unwrap();
            let exact = evs
                .iter()
                .map(|&t| (1.0 - t).abs() * t.abs().powi(n as i32 - 1))
                .fold(0.0_f64, f64::max);
            let est = delta_power_norm_estimate(&g, n, 6000, 1e-14, 3).unwrap();
            assert!((est - exact).abs() < 1e-6, "n = {n}: {est} vs {exact}");
        }
    }

    #[test]
    fn witness_on_triangle_edge() {
        let g = triangle();
        let view = eps_view(&g, 0.0).unwrap();
        let ball = EpsBall { center: 0, radius: 2, eps: 0.0, members: vec![0, 1] };
        let w = build_witness(&view, &ball, &[0], &[1], 2.0).unwrap();
        assert_eq!(w.function.values(), &[1.0, -1.0, 0.0]);
        assert!((w.defect - 0.25).abs() < 1e-15);
    }

    #[test]
    fn witness_rejects_bad_classes() {
        let g = triangle();
        let view = eps_view(&g, 0.0).unwrap();
        let ball = EpsBall { center: 0, radius: 2, eps: 0.0, members: vec![0, 1] };
        assert!(matches!(
            build_witness(&view, &ball, &[0], &[0], 2.0),
            Err(Error::ClassesDoNotPartition { .. })
        ));
        assert!(matches!(
            build_witness(&view, &ball, &[0], &[2], 2.0),
            Err(Error::ClassesDoNotPartition { .. })
        ));
        assert!(build_witness(&view, &ball, &[0], &[1], 0.5).is_err());
    }

    #[test]
    fn octagon_defect_bound() {
        let g = cycle(8);
        let view = eps_view(&g, 0.0).unwrap();
        let ball = eps_ball(&view, 0, 3).unwrap();
        let check = defect_bound_check(&view, &ball, 2, 2.0).unwrap();
        // Parity witness on {0, 1, 2, 6, 7}: defect 0.2 against bound 1.
        assert!((check.witness.defect - 0.2).abs() < 1e-15);
        assert_eq!(check.bound, 1.0);
        assert!(check.holds);
        // p too large for this boundary: 4 * 3 > 10.
        assert!(matches!(
            defect_bound_check(&view, &ball, 3, 2.0),
            Err(Error::BoundarySizeNotCertified { .. })
        ));
    }

    #[test]
    fn defect_bound_requires_two_colorable_ball() {
        let g = triangle();
        let view = eps_view(&g, 0.0).unwrap();
        let ball = eps_ball(&view, 0, 2).unwrap();
        assert_eq!(ball.members, vec![0, 1, 2]);
        // Boundary is empty (the ball is everything), so p certifies, but
        // the triangle is not two-colorable.
        assert!(matches!(
            defect_bound_check(&view, &ball, 5, 2.0),
            Err(Error::BallNotBipartite { center: 0 })
        ));
    }

    #[test]
    fn equivalence_verdicts_agree_on_both_parities() {
        let even = equivalence_report(&cycle(4), &EquivalenceParams::default()).unwrap();
        assert!(even.verdict.applicable);
        assert!(even.verdict.gap_is_zero);
        assert!(even.verdict.bipartite_at_zero);
        assert!(even.verdict.odd_infima_all_zero);
        assert!(even.verdict.consistent);
        assert!(!even.gap_is_estimate);

        let odd = equivalence_report(&cycle(5), &EquivalenceParams::default()).unwrap();
        assert!(odd.verdict.applicable);
        assert!(!odd.verdict.gap_is_zero);
        assert!(!odd.verdict.bipartite_at_zero);
        assert!(!odd.verdict.odd_infima_all_zero);
        assert!(odd.verdict.consistent);
        // The odd cycle still has two-colorable balls of radius 2.
        let cell = &odd.balls[0];
        assert_eq!(cell.radius, 2);
        assert_eq!(cell.bipartite, 5);
    }

    #[test]
    fn loops_make_the_verdict_inapplicable() {
        let g = WeightedGraph::from_edges([(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let report = equivalence_report(&g, &EquivalenceParams::default()).unwrap();
        assert!(!report.verdict.applicable);
        assert!(report.verdict.consistent);
    }
}
