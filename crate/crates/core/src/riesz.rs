//! Quasidistances adapted to the walk and Riesz-transform diagnostics.
//!
//! A quasidistance here is an N-valued symmetric kernel vanishing exactly
//! on the diagonal, equal to 1 on edges, and satisfying the relaxed
//! triangle inequality `rho(x, y) <= C (rho(x, z) + rho(z, y))`. The
//! minimal constant `C_rho` is measured by a triple scan and yields the
//! scaling exponent `beta = 1 + log2(C_rho)`; halving geodesics shows
//! `rho <= (2 d_0)^beta` for any validated quasidistance, which drives
//! the rescaling `sigma = ceil(rho / (2l)^beta)` adapted to the l-step
//! walk.
//!
//! On the analytic side the carre-du-champ gradient
//! `grad f(x) = (sum_y p(x, y) |f(x) - f(y)|^2 m(y))^(1/2)` satisfies the
//! energy identity `||grad f||_2^2 = 2 <Delta f, f>`, which makes
//! `grad Delta^(-1/2)` an isometry times sqrt(2) on the orthogonal
//! complement of the harmonic functions; other exponents are probed by
//! sampled lower bounds. Off-diagonal decay is quantified by Gaffney-type
//! ratios and a subgaussian fit of the iterated kernel.

use rayon::prelude::*;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{LpExponent, VertexFunction, WeightedGraph};
use crate::kernel::{iterate_kernel, transition_row, DEFAULT_DENSE_CAP};
use crate::spectral::{conjugate_eigen, ConjugateEigen};

/// Largest vertex count for which the triple scan runs exhaustively.
pub const TRIPLE_SCAN_CAP: usize = 2048;

/// Number of sampled midpoints per pair when the triple scan is sampled.
const TRIPLE_SAMPLE: usize = 256;

/// Delta-eigenvalues below this are treated as harmonic modes.
pub const HARMONIC_TOL: f64 = 1e-12;

/// Coefficient size above which a harmonic component counts as projected
/// away, relative to the l^2(m) norm of the input.
const PROJECTION_TOL: f64 = 1e-10;

/// Relative slack for certified inequalities.
const REL_TOL: f64 = 1e-9;

/// A validated quasidistance with its measured constants.
#[derive(Clone, Debug)]
pub struct QuasiDistance {
    n: usize,
    /// Row-major `n * n` values.
    entries: Vec<u64>,
    /// Minimal constant of the relaxed triangle inequality.
    pub c_rho: f64,
    /// `1 + log2(c_rho)`.
    pub beta: f64,
    /// Least-squares growth exponent of `max_x V_rho(x, r) / m(x)`.
    pub d_rho: f64,
    /// A triple `(x, y, z)` attaining `c_rho`.
    pub witness_triple: Option<(usize, usize, usize)>,
    /// True when the triple scan was exhaustive.
    pub exact_scan: bool,
}

impl QuasiDistance {
    pub fn size(&self) -> usize {
        self.n
    }

    /// `rho(x, y)`.
    pub fn value(&self, x: usize, y: usize) -> u64 {
        self.entries[x * self.n + y]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn max_value(&self) -> u64 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// Mass of the rho-ball `{y : rho(x, y) < r}`.
    pub fn ball_volume(&self, g: &WeightedGraph, x: usize, r: u64) -> f64 {
        (0..self.n).filter(|&y| self.value(x, y) < r).map(|y| g.measure(y)).sum()
    }
}

/// Finds the minimal relaxed-triangle constant and a witnessing triple.
/// Exhaustive up to [`TRIPLE_SCAN_CAP`] vertices, strided sampling above.
fn triangle_constant(n: usize, entries: &[u64]) -> (f64, Option<(usize, usize, usize)>, bool) {
    let exact = n <= TRIPLE_SCAN_CAP;
    let stride = if exact { 1 } else { n.div_ceil(TRIPLE_SAMPLE) };
    let value = |x: usize, y: usize| entries[x * n + y];
    let per_x: Vec<(f64, (usize, usize, usize))> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = (0.0_f64, (0, 0, 0));
            for y in (x + 1)..n {
                let rho_xy = value(x, y) as f64;
                let mut z = 0;
                while z < n {
                    let denom = (value(x, z) + value(z, y)) as f64;
                    // x != y keeps the denominator positive.
                    let ratio = rho_xy / denom;
                    if ratio > best.0 {
                        best = (ratio, (x, y, z));
                    }
                    z += stride;
                }
            }
            best
        })
        .collect();
    let mut best = (0.0_f64, None);
    for (ratio, triple) in per_x {
        if ratio > best.0 {
            best = (ratio, Some(triple));
        }
    }
    (best.0, best.1, exact)
}

/// Growth exponent of rho-balls, fitted like the hop-metric exponent:
/// least squares of `log max_x V_rho(x, r) / m(x)` against `log r` over
/// `r = 1..=min(max_rho + 1, 32)`.
fn rho_growth_exponent(g: &WeightedGraph, n: usize, entries: &[u64]) -> f64 {
    let max_rho = entries.iter().copied().max().unwrap_or(0);
    let r_fit = (max_rho + 1).clamp(2, 32);
    let mut points = Vec::new();
    for r in 1..=r_fit {
        let mut ratio: f64 = 0.0;
        for x in 0..n {
            let vol: f64 =
                (0..n).filter(|&y| entries[x * n + y] < r).map(|y| g.measure(y)).sum();
            ratio = ratio.max(vol / g.measure(x));
        }
        points.push(((r as f64).ln(), ratio.ln()));
    }
    let len = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    sxy / sxx
}

/// Validates the axioms of a quasidistance against a graph: zero exactly
/// on the diagonal, symmetric, and equal to 1 on every edge between
/// distinct vertices. The minimal relaxed-triangle constant and the
/// ball-growth exponent are measured, not assumed.
pub fn validate_quasidistance(g: &WeightedGraph, entries: &[u64]) -> Result<QuasiDistance> {
    let is_edge = |x: usize, y: usize| x != y && g.weight(x, y) > 0.0;
    validate_with_support(g, entries, &is_edge, "edge-normalization")
}

/// Shared validator: `support(x, y)` names the pairs that must sit at
/// quasidistance exactly 1.
fn validate_with_support(
    g: &WeightedGraph,
    entries: &[u64],
    support: &dyn Fn(usize, usize) -> bool,
    support_axiom: &'static str,
) -> Result<QuasiDistance> {
    let n = g.vertex_count();
    if entries.len() != n * n {
        return Err(Error::MatrixShape { n, expected: n * n, got: entries.len() });
    }
    let value = |x: usize, y: usize| entries[x * n + y];
    for x in 0..n {
        if value(x, x) != 0 {
            return Err(Error::QuasidistanceAxiom {
                axiom: "identity",
                detail: format!("rho({x}, {x}) = {} but the diagonal must vanish", value(x, x)),
            });
        }
        for y in (x + 1)..n {
            if value(x, y) != value(y, x) {
                return Err(Error::QuasidistanceAxiom {
                    axiom: "symmetry",
                    detail: format!(
                        "rho({x}, {y}) = {} but rho({y}, {x}) = {}",
                        value(x, y),
                        value(y, x)
                    ),
                });
            }
            if value(x, y) == 0 {
                return Err(Error::QuasidistanceAxiom {
                    axiom: "identity",
                    detail: format!("rho({x}, {y}) = 0 on distinct vertices"),
                });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if support(x, y) && value(x, y) != 1 {
                return Err(Error::QuasidistanceAxiom {
                    axiom: support_axiom,
                    detail: format!("rho({x}, {y}) = {} but the pair requires 1", value(x, y)),
                });
            }
        }
    }
    let (c_rho, witness_triple, exact_scan) = triangle_constant(n, entries);
    let d_rho = rho_growth_exponent(g, n, entries);
    Ok(QuasiDistance {
        n,
        entries: entries.to_vec(),
        c_rho,
        beta: 1.0 + c_rho.log2(),
        d_rho,
        witness_triple,
        exact_scan,
    })
}

/// All-pairs hop distances as a dense `u64` matrix; requires a connected
/// graph of at most [`DEFAULT_DENSE_CAP`] vertices.
pub fn distance_matrix(g: &WeightedGraph) -> Result<Vec<u64>> {
    let n = g.vertex_count();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded { vertices: n, cap: DEFAULT_DENSE_CAP });
    }
    let from_zero = g.hop_distances(0)?;
    if let Some(vertex) = from_zero.iter().position(Option::is_none) {
        return Err(Error::Disconnected { vertex });
    }
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            g.hop_distances(x)
                .expect("vertex index is in range")
                .into_iter()
                .map(|d| d.expect("graph was checked connected") as u64)
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// The hop metric itself as a quasidistance (`c_rho = 1`, `beta = 1`).
pub fn distance_quasidistance(g: &WeightedGraph) -> Result<QuasiDistance> {
    let entries = distance_matrix(g)?;
    validate_quasidistance(g, &entries)
}

/// The power `rho = floor(d_0^exponent)` for `exponent > 1`, the
/// standard way to build genuinely non-metric quasidistances. Powers
/// that should be integers are snapped to them before flooring, so
/// floating-point noise in `powf` cannot shift a value.
pub fn power_quasidistance(g: &WeightedGraph, exponent: f64) -> Result<QuasiDistance> {
    if !(exponent.is_finite() && exponent > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "power quasidistance needs exponent > 1, got {exponent}"
        )));
    }
    let entries: Vec<u64> = distance_matrix(g)?
        .into_iter()
        .map(|d| {
            let v = (d as f64).powf(exponent);
            let r = v.round();
            if (v - r).abs() < 1e-9 * r.max(1.0) {
                r as u64
            } else {
                v.floor() as u64
            }
        })
        .collect();
    validate_quasidistance(g, &entries)
}

/// Scaling comparison between a quasidistance and the hop metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingCheck {
    /// All pairs satisfy `rho(x, y) <= (2 d_0(x, y))^beta`.
    pub holds: bool,
    /// Pair with the largest `rho / (2 d_0)^beta` ratio.
    pub worst_pair: Option<(usize, usize)>,
    pub worst_ratio: f64,
    /// `beta * d_rho`, the hop-ball growth exponent implied by rho-growth.
    pub implied_exponent: f64,
    /// `max V(x, r) / (r^implied_exponent m(x))` over `r = 1..=r_max`.
    pub implied_constant: f64,
}

/// Checks the halving bound `rho <= (2 d_0)^beta` pair by pair and
/// measures the polynomial hop-growth constant at the implied exponent
/// `beta * d_rho` over radii `1..=r_max`.
pub fn lemma_pdv_check(g: &WeightedGraph, qd: &QuasiDistance, r_max: usize) -> Result<ScalingCheck> {
    if r_max < 1 {
        return Err(Error::InvalidRadius(0));
    }
    let n = g.vertex_count();
    if qd.size() != n {
        return Err(Error::MatrixShape { n, expected: n * n, got: qd.entries.len() });
    }
    let dist = distance_matrix(g)?;
    let mut worst = (0.0_f64, None);
    for x in 0..n {
        for y in (x + 1)..n {
            let bound = (2.0 * dist[x * n + y] as f64).powf(qd.beta);
            let ratio = qd.value(x, y) as f64 / bound;
            if ratio > worst.0 {
                worst = (ratio, Some((x, y)));
            }
        }
    }
    let implied_exponent = qd.beta * qd.d_rho;
    let mut implied_constant = 0.0_f64;
    for x in 0..n {
        let m_x = g.measure(x);
        for r in 1..=r_max {
            let vol = crate::volume::ball_volume(g, x, r)?;
            implied_constant = implied_constant.max(vol / ((r as f64).powf(implied_exponent) * m_x));
        }
    }
    Ok(ScalingCheck {
        holds: worst.0 <= 1.0 + REL_TOL,
        worst_pair: worst.1,
        worst_ratio: worst.0,
        implied_exponent,
        implied_constant,
    })
}

/// Pairs reachable by a walk of exactly `l` steps, as a dense boolean
/// matrix. This is the support of the l-step kernel, computed by set
/// reachability rather than floating-point comparisons.
fn exact_step_support(g: &WeightedGraph, l: usize) -> Vec<bool> {
    let n = g.vertex_count();
    let rows: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut reach = vec![false; n];
            reach[x] = true;
            let mut next = vec![false; n];
            for _ in 0..l {
                next.iter_mut().for_each(|b| *b = false);
                for (z, _) in reach.iter().enumerate().filter(|(_, &b)| b) {
                    for &(y, _) in g.neighbors(z) {
                        next[y] = true;
                    }
                }
                std::mem::swap(&mut reach, &mut next);
            }
            reach
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Rescales a quasidistance to the l-step walk:
/// `sigma = ceil(rho / (2l)^beta)`. The result is validated as a
/// quasidistance whose unit sphere covers the support of the l-step
/// kernel off the diagonal, and its constants are measured afresh.
pub fn sigma_rescale(g: &WeightedGraph, qd: &QuasiDistance, l: usize) -> Result<QuasiDistance> {
    if l == 0 {
        return Err(Error::InvalidParameter("rescaling needs l >= 1".into()));
    }
    let n = g.vertex_count();
    if qd.size() != n {
        return Err(Error::MatrixShape { n, expected: n * n, got: qd.entries.len() });
    }
    let factor = (2.0 * l as f64).powf(qd.beta);
    let entries: Vec<u64> =
        qd.entries.iter().map(|&v| (v as f64 / factor).ceil() as u64).collect();
    let support = exact_step_support(g, l);
    let support_fn = move |x: usize, y: usize| x != y && support[x * n + y];
    validate_with_support(g, &entries, &support_fn, "step-support-normalization")
}

/// Pointwise carre-du-champ gradient
/// `grad f(x) = (sum_y p(x, y) |f(x) - f(y)|^2 m(y))^(1/2)`.
pub fn gradient(g: &WeightedGraph, f: &VertexFunction) -> Result<VertexFunction> {
    g.check_len(f)?;
    let values = (0..g.vertex_count())
        .map(|x| {
            let mut acc = 0.0;
            for &(y, w) in g.neighbors(x) {
                let diff = f[x] - f[y];
                // p(x, y) m(y) = mu_xy / m(x)
                acc += w / g.measure(x) * diff * diff;
            }
            acc.sqrt()
        })
        .collect();
    Ok(VertexFunction::from_raw(values))
}

/// Gradient against the l-step kernel:
/// `(sum_y p_l(x, y) |f(x) - f(y)|^2 m(y))^(1/2)`.
pub fn generalized_gradient(g: &WeightedGraph, f: &VertexFunction, l: usize) -> Result<VertexFunction> {
    g.check_len(f)?;
    let n = g.vertex_count();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = transition_row(g, x, l).expect("vertex index is in range");
            let mut acc = 0.0;
            for (y, p) in row.iter().enumerate() {
                let diff = f[x] - f[y];
                acc += p * diff * diff * g.measure(y);
            }
            acc.sqrt()
        })
        .collect();
    Ok(VertexFunction::from_raw(values))
}

/// Result of applying the half-inverse Laplacian.
#[derive(Clone, Debug)]
pub struct HalfInverse {
    pub function: VertexFunction,
    /// True when the input had a component on a harmonic mode, which the
    /// operator silently projects away.
    pub projected: bool,
    /// Number of modes treated as harmonic.
    pub zeroed_modes: usize,
}

/// Applies `Delta^(-1/2)` through the eigendecomposition, zeroing the
/// harmonic modes (Delta-eigenvalues below [`HARMONIC_TOL`]).
pub fn half_inverse_laplacian(g: &WeightedGraph, f: &VertexFunction) -> Result<HalfInverse> {
    half_inverse_with(&conjugate_eigen(g)?, g, f)
}

/// Same as [`half_inverse_laplacian`] with a precomputed decomposition.
pub fn half_inverse_with(
    eigen: &ConjugateEigen,
    g: &WeightedGraph,
    f: &VertexFunction,
) -> Result<HalfInverse> {
    let coeffs = eigen.coefficients(f)?;
    let norm = g.lp_norm(f, LpExponent::Finite(2.0))?;
    let mut zeroed_modes = 0usize;
    let mut projected = false;
    for (c, &theta) in coeffs.iter().zip(eigen.eigenvalues()) {
        if 1.0 - theta < HARMONIC_TOL {
            zeroed_modes += 1;
            if c.abs() > PROJECTION_TOL * norm.max(1.0) {
                projected = true;
            }
        }
    }
    let function = eigen.apply_spectral(f, |theta| {
        let delta = 1.0 - theta;
        if delta < HARMONIC_TOL {
            0.0
        } else {
            delta.powf(-0.5)
        }
    })?;
    Ok(HalfInverse { function, projected, zeroed_modes })
}

/// Sampled operator norm of `grad Delta^(-1/2)` on l^q(m).
#[derive(Clone, Debug, PartialEq)]
pub struct RieszNormEstimate {
    pub q: f64,
    pub value: f64,
    /// Number of trial functions that contributed.
    pub trials: usize,
    /// True for `q != 2`, where sampling only bounds the norm from below.
    pub lower_bound_only: bool,
}

/// Probes `||grad Delta^(-1/2) f||_q / ||f||_q` over coordinate
/// indicators and seeded sign vectors, all projected off the harmonic
/// modes. At `q = 2` the energy identity makes every ratio exactly
/// `sqrt(2)`, so the estimate is the norm itself; at other exponents the
/// reported value is a certified lower bound.
pub fn riesz_norm(g: &WeightedGraph, q: f64) -> Result<RieszNormEstimate> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let eigen = conjugate_eigen(g)?;
    let n = g.vertex_count();
    let norm_q = LpExponent::Finite(q);
    let mut trials_raw: Vec<VertexFunction> = Vec::new();
    for x in 0..n {
        trials_raw.push(VertexFunction::indicator(n, &[x]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..8 {
        let values: Vec<f64> =
            (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
        trials_raw.push(VertexFunction::from_raw(values));
    }
    let project = |theta: f64| if 1.0 - theta < HARMONIC_TOL { 0.0 } else { 1.0 };
    let mut value = 0.0_f64;
    let mut trials = 0usize;
    for f in &trials_raw {
        let f_proj = eigen.apply_spectral(f, project)?;
        let denom = g.lp_norm(&f_proj, norm_q)?;
        if denom < 1e-12 {
            continue;
        }
        let half = half_inverse_with(&eigen, g, f)?;
        let grad = gradient(g, &half.function)?;
        value = value.max(g.lp_norm(&grad, norm_q)? / denom);
        trials += 1;
    }
    Ok(RieszNormEstimate { q, value, trials, lower_bound_only: q != 2.0 })
}

fn lq_norm_on(g: &WeightedGraph, values: &[f64], q: f64, set: &[usize]) -> f64 {
    set.iter().map(|&x| values[x].abs().powf(q) * g.measure(x)).sum::<f64>().powf(1.0 / q)
}

/// Gaffney-type off-diagonal estimate for one pair of sets.
#[derive(Clone, Debug, PartialEq)]
pub struct GaffneyCheck {
    /// Largest `||grad P^(k-1) f||_{l^q(m) on E}` over unit trial
    /// functions supported on F.
    pub lhs: f64,
    /// `(c_upper / sqrt(k)) exp(-c_decay (rho(E, F) / k)^eta)`.
    pub rhs: f64,
    /// `lhs / rhs`.
    pub ratio: f64,
    /// `rho(E, F) = min` over pairs.
    pub separation: u64,
    pub trials: usize,
    /// `lhs <= rhs`.
    pub holds: bool,
}

/// Measures the energy that functions supported on `F` radiate into `E`
/// after `k - 1` walk steps, against a subgaussian budget in the
/// quasidistance separation of the two sets.
#[allow(clippy::too_many_arguments)]
pub fn gaffney_check(
    g: &WeightedGraph,
    qd: &QuasiDistance,
    set_e: &[usize],
    set_f: &[usize],
    k: usize,
    q: f64,
    c_upper: f64,
    c_decay: f64,
    eta: f64,
) -> Result<GaffneyCheck> {
    let n = g.vertex_count();
    if qd.size() != n {
        return Err(Error::MatrixShape { n, expected: n * n, got: qd.entries.len() });
    }
    if set_e.is_empty() || set_f.is_empty() {
        return Err(Error::EmptySet);
    }
    for &x in set_e.iter().chain(set_f) {
        g.check_vertex(x)?;
    }
    if k == 0 {
        return Err(Error::InvalidParameter("walk step count needs k >= 1".into()));
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    if !(c_upper > 0.0 && c_decay > 0.0 && eta > 0.0) {
        return Err(Error::InvalidParameter(
            "gaffney budget needs positive c_upper, c_decay, and eta".into(),
        ));
    }
    let separation = set_e
        .iter()
        .flat_map(|&e| set_f.iter().map(move |&f| qd.value(e, f)))
        .min()
        .expect("both sets are nonempty");

    let mut trials_raw: Vec<Vec<f64>> = Vec::new();
    for &v in set_f {
        let mut values = vec![0.0; n];
        values[v] = 1.0;
        trials_raw.push(values);
    }
    let mut uniform = vec![0.0; n];
    for &v in set_f {
        uniform[v] = 1.0;
    }
    trials_raw.push(uniform);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..8 {
        let mut values = vec![0.0; n];
        for &v in set_f {
            values[v] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        }
        trials_raw.push(values);
    }

    let mut lhs = 0.0_f64;
    let mut trials = 0usize;
    for values in trials_raw {
        let norm = lq_norm_on(g, &values, q, set_f);
        if norm < 1e-300 {
            continue;
        }
        let normalized: Vec<f64> = values.iter().map(|v| v / norm).collect();
        let mut f = VertexFunction::from_raw(normalized);
        for _ in 0..k - 1 {
            f = g.apply_markov(&f)?;
        }
        let grad = gradient(g, &f)?;
        lhs = lhs.max(lq_norm_on(g, grad.values(), q, set_e));
        trials += 1;
    }
    let rhs =
        c_upper / (k as f64).sqrt() * (-c_decay * (separation as f64 / k as f64).powf(eta)).exp();
    Ok(GaffneyCheck { lhs, rhs, ratio: lhs / rhs, separation, trials, holds: lhs <= rhs })
}

/// Default decay-rate grid for the subgaussian fit.
pub const UE_DECAY_GRID: [f64; 4] = [0.1, 0.25, 0.5, 1.0];

/// Default exponent grid for the subgaussian fit.
pub const UE_EXPONENT_GRID: [f64; 3] = [0.5, 2.0 / 3.0, 1.0];

/// Fitted subgaussian upper envelope of the iterated kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgaussianFit {
    /// `c_ue`: the smallest envelope constant found on the grid.
    pub upper_constant: f64,
    /// Decay rate of the winning grid point.
    pub decay_constant: f64,
    /// Exponent of the winning grid point.
    pub exponent: f64,
    pub k_max: usize,
    /// `(x, y, k)` attaining the envelope constant.
    pub attained_at: (usize, usize, usize),
}

/// Fits `p_{k-1}(x, y) <= C / V_rho(x, k) * exp(-c (rho(x, y)/k)^eta)` by
/// measuring, for each grid pair `(c, eta)`, the exact constant
/// `C = max p_{k-1}(x, y) V_rho(x, k) exp(+c (rho(x, y)/k)^eta)` over all
/// pairs and `2 <= k <= k_max`, then keeping the pair with the smallest
/// constant.
pub fn ue_fit(g: &WeightedGraph, qd: &QuasiDistance, k_max: usize) -> Result<SubgaussianFit> {
    ue_fit_with_grids(g, qd, k_max, &UE_EXPONENT_GRID, &UE_DECAY_GRID)
}

/// [`ue_fit`] with explicit grids.
pub fn ue_fit_with_grids(
    g: &WeightedGraph,
    qd: &QuasiDistance,
    k_max: usize,
    exponent_grid: &[f64],
    decay_grid: &[f64],
) -> Result<SubgaussianFit> {
    let n = g.vertex_count();
    if qd.size() != n {
        return Err(Error::MatrixShape { n, expected: n * n, got: qd.entries.len() });
    }
    if k_max < 2 {
        return Err(Error::InvalidParameter("subgaussian fit needs k_max >= 2".into()));
    }
    if exponent_grid.is_empty() || decay_grid.is_empty() {
        return Err(Error::InvalidParameter("subgaussian fit needs nonempty grids".into()));
    }
    // Prefix sums of mass by quasidistance, per row, for V_rho queries.
    let mut sorted_rows: Vec<(Vec<u64>, Vec<f64>)> = Vec::with_capacity(n);
    for x in 0..n {
        let mut cells: Vec<(u64, f64)> =
            (0..n).map(|y| (qd.value(x, y), g.measure(y))).collect();
        cells.sort_unstable_by_key(|&(v, _)| v);
        let values: Vec<u64> = cells.iter().map(|&(v, _)| v).collect();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &(_, m) in &cells {
            acc += m;
            prefix.push(acc);
        }
        sorted_rows.push((values, prefix));
    }
    let v_rho = |x: usize, k: usize| {
        let (values, prefix) = &sorted_rows[x];
        let count = values.partition_point(|&v| v < k as u64);
        prefix[count]
    };

    let mut best: Option<SubgaussianFit> = None;
    for &eta in exponent_grid {
        for &c in decay_grid {
            if !(eta > 0.0 && c > 0.0) {
                return Err(Error::InvalidParameter(
                    "grid entries must be positive".into(),
                ));
            }
            let mut constant = 0.0_f64;
            let mut attained = (0, 0, 2);
            let mut kernel = iterate_kernel(g, 1)?;
            for k in 2..=k_max {
                // kernel currently holds p_{k-1}
                for x in 0..n {
                    let vol = v_rho(x, k);
                    for y in 0..n {
                        let rho = qd.value(x, y) as f64;
                        let value = kernel.entry(x, y)
                            * vol
                            * (c * (rho / k as f64).powf(eta)).exp();
                        if value > constant {
                            constant = value;
                            attained = (x, y, k);
                        }
                    }
                }
                if k < k_max {
                    kernel.advance();
                }
            }
            let fit = SubgaussianFit {
                upper_constant: constant,
                decay_constant: c,
                exponent: eta,
                k_max,
                attained_at: attained,
            };
            if best.as_ref().is_none_or(|b| fit.upper_constant < b.upper_constant) {
                best = Some(fit);
            }
        }
    }
    Ok(best.expect("grids are nonempty"))
}

/// Domination of the one-step kernel by an iterated kernel on edges.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelDomination {
    pub l: usize,
    /// `1 / min_x p_{l-1}(x, x) m(x)`.
    pub constant: f64,
    /// Largest `p(x, y) / (constant * p_l(x, y))` over edges.
    pub worst_ratio: f64,
    pub worst_edge: Option<(usize, usize)>,
    pub holds: bool,
}

/// Verifies `p(x, y) <= C p_l(x, y)` on all edges between distinct
/// vertices with `C = 1 / min_x p_{l-1}(x, x) m(x)`: an l-step walk can
/// always cross the edge first and then close a loop of length `l - 1`.
pub fn kernel_domination_check(g: &WeightedGraph, l: usize) -> Result<KernelDomination> {
    if l == 0 {
        return Err(Error::InvalidParameter("domination needs l >= 1".into()));
    }
    let mut kernel = iterate_kernel(g, l - 1)?;
    let min_return = (0..g.vertex_count())
        .map(|x| kernel.diag_mass(x))
        .fold(f64::INFINITY, f64::min);
    if min_return <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "domination needs positive (l-1)-step return mass everywhere; it vanishes at l = {l}"
        )));
    }
    let constant = 1.0 / min_return;
    kernel.advance();
    let mut worst = (0.0_f64, None);
    for (x, y, _) in g.edges() {
        if x == y {
            continue;
        }
        let ratio = g.kernel(x, y) / (constant * kernel.entry(x, y));
        if ratio > worst.0 {
            worst = (ratio, Some((x, y)));
        }
    }
    Ok(KernelDomination {
        l,
        constant,
        worst_ratio: worst.0,
        worst_edge: worst.1,
        holds: worst.0 <= 1.0 + REL_TOL,
    })
}
