//! Volume growth of graph balls and boundary-size certificates.
//!
//! `V(x, r)` is the measure of the ball `{y : d_0(x, y) < r}` in the hop
//! metric, so `V(x, 1) = m(x)`. Three growth regimes are measured over a
//! finite radius scan: the local constant `V(x, 2) <= c m(x)`, the
//! doubling constant `V(x, 2r) <= c V(x, r)`, and the polynomial form
//! `V(x, r) <= c r^d m(x)` with a least-squares exponent `d`.
//!
//! Boundary-size certificates search for balls whose inner eps-boundary
//! carries at most a `1/p` fraction of the ball mass. When every ball of
//! a radius range fails that, mass must grow geometrically; the
//! dichotomy check verifies the resulting lower bound directly.

use rayon::prelude::*;

use crate::eps::{eps_ball, eps_boundary, EpsView};
use crate::error::{Error, Result};
use crate::graph::{GraphConstants, WeightedGraph};

/// Exact local doubling constant `max_x V(x, 2) / m(x)`, computed from
/// the adjacency lists alone in O(E).
pub fn local_doubling_constant(g: &WeightedGraph) -> f64 {
    (0..g.vertex_count())
        .map(|x| {
            let mut volume2 = g.measure(x);
            for &(y, _) in g.neighbors(x) {
                if y != x {
                    volume2 += g.measure(y);
                }
            }
            volume2 / g.measure(x)
        })
        .fold(0.0_f64, f64::max)
}

/// Ball volume `V(x, r) = m({y : d_0(x, y) < r})` for `r >= 1`.
pub fn ball_volume(g: &WeightedGraph, x: usize, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidRadius(0));
    }
    let prefix = volume_prefix(g, x)?;
    Ok(prefix[r.min(prefix.len() - 1)])
}

/// `prefix[r] = V(x, r)` for `r = 0..=ecc+1`; values saturate at the last
/// entry, the total mass of the component of `x`.
fn volume_prefix(g: &WeightedGraph, x: usize) -> Result<Vec<f64>> {
    let dist = g.hop_distances(x)?;
    let max_d = dist.iter().flatten().max().copied().unwrap_or(0) as usize;
    let mut shell = vec![0.0_f64; max_d + 1];
    for (y, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            shell[*d as usize] += g.measure(y);
        }
    }
    let mut prefix = Vec::with_capacity(max_d + 2);
    prefix.push(0.0);
    let mut acc = 0.0;
    for s in shell {
        acc += s;
        prefix.push(acc);
    }
    Ok(prefix)
}

/// Growth constants measured over a radius scan.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub constants: GraphConstants,
    /// `max_x V(x, r) / m(x)` for `r = 1..=scan_radius`, index `r - 1`.
    pub ratio_profile: Vec<f64>,
}

/// Measures local doubling, doubling, and polynomial growth constants for
/// radii `1..=r_max`, fitting the polynomial exponent by least squares on
/// `log(max_x V(x, r) / m(x))` against `log r`. Work is O(V * E).
pub fn fit_growth(g: &WeightedGraph, r_max: usize) -> Result<GrowthFit> {
    if r_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "growth scan needs r_max >= 2, got {r_max}"
        )));
    }
    let n = g.vertex_count();
    let prefixes: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| volume_prefix(g, x).expect("vertex index is in range"))
        .collect();
    let volume = |x: usize, r: usize| prefixes[x][r.min(prefixes[x].len() - 1)];

    let mut local_doubling = 0.0_f64;
    let mut doubling = 0.0_f64;
    let mut ratio_profile = vec![0.0_f64; r_max];
    for x in 0..n {
        let m_x = g.measure(x);
        local_doubling = local_doubling.max(volume(x, 2) / m_x);
        for r in 1..=r_max {
            doubling = doubling.max(volume(x, 2 * r) / volume(x, r));
            ratio_profile[r - 1] = ratio_profile[r - 1].max(volume(x, r) / m_x);
        }
    }

    // Least-squares slope through (log r, log max-ratio); r = 1 anchors
    // the fit at the exact origin.
    let points: Vec<(f64, f64)> = (1..=r_max)
        .map(|r| ((r as f64).ln(), ratio_profile[r - 1].ln()))
        .collect();
    let len = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let growth_exponent = sxy / sxx;

    let mut polynomial_constant = 0.0_f64;
    for x in 0..n {
        let m_x = g.measure(x);
        for r in 1..=r_max {
            let bound = (r as f64).powf(growth_exponent) * m_x;
            polynomial_constant = polynomial_constant.max(volume(x, r) / bound);
        }
    }

    Ok(GrowthFit {
        constants: GraphConstants {
            vertex_count: n,
            max_degree: g.local_finiteness_degree(),
            local_doubling,
            doubling,
            polynomial_constant,
            growth_exponent,
            scan_radius: r_max,
        },
        ratio_profile,
    })
}

/// Convenience wrapper returning only the certified constants.
pub fn certified_constants(g: &WeightedGraph, r_max: usize) -> Result<GraphConstants> {
    Ok(fit_growth(g, r_max)?.constants)
}

/// Cross-checks between the growth regimes on the scanned radii.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicationReport {
    /// Exponent `log2` of the doubling constant.
    pub dv_exponent: f64,
    /// Scanned `(x, r)` pairs violating `V(x, r) <= c_dv * r^exponent * m(x)`.
    pub dv_violations: usize,
    /// Doubling implies polynomial growth with the constants above.
    pub dv_implies_pdv: bool,
    /// `2^d * c_pdv`, the polynomial bound evaluated at radius 2.
    pub dvl_bound: f64,
    /// The measured local doubling constant.
    pub local_doubling: f64,
    /// Polynomial growth at radius 2 dominates local doubling.
    pub pdv_implies_dvl: bool,
}

/// Relative slack for floating-point comparisons between certified bounds.
const REL_TOL: f64 = 1e-9;

/// Verifies two implications between the growth regimes on the scanned
/// graph: doubling yields the polynomial form with exponent `log2(c_dv)`
/// and constant `c_dv`, and the polynomial form at radius 2 dominates the
/// local doubling constant.
pub fn implication_check(g: &WeightedGraph, fit: &GrowthFit) -> Result<ImplicationReport> {
    let c = &fit.constants;
    let dv_exponent = c.doubling.log2();
    let r_max = c.scan_radius;
    let mut dv_violations = 0usize;
    for x in 0..g.vertex_count() {
        let m_x = g.measure(x);
        let prefix = volume_prefix(g, x)?;
        let volume = |r: usize| prefix[r.min(prefix.len() - 1)];
        for r in 1..=r_max {
            let bound = c.doubling * (r as f64).powf(dv_exponent) * m_x;
            if volume(r) > bound * (1.0 + REL_TOL) {
                dv_violations += 1;
            }
        }
    }
    let dvl_bound = 2.0_f64.powf(c.growth_exponent) * c.polynomial_constant;
    Ok(ImplicationReport {
        dv_exponent,
        dv_violations,
        dv_implies_pdv: dv_violations == 0,
        dvl_bound,
        local_doubling: c.local_doubling,
        pdv_implies_dvl: c.local_doubling <= dvl_bound * (1.0 + REL_TOL),
    })
}

/// A ball located by the small-boundary search.
#[derive(Clone, Debug, PartialEq)]
pub struct BallRecord {
    pub center: usize,
    pub radius: usize,
    pub eps: f64,
    pub ball_mass: f64,
    pub boundary_mass: f64,
}

impl BallRecord {
    /// Boundary-to-mass ratio.
    pub fn ratio(&self) -> f64 {
        self.boundary_mass / self.ball_mass
    }
}

/// Searches for a ball whose inner eps-boundary carries at most `1/p` of
/// the ball mass. Centers are taken in order: for the n-th center
/// (`n = 2, 3, ...`) the radii `1..=n-1` are scanned ascending, and the
/// first hit is returned. When the scan is exhausted the error reports
/// the best ratio encountered.
pub fn find_small_boundary_ball(
    view: &EpsView<'_>,
    centers: &[usize],
    p: usize,
) -> Result<BallRecord> {
    if centers.is_empty() {
        return Err(Error::EmptySet);
    }
    if p == 0 {
        return Err(Error::InvalidParameter("boundary fraction needs p >= 1".into()));
    }
    let g = view.graph();
    let mut best: Option<BallRecord> = None;
    for (idx, &center) in centers.iter().enumerate() {
        let n = idx + 1;
        for radius in 1..n {
            let ball = eps_ball(view, center, radius)?;
            let boundary = eps_boundary(view, &ball.members)?;
            let record = BallRecord {
                center,
                radius,
                eps: view.eps(),
                ball_mass: ball.mass(g),
                boundary_mass: boundary.iter().map(|&x| g.measure(x)).sum(),
            };
            if record.boundary_mass * (p as f64) <= record.ball_mass {
                return Ok(record);
            }
            if best.as_ref().is_none_or(|b| record.ratio() < b.ratio()) {
                best = Some(record);
            }
        }
    }
    match best {
        Some(b) => Err(Error::BallSearchExhausted {
            p,
            best_ratio: b.ratio(),
            best_center: b.center,
            best_radius: b.radius,
        }),
        None => Err(Error::BallSearchExhausted {
            p,
            best_ratio: f64::INFINITY,
            best_center: centers[0],
            best_radius: 0,
        }),
    }
}

/// Mass expansion forced by persistently large boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyCheck {
    /// Smallest boundary-to-mass ratio over radii `1..=n`.
    pub k_min: f64,
    /// `m(B(center, n))`.
    pub ball_mass: f64,
    /// `(1 + k_min)^(n-1) * m(center)`.
    pub lower_bound: f64,
    pub holds: bool,
}

/// Verifies that when every ball around `center` up to radius `n` has
/// boundary ratio at least `K`, the radius-n mass is at least
/// `(1 + K)^(n-1) m(center)`.
///
/// The chain runs through `m(B(l+1)) >= m(B(l)) + m(boundary(B(l+1)))`,
/// which needs the ratios at radii `2..=n`; the minimum is taken over
/// `1..=n`, which only weakens `K` and keeps the bound valid.
pub fn expansion_dichotomy_check(
    view: &EpsView<'_>,
    center: usize,
    n: usize,
) -> Result<DichotomyCheck> {
    if n == 0 {
        return Err(Error::InvalidRadius(0));
    }
    let g = view.graph();
    let mut k_min = f64::INFINITY;
    let mut ball_mass = 0.0;
    for radius in 1..=n {
        let ball = eps_ball(view, center, radius)?;
        let boundary = eps_boundary(view, &ball.members)?;
        let mass = ball.mass(g);
        let boundary_mass: f64 = boundary.iter().map(|&x| g.measure(x)).sum();
        k_min = k_min.min(boundary_mass / mass);
        ball_mass = mass;
    }
    let lower_bound = (1.0 + k_min).powi(n as i32 - 1) * g.measure(center);
    Ok(DichotomyCheck {
        k_min,
        ball_mass,
        lower_bound,
        holds: ball_mass >= lower_bound * (1.0 - REL_TOL),
    })
}
