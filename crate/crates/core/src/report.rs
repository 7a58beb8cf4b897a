//! Machine-readable reports with byte-deterministic serialization.
//!
//! Every float in the JSON output goes through [`F17`], which prints in
//! scientific notation with 17 significant digits. That pins the exact
//! byte representation across platforms and serde versions, so reports
//! can be diffed and frozen in tests. Field order follows struct order;
//! nothing in a report depends on wall-clock time or environment.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::riesz::{
    self, KernelDomination, QuasiDistance, RieszNormEstimate, ScalingCheck, SubgaussianFit,
};
use crate::spectral::{
    equivalence_report, BallScanCell, ConsistencyVerdict, EquivalenceParams, EquivalenceReport,
    GAP_ZERO_TOL,
};
use crate::volume::{fit_growth, implication_check, GrowthFit, ImplicationReport};

/// A float that serializes as a raw JSON number with 17 significant
/// digits in scientific notation (`null` when not finite).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl From<f64> for F17 {
    fn from(v: f64) -> Self {
        F17(v)
    }
}

impl From<F17> for f64 {
    fn from(v: F17) -> f64 {
        v.0
    }
}

impl std::fmt::Display for F17 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(serializer)
        } else {
            serializer.serialize_unit()
        }
    }
}

fn f17_vec(values: &[f64]) -> Vec<F17> {
    values.iter().copied().map(F17).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSection {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub has_loops: bool,
    pub connected: bool,
    pub total_mass: F17,
    pub max_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigSection {
    pub eps_grid: Vec<F17>,
    pub radii: Vec<usize>,
    pub odd_k_max: usize,
    pub q_list: Vec<F17>,
    pub analytic_n_max: usize,
    pub dense_cap: usize,
    pub growth_radius: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSection {
    /// Full conjugate spectrum, ascending; absent when the graph exceeds
    /// the dense cap and only extremes were estimated.
    pub eigenvalues: Option<Vec<F17>>,
    pub lambda_min: F17,
    pub lambda_max: Option<F17>,
    pub estimated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapSection {
    pub value: F17,
    pub is_zero: bool,
    pub tolerance: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct OddPowerRow {
    pub k: usize,
    pub infimum: F17,
    pub argmin: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsSection {
    pub vertex_count: usize,
    pub max_degree: usize,
    pub scan_radius: usize,
    pub local_doubling: F17,
    pub doubling: F17,
    pub polynomial_constant: F17,
    pub growth_exponent: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationSection {
    pub dv_exponent: F17,
    pub dv_violations: usize,
    pub dv_implies_pdv: bool,
    pub dvl_bound: F17,
    pub local_doubling: F17,
    pub pdv_implies_dvl: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeSection {
    pub constants: ConstantsSection,
    pub ratio_profile: Vec<F17>,
    pub implications: ImplicationSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallRow {
    pub eps: F17,
    pub radius: usize,
    pub scanned: usize,
    pub bipartite: usize,
    pub first_bipartite_center: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub eps: F17,
    pub radius: usize,
    pub center: usize,
    pub q: F17,
    pub defect: F17,
    pub ball_mass: F17,
    pub boundary_mass: F17,
    pub class_sizes: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictSection {
    pub applicable: bool,
    pub gap_is_zero: bool,
    pub bipartite_at_zero: bool,
    pub odd_infima_all_zero: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiDistanceSection {
    pub c_rho: F17,
    pub beta: F17,
    pub d_rho: F17,
    pub witness_triple: Option<(usize, usize, usize)>,
    pub exact_scan: bool,
    pub max_value: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingSection {
    pub holds: bool,
    pub worst_pair: Option<(usize, usize)>,
    pub worst_ratio: F17,
    pub implied_exponent: F17,
    pub implied_constant: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaSection {
    pub l: usize,
    pub c_rho: F17,
    pub beta: F17,
    pub unit_fraction: F17,
}

#[derive(Clone, Debug, Serialize)]
pub struct RieszNormRow {
    pub q: F17,
    pub value: F17,
    pub trials: usize,
    pub lower_bound_only: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgaussianSection {
    pub upper_constant: F17,
    pub decay_constant: F17,
    pub exponent: F17,
    pub k_max: usize,
    pub attained_at: (usize, usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationSection {
    pub l: usize,
    pub constant: F17,
    pub worst_ratio: F17,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RieszSection {
    /// `None` for the hop metric, otherwise the power applied to it.
    pub rho_exponent: Option<F17>,
    pub quasidistance: QuasiDistanceSection,
    pub scaling: ScalingSection,
    pub sigma: SigmaSection,
    pub norms: Vec<RieszNormRow>,
    pub subgaussian: SubgaussianSection,
    pub domination: Option<DominationSection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub graph: GraphSection,
    pub config: ConfigSection,
    pub spectrum: SpectrumSection,
    pub gap_at_minus_one: GapSection,
    pub analyticity: Vec<F17>,
    pub odd_powers: Vec<OddPowerRow>,
    pub volume: VolumeSection,
    pub balls: Vec<BallRow>,
    pub witnesses: Vec<WitnessRow>,
    pub verdict: VerdictSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz: Option<RieszSection>,
}

impl Report {
    /// Pretty JSON with pinned float formatting. Serialization of these
    /// fixed shapes cannot fail.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report shapes always serialize")
    }

    /// The ball-scan table as CSV, floats in the same pinned format.
    pub fn balls_csv(&self) -> String {
        let mut out = String::from("eps,radius,scanned,bipartite,first_bipartite_center\n");
        for row in &self.balls {
            let center =
                row.first_bipartite_center.map_or(String::new(), |c| c.to_string());
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.eps, row.radius, row.scanned, row.bipartite, center
            ));
        }
        out
    }

    /// The witness-defect table as CSV, floats in the same pinned format.
    pub fn witnesses_csv(&self) -> String {
        let mut out =
            String::from("eps,radius,center,q,defect,ball_mass,boundary_mass,even,odd\n");
        for row in &self.witnesses {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.eps,
                row.radius,
                row.center,
                row.q,
                row.defect,
                row.ball_mass,
                row.boundary_mass,
                row.class_sizes.0,
                row.class_sizes.1
            ));
        }
        out
    }
}

/// Parameters of the optional Riesz block of a report.
#[derive(Clone, Debug)]
pub struct RieszParams {
    /// `None` takes the hop metric; `Some(p)` takes its p-th power.
    pub rho_exponent: Option<f64>,
    /// Step count for the sigma rescale and the kernel domination check.
    pub l: usize,
    /// Horizon of the subgaussian fit.
    pub k_max: usize,
    /// Exponents probed by the Riesz-norm sampler.
    pub q_list: Vec<f64>,
    /// Radius range of the implied polynomial-growth constant.
    pub r_max: usize,
}

impl Default for RieszParams {
    fn default() -> Self {
        RieszParams { rho_exponent: None, l: 3, k_max: 8, q_list: vec![2.0], r_max: 8 }
    }
}

fn quasidistance_section(qd: &QuasiDistance) -> QuasiDistanceSection {
    QuasiDistanceSection {
        c_rho: F17(qd.c_rho),
        beta: F17(qd.beta),
        d_rho: F17(qd.d_rho),
        witness_triple: qd.witness_triple,
        exact_scan: qd.exact_scan,
        max_value: qd.max_value(),
    }
}

fn scaling_section(check: &ScalingCheck) -> ScalingSection {
    ScalingSection {
        holds: check.holds,
        worst_pair: check.worst_pair,
        worst_ratio: F17(check.worst_ratio),
        implied_exponent: F17(check.implied_exponent),
        implied_constant: F17(check.implied_constant),
    }
}

fn norm_row(est: &RieszNormEstimate) -> RieszNormRow {
    RieszNormRow {
        q: F17(est.q),
        value: F17(est.value),
        trials: est.trials,
        lower_bound_only: est.lower_bound_only,
    }
}

fn subgaussian_section(fit: &SubgaussianFit) -> SubgaussianSection {
    SubgaussianSection {
        upper_constant: F17(fit.upper_constant),
        decay_constant: F17(fit.decay_constant),
        exponent: F17(fit.exponent),
        k_max: fit.k_max,
        attained_at: fit.attained_at,
    }
}

fn domination_section(check: &KernelDomination) -> DominationSection {
    DominationSection {
        l: check.l,
        constant: F17(check.constant),
        worst_ratio: F17(check.worst_ratio),
        holds: check.holds,
    }
}

/// Runs the full Riesz pipeline and packages it: quasidistance
/// validation, scaling check, sigma rescale, norm sampling, subgaussian
/// fit, and kernel domination. Domination is skipped (not failed) when
/// the `l - 1` step return mass vanishes somewhere, which is the
/// bipartite parity obstruction.
pub fn riesz_section(g: &WeightedGraph, params: &RieszParams) -> Result<RieszSection> {
    let qd = match params.rho_exponent {
        None => riesz::distance_quasidistance(g)?,
        Some(p) => riesz::power_quasidistance(g, p)?,
    };
    let scaling = riesz::lemma_pdv_check(g, &qd, params.r_max)?;
    let sigma = riesz::sigma_rescale(g, &qd, params.l)?;
    let n = sigma.size();
    let unit = sigma.entries().iter().filter(|&&v| v == 1).count();
    let off_diag = n * n - n;
    let sigma_section = SigmaSection {
        l: params.l,
        c_rho: F17(sigma.c_rho),
        beta: F17(sigma.beta),
        unit_fraction: F17(if off_diag == 0 { 0.0 } else { unit as f64 / off_diag as f64 }),
    };
    let mut norms = Vec::new();
    for &q in &params.q_list {
        norms.push(norm_row(&riesz::riesz_norm(g, q)?));
    }
    let subgaussian = subgaussian_section(&riesz::ue_fit(g, &qd, params.k_max)?);
    let domination = match riesz::kernel_domination_check(g, params.l) {
        Ok(check) => Some(domination_section(&check)),
        Err(_) => None,
    };
    Ok(RieszSection {
        rho_exponent: params.rho_exponent.map(F17),
        quasidistance: quasidistance_section(&qd),
        scaling: scaling_section(&scaling),
        sigma: sigma_section,
        norms,
        subgaussian,
        domination,
    })
}

/// Assembles a full report: spectral equivalence scan, volume growth,
/// and optionally the Riesz block. `growth_radius` bounds the volume
/// fit; the equivalence scan is controlled by `params`.
pub fn build_report(
    g: &WeightedGraph,
    name: &str,
    params: &EquivalenceParams,
    growth_radius: usize,
    riesz_params: Option<&RieszParams>,
) -> Result<Report> {
    let eq = equivalence_report(g, params)?;
    let fit = fit_growth(g, growth_radius)?;
    let implications = implication_check(g, &fit)?;
    let riesz = match riesz_params {
        Some(rp) => Some(riesz_section(g, rp)?),
        None => None,
    };
    Ok(assemble(g, name, params, growth_radius, &eq, &fit, &implications, riesz))
}

/// Graph summary header used by every report shape.
pub fn graph_section(g: &WeightedGraph, name: &str) -> GraphSection {
    GraphSection {
        name: name.to_string(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        has_loops: g.has_loops(),
        connected: g.is_connected(),
        total_mass: F17(g.total_mass()),
        max_degree: g.local_finiteness_degree(),
    }
}

/// Echo of the scan parameters.
pub fn config_section(params: &EquivalenceParams, growth_radius: usize) -> ConfigSection {
    ConfigSection {
        eps_grid: f17_vec(&params.eps_grid),
        radii: params.radii.clone(),
        odd_k_max: params.odd_k_max,
        q_list: f17_vec(&params.q_list),
        analytic_n_max: params.analytic_n_max,
        dense_cap: params.dense_cap,
        growth_radius,
    }
}

/// Spectrum block of an equivalence report.
pub fn spectrum_section(eq: &EquivalenceReport) -> SpectrumSection {
    SpectrumSection {
        eigenvalues: eq.eigenvalues.as_deref().map(f17_vec),
        lambda_min: F17(eq.gap - 1.0),
        lambda_max: eq
            .eigenvalues
            .as_ref()
            .and_then(|ev| ev.last().copied())
            .map(F17),
        estimated: eq.gap_is_estimate,
    }
}

/// Gap block of an equivalence report.
pub fn gap_section(eq: &EquivalenceReport) -> GapSection {
    GapSection {
        value: F17(eq.gap),
        is_zero: eq.verdict.gap_is_zero,
        tolerance: F17(GAP_ZERO_TOL),
    }
}

/// Analyticity constants `a_n`, pinned to the report float format.
pub fn analyticity_values(eq: &EquivalenceReport) -> Vec<F17> {
    f17_vec(&eq.analyticity)
}

/// Odd-step diagonal infima rows of an equivalence report.
pub fn odd_power_rows(eq: &EquivalenceReport) -> Vec<OddPowerRow> {
    eq.odd_diag
        .iter()
        .map(|row| OddPowerRow { k: row.k, infimum: F17(row.value), argmin: row.argmin })
        .collect()
}

/// Volume block from a growth fit and its implication checks.
pub fn volume_section(fit: &GrowthFit, implications: &ImplicationReport) -> VolumeSection {
    VolumeSection {
        constants: ConstantsSection {
            vertex_count: fit.constants.vertex_count,
            max_degree: fit.constants.max_degree,
            scan_radius: fit.constants.scan_radius,
            local_doubling: F17(fit.constants.local_doubling),
            doubling: F17(fit.constants.doubling),
            polynomial_constant: F17(fit.constants.polynomial_constant),
            growth_exponent: F17(fit.constants.growth_exponent),
        },
        ratio_profile: f17_vec(&fit.ratio_profile),
        implications: ImplicationSection {
            dv_exponent: F17(implications.dv_exponent),
            dv_violations: implications.dv_violations,
            dv_implies_pdv: implications.dv_implies_pdv,
            dvl_bound: F17(implications.dvl_bound),
            local_doubling: F17(implications.local_doubling),
            pdv_implies_dvl: implications.pdv_implies_dvl,
        },
    }
}

/// One ball-scan cell as a report row.
pub fn ball_row(cell: &BallScanCell) -> BallRow {
    BallRow {
        eps: F17(cell.eps),
        radius: cell.radius,
        scanned: cell.scanned,
        bipartite: cell.bipartite,
        first_bipartite_center: cell.first_bipartite_center,
    }
}

/// Ball-scan table of an equivalence report.
pub fn ball_rows(eq: &EquivalenceReport) -> Vec<BallRow> {
    eq.balls.iter().map(ball_row).collect()
}

/// Witness-defect table of an equivalence report.
pub fn witness_rows(eq: &EquivalenceReport) -> Vec<WitnessRow> {
    eq.witnesses
        .iter()
        .map(|cell| WitnessRow {
            eps: F17(cell.eps),
            radius: cell.radius,
            center: cell.center,
            q: F17(cell.q),
            defect: F17(cell.defect),
            ball_mass: F17(cell.ball_mass),
            boundary_mass: F17(cell.boundary_mass),
            class_sizes: cell.class_sizes,
        })
        .collect()
}

/// Verdict block of an equivalence report.
pub fn verdict_section(v: &ConsistencyVerdict) -> VerdictSection {
    VerdictSection {
        applicable: v.applicable,
        gap_is_zero: v.gap_is_zero,
        bipartite_at_zero: v.bipartite_at_zero,
        odd_infima_all_zero: v.odd_infima_all_zero,
        consistent: v.consistent,
    }
}

/// Pure assembly of precomputed pieces into the report shape.
#[allow(clippy::too_many_arguments)]
pub fn assemble(
    g: &WeightedGraph,
    name: &str,
    params: &EquivalenceParams,
    growth_radius: usize,
    eq: &EquivalenceReport,
    fit: &GrowthFit,
    implications: &ImplicationReport,
    riesz: Option<RieszSection>,
) -> Report {
    let graph = graph_section(g, name);
    let config = config_section(params, growth_radius);
    let spectrum = spectrum_section(eq);
    let gap_at_minus_one = gap_section(eq);
    let odd_powers = odd_power_rows(eq);
    let volume = volume_section(fit, implications);
    let balls = ball_rows(eq);
    let witnesses = witness_rows(eq);
    let verdict = verdict_section(&eq.verdict);
    Report {
        graph,
        config,
        spectrum,
        gap_at_minus_one,
        analyticity: analyticity_values(eq),
        odd_powers,
        volume,
        balls,
        witnesses,
        verdict,
        riesz,
    }
}
