//! Reversible random walks on finite weighted graphs.
//!
//! A symmetric weight `mu_xy >= 0` on pairs of vertices induces the
//! vertex measure `m(x) = sum_{y ~ x} mu_xy` and the reversible kernel
//! `p(x, y) = mu_xy / (m(x) m(y))`, whose Markov operator
//! `P f(x) = sum_y p(x, y) f(y) m(y)` is self-adjoint on `l^2(m)` with
//! spectrum in `[-1, 1]`. The crate measures what happens at the hard
//! edge of that spectrum: iterated kernels and their on-diagonal decay,
//! the spectral gap at `-1` against bipartite structure in threshold
//! geometries, volume-growth regimes with their implications, witness
//! functions that certify a vanishing gap, and Riesz-transform and
//! off-diagonal-decay diagnostics in adapted quasidistances.
//!
//! Modules:
//! - [`graph`]: weighted graphs, measures, operators, norms, edge lists.
//! - [`kernel`]: iterated kernels, on-diagonal profiles, path bounds.
//! - [`eps`]: threshold geometry, balls, boundaries, bipartite
//!   certificates.
//! - [`volume`]: growth constants, regime implications, small-boundary
//!   balls, the expansion dichotomy.
//! - [`spectral`]: conjugate spectra, the gap at `-1`, analyticity
//!   constants, witness functions, the equivalence verdict.
//! - [`riesz`]: quasidistances, gradients, the half-inverse Laplacian,
//!   Gaffney-type decay, subgaussian fits.
//! - [`generators`]: graph families, the lazy walk, the test corpus.
//! - [`report`]: deterministic JSON reports.

pub mod error;
pub mod graph;
pub mod kernel;
pub mod eps;
pub mod volume;
pub mod spectral;
pub mod riesz;
pub mod generators;
pub mod report;

pub use error::{Error, Result};
pub use graph::{
    format_edge_list, parse_edge_list, read_edge_list, write_edge_list, GraphConstants,
    LpExponent, VertexFunction, WeightedGraph,
};
pub use kernel::{
    closed_path_product_check, diag_mass, diag_mass_profile, dvl_p2_check, iterate_kernel,
    lb_infimum, lb_odd_profile, IteratedKernel, LbInfimum,
};
pub use eps::{
    bipartition, eps_ball, eps_boundary, eps_distance, eps_view, odd_walk_oracle,
    parity_partition_of_ball, BipartiteCertificate, EpsBall, EpsView,
};
pub use volume::{
    ball_volume, certified_constants, expansion_dichotomy_check, find_small_boundary_ball,
    fit_growth, implication_check, local_doubling_constant, BallRecord, DichotomyCheck, GrowthFit,
    ImplicationReport,
};
pub use spectral::{
    analyticity_constants, ball_scan, build_witness, conjugate_eigen, defect_bound_check,
    delta_power_norm_estimate, equivalence_report, extremal_eigenvalues, gap_at_minus_one,
    spectrum, BallScanCell, ConjugateEigen, ConsistencyVerdict, DefectBoundCheck,
    EquivalenceParams, EquivalenceReport, WitnessCell, WitnessFunction,
};
pub use riesz::{
    distance_quasidistance, gaffney_check, generalized_gradient, gradient,
    half_inverse_laplacian, kernel_domination_check, lemma_pdv_check, power_quasidistance,
    riesz_norm, sigma_rescale, ue_fit, validate_quasidistance, GaffneyCheck, HalfInverse,
    KernelDomination, QuasiDistance, RieszNormEstimate, ScalingCheck, SubgaussianFit,
};
pub use generators::{corpus, generate, lazify, CorpusEntry, GraphKind, GraphSpec};
pub use report::{
    analyticity_values, ball_row, ball_rows, build_report, config_section, gap_section,
    graph_section, odd_power_rows, riesz_section, spectrum_section, verdict_section,
    volume_section, witness_rows, Report, RieszParams, F17,
};
