//! Error type shared across the library.

use thiserror::Error;

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of graph construction and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// An undirected edge was listed twice with disagreeing weights.
    #[error("edge ({u}, {v}) listed with conflicting weights {first} and {second}")]
    ConflictingWeight { u: usize, v: usize, first: f64, second: f64 },

    /// Edge weights must be positive and finite.
    #[error("edge ({u}, {v}) has invalid weight {weight}; weights must be finite and > 0")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    /// Every vertex needs positive measure, i.e. at least one incident edge.
    #[error("vertex {vertex} has no incident edge, so its measure would be zero")]
    IsolatedVertex { vertex: usize },

    /// A graph with no edges has no vertices with positive measure.
    #[error("graph has no edges")]
    EmptyGraph,

    /// Vertex index outside `0..vertex_count`.
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    /// A vertex function whose length disagrees with the graph.
    #[error("function has {got} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    /// A vertex function value was NaN or infinite.
    #[error("function value at vertex {vertex} is not finite: {value}")]
    NonFiniteValue { vertex: usize, value: f64 },

    /// Norm exponents live in [1, infinity].
    #[error("norm exponent must satisfy q >= 1, got {0}")]
    InvalidExponent(f64),

    /// Thresholds for closeness must be nonnegative.
    #[error("closeness threshold must be nonnegative, got {0}")]
    InvalidEpsilon(f64),

    /// Radii of balls are positive integers.
    #[error("ball radius must be >= 1, got {0}")]
    InvalidRadius(usize),

    /// A parameter violated its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Dense O(n^2) storage was requested above the configured cap.
    #[error("graph with {vertices} vertices exceeds the dense-computation cap of {cap}")]
    DenseCapExceeded { vertices: usize, cap: usize },

    /// A closed-path check was handed a path that does not return to its start.
    #[error("path is not closed: starts at {start} but ends at {end}")]
    PathNotClosed { start: usize, end: usize },

    /// A path step used a pair of vertices that is not an edge.
    #[error("path step ({u}, {v}) is not an edge of the graph")]
    PathStepNotEdge { u: usize, v: usize },

    /// The exhaustive odd-walk search is restricted to small vertex sets.
    #[error("odd-walk search handles sets of at most {max} vertices, got {got}")]
    SubsetTooLarge { got: usize, max: usize },

    /// A vertex set that must be nonempty was empty.
    #[error("vertex set is empty")]
    EmptySet,

    /// A ball was paired with a view carrying a different threshold.
    #[error("ball was built at threshold {ball_eps} but the view uses {view_eps}")]
    ThresholdMismatch { ball_eps: f64, view_eps: f64 },

    /// A member of a supposed ball is unreachable from its center in the view.
    #[error("vertex {vertex} is not reachable from center {center} in the view")]
    UnreachableMember { vertex: usize, center: usize },

    /// The small-boundary ball search ran out of candidates.
    #[error(
        "no ball with boundary-to-mass ratio <= 1/{p} found; best ratio {best_ratio} \
         at center {best_center}, radius {best_radius}"
    )]
    BallSearchExhausted { p: usize, best_ratio: f64, best_center: usize, best_radius: usize },

    /// A witness build was handed classes that do not partition the ball.
    #[error("classes do not partition the ball: {detail}")]
    ClassesDoNotPartition { detail: String },

    /// The defect bound needs a ball whose boundary is small relative to its mass.
    #[error(
        "no small-boundary certificate: boundary-to-mass ratio {ratio} exceeds 1/{p} at \
         center {center}, radius {radius}"
    )]
    BoundarySizeNotCertified { ratio: f64, p: usize, center: usize, radius: usize },

    /// The defect bound applies only to balls with a valid two-coloring.
    #[error("ball at center {center} is not two-colorable at the view threshold")]
    BallNotBipartite { center: usize },

    /// Quasidistance axiom violation, reported with a witnessing tuple.
    #[error("quasidistance axiom {axiom} fails: {detail}")]
    QuasidistanceAxiom { axiom: &'static str, detail: String },

    /// Pairwise graph distances require connectivity.
    #[error("graph is not connected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },

    /// A square matrix argument had the wrong size.
    #[error("matrix has {got} entries but an n-by-n matrix with n = {n} needs {expected}")]
    MatrixShape { n: usize, expected: usize, got: usize },

    /// Generator specification string that does not parse.
    #[error("cannot parse graph specification {spec:?}: {detail}")]
    BadGraphSpec { spec: String, detail: String },

    /// A line of an edge-list file that does not parse.
    #[error("edge list line {line}: {detail}")]
    EdgeListSyntax { line: usize, detail: String },

    /// Edge-list file could not be read or written.
    #[error("edge list I/O: {0}")]
    Io(#[from] std::io::Error),
}
