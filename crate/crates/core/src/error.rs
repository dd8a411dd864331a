use thiserror::Error;

use crate::graph::Violation;
use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not doubly connected")]
    NotDoublyConnected,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("no torsion function: 0 lies in the spectrum of the discrete Laplacian (eigenvalue {spectrum_min:e})")]
    NoTorsion { spectrum_min: f64 },
    #[error("quadratic form is not positive on the test function (h = {energy:e})")]
    DegenerateForm { energy: f64 },
    #[error("test function is discontinuous at vertex `{0}`")]
    Discontinuous(String),
    #[error("test function does not vanish at Dirichlet vertex `{0}`")]
    NonzeroAtDirichlet(String),
    #[error("test function has no piece on edge `{0}`")]
    MissingPiece(String),
    #[error("edge-length derivative depends on the evaluation point on edge `{edge}` (spread {spread:e})")]
    PointDependence { edge: String, spread: f64 },

    #[error("ground state energy is negative")]
    NegativeGroundState,
    #[error("mesh refinement exceeded the budget of {cap} degrees of freedom")]
    BudgetExceeded { cap: usize },

    #[error("new length {new} is not longer than {old}")]
    NotLonger { old: f64, new: f64 },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("cannot glue a vertex to itself")]
    SameVertex,
    #[error("operation is not defined at Dirichlet vertex `{0}`")]
    DirichletUnsupported(String),
    #[error("cut would disconnect the graph")]
    Disconnects,
    #[error("cut strengths {split} do not add up to {original}")]
    StrengthMismatch { original: f64, split: f64 },
    #[error("bad attachment: {0}")]
    BadAttachment(String),
    #[error("identifier `{0}` already in use")]
    IdCollision(String),
    #[error("edge `{0}` is not a pendant edge at the given vertex")]
    NotPendant(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("verdict inconclusive: margin {margin:e} is within the eigenvalue error {error:e}")]
    InconclusiveAccuracy { margin: f64, error: f64 },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
