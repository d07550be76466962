use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no (a, b) with a != b solves (n+2)b^2 = 2a^2 - 2a + 1 for n={n}, q={q}")]
    NoAbSolution { n: usize, q: u32 },
    #[error("construction classes overlap at vector {0}")]
    Overlap(String),
    #[error("unknown {what}: {name:?}")]
    Unknown { what: &'static str, name: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
