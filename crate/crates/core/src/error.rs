use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("singular momentum: |k| = {0:e}")]
    SingularMomentum(f64),

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("cluster {cluster}: |chi| = {magnitude:e} below node threshold {threshold:e}")]
    Node {
        cluster: usize,
        magnitude: f64,
        threshold: f64,
    },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("stencil reaches a pair coincidence: pair distance {distance:e} < guard {guard:e}")]
    SingularStencil { distance: f64, guard: f64 },

    #[error("pair ({0}, {1}) has no component along the separating coordinates")]
    DegeneratePair(usize, usize),

    #[error("insufficient data: {usable} usable points, {required} required")]
    InsufficientData { usable: usize, required: usize },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
