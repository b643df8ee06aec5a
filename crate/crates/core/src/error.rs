use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model entry {0} is not finite")]
    NonFinite(&'static str),
    #[error("model entry {name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("off-diagonal entry {0} must be non-zero")]
    ZeroCoupling(&'static str),
    #[error("sway/yaw inertia block is singular: m22*m33 - m23^2 = {0}")]
    SingularInertia(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainError {
    #[error("gain {name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("stage {stage} of the step at t = {t} produced a non-finite rate")]
    NonFiniteStage { stage: usize, t: f64 },
    #[error("state became non-finite at t = {t}: {state:?}")]
    Diverged { t: f64, state: Vec<f64> },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Gain(#[from] GainError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series spans {span} s, shorter than the required window of {window} s")]
    InsufficientData { span: f64, window: f64 },
    #[error("fit window contains no usable samples")]
    EmptyWindow,
    #[error("time series was recorded in {found} mode, expected {expected}")]
    ModeMismatch { expected: &'static str, found: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    BadValue {
        line: usize,
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: key `{key}` does not apply to {mode} mode")]
    KeyNotForMode {
        line: usize,
        key: String,
        mode: &'static str,
    },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("series `{0}` needs at least two points")]
    TooFewPoints(String),
    #[error("series `{0}` contains a non-finite coordinate")]
    NonFinite(String),
    #[error("nothing to plot")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
