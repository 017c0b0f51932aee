use serde_json::json;

use crate::expr::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot parse {field} {source}")]
    Parse { field: String, source: ParseError },

    #[error("{field} is not periodic in {variable} with period {period}")]
    Periodicity { field: String, variable: String, period: f64 },

    #[error(transparent)]
    Solver(#[from] plateflow::Error),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl CliError {
    /// 1: configuration, 2: incompatible data, 3: solver failure,
    /// 4: validation failure.
    pub fn exit_code(&self) -> i32 {
        use plateflow::Error as E;
        match self {
            CliError::Config(_) | CliError::Parse { .. } | CliError::Periodicity { .. } | CliError::Output(_) => 1,
            CliError::Solver(e) => match e {
                E::Incompatible { .. } => 2,
                E::Divergence { .. } | E::DegenerateDeformation(_) | E::Singular { .. } => 3,
                _ => 1,
            },
            CliError::Validation(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        use plateflow::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Parse { .. } => "parse",
            CliError::Periodicity { .. } => "periodicity",
            CliError::Output(_) => "output",
            CliError::Validation(_) => "validation",
            CliError::Solver(e) => match e {
                E::Incompatible { .. } => "incompatible-data",
                E::Divergence { .. } => "divergence",
                E::DegenerateDeformation(_) => "degenerate-deformation",
                E::Singular { .. } => "singular-system",
                _ => "solver",
            },
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            CliError::Parse { field, source } => {
                v["field"] = json!(field);
                v["column"] = json!(source.position + 1);
            }
            CliError::Periodicity { field, variable, period } => {
                v["field"] = json!(field);
                v["variable"] = json!(variable);
                v["period"] = json!(period);
            }
            CliError::Solver(plateflow::Error::Incompatible { k, mean }) => {
                v["k"] = json!(k);
                v["mean"] = json!(mean);
            }
            CliError::Solver(plateflow::Error::Divergence { step, reason }) => {
                v["step"] = json!(step);
                v["reason"] = json!(reason);
            }
            _ => {}
        }
        v
    }
}
