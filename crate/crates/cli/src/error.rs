use serde::Serialize;

/// A failure with its exit code and machine-readable kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: "config", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io", message: message.into() }
    }

    pub fn check(message: impl Into<String>) -> Self {
        CliError { kind: "check", message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            "check" => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<kg_core::Error> for CliError {
    fn from(e: kg_core::Error) -> Self {
        CliError::config(e.to_string())
    }
}
