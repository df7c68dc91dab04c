use std::fmt;
use std::path::Path;

use serde_json::json;

/// A domain error: reported as one JSON object on stderr, exit status 1.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.to_string(), message: message.into() }
    }

    pub fn manifest(message: impl Into<String>) -> Self {
        CliError::new("manifest", message)
    }

    pub fn bundle(message: impl Into<String>) -> Self {
        CliError::new("bundle", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new("io", format!("{}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<subshift_core::Error> for CliError {
    fn from(e: subshift_core::Error) -> Self {
        // Variant name, without its fields.
        let debug = format!("{e:?}");
        let name = debug.split(|c: char| c == ' ' || c == '(' || c == '{').next().unwrap_or("core");
        CliError::new(&snake(name), e.to_string())
    }
}

fn snake(name: &str) -> String {
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}
