use std::fmt;

/// An input problem, reported with exit code 2.
#[derive(Debug)]
pub struct CliError {
    pub path: String,
    pub message: String,
}

impl CliError {
    pub fn input(path: &str, message: &str) -> Self {
        Self { path: path.to_string(), message: message.to_string() }
    }

    pub fn core(path: &str, e: kackit::Error) -> Self {
        Self { path: path.to_string(), message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for CliError {}
