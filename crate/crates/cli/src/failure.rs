use std::fmt::Display;
use std::path::Path;

/// Exit code 1 for numerical or output failures, 2 for bad input.
#[derive(Debug)]
pub enum Failure {
    Internal(String),
    User(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::User(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Internal(m) | Failure::User(m) => m,
        }
    }

    pub fn user(m: impl Display) -> Self {
        Failure::User(m.to_string())
    }

    pub fn internal(m: impl Display) -> Self {
        Failure::Internal(m.to_string())
    }
}

impl From<hamclass::Error> for Failure {
    fn from(e: hamclass::Error) -> Self {
        match e {
            hamclass::Error::Numerical(_) => Failure::Internal(e.to_string()),
            hamclass::Error::QubitCap { .. } => Failure::User(format!(
                "{e}; use `--mode qudit` (optionally with `--group`) to compress the control register, or raise `--max-qubits`"
            )),
            _ => Failure::User(e.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Fails with exit code 2 when an input file is missing.
pub fn require_file(path: &Path, what: &str) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::user(format!("{what} file `{}` not found", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(Failure::from(hamclass::Error::Numerical("x".into())).code(), 1);
        assert_eq!(Failure::from(hamclass::Error::EmptySide("YES")).code(), 2);
        let cap = Failure::from(hamclass::Error::QubitCap { requested: 46, cap: 24 });
        assert!(cap.message().contains("--mode qudit"));
    }
}
