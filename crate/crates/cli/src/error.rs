use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] macrobell_core::Error),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 when a truncation guard trips,
    /// 3 when the numerics contradict themselves.
    pub fn exit_code(&self) -> u8 {
        use macrobell_core::Error as E;
        match self {
            Self::Config(_) | Self::Io { .. } => 1,
            Self::Core(e) => match e {
                E::Truncation { .. } => 2,
                E::NegativeProbability { .. }
                | E::DegenerateDenominator(_)
                | E::SingularCovariance(_)
                | E::InvalidCovariance(_) => 3,
                E::NoViolation { .. } | E::InvalidGrid(_) | E::InvalidParameter(_) => 1,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use macrobell_core::Error as E;

    #[test]
    fn exit_codes() {
        let trunc = E::Truncation {
            what: "x".into(),
            n_max: 1,
            tail: 1.0,
            tol: 0.0,
        };
        assert_eq!(CliError::from(trunc).exit_code(), 2);
        let neg = E::NegativeProbability {
            i: 0,
            j: 0,
            value: -1.0,
        };
        assert_eq!(CliError::from(neg).exit_code(), 3);
        assert_eq!(CliError::from(E::DegenerateDenominator(0.0)).exit_code(), 3);
        assert_eq!(CliError::Config("bad".into()).exit_code(), 1);
        assert_eq!(CliError::from(E::InvalidGrid("g".into())).exit_code(), 1);
    }
}
