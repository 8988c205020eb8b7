//! Configuration, subcommands and exit-code policy for the `fluxopt` binary.

pub mod commands;
pub mod config;

use thiserror::Error;

pub use config::{ConfigError, Format, RunConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] fluxopt_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn core_exit_code(e: &fluxopt_core::Error) -> i32 {
    use fluxopt_core::Error as E;
    match e {
        E::NonConvergence(_) | E::ShiftOutsideSupport(_) => EXIT_NON_CONVERGENCE,
        E::InvalidParameter { .. } | E::DimensionGuard(_) | E::SingularCapacitance => EXIT_CONFIG,
        E::AtJunctionCount { source, .. } => core_exit_code(source),
    }
}

impl CliError {
    /// 2 for anything traceable to the configuration, 3 when the solver
    /// fails to converge (or cannot fit the 2π shift), 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) => core_exit_code(e),
            CliError::Io(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluxopt_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(E::NonConvergence("x".into())).exit_code(), 3);
        let wrapped = E::AtJunctionCount {
            n: 5,
            source: Box::new(E::NonConvergence("x".into())),
        };
        assert_eq!(CliError::Core(wrapped).exit_code(), 3);
        assert_eq!(CliError::Core(E::SingularCapacitance).exit_code(), 2);
        let cfg = RunConfig::parse("nope").unwrap_err();
        assert_eq!(CliError::Config(cfg).exit_code(), 2);
    }
}
