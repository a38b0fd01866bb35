//! Command-line front-end and HTTP session service for kbshell.

pub mod cli;
pub mod http;
pub mod service;

pub use cli::{run_cli, run_cli_with, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
pub use service::{KbRegistry, ServiceError, SessionService, SessionStateView};
