//! Text formats: the network file, CSV reports and float rendering.

pub mod network_file;
pub mod numfmt;
pub mod reports;

pub use network_file::{
    parse_network, parse_network_unchecked, serialize_network, Diagnostic, DiagnosticKind,
    ParseError,
};
pub use numfmt::fmt_sig;
pub use reports::{write_cases, write_provenance, write_report};
