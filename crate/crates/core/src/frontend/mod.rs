//! Sentence parsing, normalization, certificate documents, independent
//! verification, configuration and the command-line driver.

pub mod config;
pub mod document;
pub mod normalize;
pub mod parse;
pub mod run;
pub mod verify;

pub use config::{load_config, Config, CONFIG_ENV};
pub use document::CertificateDocument;
pub use normalize::{normalize, NormalDisjunct, NormalForm};
pub use parse::{parse, parse_term, SentenceAst, Term};
pub use run::{run_decide, verdict_exit_code};
pub use verify::{verify, Verification};
