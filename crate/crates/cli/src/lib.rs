//! File formats, the instance corpus, the verification suites, and the
//! `persuade` command line.

pub mod cli;
pub mod corpus;
pub mod format;
pub mod suites;
