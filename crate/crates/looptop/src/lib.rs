//! Input grammar, JSON schema and table rendering for the `looptop` binary.

pub mod report;
pub mod space;
pub mod table;
