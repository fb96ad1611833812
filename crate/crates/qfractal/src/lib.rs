pub mod backward;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod par;
pub mod trace;
