//! Cautious consequences of ground normal logic programs, computed by an
//! anytime family of algorithms that stream sound under- and overestimates.

pub mod algorithms;
pub mod cli;
pub mod completion;
pub mod engine;
pub mod ingest;
pub mod lit;
pub mod multi;
pub mod oracle;
pub mod preprocess;
pub mod program;
pub mod protocol;

#[cfg(test)]
pub(crate) mod test_fixtures {
    pub const EXAMPLE_PROGRAM: &str = include_str!("../tests/fixtures/example1.lp");
}
