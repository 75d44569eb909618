//! A laboratory for reversible computation.

pub mod analysis;
pub mod bits;
pub mod eulertour;
pub mod experiment;
pub mod oracle;
pub mod pebble;
pub mod revsim;
