pub mod catalog;
pub mod certs;
pub mod cli;
pub mod pointwise;
pub mod polycore;
pub mod sections;
pub mod witness;
