pub mod algebra;
pub mod cech;
pub mod cli;
pub mod coeff;
pub mod deform;
pub mod error;
pub mod input;
pub mod linalg;
pub mod qcoh;
pub mod report;
pub mod rewrite;
pub mod scheme;
pub mod tilt;
#[cfg(test)]
pub mod testutil;
