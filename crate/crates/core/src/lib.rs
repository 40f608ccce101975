pub mod config;
pub mod dp;
pub mod eval;
pub mod graph;
pub mod nn;
pub mod solvers;
pub mod train;

/// Comparator network parameters in double precision.
pub type CmpParams = nn::Params<f64>;
/// Single-precision parameters, for smaller weight sets and faster scoring.
pub type CmpParamsF32 = nn::Params<f32>;
