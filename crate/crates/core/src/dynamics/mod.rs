//! Diffusion on the symmetrized multiplex and centrality stability across
//! aggregation time scales.

mod diffusion;
mod laplacian;
mod timescale;

pub use diffusion::{diffuse, Trajectory};
pub use laplacian::{algebraic_connectivity, laplacian_spectrum, supra_laplacian, Connectivity, SupraLaplacian};
pub use timescale::{
    kendall_tau_b, timescale_centrality_stability, BlockRanking, MeasureTimescale, ScaleOverlap, ScaleStability,
    TimescaleConfig, TimescaleReport,
};
