//! Analytics for multilayer interbank exposure networks.
//!
//! Exposures are organized as a tensor of per-instrument layers with optional
//! interlayer couplings ([`network`]). On top of that the crate provides
//! monoplex, projected and multilayer centralities ([`centrality`]), the
//! spectral stability index and super-spreader capital surcharge
//! ([`surcharge`]), diffusion and time-scale ranking stability
//! ([`dynamics`]), factor attribution by principal components ([`factors`]),
//! and a seeded synthetic generator ([`testbed`]).

pub mod centrality;
pub mod dynamics;
pub mod error;
pub mod factors;
pub mod ingest;
pub mod layers;
pub mod network;
pub mod sparse;
pub mod surcharge;
pub mod testbed;

pub use error::{Error, Result};
