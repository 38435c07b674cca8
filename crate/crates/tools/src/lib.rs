//! File formats, evaluation harness, and CLI for the saliency-ranking
//! toolkit.
//!
//! The core crate stays IO-free; this companion adds PNG raster loading
//! ([`raster`]), the gaze-log JSON schema ([`gazefile`]), dataset manifests
//! ([`manifest`]), the dataset evaluation harness ([`eval`]), rank overlay
//! rendering ([`overlay`]), and the `sara` command-line interface ([`cli`]).

pub mod cli;
pub mod eval;
pub mod gazefile;
pub mod manifest;
pub mod overlay;
pub mod raster;
