//! Core algorithms for grid-based saliency ranking and visual attention
//! analytics.
//!
//! The crate covers four areas:
//!
//! * **Saliency ranking**: a backbone saliency map is divided into a `k x k`
//!   grid and every segment is scored by a weighted sum of histogram entropy,
//!   mean saliency, center bias, and optional depth ([`sara`]). Scores can be
//!   pooled over arbitrary element masks to rank interface regions instead of
//!   raw grid cells. A map [`normalize`] pass (Gaussian smoothing, contrast
//!   stretch, intensity quantization) sharpens rank agreement for noisy
//!   backbones, and [`spectral`] provides a self-contained frequency-domain
//!   backbone so ranking works without any external model.
//! * **Evaluation**: Spearman rank correlation, salient object ranking (SOR)
//!   scores, shuffled AUC, and fixation-derived ground-truth ranks
//!   ([`metrics`]).
//! * **Gaze and mouse analytics**: dispersion-based fixation detection
//!   ([`gaze`]), Gaussian attention heatmaps ([`heatmap`]), and area-of-interest
//!   attention metrics comparing two participant groups ([`aoi`]).
//! * **Nonparametric statistics**: Kruskal-Wallis, Mann-Whitney U, and Levene
//!   tests with effect sizes, plus the demographic screening report built on
//!   them ([`stats`]). The special functions backing the p-values live in
//!   [`special`].
//!
//! The crate is `no_std` compatible (it requires `alloc`); the default `std`
//! feature only adds `std::error::Error` conveniences through the standard
//! prelude. All floating-point work goes through `libm` so results are
//! identical with and without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod aoi;
pub mod error;
pub mod filter;
pub mod gaze;
pub mod heatmap;
pub mod map;
pub mod metrics;
pub mod normalize;
pub mod sara;
pub mod special;
pub mod spectral;
pub mod stats;

mod fft;

pub use error::{Error, Result};
pub use map::{DepthMap, SaliencyMap};
pub use normalize::NormalizeConfig;
pub use sara::{ElementMask, GridConfig, RankEntry, RankList, ScoreWeights, SegmentScore};
