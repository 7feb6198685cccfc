//! Texture-transfer dataset augmentation and texture-aware segmentation
//! evaluation.
//!
//! - [`codec`]: analytic Gaussian patch codec (encode, merge, decode).
//! - [`augment`]: per-instance texture transfer and batch dataset builds.
//! - [`maskio`]: label-map PNGs, prediction JSON, row-major RLE.
//! - [`metrics`]: plurality assignment, aggregated/non-aggregated mIoU, ARI.
//! - [`fragstats`]: predicted-mask counts grouped by GT segment count.

pub mod augment;
pub mod codec;
pub mod error;
pub mod fragstats;
pub mod fsutil;
pub mod maskio;
pub mod metrics;
pub mod raster;
pub mod rng;
pub mod synth;

pub use augment::{AugmentationConfig, AugmentationRecord, DatasetManifest, EtaMode, TextureBank};
pub use codec::{GaussianComposition, GaussianSplat, PatchGrid};
pub use error::{Error, Result};
pub use fragstats::FragmentationSummary;
pub use maskio::{BinaryMask, InstanceLabelMap, PredictionSet, RunLength};
pub use metrics::{EvalConfig, EvalPair, MetricsReport};
pub use raster::RgbImage;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
