//! Shared fixtures for the criterion benches.

use texbench_core::maskio::{BinaryMask, InstanceLabelMap};
use texbench_core::{synth, RgbImage};

/// A deterministic scene at the default 128×128 content canvas.
pub fn content_image(seed: u64) -> RgbImage {
    synth::scene(seed, 128, 128, 4).0
}

/// A GT map with `regions` instances and predictions that split each region
/// into `fragments` bands.
pub fn eval_case(side: usize, regions: u16, fragments: usize) -> (Vec<BinaryMask>, Vec<f64>, InstanceLabelMap) {
    let (_, gt) = synth::scene(7, side, side, regions);
    let preds = synth::predictions_from_gt(&gt, fragments);
    let masks = preds.decode_masks().expect("synthetic predictions decode");
    (masks, preds.scores(), gt)
}
