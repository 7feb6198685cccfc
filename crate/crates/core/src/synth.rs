//! Deterministic synthetic scenes, textures and predictions for smoke runs
//! and benchmarks.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::ManifestEntry;
use crate::error::Result;
use crate::fsutil;
use crate::maskio::{self, BinaryMask, InstanceLabelMap, PredictionSet};
use crate::raster::RgbImage;

/// A gradient background with `n_instances` overlapping coloured rectangles.
/// Later rectangles paint over earlier ones; ids are `1..=n_instances`
/// (an id may vanish if fully covered).
pub fn scene(seed: u64, width: usize, height: usize, n_instances: u16) -> (RgbImage, InstanceLabelMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = RgbImage::from_fn(width, height, |x, y| {
        [
            0.2 + 0.6 * x as f64 / width as f64,
            0.3,
            0.2 + 0.6 * y as f64 / height as f64,
        ]
    });
    let mut labels = vec![0u16; width * height];
    for id in 1..=n_instances {
        let rw = rng.random_range(width / 4..=width / 2).max(1);
        let rh = rng.random_range(height / 4..=height / 2).max(1);
        let x0 = rng.random_range(0..=width - rw);
        let y0 = rng.random_range(0..=height - rh);
        let colour: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                img.set(x, y, colour);
                labels[y * width + x] = id;
            }
        }
    }
    let labels = InstanceLabelMap::new(width, height, labels).expect("sized buffer");
    (img, labels)
}

/// Stripes, checkers or speckle depending on `kind % 3`.
pub fn texture(seed: u64, side: usize, kind: usize) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    let b: [f64; 3] = [rng.random(), rng.random(), rng.random()];
    let period = rng.random_range(2..6usize);
    RgbImage::from_fn(side, side, |x, y| match kind % 3 {
        0 => if (x / period) % 2 == 0 { a } else { b },
        1 => if (x / period + y / period) % 2 == 0 { a } else { b },
        _ => if rng.random::<f64>() < 0.5 { a } else { b },
    })
}

/// Writes `n_images` scenes with label maps, a `manifest.json`, and a texture
/// bank of `n_categories` categories (two textures each) under `dir`.
/// Returns `(manifest path, texture bank dir)`.
pub fn write_toy_dataset(dir: &Path, n_images: usize, n_categories: usize, seed: u64) -> Result<(PathBuf, PathBuf)> {
    let mut entries = Vec::with_capacity(n_images);
    for i in 0..n_images {
        let (img, labels) = scene(seed.wrapping_add(i as u64), 48, 40, 1 + (i % 3) as u16);
        let image = PathBuf::from(format!("images/scene_{i}.png"));
        let label = PathBuf::from(format!("labels/scene_{i}.png"));
        img.save_png(&dir.join(&image))?;
        maskio::save_label_map(&labels, &dir.join(&label))?;
        entries.push(ManifestEntry { image, labels: label });
    }
    let manifest = dir.join("manifest.json");
    fsutil::write_json_atomic(&manifest, &entries)?;
    let bank = dir.join("textures");
    for c in 0..n_categories {
        for t in 0..2 {
            let tex = texture(seed ^ (c as u64 * 31 + t as u64 + 1), 32, c);
            tex.save_png(&bank.join(format!("category_{c}")).join(format!("t{t}.png")))?;
        }
    }
    Ok((manifest, bank))
}

/// Predictions derived from a GT map: one mask per region, or with
/// `fragments > 1`, each region split into that many horizontal bands.
pub fn predictions_from_gt(gt: &InstanceLabelMap, fragments: usize) -> PredictionSet {
    let (w, h) = gt.extent();
    let mut set = PredictionSet::new(w, h);
    for id in gt.region_ids(false) {
        let region = gt.region_mask(id);
        let rows: Vec<usize> = (0..h).filter(|&y| (0..w).any(|x| region.get(x, y))).collect();
        let bands = fragments.max(1).min(rows.len().max(1));
        for b in 0..bands {
            let lo = rows.get(b * rows.len() / bands).copied().unwrap_or(0);
            let hi = rows.get((b + 1) * rows.len() / bands).copied().unwrap_or(h);
            let mask = BinaryMask::from_fn(w, h, |x, y| region.get(x, y) && y >= lo && y < hi);
            if !mask.is_empty() {
                set.push(&mask, 0.9, Some(0.95));
            }
        }
    }
    set
}
