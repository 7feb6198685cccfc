//! Ground-truth label maps and predicted mask sets.
//!
//! Predicted masks use a row-major run-length encoding: runs alternate
//! background and foreground over the mask flattened row by row, starting
//! with the (possibly zero) count of leading background pixels.
//! COCO uses column-major order; the two are not interchangeable.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::raster;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "mask buffer has {} entries, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn extent(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn union_with(&mut self, other: &BinaryMask) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLength {
    /// `[height, width]`.
    pub size: [usize; 2],
    pub runs: Vec<u64>,
}

pub fn rle_encode(mask: &BinaryMask) -> RunLength {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u64;
    for &b in &mask.data {
        if b != current {
            runs.push(len);
            current = b;
            len = 0;
        }
        len += 1;
    }
    runs.push(len);
    RunLength {
        size: [mask.height, mask.width],
        runs,
    }
}

/// Why a run-length is not canonical, if it is not.
fn rle_defect(rle: &RunLength) -> Option<String> {
    let [h, w] = rle.size;
    let total: u128 = rle.runs.iter().map(|&r| u128::from(r)).sum();
    if total != (h as u128) * (w as u128) {
        return Some(format!("runs sum to {total}, expected {h}x{w}"));
    }
    if rle.runs.is_empty() {
        return Some("no runs".into());
    }
    if h * w > 0 {
        if let Some(i) = rle.runs.iter().skip(1).position(|&r| r == 0) {
            return Some(format!("zero-length run at index {}", i + 1));
        }
    }
    None
}

pub fn rle_decode(rle: &RunLength) -> Result<BinaryMask> {
    if let Some(reason) = rle_defect(rle) {
        return Err(Error::corrupt("<rle>", reason));
    }
    let [h, w] = rle.size;
    let mut data = Vec::with_capacity(h * w);
    let mut value = false;
    for &r in &rle.runs {
        data.extend(std::iter::repeat_n(value, r as usize));
        value = !value;
    }
    BinaryMask::new(w, h, data)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceLabelMap {
    width: usize,
    height: usize,
    labels: Vec<u16>,
}

impl InstanceLabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u16>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "label buffer has {} entries, expected {}x{}",
                labels.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u16) -> Self {
        let mut labels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                labels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn extent(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.labels[y * self.width + x]
    }

    /// Distinct ids present, ascending; background (0) only if requested.
    pub fn region_ids(&self, include_background: bool) -> Vec<u16> {
        let set: BTreeSet<u16> = self.labels.iter().copied().collect();
        set.into_iter()
            .filter(|&id| include_background || id != 0)
            .collect()
    }

    pub fn region_mask(&self, id: u16) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.labels.iter().map(|&l| l == id).collect(),
        }
    }

    pub fn resize_nearest(&self, width: usize, height: usize) -> Result<Self> {
        if self.width == 0 || self.height == 0 || width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "cannot resize {}x{} label map to {width}x{height}",
                self.width, self.height
            )));
        }
        Ok(Self {
            width,
            height,
            labels: raster::resize_nearest(&self.labels, self.width, self.height, width, height),
        })
    }
}

/// Reads a single-channel 8- or 16-bit PNG label map.
pub fn load_label_map(path: &Path) -> Result<InstanceLabelMap> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
        .map_err(|e| Error::corrupt(path, format!("not a readable PNG: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels = match img {
        image::DynamicImage::ImageLuma16(buf) => buf.into_raw(),
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u16::from).collect(),
        other => {
            return Err(Error::corrupt(
                path,
                format!("label map must be single-channel, got {:?}", other.color()),
            ))
        }
    };
    InstanceLabelMap::new(w, h, labels)
}

/// Writes a single-channel 16-bit PNG.
pub fn save_label_map(map: &InstanceLabelMap, path: &Path) -> Result<()> {
    let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
        image::ImageBuffer::from_raw(map.width as u32, map.height as u32, map.labels.clone())
            .ok_or_else(|| Error::InvalidInput("label buffer size mismatch".into()))?;
    let mut bytes = Vec::new();
    buf.write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
    fsutil::write_atomic(path, &bytes)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_side: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_score_thresh: Option<f64>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedMask {
    pub rle: RunLength,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<f64>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    /// `[width, height]`.
    pub extent: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_params: Option<GeneratorParams>,
    pub masks: Vec<PredictedMask>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl PredictionSet {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            extent: [width, height],
            generator_params: None,
            masks: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn push(&mut self, mask: &BinaryMask, score: f64, stability: Option<f64>) {
        self.masks.push(PredictedMask {
            rle: rle_encode(mask),
            score,
            stability,
            extra: Map::new(),
        });
    }

    pub fn width(&self) -> usize {
        self.extent[0]
    }

    pub fn height(&self) -> usize {
        self.extent[1]
    }

    fn check(&self) -> std::result::Result<(), String> {
        let [w, h] = self.extent;
        for (i, m) in self.masks.iter().enumerate() {
            if m.rle.size != [h, w] {
                return Err(format!(
                    "mask {i} has size {:?}, header extent is [{w}, {h}] (size must be [{h}, {w}])",
                    m.rle.size
                ));
            }
            if let Some(reason) = rle_defect(&m.rle) {
                return Err(format!("mask {i}: {reason}"));
            }
            if !(0.0..=1.0).contains(&m.score) {
                return Err(format!("mask {i}: score {} outside [0, 1]", m.score));
            }
            if let Some(s) = m.stability {
                if !(0.0..=1.0).contains(&s) {
                    return Err(format!("mask {i}: stability {s} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Decodes every mask in emission order.
    pub fn decode_masks(&self) -> Result<Vec<BinaryMask>> {
        self.masks.iter().map(|m| rle_decode(&m.rle)).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.masks.iter().map(|m| m.score).collect()
    }
}

pub fn parse_predictions(text: &str, path: &Path) -> Result<PredictionSet> {
    let set: PredictionSet =
        serde_json::from_str(text).map_err(|e| Error::corrupt(path, e.to_string()))?;
    set.check().map_err(|reason| Error::corrupt(path, reason))?;
    Ok(set)
}

pub fn load_predictions(path: &Path) -> Result<PredictionSet> {
    parse_predictions(&fsutil::read_to_string(path)?, path)
}

pub fn save_predictions(set: &PredictionSet, path: &Path) -> Result<()> {
    set.check().map_err(Error::InvalidInput)?;
    fsutil::write_json_atomic(path, set)
}
