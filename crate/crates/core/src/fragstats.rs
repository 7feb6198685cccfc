//! Predicted-mask counts grouped by the number of GT segments per image.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::maskio;
use crate::metrics::{EvalPair, PairError};

pub const QUARTILE_METHOD: &str = "linear interpolation between order statistics (type 7)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageFragmentation {
    pub id: String,
    pub n_gt: usize,
    pub n_pred: usize,
    /// `n_pred / n_gt`; absent when the image has no GT segments.
    pub ratio: Option<f64>,
}

impl ImageFragmentation {
    pub fn new(id: impl Into<String>, n_gt: usize, n_pred: usize) -> Self {
        Self {
            id: id.into(),
            n_gt,
            n_pred,
            ratio: (n_gt > 0).then(|| n_pred as f64 / n_gt as f64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Type-7 quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    /// Predicted-mask count of each image in the group, in dataset order.
    pub n_pred: Vec<usize>,
    pub stats: BoxStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentationSummary {
    pub images: Vec<ImageFragmentation>,
    /// Keyed by number of GT segments.
    pub groups: BTreeMap<usize, GroupSummary>,
    pub errors: Vec<PairError>,
}

impl FragmentationSummary {
    pub fn from_images(images: Vec<ImageFragmentation>, errors: Vec<PairError>) -> Self {
        let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for im in &images {
            counts.entry(im.n_gt).or_default().push(im.n_pred);
        }
        let groups = counts
            .into_iter()
            .map(|(g, n_pred)| {
                let vals: Vec<f64> = n_pred.iter().map(|&n| n as f64).collect();
                let stats = BoxStats::from_values(&vals).expect("groups are non-empty");
                (g, GroupSummary { n_pred, stats })
            })
            .collect();
        Self {
            images,
            groups,
            errors,
        }
    }

    /// Box-plot table: `group,min,q1,median,q3,max,n_images`, preceded by a
    /// `#` line naming the quartile method.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut out = format!("# quartiles: {QUARTILE_METHOD}\n").into_bytes();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "min", "q1", "median", "q3", "max", "n_images"])?;
        for (g, s) in &self.groups {
            let b = s.stats;
            w.write_record([
                g.to_string(),
                b.min.to_string(),
                b.q1.to_string(),
                b.median.to_string(),
                b.q3.to_string(),
                b.max.to_string(),
                s.n_pred.len().to_string(),
            ])?;
        }
        out.extend(w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?);
        Ok(out)
    }

    /// Per-image rows: `id,n_gt,n_pred,ratio`.
    pub fn images_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "n_gt", "n_pred", "ratio"])?;
        for im in &self.images {
            w.write_record([
                im.id.clone(),
                im.n_gt.to_string(),
                im.n_pred.to_string(),
                im.ratio.map(|r| r.to_string()).unwrap_or_default(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fsutil::write_atomic(path, &self.to_csv()?)
    }
}

fn count_pair(pair: &EvalPair) -> Result<ImageFragmentation> {
    let preds = maskio::load_predictions(&pair.pred)?;
    let gt = maskio::load_label_map(&pair.gt)?;
    if (preds.width(), preds.height()) != gt.extent() {
        return Err(Error::corrupt(
            &pair.pred,
            format!("prediction extent {:?} does not match GT {}x{}", preds.extent, gt.width(), gt.height()),
        ));
    }
    Ok(ImageFragmentation::new(pair.id(), gt.region_ids(false).len(), preds.masks.len()))
}

pub fn fragmentation(pairs: &[EvalPair]) -> FragmentationSummary {
    let results: Vec<Result<ImageFragmentation>> = pairs.par_iter().map(count_pair).collect();
    let mut images = Vec::new();
    let mut errors = Vec::new();
    for (pair, r) in pairs.iter().zip(results) {
        match r {
            Ok(im) => images.push(im),
            Err(e) => errors.push(PairError {
                pred: PathBuf::from(&pair.pred),
                gt: PathBuf::from(&pair.gt),
                error: e.to_string(),
            }),
        }
    }
    FragmentationSummary::from_images(images, errors)
}
