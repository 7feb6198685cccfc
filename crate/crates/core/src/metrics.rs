//! Texture-aware segmentation metrics.
//!
//! Predicted masks are assigned to the ground-truth region holding the
//! plurality of their pixels. Aggregated mIoU unions all masks assigned to a
//! region before scoring it; non-aggregated mIoU averages the per-mask IoUs,
//! which penalises over-segmentation. ARI compares the pixel partitions.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::maskio::{self, BinaryMask, InstanceLabelMap};

fn check_extent(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!(
            "extent mismatch: {}x{} vs {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}

/// `|a ∩ b| / |a ∪ b|`, or 0 when both masks are empty.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    check_extent(a.extent(), b.extent())?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        inter += usize::from(x && y);
        union += usize::from(x || y);
    }
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignOptions {
    /// Treat GT id 0 as an assignable region.
    pub include_background: bool,
    /// Minimum share of a mask's pixels that must fall in the winning region.
    pub min_overlap_frac: f64,
}

impl Default for AssignOptions {
    fn default() -> Self {
        Self {
            include_background: false,
            min_overlap_frac: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentTable {
    pub pred_to_gt: Vec<Option<u16>>,
    /// Every scored GT region, including those with no assigned mask.
    pub gt_to_preds: BTreeMap<u16, Vec<usize>>,
}

pub fn assign(masks: &[BinaryMask], gt: &InstanceLabelMap, opts: AssignOptions) -> Result<AssignmentTable> {
    let mut gt_to_preds: BTreeMap<u16, Vec<usize>> = gt
        .region_ids(opts.include_background)
        .into_iter()
        .map(|id| (id, Vec::new()))
        .collect();
    let mut pred_to_gt = Vec::with_capacity(masks.len());
    for (i, m) in masks.iter().enumerate() {
        check_extent(m.extent(), gt.extent())?;
        let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
        let mut area = 0usize;
        for (&inside, &label) in m.as_slice().iter().zip(gt.labels()) {
            if inside {
                area += 1;
                if label != 0 || opts.include_background {
                    *counts.entry(label).or_default() += 1;
                }
            }
        }
        // BTreeMap iterates ascending, so strict `>` keeps the smaller id on ties.
        let mut best: Option<(u16, usize)> = None;
        for (&id, &n) in &counts {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((id, n));
            }
        }
        let winner = best
            .filter(|&(_, n)| n > 0 && n as f64 >= opts.min_overlap_frac * area as f64)
            .map(|(id, _)| id);
        if let Some(id) = winner {
            gt_to_preds.get_mut(&id).expect("assigned id is a GT region").push(i);
        }
        pred_to_gt.push(winner);
    }
    Ok(AssignmentTable {
        pred_to_gt,
        gt_to_preds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionScore {
    pub id: u16,
    pub assigned: Vec<usize>,
    pub iou_aggregated: f64,
    pub iou_nonaggregated: f64,
}

/// Per-region aggregated and non-aggregated IoU.
pub fn region_scores(masks: &[BinaryMask], gt: &InstanceLabelMap, opts: AssignOptions) -> Result<Vec<RegionScore>> {
    let table = assign(masks, gt, opts)?;
    let (w, h) = gt.extent();
    let mut out = Vec::with_capacity(table.gt_to_preds.len());
    for (&id, assigned) in &table.gt_to_preds {
        let region = gt.region_mask(id);
        let (agg, nonagg) = if assigned.is_empty() {
            (0.0, 0.0)
        } else {
            let mut union = BinaryMask::empty(w, h);
            let mut sum = 0.0;
            for &i in assigned {
                union.union_with(&masks[i]);
                sum += iou(&masks[i], &region)?;
            }
            (iou(&union, &region)?, sum / assigned.len() as f64)
        };
        out.push(RegionScore {
            id,
            assigned: assigned.clone(),
            iou_aggregated: agg,
            iou_nonaggregated: nonagg,
        });
    }
    Ok(out)
}

/// Mean IoU over GT regions; regions without an assigned mask score 0.
pub fn miou(masks: &[BinaryMask], gt: &InstanceLabelMap, aggregate: bool, opts: AssignOptions) -> Result<f64> {
    let scores = region_scores(masks, gt, opts)?;
    mean_region_iou(&scores, aggregate)
}

fn mean_region_iou(scores: &[RegionScore], aggregate: bool) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::UndefinedMetric("ground truth has no regions".into()));
    }
    let total: f64 = scores
        .iter()
        .map(|s| if aggregate { s.iou_aggregated } else { s.iou_nonaggregated })
        .sum();
    Ok(total / scores.len() as f64)
}

/// Per-pixel labelling from possibly-overlapping masks: each pixel takes
/// `index + 1` of the highest-scoring covering mask (earlier index wins
/// ties), 0 where uncovered.
pub fn flatten_predictions(masks: &[BinaryMask], scores: &[f64], extent: (usize, usize)) -> Result<Vec<u32>> {
    if masks.len() != scores.len() {
        return Err(Error::InvalidInput(format!(
            "{} masks but {} scores",
            masks.len(),
            scores.len()
        )));
    }
    let n = extent.0 * extent.1;
    let mut label = vec![0u32; n];
    let mut best = vec![f64::NEG_INFINITY; n];
    for (i, (m, &s)) in masks.iter().zip(scores).enumerate() {
        check_extent(m.extent(), extent)?;
        for (p, &inside) in m.as_slice().iter().enumerate() {
            if inside && s > best[p] {
                best[p] = s;
                label[p] = i as u32 + 1;
            }
        }
    }
    Ok(label)
}

fn choose2(n: u64) -> u128 {
    let n = u128::from(n);
    n * n.saturating_sub(1) / 2
}

/// Adjusted Rand index between two labellings of the same items, from the
/// contingency table. Identical partitions score 1, including the
/// degenerate cases where the chance-corrected denominator vanishes.
pub fn adjusted_rand_index<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Eq + std::hash::Hash,
    B: Copy + Eq + std::hash::Hash,
{
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "labellings differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut table: HashMap<(A, B), u64> = HashMap::new();
    let mut rows: HashMap<A, u64> = HashMap::new();
    let mut cols: HashMap<B, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: u128 = table.values().map(|&c| choose2(c)).sum();
    let sum_a: u128 = rows.values().map(|&c| choose2(c)).sum();
    let sum_b: u128 = cols.values().map(|&c| choose2(c)).sum();
    let pairs = choose2(a.len() as u64);
    if pairs == 0 {
        return Ok(1.0);
    }
    // Both terms scaled by 2·C(n,2) so the ratio is formed from exact integers.
    let exact = || -> Option<(i128, i128)> {
        let (index, sum_a, sum_b, pairs) = (
            i128::try_from(index).ok()?,
            i128::try_from(sum_a).ok()?,
            i128::try_from(sum_b).ok()?,
            i128::try_from(pairs).ok()?,
        );
        let expected = sum_a.checked_mul(sum_b)?.checked_mul(2)?;
        let num = index.checked_mul(pairs)?.checked_mul(2)?.checked_sub(expected)?;
        let den = sum_a.checked_add(sum_b)?.checked_mul(pairs)?.checked_sub(expected)?;
        Some((num, den))
    };
    let (num, den) = match exact() {
        Some((num, den)) => (num as f64, den as f64),
        None => {
            let expected = sum_a as f64 * sum_b as f64 / pairs as f64;
            (index as f64 - expected, 0.5 * (sum_a + sum_b) as f64 - expected)
        }
    };
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(num / den)
}

/// ARI between the flattened prediction labelling and the GT labels.
pub fn ari(masks: &[BinaryMask], scores: &[f64], gt: &InstanceLabelMap, include_background: bool) -> Result<f64> {
    let pred = flatten_predictions(masks, scores, gt.extent())?;
    if include_background {
        adjusted_rand_index(gt.labels(), &pred)
    } else {
        let (g, p): (Vec<u16>, Vec<u32>) = gt
            .labels()
            .iter()
            .zip(&pred)
            .filter(|(&g, _)| g != 0)
            .map(|(&g, &p)| (g, p))
            .unzip();
        adjusted_rand_index(&g, &p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregateMode {
    #[default]
    Both,
    Aggregated,
    NonAggregated,
}

impl AggregateMode {
    fn aggregated(self) -> bool {
        matches!(self, AggregateMode::Both | AggregateMode::Aggregated)
    }

    fn nonaggregated(self) -> bool {
        matches!(self, AggregateMode::Both | AggregateMode::NonAggregated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub aggregate: AggregateMode,
    pub include_background_miou: bool,
    pub include_background_ari: bool,
    pub min_overlap_frac: f64,
    pub assignment_rule: String,
    pub ari_flattening_rule: String,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            aggregate: AggregateMode::Both,
            include_background_miou: false,
            include_background_ari: true,
            min_overlap_frac: 0.0,
            assignment_rule: "plurality overlap, ties to smaller GT id, zero-overlap masks unassigned".into(),
            ari_flattening_rule: "highest score wins, ties to earlier mask, uncovered pixels labelled 0".into(),
        }
    }
}

impl EvalConfig {
    pub fn assign_options(&self) -> AssignOptions {
        AssignOptions {
            include_background: self.include_background_miou,
            min_overlap_frac: self.min_overlap_frac,
        }
    }
}

/// One prediction file paired with its ground truth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPair {
    pub pred: PathBuf,
    pub gt: PathBuf,
}

impl EvalPair {
    pub fn id(&self) -> String {
        self.pred
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

/// Reads a pairs file (`[{"pred": ..., "gt": ...}]`) and resolves each
/// entry against the prediction and GT directories.
pub fn load_pairs(path: &Path, pred_dir: &Path, gt_dir: &Path) -> Result<Vec<EvalPair>> {
    let text = fsutil::read_to_string(path)?;
    let raw: Vec<EvalPair> = serde_json::from_str(&text).map_err(|e| Error::corrupt(path, e.to_string()))?;
    Ok(raw
        .into_iter()
        .map(|p| EvalPair {
            pred: pred_dir.join(p.pred),
            gt: gt_dir.join(p.gt),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageMetrics {
    pub id: String,
    pub pred: PathBuf,
    pub gt: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub miou_nonagg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub miou_agg: Option<f64>,
    pub ari: f64,
    pub n_pred_masks: usize,
    pub n_gt_regions: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeans {
    pub n_images: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub miou_nonagg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub miou_agg: Option<f64>,
    pub ari: Option<f64>,
    pub n_pred_masks: Option<f64>,
    pub n_gt_regions: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairError {
    pub pred: PathBuf,
    pub gt: PathBuf,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub config: EvalConfig,
    pub images: Vec<ImageMetrics>,
    pub means: DatasetMeans,
    pub errors: Vec<PairError>,
    pub notes: Vec<String>,
}

/// Loaded and decoded inputs for one image.
pub struct LoadedPair {
    pub masks: Vec<BinaryMask>,
    pub scores: Vec<f64>,
    pub gt: InstanceLabelMap,
}

pub fn load_pair(pair: &EvalPair) -> Result<LoadedPair> {
    let preds = maskio::load_predictions(&pair.pred)?;
    let gt = maskio::load_label_map(&pair.gt)?;
    if (preds.width(), preds.height()) != gt.extent() {
        return Err(Error::corrupt(
            &pair.pred,
            format!(
                "prediction extent {:?} does not match GT {}x{}",
                preds.extent,
                gt.width(),
                gt.height()
            ),
        ));
    }
    Ok(LoadedPair {
        masks: preds.decode_masks()?,
        scores: preds.scores(),
        gt,
    })
}

pub fn evaluate_image(id: String, pair: &EvalPair, loaded: &LoadedPair, cfg: &EvalConfig) -> Result<ImageMetrics> {
    let scores = region_scores(&loaded.masks, &loaded.gt, cfg.assign_options())?;
    let miou_agg = cfg
        .aggregate
        .aggregated()
        .then(|| mean_region_iou(&scores, true))
        .transpose()?;
    let miou_nonagg = cfg
        .aggregate
        .nonaggregated()
        .then(|| mean_region_iou(&scores, false))
        .transpose()?;
    Ok(ImageMetrics {
        id,
        pred: pair.pred.clone(),
        gt: pair.gt.clone(),
        miou_nonagg,
        miou_agg,
        ari: ari(&loaded.masks, &loaded.scores, &loaded.gt, cfg.include_background_ari)?,
        n_pred_masks: loaded.masks.len(),
        n_gt_regions: loaded.gt.region_ids(false).len(),
    })
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v?;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Scores every pair in parallel; failed pairs are reported and left out of
/// the unweighted per-image means.
pub fn evaluate_dataset(pairs: &[EvalPair], cfg: &EvalConfig) -> MetricsReport {
    let results: Vec<Result<ImageMetrics>> = pairs
        .par_iter()
        .map(|pair| {
            let loaded = load_pair(pair)?;
            evaluate_image(pair.id(), pair, &loaded, cfg)
        })
        .collect();
    let mut images = Vec::new();
    let mut errors = Vec::new();
    for (pair, r) in pairs.iter().zip(results) {
        match r {
            Ok(m) => images.push(m),
            Err(e) => errors.push(PairError {
                pred: pair.pred.clone(),
                gt: pair.gt.clone(),
                error: e.to_string(),
            }),
        }
    }
    let means = DatasetMeans {
        n_images: images.len(),
        miou_nonagg: mean_of(images.iter().map(|m| m.miou_nonagg)),
        miou_agg: mean_of(images.iter().map(|m| m.miou_agg)),
        ari: mean_of(images.iter().map(|m| Some(m.ari))),
        n_pred_masks: mean_of(images.iter().map(|m| Some(m.n_pred_masks as f64))),
        n_gt_regions: mean_of(images.iter().map(|m| Some(m.n_gt_regions as f64))),
    };
    MetricsReport {
        config: cfg.clone(),
        images,
        means,
        errors,
        notes: vec![
            "scored strictly against the provided GT regions; texture changes absent from GT count against predictions".into(),
        ],
    }
}

impl MetricsReport {
    /// One row per successfully scored image.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "miou_nonagg", "miou_agg", "ari", "n_pred_masks", "n_gt_regions"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for m in &self.images {
            w.write_record([
                m.id.clone(),
                opt(m.miou_nonagg),
                opt(m.miou_agg),
                m.ari.to_string(),
                m.n_pred_masks.to_string(),
                m.n_gt_regions.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        fsutil::write_atomic(path, &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halves() -> InstanceLabelMap {
        InstanceLabelMap::from_fn(4, 4, |x, _| if x < 2 { 1 } else { 2 })
    }

    fn fragment_preds() -> Vec<BinaryMask> {
        vec![
            BinaryMask::from_fn(4, 4, |x, _| x < 2),
            BinaryMask::from_fn(4, 4, |x, y| x >= 2 && y < 2),
            BinaryMask::from_fn(4, 4, |x, y| x >= 2 && y >= 2),
        ]
    }

    #[test]
    fn iou_examples() {
        let a = BinaryMask::from_fn(4, 4, |x, y| x < 2 && y < 2);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        let b = BinaryMask::from_fn(4, 4, |x, y| x >= 2 && y >= 2);
        assert_eq!(iou(&a, &b).unwrap(), 0.0);
        let c = BinaryMask::from_fn(4, 4, |x, y| (1..3).contains(&x) && y < 2);
        assert_eq!(iou(&a, &c).unwrap(), 2.0 / 6.0);
        let e = BinaryMask::empty(4, 4);
        assert_eq!(iou(&e, &e).unwrap(), 0.0);
        assert!(matches!(iou(&a, &BinaryMask::empty(3, 4)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn assign_examples() {
        let gt = halves();
        let exact = vec![gt.region_mask(1), gt.region_mask(2)];
        let t = assign(&exact, &gt, AssignOptions::default()).unwrap();
        assert_eq!(t.pred_to_gt, vec![Some(1), Some(2)]);

        // top three rows: 6 pixels in each region, tie goes to id 1
        let six_six = BinaryMask::from_fn(4, 4, |_, y| y < 3);
        let t = assign(&[six_six], &gt, AssignOptions::default()).unwrap();
        assert_eq!(t.pred_to_gt, vec![Some(1)]);
        assert_eq!(t.gt_to_preds[&1], vec![0]);
        assert!(t.gt_to_preds[&2].is_empty());

        let bg = InstanceLabelMap::from_fn(4, 4, |x, _| if x < 2 { 0 } else { 2 });
        let on_bg = BinaryMask::from_fn(4, 4, |x, _| x < 2);
        let t = assign(std::slice::from_ref(&on_bg), &bg, AssignOptions::default()).unwrap();
        assert_eq!(t.pred_to_gt, vec![None]);
        assert_eq!(t.gt_to_preds.keys().copied().collect::<Vec<_>>(), vec![2]);
        let with_bg = AssignOptions { include_background: true, ..Default::default() };
        assert_eq!(assign(&[on_bg], &bg, with_bg).unwrap().pred_to_gt, vec![Some(0)]);
    }

    #[test]
    fn min_overlap_frac_filters_weak_masks() {
        let gt = halves();
        // 3 pixels in region 1, 1 pixel in region 2
        let m = BinaryMask::from_fn(4, 4, |_, y| y == 0);
        let loose = assign(std::slice::from_ref(&m), &gt, AssignOptions::default()).unwrap();
        assert_eq!(loose.pred_to_gt, vec![Some(1)]);
        let strict = AssignOptions { min_overlap_frac: 0.75, ..Default::default() };
        assert_eq!(assign(std::slice::from_ref(&m), &gt, strict).unwrap().pred_to_gt, vec![None]);
        let exact = AssignOptions { min_overlap_frac: 0.5, ..Default::default() };
        assert_eq!(assign(&[m], &gt, exact).unwrap().pred_to_gt, vec![Some(1)]);
    }

    #[test]
    fn fragmentation_fixture() {
        let gt = halves();
        let preds = fragment_preds();
        let opts = AssignOptions::default();
        assert_eq!(miou(&preds, &gt, true, opts).unwrap(), 1.0);
        assert_eq!(miou(&preds, &gt, false, opts).unwrap(), 0.75);
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let gt = halves();
        let perfect = vec![gt.region_mask(1), gt.region_mask(2)];
        let opts = AssignOptions::default();
        assert_eq!(miou(&perfect, &gt, true, opts).unwrap(), 1.0);
        assert_eq!(miou(&perfect, &gt, false, opts).unwrap(), 1.0);
        assert_eq!(miou(&[], &gt, true, opts).unwrap(), 0.0);
        assert_eq!(miou(&[], &gt, false, opts).unwrap(), 0.0);
        let blank = InstanceLabelMap::from_fn(4, 4, |_, _| 0);
        assert!(matches!(miou(&perfect, &blank, true, opts), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn flatten_prefers_score_then_order() {
        let a = BinaryMask::from_fn(2, 1, |_, _| true);
        let b = BinaryMask::from_fn(2, 1, |x, _| x == 1);
        assert_eq!(flatten_predictions(&[a.clone(), b.clone()], &[0.5, 0.9], (2, 1)).unwrap(), vec![1, 2]);
        assert_eq!(flatten_predictions(&[a.clone(), b.clone()], &[0.5, 0.5], (2, 1)).unwrap(), vec![1, 1]);
        assert_eq!(flatten_predictions(&[b], &[0.1], (2, 1)).unwrap(), vec![0, 1]);
        assert!(flatten_predictions(&[a], &[], (2, 1)).is_err());
    }

    #[test]
    fn ari_examples() {
        let gt = halves();
        let perfect = vec![gt.region_mask(1), gt.region_mask(2)];
        assert_eq!(ari(&perfect, &[1.0, 1.0], &gt, true).unwrap(), 1.0);
        let single = vec![BinaryMask::from_fn(4, 4, |_, _| true)];
        assert_eq!(ari(&single, &[1.0], &gt, true).unwrap(), 0.0);
        // both single-cluster: identical partitions
        let one = InstanceLabelMap::from_fn(4, 4, |_, _| 3);
        assert_eq!(ari(&single, &[1.0], &one, true).unwrap(), 1.0);
        assert!(ari(&single, &[1.0], &InstanceLabelMap::from_fn(2, 2, |_, _| 1), true).is_err());
    }

    #[test]
    fn ari_degenerate_sizes() {
        assert_eq!(adjusted_rand_index::<u8, u8>(&[], &[]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[1u8], &[2u8]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[1u8, 2, 3], &[4u8, 5, 6]).unwrap(), 1.0);
        assert!(adjusted_rand_index(&[1u8], &[1u8, 2]).is_err());
    }

    #[test]
    fn ari_symmetric_and_label_invariant() {
        let a = [0u8, 0, 1, 1, 2, 2, 2, 0];
        let b = [5u8, 5, 5, 6, 6, 7, 7, 7];
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-15);
        let relabel: Vec<u8> = a.iter().map(|&v| [9, 4, 1][v as usize]).collect();
        assert_eq!(adjusted_rand_index(&relabel, &b).unwrap(), ab);
    }
}
