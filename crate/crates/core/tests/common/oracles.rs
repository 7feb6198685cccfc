//! Brute-force reference implementations, kept independent of the library's
//! metric code paths. Masks are plain row-major `Vec<bool>`, labels `Vec<u16>`.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Pixel-at-a-time plurality assignment; ties go to the smaller id.
pub fn assign_oracle(mask: &[bool], gt: &[u16], include_background: bool) -> Option<u16> {
    let mut best: Option<(u16, usize)> = None;
    let mut ids: Vec<u16> = gt.to_vec();
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        if id == 0 && !include_background {
            continue;
        }
        let n = (0..gt.len()).filter(|&p| mask[p] && gt[p] == id).count();
        if n == 0 {
            continue;
        }
        match best {
            Some((_, b)) if b >= n => {}
            _ => best = Some((id, n)),
        }
    }
    best.map(|(id, _)| id)
}

fn iou_oracle(a: &[bool], b: &[bool]) -> f64 {
    let mut inter = 0;
    let mut union = 0;
    for p in 0..a.len() {
        if a[p] && b[p] {
            inter += 1;
        }
        if a[p] || b[p] {
            union += 1;
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Returns `None` when the GT has no scored region.
pub fn miou_oracle(masks: &[Vec<bool>], gt: &[u16], aggregate: bool, include_background: bool) -> Option<f64> {
    let mut ids: Vec<u16> = gt.iter().copied().filter(|&g| include_background || g != 0).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return None;
    }
    let owners: Vec<Option<u16>> = masks.iter().map(|m| assign_oracle(m, gt, include_background)).collect();
    let mut total = 0.0;
    for &id in &ids {
        let region: Vec<bool> = gt.iter().map(|&g| g == id).collect();
        let mine: Vec<usize> = (0..masks.len()).filter(|&i| owners[i] == Some(id)).collect();
        if mine.is_empty() {
            continue;
        }
        total += if aggregate {
            let union: Vec<bool> = (0..gt.len()).map(|p| mine.iter().any(|&i| masks[i][p])).collect();
            iou_oracle(&union, &region)
        } else {
            mine.iter().map(|&i| iou_oracle(&masks[i], &region)).sum::<f64>() / mine.len() as f64
        };
    }
    Some(total / ids.len() as f64)
}

/// Highest score wins each pixel, earlier mask on ties, 0 if uncovered.
pub fn flatten_oracle(masks: &[Vec<bool>], scores: &[f64], n: usize) -> Vec<u32> {
    (0..n)
        .map(|p| {
            let mut label = 0u32;
            let mut best = f64::NEG_INFINITY;
            for (i, m) in masks.iter().enumerate() {
                if m[p] && scores[i] > best {
                    best = scores[i];
                    label = i as u32 + 1;
                }
            }
            label
        })
        .collect()
}

/// ARI from explicit enumeration of all item pairs.
pub fn ari_pairs_oracle(a: &[u32], b: &[u32]) -> f64 {
    let (mut n11, mut n10, mut n01, mut n00) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => n11 += 1.0,
                (true, false) => n10 += 1.0,
                (false, true) => n01 += 1.0,
                (false, false) => n00 += 1.0,
            }
        }
    }
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0.0 {
        return 1.0;
    }
    2.0 * (n00 * n11 - n01 * n10) / den
}

pub fn ari_oracle(masks: &[Vec<bool>], scores: &[f64], gt: &[u16], include_background: bool) -> f64 {
    let pred = flatten_oracle(masks, scores, gt.len());
    let keep: Vec<usize> = (0..gt.len()).filter(|&p| include_background || gt[p] != 0).collect();
    let a: Vec<u32> = keep.iter().map(|&p| u32::from(gt[p])).collect();
    let b: Vec<u32> = keep.iter().map(|&p| pred[p]).collect();
    ari_pairs_oracle(&a, &b)
}

/// Plain per-cell average of one channel over a `k × k` partition.
pub fn cell_means(pixels: &[[f64; 3]], side: usize, k: usize, channel: usize) -> Vec<f64> {
    let cell = side / k;
    let mut out = Vec::with_capacity(k * k);
    for gy in 0..k {
        for gx in 0..k {
            let mut s = 0.0;
            for y in gy * cell..(gy + 1) * cell {
                for x in gx * cell..(gx + 1) * cell {
                    s += pixels[y * side + x][channel];
                }
            }
            out.push(s / (cell * cell) as f64);
        }
    }
    out
}

/// A random small evaluation problem.
pub struct Case {
    pub w: usize,
    pub h: usize,
    pub gt: Vec<u16>,
    pub masks: Vec<Vec<bool>>,
    pub scores: Vec<f64>,
}

/// Up to 16x16 pixels, 5 regions and 8 masks.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let w = rng.random_range(1..=16);
    let h = rng.random_range(1..=16);
    let n_regions = rng.random_range(1..=5u16);
    // a few random rectangles painted over background keeps regions blobby
    let mut gt = vec![0u16; w * h];
    for id in 1..=n_regions {
        let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
        let (x1, y1) = (rng.random_range(x0..w) + 1, rng.random_range(y0..h) + 1);
        for y in y0..y1 {
            for x in x0..x1 {
                gt[y * w + x] = id;
            }
        }
    }
    let n_masks = rng.random_range(0..=8);
    let masks = (0..n_masks)
        .map(|_| {
            let p = rng.random::<f64>();
            (0..w * h).map(|_| rng.random::<f64>() < p).collect()
        })
        .collect();
    // coarse scores so score ties actually occur
    let scores = (0..n_masks).map(|_| f64::from(rng.random_range(0..4u8)) / 4.0).collect();
    Case { w, h, gt, masks, scores }
}
