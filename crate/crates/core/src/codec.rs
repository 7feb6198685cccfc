//! Analytic Gaussian texture codec.
//!
//! An image is cut into overlapping square patches. Each patch is summarised
//! by a `grid_k × grid_k` lattice of isotropic Gaussians carrying the local
//! Gaussian-weighted colour mean and standard deviation. Patch compositions
//! are merged onto the canvas with a Hann-window amplitude taper and decoded
//! by normalised splatting plus seeded per-pixel detail noise.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Rgb, RgbImage};

/// Mean RGB followed by per-channel standard deviation.
pub const FEATURE_DIM: usize = 6;
pub const DEFAULT_GRID_K: usize = 4;
pub const MIN_PATCH_SIZE: usize = 4;
/// Lower bound on the merge window so corner splats keep some weight.
pub const WINDOW_FLOOR: f64 = 0.05;
/// Kernels are cut off beyond this Mahalanobis radius.
pub const KERNEL_RADIUS: f64 = 3.0;
const MAX_STD: f64 = 0.5;
const MIN_WEIGHT_SUM: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSplat {
    /// Center `(x, y)` in pixel units of the owning canvas.
    pub mu: [f64; 2],
    /// Symmetric positive-definite covariance, pixels².
    pub sigma: [[f64; 2]; 2],
    pub feature: Vec<f64>,
    pub amplitude: f64,
}

impl GaussianSplat {
    pub fn mean_rgb(&self) -> Rgb {
        [self.feature[0], self.feature[1], self.feature[2]]
    }

    pub fn std_rgb(&self) -> Rgb {
        [self.feature[3], self.feature[4], self.feature[5]]
    }

    fn inverse_sigma(&self) -> [[f64; 2]; 2] {
        let [[a, b], [_, d]] = self.sigma;
        let det = a * d - b * b;
        [[d / det, -b / det], [-b / det, a / det]]
    }

    fn is_spd(&self) -> bool {
        let [[a, b], [c, d]] = self.sigma;
        b == c && a > 0.0 && a * d - b * b > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianComposition {
    pub splats: Vec<GaussianSplat>,
    /// `(width, height)` in pixels.
    pub canvas: (usize, usize),
}

impl GaussianComposition {
    pub fn len(&self) -> usize {
        self.splats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splats.is_empty()
    }

    /// Checks SPD covariances, feature ranges, amplitudes and center bounds.
    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.canvas;
        for (i, s) in self.splats.iter().enumerate() {
            if !s.is_spd() {
                return Err(Error::InvalidInput(format!("splat {i}: covariance not SPD")));
            }
            if s.feature.len() != FEATURE_DIM {
                return Err(Error::InvalidInput(format!(
                    "splat {i}: feature has {} components, expected {FEATURE_DIM}",
                    s.feature.len()
                )));
            }
            let means_ok = s.feature[..3].iter().all(|v| (0.0..=1.0).contains(v));
            let stds_ok = s.feature[3..].iter().all(|v| (0.0..=MAX_STD).contains(v));
            if !means_ok || !stds_ok {
                return Err(Error::InvalidInput(format!("splat {i}: feature out of range")));
            }
            if s.amplitude.is_nan() || s.amplitude < 0.0 {
                return Err(Error::InvalidInput(format!("splat {i}: negative or NaN amplitude")));
            }
            let [x, y] = s.mu;
            if !(0.0..w as f64).contains(&x) || !(0.0..h as f64).contains(&y) {
                return Err(Error::InvalidGeometry(format!(
                    "splat {i}: center ({x}, {y}) outside {w}x{h} canvas"
                )));
            }
        }
        Ok(())
    }
}

/// Top-left corners of overlapping `patch_size` patches along both axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub stride: usize,
    pub positions_x: Vec<usize>,
    pub positions_y: Vec<usize>,
}

impl PatchGrid {
    pub fn for_canvas(width: usize, height: usize, patch_size: usize) -> Result<Self> {
        Ok(Self {
            patch_size,
            stride: stride_for(patch_size),
            positions_x: plan_axis(width, patch_size)?,
            positions_y: plan_axis(height, patch_size)?,
        })
    }

    pub fn patch_count(&self) -> usize {
        self.positions_x.len() * self.positions_y.len()
    }

    /// Patch origins in row-major order (y outer, x inner).
    pub fn origins(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.positions_y
            .iter()
            .flat_map(move |&y| self.positions_x.iter().map(move |&x| (x, y)))
    }
}

pub fn stride_for(patch_size: usize) -> usize {
    3 * patch_size / 4
}

/// Positions `0, s, 2s, …` with `s = ⌊3l/4⌋`, plus `extent − l` when the
/// progression does not land on it.
pub fn plan_axis(extent: usize, patch_size: usize) -> Result<Vec<usize>> {
    if patch_size < MIN_PATCH_SIZE {
        return Err(Error::InvalidGeometry(format!(
            "patch size {patch_size} is below the minimum of {MIN_PATCH_SIZE}"
        )));
    }
    if extent < patch_size {
        return Err(Error::InvalidGeometry(format!(
            "canvas extent {extent} is smaller than patch size {patch_size}"
        )));
    }
    let last = extent - patch_size;
    let mut positions: Vec<usize> = (0..=last).step_by(stride_for(patch_size)).collect();
    if positions.last() != Some(&last) {
        positions.push(last);
    }
    Ok(positions)
}

/// Plans a square canvas of side `canvas_extent`.
pub fn plan_patches(canvas_extent: usize, patch_size: usize) -> Result<PatchGrid> {
    PatchGrid::for_canvas(canvas_extent, canvas_extent, patch_size)
}

/// Encodes a square patch as `grid_k²` splats in patch-local coordinates.
pub fn encode_patch(patch: &RgbImage, grid_k: usize) -> Result<GaussianComposition> {
    let l = patch.width();
    if l == 0 || patch.height() != l {
        return Err(Error::InvalidInput(format!(
            "patch must be square and non-empty, got {}x{}",
            patch.width(),
            patch.height()
        )));
    }
    if grid_k == 0 || grid_k > l {
        return Err(Error::InvalidInput(format!(
            "grid_k must be in 1..={l} for a {l}-pixel patch, got {grid_k}"
        )));
    }
    let cell = l as f64 / grid_k as f64;
    let sd = cell / 2.0;
    let var = sd * sd;
    // Separable kernel, truncated symmetrically about each center so the
    // patch border does not skew the weighted statistics.
    let axis_weights: Vec<Vec<f64>> = (0..grid_k)
        .map(|g| {
            let c = (g as f64 + 0.5) * cell;
            let radius = (KERNEL_RADIUS * sd).min(c).min(l as f64 - c);
            (0..l)
                .map(|p| {
                    let d = p as f64 + 0.5 - c;
                    if d.abs() <= radius {
                        (-0.5 * d * d / var).exp()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    // Deviations are taken from the first pixel so constant patches encode exactly.
    let reference = patch.get(0, 0);

    let mut splats = Vec::with_capacity(grid_k * grid_k);
    for gy in 0..grid_k {
        for gx in 0..grid_k {
            let (wx, wy) = (&axis_weights[gx], &axis_weights[gy]);
            let mut wsum = 0.0;
            let mut acc = [0.0; 3];
            for (y, &wyv) in wy.iter().enumerate() {
                for (x, &wxv) in wx.iter().enumerate() {
                    let w = wxv * wyv;
                    let p = patch.get(x, y);
                    wsum += w;
                    for c in 0..3 {
                        acc[c] += w * (p[c] - reference[c]);
                    }
                }
            }
            let mean: Rgb = std::array::from_fn(|c| (reference[c] + acc[c] / wsum).clamp(0.0, 1.0));
            let mut sq = [0.0; 3];
            for (y, &wyv) in wy.iter().enumerate() {
                for (x, &wxv) in wx.iter().enumerate() {
                    let w = wxv * wyv;
                    let p = patch.get(x, y);
                    for c in 0..3 {
                        let d = p[c] - mean[c];
                        sq[c] += w * d * d;
                    }
                }
            }
            let std = sq.map(|s| (s / wsum).sqrt().min(MAX_STD));
            splats.push(GaussianSplat {
                mu: [(gx as f64 + 0.5) * cell, (gy as f64 + 0.5) * cell],
                sigma: [[var, 0.0], [0.0, var]],
                feature: vec![mean[0], mean[1], mean[2], std[0], std[1], std[2]],
                amplitude: 1.0,
            });
        }
    }
    Ok(GaussianComposition {
        splats,
        canvas: (l, l),
    })
}

/// Separable Hann taper over a patch of side `l`, floored at [`WINDOW_FLOOR`].
pub fn hann_window(local: [f64; 2], l: usize) -> f64 {
    let h = |u: f64| (std::f64::consts::PI * u / l as f64).sin().powi(2);
    (h(local[0]) * h(local[1])).max(WINDOW_FLOOR)
}

/// Places patch-local compositions onto the canvas, tapering amplitudes by
/// the Hann window of each splat's position within its patch. Every splat is
/// kept; output order follows the input order.
pub fn merge(
    patches: &[((usize, usize), GaussianComposition)],
    canvas: (usize, usize),
) -> Result<GaussianComposition> {
    let total = patches.iter().map(|(_, c)| c.len()).sum();
    let mut splats = Vec::with_capacity(total);
    for &((px, py), ref comp) in patches {
        let (pw, ph) = comp.canvas;
        if pw != ph {
            return Err(Error::InvalidInput(format!(
                "patch composition must be square, got {pw}x{ph}"
            )));
        }
        if px + pw > canvas.0 || py + ph > canvas.1 {
            return Err(Error::InvalidGeometry(format!(
                "patch at ({px}, {py}) of size {pw} exceeds {}x{} canvas",
                canvas.0, canvas.1
            )));
        }
        for s in &comp.splats {
            splats.push(GaussianSplat {
                mu: [s.mu[0] + px as f64, s.mu[1] + py as f64],
                sigma: s.sigma,
                feature: s.feature.clone(),
                amplitude: s.amplitude * hann_window(s.mu, pw),
            });
        }
    }
    Ok(GaussianComposition { splats, canvas })
}

/// Plans patches over the whole image, encodes each one, and merges them.
pub fn encode_image(image: &RgbImage, patch_size: usize, grid_k: usize) -> Result<GaussianComposition> {
    let grid = PatchGrid::for_canvas(image.width(), image.height(), patch_size)?;
    let origins: Vec<(usize, usize)> = grid.origins().collect();
    let patches = origins
        .par_iter()
        .map(|&(x, y)| {
            let patch = image.crop_square(x, y, patch_size)?;
            Ok(((x, y), encode_patch(&patch, grid_k)?))
        })
        .collect::<Result<Vec<_>>>()?;
    merge(&patches, (image.width(), image.height()))
}

/// Per-pixel blend of splat features.
struct Blend {
    weight: Vec<f64>,
    mean: Vec<Rgb>,
    std: Vec<Rgb>,
}

fn blend(comp: &GaussianComposition) -> Result<Blend> {
    if comp.is_empty() {
        return Err(Error::InvalidInput("cannot decode an empty composition".into()));
    }
    let (w, h) = comp.canvas;
    let n = w * h;
    let mut weight = vec![0.0; n];
    // First contributing splat's feature per pixel; the sums accumulate
    // deviations from it so uniform features blend back exactly.
    let mut reference: Vec<Option<[f64; FEATURE_DIM]>> = vec![None; n];
    let mut acc = vec![[0.0; FEATURE_DIM]; n];

    for s in &comp.splats {
        if s.feature.len() != FEATURE_DIM {
            return Err(Error::InvalidInput(format!(
                "feature has {} components, expected {FEATURE_DIM}",
                s.feature.len()
            )));
        }
        if s.amplitude == 0.0 {
            continue;
        }
        let inv = s.inverse_sigma();
        let rx = KERNEL_RADIUS * s.sigma[0][0].sqrt();
        let ry = KERNEL_RADIUS * s.sigma[1][1].sqrt();
        let x_lo = (s.mu[0] - rx - 0.5).ceil().max(0.0) as usize;
        let x_hi = ((s.mu[0] + rx - 0.5).floor().min(w as f64 - 1.0)).max(-1.0);
        let y_lo = (s.mu[1] - ry - 0.5).ceil().max(0.0) as usize;
        let y_hi = ((s.mu[1] + ry - 0.5).floor().min(h as f64 - 1.0)).max(-1.0);
        if x_hi < 0.0 || y_hi < 0.0 {
            continue;
        }
        let feat: [f64; FEATURE_DIM] = std::array::from_fn(|i| s.feature[i]);
        for y in y_lo..=y_hi as usize {
            let dy = y as f64 + 0.5 - s.mu[1];
            for x in x_lo..=x_hi as usize {
                let dx = x as f64 + 0.5 - s.mu[0];
                let m2 = dx * (inv[0][0] * dx + inv[0][1] * dy) + dy * (inv[1][0] * dx + inv[1][1] * dy);
                if m2 > KERNEL_RADIUS * KERNEL_RADIUS {
                    continue;
                }
                let wv = s.amplitude * (-0.5 * m2).exp();
                if wv <= 0.0 {
                    continue;
                }
                let i = y * w + x;
                let r = *reference[i].get_or_insert(feat);
                weight[i] += wv;
                for k in 0..FEATURE_DIM {
                    acc[i][k] += wv * (feat[k] - r[k]);
                }
            }
        }
    }

    let mut mean = Vec::with_capacity(n);
    let mut std = Vec::with_capacity(n);
    for i in 0..n {
        let (Some(r), true) = (reference[i], weight[i] > MIN_WEIGHT_SUM) else {
            return Err(Error::Coverage { x: i % w, y: i / w });
        };
        let f: [f64; FEATURE_DIM] = std::array::from_fn(|k| r[k] + acc[i][k] / weight[i]);
        mean.push([f[0], f[1], f[2]]);
        std.push([f[3], f[4], f[5]]);
    }
    Ok(Blend { weight, mean, std })
}

/// Total (unnormalised) splat weight at every canvas pixel, row-major.
pub fn weight_map(comp: &GaussianComposition) -> Result<Vec<f64>> {
    blend(comp).map(|b| b.weight)
}

/// Normalised splatting of feature means, without detail noise.
pub fn decode_smooth(comp: &GaussianComposition) -> Result<RgbImage> {
    let b = blend(comp)?;
    let (w, h) = comp.canvas;
    RgbImage::new(w, h, b.mean.into_iter().map(|m| m.map(|v| v.clamp(0.0, 1.0))).collect())
}

/// Normalised splatting plus per-pixel Gaussian detail noise scaled by the
/// blended standard deviation. Noise for pixel `i` comes from ChaCha stream
/// `i` of `noise_seed`, so output is independent of evaluation order.
pub fn decode(comp: &GaussianComposition, noise_seed: u64) -> Result<RgbImage> {
    let b = blend(comp)?;
    let (w, h) = comp.canvas;
    let base = ChaCha8Rng::seed_from_u64(noise_seed);
    let data = b
        .mean
        .par_iter()
        .zip(b.std.par_iter())
        .enumerate()
        .map(|(i, (m, s))| {
            if s.iter().all(|&v| v == 0.0) {
                return m.map(|v| v.clamp(0.0, 1.0));
            }
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            std::array::from_fn(|c| {
                let z: f64 = rng.sample(StandardNormal);
                (m[c] + s[c] * z).clamp(0.0, 1.0)
            })
        })
        .collect();
    RgbImage::new(w, h, data)
}
