//! Instance-wise texture transfer.
//!
//! The content image is rescaled to `8l × 8l`, encoded patch by patch, and
//! merged. For every GT instance a texture from a not-yet-used bank category
//! is encoded at `l × l`; the content splats centered inside the instance
//! mask have their features pulled towards randomly drawn texture features
//! by `η`. The modified composition is then decoded.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{self, GaussianComposition};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::maskio::{self, BinaryMask, InstanceLabelMap};
use crate::raster::RgbImage;
use crate::rng::{self, Purpose, StreamId};

/// `(1 − η)·content + η·texture`; `η` is texture strength.
pub fn interpolate_feature(content: &[f64], texture: &[f64], eta: f64) -> Result<Vec<f64>> {
    if content.len() != texture.len() {
        return Err(Error::InvalidInput(format!(
            "feature dimensions differ: {} vs {}",
            content.len(),
            texture.len()
        )));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidInput(format!("eta {eta} outside [0, 1]")));
    }
    Ok(content
        .iter()
        .zip(texture)
        .map(|(&c, &t)| (1.0 - eta) * c + eta * t)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Texturized {
    pub composition: GaussianComposition,
    /// Indices of splats whose features were replaced.
    pub modified: Vec<usize>,
    /// Index into the texture composition drawn for each modified splat.
    pub drawn: Vec<usize>,
    /// Set when the mask has no foreground pixels.
    pub empty_mask: bool,
}

/// Pixel containing a continuous canvas point, clamped to the canvas.
fn pixel_of(mu: [f64; 2], (w, h): (usize, usize)) -> (usize, usize) {
    let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
    (clamp(mu[0], w), clamp(mu[1], h))
}

/// Blends every splat centered inside `mask` towards a texture feature drawn
/// uniformly (with replacement) from `texture`. Other splats are untouched.
pub fn texturize_instance(
    content: &GaussianComposition,
    mask: &BinaryMask,
    texture: &GaussianComposition,
    eta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Texturized> {
    if mask.extent() != content.canvas {
        return Err(Error::InvalidInput(format!(
            "mask is {}x{} but canvas is {}x{}",
            mask.width(),
            mask.height(),
            content.canvas.0,
            content.canvas.1
        )));
    }
    if texture.is_empty() {
        return Err(Error::InvalidInput("texture composition is empty".into()));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidInput(format!("eta {eta} outside [0, 1]")));
    }
    let mut out = content.clone();
    if mask.is_empty() {
        return Ok(Texturized {
            composition: out,
            modified: Vec::new(),
            drawn: Vec::new(),
            empty_mask: true,
        });
    }
    let mut modified = Vec::new();
    let mut drawn = Vec::new();
    for (i, splat) in out.splats.iter_mut().enumerate() {
        let (x, y) = pixel_of(splat.mu, content.canvas);
        if !mask.get(x, y) {
            continue;
        }
        let j = rng.random_range(0..texture.len());
        splat.feature = interpolate_feature(&splat.feature, &texture.splats[j].feature, eta)?;
        modified.push(i);
        drawn.push(j);
    }
    Ok(Texturized {
        composition: out,
        modified,
        drawn,
        empty_mask: false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextureBank {
    pub categories: BTreeMap<String, Vec<PathBuf>>,
}

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "bmp", "gif", "tif", "tiff"];

impl TextureBank {
    pub fn new(categories: BTreeMap<String, Vec<PathBuf>>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::InvalidInput("texture bank has no categories".into()));
        }
        if let Some((name, _)) = categories.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::InvalidInput(format!("texture category {name:?} is empty")));
        }
        Ok(Self { categories })
    }

    /// One category per subdirectory; image files inside it, sorted by name.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut categories = BTreeMap::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            if !path.is_dir() {
                continue;
            }
            let mut files = Vec::new();
            for f in std::fs::read_dir(&path).map_err(|e| Error::io(&path, e))? {
                let f = f.map_err(|e| Error::io(&path, e))?.path();
                let is_image = f
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
                if f.is_file() && is_image {
                    files.push(f);
                }
            }
            files.sort();
            if !files.is_empty() {
                categories.insert(entry.file_name().to_string_lossy().into_owned(), files);
            }
        }
        Self::new(categories)
    }

    pub fn texture_count(&self) -> usize {
        self.categories.values().map(Vec::len).sum()
    }

    fn nth_texture(&self, mut n: usize) -> (&str, &Path) {
        for (name, files) in &self.categories {
            if n < files.len() {
                return (name, &files[n]);
            }
            n -= files.len();
        }
        unreachable!("texture index out of range")
    }

    /// Uniform over unused categories, then uniform within the category;
    /// uniform over the whole bank once every category has been used.
    fn sample<'a>(&'a self, used: &BTreeSet<String>, rng: &mut ChaCha8Rng) -> (&'a str, &'a Path) {
        let unused: Vec<(&String, &Vec<PathBuf>)> =
            self.categories.iter().filter(|(k, _)| !used.contains(*k)).collect();
        if unused.is_empty() {
            let n = rng.random_range(0..self.texture_count());
            return self.nth_texture(n);
        }
        let (name, files) = unused[rng.random_range(0..unused.len())];
        (name, &files[rng.random_range(0..files.len())])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaMode {
    /// Every image uses `eta_max`.
    Fixed,
    /// `η ~ U[0, eta_max)` once per image, shared by its instances.
    #[default]
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentationConfig {
    pub eta_max: f64,
    pub eta_mode: EtaMode,
    pub patch_size: usize,
    pub grid_k: usize,
    /// Content canvas side is `scale_factor · patch_size`.
    pub scale_factor: usize,
    pub master_seed: u64,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            eta_max: 0.3,
            eta_mode: EtaMode::Uniform,
            patch_size: 16,
            grid_k: codec::DEFAULT_GRID_K,
            scale_factor: 8,
            master_seed: 0,
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta_max) {
            return Err(Error::InvalidInput(format!("eta_max {} outside [0, 1]", self.eta_max)));
        }
        if self.patch_size < codec::MIN_PATCH_SIZE {
            return Err(Error::InvalidInput(format!(
                "patch size {} is below {}",
                self.patch_size,
                codec::MIN_PATCH_SIZE
            )));
        }
        if self.grid_k == 0 || self.scale_factor == 0 {
            return Err(Error::InvalidInput("grid_k and scale_factor must be positive".into()));
        }
        Ok(())
    }

    pub fn canvas_side(&self) -> usize {
        self.scale_factor * self.patch_size
    }

    fn draw_eta(&self, image_index: u64) -> f64 {
        match self.eta_mode {
            EtaMode::Fixed => self.eta_max,
            EtaMode::Uniform => {
                let mut r = rng::stream(self.master_seed, StreamId::new(image_index, Purpose::Eta));
                r.random::<f64>() * self.eta_max
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: u16,
    pub category: String,
    pub texture: PathBuf,
    pub stream: StreamId,
    pub modified_splats: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub empty_mask: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub image_id: String,
    pub image_index: u64,
    pub eta: f64,
    pub instances: Vec<InstanceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_labels: Option<PathBuf>,
}

/// Augmented composition before decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedComposition {
    pub composition: GaussianComposition,
    pub record: AugmentationRecord,
}

fn load_texture(path: &Path, cfg: &AugmentationConfig) -> Result<GaussianComposition> {
    let img = RgbImage::load(path)?.resize_bilinear(cfg.patch_size, cfg.patch_size)?;
    codec::encode_patch(&img, cfg.grid_k)
}

/// Applies texture transfer to an already-encoded content composition.
/// `labels` must be at canvas resolution.
pub fn augment_composition(
    content: GaussianComposition,
    labels: &InstanceLabelMap,
    bank: &TextureBank,
    cfg: &AugmentationConfig,
    image_id: &str,
    image_index: u64,
) -> Result<AugmentedComposition> {
    cfg.validate()?;
    if labels.extent() != content.canvas {
        return Err(Error::InvalidInput(format!(
            "label map is {}x{} but canvas is {}x{}",
            labels.width(),
            labels.height(),
            content.canvas.0,
            content.canvas.1
        )));
    }
    let eta = cfg.draw_eta(image_index);
    let mut choice = rng::stream(cfg.master_seed, StreamId::new(image_index, Purpose::TextureChoice));
    let mut used = BTreeSet::new();
    let mut cache: HashMap<PathBuf, GaussianComposition> = HashMap::new();
    let mut composition = content;
    let mut instances = Vec::new();

    for (ordinal, id) in labels.region_ids(false).into_iter().enumerate() {
        let (category, texture_path) = bank.sample(&used, &mut choice);
        let stream = StreamId::new(image_index, Purpose::InstanceSplats(ordinal as u32));
        let mut record = InstanceRecord {
            instance_id: id,
            category: category.to_string(),
            texture: texture_path.to_path_buf(),
            stream,
            modified_splats: 0,
            empty_mask: false,
            error: None,
        };
        let texture = match cache.get(texture_path) {
            Some(t) => t,
            None => match load_texture(texture_path, cfg) {
                Ok(t) => cache.entry(texture_path.to_path_buf()).or_insert(t),
                Err(e) => {
                    warn!("{image_id}: instance {id}: texture {}: {e}", texture_path.display());
                    record.error = Some(e.to_string());
                    instances.push(record);
                    continue;
                }
            },
        };
        used.insert(category.to_string());
        let mask = labels.region_mask(id);
        let mut splat_rng = rng::stream(cfg.master_seed, stream);
        let out = texturize_instance(&composition, &mask, texture, eta, &mut splat_rng)?;
        if out.empty_mask {
            warn!("{image_id}: instance {id} has an empty mask at canvas resolution");
        }
        record.modified_splats = out.modified.len();
        record.empty_mask = out.empty_mask;
        composition = out.composition;
        instances.push(record);
    }
    debug!("{image_id}: eta {eta:.4}, {} instances", instances.len());
    Ok(AugmentedComposition {
        composition,
        record: AugmentationRecord {
            image_id: image_id.to_string(),
            image_index,
            eta,
            instances,
            output_image: None,
            output_labels: None,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedImage {
    pub image: RgbImage,
    /// GT labels rescaled to the output resolution.
    pub labels: InstanceLabelMap,
    pub record: AugmentationRecord,
}

pub fn decode_seed(cfg: &AugmentationConfig, image_index: u64) -> u64 {
    rng::stream(cfg.master_seed, StreamId::new(image_index, Purpose::DecodeNoise)).random()
}

pub fn augment_image(
    content: &RgbImage,
    labels: &InstanceLabelMap,
    bank: &TextureBank,
    cfg: &AugmentationConfig,
    image_id: &str,
    image_index: u64,
) -> Result<AugmentedImage> {
    cfg.validate()?;
    if labels.extent() != (content.width(), content.height()) {
        return Err(Error::InvalidInput(format!(
            "label map is {}x{} but image is {}x{}",
            labels.width(),
            labels.height(),
            content.width(),
            content.height()
        )));
    }
    let side = cfg.canvas_side();
    let scaled = content.resize_bilinear(side, side)?;
    let scaled_labels = labels.resize_nearest(side, side)?;
    let encoded = codec::encode_image(&scaled, cfg.patch_size, cfg.grid_k)?;
    let aug = augment_composition(encoded, &scaled_labels, bank, cfg, image_id, image_index)?;
    let image = codec::decode(&aug.composition, decode_seed(cfg, image_index))?;
    Ok(AugmentedImage {
        image,
        labels: scaled_labels,
        record: aug.record,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image: PathBuf,
    pub labels: PathBuf,
}

/// Reads a dataset manifest; relative paths resolve against its directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fsutil::read_to_string(path)?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| Error::corrupt(path, e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(entries
        .into_iter()
        .map(|e| ManifestEntry {
            image: base.join(e.image),
            labels: base.join(e.labels),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageFailure {
    pub image_index: u64,
    pub image: PathBuf,
    pub labels: PathBuf,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: AugmentationConfig,
    pub tool_version: String,
    pub images: Vec<AugmentationRecord>,
    pub errors: Vec<ImageFailure>,
}

fn output_stem(index: u64, path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    format!("{index:05}_{stem}")
}

fn build_one(
    index: u64,
    entry: &ManifestEntry,
    bank: &TextureBank,
    cfg: &AugmentationConfig,
    out_dir: &Path,
) -> Result<AugmentationRecord> {
    let content = RgbImage::load(&entry.image)?;
    let labels = maskio::load_label_map(&entry.labels)?;
    let id = output_stem(index, &entry.image);
    let mut aug = augment_image(&content, &labels, bank, cfg, &id, index)?;
    let image_rel = Path::new("images").join(format!("{id}.png"));
    let labels_rel = Path::new("labels").join(format!("{id}.png"));
    aug.image.save_png(&out_dir.join(&image_rel))?;
    maskio::save_label_map(&aug.labels, &out_dir.join(&labels_rel))?;
    aug.record.output_image = Some(image_rel);
    aug.record.output_labels = Some(labels_rel);
    Ok(aug.record)
}

/// Augments every manifest entry on a pool of `workers` threads, writing
/// `images/` and `labels/` under `out_dir`. Per-image RNG streams are keyed
/// by manifest position, so the output does not depend on `workers`.
pub fn build_dataset(
    entries: &[ManifestEntry],
    bank: &TextureBank,
    cfg: &AugmentationConfig,
    workers: usize,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    use rayon::prelude::*;

    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let results: Vec<Result<AugmentationRecord>> = pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| build_one(i as u64, e, bank, cfg, out_dir))
            .collect()
    });
    let mut images = Vec::new();
    let mut errors = Vec::new();
    for (i, (entry, r)) in entries.iter().zip(results).enumerate() {
        match r {
            Ok(rec) => images.push(rec),
            Err(e) => {
                warn!("image {i} ({}): {e}", entry.image.display());
                errors.push(ImageFailure {
                    image_index: i as u64,
                    image: entry.image.clone(),
                    labels: entry.labels.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(DatasetManifest {
        config: cfg.clone(),
        tool_version: crate::TOOL_VERSION.to_string(),
        images,
        errors,
    })
}
