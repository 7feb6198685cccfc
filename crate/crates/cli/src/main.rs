//! `texbench`: texture-transfer augmentation and texture-aware segmentation
//! evaluation.
//!
//! Exit status: 0 on full success, 1 when some items failed, 2 on usage or
//! configuration errors.

mod run_manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info, warn};
use serde::Serialize;
use texbench_core::augment::{self, AugmentationConfig, EtaMode, TextureBank};
use texbench_core::metrics::{self, AggregateMode, EvalConfig, EvalPair};
use texbench_core::{codec, fragstats, fsutil, RgbImage};

use run_manifest::RunManifest;

#[derive(Parser)]
#[command(name = "texbench", version, about = "Texture-transfer augmentation and texture-aware segmentation evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EtaModeArg {
    Fixed,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AggregateArg {
    Both,
    Aggregated,
    NonAggregated,
}

#[derive(Subcommand)]
enum Command {
    /// Build a texture-augmented copy of a dataset.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        textures: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        eta_max: f64,
        #[arg(long, value_enum, default_value_t = EtaModeArg::Uniform)]
        eta_mode: EtaModeArg,
        #[arg(long, default_value_t = 16)]
        patch_size: usize,
        #[arg(long, default_value_t = codec::DEFAULT_GRID_K)]
        grid_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Score prediction files against GT label maps.
    Eval {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, value_enum, default_value_t = AggregateArg::Both)]
        aggregate: AggregateArg,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        min_overlap_frac: f64,
        #[arg(long)]
        include_background_miou: bool,
        #[arg(long)]
        exclude_background_ari: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Tabulate predicted-mask counts grouped by GT segment count.
    Frag {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Encode and decode one image; print reconstruction error stats as JSON.
    CodecRoundtrip {
        image: PathBuf,
        #[arg(long, default_value_t = 16)]
        patch_size: usize,
        #[arg(long, default_value_t = codec::DEFAULT_GRID_K)]
        grid_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decode the blended means only, without detail noise.
        #[arg(long)]
        no_noise: bool,
        /// Also write the reconstruction as PNG.
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

/// How a subcommand ended.
enum Outcome {
    Success,
    Partial(usize),
}

/// Failure before any item was processed: bad flags, unreadable inputs.
struct ConfigError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.into())
    }
}

type CmdResult = Result<Outcome, ConfigError>;

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(f))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn outcome(failures: usize) -> Outcome {
    if failures == 0 {
        Outcome::Success
    } else {
        Outcome::Partial(failures)
    }
}

fn run_augment(
    manifest: &Path,
    textures: &Path,
    out: &Path,
    cfg: AugmentationConfig,
    workers: usize,
) -> CmdResult {
    cfg.validate()?;
    let workers = if workers == 0 { rayon::current_num_threads() } else { workers };
    let entries = augment::load_manifest(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let bank = TextureBank::from_dir(textures).with_context(|| format!("texture bank {}", textures.display()))?;
    info!(
        "augmenting {} images with {} textures in {} categories",
        entries.len(),
        bank.texture_count(),
        bank.categories.len()
    );
    let mut run = RunManifest::start("augment", serde_json::json!({ "augmentation": &cfg, "workers": workers, "manifest": manifest, "textures": textures, "out": out }));
    run.hash_inputs(std::iter::once(manifest));
    run.hash_inputs(entries.iter().flat_map(|e| [e.image.as_path(), e.labels.as_path()]));
    run.hash_inputs(bank.categories.values().flatten().map(PathBuf::as_path));

    let result = augment::build_dataset(&entries, &bank, &cfg, workers, out)?;
    let manifest_out = out.join("manifest.json");
    fsutil::write_json_atomic(&manifest_out, &result)?;
    for e in &result.errors {
        error!("{}: {}", e.image.display(), e.error);
        run.errors.push(format!("{}: {}", e.image.display(), e.error));
    }
    run.outputs.push(manifest_out);
    run.outputs.extend(result.images.iter().flat_map(|r| {
        [r.output_image.clone(), r.output_labels.clone()].into_iter().flatten().map(|p| out.join(p))
    }));
    run.finish(&out.join("run.json"))?;
    Ok(outcome(result.errors.len()))
}

fn eval_inputs(preds: &Path, gt: &Path, pairs: &Path) -> anyhow::Result<Vec<EvalPair>> {
    for dir in [preds, gt] {
        anyhow::ensure!(dir.is_dir(), "{} is not a directory", dir.display());
    }
    metrics::load_pairs(pairs, preds, gt).with_context(|| format!("reading {}", pairs.display()))
}

fn hash_pairs(run: &mut RunManifest, pairs_file: &Path, pairs: &[EvalPair]) {
    run.hash_inputs(std::iter::once(pairs_file));
    run.hash_inputs(pairs.iter().flat_map(|p| [p.pred.as_path(), p.gt.as_path()]));
}

fn run_eval(pairs_file: &Path, pairs: Vec<EvalPair>, cfg: EvalConfig, report: &Path, workers: usize) -> CmdResult {
    if !(0.0..=1.0).contains(&cfg.min_overlap_frac) {
        return Err(anyhow::anyhow!("--min-overlap-frac must be in [0, 1]").into());
    }
    let mut run = RunManifest::start("eval", serde_json::json!({ "evaluation": &cfg, "workers": workers, "pairs": pairs_file, "report": report }));
    hash_pairs(&mut run, pairs_file, &pairs);
    let result = with_pool(workers, || metrics::evaluate_dataset(&pairs, &cfg))?;
    let csv_path = report.with_extension("csv");
    fsutil::write_json_atomic(report, &result)?;
    result.write_csv(&csv_path)?;
    for e in &result.errors {
        error!("{}: {}", e.pred.display(), e.error);
        run.errors.push(format!("{}: {}", e.pred.display(), e.error));
    }
    run.outputs = vec![report.to_path_buf(), csv_path];
    run.finish(&sibling(report, ".run.json"))?;
    Ok(outcome(result.errors.len()))
}

fn run_frag(pairs_file: &Path, pairs: Vec<EvalPair>, out: &Path, workers: usize) -> CmdResult {
    let mut run = RunManifest::start("frag", serde_json::json!({ "quartiles": fragstats::QUARTILE_METHOD, "workers": workers, "pairs": pairs_file, "out": out }));
    hash_pairs(&mut run, pairs_file, &pairs);
    let summary = with_pool(workers, || fragstats::fragmentation(&pairs))?;
    let images_path = sibling(out, ".images.csv");
    summary.write_csv(out)?;
    fsutil::write_atomic(&images_path, &summary.images_csv()?)?;
    for e in &summary.errors {
        error!("{}: {}", e.pred.display(), e.error);
        run.errors.push(format!("{}: {}", e.pred.display(), e.error));
    }
    run.outputs = vec![out.to_path_buf(), images_path];
    run.finish(&sibling(out, ".run.json"))?;
    Ok(outcome(summary.errors.len()))
}

#[derive(Serialize)]
struct RoundtripStats {
    image: PathBuf,
    width: usize,
    height: usize,
    patch_size: usize,
    grid_k: usize,
    patches: usize,
    splats: usize,
    noise: bool,
    seed: u64,
    mean_abs_error: f64,
    max_abs_error: f64,
    rmse: f64,
    psnr_db: f64,
}

fn run_codec_roundtrip(
    image: &Path,
    patch_size: usize,
    grid_k: usize,
    seed: u64,
    no_noise: bool,
    save: Option<&Path>,
) -> CmdResult {
    let img = RgbImage::load(image).with_context(|| format!("reading {}", image.display()))?;
    let grid = codec::PatchGrid::for_canvas(img.width(), img.height(), patch_size)?;
    let comp = codec::encode_image(&img, patch_size, grid_k)?;
    let out = if no_noise {
        codec::decode_smooth(&comp)?
    } else {
        codec::decode(&comp, seed)?
    };
    let errs: Vec<f64> = img
        .pixels()
        .iter()
        .zip(out.pixels())
        .flat_map(|(a, b)| (0..3).map(move |c| (a[c] - b[c]).abs()))
        .collect();
    let n = errs.len() as f64;
    let mse = errs.iter().map(|e| e * e).sum::<f64>() / n;
    let stats = RoundtripStats {
        image: image.to_path_buf(),
        width: img.width(),
        height: img.height(),
        patch_size,
        grid_k,
        patches: grid.patch_count(),
        splats: comp.len(),
        noise: !no_noise,
        seed,
        mean_abs_error: errs.iter().sum::<f64>() / n,
        max_abs_error: errs.iter().copied().fold(0.0, f64::max),
        rmse: mse.sqrt(),
        psnr_db: if mse > 0.0 { -10.0 * mse.log10() } else { f64::INFINITY },
    };
    if let Some(path) = save {
        out.save_png(path)?;
    }
    // serde_json maps a non-finite PSNR to null
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(Outcome::Success)
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Augment {
            manifest,
            textures,
            out,
            eta_max,
            eta_mode,
            patch_size,
            grid_k,
            seed,
            workers,
        } => {
            let cfg = AugmentationConfig {
                eta_max,
                eta_mode: match eta_mode {
                    EtaModeArg::Fixed => EtaMode::Fixed,
                    EtaModeArg::Uniform => EtaMode::Uniform,
                },
                patch_size,
                grid_k,
                master_seed: seed,
                ..Default::default()
            };
            run_augment(&manifest, &textures, &out, cfg, workers)
        }
        Command::Eval {
            preds,
            gt,
            pairs,
            aggregate,
            report,
            min_overlap_frac,
            include_background_miou,
            exclude_background_ari,
            workers,
        } => {
            let list = eval_inputs(&preds, &gt, &pairs)?;
            let cfg = EvalConfig {
                aggregate: match aggregate {
                    AggregateArg::Both => AggregateMode::Both,
                    AggregateArg::Aggregated => AggregateMode::Aggregated,
                    AggregateArg::NonAggregated => AggregateMode::NonAggregated,
                },
                include_background_miou,
                include_background_ari: !exclude_background_ari,
                min_overlap_frac,
                ..Default::default()
            };
            run_eval(&pairs, list, cfg, &report, workers)
        }
        Command::Frag { preds, gt, pairs, out, workers } => {
            let list = eval_inputs(&preds, &gt, &pairs)?;
            run_frag(&pairs, list, &out, workers)
        }
        Command::CodecRoundtrip {
            image,
            patch_size,
            grid_k,
            seed,
            no_noise,
            save,
        } => run_codec_roundtrip(&image, patch_size, grid_k, seed, no_noise, save.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TEXBENCH_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(n)) => {
            warn!("{n} item(s) failed");
            ExitCode::from(1)
        }
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
