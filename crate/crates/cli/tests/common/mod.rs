#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use texbench_core::augment::DatasetManifest;
use texbench_core::{fsutil, maskio, synth};

pub fn texbench<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_texbench"))
        .args(args)
        .env("TEXBENCH_LOG", "error")
        .output()
        .expect("spawn texbench")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn augment(manifest: &Path, textures: &Path, out: &Path, eta: f64, workers: usize) -> Output {
    augment_with_mode(manifest, textures, out, eta, "fixed", workers)
}

pub fn augment_with_mode(manifest: &Path, textures: &Path, out: &Path, eta: f64, mode: &str, workers: usize) -> Output {
    texbench([
        OsStr::new("augment"),
        "--manifest".as_ref(),
        manifest.as_os_str(),
        "--textures".as_ref(),
        textures.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
        "--eta-max".as_ref(),
        eta.to_string().as_ref(),
        "--eta-mode".as_ref(),
        mode.as_ref(),
        "--seed".as_ref(),
        "11".as_ref(),
        "--workers".as_ref(),
        workers.to_string().as_ref(),
    ])
}

/// Writes band-split predictions for every augmented label map under
/// `aug_out` into `preds`, plus a pairs file. Returns `(pairs, gt dir)`.
pub fn stub_predictions(aug_out: &Path, preds: &Path, fragments: usize) -> (PathBuf, PathBuf) {
    let text = std::fs::read_to_string(aug_out.join("manifest.json")).unwrap();
    let manifest: DatasetManifest = serde_json::from_str(&text).unwrap();
    let mut pairs = Vec::new();
    for rec in &manifest.images {
        let labels = maskio::load_label_map(&aug_out.join(rec.output_labels.as_ref().unwrap())).unwrap();
        let set = synth::predictions_from_gt(&labels, fragments);
        maskio::save_predictions(&set, &preds.join(format!("{}.json", rec.image_id))).unwrap();
        pairs.push(serde_json::json!({ "pred": format!("{}.json", rec.image_id), "gt": format!("{}.png", rec.image_id) }));
    }
    let pairs_path = preds.join("pairs.json");
    fsutil::write_json_atomic(&pairs_path, &pairs).unwrap();
    (pairs_path, aug_out.join("labels"))
}

pub fn eval(preds: &Path, gt: &Path, pairs: &Path, report: &Path, workers: usize) -> Output {
    texbench([
        OsStr::new("eval"),
        "--preds".as_ref(),
        preds.as_os_str(),
        "--gt".as_ref(),
        gt.as_os_str(),
        "--pairs".as_ref(),
        pairs.as_os_str(),
        "--report".as_ref(),
        report.as_os_str(),
        "--workers".as_ref(),
        workers.to_string().as_ref(),
    ])
}

pub fn frag(preds: &Path, gt: &Path, pairs: &Path, out: &Path) -> Output {
    texbench([
        OsStr::new("frag"),
        "--preds".as_ref(),
        preds.as_os_str(),
        "--gt".as_ref(),
        gt.as_os_str(),
        "--pairs".as_ref(),
        pairs.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ])
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
