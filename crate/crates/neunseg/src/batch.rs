//! Batch drivers behind the command-line interface: directory pairing,
//! concurrent per-image evaluation and CSV reports.
//!
//! Rows are keyed by image id (the PNG file stem) and written in id order
//! whatever the completion order, so reports are byte-stable across worker
//! counts. Wall-clock timings go to a separate report because they are the
//! one non-reproducible output.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::io::{read_label_map, read_points, read_probability_map, IoError};
use crate::metrics::{evaluate_instances, f1_seg, aji, ImageMetrics, MetricError};
use crate::schemes::{run_scheme, PipelineConfig, Scheme};

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{dir}: no .png images found")]
    EmptyInput { dir: PathBuf },
    #[error("no {kind} found for image `{id}` (expected {expected})")]
    MissingPair { id: String, kind: &'static str, expected: PathBuf },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to build the worker pool: {0}")]
    Pool(String),
}

/// Sorted stems of the `.png` files in a directory.
pub fn list_image_ids(dir: &Path) -> Result<Vec<String>, BatchError> {
    let entries = std::fs::read_dir(dir).map_err(|source| BatchError::Io(IoError::File {
        path: dir.to_path_buf(),
        source,
    }))?;
    let mut ids = BTreeSet::new();
    for entry in entries {
        let entry = entry.map_err(|source| BatchError::Io(IoError::File {
            path: dir.to_path_buf(),
            source,
        }))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("png") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                ids.insert(stem.to_string());
            }
        }
    }
    if ids.is_empty() {
        return Err(BatchError::EmptyInput { dir: dir.to_path_buf() });
    }
    Ok(ids.into_iter().collect())
}

fn require(path: PathBuf, id: &str, kind: &'static str) -> Result<PathBuf, BatchError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(BatchError::MissingPair { id: id.to_string(), kind, expected: path })
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, BatchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BatchError::Pool(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct EvalRow {
    pub id: String,
    pub metrics: ImageMetrics,
}

/// Evaluates predicted label maps against ground truth and centroids, one
/// image per id found in `pred_dir`.
pub fn evaluate_directory(
    pred_dir: &Path,
    gt_dir: &Path,
    points_dir: &Path,
    workers: usize,
) -> Result<Vec<EvalRow>, BatchError> {
    let ids = list_image_ids(pred_dir)?;
    let jobs: Vec<(String, PathBuf, PathBuf, PathBuf)> = ids
        .into_iter()
        .map(|id| {
            let pred = pred_dir.join(format!("{id}.png"));
            let gt = require(gt_dir.join(format!("{id}.png")), &id, "ground truth")?;
            let pts = require(points_dir.join(format!("{id}.txt")), &id, "centroid file")?;
            Ok((id, pred, gt, pts))
        })
        .collect::<Result<_, BatchError>>()?;

    pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|(id, pred, gt, pts)| {
                let pred = read_label_map(pred)?;
                let gt = read_label_map(gt)?;
                let centroids = read_points(pts, pred.width(), pred.height())?;
                let metrics = evaluate_instances(&pred, &gt, &centroids)?;
                Ok(EvalRow { id: id.clone(), metrics })
            })
            .collect()
    })
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub id: String,
    pub scheme: Scheme,
    pub f1_seg: f64,
    pub aji: f64,
    pub seconds: f64,
}

/// Runs all four schemes on every probability map and scores them against
/// the ground-truth instances.
pub fn compare_directory(
    probmap_dir: &Path,
    gt_dir: &Path,
    cfg: &PipelineConfig,
    workers: usize,
) -> Result<Vec<CompareRow>, BatchError> {
    let ids = list_image_ids(probmap_dir)?;
    let jobs: Vec<(String, PathBuf, PathBuf)> = ids
        .into_iter()
        .map(|id| {
            let pm = probmap_dir.join(format!("{id}.png"));
            let gt = require(gt_dir.join(format!("{id}.png")), &id, "ground truth")?;
            Ok((id, pm, gt))
        })
        .collect::<Result<_, BatchError>>()?;

    let nested: Vec<Vec<CompareRow>> = pool(workers)?.install(|| {
        jobs.par_iter()
            .map(|(id, pm_path, gt_path)| {
                let pm = read_probability_map(pm_path)?;
                let gt = read_label_map(gt_path)?;
                let mut rows = Vec::with_capacity(Scheme::ALL.len());
                for scheme in Scheme::ALL {
                    let start = Instant::now();
                    let labels = run_scheme(&pm, scheme, cfg);
                    let seconds = start.elapsed().as_secs_f64();
                    let seg = f1_seg(&labels, &gt, 0.5)?;
                    let aji = aji(&labels, &gt)?;
                    rows.push(CompareRow {
                        id: id.clone(),
                        scheme,
                        f1_seg: seg.f1,
                        aji,
                        seconds,
                    });
                }
                Ok(rows)
            })
            .collect::<Result<_, BatchError>>()
    })?;
    Ok(nested.into_iter().flatten().collect())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

fn aggregate_cell(values: &[f64]) -> String {
    let (mean, std) = mean_std(values);
    format!("{mean:.4}±{std:.4}")
}

fn write_report(path: &Path, content: String) -> Result<(), BatchError> {
    let mut file = std::fs::File::create(path)
        .map_err(|source| BatchError::Write { path: path.to_path_buf(), source })?;
    file.write_all(content.as_bytes())
        .map_err(|source| BatchError::Write { path: path.to_path_buf(), source })
}

/// Per-image metric rows plus a mean ± standard deviation aggregate row.
pub fn write_metrics_csv(path: &Path, rows: &[EvalRow]) -> Result<(), BatchError> {
    let mut out = String::from("image,f1_det,precision,recall,rce,dice,f1_seg,aji\n");
    for row in rows {
        let m = &row.metrics;
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            row.id, m.f1_det, m.precision, m.recall, m.rce, m.dice, m.f1_seg, m.aji
        ));
    }
    let columns: [fn(&ImageMetrics) -> f64; 7] = [
        |m| m.f1_det,
        |m| m.precision,
        |m| m.recall,
        |m| m.rce,
        |m| m.dice,
        |m| m.f1_seg,
        |m| m.aji,
    ];
    let mut aggregate = String::from("mean±std");
    for get in columns {
        let values: Vec<f64> = rows.iter().map(|r| get(&r.metrics)).collect();
        aggregate.push(',');
        aggregate.push_str(&aggregate_cell(&values));
    }
    out.push_str(&aggregate);
    out.push('\n');
    write_report(path, out)
}

/// Per-image, per-scheme instance metrics plus per-scheme aggregates.
/// Timings are reported separately by [`write_timing_csv`].
pub fn write_compare_csv(path: &Path, rows: &[CompareRow]) -> Result<(), BatchError> {
    let mut out = String::from("image,scheme,f1_seg,aji\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.4},{:.4}\n",
            row.id, row.scheme, row.f1_seg, row.aji
        ));
    }
    for scheme in Scheme::ALL {
        let f1: Vec<f64> = rows.iter().filter(|r| r.scheme == scheme).map(|r| r.f1_seg).collect();
        let aji: Vec<f64> = rows.iter().filter(|r| r.scheme == scheme).map(|r| r.aji).collect();
        out.push_str(&format!(
            "mean±std,{},{},{}\n",
            scheme,
            aggregate_cell(&f1),
            aggregate_cell(&aji)
        ));
    }
    write_report(path, out)
}

/// Wall-clock seconds per image and scheme. Not byte-reproducible by
/// nature, hence a separate file.
pub fn write_timing_csv(path: &Path, rows: &[CompareRow]) -> Result<(), BatchError> {
    let mut out = String::from("image,scheme,seconds\n");
    for row in rows {
        out.push_str(&format!("{},{},{:.3}\n", row.id, row.scheme, row.seconds));
    }
    write_report(path, out)
}
