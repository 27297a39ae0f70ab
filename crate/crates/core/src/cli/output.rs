use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::concentration::{center_of_mass, radial_profile, ConcentrationReport};
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub phase: String,
    pub seconds: f64,
}

/// Everything a run leaves behind. `scalars` is deterministic for a fixed
/// config, seed and thread count; timings are not.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub library_version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub threads: usize,
    pub timings: Vec<Timing>,
    pub scalars: serde_json::Value,
    pub files: Vec<FileEntry>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Hashes `paths` relative to `root`.
pub fn inventory(root: &Path, paths: &[PathBuf]) -> Result<Vec<FileEntry>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileEntry {
                path: p.strip_prefix(root).unwrap_or(p).to_string_lossy().into_owned(),
                bytes: fs::metadata(p)?.len(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    write_atomic(&path, &serde_json::to_vec_pretty(manifest)?)?;
    Ok(path)
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

/// Writes `energy.csv`, `barycenter.csv`, `radial_profile.csv` and
/// `summary.csv` into `dir`; returns their paths.
pub fn emit_plot_data(report: &ConcentrationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let n = report.dimension;
    let axis = |prefix: &'static str| (1..=n).map(move |k| format!("{prefix}_x{k}"));

    let energy = dir.join("energy.csv");
    let mut w = csv::Writer::from_path(&energy)?;
    w.write_record(["eps", "c_eps", "c_m"])?;
    for e in &report.entries {
        w.write_record([num(e.eps), num(e.c_eps), num(report.c_m)])?;
    }
    w.flush()?;

    let bary = dir.join("barycenter.csv");
    let mut w = csv::Writer::from_path(&bary)?;
    let header: Vec<String> = std::iter::once("eps".to_string()).chain(axis("psi")).chain(axis("phi")).collect();
    w.write_record(&header)?;
    for e in &report.entries {
        let row: Vec<String> = std::iter::once(num(e.eps))
            .chain(e.barycenter_psi.iter().map(|&v| num(v)))
            .chain(e.barycenter_phi.iter().map(|&v| num(v)))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;

    let radial = dir.join("radial_profile.csv");
    let mut w = csv::Writer::from_path(&radial)?;
    w.write_record(["r", "u_smallest_eps", "u_limit"])?;
    let last = report.solutions.iter().rev().find_map(|s| s.as_ref());
    if let (Some(sol), Some(lim)) = (last, report.limit.as_ref()) {
        let center = |f| center_of_mass(f, 2.0);
        let a = radial_profile(&sol.primal.u, &center(&sol.primal.u)?);
        let b = radial_profile(&lim.primal.u, &center(&lim.primal.u)?);
        for ((r, x), (_, y)) in a.iter().zip(&b) {
            w.write_record([num(*r), num(*x), num(*y)])?;
        }
    }
    w.flush()?;

    let summary = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary)?;
    let header: Vec<String> = ["eps", "c_eps", "c_m"]
        .iter()
        .map(|s| s.to_string())
        .chain(axis("bary_psi"))
        .chain(axis("bary_phi"))
        .chain(["profile_distance_u", "profile_distance_v", "iterations", "converged"].iter().map(|s| s.to_string()))
        .collect();
    w.write_record(&header)?;
    for e in &report.entries {
        let row: Vec<String> = [num(e.eps), num(e.c_eps), num(report.c_m)]
            .into_iter()
            .chain(e.barycenter_psi.iter().map(|&v| num(v)))
            .chain(e.barycenter_phi.iter().map(|&v| num(v)))
            .chain([
                num(e.profile_distance_u),
                num(e.profile_distance_v),
                e.iterations.to_string(),
                e.converged.to_string(),
            ])
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(vec![energy, bary, radial, summary])
}
