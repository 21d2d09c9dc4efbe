//! Panel sets for the four coefficient figures, each written as a PNG plus a
//! JSON sidecar describing the parameters behind it.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analytic::{coefficient_matrix, CoefficientMatrix, PhysicalParams, SigmaMode};
use crate::error::{HgError, Result};
use crate::heatmap::{render_heatmap, HeatmapStyle};
use crate::io::{to_json, write_atomic};
use crate::special_functions::{ModeFunctionConvention, Normalization, PhaseConvention};

/// Default `w_p/δ` panels for figures 1 to 3.
pub const RATIO_GRID: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];
pub const FIGURE_MAX_INDEX: usize = 12;
pub const CELL_PX: u32 = 30;

/// Mode phases used unless overridden. With `−iⁿ` phases the Gaussian-pump
/// diagonal alternates in sign when `w_p < δ`.
pub const FIGURE_CONVENTION: ModeFunctionConvention =
    ModeFunctionConvention::new(Normalization::UnitNorm, PhaseConvention::PaperPhase);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub n: usize,
    pub ratio: f64,
    pub sigma_mode: SigmaMode,
}

#[derive(Debug, Clone, Serialize)]
struct Sidecar<'a> {
    figure: u8,
    panel: usize,
    n: usize,
    ratio: f64,
    ratio_grid: Vec<f64>,
    sigma_mode: SigmaMode,
    sigma: f64,
    params: &'a PhysicalParams,
    convention: ModeFunctionConvention,
    max_index: usize,
    cell_px: u32,
    normalized: bool,
    raw_frobenius_norm: f64,
    truncation_tail: f64,
    image: String,
}

pub fn panels(which: u8) -> Result<Vec<Panel>> {
    let geometric = |n| {
        RATIO_GRID
            .iter()
            .map(|&ratio| Panel {
                n,
                ratio,
                sigma_mode: SigmaMode::Geometric,
            })
            .collect()
    };
    Ok(match which {
        1 => geometric(1),
        2 => geometric(2),
        3 => geometric(5),
        4 => [SigmaMode::PumpMatched, SigmaMode::PhaseMatched]
            .iter()
            .flat_map(|&sigma_mode| {
                [2.0, 0.5].map(|ratio| Panel {
                    n: 2,
                    ratio,
                    sigma_mode,
                })
            })
            .collect(),
        _ => return Err(HgError::domain(format!("figure must be 1..4, got {which}"))),
    })
}

pub fn panel_matrix(panel: &Panel, convention: ModeFunctionConvention) -> Result<CoefficientMatrix> {
    let params = PhysicalParams::with_ratio(panel.ratio, panel.sigma_mode, (panel.n, 0))?
        .with_convention(convention);
    coefficient_matrix(panel.n, &params, FIGURE_MAX_INDEX, true)
}

/// Renders every panel of figure `which` into `dir`, returning the image paths.
pub fn generate_figure(
    which: u8,
    dir: &Path,
    convention: Option<ModeFunctionConvention>,
) -> Result<Vec<PathBuf>> {
    let convention = convention.unwrap_or(FIGURE_CONVENTION);
    std::fs::create_dir_all(dir)?;
    let list = panels(which)?;
    let ratio_grid: Vec<f64> = list.iter().map(|p| p.ratio).collect();
    let mut written = Vec::new();
    for (i, panel) in list.iter().enumerate() {
        let m = panel_matrix(panel, convention)?;
        let stem = format!("fig{which}_panel{i}");
        let image = dir.join(format!("{stem}.png"));
        render_heatmap(&m, HeatmapStyle::cells(&m, CELL_PX), &image)?;
        let sidecar = Sidecar {
            figure: which,
            panel: i,
            n: panel.n,
            ratio: panel.ratio,
            ratio_grid: ratio_grid.clone(),
            sigma_mode: panel.sigma_mode,
            sigma: m.params.sigma(),
            params: &m.params,
            convention,
            max_index: m.max_index,
            cell_px: CELL_PX,
            normalized: m.normalized,
            raw_frobenius_norm: m.raw_frobenius_norm,
            truncation_tail: m.truncation_tail,
            image: format!("{stem}.png"),
        };
        write_atomic(&dir.join(format!("{stem}.json")), &to_json(&sidecar)?)?;
        written.push(image);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_sets() {
        assert_eq!(panels(1).unwrap().len(), 5);
        assert_eq!(panels(3).unwrap()[0].n, 5);
        let four = panels(4).unwrap();
        assert_eq!(four.len(), 4);
        assert!(four.iter().all(|p| p.n == 2));
        assert!(panels(0).is_err() && panels(5).is_err());
    }

    #[test]
    fn figure_files_are_written_with_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let paths = generate_figure(4, dir.path(), None).unwrap();
        assert_eq!(paths.len(), 4);
        for p in &paths {
            assert!(p.exists());
            let side: serde_json::Value =
                serde_json::from_slice(&std::fs::read(p.with_extension("json")).unwrap()).unwrap();
            assert_eq!(side["n"], 2);
            assert_eq!(side["convention"]["phase"], "paper_phase");
        }
    }
}
