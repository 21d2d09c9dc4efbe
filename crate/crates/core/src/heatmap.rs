//! Diverging-colour heatmaps of coefficient grids as 8-bit RGB PNG.

use std::path::Path;

use crate::analysis::SIGN_THRESHOLD;
use crate::analytic::CoefficientMatrix;
use crate::error::{HgError, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeatmapStyle {
    pub width_px: u32,
    pub height_px: u32,
}

impl HeatmapStyle {
    /// Square cells of `px` pixels.
    pub fn cells(m: &CoefficientMatrix, px: u32) -> Self {
        let side = px * m.dim() as u32;
        Self {
            width_px: side,
            height_px: side,
        }
    }
}

/// Blue at `lo`, white at 0, red at `hi`; `lo ≤ 0 ≤ hi`.
pub fn diverging_color(x: f64, lo: f64, hi: f64) -> [u8; 3] {
    let t = if x >= 0.0 {
        if hi > 0.0 { (x / hi).min(1.0) } else { 0.0 }
    } else if lo < 0.0 {
        -(x / lo).min(1.0)
    } else {
        0.0
    };
    let fade = |u: f64| (255.0 * (1.0 - u.abs())).round() as u8;
    if t >= 0.0 {
        [255, fade(t), fade(t)]
    } else {
        [fade(t), fade(t), 255]
    }
}

/// Row-major RGB pixels, top row first. `a` runs left to right and `b`
/// bottom to top. Entries within `SIGN_THRESHOLD` of zero render white.
pub fn render_rgb(m: &CoefficientMatrix, style: HeatmapStyle) -> Result<Vec<u8>> {
    if m.dim() == 0 || style.width_px == 0 || style.height_px == 0 {
        return Err(HgError::Precondition("heatmap needs a non-empty matrix and image".into()));
    }
    // roundoff-level entries would otherwise pin the blue end to ~1e-16
    let cut = SIGN_THRESHOLD * m.max_abs();
    let values = m.entries.map(|x| if x.abs() <= cut { 0.0 } else { x });
    let lo = values.iter().fold(0.0f64, |acc, &x| acc.min(x));
    let hi = values.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let dim = m.dim() as u64;
    let (w, h) = (style.width_px as u64, style.height_px as u64);
    let mut px = Vec::with_capacity((w * h * 3) as usize);
    for y in 0..h {
        let b = ((h - 1 - y) * dim / h) as usize;
        for x in 0..w {
            let a = (x * dim / w) as usize;
            px.extend_from_slice(&diverging_color(values[(a, b)], lo, hi));
        }
    }
    Ok(px)
}

pub fn encode_png(m: &CoefficientMatrix, style: HeatmapStyle) -> Result<Vec<u8>> {
    let pixels = render_rgb(m, style)?;
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, style.width_px, style.height_px);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&pixels)?;
    }
    Ok(out)
}

pub fn render_heatmap(m: &CoefficientMatrix, style: HeatmapStyle, path: &Path) -> Result<()> {
    write_atomic(path, &encode_png(m, style)?)
}
