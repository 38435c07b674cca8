//! PNG loading and saving for saliency maps, depth maps, and element masks.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use image::DynamicImage;
use sara_core::sara::ElementMask;
use sara_core::{DepthMap, SaliencyMap};

/// A grayscale raster read from disk.
#[derive(Debug)]
pub struct LoadedGray {
    pub map: SaliencyMap,
    /// Set when the file was not grayscale and got converted via Rec. 601
    /// luma; callers surface this as a warning.
    pub converted_from_color: bool,
}

/// Loads a raster as an 8-bit grayscale map at its native size.
///
/// Grayscale files (with or without alpha) are taken as-is; color files are
/// converted with Rec. 601 luma and flagged.
pub fn load_gray(path: &Path) -> Result<LoadedGray> {
    let img = image::open(path).with_context(|| format!("reading image {}", path.display()))?;
    let (gray, converted) = match img {
        DynamicImage::ImageLuma8(g) => (g, false),
        DynamicImage::ImageLumaA8(ga) => {
            let mut g = image::GrayImage::new(ga.width(), ga.height());
            for (out, px) in g.pixels_mut().zip(ga.pixels()) {
                out.0 = [px.0[0]];
            }
            (g, false)
        }
        other => {
            let rgb = other.to_rgb8();
            let mut g = image::GrayImage::new(rgb.width(), rgb.height());
            for (out, px) in g.pixels_mut().zip(rgb.pixels()) {
                out.0 = [sara_core::map::luma_u8(px.0[0], px.0[1], px.0[2])];
            }
            (g, true)
        }
    };
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let map = SaliencyMap::new(w, h, gray.into_raw())
        .with_context(|| format!("wrapping image {}", path.display()))?;
    Ok(LoadedGray {
        map,
        converted_from_color: converted,
    })
}

/// Loads a saliency map and resamples it to the target dimensions.
pub fn load_saliency_map(path: &Path, target_w: usize, target_h: usize) -> Result<LoadedGray> {
    let loaded = load_gray(path)?;
    let map = loaded
        .map
        .resampled(target_w, target_h)
        .with_context(|| format!("resampling {}", path.display()))?;
    Ok(LoadedGray {
        map,
        converted_from_color: loaded.converted_from_color,
    })
}

/// Loads a depth map (bright = near), resampled and rescaled to `[0, 1]`.
pub fn load_depth_map(path: &Path, target_w: usize, target_h: usize) -> Result<(DepthMap, bool)> {
    let loaded = load_saliency_map(path, target_w, target_h)?;
    let depth = DepthMap::from_gray(target_w, target_h, loaded.map.values())
        .with_context(|| format!("converting depth map {}", path.display()))?;
    Ok((depth, loaded.converted_from_color))
}

/// Loads an image as interleaved 8-bit RGB.
pub fn load_rgb(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let img = image::open(path).with_context(|| format!("reading image {}", path.display()))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    Ok((w, h, rgb.into_raw()))
}

/// Writes a saliency map as an 8-bit grayscale PNG.
pub fn save_gray_png(path: &Path, map: &SaliencyMap) -> Result<()> {
    let img = image::GrayImage::from_raw(
        map.width() as u32,
        map.height() as u32,
        map.values().to_vec(),
    )
    .expect("map dimensions match its buffer");
    img.save(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes interleaved 8-bit RGB as a PNG.
pub fn save_rgb_png(path: &Path, width: usize, height: usize, rgb: Vec<u8>) -> Result<()> {
    let img = image::RgbImage::from_raw(width as u32, height as u32, rgb)
        .context("RGB buffer does not match dimensions")?;
    img.save(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Loads every `*.png` in a directory as an element mask.
///
/// The file stem names the element; any pixel brighter than zero is part of
/// it. Masks are returned sorted by id and must match the expected
/// dimensions.
pub fn load_masks_dir(
    dir: &Path,
    expect_w: usize,
    expect_h: usize,
) -> Result<(Vec<ElementMask>, Vec<String>)> {
    let entries = fs::read_dir(dir).with_context(|| format!("reading mask directory {}", dir.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("mask directory {} contains no PNG files", dir.display());
    }
    let mut masks = Vec::with_capacity(paths.len());
    let mut warnings = Vec::new();
    for path in paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .with_context(|| format!("mask file {} has no usable stem", path.display()))?
            .to_string();
        let loaded = load_gray(&path)?;
        if loaded.converted_from_color {
            warnings.push(format!(
                "mask {} was not grayscale; converted via Rec. 601 luma",
                path.display()
            ));
        }
        if loaded.map.width() != expect_w || loaded.map.height() != expect_h {
            bail!(
                "mask {} is {}x{}, expected {}x{}",
                path.display(),
                loaded.map.width(),
                loaded.map.height(),
                expect_w,
                expect_h
            );
        }
        let pixels = loaded.map.values().iter().map(|&v| v > 0).collect();
        let mask = ElementMask::new(id, expect_w, expect_h, pixels)
            .with_context(|| format!("mask {}", path.display()))?;
        masks.push(mask);
    }
    Ok((masks, warnings))
}
