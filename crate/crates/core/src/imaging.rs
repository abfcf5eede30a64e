//! Flat-lit Lambertian image pairs: hidden patterns and hidden images that
//! look uniform under one illuminant and reveal themselves under another.

use std::path::Path;

use image::{GrayImage, Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{PuBasis, QuadraticBSpline};
use crate::colorimetry::{encode_srgb, integrate_to_xyz, quantize, xyz_to_linear_srgb, Chromaticity, Illuminant};
use crate::effects::{metameric_palette, MetamerPaletteEntry, PaletteSettings};
use crate::error::{Error, Result};
use crate::sampler::{ColorTarget, LUMINANCE_TOL};

/// Palette size of the hidden-image blend.
pub const DEFAULT_BLEND_COUNT: usize = 8;

/// Encoded sRGB triple in `[0, 1]` of a Lambertian surface with albedo
/// `Σ w_k B_k` lit by `illuminant`.
pub fn lambertian_color(basis: &PuBasis, w: &[f64], illuminant: &Illuminant) -> Result<[f64; 3]> {
    let spectrum = basis.reconstruct_visible(w)?;
    let xyz = integrate_to_xyz(&spectrum, Some(illuminant))?;
    Ok(encode_srgb(xyz_to_linear_srgb(xyz)))
}

/// [`lambertian_color`] quantized to 8 bits.
pub fn lambertian_pixel(basis: &PuBasis, w: &[f64], illuminant: &Illuminant) -> Result<[u8; 3]> {
    Ok(quantize(lambertian_color(basis, w, illuminant)?))
}

/// Binary mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::LengthMismatch {
                expected: width as usize * height as usize,
                found: bits.len(),
            });
        }
        Ok(Mask { width, height, bits })
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Mask { width, height, bits }
    }

    /// Pixels brighter than half scale are set.
    pub fn from_gray(img: &GrayImage) -> Self {
        let bits = img.pixels().map(|p| p.0[0] as f64 / 255.0 > 0.5).collect();
        Mask {
            width: img.width(),
            height: img.height(),
            bits,
        }
    }

    /// Reads any image and thresholds its luma.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_gray(&image::open(path)?.to_luma8()))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Renders of one scene under the two illuminants.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePair {
    pub first: RgbImage,
    pub second: RgbImage,
}

fn render_indexed(width: u32, height: u32, colors: &[[u8; 3]], index: impl Fn(u32, u32) -> usize + Sync) -> RgbImage {
    let mut img = RgbImage::new(width, height);
    img.par_chunks_mut(3 * width as usize).enumerate().for_each(|(y, row)| {
        for (x, px) in row.chunks_mut(3).enumerate() {
            px.copy_from_slice(&colors[index(x as u32, y as u32)]);
        }
    });
    img
}

/// Pixels where the mask is set use `w_set`, the others `w_clear`.
pub fn hidden_pattern(
    mask: &Mask,
    w_clear: &[f64],
    w_set: &[f64],
    basis: &PuBasis,
    first: &Illuminant,
    second: &Illuminant,
) -> Result<ImagePair> {
    if w_clear.len() != w_set.len() {
        return Err(Error::LengthMismatch {
            expected: w_clear.len(),
            found: w_set.len(),
        });
    }
    let render = |ill: &Illuminant| -> Result<RgbImage> {
        let colors = [
            lambertian_pixel(basis, w_clear, ill)?,
            lambertian_pixel(basis, w_set, ill)?,
        ];
        Ok(render_indexed(mask.width, mask.height, &colors, |x, y| {
            mask.get(x, y) as usize
        }))
    };
    Ok(ImagePair {
        first: render(first)?,
        second: render(second)?,
    })
}

/// Absolute difference, per channel and in `[0, 1]` units, between the mean
/// colors of the set and clear regions. Zero when a region is empty.
pub fn region_difference(img: &RgbImage, mask: &Mask) -> [f64; 3] {
    let mut sums = [[0.0f64; 3]; 2];
    let mut counts = [0usize; 2];
    for (x, y, px) in img.enumerate_pixels() {
        let r = mask.get(x, y) as usize;
        counts[r] += 1;
        for c in 0..3 {
            sums[r][c] += px.0[c] as f64 / 255.0;
        }
    }
    if counts[0] == 0 || counts[1] == 0 {
        return [0.0; 3];
    }
    std::array::from_fn(|c| (sums[1][c] / counts[1] as f64 - sums[0][c] / counts[0] as f64).abs())
}

/// The two palette entries whose colors under the second illuminant are
/// furthest apart.
pub fn most_distinct_pair(entries: &[MetamerPaletteEntry]) -> Result<(usize, usize)> {
    let points: Vec<Option<Chromaticity>> = entries
        .iter()
        .map(|e| e.color_under_second.chromaticity().ok())
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if let (Some(a), Some(b)) = (points[i], points[j]) {
                let d = a.distance(&b);
                if best.is_none_or(|(bd, _, _)| d > bd) {
                    best = Some((d, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
        .ok_or_else(|| Error::InvalidParameter("need at least two palette entries".into()))
}

/// Two metamers for a hidden pattern, at a common luminance under the first
/// illuminant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetamerPair {
    pub clear: Vec<f64>,
    pub set: Vec<f64>,
    /// Shared luminance under the first illuminant.
    pub luminance: f64,
    /// Whether that luminance is the requested one.
    pub luminance_met: bool,
    /// Chromaticity distance of the pair under the second illuminant.
    pub separation: f64,
}

/// Draws a palette of `pool` class members (luminance misses included) and
/// keeps the pair chosen by [`equalized_pair`].
pub fn metamer_pair(
    basis: &PuBasis,
    first: &Illuminant,
    second: &Illuminant,
    target: &ColorTarget,
    pool: usize,
    seed: u64,
) -> Result<MetamerPair> {
    let mut settings = PaletteSettings::new(pool, seed);
    settings.keep_unmet = true;
    let entries = metameric_palette(basis, first, second, target, &settings)?;
    equalized_pair(basis, second, &entries, target.luminance)
}

/// The pair of entries whose colors under `second` differ most in linear
/// sRGB once both are scaled to their common (dimmer) luminance under the
/// first illuminant. The scaled pair are exact metamers under the first.
pub fn equalized_pair(
    basis: &PuBasis,
    second: &Illuminant,
    entries: &[MetamerPaletteEntry],
    target_luminance: f64,
) -> Result<MetamerPair> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let (a, b) = (&entries[i], &entries[j]);
            let y = a.color_under_first.y.min(b.color_under_first.y);
            if !(y > 0.0) {
                continue;
            }
            let ra = xyz_to_linear_srgb(a.color_under_second.scale(y / a.color_under_first.y));
            let rb = xyz_to_linear_srgb(b.color_under_second.scale(y / b.color_under_first.y));
            let score = (0..3).map(|c| (ra[c] - rb[c]).abs()).fold(0.0, f64::max);
            if best.is_none_or(|(s, _, _)| score > s) {
                best = Some((score, i, j));
            }
        }
    }
    let (_, i, j) = best.ok_or_else(|| Error::Infeasible("no metamer pair with positive luminance".into()))?;
    let (a, b) = (&entries[i], &entries[j]);
    let luminance = a.color_under_first.y.min(b.color_under_first.y);
    let scaled = |e: &MetamerPaletteEntry| -> Vec<f64> {
        let f = luminance / e.color_under_first.y;
        e.w.iter().map(|v| v * f).collect()
    };
    let clear = scaled(a);
    let set = scaled(b);
    let under_second = basis.with_illuminant(second)?;
    let separation = under_second
        .color_of(&clear)?
        .chromaticity()?
        .distance(&under_second.color_of(&set)?.chromaticity()?);
    Ok(MetamerPair {
        clear,
        set,
        luminance,
        luminance_met: (luminance - target_luminance).abs() <= LUMINANCE_TOL,
        separation,
    })
}

/// Illuminant whose luminance orders the hidden-image palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LuminanceRank {
    /// Luminance under the hiding illuminant; the image then shows as a
    /// luminance gradient there too.
    First,
    /// Luminance under the revealing illuminant; all entries are exact
    /// metamers under the first.
    #[default]
    Second,
}

fn ranked_luminance(entry: &MetamerPaletteEntry, rank: LuminanceRank) -> f64 {
    match rank {
        LuminanceRank::First => entry.color_under_first.y,
        LuminanceRank::Second => entry.color_under_second.y,
    }
}

/// Picks `n` entries with luminances spread as evenly as possible: the
/// darkest and brightest, then repeatedly the entry furthest (in luminance)
/// from those already taken. Returned in increasing luminance.
pub fn select_by_luminance(
    entries: &[MetamerPaletteEntry],
    n: usize,
    rank: LuminanceRank,
) -> Result<Vec<MetamerPaletteEntry>> {
    if n < 2 || entries.len() < n {
        return Err(Error::InvalidParameter(format!(
            "cannot pick {n} entries out of {}",
            entries.len()
        )));
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| ranked_luminance(&entries[a], rank).total_cmp(&ranked_luminance(&entries[b], rank)));
    let lum = |i: usize| ranked_luminance(&entries[i], rank);
    let mut chosen = vec![order[0], order[order.len() - 1]];
    while chosen.len() < n {
        let next = order
            .iter()
            .copied()
            .filter(|i| !chosen.contains(i))
            .max_by(|&a, &b| {
                let gap = |i: usize| {
                    chosen
                        .iter()
                        .map(|&c| (lum(i) - lum(c)).abs())
                        .fold(f64::INFINITY, f64::min)
                };
                gap(a).total_cmp(&gap(b)).then(b.cmp(&a))
            })
            .expect("enough candidates");
        chosen.push(next);
    }
    chosen.sort_by(|&a, &b| lum(a).total_cmp(&lum(b)));
    Ok(chosen.into_iter().map(|i| entries[i].clone()).collect())
}

/// Weights for each of the 256 gray levels: a convex blend of the palette
/// through a uniform quadratic partition of unity on `[0, 1]`.
pub fn blend_levels(palette: &[MetamerPaletteEntry], count: usize) -> Result<Vec<Vec<f64>>> {
    if let Some(e) = palette.iter().find(|e| e.w.len() != count) {
        return Err(Error::LengthMismatch {
            expected: count,
            found: e.w.len(),
        });
    }
    let blend = QuadraticBSpline::uniform_clamped(0.0, 1.0, palette.len())?;
    Ok((0..=255u32)
        .map(|v| {
            let beta = blend.eval_all(v as f64 / 255.0);
            (0..count)
                .map(|k| beta.iter().zip(palette).map(|(b, e)| b * e.w[k]).sum())
                .collect()
        })
        .collect())
}

/// Per-pixel palette blend driven by the gray level through a uniform
/// quadratic partition of unity on `[0, 1]`.
pub fn hidden_image(
    gray: &GrayImage,
    palette: &[MetamerPaletteEntry],
    rank: LuminanceRank,
    basis: &PuBasis,
    first: &Illuminant,
    second: &Illuminant,
    expected_len: usize,
) -> Result<ImagePair> {
    if palette.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            found: palette.len(),
        });
    }
    if palette
        .windows(2)
        .any(|p| !(ranked_luminance(&p[1], rank) > ranked_luminance(&p[0], rank)))
    {
        return Err(Error::InvalidParameter(
            "palette luminances must be strictly increasing".into(),
        ));
    }
    let levels = blend_levels(palette, basis.count())?;
    let render = |ill: &Illuminant| -> Result<RgbImage> {
        let colors = levels
            .iter()
            .map(|w| lambertian_pixel(basis, w, ill))
            .collect::<Result<Vec<_>>>()?;
        Ok(render_indexed(gray.width(), gray.height(), &colors, |x, y| {
            gray.get_pixel(x, y).0[0] as usize
        }))
    };
    Ok(ImagePair {
        first: render(first)?,
        second: render(second)?,
    })
}

fn decode_channel(v: u8) -> f64 {
    let v = v as f64 / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// Relative luminance of an encoded sRGB pixel.
pub fn pixel_luminance(px: &Rgb<u8>) -> f64 {
    let [r, g, b] = px.0.map(decode_channel);
    0.2126 * r + 0.7152 * g + 0.0722 * b
}

/// Pearson correlation between an image's luminance and a gray image; zero
/// when either is constant.
pub fn luminance_correlation(img: &RgbImage, gray: &GrayImage) -> f64 {
    let a: Vec<f64> = img.pixels().map(pixel_luminance).collect();
    let b: Vec<f64> = gray.pixels().map(|p| p.0[0] as f64).collect();
    let n = a.len().min(b.len()) as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// Reads any image as 8-bit gray.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    Ok(image::open(path)?.to_luma8())
}

pub fn save_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    img.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}
