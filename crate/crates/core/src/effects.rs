//! Vathochromic and metameric design on top of the class sampler.
//!
//! Transmittance at unit depth `T₁` follows Beer–Lambert, `T_d = T₁^d`;
//! reflectance inter-reflections follow `R₀^d`. Metamers come from sampling the
//! class with basis colors premultiplied by one illuminant and evaluating the
//! same weights under another.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::PuBasis;
use crate::colorimetry::{integrate_to_xyz, Chromaticity, ColorXyz, Illuminant, SpectralCurve, EQUAL_ENERGY_WHITE};
use crate::error::{Error, Result};
use crate::sampler::{
    achieve_luminance, bary_from_dof, decompose, enclosing_triangles, weights_from_bary, ClassSample, ClassSampler,
    ColorTarget, TrianglePolicy,
};

/// Default reference depth of the representative set.
pub const DEFAULT_REFERENCE_DEPTH: f64 = 10.0;
/// Root of `-ln t = t`; larger unit-depth transmittances give a negative
/// absorption under the single-scattering split.
pub const ABSORPTION_CLAMP_ROOT: f64 = 0.567_143_290_409_783_8;
/// Colors below this magnitude have no chromaticity.
pub const TERMINAL_MAGNITUDE: f64 = 1e-12;

/// `T₁(λ)^d`.
pub fn transmittance_at_depth(t1: &SpectralCurve, depth: f64) -> Result<SpectralCurve> {
    if !(depth >= 0.0) || !depth.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} must be finite and non-negative"
        )));
    }
    t1.check_unit_bounded()?;
    Ok(t1.map(|t| t.clamp(0.0, 1.0).powf(depth)))
}

/// 64 geometric depths from 0.25 to 32, with 1 exactly.
pub fn default_depths() -> Vec<f64> {
    let n = 64;
    let mut depths: Vec<f64> = (0..n).map(|i| 0.25 * 128f64.powf(i as f64 / (n - 1) as f64)).collect();
    if let Some(d) = depths
        .iter_mut()
        .min_by(|a, b| (**a - 1.0).abs().total_cmp(&(**b - 1.0).abs()))
    {
        if (*d - 1.0).abs() < 1e-9 {
            *d = 1.0;
        }
    }
    if !depths.contains(&1.0) {
        depths.push(1.0);
        depths.sort_by(f64::total_cmp);
    }
    depths
}

/// Chromaticity and luminance of `T₁^d` over a list of depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthTrajectory {
    pub depths: Vec<f64>,
    /// `None` where the transmitted color is black (terminal depths).
    pub points: Vec<Option<Chromaticity>>,
    pub luminances: Vec<f64>,
}

impl DepthTrajectory {
    /// Point at the depth closest to `depth`.
    pub fn at(&self, depth: f64) -> Option<Chromaticity> {
        let i = self
            .depths
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - depth).abs().total_cmp(&(b.1 - depth).abs()))?
            .0;
        self.points[i]
    }

    /// CSV rows `d,x,y,Y`; terminal depths leave `x` and `y` empty.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "d,x,y,Y")?;
        for ((d, p), y) in self.depths.iter().zip(&self.points).zip(&self.luminances) {
            match p {
                Some(c) => writeln!(out, "{d},{},{},{y}", c.x, c.y)?,
                None => writeln!(out, "{d},,,{y}")?,
            }
        }
        Ok(())
    }
}

/// Integrates `T₁^d` for every depth. `None` uses the equal-energy illuminant.
pub fn depth_trajectory(
    t1: &SpectralCurve,
    depths: &[f64],
    illuminant: Option<&Illuminant>,
) -> Result<DepthTrajectory> {
    let colors = depths
        .par_iter()
        .map(|&d| integrate_to_xyz(&transmittance_at_depth(t1, d)?, illuminant))
        .collect::<Result<Vec<ColorXyz>>>()?;
    Ok(DepthTrajectory {
        depths: depths.to_vec(),
        points: colors
            .iter()
            .map(|c| {
                if c.magnitude() > TERMINAL_MAGNITUDE {
                    c.chromaticity().ok()
                } else {
                    None
                }
            })
            .collect(),
        luminances: colors.iter().map(|c| c.y).collect(),
    })
}

/// Absorption and scattering per unit length for a medium whose single
/// scattering reproduces `T₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumCoefficients {
    pub sigma_s: SpectralCurve,
    pub sigma_a: SpectralCurve,
    /// Wavelength samples where the raw absorption was negative.
    pub clamped_mask: Vec<bool>,
    pub clamped: bool,
}

/// `σ_s = T₁`, `σ_a = max(0, -ln T₁ - T₁)`.
pub fn medium_coefficients(t1: &SpectralCurve) -> Result<MediumCoefficients> {
    t1.check_unit_bounded()?;
    if let Some(i) = t1.values().iter().position(|t| *t <= 0.0) {
        return Err(Error::InfiniteExtinction {
            wavelength_nm: t1.wavelength(i),
        });
    }
    let raw: Vec<f64> = t1.values().iter().map(|t| t.min(1.0)).map(|t| -t.ln() - t).collect();
    let clamped_mask: Vec<bool> = raw.iter().map(|a| *a < 0.0).collect();
    let sigma_a = SpectralCurve::new(t1.start_nm(), t1.step_nm(), raw.iter().map(|a| a.max(0.0)).collect())?;
    Ok(MediumCoefficients {
        sigma_s: t1.clone(),
        sigma_a,
        clamped: clamped_mask.iter().any(|c| *c),
        clamped_mask,
    })
}

/// One triangle-restricted member of the class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeEntry {
    pub triangle: [usize; 3],
    pub w: Vec<f64>,
    pub luminance_met: bool,
    /// Chromaticity of `T₁^{d_ref}`.
    pub reference_chromaticity: Chromaticity,
    /// Clockwise angle of `reference_chromaticity` around E, in `[0, 2π)`.
    pub hue_angle: f64,
}

/// Class members from every enclosing triangle, ordered clockwise around E
/// by their color at the reference depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeSet {
    pub target: ColorTarget,
    pub reference_depth: f64,
    pub entries: Vec<RepresentativeEntry>,
}

/// Builds the representative set. Transmittances are integrated under the
/// basis illuminant.
pub fn representative_set(basis: &PuBasis, target: &ColorTarget, reference_depth: f64) -> Result<RepresentativeSet> {
    if !(target.luminance > 0.0) {
        return Err(Error::InvalidParameter(
            "representatives need a positive target luminance".into(),
        ));
    }
    let c = target.chromaticity;
    let illuminant = basis.illuminant();
    let mut entries = enclosing_triangles(basis, c)?
        .into_par_iter()
        .map(|triangle| {
            let d = decompose(basis, triangle, c)?;
            let a = bary_from_dof(&d, &vec![0.0; d.dof_count()])?;
            let line = weights_from_bary(basis, &a)?;
            let fit = achieve_luminance(basis, &line, target.luminance)?;
            let t1 = basis.reconstruct_visible(&fit.w)?;
            let color = integrate_to_xyz(&transmittance_at_depth(&t1, reference_depth)?, Some(illuminant))?;
            if !(color.magnitude() > TERMINAL_MAGNITUDE) {
                return Ok(None);
            }
            let reference_chromaticity = color.chromaticity()?;
            Ok(Some(RepresentativeEntry {
                triangle,
                w: fit.w,
                luminance_met: fit.luminance_met,
                reference_chromaticity,
                hue_angle: reference_chromaticity.clockwise_angle_around(&EQUAL_ENERGY_WHITE),
            }))
        })
        .collect::<Result<Vec<Option<RepresentativeEntry>>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    entries.sort_by(|a, b| a.hue_angle.total_cmp(&b.hue_angle).then(a.triangle.cmp(&b.triangle)));
    Ok(RepresentativeSet {
        target: *target,
        reference_depth,
        entries,
    })
}

/// A convex blend of the two entries bracketing a requested hue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HueBlend {
    pub w: Vec<f64>,
    /// Entry weighted by `alpha`.
    pub first: usize,
    /// Entry weighted by `1 - alpha`.
    pub second: usize,
    pub alpha: f64,
}

/// Interpolates the weights of the two entries whose hue angles bracket
/// `hue_angle` (cyclically), linearly in angle.
pub fn pick_by_hue(set: &RepresentativeSet, hue_angle: f64) -> Result<HueBlend> {
    let entries = &set.entries;
    if entries.is_empty() {
        return Err(Error::InvalidParameter("empty representative set".into()));
    }
    let tau = std::f64::consts::TAU;
    let theta = hue_angle.rem_euclid(tau);
    let n = entries.len();
    let single = |i: usize| HueBlend {
        w: entries[i].w.clone(),
        first: i,
        second: i,
        alpha: 1.0,
    };
    if let Some(i) = entries.iter().position(|e| e.hue_angle == theta) {
        return Ok(single(i));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let start = entries[i].hue_angle;
        let gap = (entries[j].hue_angle - start).rem_euclid(tau);
        let offset = (theta - start).rem_euclid(tau);
        if offset < gap {
            let alpha = 1.0 - offset / gap;
            let w = entries[i]
                .w
                .iter()
                .zip(&entries[j].w)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect();
            return Ok(HueBlend {
                w,
                first: i,
                second: j,
                alpha,
            });
        }
    }
    // Every entry shares one angle.
    Ok(single(0))
}

/// Chromaticity of `R₀^order` under `illuminant` (equal energy by default).
pub fn schlick_order(r0: &SpectralCurve, order: u32, illuminant: Option<&Illuminant>) -> Result<Chromaticity> {
    if order < 1 {
        return Err(Error::InvalidParameter(
            "inter-reflection order must be at least 1".into(),
        ));
    }
    integrate_to_xyz(&transmittance_at_depth(r0, order as f64)?, illuminant)?.chromaticity()
}

/// A metamer: its weights and its colors under both illuminants, integrated
/// from the reconstructed spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetamerPaletteEntry {
    pub w: Vec<f64>,
    pub color_under_first: ColorXyz,
    pub color_under_second: ColorXyz,
    pub stream: u64,
}

/// Palette request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaletteSettings {
    pub count: usize,
    pub seed: u64,
    /// Upper bound on drawn samples, rejected ones included.
    pub max_draws: usize,
    /// Keep samples whose target luminance was out of reach.
    pub keep_unmet: bool,
    pub policy: TrianglePolicy,
}

impl PaletteSettings {
    pub fn new(count: usize, seed: u64) -> Self {
        PaletteSettings {
            count,
            seed,
            max_draws: count.saturating_mul(1000).max(10_000),
            keep_unmet: false,
            policy: TrianglePolicy::Random,
        }
    }
}

fn palette_entry(
    basis: &PuBasis,
    first: &Illuminant,
    second: &Illuminant,
    sample: &ClassSample,
) -> Result<MetamerPaletteEntry> {
    let spectrum = basis.reconstruct_visible(&sample.w)?;
    Ok(MetamerPaletteEntry {
        color_under_first: integrate_to_xyz(&spectrum, Some(first))?,
        color_under_second: integrate_to_xyz(&spectrum, Some(second))?,
        w: sample.w.clone(),
        stream: sample.stream,
    })
}

/// Samples the class of `target` with basis colors premultiplied by `first`
/// and reports each member under both illuminants with the original basis.
/// Samples that miss the target luminance are skipped unless `keep_unmet`.
pub fn metameric_palette(
    basis: &PuBasis,
    first: &Illuminant,
    second: &Illuminant,
    target: &ColorTarget,
    settings: &PaletteSettings,
) -> Result<Vec<MetamerPaletteEntry>> {
    let premultiplied = basis.with_illuminant(first)?;
    let sampler = ClassSampler::new(&premultiplied, *target)?;
    let mut entries = Vec::with_capacity(settings.count);
    let batch = settings.count.max(64);
    let mut drawn = 0usize;
    while entries.len() < settings.count && drawn < settings.max_draws {
        let end = (drawn + batch).min(settings.max_draws);
        let samples = (drawn as u64..end as u64)
            .into_par_iter()
            .map(|i| sampler.sample_one(settings.seed, i, settings.policy))
            .collect::<Result<Vec<_>>>()?;
        drawn = end;
        for s in samples {
            if entries.len() == settings.count {
                break;
            }
            if s.luminance_met || settings.keep_unmet {
                entries.push(palette_entry(basis, first, second, &s)?);
            }
        }
    }
    if entries.len() < settings.count {
        return Err(Error::Infeasible(format!(
            "only {} of {} palette entries reach the target luminance after {} draws",
            entries.len(),
            settings.count,
            drawn
        )));
    }
    Ok(entries)
}

/// Largest chromaticity distance between any two entries under the second
/// illuminant.
pub fn palette_spread(entries: &[MetamerPaletteEntry]) -> f64 {
    let points: Vec<Chromaticity> = entries
        .iter()
        .filter_map(|e| e.color_under_second.chromaticity().ok())
        .collect();
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(a.distance(b));
        }
    }
    best
}
