//! Expressivity and smoothness of a basis, and the warp parameter search.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisConfig, PuBasis, WarpParams, DEFAULT_BOUNDARY_OFFSET_NM};
use crate::colorimetry::{spectral_locus, GamutPolygon, RgbSpace};
use crate::error::{Error, Result};

/// Sampling step of the half-maximum search.
pub const FWHM_STEP_NM: f64 = 0.1;
/// Default lower bound on the narrowest basis width.
pub const DEFAULT_SMOOTHNESS_NM: f64 = 20.0;
/// Default search grid size per axis.
pub const DEFAULT_GRID: usize = 64;

/// Full width at half maximum of `B_k` over its whole support, measured on a
/// 0.1 nm grid with linear interpolation of the outermost crossings.
pub fn fwhm(basis: &PuBasis, k: usize) -> Result<f64> {
    if k >= basis.count() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: basis.count(),
        });
    }
    let spline = basis.spline();
    let (lo, hi) = spline.support(k);
    let n = ((hi - lo) / FWHM_STEP_NM).ceil() as usize;
    let samples: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let x = (lo + i as f64 * FWHM_STEP_NM).min(hi);
            (x, spline.eval(k, x).unwrap_or(0.0))
        })
        .collect();
    let peak = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let half = 0.5 * peak;
    let first = samples.iter().position(|s| s.1 >= half).expect("peak sample");
    let last = samples.iter().rposition(|s| s.1 >= half).expect("peak sample");
    let cross = |a: (f64, f64), b: (f64, f64)| a.0 + (half - a.1) / (b.1 - a.1) * (b.0 - a.0);
    let left = if first == 0 {
        samples[0].0
    } else {
        cross(samples[first - 1], samples[first])
    };
    let right = if last + 1 == samples.len() {
        samples[last].0
    } else {
        cross(samples[last], samples[last + 1])
    };
    Ok(right - left)
}

/// `min_k FWHM_k`.
pub fn smoothness(basis: &PuBasis) -> Result<f64> {
    (0..basis.count()).try_fold(f64::INFINITY, |m, k| Ok(m.min(fwhm(basis, k)?)))
}

/// Signed area between a gamut and a convex RGB triangle, normalized by the
/// area between the spectral locus and the triangle.
pub fn excess_area(gamut: &GamutPolygon, rgb: &GamutPolygon, locus: &GamutPolygon) -> Result<f64> {
    if !rgb.is_convex() {
        return Err(Error::DegeneratePolygon("RGB gamut must be convex".into()));
    }
    let normalizer = locus.area() - rgb.area();
    if !(normalizer > 0.0) {
        return Err(Error::DegeneratePolygon(
            "spectral locus does not enclose more area than the RGB gamut".into(),
        ));
    }
    let gamut = gamut.counter_clockwise();
    if !(gamut.area() > 0.0) {
        return Err(Error::DegeneratePolygon("gamut has zero area".into()));
    }
    let shared = gamut.intersection_area_convex(rgb);
    let outside = gamut.area() - shared;
    let missing = rgb.area() - shared;
    Ok((outside - missing) / normalizer)
}

/// Expressivity and smoothness of one basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignMetrics {
    pub excess_area: f64,
    pub smoothness_nm: f64,
}

/// Metrics of `basis` against `rgb`.
pub fn design_metrics(basis: &PuBasis, rgb: RgbSpace) -> Result<DesignMetrics> {
    let locus = spectral_locus(1)?;
    Ok(DesignMetrics {
        excess_area: excess_area(&basis.basis_gamut(), &rgb.gamut(), &locus)?,
        smoothness_nm: smoothness(basis)?,
    })
}

/// Side of the smoothness threshold that a candidate must be on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintDirection {
    /// `min FWHM ≥ threshold`.
    #[default]
    AtLeast,
    /// `min FWHM < threshold`.
    Below,
}

impl ConstraintDirection {
    pub fn admits(self, smoothness_nm: f64, threshold_nm: f64) -> bool {
        match self {
            ConstraintDirection::AtLeast => smoothness_nm >= threshold_nm,
            ConstraintDirection::Below => smoothness_nm < threshold_nm,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintDirection::AtLeast => "at-least",
            ConstraintDirection::Below => "below",
        }
    }
}

impl fmt::Display for ConstraintDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstraintDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "at-least" | "atleast" | "ge" | ">=" => Ok(ConstraintDirection::AtLeast),
            "below" | "lt" | "<" => Ok(ConstraintDirection::Below),
            _ => Err(Error::UnknownName {
                kind: "constraint direction",
                name: s.to_string(),
            }),
        }
    }
}

/// Search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpSearch {
    pub count: usize,
    pub rgb: RgbSpace,
    pub threshold_nm: f64,
    pub direction: ConstraintDirection,
    pub grid_s: usize,
    pub grid_p: usize,
    pub boundary_offset_nm: f64,
}

impl WarpSearch {
    pub fn new(count: usize) -> Self {
        WarpSearch {
            count,
            rgb: RgbSpace::Srgb,
            threshold_nm: DEFAULT_SMOOTHNESS_NM,
            direction: ConstraintDirection::AtLeast,
            grid_s: DEFAULT_GRID,
            grid_p: DEFAULT_GRID,
            boundary_offset_nm: DEFAULT_BOUNDARY_OFFSET_NM,
        }
    }

    /// Strength samples `i / n`, `i < n`. The strength 1 is left out since it
    /// collapses every knot onto `p`.
    pub fn s_values(&self) -> Vec<f64> {
        (0..self.grid_s).map(|i| i as f64 / self.grid_s as f64).collect()
    }

    /// Position samples at cell centres of `(0, 1)`.
    pub fn p_values(&self) -> Vec<f64> {
        (0..self.grid_p)
            .map(|j| (j as f64 + 0.5) / self.grid_p as f64)
            .collect()
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub s: f64,
    pub p: f64,
    pub metrics: DesignMetrics,
}

/// Search result: the chosen warp plus the full metric maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpOptimum {
    pub warp: WarpParams,
    pub metrics: DesignMetrics,
    /// Row-major over `s`, then `p`.
    pub cells: Vec<GridCell>,
}

/// Warp used when a caller asks for a "warped" basis of `count` functions:
/// the grid optima under the default constraint, and no warp where none is
/// tabulated.
pub fn recommended_warp(count: usize) -> WarpParams {
    match count {
        7 => WarpParams { s: 0.66, p: 0.39 },
        9 => WarpParams {
            s: 0.531_25,
            p: 0.367_187_5,
        },
        11 => WarpParams {
            s: 0.406_25,
            p: 0.367_187_5,
        },
        _ => WarpParams::identity(),
    }
}

/// Metrics of one warp.
pub fn evaluate_warp(count: usize, warp: WarpParams, rgb: RgbSpace, offset_nm: f64) -> Result<DesignMetrics> {
    let basis = PuBasis::new(BasisConfig::new(count, warp, offset_nm))?;
    design_metrics(&basis, rgb)
}

/// Brute-force grid search for the warp maximizing the excess area subject to
/// the smoothness constraint. Ties keep the first cell in row-major order.
pub fn optimize_warp(search: &WarpSearch) -> Result<WarpOptimum> {
    if search.count < 4 {
        return Err(Error::InvalidParameter(format!(
            "warp search needs at least 4 bases, got {}",
            search.count
        )));
    }
    if search.grid_s == 0 || search.grid_p == 0 {
        return Err(Error::InvalidParameter(
            "grid must have at least one cell per axis".into(),
        ));
    }
    let points: Vec<(f64, f64)> = search
        .s_values()
        .into_iter()
        .flat_map(|s| search.p_values().into_iter().map(move |p| (s, p)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(s, p)| {
            let metrics = evaluate_warp(
                search.count,
                WarpParams::new(s, p)?,
                search.rgb,
                search.boundary_offset_nm,
            )?;
            Ok(GridCell { s, p, metrics })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = cells
        .iter()
        .filter(|c| search.direction.admits(c.metrics.smoothness_nm, search.threshold_nm))
        .fold(None::<&GridCell>, |best, c| match best {
            Some(b) if b.metrics.excess_area >= c.metrics.excess_area => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::ConstraintInfeasible)?;
    Ok(WarpOptimum {
        warp: WarpParams { s: best.s, p: best.p },
        metrics: best.metrics,
        cells,
    })
}

/// Metric maps as CSV rows `s,p,excess_area,smoothness_nm`.
pub fn write_metrics_csv(cells: &[GridCell], mut out: impl Write) -> Result<()> {
    writeln!(out, "s,p,excess_area,smoothness_nm")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{}",
            c.s, c.p, c.metrics.excess_area, c.metrics.smoothness_nm
        )?;
    }
    Ok(())
}
