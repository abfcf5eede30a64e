//! Warped quadratic B-spline partitions of unity over the visible interval.

use serde::{Deserialize, Serialize};

use crate::colorimetry::{
    visible_wavelengths, Chromaticity, ColorXyz, GamutPolygon, Illuminant, SpectralCurve, VISIBLE_END_NM, VISIBLE_LEN,
    VISIBLE_START_NM,
};
use crate::error::{Error, Result};

/// Spline degree used throughout.
pub const DEGREE: usize = 2;

/// Default displacement of the outer boundary knots outside the visible interval.
pub const DEFAULT_BOUNDARY_OFFSET_NM: f64 = 100.0;

/// Strength `s ∈ [0, 1]` and position `p ∈ (0, 1)` of the knot warp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpParams {
    pub s: f64,
    pub p: f64,
}

impl WarpParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        let w = WarpParams { s, p };
        w.validate()?;
        Ok(w)
    }

    /// No warping.
    pub const fn identity() -> Self {
        WarpParams { s: 0.0, p: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.s) {
            return Err(Error::InvalidParameter(format!(
                "warp strength s = {} is outside [0, 1]",
                self.s
            )));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "warp position p = {} is outside (0, 1)",
                self.p
            )));
        }
        Ok(())
    }

    fn exponent(&self) -> f64 {
        2.0 / (1.0 + self.s) - 1.0
    }
}

impl Default for WarpParams {
    fn default() -> Self {
        Self::identity()
    }
}

/// Two-piece power warp of the unit interval. Fixes 0, `p` and 1.
pub fn warp(params: WarpParams, x: f64) -> f64 {
    let c = params.exponent();
    let p = params.p;
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if x <= p {
        x.powf(c) / p.powf(c - 1.0)
    } else {
        1.0 - (1.0 - x).powf(c) / (1.0 - p).powf(c - 1.0)
    }
}

/// Full knot vector (length `count + 3`) over `[start, end]`.
///
/// The `count - 1` breakpoints are warped uniform samples of the interval.
/// Boundary breakpoints are tripled, then the outer two copies at each end are
/// moved `boundary_offset` outside the interval.
pub fn build_knots_on(
    start: f64,
    end: f64,
    count: usize,
    params: WarpParams,
    boundary_offset: f64,
) -> Result<Vec<f64>> {
    if count < 3 {
        return Err(Error::InvalidParameter(format!(
            "a quadratic partition of unity needs at least 3 bases, got {count}"
        )));
    }
    params.validate()?;
    if !(boundary_offset >= 0.0) || !boundary_offset.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "boundary offset {boundary_offset} must be finite and non-negative"
        )));
    }
    let segments = count - 2;
    let breakpoints: Vec<f64> = (0..=segments)
        .map(|k| {
            if k == 0 {
                start
            } else if k == segments {
                end
            } else {
                start + warp(params, k as f64 / segments as f64) * (end - start)
            }
        })
        .collect();
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "warp (s = {}, p = {}) collapses knots for {count} bases",
            params.s, params.p
        )));
    }
    let mut knots = Vec::with_capacity(count + 3);
    knots.extend([start - boundary_offset; 2]);
    knots.extend_from_slice(&breakpoints);
    knots.extend([end + boundary_offset; 2]);
    debug_assert_eq!(knots.len(), count + 3);
    Ok(knots)
}

/// Knot vector over the visible interval.
pub fn build_knots(count: usize, params: WarpParams, boundary_offset_nm: f64) -> Result<Vec<f64>> {
    build_knots_on(VISIBLE_START_NM, VISIBLE_END_NM, count, params, boundary_offset_nm)
}

/// Quadratic B-spline basis on an arbitrary non-decreasing knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticBSpline {
    knots: Vec<f64>,
}

impl QuadraticBSpline {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < DEGREE + 2 {
            return Err(Error::InvalidParameter("too few knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidParameter("knots must be non-decreasing".into()));
        }
        if knots.windows(DEGREE + 2).any(|w| w[DEGREE + 1] == w[0]) {
            return Err(Error::InvalidParameter("knot multiplicity exceeds degree + 1".into()));
        }
        Ok(QuadraticBSpline { knots })
    }

    /// Clamped uniform basis of `count` functions on `[start, end]`.
    pub fn uniform_clamped(start: f64, end: f64, count: usize) -> Result<Self> {
        Self::new(build_knots_on(start, end, count, WarpParams::identity(), 0.0)?)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn count(&self) -> usize {
        self.knots.len() - DEGREE - 1
    }

    /// Index `j` of the knot span `[t_j, t_{j+1})` containing `x`. The last
    /// non-empty span is closed on the right. `None` outside the knot range.
    fn span(&self, x: f64) -> Option<usize> {
        let t = &self.knots;
        let last_knot = t[t.len() - 1];
        if !(x >= t[0] && x <= last_knot) {
            return None;
        }
        if x == last_knot {
            return (0..t.len() - 1).rev().find(|&j| t[j] < t[j + 1]);
        }
        Some(t.partition_point(|&k| k <= x) - 1)
    }

    /// The (up to three) non-zero basis values at `x`, as `(first index, values)`.
    /// Basis functions with indices outside `[0, count)` are omitted.
    pub fn eval_nonzero(&self, x: f64) -> Option<(isize, [f64; 3])> {
        let j = self.span(x)?;
        let t = &self.knots;
        let knot = |i: isize| -> f64 { t[i.clamp(0, t.len() as isize - 1) as usize] };
        let j = j as isize;
        // Cox–de Boor triangle for N_{j-2}, N_{j-1}, N_j.
        let mut n = [1.0, 0.0, 0.0];
        let mut left = [0.0; 3];
        let mut right = [0.0; 3];
        for d in 1..=DEGREE {
            left[d] = x - knot(j + 1 - d as isize);
            right[d] = knot(j + d as isize) - x;
            let mut saved = 0.0;
            for r in 0..d {
                let denom = right[r + 1] + left[d - r];
                let temp = if denom == 0.0 { 0.0 } else { n[r] / denom };
                n[r] = saved + right[r + 1] * temp;
                saved = left[d - r] * temp;
            }
            n[d] = saved;
        }
        Some((j - DEGREE as isize, n))
    }

    /// `B_k(x)`; zero outside the support of `B_k`.
    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        let count = self.count();
        if k >= count {
            return Err(Error::IndexOutOfRange { index: k, len: count });
        }
        Ok(self.eval_unchecked(k, x))
    }

    fn eval_unchecked(&self, k: usize, x: f64) -> f64 {
        match self.eval_nonzero(x) {
            Some((first, values)) => {
                let offset = k as isize - first;
                if (0..3).contains(&offset) {
                    values[offset as usize]
                } else {
                    0.0
                }
            }
            None => 0.0,
        }
    }

    /// All `count` basis values at `x`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.count()];
        if let Some((first, values)) = self.eval_nonzero(x) {
            for (r, v) in values.into_iter().enumerate() {
                let k = first + r as isize;
                if k >= 0 && (k as usize) < out.len() {
                    out[k as usize] = v;
                }
            }
        }
        out
    }

    /// Support `[t_k, t_{k+3}]` of basis function `k`.
    pub fn support(&self, k: usize) -> (f64, f64) {
        (self.knots[k], self.knots[k + DEGREE + 1])
    }
}

/// Construction parameters of a [`PuBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub count: usize,
    pub warp: WarpParams,
    pub boundary_offset_nm: f64,
}

impl BasisConfig {
    pub fn new(count: usize, warp: WarpParams, boundary_offset_nm: f64) -> Self {
        BasisConfig {
            count,
            warp,
            boundary_offset_nm,
        }
    }

    /// Uniform knots with the default 100 nm boundary offset.
    pub fn unwarped(count: usize) -> Self {
        Self::new(count, WarpParams::identity(), DEFAULT_BOUNDARY_OFFSET_NM)
    }

    pub fn warped(count: usize, s: f64, p: f64) -> Self {
        Self::new(count, WarpParams { s, p }, DEFAULT_BOUNDARY_OFFSET_NM)
    }
}

/// A partition of unity over the visible interval together with its
/// per-basis colors.
#[derive(Debug, Clone)]
pub struct PuBasis {
    config: BasisConfig,
    spline: QuadraticBSpline,
    /// `dense[k][i]` = `B_k` at the `i`-th visible grid sample.
    dense: Vec<Vec<f64>>,
    illuminant: Illuminant,
    colors: Vec<ColorXyz>,
    magnitudes: Vec<f64>,
    chromaticities: Vec<Chromaticity>,
}

impl PuBasis {
    /// Builds the basis and integrates its colors under equal energy.
    pub fn new(config: BasisConfig) -> Result<Self> {
        let knots = build_knots(config.count, config.warp, config.boundary_offset_nm)?;
        let spline = QuadraticBSpline::new(knots)?;
        let mut dense = vec![vec![0.0; VISIBLE_LEN]; config.count];
        for (i, nm) in visible_wavelengths().enumerate() {
            if let Some((first, values)) = spline.eval_nonzero(nm) {
                for (r, v) in values.into_iter().enumerate() {
                    let k = first + r as isize;
                    if k >= 0 && (k as usize) < config.count {
                        dense[k as usize][i] = v;
                    }
                }
            }
        }
        let mut basis = PuBasis {
            config,
            spline,
            dense,
            illuminant: Illuminant::equal_energy(),
            colors: Vec::new(),
            magnitudes: Vec::new(),
            chromaticities: Vec::new(),
        };
        basis.set_colors(Illuminant::equal_energy())?;
        Ok(basis)
    }

    /// Same basis functions with colors premultiplied by `illuminant`.
    pub fn with_illuminant(&self, illuminant: &Illuminant) -> Result<Self> {
        let mut basis = self.clone();
        basis.set_colors(illuminant.clone())?;
        Ok(basis)
    }

    /// Recomputes `B_k`, `|B_k|` and `b_k`; `None` means equal energy.
    pub fn compute_basis_colors(&mut self, illuminant: Option<&Illuminant>) -> Result<()> {
        self.set_colors(illuminant.cloned().unwrap_or_else(Illuminant::equal_energy))
    }

    fn set_colors(&mut self, illuminant: Illuminant) -> Result<()> {
        let colors = self.colors_under(&illuminant);
        let magnitudes: Vec<f64> = colors.iter().map(ColorXyz::magnitude).collect();
        if let Some(k) = magnitudes.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "basis {k} integrates to a zero color under {}",
                illuminant.name()
            )));
        }
        self.chromaticities = colors.iter().map(|c| c.chromaticity()).collect::<Result<_>>()?;
        self.colors = colors;
        self.magnitudes = magnitudes;
        self.illuminant = illuminant;
        Ok(())
    }

    /// Per-basis colors under any illuminant, leaving `self` untouched.
    pub fn colors_under(&self, illuminant: &Illuminant) -> Vec<ColorXyz> {
        self.dense.iter().map(|b| illuminant.integrate_samples(b)).collect()
    }

    pub fn config(&self) -> &BasisConfig {
        &self.config
    }

    pub fn count(&self) -> usize {
        self.config.count
    }

    pub fn warp(&self) -> WarpParams {
        self.config.warp
    }

    pub fn knots(&self) -> &[f64] {
        self.spline.knots()
    }

    pub fn spline(&self) -> &QuadraticBSpline {
        &self.spline
    }

    pub fn illuminant(&self) -> &Illuminant {
        &self.illuminant
    }

    pub fn illuminant_tag(&self) -> &str {
        self.illuminant.name()
    }

    pub fn colors(&self) -> &[ColorXyz] {
        &self.colors
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn chromaticities(&self) -> &[Chromaticity] {
        &self.chromaticities
    }

    /// `B_{k,Y}` for every basis.
    pub fn luminances(&self) -> Vec<f64> {
        self.colors.iter().map(|c| c.y).collect()
    }

    /// Basis function `k` sampled on the visible grid.
    pub fn dense(&self, k: usize) -> &[f64] {
        &self.dense[k]
    }

    /// `B_k(λ)`, defined (and fading) outside the visible interval too.
    pub fn eval_basis(&self, k: usize, nm: f64) -> Result<f64> {
        self.spline.eval(k, nm)
    }

    fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.count() {
            return Err(Error::LengthMismatch {
                expected: self.count(),
                found: w.len(),
            });
        }
        Ok(())
    }

    /// `f(λ) = Σ_k w_k B_k(λ)`.
    pub fn reconstruct(&self, w: &[f64], nm: f64) -> Result<f64> {
        self.check_len(w)?;
        Ok(match self.spline.eval_nonzero(nm) {
            Some((first, values)) => values
                .iter()
                .enumerate()
                .filter_map(|(r, v)| {
                    let k = first + r as isize;
                    (k >= 0 && (k as usize) < w.len()).then(|| w[k as usize] * v)
                })
                .sum(),
            None => 0.0,
        })
    }

    /// Reconstruction sampled on the visible grid.
    pub fn reconstruct_visible(&self, w: &[f64]) -> Result<SpectralCurve> {
        self.check_len(w)?;
        let mut values = vec![0.0; VISIBLE_LEN];
        for (wk, b) in w.iter().zip(&self.dense) {
            if *wk != 0.0 {
                for (v, bk) in values.iter_mut().zip(b) {
                    *v += wk * bk;
                }
            }
        }
        Ok(SpectralCurve::visible(values))
    }

    /// Reconstruction on an arbitrary uniform grid (e.g. including the
    /// offset region outside the visible interval).
    pub fn reconstruct_on(&self, w: &[f64], start_nm: f64, step_nm: f64, len: usize) -> Result<SpectralCurve> {
        self.check_len(w)?;
        let values = (0..len)
            .map(|i| self.reconstruct(w, start_nm + i as f64 * step_nm))
            .collect::<Result<_>>()?;
        SpectralCurve::new(start_nm, step_nm, values)
    }

    /// `max_λ f(λ)` over the visible grid.
    pub fn max_reconstructed(&self, w: &[f64]) -> Result<f64> {
        Ok(self.reconstruct_visible(w)?.max_value())
    }

    /// `Σ_k w_k B_k` with the stored (possibly premultiplied) colors.
    pub fn color_of(&self, w: &[f64]) -> Result<ColorXyz> {
        self.check_len(w)?;
        Ok(w.iter()
            .zip(&self.colors)
            .fold(ColorXyz::ZERO, |acc, (wk, c)| acc + c.scale(*wk)))
    }

    /// `wᵀ B_Y`.
    pub fn luminance_of(&self, w: &[f64]) -> Result<f64> {
        self.check_len(w)?;
        Ok(w.iter().zip(&self.colors).map(|(wk, c)| wk * c.y).sum())
    }

    /// Polygon of basis chromaticities in index order.
    pub fn basis_gamut(&self) -> GamutPolygon {
        GamutPolygon::new(self.chromaticities.clone()).expect("at least three bases")
    }

    /// Convex hull of the basis chromaticities: the set of reachable targets.
    pub fn reachable_hull(&self) -> GamutPolygon {
        GamutPolygon::convex_hull(&self.chromaticities).expect("non-degenerate basis gamut")
    }

    pub fn to_document(&self) -> BasisDocument {
        BasisDocument {
            count: self.count(),
            degree: DEGREE,
            warp: self.config.warp,
            boundary_offset_nm: self.config.boundary_offset_nm,
            knots_nm: self.knots().to_vec(),
            illuminant: self.illuminant.name().to_string(),
            basis_xyz: self.colors.clone(),
        }
    }

    /// Rebuilds a basis from its exported document and checks that knots and
    /// colors agree with the stored values.
    pub fn from_document(doc: &BasisDocument) -> Result<Self> {
        if doc.degree != DEGREE {
            return Err(Error::Parse(format!("unsupported degree {}", doc.degree)));
        }
        let base = PuBasis::new(BasisConfig::new(doc.count, doc.warp, doc.boundary_offset_nm))?;
        let illuminant = Illuminant::by_name(&doc.illuminant)?;
        let basis = base.with_illuminant(&illuminant)?;
        let knots_ok = basis.knots().len() == doc.knots_nm.len()
            && basis
                .knots()
                .iter()
                .zip(&doc.knots_nm)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(1.0));
        if !knots_ok {
            return Err(Error::Parse("knot vector disagrees with the warp parameters".into()));
        }
        let colors_ok = doc.basis_xyz.len() == basis.count()
            && basis
                .colors
                .iter()
                .zip(&doc.basis_xyz)
                .all(|(a, b)| (a.x - b.x).abs() <= 1e-9 && (a.y - b.y).abs() <= 1e-9 && (a.z - b.z).abs() <= 1e-9);
        if !colors_ok {
            return Err(Error::Parse("basis colors disagree with this build's tables".into()));
        }
        Ok(basis)
    }
}

/// Serializable description of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDocument {
    pub count: usize,
    pub degree: usize,
    pub warp: WarpParams,
    pub boundary_offset_nm: f64,
    pub knots_nm: Vec<f64>,
    pub illuminant: String,
    pub basis_xyz: Vec<ColorXyz>,
}

impl BasisDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_warp() {
        for p in [0.1, 0.5, 0.9] {
            let w = WarpParams::new(0.0, p).unwrap();
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert_abs_diff_eq!(warp(w, x), x, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn warp_fixes_position_and_ends() {
        for (s, p) in [(0.66, 0.39), (0.8, 0.5), (0.3, 0.1), (0.99, 0.9)] {
            let w = WarpParams::new(s, p).unwrap();
            assert_eq!(warp(w, 0.0), 0.0);
            assert_eq!(warp(w, 1.0), 1.0);
            assert_abs_diff_eq!(warp(w, p), p, epsilon = 1e-14);
        }
    }

    #[test]
    fn warp_is_monotone() {
        let w = WarpParams::new(0.66, 0.39).unwrap();
        let mut prev = 0.0;
        for i in 1..=1000 {
            let v = warp(w, i as f64 / 1000.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn invalid_warp() {
        assert!(WarpParams::new(1.1, 0.5).is_err());
        assert!(WarpParams::new(0.5, 0.0).is_err());
        assert!(WarpParams::new(0.5, 1.0).is_err());
    }

    #[test]
    fn uniform_breakpoints() {
        let k = build_knots(5, WarpParams::identity(), 0.0).unwrap();
        assert_eq!(k, vec![385.0, 385.0, 385.0, 490.0, 595.0, 700.0, 700.0, 700.0]);
    }

    #[test]
    fn offset_knots() {
        let k = build_knots(7, WarpParams::new(0.66, 0.39).unwrap(), 100.0).unwrap();
        assert_eq!(k.len(), 10);
        assert_eq!(&k[..3], &[285.0, 285.0, 385.0]);
        assert_eq!(&k[k.len() - 3..], &[700.0, 800.0, 800.0]);
        assert!(k.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn knot_count() {
        for count in 3..16 {
            assert_eq!(
                build_knots(count, WarpParams::identity(), 100.0).unwrap().len(),
                count + 3
            );
        }
        assert!(build_knots(2, WarpParams::identity(), 0.0).is_err());
    }

    #[test]
    fn full_strength_warp_collapses_knots() {
        assert!(build_knots(7, WarpParams::new(1.0, 0.5).unwrap(), 0.0).is_err());
    }

    #[test]
    fn boundary_multiplicity() {
        let b = PuBasis::new(BasisConfig::new(5, WarpParams::identity(), 0.0)).unwrap();
        assert_abs_diff_eq!(b.eval_basis(0, 385.0).unwrap(), 1.0);
        for k in 1..5 {
            assert_eq!(b.eval_basis(k, 385.0).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(b.eval_basis(4, 700.0).unwrap(), 1.0);
        assert_abs_diff_eq!(b.eval_basis(0, 385.0).unwrap() + b.eval_basis(1, 385.0).unwrap(), 1.0);
    }

    #[test]
    fn partition_of_unity_at_500() {
        let b = PuBasis::new(BasisConfig::warped(7, 0.66, 0.39)).unwrap();
        let sum: f64 = (0..7).map(|k| b.eval_basis(k, 500.0).unwrap()).sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fades_outside_visible_range() {
        let b = PuBasis::new(BasisConfig::unwarped(7)).unwrap();
        let sum: f64 = (0..7).map(|k| b.eval_basis(k, 750.0).unwrap()).sum();
        // Only the last basis is non-zero at 750 nm: ((800 − 750)/100)·((800 − 750)/(800 − 700 + ...))
        assert!(sum > 0.0 && sum < 1.0, "sum = {sum}");
        let outside: f64 = (0..7).map(|k| b.eval_basis(k, 850.0).unwrap()).sum();
        assert_eq!(outside, 0.0);
    }

    #[test]
    fn index_out_of_range() {
        let b = PuBasis::new(BasisConfig::unwarped(5)).unwrap();
        assert!(matches!(b.eval_basis(5, 500.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn reconstruct_constants() {
        let b = PuBasis::new(BasisConfig::warped(9, 0.66, 0.39)).unwrap();
        let ones = b.reconstruct_visible(&[1.0; 9]).unwrap();
        assert!(ones.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let zeros = b.reconstruct_visible(&[0.0; 9]).unwrap();
        assert!(zeros.values().iter().all(|v| *v == 0.0));
        assert!(matches!(
            b.reconstruct(&[1.0; 8], 500.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn luminances_sum_to_one() {
        let b = PuBasis::new(BasisConfig::unwarped(7)).unwrap();
        assert_abs_diff_eq!(b.luminances().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn premultiplied_gamuts_differ() {
        let b = PuBasis::new(BasisConfig::unwarped(7)).unwrap();
        let d65 = b.with_illuminant(&Illuminant::d65()).unwrap();
        let f2 = b.with_illuminant(&Illuminant::f2()).unwrap();
        assert_eq!(d65.illuminant_tag(), "D65");
        let max_diff = d65
            .chromaticities()
            .iter()
            .zip(f2.chromaticities())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        assert!(max_diff > 1e-3, "max diff {max_diff}");
    }

    #[test]
    fn small_basis_gamut_is_a_triangle() {
        let b = PuBasis::new(BasisConfig::unwarped(3)).unwrap();
        assert_eq!(b.basis_gamut().len(), 3);
    }

    #[test]
    fn generic_clamped_spline_on_unit_interval() {
        let s = QuadraticBSpline::uniform_clamped(0.0, 1.0, 8).unwrap();
        assert_eq!(s.count(), 8);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let sum: f64 = s.eval_all(x).iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
        assert_eq!(s.eval_all(0.0)[0], 1.0);
        assert_eq!(s.eval_all(1.0)[7], 1.0);
    }

    #[test]
    fn document_round_trip() {
        let b = PuBasis::new(BasisConfig::warped(7, 0.66, 0.39))
            .unwrap()
            .with_illuminant(&Illuminant::d65())
            .unwrap();
        let doc = b.to_document();
        let back = PuBasis::from_document(&BasisDocument::from_json(&doc.to_json()).unwrap()).unwrap();
        assert_eq!(back.to_document(), doc);
    }
}
