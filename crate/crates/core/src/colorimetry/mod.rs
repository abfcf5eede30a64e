//! CIE 1931 colorimetry on a 1 nm grid over the visible interval.
//!
//! The observer and illuminant tables are stored at 5 nm and linearly
//! interpolated onto the 1 nm grid `[385, 700]` nm. Integration uses the
//! trapezoidal rule, and every illuminant is normalized so that a perfect
//! reflector has `Y = 1`.

mod gamut;
mod spectrum;
mod tables;

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamut::{rgb_gamut, segment_distance, GamutPolygon, RgbSpace};
pub use spectrum::{SpectralCurve, UNIT_BOUND_TOL};

/// Lower end of the visible interval, in nm.
pub const VISIBLE_START_NM: f64 = 385.0;
/// Upper end of the visible interval, in nm.
pub const VISIBLE_END_NM: f64 = 700.0;
/// Integration step, in nm.
pub const VISIBLE_STEP_NM: f64 = 1.0;
/// Number of samples on the visible grid (both ends included).
pub const VISIBLE_LEN: usize = 316;

/// Equal-energy white point.
pub const EQUAL_ENERGY_WHITE: Chromaticity = Chromaticity {
    x: 1.0 / 3.0,
    y: 1.0 / 3.0,
};

/// Wavelength of the `i`-th visible grid sample.
#[inline]
pub fn visible_wavelength(i: usize) -> f64 {
    VISIBLE_START_NM + i as f64 * VISIBLE_STEP_NM
}

/// Iterator over the visible grid wavelengths.
pub fn visible_wavelengths() -> impl ExactSizeIterator<Item = f64> + Clone {
    (0..VISIBLE_LEN).map(visible_wavelength)
}

/// Trapezoidal weight of grid sample `i`.
#[inline]
fn trapezoid_weight(i: usize) -> f64 {
    if i == 0 || i == VISIBLE_LEN - 1 {
        0.5 * VISIBLE_STEP_NM
    } else {
        VISIBLE_STEP_NM
    }
}

/// Linear interpolation of a 5 nm table at `nm`. Zero outside the table.
fn interpolate_table<const N: usize>(table: &[[f64; N]], nm: f64) -> [f64; N] {
    let t = (nm - tables::TABLE_START_NM) / tables::TABLE_STEP_NM;
    if t < 0.0 || t > (table.len() - 1) as f64 {
        return [0.0; N];
    }
    let i = (t.floor() as usize).min(table.len() - 2);
    let frac = t - i as f64;
    std::array::from_fn(|c| table[i][c] * (1.0 - frac) + table[i + 1][c] * frac)
}

static CMF: LazyLock<Vec<[f64; 3]>> = LazyLock::new(|| {
    visible_wavelengths()
        .map(|nm| interpolate_table(&tables::CIE1931_2DEG, nm))
        .collect()
});

/// The CIE 1931 2° color matching functions `[x̄, ȳ, z̄]` at `nm`, linearly
/// interpolated from the 5 nm table. Zero outside `[380, 780]` nm.
pub fn cmf_at(nm: f64) -> [f64; 3] {
    interpolate_table(&tables::CIE1931_2DEG, nm)
}

/// Color matching functions sampled on the visible grid.
pub fn cmf_visible() -> &'static [[f64; 3]] {
    &CMF
}

/// CIE XYZ tristimulus values.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColorXyz {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ColorXyz {
    pub const ZERO: ColorXyz = ColorXyz { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ColorXyz { x, y, z }
    }

    /// `X + Y + Z`.
    pub fn magnitude(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn scale(self, s: f64) -> Self {
        ColorXyz::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn chromaticity(&self) -> Result<Chromaticity> {
        xyz_to_chromaticity(*self)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl std::ops::Add for ColorXyz {
    type Output = ColorXyz;

    fn add(self, other: ColorXyz) -> ColorXyz {
        ColorXyz::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }
}

/// CIE xy chromaticity coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Chromaticity {
    pub x: f64,
    pub y: f64,
}

impl Chromaticity {
    pub const fn new(x: f64, y: f64) -> Self {
        Chromaticity { x, y }
    }

    pub fn distance(&self, other: &Chromaticity) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Clockwise angle around `center`, in `[0, 2π)`, measured from the +x axis.
    pub fn clockwise_angle_around(&self, center: &Chromaticity) -> f64 {
        let a = -(self.y - center.y).atan2(self.x - center.x);
        a.rem_euclid(std::f64::consts::TAU)
    }
}

impl fmt::Display for Chromaticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `(x, y) = (X, Y) / (X + Y + Z)`.
pub fn xyz_to_chromaticity(xyz: ColorXyz) -> Result<Chromaticity> {
    let m = xyz.magnitude();
    if m == 0.0 || !m.is_finite() {
        return Err(Error::UndefinedChromaticity);
    }
    Ok(Chromaticity::new(xyz.x / m, xyz.y / m))
}

/// A tabulated spectral power distribution together with its `∫ I ȳ`
/// normalization.
#[derive(Debug, Clone)]
pub struct Illuminant {
    name: String,
    spd: SpectralCurve,
    white_norm: f64,
    /// Trapezoid weight × I × CMF / white_norm, per visible grid sample.
    weighted_cmf: Vec<[f64; 3]>,
}

impl PartialEq for Illuminant {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.spd == other.spd
    }
}

fn illuminant_from_table(name: &str, table: &[f64]) -> Illuminant {
    let rows: Vec<[f64; 1]> = table.iter().map(|&v| [v]).collect();
    let values = visible_wavelengths()
        .map(|nm| interpolate_table(&rows, nm)[0])
        .collect();
    Illuminant::from_spd(name, SpectralCurve::visible(values)).expect("embedded illuminant tables are valid")
}

static D65: LazyLock<Illuminant> = LazyLock::new(|| illuminant_from_table("D65", &tables::ILLUMINANT_D65));
static F2: LazyLock<Illuminant> = LazyLock::new(|| illuminant_from_table("F2", &tables::ILLUMINANT_F2));
static E: LazyLock<Illuminant> = LazyLock::new(|| {
    Illuminant::from_spd("E", SpectralCurve::visible(vec![1.0; VISIBLE_LEN])).expect("equal energy is valid")
});

impl Illuminant {
    /// Builds an illuminant from an SPD on the visible grid.
    pub fn from_spd(name: &str, spd: SpectralCurve) -> Result<Self> {
        spd.check_visible_grid()?;
        if let Some(v) = spd.values().iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "illuminant '{name}' has invalid power {v}"
            )));
        }
        let cmf = cmf_visible();
        let white_norm: f64 = spd
            .values()
            .iter()
            .enumerate()
            .map(|(i, &p)| trapezoid_weight(i) * p * cmf[i][1])
            .sum();
        if !(white_norm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "illuminant '{name}' has zero luminance"
            )));
        }
        let weighted_cmf = spd
            .values()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let s = trapezoid_weight(i) * p / white_norm;
                [s * cmf[i][0], s * cmf[i][1], s * cmf[i][2]]
            })
            .collect();
        Ok(Illuminant {
            name: name.to_string(),
            spd,
            white_norm,
            weighted_cmf,
        })
    }

    pub fn d65() -> Self {
        D65.clone()
    }

    pub fn f2() -> Self {
        F2.clone()
    }

    /// Equal-energy illuminant `I ≡ 1`.
    pub fn equal_energy() -> Self {
        E.clone()
    }

    /// Looks up an embedded illuminant: `D65`, `F2` or `E` (case-insensitive).
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "D65" => Ok(Self::d65()),
            "F2" | "FL2" => Ok(Self::f2()),
            "E" => Ok(Self::equal_energy()),
            _ => Err(Error::UnknownName {
                kind: "illuminant",
                name: name.to_string(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spd(&self) -> &SpectralCurve {
        &self.spd
    }

    /// `∫ I(λ) ȳ(λ) dλ` with the trapezoidal rule.
    pub fn white_norm(&self) -> f64 {
        self.white_norm
    }

    /// Quadrature weights folding in the CMFs, the SPD and the normalization:
    /// `XYZ = Σ_i f_i · weights[i]`.
    pub fn integration_weights(&self) -> &[[f64; 3]] {
        &self.weighted_cmf
    }

    /// Integrates values sampled on the visible grid.
    pub fn integrate_samples(&self, values: &[f64]) -> ColorXyz {
        debug_assert_eq!(values.len(), VISIBLE_LEN);
        let mut acc = [0.0; 3];
        for (v, w) in values.iter().zip(&self.weighted_cmf) {
            acc[0] += v * w[0];
            acc[1] += v * w[1];
            acc[2] += v * w[2];
        }
        ColorXyz::new(acc[0], acc[1], acc[2])
    }

    /// Chromaticity of the illuminant itself (of a perfect reflector under it).
    pub fn white_point(&self) -> Chromaticity {
        let ones = vec![1.0; VISIBLE_LEN];
        xyz_to_chromaticity(self.integrate_samples(&ones)).expect("white norm is positive")
    }
}

impl FromStr for Illuminant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Illuminant::by_name(s)
    }
}

/// `XYZ = ∫ f I s̄ dλ / ∫ I ȳ dλ` over the visible interval, trapezoidal on the
/// 1 nm grid. Equal energy is used when `illuminant` is `None`.
pub fn integrate_to_xyz(spectrum: &SpectralCurve, illuminant: Option<&Illuminant>) -> Result<ColorXyz> {
    let values = spectrum.visible_samples()?;
    let ill = illuminant.unwrap_or(&E);
    Ok(ill.integrate_samples(&values))
}

/// Ordered chromaticities of monochromatic stimuli over the visible interval,
/// every `step_nm`. The purple line is the closing edge of the polygon.
pub fn spectral_locus(step_nm: u32) -> Result<GamutPolygon> {
    if step_nm == 0 || !(VISIBLE_LEN as u32 - 1).is_multiple_of(step_nm) {
        return Err(Error::InvalidParameter(format!(
            "locus step {step_nm} nm does not divide the visible grid"
        )));
    }
    let cmf = cmf_visible();
    let vertices = (0..VISIBLE_LEN)
        .step_by(step_nm as usize)
        .map(|i| {
            let [x, y, z] = cmf[i];
            xyz_to_chromaticity(ColorXyz::new(x, y, z))
        })
        .collect::<Result<Vec<_>>>()?;
    GamutPolygon::new(vertices)
}

/// Linear sRGB (D65 primaries) from XYZ.
pub fn xyz_to_linear_srgb(xyz: ColorXyz) -> [f64; 3] {
    let ColorXyz { x, y, z } = xyz;
    [
        3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
        -0.9692660 * x + 1.8760108 * y + 0.0415560 * z,
        0.0556434 * x - 0.2040259 * y + 1.0572252 * z,
    ]
}

/// sRGB transfer function per channel, after clamping to `[0, 1]`.
pub fn encode_srgb(linear: [f64; 3]) -> [f64; 3] {
    linear.map(|v| {
        let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        if v <= 0.0031308 {
            12.92 * v
        } else {
            1.055 * v.powf(1.0 / 2.4) - 0.055
        }
    })
}

/// Display triple quantized to 8 bits.
pub fn quantize(display: [f64; 3]) -> [u8; 3] {
    display.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
}
