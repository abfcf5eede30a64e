//! Spectral upsampling to equivalence classes.
//!
//! A target color (chromaticity and luminance) is mapped to the whole set of
//! smooth, bounded spectra that reproduce it. Spectra are weighted sums of a
//! quadratic B-spline partition of unity, so weights in `[0, 1]` give
//! reflectance or transmittance values in `[0, 1]`. The set is explored through
//! generalized barycentric coordinates of the basis chromaticities.
//!
//! - [`colorimetry`]: CIE 1931 tables, illuminants, gamut polygons.
//! - [`basis`]: warped partitions of unity and their colors.
//! - [`sampler`]: the one-to-many mapping and the max-luminance program.
//! - [`design`]: expressivity and smoothness of a basis, warp search.
//! - [`effects`]: vathochromic and metameric design.
//! - [`imaging`]: hidden patterns and images under two illuminants.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod colorimetry;
pub mod design;
pub mod effects;
pub mod error;
pub mod imaging;
pub mod lp;
pub mod sampler;

pub use basis::{BasisConfig, PuBasis, WarpParams};
pub use colorimetry::{Chromaticity, ColorXyz, GamutPolygon, Illuminant, RgbSpace, SpectralCurve};
pub use error::{Error, Result};
pub use sampler::{ClassSample, ColorTarget, TrianglePolicy};
