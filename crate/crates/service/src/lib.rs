//! Stateless JSON API over the toolkit, for the interactive designer.
//!
//! | route | body | returns |
//! |---|---|---|
//! | `GET /basis?K&s&p&offset&illuminant` | | basis summary, gamuts, locus |
//! | `POST /sample` | [`SampleRequest`] | class members and the max-luminance solution |
//! | `POST /trajectory` | [`TrajectoryRequest`] | chromaticities over depth |
//! | `POST /representatives` | [`TargetRequest`] | one spectrum per enclosing triangle |
//! | `POST /pick_hue` | [`HueRequest`] | blend of the two nearest representatives |
//! | `POST /palette` | [`PaletteRequest`] | metamers under two illuminants |
//!
//! Every request carries the full basis description, so identical bodies
//! give identical responses. Errors come back as `{"code", "message"}`.

use std::net::SocketAddr;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, FromRequestParts};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use spectral_pu::basis::{BasisConfig, PuBasis, WarpParams, DEFAULT_BOUNDARY_OFFSET_NM};
use spectral_pu::colorimetry::{
    spectral_locus, visible_wavelengths, xyz_to_linear_srgb, Chromaticity, ColorXyz, Illuminant, RgbSpace,
    SpectralCurve,
};
use spectral_pu::design::design_metrics;
use spectral_pu::effects::{
    default_depths, depth_trajectory, metameric_palette, palette_spread, pick_by_hue, representative_set, HueBlend,
    PaletteSettings, DEFAULT_REFERENCE_DEPTH,
};
use spectral_pu::sampler::{feasibility_check, sample_class};
use spectral_pu::{ColorTarget, Error, TrianglePolicy};

/// Spectra in responses use every fifth nanometre.
pub const RESPONSE_STRIDE: usize = 5;
pub const MAX_SAMPLES: usize = 10_000;
pub const MAX_PALETTE: usize = 1024;
pub const MAX_DEPTHS: usize = 4096;
pub const DEFAULT_PORT: u16 = 8787;

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_request",
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::OutOfGamut { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "out_of_gamut"),
            Error::BoundarySingular { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "boundary_singular"),
            Error::Infeasible(_) | Error::ConstraintInfeasible => (StatusCode::UNPROCESSABLE_ENTITY, "infeasible"),
            Error::InfiniteExtinction { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "infinite_extinction"),
            Error::Numerical(_) | Error::Io(_) | Error::Image(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
            _ => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        ApiError {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(self)).into_response()
    }
}

/// JSON body whose parse errors use the API error shape.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Json<T>(pub T);

impl<T: Serialize> IntoResponse for Json<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
pub struct Query<T>(pub T);

type ApiResult<T> = Result<Json<T>, ApiError>;

fn default_p() -> f64 {
    0.5
}

fn default_offset() -> f64 {
    DEFAULT_BOUNDARY_OFFSET_NM
}

/// Basis description carried by every request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    #[serde(rename = "K", alias = "k")]
    pub count: usize,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_offset")]
    pub offset: f64,
    /// Illuminant premultiplied into the basis colors (`E` by default).
    #[serde(default)]
    pub illuminant: Option<String>,
}

impl BasisSpec {
    pub fn build(&self) -> Result<PuBasis, Error> {
        if !self.offset.is_finite() || self.offset < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "offset {} must be a non-negative length",
                self.offset
            )));
        }
        let basis = PuBasis::new(BasisConfig::new(
            self.count,
            WarpParams::new(self.s, self.p)?,
            self.offset,
        ))?;
        match &self.illuminant {
            Some(name) => basis.with_illuminant(&Illuminant::by_name(name)?),
            None => Ok(basis),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "Y", alias = "luminance")]
    pub luminance: f64,
}

impl TargetSpec {
    pub fn build(&self) -> Result<ColorTarget, Error> {
        ColorTarget::new(self.x, self.y, self.luminance)
    }
}

fn check_count(count: usize, max: usize, what: &str) -> Result<(), ApiError> {
    if count == 0 || count > max {
        return Err(ApiError::bad_request(format!(
            "{what} must be in 1..={max}, got {count}"
        )));
    }
    Ok(())
}

fn check_weights(basis: &PuBasis, w: &[f64]) -> Result<(), ApiError> {
    if w.len() != basis.count() {
        return Err(Error::LengthMismatch {
            expected: basis.count(),
            found: w.len(),
        }
        .into());
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(ApiError::bad_request("weights must be finite and non-negative"));
    }
    Ok(())
}

fn response_wavelengths() -> Vec<f64> {
    visible_wavelengths().step_by(RESPONSE_STRIDE).collect()
}

fn coarse(curve: &SpectralCurve) -> Vec<f64> {
    curve.downsample(RESPONSE_STRIDE).into_values()
}

fn spectrum_of(basis: &PuBasis, w: &[f64]) -> Result<Vec<f64>, Error> {
    Ok(coarse(&basis.reconstruct_visible(w)?))
}

/// A color as XYZ, chromaticity (when defined) and unclamped linear sRGB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorView {
    pub xyz: ColorXyz,
    pub chromaticity: Option<Chromaticity>,
    pub linear_rgb: [f64; 3],
}

impl ColorView {
    pub fn new(xyz: ColorXyz) -> Self {
        ColorView {
            xyz,
            chromaticity: xyz.chromaticity().ok(),
            linear_rgb: xyz_to_linear_srgb(xyz),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct BasisQuery {
    #[serde(rename = "K", alias = "k")]
    pub count: usize,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_offset")]
    pub offset: f64,
    #[serde(default)]
    pub illuminant: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BasisResponse {
    pub basis: BasisSpec,
    pub illuminant: String,
    pub knots_nm: Vec<f64>,
    pub colors: Vec<ColorXyz>,
    pub magnitudes: Vec<f64>,
    pub chromaticities: Vec<Chromaticity>,
    /// Basis chromaticities in index order.
    pub gamut: Vec<Chromaticity>,
    /// Convex hull of the basis chromaticities.
    pub reachable: Vec<Chromaticity>,
    pub srgb: Vec<Chromaticity>,
    pub wide_gamut: Vec<Chromaticity>,
    pub locus: Vec<Chromaticity>,
    pub excess_area: f64,
    pub smoothness_nm: f64,
    pub wavelengths_nm: Vec<f64>,
    /// Basis functions sampled at `wavelengths_nm`.
    pub functions: Vec<Vec<f64>>,
}

fn basis_summary(spec: BasisSpec) -> Result<BasisResponse, ApiError> {
    let basis = spec.build()?;
    let metrics = design_metrics(&basis, RgbSpace::Srgb)?;
    let functions = (0..basis.count())
        .map(|k| basis.dense(k).iter().copied().step_by(RESPONSE_STRIDE).collect())
        .collect();
    Ok(BasisResponse {
        illuminant: basis.illuminant_tag().to_string(),
        knots_nm: basis.knots().to_vec(),
        colors: basis.colors().to_vec(),
        magnitudes: basis.magnitudes().to_vec(),
        chromaticities: basis.chromaticities().to_vec(),
        gamut: basis.basis_gamut().vertices().to_vec(),
        reachable: basis.reachable_hull().vertices().to_vec(),
        srgb: RgbSpace::Srgb.primaries().to_vec(),
        wide_gamut: RgbSpace::AdobeWideGamut.primaries().to_vec(),
        locus: spectral_locus(RESPONSE_STRIDE as u32)?.vertices().to_vec(),
        excess_area: metrics.excess_area,
        smoothness_nm: metrics.smoothness_nm,
        wavelengths_nm: response_wavelengths(),
        functions,
        basis: spec,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRequest {
    pub basis: BasisSpec,
    pub target: TargetSpec,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub policy: TrianglePolicy,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleView {
    pub stream: u64,
    pub triangle: Vec<usize>,
    pub a_f: Vec<f64>,
    pub a: Vec<f64>,
    pub w: Vec<f64>,
    pub achieved_luminance: f64,
    pub luminance_met: bool,
    pub scaled: bool,
    pub color: ColorView,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MaxLuminanceView {
    pub w: Vec<f64>,
    pub luminance: f64,
    /// Luminance after rescaling the spectrum to peak at one.
    pub scaled_luminance: f64,
    /// The target luminance is reachable by the conservative test.
    pub feasible: bool,
    pub color: ColorView,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleResponse {
    pub wavelengths_nm: Vec<f64>,
    pub samples: Vec<SampleView>,
    /// Absent for targets on the gamut boundary.
    pub max_luminance: Option<MaxLuminanceView>,
}

fn sample(req: SampleRequest) -> Result<SampleResponse, ApiError> {
    check_count(req.count, MAX_SAMPLES, "count")?;
    let basis = req.basis.build()?;
    let target = req.target.build()?;
    let samples = sample_class(&basis, &target, req.count, req.seed, req.policy)?
        .into_iter()
        .map(|s| {
            Ok(SampleView {
                color: ColorView::new(basis.color_of(&s.w)?),
                spectrum: spectrum_of(&basis, &s.w)?,
                stream: s.stream,
                triangle: s.triangle,
                a_f: s.a_f,
                a: s.a.0,
                w: s.w,
                achieved_luminance: s.achieved_luminance,
                luminance_met: s.luminance_met,
                scaled: s.scaled,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let max_luminance = match feasibility_check(&basis, &target) {
        Ok(f) => Some(MaxLuminanceView {
            color: ColorView::new(basis.color_of(&f.max_luminance_weights)?),
            spectrum: spectrum_of(&basis, &f.max_luminance_weights)?,
            w: f.max_luminance_weights,
            luminance: f.max_luminance,
            scaled_luminance: f.max_scaled_luminance,
            feasible: f.feasible,
        }),
        Err(Error::BoundarySingular { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(SampleResponse {
        wavelengths_nm: response_wavelengths(),
        samples,
        max_luminance,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRequest {
    pub basis: BasisSpec,
    pub w: Vec<f64>,
    /// Defaults to 64 geometric depths between 0.25 and 32, including 1.
    #[serde(default)]
    pub depths: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrajectoryResponse {
    pub depths: Vec<f64>,
    pub points: Vec<Option<Chromaticity>>,
    pub luminances: Vec<f64>,
}

fn trajectory(req: TrajectoryRequest) -> Result<TrajectoryResponse, ApiError> {
    let basis = req.basis.build()?;
    check_weights(&basis, &req.w)?;
    let depths = req.depths.unwrap_or_else(default_depths);
    check_count(depths.len(), MAX_DEPTHS, "depth count")?;
    if depths.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(ApiError::bad_request("depths must be finite and non-negative"));
    }
    let t1 = basis.reconstruct_visible(&req.w)?;
    t1.check_unit_bounded()?;
    let traj = depth_trajectory(&t1, &depths, Some(basis.illuminant()))?;
    Ok(TrajectoryResponse {
        depths: traj.depths,
        points: traj.points,
        luminances: traj.luminances,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetRequest {
    pub basis: BasisSpec,
    pub target: TargetSpec,
    #[serde(default)]
    pub reference_depth: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RepresentativeView {
    pub triangle: [usize; 3],
    pub w: Vec<f64>,
    pub luminance_met: bool,
    pub reference_chromaticity: Chromaticity,
    /// Radians, clockwise around the equal-energy white.
    pub hue_angle: f64,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RepresentativesResponse {
    pub reference_depth: f64,
    pub wavelengths_nm: Vec<f64>,
    pub entries: Vec<RepresentativeView>,
}

fn reference_depth(d: Option<f64>) -> Result<f64, ApiError> {
    let d = d.unwrap_or(DEFAULT_REFERENCE_DEPTH);
    if !(d.is_finite() && d > 0.0) {
        return Err(ApiError::bad_request(format!("reference depth {d} must be positive")));
    }
    Ok(d)
}

fn representatives(req: TargetRequest) -> Result<RepresentativesResponse, ApiError> {
    let basis = req.basis.build()?;
    let target = req.target.build()?;
    let set = representative_set(&basis, &target, reference_depth(req.reference_depth)?)?;
    let entries = set
        .entries
        .into_iter()
        .map(|e| {
            Ok(RepresentativeView {
                spectrum: spectrum_of(&basis, &e.w)?,
                triangle: e.triangle,
                w: e.w,
                luminance_met: e.luminance_met,
                reference_chromaticity: e.reference_chromaticity,
                hue_angle: e.hue_angle,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(RepresentativesResponse {
        reference_depth: set.reference_depth,
        wavelengths_nm: response_wavelengths(),
        entries,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HueRequest {
    pub basis: BasisSpec,
    pub target: TargetSpec,
    #[serde(default)]
    pub reference_depth: Option<f64>,
    /// Radians, clockwise around the equal-energy white.
    pub hue_angle: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HueResponse {
    pub blend: HueBlend,
    pub color: ColorView,
    pub spectrum: Vec<f64>,
}

fn hue(req: HueRequest) -> Result<HueResponse, ApiError> {
    if !req.hue_angle.is_finite() {
        return Err(ApiError::bad_request("hue angle must be finite"));
    }
    let basis = req.basis.build()?;
    let target = req.target.build()?;
    let set = representative_set(&basis, &target, reference_depth(req.reference_depth)?)?;
    let blend = pick_by_hue(&set, req.hue_angle)?;
    Ok(HueResponse {
        color: ColorView::new(basis.color_of(&blend.w)?),
        spectrum: spectrum_of(&basis, &blend.w)?,
        blend,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaletteRequest {
    /// The basis is used unpremultiplied; `first` is applied internally.
    pub basis: BasisSpec,
    pub first: String,
    pub second: String,
    pub target: TargetSpec,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub keep_unmet: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PaletteEntryView {
    pub stream: u64,
    pub w: Vec<f64>,
    pub under_first: ColorView,
    pub under_second: ColorView,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PaletteResponse {
    pub wavelengths_nm: Vec<f64>,
    pub entries: Vec<PaletteEntryView>,
    /// Largest chromaticity distance under the second illuminant.
    pub spread: f64,
}

fn palette(req: PaletteRequest) -> Result<PaletteResponse, ApiError> {
    check_count(req.count, MAX_PALETTE, "count")?;
    let spec = BasisSpec {
        illuminant: None,
        ..req.basis.clone()
    };
    let basis = spec.build()?;
    let first = Illuminant::by_name(&req.first)?;
    let second = Illuminant::by_name(&req.second)?;
    let target = req.target.build()?;
    let mut settings = PaletteSettings::new(req.count, req.seed);
    settings.keep_unmet = req.keep_unmet;
    let entries = metameric_palette(&basis, &first, &second, &target, &settings)?;
    let spread = palette_spread(&entries);
    let entries = entries
        .into_iter()
        .map(|e| {
            Ok(PaletteEntryView {
                spectrum: spectrum_of(&basis, &e.w)?,
                stream: e.stream,
                under_first: ColorView::new(e.color_under_first),
                under_second: ColorView::new(e.color_under_second),
                w: e.w,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(PaletteResponse {
        wavelengths_nm: response_wavelengths(),
        entries,
        spread,
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map(Json),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: e.to_string(),
        }),
    }
}

async fn get_basis(Query(q): Query<BasisQuery>) -> ApiResult<BasisResponse> {
    let spec = BasisSpec {
        count: q.count,
        s: q.s,
        p: q.p,
        offset: q.offset,
        illuminant: q.illuminant,
    };
    blocking(move || basis_summary(spec)).await
}

async fn post_sample(Json(req): Json<SampleRequest>) -> ApiResult<SampleResponse> {
    blocking(move || sample(req)).await
}

async fn post_trajectory(Json(req): Json<TrajectoryRequest>) -> ApiResult<TrajectoryResponse> {
    blocking(move || trajectory(req)).await
}

async fn post_representatives(Json(req): Json<TargetRequest>) -> ApiResult<RepresentativesResponse> {
    blocking(move || representatives(req)).await
}

async fn post_pick_hue(Json(req): Json<HueRequest>) -> ApiResult<HueResponse> {
    blocking(move || hue(req)).await
}

async fn post_palette(Json(req): Json<PaletteRequest>) -> ApiResult<PaletteResponse> {
    blocking(move || palette(req)).await
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        code: "not_found",
        message: "no such endpoint".into(),
    }
}

pub fn router() -> Router {
    Router::new()
        .route("/basis", get(get_basis))
        .route("/sample", post(post_sample))
        .route("/trajectory", post(post_trajectory))
        .route("/representatives", post(post_representatives))
        .route("/pick_hue", post(post_pick_hue))
        .route("/palette", post(post_palette))
        .fallback(not_found)
}

/// Serves the API until the process receives Ctrl-C.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
