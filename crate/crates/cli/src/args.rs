use std::net::{IpAddr, Ipv4Addr};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spectral_pu::basis::DEFAULT_BOUNDARY_OFFSET_NM;
use spectral_pu::design::{DEFAULT_GRID, DEFAULT_SMOOTHNESS_NM};
use spectral_pu::imaging::DEFAULT_BLEND_COUNT;

/// Smooth bounded spectra for a target color.
#[derive(Debug, Parser)]
#[command(name = "spectral-pu", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Build a basis, print its expressivity and smoothness, export it.
    Basis(BasisCmd),
    /// Grid search over warp parameters.
    Optimize(OptimizeCmd),
    /// Sample the equivalence class of a target color.
    Sample(SampleCmd),
    /// Chromaticity of a transmittance spectrum against depth.
    Trajectory(TrajectoryCmd),
    /// Metamers under one illuminant, reported under a second.
    Palette(PaletteCmd),
    /// Hide a mask or gray image in a pair of metameric renders.
    Hide(HideCmd),
    /// Start the local HTTP API.
    Serve(ServeCmd),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis(_) => "basis",
            Command::Optimize(_) => "optimize",
            Command::Sample(_) => "sample",
            Command::Trajectory(_) => "trajectory",
            Command::Palette(_) => "palette",
            Command::Hide(_) => "hide",
            Command::Serve(_) => "serve",
            Command::Replay(_) => "replay",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Sample(c) => Some(c.seed),
            Command::Palette(c) => Some(c.seed),
            _ => None,
        }
    }

    pub fn out_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Command::Basis(c) => Some(&mut c.out),
            Command::Optimize(c) => Some(&mut c.out),
            Command::Sample(c) => Some(&mut c.out),
            Command::Trajectory(c) => Some(&mut c.out),
            Command::Palette(c) => Some(&mut c.out),
            Command::Hide(c) => Some(&mut c.out),
            Command::Serve(_) | Command::Replay(_) => None,
        }
    }
}

/// A basis either loaded from a document or built from parameters.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BasisSource {
    /// Basis document written by `basis`.
    #[arg(long, conflicts_with = "bases")]
    pub basis: Option<PathBuf>,
    /// Number of basis functions.
    #[arg(short = 'K', long)]
    pub bases: Option<usize>,
    /// Warp strength in [0, 1).
    #[arg(short = 's', long = "strength", default_value_t = 0.0)]
    pub s: f64,
    /// Warp position in (0, 1).
    #[arg(short = 'p', long = "position", default_value_t = 0.5)]
    pub p: f64,
    /// Distance of the outer knots beyond the visible range, nm.
    #[arg(long = "offset", default_value_t = DEFAULT_BOUNDARY_OFFSET_NM)]
    pub offset_nm: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BasisCmd {
    /// Number of basis functions.
    #[arg(short = 'K', long)]
    pub bases: usize,
    #[arg(short = 's', long = "strength", default_value_t = 0.0)]
    pub s: f64,
    #[arg(short = 'p', long = "position", default_value_t = 0.5)]
    pub p: f64,
    #[arg(long = "offset", default_value_t = DEFAULT_BOUNDARY_OFFSET_NM)]
    pub offset_nm: f64,
    /// Premultiply basis colors by this illuminant (D65, F2, E).
    #[arg(long)]
    pub illuminant: Option<String>,
    /// RGB space for the excess area.
    #[arg(long, default_value = "srgb")]
    pub rgb: String,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    AtLeast,
    Below,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OptimizeCmd {
    /// Number of basis functions.
    #[arg(short = 'K', long)]
    pub bases: usize,
    #[arg(long, default_value = "srgb")]
    pub rgb: String,
    /// Smoothness threshold on the narrowest basis function, nm.
    #[arg(long, default_value_t = DEFAULT_SMOOTHNESS_NM)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = Direction::AtLeast)]
    pub direction: Direction,
    /// Cells per axis; `--grid-s` and `--grid-p` override.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub grid_s: Option<usize>,
    #[arg(long)]
    pub grid_p: Option<usize>,
    #[arg(long = "offset", default_value_t = DEFAULT_BOUNDARY_OFFSET_NM)]
    pub offset_nm: f64,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TargetArgs {
    #[arg(long)]
    pub cx: f64,
    #[arg(long)]
    pub cy: f64,
    /// Target luminance.
    #[arg(short = 'Y', long = "luminance")]
    pub luminance: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleCmd {
    #[command(flatten)]
    pub basis: BasisSource,
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(short = 'n', long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Triangle choice: random, largest, first or an index.
    #[arg(long, default_value = "random")]
    pub policy: String,
    /// Samples per timed batch.
    #[arg(long, default_value_t = 1000)]
    pub batch: usize,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrajectoryCmd {
    #[command(flatten)]
    pub basis: BasisSource,
    /// Basis weights, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "samples")]
    pub weights: Option<Vec<f64>>,
    /// Samples CSV written by `sample`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Row of `--samples` to use.
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    /// Depths, comma separated; a default sweep when absent.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<f64>>,
    /// Illuminant for the trajectory colors; equal energy when absent.
    #[arg(long)]
    pub illuminant: Option<String>,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PaletteCmd {
    #[command(flatten)]
    pub basis: BasisSource,
    #[arg(long, default_value = "D65")]
    pub first: String,
    #[arg(long, default_value = "F2")]
    pub second: String,
    /// Target chromaticity x; the first illuminant's white point when absent.
    #[arg(long, requires = "cy")]
    pub cx: Option<f64>,
    #[arg(long, requires = "cx")]
    pub cy: Option<f64>,
    #[arg(short = 'Y', long = "luminance")]
    pub luminance: f64,
    #[arg(short = 'n', long, default_value_t = 32)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep members that miss the target luminance.
    #[arg(long)]
    pub keep_unmet: bool,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rank {
    First,
    Second,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HideCmd {
    /// Palette written by `palette`.
    #[arg(long)]
    pub palette: PathBuf,
    /// Binary mask; set pixels take the second color of the pair.
    #[arg(long, required_unless_present = "gray", conflicts_with = "gray")]
    pub mask: Option<PathBuf>,
    /// Gray image to hide through a luminance-ordered blend.
    #[arg(long)]
    pub gray: Option<PathBuf>,
    /// Palette entries blended for `--gray`.
    #[arg(long, default_value_t = DEFAULT_BLEND_COUNT)]
    pub levels: usize,
    /// Illuminant whose luminance orders the blend.
    #[arg(long, value_enum, default_value_t = Rank::Second)]
    pub rank: Rank,
    #[arg(short = 'o', long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ServeCmd {
    #[arg(long, default_value_t = spectral_service::DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayCmd {
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded directory.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}
