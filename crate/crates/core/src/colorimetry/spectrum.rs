use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{VISIBLE_END_NM, VISIBLE_LEN, VISIBLE_START_NM, VISIBLE_STEP_NM};
use crate::error::{Error, Result};

/// Rounding slack of [`SpectralCurve::check_unit_bounded`].
pub const UNIT_BOUND_TOL: f64 = 1e-9;

/// A spectrum tabulated on a uniform wavelength grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    start_nm: f64,
    step_nm: f64,
    values: Vec<f64>,
}

impl SpectralCurve {
    pub fn new(start_nm: f64, step_nm: f64, values: Vec<f64>) -> Result<Self> {
        if !(step_nm > 0.0) || !step_nm.is_finite() || !start_nm.is_finite() {
            return Err(Error::GridMismatch(format!(
                "grid must start at a finite wavelength and increase (start {start_nm}, step {step_nm})"
            )));
        }
        if values.is_empty() {
            return Err(Error::GridMismatch("empty spectrum".into()));
        }
        Ok(SpectralCurve {
            start_nm,
            step_nm,
            values,
        })
    }

    /// A curve on the 1 nm visible grid. Panics on a wrong length.
    pub fn visible(values: Vec<f64>) -> Self {
        assert_eq!(values.len(), VISIBLE_LEN, "visible spectra have {VISIBLE_LEN} samples");
        SpectralCurve {
            start_nm: VISIBLE_START_NM,
            step_nm: VISIBLE_STEP_NM,
            values,
        }
    }

    /// Samples `f` on the 1 nm visible grid.
    pub fn visible_from_fn(f: impl FnMut(f64) -> f64) -> Self {
        Self::visible(super::visible_wavelengths().map(f).collect())
    }

    pub fn start_nm(&self) -> f64 {
        self.start_nm
    }

    pub fn step_nm(&self) -> f64 {
        self.step_nm
    }

    pub fn end_nm(&self) -> f64 {
        self.wavelength(self.values.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn wavelength(&self, i: usize) -> f64 {
        self.start_nm + i as f64 * self.step_nm
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.wavelength(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralCurve {
        SpectralCurve {
            start_nm: self.start_nm,
            step_nm: self.step_nm,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks the reflectance/transmittance bound `0 ≤ f ≤ 1`, up to
    /// [`UNIT_BOUND_TOL`] of rounding.
    pub fn check_unit_bounded(&self) -> Result<()> {
        match self
            .values
            .iter()
            .position(|v| !(-UNIT_BOUND_TOL..=1.0 + UNIT_BOUND_TOL).contains(v))
        {
            None => Ok(()),
            Some(i) => Err(Error::InvalidParameter(format!(
                "value {} at {} nm is outside [0, 1]",
                self.values[i],
                self.wavelength(i)
            ))),
        }
    }

    pub(crate) fn check_visible_grid(&self) -> Result<()> {
        if self.step_nm == VISIBLE_STEP_NM && self.start_nm == VISIBLE_START_NM && self.values.len() == VISIBLE_LEN {
            Ok(())
        } else {
            Err(self.grid_error())
        }
    }

    fn grid_error(&self) -> Error {
        Error::GridMismatch(format!(
            "expected a 1 nm grid covering [{VISIBLE_START_NM}, {VISIBLE_END_NM}] nm, got start {} nm, step {} nm, {} samples",
            self.start_nm,
            self.step_nm,
            self.values.len()
        ))
    }

    /// The samples at the visible grid points. The curve must use a 1 nm step
    /// aligned with the visible grid and cover it.
    pub fn visible_samples(&self) -> Result<std::borrow::Cow<'_, [f64]>> {
        if self.step_nm != VISIBLE_STEP_NM {
            return Err(self.grid_error());
        }
        let offset = VISIBLE_START_NM - self.start_nm;
        if offset < 0.0 || offset.fract() != 0.0 {
            return Err(self.grid_error());
        }
        let first = offset as usize;
        if first + VISIBLE_LEN > self.values.len() {
            return Err(self.grid_error());
        }
        if first == 0 && self.values.len() == VISIBLE_LEN {
            Ok(std::borrow::Cow::Borrowed(&self.values))
        } else {
            Ok(std::borrow::Cow::Owned(
                self.values[first..first + VISIBLE_LEN].to_vec(),
            ))
        }
    }

    /// Resamples onto a coarser grid by taking every `stride`-th sample.
    pub fn downsample(&self, stride: usize) -> SpectralCurve {
        let stride = stride.max(1);
        SpectralCurve {
            start_nm: self.start_nm,
            step_nm: self.step_nm * stride as f64,
            values: self.values.iter().copied().step_by(stride).collect(),
        }
    }

    /// CSV with header `wavelength_nm,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("wavelength_nm,value\n");
        for (nm, v) in self.wavelengths().zip(&self.values) {
            writeln!(out, "{nm},{v}").unwrap();
        }
        out
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty spectrum CSV".into()))??;
        if header.trim().trim_start_matches('\u{feff}') != "wavelength_nm,value" {
            return Err(Error::Parse(format!("unexpected CSV header '{header}'")));
        }
        let mut wavelengths = Vec::new();
        let mut values = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two fields", n + 2)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))
            };
            wavelengths.push(parse(a)?);
            values.push(parse(b)?);
        }
        if wavelengths.len() < 2 {
            return Err(Error::Parse("spectrum CSV needs at least two rows".into()));
        }
        let start = wavelengths[0];
        let step = wavelengths[1] - wavelengths[0];
        for (i, nm) in wavelengths.iter().enumerate() {
            if (nm - (start + i as f64 * step)).abs() > 1e-6 * step.abs().max(1.0) {
                return Err(Error::GridMismatch(format!(
                    "row {} at {nm} nm breaks the uniform grid",
                    i + 1
                )));
            }
        }
        SpectralCurve::new(start, step, values)
    }
}
