//! QLED emission spectra and optical filter bands.
//!
//! The emitter is modeled with an asymmetric-Gaussian ("H-model") power
//! spectral density: a Gaussian with different left/right spectral widths
//! plus a sharpened copy of itself, normalized so the peak value is exactly 1.

use crate::{Error, Result};

/// Lower edge of the wavelength domain accepted by [`psd_value`] (nm).
pub const WAVELENGTH_MIN: f64 = 300.0;
/// Upper edge of the wavelength domain accepted by [`psd_value`] (nm).
pub const WAVELENGTH_MAX: f64 = 900.0;

/// Visible range used to normalize total emitted energy (nm).
pub const VISIBLE_LOWER: f64 = 380.0;
pub const VISIBLE_UPPER: f64 = 780.0;

/// Fixed step for the composite trapezoidal rule (nm).
pub const INTEGRATION_STEP: f64 = 0.01;

/// The four color channels, in the canonical order used by every
/// length-4 per-color vector in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorChannel {
    R,
    A,
    G,
    B,
}

impl ColorChannel {
    pub const ALL: [ColorChannel; 4] = [
        ColorChannel::R,
        ColorChannel::A,
        ColorChannel::G,
        ColorChannel::B,
    ];

    pub fn index(self) -> usize {
        match self {
            ColorChannel::R => 0,
            ColorChannel::A => 1,
            ColorChannel::G => 2,
            ColorChannel::B => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ColorChannel::R => "R",
            ColorChannel::A => "A",
            ColorChannel::G => "G",
            ColorChannel::B => "B",
        }
    }
}

/// Shape parameters of the H-model PSD for one LED die.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HModelParams {
    /// Peak wavelength (nm).
    pub lambda_p: f64,
    /// Left half spectral width, used for wavelengths below the peak (nm).
    pub delta_lambda_1: f64,
    /// Right half spectral width, used at and above the peak (nm).
    pub delta_lambda_2: f64,
    /// Weight of the sharpened Gaussian term.
    pub k1: f64,
    /// Exponent of the sharpened Gaussian term.
    pub k2: f64,
}

impl HModelParams {
    pub fn new(lambda_p: f64, delta_lambda_1: f64, delta_lambda_2: f64, k1: f64, k2: f64) -> Result<Self> {
        if !(lambda_p > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda_p must be > 0, got {lambda_p}")));
        }
        if !(delta_lambda_1 > 0.0) || !(delta_lambda_2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectral widths must be > 0, got {delta_lambda_1} and {delta_lambda_2}"
            )));
        }
        if !(k1 > 0.0) {
            return Err(Error::InvalidParameter(format!("k1 must be > 0, got {k1}")));
        }
        if !(k2 >= 1.0) {
            return Err(Error::InvalidParameter(format!("k2 must be >= 1, got {k2}")));
        }
        Ok(Self { lambda_p, delta_lambda_1, delta_lambda_2, k1, k2 })
    }
}

/// One optical filter passband, `[lower, upper]` in nm.
///
/// A zero-width band is allowed and integrates to zero energy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralBand {
    pub lower: f64,
    pub upper: f64,
}

impl SpectralBand {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "band must satisfy lower <= upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// H-model parameters for the simulated four-color (R, A, G, B) QLED.
pub fn default_led_psd_params() -> [HModelParams; 4] {
    [
        // red
        HModelParams { lambda_p: 632.5, delta_lambda_1: 23.84, delta_lambda_2: 14.74, k1: 2.0, k2: 6.0 },
        // amber
        HModelParams { lambda_p: 600.0, delta_lambda_1: 19.66, delta_lambda_2: 14.97, k1: 2.0, k2: 5.0 },
        // green
        HModelParams { lambda_p: 517.7, delta_lambda_1: 29.38, delta_lambda_2: 45.21, k1: 2.0, k2: 3.0 },
        // blue
        HModelParams { lambda_p: 453.0, delta_lambda_1: 18.99, delta_lambda_2: 25.5, k1: 2.0, k2: 5.0 },
    ]
}

/// Ideal filter passbands for the four receiver photodetectors (R, A, G, B).
pub fn default_filter_bands() -> [SpectralBand; 4] {
    [
        SpectralBand { lower: 612.0, upper: 680.0 },
        SpectralBand { lower: 575.0, upper: 612.0 },
        SpectralBand { lower: 483.0, upper: 575.0 },
        SpectralBand { lower: 400.0, upper: 483.0 },
    ]
}

fn gaussian_term(lambda: f64, lambda_p: f64, delta_lambda: f64) -> f64 {
    let d = (lambda - lambda_p) / delta_lambda;
    (-d * d).exp()
}

/// Relative spectral density at `lambda` nm; exactly 1 at the peak.
///
/// The half width switches from `delta_lambda_1` to `delta_lambda_2` at the
/// peak wavelength; the density is continuous there because both branches
/// evaluate to 1.
pub fn psd_value(params: &HModelParams, lambda: f64) -> Result<f64> {
    if !(WAVELENGTH_MIN..=WAVELENGTH_MAX).contains(&lambda) {
        return Err(Error::WavelengthOutOfDomain(lambda));
    }
    let delta = if lambda < params.lambda_p {
        params.delta_lambda_1
    } else {
        params.delta_lambda_2
    };
    let g = gaussian_term(lambda, params.lambda_p, delta);
    Ok((g + params.k1 * g.powf(params.k2)) / (1.0 + params.k1))
}

/// Relative energy emitted inside `band`: the PSD integrated with the
/// composite trapezoidal rule at a fixed 0.01 nm step.
pub fn band_energy(params: &HModelParams, band: &SpectralBand) -> Result<f64> {
    let width = band.width();
    if width == 0.0 {
        // Still reject out-of-domain degenerate bands.
        psd_value(params, band.lower)?;
        return Ok(0.0);
    }
    let n = (width / INTEGRATION_STEP - 1e-9).ceil().max(1.0) as usize;
    let h = width / n as f64;
    let mut sum = 0.5 * (psd_value(params, band.lower)? + psd_value(params, band.upper)?);
    for i in 1..n {
        sum += psd_value(params, band.lower + h * i as f64)?;
    }
    Ok(sum * h)
}

/// Cross-color leakage matrix.
///
/// Entry `[c'][c]` is the fraction of color `c`'s visible-range energy that
/// lands inside filter band `c'`. Columns therefore sum to at most 1, and for
/// well-separated filters the diagonal dominates each column.
pub fn spectral_coupling_matrix(
    all_params: &[HModelParams; 4],
    all_bands: &[SpectralBand; 4],
) -> Result<[[f64; 4]; 4]> {
    let visible = SpectralBand { lower: VISIBLE_LOWER, upper: VISIBLE_UPPER };
    let mut matrix = [[0.0; 4]; 4];
    for (col, params) in all_params.iter().enumerate() {
        let total = band_energy(params, &visible)?;
        for (row, band) in all_bands.iter().enumerate() {
            matrix[row][col] = band_energy(params, band)? / total;
        }
    }
    Ok(matrix)
}
