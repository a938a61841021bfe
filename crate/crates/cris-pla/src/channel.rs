//! Per-color channel gains for the mirror-reflected path and the direct
//! line-of-sight path, plus the gain-to-power model.

use crate::cris::CrisConfiguration;
use crate::geometry::{link_cosines, OrientedPoint, Scene};
use crate::spectral::ColorChannel;
use crate::{Error, Result};

/// A length-4 per-color quantity (gain, power, or statistic) in canonical
/// R, A, G, B order.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ColorVector(pub [f64; 4]);

impl ColorVector {
    pub const ZERO: ColorVector = ColorVector([0.0; 4]);

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> ColorVector {
        ColorVector(self.0.map(f))
    }

    pub fn get(&self, channel: ColorChannel) -> f64 {
        self.0[channel.index()]
    }
}

impl std::ops::Index<usize> for ColorVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Lambertian emitter model; the order is derived from the half-view angle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LedModel {
    half_angle_deg: f64,
    lambertian_order: f64,
}

impl LedModel {
    pub fn new(half_angle_deg: f64) -> Result<Self> {
        if !(0.0 < half_angle_deg && half_angle_deg < 90.0) {
            return Err(Error::InvalidParameter(format!(
                "LED half-view angle must be in (0, 90) degrees, got {half_angle_deg}"
            )));
        }
        let lambertian_order = -1.0 / half_angle_deg.to_radians().cos().log2();
        Ok(Self { half_angle_deg, lambertian_order })
    }

    pub fn half_angle_deg(&self) -> f64 {
        self.half_angle_deg
    }

    /// `m = -1 / log2(cos(half angle))`.
    pub fn lambertian_order(&self) -> f64 {
        self.lambertian_order
    }
}

/// Receiver photodetector with an ideal optical concentrator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Photodetector {
    /// Effective area (m^2).
    pub area_m2: f64,
    /// Refractive index of the concentrator lens.
    pub refractive_index: f64,
    /// Field-of-view half angle (degrees).
    pub fov_deg: f64,
    /// Responsivity (A/W).
    pub responsivity: f64,
    concentrator_gain: f64,
}

impl Photodetector {
    pub fn new(area_m2: f64, refractive_index: f64, fov_deg: f64, responsivity: f64) -> Result<Self> {
        if !(area_m2 > 0.0) || !(refractive_index > 0.0) || !(responsivity > 0.0) {
            return Err(Error::InvalidParameter(
                "photodetector area, refractive index, and responsivity must be > 0".into(),
            ));
        }
        if !(0.0 < fov_deg && fov_deg <= 180.0) {
            return Err(Error::InvalidParameter(format!(
                "field of view must be in (0, 180] degrees, got {fov_deg}"
            )));
        }
        let s = fov_deg.to_radians().sin();
        if s == 0.0 {
            return Err(Error::InvalidParameter("field of view of 180 degrees has no concentrator gain".into()));
        }
        let concentrator_gain = refractive_index * refractive_index / (s * s);
        Ok(Self { area_m2, refractive_index, fov_deg, responsivity, concentrator_gain })
    }

    /// `G = n^2 / sin^2(fov)`, fixed by the stored fields.
    pub fn concentrator_gain(&self) -> f64 {
        self.concentrator_gain
    }

    /// True if the incidence cosine clears the field-of-view cutoff.
    fn within_fov(&self, cos_incidence: f64) -> bool {
        cos_incidence >= self.fov_deg.to_radians().cos()
    }
}

/// Gain from a transmitter to one mirror element.
///
/// `(m+1) A cos^m(phi) cos(theta) / (2 pi d^2)`, zero when either surface
/// faces away.
pub fn first_hop_gain(
    tx: &OrientedPoint,
    element: &OrientedPoint,
    led: &LedModel,
    element_area: f64,
) -> Result<f64> {
    if !(element_area > 0.0) {
        return Err(Error::InvalidParameter(format!("element area must be > 0, got {element_area}")));
    }
    let g = link_cosines(tx, element)?;
    if g.cos_irradiance == 0.0 || g.cos_incidence == 0.0 {
        return Ok(0.0);
    }
    let m = led.lambertian_order();
    Ok((m + 1.0) * element_area * g.cos_irradiance.powf(m) * g.cos_incidence
        / (2.0 * std::f64::consts::PI * g.distance * g.distance))
}

/// Gain from one mirror element to the receiver photodetector.
///
/// `A_pd cos(phi') cos(psi) / (pi d^2) * G * R * rho`; linear in the
/// element's reflectivity and zero outside the field of view.
pub fn second_hop_gain(
    element: &OrientedPoint,
    rx: &OrientedPoint,
    pd: &Photodetector,
    rho: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ReflectivityOutOfRange(rho));
    }
    let g = link_cosines(element, rx)?;
    if !pd.within_fov(g.cos_incidence) {
        return Ok(0.0);
    }
    Ok(pd.area_m2 * g.cos_irradiance * g.cos_incidence / (std::f64::consts::PI * g.distance * g.distance)
        * pd.concentrator_gain()
        * pd.responsivity
        * rho)
}

/// Direct line-of-sight gain from a transmitter to the photodetector, with
/// the same concentrator and responsivity conventions as the reflected path.
pub fn los_channel_gain(
    tx: &OrientedPoint,
    rx: &OrientedPoint,
    led: &LedModel,
    pd: &Photodetector,
) -> Result<f64> {
    let g = link_cosines(tx, rx)?;
    if !pd.within_fov(g.cos_incidence) {
        return Ok(0.0);
    }
    if g.cos_irradiance == 0.0 || g.cos_incidence == 0.0 {
        return Ok(0.0);
    }
    let m = led.lambertian_order();
    Ok((m + 1.0) * pd.area_m2 * g.cos_irradiance.powf(m) * g.cos_incidence
        / (2.0 * std::f64::consts::PI * g.distance * g.distance)
        * pd.concentrator_gain()
        * pd.responsivity)
}

/// How a channel gain converts to received signal power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GainExponent {
    /// `E = h^2 P` (the default model).
    Squared,
    /// `E = h P` (conventional intensity-channel variant).
    Linear,
}

impl GainExponent {
    pub fn apply(self, gain: f64, tx_power: f64) -> f64 {
        match self {
            GainExponent::Squared => gain * gain * tx_power,
            GainExponent::Linear => gain * tx_power,
        }
    }
}

/// Received signal power `E = h^2 P`.
pub fn received_signal_power(gain: f64, tx_power: f64) -> f64 {
    GainExponent::Squared.apply(gain, tx_power)
}

/// Precomputed per-element weights for one transmitter: first-hop gain times
/// unit-reflectivity second-hop gain, in the grid's row-major element order.
///
/// The reflected gain for color `c` under configuration `C` is then the dot
/// product `sum_i weights[i] * rho[i][c]`, evaluated sequentially so results
/// are bit-reproducible.
#[derive(Debug, Clone)]
pub struct ElementWeights {
    weights: Vec<f64>,
}

impl ElementWeights {
    pub fn compute(
        tx: &OrientedPoint,
        elements: &[OrientedPoint],
        rx: &OrientedPoint,
        led: &LedModel,
        pd: &Photodetector,
        element_area: f64,
    ) -> Result<Self> {
        let weights = elements
            .iter()
            .map(|element| {
                let first = first_hop_gain(tx, element, led, element_area)?;
                let second = second_hop_gain(element, rx, pd, 1.0)?;
                Ok(first * second)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { weights })
    }

    pub fn n_elements(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Per-color reflected gains under `config`.
    pub fn gains(&self, config: &CrisConfiguration) -> Result<ColorVector> {
        if config.n_elements() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: config.n_elements(),
            });
        }
        let mut acc = [0.0f64; 4];
        for (i, &w) in self.weights.iter().enumerate() {
            for (c, slot) in acc.iter_mut().enumerate() {
                *slot += w * config.rho(i, c);
            }
        }
        Ok(ColorVector(acc))
    }
}

/// Total per-color gains reflected through the mirror array: the first hop is
/// color-independent and computed once per element; the second hop carries
/// the per-color reflectivity.
pub fn cris_channel_gains(
    scene: &Scene,
    tx: &OrientedPoint,
    config: &CrisConfiguration,
    led: &LedModel,
    pd: &Photodetector,
) -> Result<ColorVector> {
    let elements = scene.grid.element_points(scene.room)?;
    let weights = ElementWeights::compute(tx, &elements, &scene.bob, led, pd, scene.grid.element_area())?;
    weights.gains(config)
}
