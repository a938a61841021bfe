//! The verifier: likelihood test, reference acquisition for both protocol
//! modes, and detection-error-tradeoff curves built from Monte Carlo scores.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ColorVector, ElementWeights, GainExponent};
use crate::cris::{CrisConfiguration, ReflectanceProfile, StrategyKind};
use crate::spectral::{spectral_coupling_matrix, HModelParams, SpectralBand};
use crate::{Error, Result};

/// How emission that leaks across filter bands is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Use the per-color transmit power directly (default).
    Off,
    /// Keep only each color's in-band fraction.
    Diagonal,
    /// Full cross-color leakage matrix.
    Full,
}

/// Gain-to-power conversion shared by every path in one experiment: the
/// effective per-color transmit powers (after optional spectral coupling)
/// and the gain exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub effective_power: [f64; 4],
    pub exponent: GainExponent,
}

impl PowerModel {
    pub fn new(
        tx_power_per_color: f64,
        exponent: GainExponent,
        coupling: CouplingMode,
        led_params: &[HModelParams; 4],
        bands: &[SpectralBand; 4],
    ) -> Result<Self> {
        if !(tx_power_per_color >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transmit power must be >= 0, got {tx_power_per_color}"
            )));
        }
        let effective_power = match coupling {
            CouplingMode::Off => [tx_power_per_color; 4],
            CouplingMode::Diagonal => {
                let m = spectral_coupling_matrix(led_params, bands)?;
                std::array::from_fn(|c| tx_power_per_color * m[c][c])
            }
            CouplingMode::Full => {
                let m = spectral_coupling_matrix(led_params, bands)?;
                std::array::from_fn(|row| (0..4).map(|col| m[row][col] * tx_power_per_color).sum())
            }
        };
        Ok(Self { effective_power, exponent })
    }

    /// Uniform per-color power with no spectral coupling.
    pub fn plain(tx_power_per_color: f64, exponent: GainExponent) -> Self {
        Self { effective_power: [tx_power_per_color; 4], exponent }
    }

    /// Noise-free received power vector for the given per-color gains.
    pub fn received(&self, gains: &ColorVector) -> ColorVector {
        ColorVector(std::array::from_fn(|c| {
            self.exponent.apply(gains.0[c], self.effective_power[c])
        }))
    }

    /// Inverts [`PowerModel::received`] for one color, mapping an observed
    /// noise-free power back to a nonnegative gain.
    fn gain_from_power(&self, power: f64, color: usize) -> f64 {
        let p = self.effective_power[color];
        if p == 0.0 {
            return 0.0;
        }
        match self.exponent {
            GainExponent::Squared => (power.max(0.0) / p).sqrt(),
            GainExponent::Linear => power / p,
        }
    }
}

/// Additive white Gaussian noise on each color channel, common variance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise variance must be >= 0, got {sigma2}")));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// One noisy observation of a noise-free power vector.
    pub fn observe<R: Rng>(&self, noise_free: &ColorVector, rng: &mut R) -> ColorVector {
        let sigma = self.sigma();
        ColorVector(std::array::from_fn(|c| {
            let w: f64 = rng.sample(StandardNormal);
            noise_free.0[c] + sigma * w
        }))
    }
}

/// Where a verifier reference came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    MeasuredIa,
    Predicted,
}

/// The verifier's expected per-color powers for the legitimate transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceProfile {
    pub expected: ColorVector,
    pub provenance: Provenance,
}

/// Sum of squared per-color deviations from the reference.
pub fn likelihood_statistic(observed: &ColorVector, reference: &ColorVector) -> f64 {
    (0..4).map(|c| (observed.0[c] - reference.0[c]).powi(2)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Authentic,
    NotAuthentic,
}

/// Accepts iff the statistic is strictly below the threshold; ties reject.
pub fn decide(statistic: f64, gamma: f64) -> Decision {
    if statistic < gamma {
        Decision::Authentic
    } else {
        Decision::NotAuthentic
    }
}

/// Single-configuration association phase: the verifier averages `n_probes`
/// noisy observations of the legitimate noise-free powers.
pub fn ia_phase_sc<R: Rng>(
    noise_free: &ColorVector,
    noise: &NoiseModel,
    n_probes: usize,
    rng: &mut R,
) -> Result<ReferenceProfile> {
    if n_probes == 0 {
        return Err(Error::InvalidParameter("IA phase needs at least one probe".into()));
    }
    let mut acc = [0.0f64; 4];
    for _ in 0..n_probes {
        let obs = noise.observe(noise_free, rng);
        for (slot, v) in acc.iter_mut().zip(obs.0) {
            *slot += v;
        }
    }
    Ok(ReferenceProfile {
        expected: ColorVector(acc.map(|v| v / n_probes as f64)),
        provenance: Provenance::MeasuredIa,
    })
}

/// How the challenge-response verifier predicts powers for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorMode {
    /// Perfect prediction from the known forward model.
    Genie,
    /// Least-squares fit of the per-element weights from noisy probes.
    Estimated,
}

/// Maps any mirror configuration to the expected per-color powers.
#[derive(Debug, Clone)]
pub enum Predictor {
    Genie { weights: ElementWeights, power: PowerModel },
    Estimated { weights_per_color: [Vec<f64>; 4], power: PowerModel },
}

impl Predictor {
    pub fn predict(&self, config: &CrisConfiguration) -> Result<ColorVector> {
        match self {
            Predictor::Genie { weights, power } => Ok(power.received(&weights.gains(config)?)),
            Predictor::Estimated { weights_per_color, power } => {
                let n = weights_per_color[0].len();
                if config.n_elements() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: config.n_elements() });
                }
                let gains = ColorVector(std::array::from_fn(|c| {
                    weights_per_color[c]
                        .iter()
                        .enumerate()
                        .map(|(i, w)| w * config.rho(i, c))
                        .sum()
                }));
                Ok(power.received(&gains))
            }
        }
    }
}

/// Challenge-response association phase.
///
/// In `Genie` mode the verifier keeps the exact forward model. In
/// `Estimated` mode it explores `n_probe_configs` configurations drawn from
/// the strategy, observes each under noise, recovers gains, and solves one
/// least-squares system per color for the per-element weights; prediction is
/// then linear in the reflectivities. Needs at least as many probes as
/// elements, otherwise the system is underdetermined.
#[allow(clippy::too_many_arguments)]
pub fn ia_phase_cr<R: Rng>(
    weights: &ElementWeights,
    power: &PowerModel,
    mode: PredictorMode,
    strategy: StrategyKind,
    profiles: &[ReflectanceProfile; 4],
    noise: &NoiseModel,
    n_probe_configs: usize,
    rng: &mut R,
) -> Result<Predictor> {
    match mode {
        PredictorMode::Genie => Ok(Predictor::Genie { weights: weights.clone(), power: *power }),
        PredictorMode::Estimated => {
            let n = weights.n_elements();
            if n_probe_configs < n {
                return Err(Error::Underdetermined { needed: n, got: n_probe_configs });
            }
            let mut probes = Vec::with_capacity(n_probe_configs);
            for _ in 0..n_probe_configs {
                let config = crate::cris::draw_dynamic(strategy, n, profiles, rng);
                let observed = noise.observe(&power.received(&weights.gains(&config)?), rng);
                probes.push((config, observed));
            }
            fit_estimated(&probes, power, n)
        }
    }
}

/// Least-squares fit of per-element weights, one independent system per
/// color, from probe (configuration, observed power) pairs.
pub fn fit_estimated(
    probes: &[(CrisConfiguration, ColorVector)],
    power: &PowerModel,
    n_elements: usize,
) -> Result<Predictor> {
    if probes.len() < n_elements {
        return Err(Error::Underdetermined { needed: n_elements, got: probes.len() });
    }
    let k = probes.len();
    let weights_per_color: [Vec<f64>; 4] = std::array::from_fn(|c| {
        let design = nalgebra::DMatrix::from_fn(k, n_elements, |row, col| probes[row].0.rho(col, c));
        let rhs = nalgebra::DVector::from_fn(k, |row, _| power.gain_from_power(probes[row].1 .0[c], c));
        let solution = design
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .expect("SVD least squares cannot fail with computed U and V");
        solution.iter().copied().collect()
    });
    Ok(Predictor::Estimated { weights_per_color, power: *power })
}

/// Monte Carlo likelihood-statistic samples under both hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSamples {
    /// Scores from legitimate transmissions.
    pub h0_scores: Vec<f64>,
    /// Scores from the attacker's transmissions.
    pub h1_scores: Vec<f64>,
    pub metadata: SampleMetadata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleMetadata {
    pub strategy: StrategyKind,
    pub n_elements: usize,
    pub attacker: String,
    pub seed: u64,
}

/// One point of a detection-error-tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub gamma: f64,
    /// Probability of rejecting the legitimate transmitter.
    pub pfa: f64,
    /// Probability of accepting the attacker.
    pub pmd: f64,
}

/// Detection-error tradeoff: `(gamma, pfa, pmd)` sorted by threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    pub points: Vec<DetPoint>,
}

impl DetCurve {
    /// Equal error rate: the point where pfa and pmd are closest, with the
    /// threshold that achieves it.
    pub fn eer(&self) -> EerEstimate {
        let mut best = &self.points[0];
        let mut best_gap = f64::INFINITY;
        for p in &self.points {
            let gap = (p.pfa - p.pmd).abs();
            if gap < best_gap {
                best_gap = gap;
                best = p;
            }
        }
        EerEstimate { eer: 0.5 * (best.pfa + best.pmd), gamma: best.gamma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerEstimate {
    pub eer: f64,
    pub gamma: f64,
}

/// Binomial standard error of an empirical equal error rate from `n0`/`n1`
/// scores per hypothesis, treating the crossing threshold as fixed.
pub fn eer_standard_error(eer: f64, n0: usize, n1: usize) -> f64 {
    let p = eer.clamp(1.0 / (n0 + n1) as f64, 1.0);
    0.5 * (p * (1.0 - p) * (1.0 / n0 as f64 + 1.0 / n1 as f64)).sqrt()
}

/// Empirical detection-error-tradeoff curve.
///
/// Thresholds sweep the pooled score range: `n_thresholds` values spaced
/// logarithmically over `[0.5 * min positive score, 2 * max score]`, plus a
/// zero and an infinite sentinel (scores are nonnegative, so gamma = 0 plays
/// the low-end sentinel's role: pfa = 1, pmd = 0). At each threshold,
/// `pfa = |{h0 >= gamma}| / n0` and `pmd = |{h1 < gamma}| / n1`, matching the
/// reject-on-tie convention of [`decide`].
pub fn det_curve(samples: &ScoreSamples, n_thresholds: usize) -> Result<DetCurve> {
    if samples.h0_scores.is_empty() || samples.h1_scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut h0 = samples.h0_scores.clone();
    let mut h1 = samples.h1_scores.clone();
    h0.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));
    h1.sort_by(|a, b| a.partial_cmp(b).expect("scores must not be NaN"));

    let pooled_max = h0.last().unwrap().max(*h1.last().unwrap());
    let min_positive = h0
        .iter()
        .chain(h1.iter())
        .copied()
        .filter(|&s| s > 0.0)
        .fold(f64::INFINITY, f64::min);

    let mut gammas = vec![0.0];
    if min_positive.is_finite() && pooled_max > 0.0 {
        let lo = (0.5 * min_positive).ln();
        let hi = (2.0 * pooled_max).ln();
        let n = n_thresholds.max(2);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            gammas.push((lo + t * (hi - lo)).exp());
        }
    }
    gammas.push(f64::INFINITY);
    gammas.dedup();

    let n0 = h0.len() as f64;
    let n1 = h1.len() as f64;
    let points = gammas
        .into_iter()
        .map(|gamma| {
            let below0 = h0.partition_point(|&s| s < gamma);
            let below1 = h1.partition_point(|&s| s < gamma);
            DetPoint {
                gamma,
                pfa: (h0.len() - below0) as f64 / n0,
                pmd: below1 as f64 / n1,
            }
        })
        .collect();
    Ok(DetCurve { points })
}
