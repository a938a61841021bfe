//! Monte Carlo engine: noise calibration, trial orchestration, and score
//! production for whole experiment plans.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::attack::{
    average_alice_power, los_attack_powers, LosAttacker, PassiveAttacker, SplitPolicy,
};
use crate::channel::{ColorVector, ElementWeights, LedModel, Photodetector};
use crate::cris::{draw_dynamic, fixed_cyclic, static_random, ReflectanceProfile, StrategyKind};
use crate::geometry::{CrisGrid, Scene, Vec3};
use crate::pla::{
    det_curve, ia_phase_cr, ia_phase_sc, likelihood_statistic, DetCurve, EerEstimate, PowerModel,
    Predictor, PredictorMode, SampleMetadata, ScoreSamples,
};
pub use crate::pla::NoiseModel;
use crate::{Error, Result};

/// The verifier protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PlaMode {
    /// One static mirror configuration; reference learned once.
    #[serde(rename = "sc", alias = "single-configuration")]
    SingleConfiguration,
    /// A random configuration per transmission, checked against a predictor.
    #[serde(rename = "cr", alias = "challenge-response")]
    ChallengeResponse,
}

impl PlaMode {
    pub fn label(self) -> &'static str {
        match self {
            PlaMode::SingleConfiguration => "sc",
            PlaMode::ChallengeResponse => "cr",
        }
    }
}

/// How the verifier's reference/predictor is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceMode {
    /// Noise-free reference or perfect predictor.
    Genie,
    /// Single-configuration reference averaged from noisy probes.
    MeasuredIa { n_probes: usize },
    /// Challenge-response predictor fitted from noisy probe configurations.
    Estimated { n_probe_configs: usize },
}

/// The attacker evaluated against the verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackerSpec {
    /// Retransmits through the mirror array from her own position.
    Passive { position: Vec3 },
    /// Aims straight at the receiver with a matched total power budget.
    Los { position: Vec3, split: SplitPolicy },
}

impl AttackerSpec {
    /// Short descriptor used in metadata and summary files (no commas).
    pub fn label(&self) -> String {
        match self {
            AttackerSpec::Passive { position } => {
                format!("passive_{:.2}_{:.2}_{:.2}", position.x, position.y, position.z)
            }
            AttackerSpec::Los { position, .. } => {
                format!("los_{:.2}_{:.2}_{:.2}", position.x, position.y, position.z)
            }
        }
    }
}

/// Everything one Monte Carlo experiment needs, fully resolved.
///
/// The scores produced from a plan are a pure function of the plan itself,
/// including `master_seed`, regardless of thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub scene: Scene,
    pub led: LedModel,
    pub pd: Photodetector,
    pub power: PowerModel,
    pub strategy: StrategyKind,
    pub profiles: [ReflectanceProfile; 4],
    pub attacker: AttackerSpec,
    pub trials: usize,
    pub snr_db: f64,
    pub master_seed: u64,
    pub pla_mode: PlaMode,
    pub reference: ReferenceMode,
    pub n_thresholds: usize,
    /// Configurations sampled when estimating the attacker's power budget
    /// under a dynamic strategy.
    pub budget_samples: usize,
}

// Reserved experiment-level substreams; per-trial streams start above them.
const STREAM_STATIC_CONFIG: u64 = 0;
const STREAM_IA: u64 = 1;
const STREAM_BUDGET: u64 = 2;
const TRIAL_STREAM_BASE: u64 = 8;

/// Per-trial random roles. The challenge stream belongs to the verifier and
/// is never shared with attacker-visible noise.
#[derive(Debug, Clone, Copy)]
enum Role {
    Challenge = 0,
    AliceNoise = 1,
    TrudyNoise = 2,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl ExperimentPlan {
    pub fn n_elements(&self) -> usize {
        self.scene.grid.n_elements()
    }

    /// Stable content hash of the resolved plan; re-runs of the same plan
    /// overwrite their outputs deterministically.
    pub fn content_hash(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }

    pub fn plan_id(&self) -> String {
        format!("{:016x}", self.content_hash())
    }

    fn canonical_string(&self) -> String {
        let mut s = String::with_capacity(512);
        let scene = &self.scene;
        let _ = write!(
            s,
            "room={:?},{:?},{:?};alice={:?};bob={:?};grid={:?},{},{},{:?},{:?};",
            scene.room.x, scene.room.y, scene.room.z, scene.alice, scene.bob,
            scene.grid.center, scene.grid.rows, scene.grid.cols, scene.grid.element_side,
            scene.grid.normal,
        );
        let _ = write!(
            s,
            "led={:?};pd={:?},{:?},{:?},{:?};power={:?},{:?};",
            self.led.half_angle_deg(), self.pd.area_m2, self.pd.refractive_index,
            self.pd.fov_deg, self.pd.responsivity, self.power.effective_power, self.power.exponent,
        );
        let _ = write!(
            s,
            "strategy={};profiles={:?};attacker={:?};trials={};snr={:?};seed={};mode={};reference={:?};thresholds={};budget_samples={}",
            self.strategy.label(),
            self.profiles.map(|p| p.0),
            self.attacker,
            self.trials,
            self.snr_db,
            self.master_seed,
            self.pla_mode.label(),
            self.reference,
            self.n_thresholds,
            self.budget_samples,
        );
        s
    }

    /// One independent substream of the plan's random source.
    fn stream_rng(&self, hash: u64, stream: u64) -> ChaCha12Rng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&hash.to_le_bytes());
        let mut rng = ChaCha12Rng::from_seed(seed);
        rng.set_stream(stream);
        rng
    }

    fn trial_rng(&self, hash: u64, trial: usize, role: Role) -> ChaCha12Rng {
        self.stream_rng(hash, TRIAL_STREAM_BASE + (trial as u64) * 4 + role as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidPlan("trials must be >= 1".into()));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidPlan(format!("SNR must be finite, got {} dB", self.snr_db)));
        }
        if self.n_thresholds < 2 {
            return Err(Error::InvalidPlan("threshold sweep needs at least 2 points".into()));
        }
        match (self.pla_mode, self.strategy.is_dynamic()) {
            (PlaMode::SingleConfiguration, true) => {
                return Err(Error::InvalidPlan(format!(
                    "single-configuration mode requires a static strategy, got {}",
                    self.strategy.label()
                )));
            }
            (PlaMode::ChallengeResponse, false) => {
                return Err(Error::InvalidPlan(format!(
                    "challenge-response mode requires a dynamic strategy, got {}",
                    self.strategy.label()
                )));
            }
            _ => {}
        }
        match (self.pla_mode, self.reference) {
            (PlaMode::SingleConfiguration, ReferenceMode::Estimated { .. }) => {
                return Err(Error::InvalidPlan(
                    "the fitted predictor applies to challenge-response mode only".into(),
                ));
            }
            (PlaMode::ChallengeResponse, ReferenceMode::MeasuredIa { .. }) => {
                return Err(Error::InvalidPlan(
                    "a single measured reference applies to single-configuration mode only".into(),
                ));
            }
            (_, ReferenceMode::MeasuredIa { n_probes: 0 }) => {
                return Err(Error::InvalidPlan("measured reference needs at least one probe".into()));
            }
            _ => {}
        }
        if let AttackerSpec::Passive { position } = &self.attacker {
            if !self.scene.contains(position) {
                return Err(Error::InvalidPlan(format!(
                    "passive attacker at ({}, {}, {}) outside the room",
                    position.x, position.y, position.z
                )));
            }
        }
        if self.budget_samples == 0 {
            return Err(Error::InvalidPlan("budget_samples must be >= 1".into()));
        }
        self.scene.validate()?;
        Ok(())
    }
}

/// Noise calibration.
///
/// The variance is referenced to the legitimate transmitter's noise-free
/// received powers under the fixed cyclic strategy on the full 50 x 30
/// array: `sigma^2 = sum_c s_c^2 / 10^(SNR_dB / 10)`, so the total received
/// SNR across the four channels, `sum_c (s_c / sigma)^2`, equals the
/// configured value. The same variance is reused for every scenario, array
/// size, and attacker in a comparison.
pub fn calibrate_noise(plan: &ExperimentPlan) -> Result<NoiseModel> {
    let reference_grid = CrisGrid::new(
        plan.scene.grid.center,
        50,
        30,
        plan.scene.grid.element_side,
        plan.scene.grid.normal,
    )?;
    let elements = reference_grid.element_points(plan.scene.room)?;
    let weights = ElementWeights::compute(
        &plan.scene.alice,
        &elements,
        &plan.scene.bob,
        &plan.led,
        &plan.pd,
        reference_grid.element_area(),
    )?;
    let config = fixed_cyclic(reference_grid.n_elements(), &plan.profiles);
    let signal = plan.power.received(&weights.gains(&config)?);
    let sigma2 = signal.0.iter().map(|s| s * s).sum::<f64>() / 10f64.powf(plan.snr_db / 10.0);
    NoiseModel::new(sigma2)
}

enum VerifierState {
    Fixed(ColorVector),
    Predict(Predictor),
}

enum AttackerPath {
    Passive(ElementWeights),
    Los(ColorVector),
}

/// Runs the plan with noise calibrated from it.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ScoreSamples> {
    let noise = calibrate_noise(plan)?;
    run_experiment_with_noise(plan, &noise)
}

/// Runs the plan under an explicit noise model.
///
/// Per trial: the verifier selects the challenge configuration, both the
/// legitimate transmitter's and the attacker's noise-free powers are passed
/// through independent per-channel Gaussian noise, and each observation is
/// scored against the verifier's reference for that challenge. Trials run in
/// parallel; each derives its own random substreams, so the output is
/// bit-identical for any worker count.
pub fn run_experiment_with_noise(plan: &ExperimentPlan, noise: &NoiseModel) -> Result<ScoreSamples> {
    plan.validate()?;
    let hash = plan.content_hash();
    let n = plan.n_elements();
    let elements = plan.scene.grid.element_points(plan.scene.room)?;
    let element_area = plan.scene.grid.element_area();
    let alice_weights = ElementWeights::compute(
        &plan.scene.alice,
        &elements,
        &plan.scene.bob,
        &plan.led,
        &plan.pd,
        element_area,
    )?;

    let static_config = match plan.strategy {
        StrategyKind::FixedCyclic => Some(fixed_cyclic(n, &plan.profiles)),
        StrategyKind::StaticRandom => Some(static_random(
            n,
            &mut plan.stream_rng(hash, STREAM_STATIC_CONFIG),
        )),
        StrategyKind::DynamicRandom | StrategyKind::RandomPermutation => None,
    };

    let verifier = match plan.pla_mode {
        PlaMode::SingleConfiguration => {
            let config = static_config
                .as_ref()
                .expect("validated: single-configuration mode uses a static strategy");
            let noise_free = plan.power.received(&alice_weights.gains(config)?);
            match plan.reference {
                ReferenceMode::Genie => VerifierState::Fixed(noise_free),
                ReferenceMode::MeasuredIa { n_probes } => {
                    let reference = ia_phase_sc(
                        &noise_free,
                        noise,
                        n_probes,
                        &mut plan.stream_rng(hash, STREAM_IA),
                    )?;
                    VerifierState::Fixed(reference.expected)
                }
                ReferenceMode::Estimated { .. } => unreachable!("rejected by validate"),
            }
        }
        PlaMode::ChallengeResponse => {
            let (mode, probes) = match plan.reference {
                ReferenceMode::Genie => (PredictorMode::Genie, 0),
                ReferenceMode::Estimated { n_probe_configs } => (PredictorMode::Estimated, n_probe_configs),
                ReferenceMode::MeasuredIa { .. } => unreachable!("rejected by validate"),
            };
            VerifierState::Predict(ia_phase_cr(
                &alice_weights,
                &plan.power,
                mode,
                plan.strategy,
                &plan.profiles,
                noise,
                probes,
                &mut plan.stream_rng(hash, STREAM_IA),
            )?)
        }
    };

    let attacker_path = match &plan.attacker {
        AttackerSpec::Passive { position } => {
            let attacker = PassiveAttacker { position: *position };
            AttackerPath::Passive(ElementWeights::compute(
                &attacker.oriented_point()?,
                &elements,
                &plan.scene.bob,
                &plan.led,
                &plan.pd,
                element_area,
            )?)
        }
        AttackerSpec::Los { position, split } => {
            // Static strategies use the exact total for the configuration in
            // force; dynamic ones average over the challenge distribution.
            let budget_mean = match &static_config {
                Some(config) => plan.power.received(&alice_weights.gains(config)?).sum(),
                None => {
                    average_alice_power(
                        &alice_weights,
                        &plan.power,
                        plan.strategy,
                        &plan.profiles,
                        plan.budget_samples,
                        &mut plan.stream_rng(hash, STREAM_BUDGET),
                    )?
                    .mean
                }
            };
            let attacker = LosAttacker {
                position: *position,
                power_budget: budget_mean,
                split: *split,
            };
            let outcome = los_attack_powers(&attacker, &plan.scene.bob, &plan.led, &plan.pd, plan.power.exponent)?;
            AttackerPath::Los(outcome.received)
        }
    };

    let scores: Vec<(f64, f64)> = (0..plan.trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, f64)> {
            let drawn;
            let challenge = match &static_config {
                Some(config) => config,
                None => {
                    let mut rng = plan.trial_rng(hash, trial, Role::Challenge);
                    drawn = draw_dynamic(plan.strategy, n, &plan.profiles, &mut rng);
                    &drawn
                }
            };
            let reference = match &verifier {
                VerifierState::Fixed(r) => *r,
                VerifierState::Predict(p) => p.predict(challenge)?,
            };
            let alice_clean = plan.power.received(&alice_weights.gains(challenge)?);
            let attacker_clean = match &attacker_path {
                AttackerPath::Passive(weights) => plan.power.received(&weights.gains(challenge)?),
                AttackerPath::Los(received) => *received,
            };
            let alice_observed = noise.observe(&alice_clean, &mut plan.trial_rng(hash, trial, Role::AliceNoise));
            let attacker_observed =
                noise.observe(&attacker_clean, &mut plan.trial_rng(hash, trial, Role::TrudyNoise));
            Ok((
                likelihood_statistic(&alice_observed, &reference),
                likelihood_statistic(&attacker_observed, &reference),
            ))
        })
        .collect::<Result<_>>()?;

    let (h0_scores, h1_scores) = scores.into_iter().unzip();
    Ok(ScoreSamples {
        h0_scores,
        h1_scores,
        metadata: SampleMetadata {
            strategy: plan.strategy,
            n_elements: n,
            attacker: plan.attacker.label(),
            seed: plan.master_seed,
        },
    })
}

/// One evaluated plan with its derived curve.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub plan_id: String,
    pub samples: ScoreSamples,
    pub det: DetCurve,
    pub eer: EerEstimate,
    pub runtime: Duration,
}

#[derive(Debug)]
pub struct SuiteFailure {
    pub plan_id: String,
    pub error: Error,
}

/// Suite results; failed plans are collected without aborting the rest.
#[derive(Debug)]
pub struct SuiteReport {
    pub outcomes: Vec<PlanOutcome>,
    pub failures: Vec<SuiteFailure>,
}

/// Evaluates each plan and attaches its detection-error curve.
pub fn run_suite(plans: &[ExperimentPlan]) -> Result<SuiteReport> {
    if plans.is_empty() {
        return Err(Error::InvalidPlan("suite must contain at least one plan".into()));
    }
    let mut outcomes = Vec::with_capacity(plans.len());
    let mut failures = Vec::new();
    for plan in plans {
        let plan_id = plan.plan_id();
        let start = Instant::now();
        match run_experiment(plan).and_then(|samples| {
            let det = det_curve(&samples, plan.n_thresholds)?;
            let eer = det.eer();
            Ok(PlanOutcome {
                plan_id: plan_id.clone(),
                samples,
                det,
                eer,
                runtime: start.elapsed(),
            })
        }) {
            Ok(outcome) => outcomes.push(outcome),
            Err(error) => failures.push(SuiteFailure { plan_id, error }),
        }
    }
    Ok(SuiteReport { outcomes, failures })
}
