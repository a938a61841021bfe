//! The two impersonation strategies: passive retransmission through the
//! mirror array from a displaced position, and the direct line-of-sight
//! attack with a matched total power budget.

use rand::Rng;

use crate::channel::{los_channel_gain, ColorVector, ElementWeights, GainExponent, LedModel, Photodetector};
use crate::cris::{draw_dynamic, fixed_cyclic, static_random, CrisConfiguration, ReflectanceProfile, StrategyKind};
use crate::geometry::{OrientedPoint, Scene, Vec3};
use crate::pla::PowerModel;
use crate::{Error, Result};

/// Attacker that simply transmits from her own position with hardware
/// identical to the legitimate transmitter: ceiling-mounted, facing down,
/// same per-color power.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PassiveAttacker {
    pub position: Vec3,
}

impl PassiveAttacker {
    pub fn oriented_point(&self) -> Result<OrientedPoint> {
        OrientedPoint::new(self.position, Vec3::new(0.0, 0.0, -1.0))
    }
}

/// Noise-free powers the verifier receives from the passive attacker: the
/// exact pipeline used for the legitimate transmitter, from her position.
pub fn passive_received_powers(
    scene: &Scene,
    attacker: &PassiveAttacker,
    config: &CrisConfiguration,
    led: &LedModel,
    pd: &Photodetector,
    power: &PowerModel,
) -> Result<ColorVector> {
    if !scene.contains(&attacker.position) {
        return Err(Error::InvalidParameter(format!(
            "attacker at ({}, {}, {}) outside the room",
            attacker.position.x, attacker.position.y, attacker.position.z
        )));
    }
    let gains = crate::channel::cris_channel_gains(scene, &attacker.oriented_point()?, config, led, pd)?;
    Ok(power.received(&gains))
}

/// Estimate of the legitimate transmitter's total average noise-free
/// received power, summed over colors and averaged over the strategy's
/// configuration distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub mean: f64,
    /// Monte Carlo standard error; zero for static strategies.
    pub standard_error: f64,
    pub n_samples: usize,
}

/// Total average legitimate received power.
///
/// Static strategies are exact (their single configuration); dynamic ones
/// are averaged over `n_samples` fresh configurations.
pub fn average_alice_power<R: Rng>(
    alice_weights: &ElementWeights,
    power: &PowerModel,
    strategy: StrategyKind,
    profiles: &[ReflectanceProfile; 4],
    n_samples: usize,
    rng: &mut R,
) -> Result<PowerBudget> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("budget estimation needs n_samples >= 1".into()));
    }
    let n = alice_weights.n_elements();
    let total = |config: &CrisConfiguration| -> Result<f64> {
        Ok(power.received(&alice_weights.gains(config)?).sum())
    };
    match strategy {
        StrategyKind::FixedCyclic => Ok(PowerBudget {
            mean: total(&fixed_cyclic(n, profiles))?,
            standard_error: 0.0,
            n_samples: 1,
        }),
        StrategyKind::StaticRandom => Ok(PowerBudget {
            mean: total(&static_random(n, rng))?,
            standard_error: 0.0,
            n_samples: 1,
        }),
        StrategyKind::DynamicRandom | StrategyKind::RandomPermutation => {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n_samples {
                let t = total(&draw_dynamic(strategy, n, profiles, rng))?;
                sum += t;
                sum_sq += t * t;
            }
            let mean = sum / n_samples as f64;
            let variance = (sum_sq / n_samples as f64 - mean * mean).max(0.0);
            let standard_error = if n_samples > 1 {
                (variance / (n_samples - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(PowerBudget { mean, standard_error, n_samples })
        }
    }
}

/// How the line-of-sight attacker splits her total budget across colors.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitPolicy {
    /// A quarter of the budget per channel. Matched to an attacker who knows
    /// the total but not the per-color breakdown.
    Equal,
    /// Explicit fractions; must sum to 1.
    Custom([f64; 4]),
}

impl SplitPolicy {
    pub fn fractions(&self) -> Result<[f64; 4]> {
        match self {
            SplitPolicy::Equal => Ok([0.25; 4]),
            SplitPolicy::Custom(fractions) => {
                if fractions.iter().any(|&f| f < 0.0) {
                    return Err(Error::InvalidParameter("split fractions must be >= 0".into()));
                }
                let sum: f64 = fractions.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "split fractions must sum to 1, got {sum}"
                    )));
                }
                Ok(*fractions)
            }
        }
    }
}

/// Attacker that bypasses the mirror array, aiming straight at the receiver
/// with a total received-power budget matched to the legitimate average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosAttacker {
    pub position: Vec3,
    /// Total noise-free received power she targets at the verifier.
    pub power_budget: f64,
    pub split: SplitPolicy,
}

impl LosAttacker {
    /// Oriented toward the receiver.
    pub fn oriented_point(&self, bob: &OrientedPoint) -> Result<OrientedPoint> {
        OrientedPoint::new(self.position, bob.position - self.position)
    }
}

/// Outcome of the budget-matched line-of-sight attack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosAttackOutcome {
    /// Noise-free received powers per color; sums to the budget exactly.
    pub received: ColorVector,
    /// Transmit powers back-solved from the line-of-sight gain.
    pub tx_powers: ColorVector,
    /// The line-of-sight channel gain.
    pub gain: f64,
}

/// Splits the budget across colors and back-solves the transmit powers
/// through the line-of-sight gain; fails if the attacker cannot reach the
/// receiver at all.
pub fn los_attack_powers(
    attacker: &LosAttacker,
    bob: &OrientedPoint,
    led: &LedModel,
    pd: &Photodetector,
    exponent: GainExponent,
) -> Result<LosAttackOutcome> {
    if !(attacker.power_budget > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "power budget must be > 0, got {}",
            attacker.power_budget
        )));
    }
    let gain = los_channel_gain(&attacker.oriented_point(bob)?, bob, led, pd)?;
    if gain == 0.0 {
        return Err(Error::UnreachableReceiver);
    }
    let fractions = attacker.split.fractions()?;
    let received = ColorVector(fractions.map(|f| f * attacker.power_budget));
    let denom = match exponent {
        GainExponent::Squared => gain * gain,
        GainExponent::Linear => gain,
    };
    let tx_powers = received.map(|e| e / denom);
    Ok(LosAttackOutcome { received, tx_powers, gain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cris::default_profiles;
    use crate::geometry::CrisGrid;
    use crate::pla::likelihood_statistic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn led() -> LedModel {
        LedModel::new(47.5).unwrap()
    }

    fn pd() -> Photodetector {
        Photodetector::new(1e-4, 1.5, 120.0, 0.54).unwrap()
    }

    fn power() -> PowerModel {
        PowerModel::plain(25.0, GainExponent::Squared)
    }

    fn scene() -> Scene {
        Scene {
            room: Vec3::new(5.0, 5.0, 3.0),
            alice: OrientedPoint::new(Vec3::new(2.5, 2.5, 3.0), Vec3::new(0.0, 0.0, -1.0)).unwrap(),
            bob: OrientedPoint::new(Vec3::new(2.5, 2.5, 0.85), Vec3::new(-1.0, 0.0, 0.0)).unwrap(),
            grid: CrisGrid::new(Vec3::new(0.0, 2.5, 1.5), 10, 6, 0.1, Vec3::new(1.0, 0.0, 0.0)).unwrap(),
        }
    }

    fn alice_weights(s: &Scene) -> ElementWeights {
        let elements = s.grid.element_points(s.room).unwrap();
        ElementWeights::compute(&s.alice, &elements, &s.bob, &led(), &pd(), s.grid.element_area()).unwrap()
    }

    #[test]
    fn clone_at_alice_position_is_indistinguishable() {
        let s = scene();
        let clone = PassiveAttacker { position: s.alice.position };
        let config = fixed_cyclic(s.grid.n_elements(), &default_profiles());
        let from_attacker = passive_received_powers(&s, &clone, &config, &led(), &pd(), &power()).unwrap();
        let from_alice = power().received(&alice_weights(&s).gains(&config).unwrap());
        assert_eq!(from_attacker, from_alice);
        assert_eq!(likelihood_statistic(&from_attacker, &from_alice), 0.0);
    }

    #[test]
    fn farther_attacker_scores_higher_noise_free() {
        let s = scene();
        let config = fixed_cyclic(s.grid.n_elements(), &default_profiles());
        let reference = power().received(&alice_weights(&s).gains(&config).unwrap());
        let near = PassiveAttacker { position: Vec3::new(2.7, 2.5, 3.0) };
        let far = PassiveAttacker { position: Vec3::new(4.1, 2.5, 3.0) };
        let e_near = passive_received_powers(&s, &near, &config, &led(), &pd(), &power()).unwrap();
        let e_far = passive_received_powers(&s, &far, &config, &led(), &pd(), &power()).unwrap();
        assert_ne!(e_near, e_far);
        let l_near = likelihood_statistic(&e_near, &reference);
        let l_far = likelihood_statistic(&e_far, &reference);
        assert!(l_far > l_near, "L at 4.1 m ({l_far}) should exceed L at 2.7 m ({l_near})");
    }

    #[test]
    fn dark_configuration_yields_zero_powers() {
        let s = scene();
        let attacker = PassiveAttacker { position: Vec3::new(3.0, 2.5, 3.0) };
        let config = CrisConfiguration::new(vec![[0.0; 4]; s.grid.n_elements()]).unwrap();
        let e = passive_received_powers(&s, &attacker, &config, &led(), &pd(), &power()).unwrap();
        assert_eq!(e, ColorVector::ZERO);
    }

    #[test]
    fn attacker_outside_room_rejected() {
        let s = scene();
        let outside = PassiveAttacker { position: Vec3::new(6.0, 2.5, 3.0) };
        let config = fixed_cyclic(s.grid.n_elements(), &default_profiles());
        assert!(passive_received_powers(&s, &outside, &config, &led(), &pd(), &power()).is_err());
    }

    #[test]
    fn budget_exact_for_fixed_cyclic() {
        let s = scene();
        let w = alice_weights(&s);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let budget = average_alice_power(&w, &power(), StrategyKind::FixedCyclic, &default_profiles(), 100, &mut rng).unwrap();
        assert_eq!(budget.standard_error, 0.0);
        let expected = power().received(&w.gains(&fixed_cyclic(60, &default_profiles())).unwrap()).sum();
        assert_eq!(budget.mean, expected);
    }

    #[test]
    fn budget_standard_error_scales_with_samples() {
        // Quadrupling the sample count roughly halves the standard error.
        let s = scene();
        let w = alice_weights(&s);
        let b1 = average_alice_power(
            &w, &power(), StrategyKind::DynamicRandom, &default_profiles(), 400,
            &mut ChaCha12Rng::seed_from_u64(5),
        )
        .unwrap();
        let b2 = average_alice_power(
            &w, &power(), StrategyKind::DynamicRandom, &default_profiles(), 1600,
            &mut ChaCha12Rng::seed_from_u64(6),
        )
        .unwrap();
        let ratio = b1.standard_error / b2.standard_error;
        assert!((ratio - 2.0).abs() < 0.4, "SE ratio {ratio} should be close to 2");
    }

    #[test]
    fn budget_estimates_agree_across_seeds() {
        let s = scene();
        let w = alice_weights(&s);
        let b1 = average_alice_power(
            &w, &power(), StrategyKind::RandomPermutation, &default_profiles(), 1000,
            &mut ChaCha12Rng::seed_from_u64(7),
        )
        .unwrap();
        let b2 = average_alice_power(
            &w, &power(), StrategyKind::RandomPermutation, &default_profiles(), 1000,
            &mut ChaCha12Rng::seed_from_u64(8),
        )
        .unwrap();
        let combined = (b1.standard_error.powi(2) + b2.standard_error.powi(2)).sqrt();
        assert!(
            (b1.mean - b2.mean).abs() <= 3.0 * combined,
            "means {} and {} differ by more than 3 combined SEs ({combined})",
            b1.mean,
            b2.mean
        );
    }

    #[test]
    fn los_equal_split_quarters_the_budget() {
        let s = scene();
        let attacker = LosAttacker {
            position: Vec3::new(0.1, 2.5, 0.85),
            power_budget: 4.0,
            split: SplitPolicy::Equal,
        };
        let outcome = los_attack_powers(&attacker, &s.bob, &led(), &pd(), GainExponent::Squared).unwrap();
        assert_eq!(outcome.received.0, [1.0; 4]);
        let total = outcome.received.sum();
        assert!((total - 4.0).abs() <= 1e-9 * 4.0);
        assert!(outcome.gain > 0.0);
        assert!(outcome.tx_powers.0.iter().all(|&p| p.is_finite() && p > 0.0));
    }

    #[test]
    fn los_received_power_invariant_to_distance() {
        // The budget constraint fixes what the receiver sees; moving the
        // attacker only rescales her transmit powers.
        let s = scene();
        let near = LosAttacker {
            position: Vec3::new(0.1, 2.5, 0.85),
            power_budget: 2.0,
            split: SplitPolicy::Equal,
        };
        let far = LosAttacker {
            position: Vec3::new(1.2, 2.5, 0.85),
            power_budget: 2.0,
            split: SplitPolicy::Equal,
        };
        let o_near = los_attack_powers(&near, &s.bob, &led(), &pd(), GainExponent::Squared).unwrap();
        let o_far = los_attack_powers(&far, &s.bob, &led(), &pd(), GainExponent::Squared).unwrap();
        assert_eq!(o_near.received, o_far.received);
        assert_ne!(o_near.tx_powers, o_far.tx_powers);
    }

    #[test]
    fn los_unreachable_receiver_errors() {
        let s = scene();
        // Attacker directly behind the receiver plane: incidence clamps to zero.
        let behind = LosAttacker {
            position: Vec3::new(4.9, 2.5, 0.85),
            power_budget: 1.0,
            split: SplitPolicy::Equal,
        };
        assert!(matches!(
            los_attack_powers(&behind, &s.bob, &led(), &pd(), GainExponent::Squared),
            Err(Error::UnreachableReceiver)
        ));
    }

    #[test]
    fn custom_split_must_sum_to_one() {
        assert!(SplitPolicy::Custom([0.4, 0.3, 0.2, 0.1]).fractions().is_ok());
        assert!(SplitPolicy::Custom([0.5, 0.5, 0.5, 0.5]).fractions().is_err());
        assert!(SplitPolicy::Custom([-0.1, 0.5, 0.3, 0.3]).fractions().is_err());
    }
}
