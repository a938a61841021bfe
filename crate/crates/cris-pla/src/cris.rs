//! Mirror-array configurations and the four configuration strategies used
//! by the verifier.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Per-color reflectance of one mirror element, in canonical R, A, G, B order.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReflectanceProfile(pub [f64; 4]);

impl ReflectanceProfile {
    pub fn new(values: [f64; 4]) -> Result<Self> {
        for v in values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ReflectivityOutOfRange(v));
            }
        }
        Ok(Self(values))
    }
}

/// The four stock profiles, each favoring one color channel:
/// R, A, G, B dominant in that order.
pub fn default_profiles() -> [ReflectanceProfile; 4] {
    [
        ReflectanceProfile([1.0, 0.2, 0.0, 0.0]),
        ReflectanceProfile([0.2, 1.0, 0.2, 0.0]),
        ReflectanceProfile([0.0, 0.2, 1.0, 0.2]),
        ReflectanceProfile([0.0, 0.0, 0.2, 1.0]),
    ]
}

/// One full mirror-array setting: per-element, per-color reflectivities.
///
/// Row `i` holds element `i`'s reflectivities in canonical color order,
/// with elements in the grid's row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CrisConfiguration {
    rho: Vec<[f64; 4]>,
}

impl CrisConfiguration {
    pub fn new(rho: Vec<[f64; 4]>) -> Result<Self> {
        for row in &rho {
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ReflectivityOutOfRange(v));
                }
            }
        }
        Ok(Self { rho })
    }

    pub fn n_elements(&self) -> usize {
        self.rho.len()
    }

    /// Reflectivity of element `i` for color index `c`.
    pub fn rho(&self, element: usize, color: usize) -> f64 {
        self.rho[element][color]
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rho
    }

    /// Scales every entry by `alpha` in [0, 1].
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::ReflectivityOutOfRange(alpha));
        }
        Ok(Self {
            rho: self.rho.iter().map(|r| r.map(|v| v * alpha)).collect(),
        })
    }
}

/// The four configuration strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    /// One deterministic configuration cycling the four stock profiles.
    FixedCyclic,
    /// One uniform-random configuration drawn per experiment.
    StaticRandom,
    /// A fresh uniform-random configuration per transmission.
    DynamicRandom,
    /// The cyclic assignment, freshly permuted per transmission.
    RandomPermutation,
}

impl StrategyKind {
    /// Dynamic strategies draw a fresh configuration per transmission;
    /// static ones hold a single configuration for the whole experiment.
    pub fn is_dynamic(self) -> bool {
        matches!(self, StrategyKind::DynamicRandom | StrategyKind::RandomPermutation)
    }

    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::FixedCyclic => "fixed-cyclic",
            StrategyKind::StaticRandom => "static-random",
            StrategyKind::DynamicRandom => "dynamic-random",
            StrategyKind::RandomPermutation => "random-permutation",
        }
    }
}

/// Cyclic assignment: element `i` (row-major order) gets `profiles[i mod 4]`.
pub fn fixed_cyclic(n_elements: usize, profiles: &[ReflectanceProfile; 4]) -> CrisConfiguration {
    CrisConfiguration {
        rho: (0..n_elements).map(|i| profiles[i % 4].0).collect(),
    }
}

/// Every reflectivity drawn i.i.d. uniform on [0, 1].
///
/// Draw order is fixed (elements outer, colors inner) so a seeded stream
/// always produces the same configuration.
pub fn static_random<R: Rng>(n_elements: usize, rng: &mut R) -> CrisConfiguration {
    CrisConfiguration {
        rho: (0..n_elements)
            .map(|_| std::array::from_fn(|_| rng.random::<f64>()))
            .collect(),
    }
}

/// Uniform random permutation of the cyclic assignment: profile multiplicity
/// is preserved exactly (N/4 each when 4 divides N).
pub fn random_permutation<R: Rng>(
    n_elements: usize,
    profiles: &[ReflectanceProfile; 4],
    rng: &mut R,
) -> CrisConfiguration {
    let mut assignment: Vec<usize> = (0..n_elements).map(|i| i % 4).collect();
    assignment.shuffle(rng);
    CrisConfiguration {
        rho: assignment.into_iter().map(|k| profiles[k].0).collect(),
    }
}

/// Generator yielding one fresh configuration per call, for the dynamic
/// strategies. Single-owner: one generator per worker, each on its own
/// seeded substream.
#[derive(Debug, Clone)]
pub struct ConfigurationGenerator<R: Rng> {
    kind: StrategyKind,
    n_elements: usize,
    profiles: [ReflectanceProfile; 4],
    rng: R,
}

impl<R: Rng> ConfigurationGenerator<R> {
    pub fn new(
        kind: StrategyKind,
        n_elements: usize,
        profiles: [ReflectanceProfile; 4],
        rng: R,
    ) -> Result<Self> {
        if !kind.is_dynamic() {
            return Err(Error::InvalidParameter(format!(
                "{} is static; it has no per-transmission generator",
                kind.label()
            )));
        }
        Ok(Self { kind, n_elements, profiles, rng })
    }

    pub fn next_configuration(&mut self) -> CrisConfiguration {
        draw_dynamic(self.kind, self.n_elements, &self.profiles, &mut self.rng)
    }
}

/// One dynamic draw from a caller-supplied stream. The Monte Carlo engine
/// calls this with a per-trial substream so results are independent of
/// worker count.
pub fn draw_dynamic<R: Rng>(
    kind: StrategyKind,
    n_elements: usize,
    profiles: &[ReflectanceProfile; 4],
    rng: &mut R,
) -> CrisConfiguration {
    match kind {
        StrategyKind::DynamicRandom => static_random(n_elements, rng),
        StrategyKind::RandomPermutation => random_permutation(n_elements, profiles, rng),
        StrategyKind::FixedCyclic | StrategyKind::StaticRandom => {
            unreachable!("static strategies are drawn once at experiment setup")
        }
    }
}

/// The verifier's challenge source: a stored configuration for static
/// strategies, a generator for dynamic ones. The generator's stream belongs
/// to the verifier and is never shared with attacker-visible state.
#[derive(Debug, Clone)]
pub enum ChallengeSelector<R: Rng> {
    Static(CrisConfiguration),
    Dynamic(ConfigurationGenerator<R>),
}

impl<R: Rng> ChallengeSelector<R> {
    /// Builds the selector for `kind`, drawing the static-random
    /// configuration from `rng` when needed.
    pub fn new(
        kind: StrategyKind,
        n_elements: usize,
        profiles: [ReflectanceProfile; 4],
        mut rng: R,
    ) -> Result<Self> {
        Ok(match kind {
            StrategyKind::FixedCyclic => ChallengeSelector::Static(fixed_cyclic(n_elements, &profiles)),
            StrategyKind::StaticRandom => ChallengeSelector::Static(static_random(n_elements, &mut rng)),
            _ => ChallengeSelector::Dynamic(ConfigurationGenerator::new(kind, n_elements, profiles, rng)?),
        })
    }

    /// The configuration for the next transmission.
    pub fn challenge(&mut self) -> CrisConfiguration {
        match self {
            ChallengeSelector::Static(cfg) => cfg.clone(),
            ChallengeSelector::Dynamic(generator) => generator.next_configuration(),
        }
    }
}
