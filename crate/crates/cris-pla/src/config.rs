//! Experiment configuration file: a TOML schema with defaults for every
//! physical parameter, validation with collected violations, and
//! `key=value` overrides.

use serde::{Deserialize, Serialize};

use crate::attack::SplitPolicy;
use crate::channel::{GainExponent, LedModel, Photodetector};
use crate::cris::{ReflectanceProfile, StrategyKind};
use crate::geometry::{CrisGrid, OrientedPoint, Scene, Vec3};
use crate::pla::{CouplingMode, PowerModel};
use crate::sim::{AttackerSpec, ExperimentPlan, PlaMode, ReferenceMode};
use crate::spectral::{HModelParams, SpectralBand};

/// Errors surfaced by configuration loading.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read configuration: {0}")]
    Io(#[from] std::io::Error),

    /// Syntax errors; the message carries line/column anchors.
    #[error("configuration parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("invalid override '{0}': expected key=value")]
    Override(String),

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

const CANONICAL_SEED: u64 = 42;

fn default_schema_version() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    #[serde(default = "SceneSection::default_room")]
    pub room: [f64; 3],
    #[serde(default = "SceneSection::default_alice")]
    pub alice: [f64; 3],
    #[serde(default = "SceneSection::default_alice_normal")]
    pub alice_normal: [f64; 3],
    #[serde(default = "SceneSection::default_bob")]
    pub bob: [f64; 3],
    #[serde(default = "SceneSection::default_bob_normal")]
    pub bob_normal: [f64; 3],
}

impl SceneSection {
    fn default_room() -> [f64; 3] {
        [5.0, 5.0, 3.0]
    }
    fn default_alice() -> [f64; 3] {
        [2.5, 2.5, 3.0]
    }
    fn default_alice_normal() -> [f64; 3] {
        [0.0, 0.0, -1.0]
    }
    fn default_bob() -> [f64; 3] {
        [2.5, 2.5, 0.85]
    }
    fn default_bob_normal() -> [f64; 3] {
        [-1.0, 0.0, 0.0]
    }
}

impl Default for SceneSection {
    fn default() -> Self {
        Self {
            room: Self::default_room(),
            alice: Self::default_alice(),
            alice_normal: Self::default_alice_normal(),
            bob: Self::default_bob(),
            bob_normal: Self::default_bob_normal(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedSection {
    #[serde(default = "LedSection::default_half_angle")]
    pub half_angle_deg: f64,
    /// H-model PSD parameters per die, R A G B order.
    #[serde(default = "crate::spectral::default_led_psd_params")]
    pub psd: [HModelParams; 4],
}

impl LedSection {
    fn default_half_angle() -> f64 {
        47.5
    }
}

impl Default for LedSection {
    fn default() -> Self {
        Self {
            half_angle_deg: Self::default_half_angle(),
            psd: crate::spectral::default_led_psd_params(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdSection {
    #[serde(default = "PdSection::default_area")]
    pub area_m2: f64,
    #[serde(default = "PdSection::default_n")]
    pub refractive_index: f64,
    #[serde(default = "PdSection::default_fov")]
    pub fov_deg: f64,
    #[serde(default = "PdSection::default_responsivity")]
    pub responsivity: f64,
}

impl PdSection {
    fn default_area() -> f64 {
        1e-4
    }
    fn default_n() -> f64 {
        1.5
    }
    fn default_fov() -> f64 {
        120.0
    }
    fn default_responsivity() -> f64 {
        0.54
    }
}

impl Default for PdSection {
    fn default() -> Self {
        Self {
            area_m2: Self::default_area(),
            refractive_index: Self::default_n(),
            fov_deg: Self::default_fov(),
            responsivity: Self::default_responsivity(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    #[serde(default = "FilterSection::default_lower")]
    pub lower: [f64; 4],
    #[serde(default = "FilterSection::default_upper")]
    pub upper: [f64; 4],
}

impl FilterSection {
    fn default_lower() -> [f64; 4] {
        [612.0, 575.0, 483.0, 400.0]
    }
    fn default_upper() -> [f64; 4] {
        [680.0, 612.0, 575.0, 483.0]
    }
}

impl Default for FilterSection {
    fn default() -> Self {
        Self { lower: Self::default_lower(), upper: Self::default_upper() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrisSection {
    #[serde(default = "CrisSection::default_rows")]
    pub rows: usize,
    #[serde(default = "CrisSection::default_cols")]
    pub cols: usize,
    #[serde(default = "CrisSection::default_side")]
    pub element_side_m: f64,
    #[serde(default = "CrisSection::default_center")]
    pub center: [f64; 3],
    #[serde(default = "CrisSection::default_normal")]
    pub normal: [f64; 3],
    #[serde(default = "CrisSection::default_strategy")]
    pub strategy: StrategyKind,
    #[serde(default = "CrisSection::default_profiles")]
    pub profiles: [[f64; 4]; 4],
}

impl CrisSection {
    fn default_rows() -> usize {
        50
    }
    fn default_cols() -> usize {
        30
    }
    fn default_side() -> f64 {
        0.1
    }
    fn default_center() -> [f64; 3] {
        [0.0, 2.5, 1.5]
    }
    fn default_normal() -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }
    fn default_strategy() -> StrategyKind {
        StrategyKind::DynamicRandom
    }
    fn default_profiles() -> [[f64; 4]; 4] {
        crate::cris::default_profiles().map(|p| p.0)
    }
}

impl Default for CrisSection {
    fn default() -> Self {
        Self {
            rows: Self::default_rows(),
            cols: Self::default_cols(),
            element_side_m: Self::default_side(),
            center: Self::default_center(),
            normal: Self::default_normal(),
            strategy: Self::default_strategy(),
            profiles: Self::default_profiles(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    Passive,
    Los,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitPolicyConfig {
    Named(String),
    Fractions([f64; 4]),
}

impl Default for SplitPolicyConfig {
    fn default() -> Self {
        SplitPolicyConfig::Named("equal".into())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    #[serde(default = "AttackSection::default_kind")]
    pub kind: AttackKind,
    /// Passive attacker positions; one experiment plan per position.
    #[serde(default = "AttackSection::default_positions")]
    pub positions: Vec<[f64; 3]>,
    /// Line-of-sight attacker position.
    #[serde(default = "AttackSection::default_los_position")]
    pub los_position: [f64; 3],
    #[serde(default)]
    pub split_policy: SplitPolicyConfig,
}

impl AttackSection {
    fn default_kind() -> AttackKind {
        AttackKind::Passive
    }
    fn default_positions() -> Vec<[f64; 3]> {
        vec![
            [2.7, 2.5, 3.0],
            [3.05, 2.5, 3.0],
            [3.4, 2.5, 3.0],
            [3.75, 2.5, 3.0],
            [4.1, 2.5, 3.0],
        ]
    }
    fn default_los_position() -> [f64; 3] {
        [0.1, 2.5, 0.85]
    }
}

impl Default for AttackSection {
    fn default() -> Self {
        Self {
            kind: Self::default_kind(),
            positions: Self::default_positions(),
            los_position: Self::default_los_position(),
            split_policy: SplitPolicyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Genie,
    MeasuredIa,
    Estimated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "SimSection::default_trials")]
    pub trials: usize,
    #[serde(default = "SimSection::default_snr")]
    pub snr_db: f64,
    #[serde(default = "SimSection::default_seed")]
    pub seed: u64,
    /// Protocol mode; derived from the strategy when omitted.
    #[serde(default)]
    pub mode: Option<PlaMode>,
    #[serde(default = "SimSection::default_reference")]
    pub reference: ReferenceKind,
    /// Probes averaged for the measured single-configuration reference.
    #[serde(default = "SimSection::default_ia_probes")]
    pub ia_probes: usize,
    /// Probe configurations for the fitted predictor; 0 means one per element.
    #[serde(default)]
    pub probe_configs: usize,
    #[serde(default = "SimSection::default_thresholds")]
    pub n_thresholds: usize,
    #[serde(default = "SimSection::default_gain_exponent")]
    pub gain_exponent: u8,
    #[serde(default = "SimSection::default_coupling")]
    pub spectral_coupling: CouplingMode,
    #[serde(default = "SimSection::default_tx_power")]
    pub tx_power_w: f64,
    #[serde(default = "SimSection::default_budget_samples")]
    pub budget_samples: usize,
}

impl SimSection {
    fn default_trials() -> usize {
        20_000
    }
    fn default_snr() -> f64 {
        10.0
    }
    fn default_seed() -> u64 {
        CANONICAL_SEED
    }
    fn default_reference() -> ReferenceKind {
        ReferenceKind::Genie
    }
    fn default_ia_probes() -> usize {
        1
    }
    fn default_thresholds() -> usize {
        512
    }
    fn default_gain_exponent() -> u8 {
        2
    }
    fn default_coupling() -> CouplingMode {
        CouplingMode::Off
    }
    fn default_tx_power() -> f64 {
        25.0
    }
    fn default_budget_samples() -> usize {
        1000
    }
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            trials: Self::default_trials(),
            snr_db: Self::default_snr(),
            seed: Self::default_seed(),
            mode: None,
            reference: Self::default_reference(),
            ia_probes: Self::default_ia_probes(),
            probe_configs: 0,
            n_thresholds: Self::default_thresholds(),
            gain_exponent: Self::default_gain_exponent(),
            spectral_coupling: Self::default_coupling(),
            tx_power_w: Self::default_tx_power(),
            budget_samples: Self::default_budget_samples(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "OutputSection::default_directory")]
    pub directory: String,
    #[serde(default = "OutputSection::default_formats")]
    pub formats: Vec<String>,
}

impl OutputSection {
    fn default_directory() -> String {
        "out".into()
    }
    fn default_formats() -> Vec<String> {
        vec!["csv".into()]
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: Self::default_directory(), formats: Self::default_formats() }
    }
}

/// The whole experiment configuration file. Every field except the schema
/// version has a factory default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub scene: SceneSection,
    #[serde(default)]
    pub led: LedSection,
    #[serde(default)]
    pub pd: PdSection,
    #[serde(default)]
    pub filters: FilterSection,
    #[serde(default)]
    pub cris: CrisSection,
    #[serde(default)]
    pub attack: AttackSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: default_schema_version(),
            scene: SceneSection::default(),
            led: LedSection::default(),
            pd: PdSection::default(),
            filters: FilterSection::default(),
            cris: CrisSection::default(),
            attack: AttackSection::default(),
            sim: SimSection::default(),
            output: OutputSection::default(),
        }
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Parses a configuration from TOML text. Syntax errors carry line anchors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    Ok(toml::from_str(text)?)
}

/// Parses TOML text after applying `key=value` overrides to the document.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[String],
) -> Result<ExperimentConfig, ConfigError> {
    if overrides.is_empty() {
        return parse_config(text);
    }
    let mut table: toml::Table = toml::from_str(text)?;
    for entry in overrides {
        apply_override(&mut table, entry)?;
    }
    let merged = toml::to_string(&table).expect("re-serializing a parsed table cannot fail");
    parse_config(&merged)
}

/// Sets a dotted-path key in a parsed TOML document. The value is parsed as
/// a TOML literal, falling back to a string when it is not one.
pub fn apply_override(table: &mut toml::Table, entry: &str) -> Result<(), ConfigError> {
    let (key, raw_value) = entry
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(entry.to_string()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(|part| part.is_empty()) {
        return Err(ConfigError::Override(entry.to_string()));
    }
    let value = parse_toml_value(raw_value.trim());

    let mut current = table;
    let parts: Vec<&str> = key.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        current = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::Override(format!("{key}: '{part}' is not a table")))?;
    }
    current.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn parse_toml_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key v just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

impl ExperimentConfig {
    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        if self.schema_version != 1 {
            violations.push(format!("schema_version: expected 1, got {}", self.schema_version));
        }
        if self.sim.trials == 0 {
            violations.push("sim.trials: must be >= 1".into());
        }
        if !self.sim.snr_db.is_finite() {
            violations.push(format!("sim.snr_db: must be finite, got {}", self.sim.snr_db));
        }
        if self.sim.n_thresholds < 2 {
            violations.push("sim.n_thresholds: must be >= 2".into());
        }
        if !matches!(self.sim.gain_exponent, 1 | 2) {
            violations.push(format!("sim.gain_exponent: must be 1 or 2, got {}", self.sim.gain_exponent));
        }
        if !(self.sim.tx_power_w >= 0.0) {
            violations.push(format!("sim.tx_power_w: must be >= 0, got {}", self.sim.tx_power_w));
        }
        if self.sim.budget_samples == 0 {
            violations.push("sim.budget_samples: must be >= 1".into());
        }
        if self.sim.reference == ReferenceKind::MeasuredIa && self.sim.ia_probes == 0 {
            violations.push("sim.ia_probes: must be >= 1 for the measured reference".into());
        }

        for c in 0..4 {
            if !(self.filters.lower[c] < self.filters.upper[c]) {
                violations.push(format!(
                    "filters: band {c} must satisfy lower < upper, got [{}, {}]",
                    self.filters.lower[c], self.filters.upper[c]
                ));
            }
        }
        for (c, p) in self.led.psd.iter().enumerate() {
            if let Err(e) =
                HModelParams::new(p.lambda_p, p.delta_lambda_1, p.delta_lambda_2, p.k1, p.k2)
            {
                violations.push(format!("led.psd[{c}]: {e}"));
            }
        }
        for (i, p) in self.cris.profiles.iter().enumerate() {
            if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
                violations.push(format!("cris.profiles[{i}]: entries must lie in [0, 1], got {p:?}"));
            }
        }
        if let SplitPolicyConfig::Named(name) = &self.attack.split_policy {
            if name != "equal" {
                violations.push(format!("attack.split_policy: unknown policy '{name}'"));
            }
        }
        if self.attack.kind == AttackKind::Passive && self.attack.positions.is_empty() {
            violations.push("attack.positions: passive attack needs at least one position".into());
        }

        // Physics sanity: build the scene and plans and surface their errors.
        match self.resolve_plans() {
            Ok(plans) => {
                for plan in &plans {
                    if let Err(e) = plan.validate() {
                        violations.push(e.to_string());
                    }
                }
            }
            Err(e) => violations.push(e.to_string()),
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    pub fn scene(&self) -> crate::Result<Scene> {
        Ok(Scene {
            room: vec3(self.scene.room),
            alice: OrientedPoint::new(vec3(self.scene.alice), vec3(self.scene.alice_normal))?,
            bob: OrientedPoint::new(vec3(self.scene.bob), vec3(self.scene.bob_normal))?,
            grid: CrisGrid::new(
                vec3(self.cris.center),
                self.cris.rows,
                self.cris.cols,
                self.cris.element_side_m,
                vec3(self.cris.normal),
            )?,
        })
    }

    fn split_policy(&self) -> SplitPolicy {
        match &self.attack.split_policy {
            SplitPolicyConfig::Named(_) => SplitPolicy::Equal,
            SplitPolicyConfig::Fractions(f) => SplitPolicy::Custom(*f),
        }
    }

    fn reference_mode(&self) -> ReferenceMode {
        match self.sim.reference {
            ReferenceKind::Genie => ReferenceMode::Genie,
            ReferenceKind::MeasuredIa => ReferenceMode::MeasuredIa { n_probes: self.sim.ia_probes },
            ReferenceKind::Estimated => ReferenceMode::Estimated {
                n_probe_configs: if self.sim.probe_configs == 0 {
                    self.cris.rows * self.cris.cols
                } else {
                    self.sim.probe_configs
                },
            },
        }
    }

    /// Resolves the configuration into one plan per attacker.
    pub fn resolve_plans(&self) -> crate::Result<Vec<ExperimentPlan>> {
        let scene = self.scene()?;
        let led = LedModel::new(self.led.half_angle_deg)?;
        let pd = Photodetector::new(
            self.pd.area_m2,
            self.pd.refractive_index,
            self.pd.fov_deg,
            self.pd.responsivity,
        )?;
        let bands: [SpectralBand; 4] = [
            SpectralBand::new(self.filters.lower[0], self.filters.upper[0])?,
            SpectralBand::new(self.filters.lower[1], self.filters.upper[1])?,
            SpectralBand::new(self.filters.lower[2], self.filters.upper[2])?,
            SpectralBand::new(self.filters.lower[3], self.filters.upper[3])?,
        ];
        let exponent = match self.sim.gain_exponent {
            1 => GainExponent::Linear,
            _ => GainExponent::Squared,
        };
        let power = PowerModel::new(
            self.sim.tx_power_w,
            exponent,
            self.sim.spectral_coupling,
            &self.led.psd,
            &bands,
        )?;
        let mut profiles_arr: [ReflectanceProfile; 4] =
            [ReflectanceProfile([0.0; 4]); 4];
        for (i, p) in self.cris.profiles.iter().enumerate() {
            profiles_arr[i] = ReflectanceProfile::new(*p)?;
        }
        let pla_mode = self.sim.mode.unwrap_or(if self.cris.strategy.is_dynamic() {
            PlaMode::ChallengeResponse
        } else {
            PlaMode::SingleConfiguration
        });

        let attackers: Vec<AttackerSpec> = match self.attack.kind {
            AttackKind::Passive => self
                .attack
                .positions
                .iter()
                .map(|p| AttackerSpec::Passive { position: vec3(*p) })
                .collect(),
            AttackKind::Los => vec![AttackerSpec::Los {
                position: vec3(self.attack.los_position),
                split: self.split_policy(),
            }],
        };

        Ok(attackers
            .into_iter()
            .map(|attacker| ExperimentPlan {
                scene: scene.clone(),
                led,
                pd,
                power,
                strategy: self.cris.strategy,
                profiles: profiles_arr,
                attacker,
                trials: self.sim.trials,
                snr_db: self.sim.snr_db,
                master_seed: self.sim.seed,
                pla_mode,
                reference: self.reference_mode(),
                n_thresholds: self.sim.n_thresholds,
                budget_samples: self.sim.budget_samples,
            })
            .collect())
    }

    /// The resolved configuration as TOML, for `validate`'s report.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves_to_defaults() {
        let cfg = parse_config("schema_version = 1\n").unwrap();
        assert_eq!(cfg.cris.rows, 50);
        assert_eq!(cfg.sim.trials, 20_000);
        cfg.validate().unwrap();
        let plans = cfg.resolve_plans().unwrap();
        assert_eq!(plans.len(), 5, "one plan per default passive position");
        assert_eq!(plans[0].n_elements(), 1500);
        assert_eq!(plans[0].pla_mode, PlaMode::ChallengeResponse);
    }

    #[test]
    fn schema_version_is_mandatory() {
        assert!(parse_config("").is_err());
        assert!(parse_config("[sim]\ntrials = 5\n").is_err());
    }

    #[test]
    fn parse_error_carries_line_anchor() {
        let err = parse_config("schema_version = 1\n[sim\ntrials = 5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "expected a line anchor, got: {msg}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("schema_version = 1\n[sim]\ntxpower = 3\n").unwrap_err();
        assert!(err.to_string().contains("txpower"), "{err}");
    }

    #[test]
    fn overrides_change_nested_values() {
        let text = "schema_version = 1\n";
        let cfg = parse_config_with_overrides(
            text,
            &["sim.trials=10".into(), "cris.strategy=\"fixed-cyclic\"".into()],
        )
        .unwrap();
        assert_eq!(cfg.sim.trials, 10);
        assert_eq!(cfg.cris.strategy, StrategyKind::FixedCyclic);
        // Unquoted strings fall back to string values.
        let cfg = parse_config_with_overrides(text, &["cris.strategy=static-random".into()]).unwrap();
        assert_eq!(cfg.cris.strategy, StrategyKind::StaticRandom);
    }

    #[test]
    fn malformed_override_rejected() {
        let mut table = toml::Table::new();
        assert!(matches!(apply_override(&mut table, "no-equals"), Err(ConfigError::Override(_))));
        assert!(matches!(apply_override(&mut table, "=5"), Err(ConfigError::Override(_))));
        assert!(matches!(apply_override(&mut table, "a..b=5"), Err(ConfigError::Override(_))));
    }

    #[test]
    fn oversized_grid_fails_validation() {
        let cfg = parse_config_with_overrides(
            "schema_version = 1\n",
            &["cris.rows=60".into(), "cris.cols=40".into()],
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
    }

    #[test]
    fn negative_trials_fails_validation() {
        let cfg = parse_config_with_overrides("schema_version = 1\n", &["sim.trials=0".into()]).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn mode_strategy_mismatch_fails_validation() {
        let cfg = parse_config_with_overrides(
            "schema_version = 1\n",
            &["sim.mode=\"sc\"".into()], // default strategy is dynamic-random
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("static strategy"), "{err}");
    }

    #[test]
    fn los_attack_resolves_single_plan() {
        let cfg = parse_config_with_overrides("schema_version = 1\n", &["attack.kind=\"los\"".into()]).unwrap();
        let plans = cfg.resolve_plans().unwrap();
        assert_eq!(plans.len(), 1);
        assert!(matches!(plans[0].attacker, AttackerSpec::Los { .. }));
    }

    #[test]
    fn custom_split_fractions_accepted() {
        let cfg = parse_config_with_overrides(
            "schema_version = 1\n",
            &[
                "attack.kind=\"los\"".into(),
                "attack.split_policy=[0.4, 0.3, 0.2, 0.1]".into(),
            ],
        )
        .unwrap();
        cfg.validate().unwrap();
        match cfg.resolve_plans().unwrap()[0].attacker {
            AttackerSpec::Los { split: SplitPolicy::Custom(f), .. } => assert_eq!(f, [0.4, 0.3, 0.2, 0.1]),
            ref other => panic!("unexpected attacker {other:?}"),
        }
    }

    #[test]
    fn effective_config_roundtrips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml();
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parsed.cris.rows, cfg.cris.rows);
        assert_eq!(parsed.sim.seed, cfg.sim.seed);
    }
}
