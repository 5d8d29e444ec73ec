//! Run configuration: a single TOML file with every physics default and a
//! provenance comment per value. Unknown keys are rejected and all values
//! are validated against the library's type invariants at load.

use photoion::dispersion::{ktp_z, DispersionSet};
use photoion::ion::{LoadingScenario, RydbergSeries, TransitionSpec};
use photoion::jumps::{IonLevelScheme, SpotGeometry};
use photoion::led::LedSpec;
use photoion::optics::{
    AngularModel, Collector, FiberSpec, ImagingTrain, OpticalElement, SourcePatch,
};
use photoion::shg::{CrystalSpec, ModeCount, PumpBeam};
use photoion::units::{Intensity, Length, Power, Wavelength};
use serde::{Deserialize, Serialize};

/// Configuration error: names the offending section/key.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

fn in_section<T>(section: &str, r: photoion::Result<T>) -> CResult<T> {
    r.map_err(|e| ConfigError(format!("[{section}] {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub shg: ShgSection,
    pub led: LedSection,
    pub collection: CollectionSection,
    pub fiber: FiberSection,
    pub optics: OpticsSection,
    pub ion: IonSection,
    pub loading: LoadingSection,
    pub jumps: JumpsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub length_mm: f64,
    pub poling_period_um: f64,
    pub duty_cycle: f64,
    pub qpm_order: u32,
    pub d33_pm_per_v: f64,
    pub absorption_2w_per_cm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub power_mw: f64,
    pub waist_um: f64,
    pub focus_position_mm: f64,
    pub linewidth_mhz: f64,
    pub mode_count: ModeCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShgSection {
    pub measured_sh_power_uw: f64,
    pub tune_t_min_c: f64,
    pub tune_t_max_c: f64,
    pub tune_points: usize,
    pub blue_path_transmission: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub total_power_mw: f64,
    pub polarized_fraction: f64,
    pub emitter_size_mm: f64,
    pub resonant_anchor_nm: f64,
    pub resonant_bandwidth_nm: f64,
    /// Optional tabulated spectrum (CSV `wavelength_nm,density_w_per_nm`);
    /// overrides the Gaussian shape and is normalized to the total power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionSection {
    pub numerical_aperture: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub core_um: f64,
    pub numerical_aperture: f64,
    pub length_m: f64,
    pub transmission: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsSection {
    pub uv_path_transmission: f64,
    pub spot_um: f64,
    pub band_lo_nm: f64,
    pub band_hi_nm: f64,
    pub led_relay: TrainSection,
    pub trap_relay: TrainSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub aberration_factor: f64,
    pub elements: Vec<ElementEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub kind: String,
    pub mm: f64,
    #[serde(default = "default_transmittance")]
    pub transmittance: f64,
}

fn default_transmittance() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonSection {
    pub wavelength_nm: f64,
    pub linewidth_mhz: f64,
    pub saturation_intensity_mw_mm2: f64,
    pub series_limit_per_cm: f64,
    pub quantum_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadingSection {
    pub atom_flux_per_s: f64,
    pub interaction_length_um: f64,
    pub mean_speed_m_per_s: f64,
    pub ionization_rate_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpsSection {
    pub sp_wavelength_nm: f64,
    pub oscillator_strength: f64,
    pub branching_denominator: f64,
    pub tau_dark_s: f64,
    pub tau_p_ns: f64,
    pub r_qj_hz: f64,
    pub simulate_duration_s: f64,
    pub seed: u64,
}

/// The paper-default configuration checked into the repository.
pub const PAPER_DEFAULTS: &str = include_str!("../paper_defaults.toml");

impl RunConfig {
    pub fn paper_defaults() -> Self {
        Self::parse(PAPER_DEFAULTS).expect("shipped defaults are valid")
    }

    pub fn parse(text: &str) -> CResult<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Build every domain object once so all type invariants are enforced
    /// at load time.
    pub fn validate(&self) -> CResult<()> {
        self.crystal(ktp_z())?;
        self.pump_beam()?;
        self.led_source()?;
        self.led_spectrum()?;
        self.fiber_spec()?;
        self.train("led_relay")?;
        self.train("trap_relay")?;
        self.collector()?;
        self.sp_transition()?;
        self.rydberg_series()?;
        self.loading_scenario()?;
        self.ion_level_scheme()?;
        self.spot()?;
        for (key, v) in [
            ("shg.blue_path_transmission", self.shg.blue_path_transmission),
            ("optics.uv_path_transmission", self.optics.uv_path_transmission),
            ("fiber.transmission", self.fiber.transmission),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(ConfigError(format!("{key} must be in (0,1], got {v}")));
            }
        }
        if self.optics.band_lo_nm >= self.optics.band_hi_nm {
            return Err(ConfigError(format!(
                "optics band [{}, {}] nm is reversed",
                self.optics.band_lo_nm, self.optics.band_hi_nm
            )));
        }
        if self.shg.tune_t_min_c >= self.shg.tune_t_max_c {
            return Err(ConfigError("shg tune range is reversed".to_string()));
        }
        Ok(())
    }

    pub fn crystal(&self, dispersion: DispersionSet) -> CResult<CrystalSpec> {
        in_section(
            "crystal",
            Length::from_mm(self.crystal.length_mm).and_then(|len| {
                CrystalSpec::new(
                    dispersion,
                    len,
                    Length::from_um(self.crystal.poling_period_um)?,
                    self.crystal.duty_cycle,
                    self.crystal.qpm_order,
                    self.crystal.d33_pm_per_v,
                    self.crystal.absorption_2w_per_cm,
                )
            }),
        )
    }

    pub fn pump_beam(&self) -> CResult<PumpBeam> {
        in_section(
            "pump",
            Wavelength::from_nm(self.pump.wavelength_nm).and_then(|w| {
                PumpBeam::new(
                    w,
                    Power::from_mw(self.pump.power_mw)?,
                    Length::from_um(self.pump.waist_um)?,
                    Length::from_mm(self.pump.focus_position_mm)?,
                    Length::from_mm(self.crystal.length_mm)?,
                    self.pump.linewidth_mhz,
                    self.pump.mode_count,
                )
            }),
        )
    }

    pub fn led_source(&self) -> CResult<SourcePatch> {
        in_section(
            "led",
            Length::from_mm(self.led.emitter_size_mm).and_then(|size| {
                SourcePatch::new(
                    size,
                    AngularModel::Tabulated(photoion::optics::led_angular_pattern()),
                    Power::from_mw(self.led.total_power_mw)?,
                    self.led.polarized_fraction,
                )
            }),
        )
    }

    pub fn led_spectrum(&self) -> CResult<LedSpec> {
        let total = in_section("led", Power::from_mw(self.led.total_power_mw))?;
        match &self.led.spectrum_csv {
            None => in_section(
                "led",
                LedSpec::gaussian(self.led.center_nm, self.led.fwhm_nm, total),
            ),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    ConfigError(format!("[led] cannot read spectrum_csv '{path}': {e}"))
                })?;
                in_section(
                    "led",
                    photoion::spectrum::SampledSpectrum::from_csv(&text)
                        .and_then(|s| LedSpec::tabulated(s, total)),
                )
            }
        }
    }

    pub fn collector(&self) -> CResult<Collector> {
        let c = Collector::NumericalAperture(self.collection.numerical_aperture);
        in_section("collection", c.half_angle_rad())?;
        Ok(c)
    }

    pub fn fiber_spec(&self) -> CResult<FiberSpec> {
        in_section(
            "fiber",
            Length::from_um(self.fiber.core_um).and_then(|core| {
                FiberSpec::new(
                    core,
                    self.fiber.numerical_aperture,
                    Length::from_m(self.fiber.length_m)?,
                    self.fiber.transmission,
                )
            }),
        )
    }

    pub fn train(&self, name: &str) -> CResult<ImagingTrain> {
        let section = match name {
            "led_relay" => &self.optics.led_relay,
            "trap_relay" => &self.optics.trap_relay,
            other => {
                return Err(ConfigError(format!(
                    "unknown train '{other}' (expected led_relay or trap_relay)"
                )))
            }
        };
        let mut elements = Vec::new();
        for (i, e) in section.elements.iter().enumerate() {
            let kind = match e.kind.as_str() {
                "lens" => photoion::optics::ElementKind::ThinLens {
                    focal_length_mm: e.mm,
                },
                "space" => photoion::optics::ElementKind::FreeSpace { distance_mm: e.mm },
                "aperture" => photoion::optics::ElementKind::Aperture { diameter_mm: e.mm },
                "window" => photoion::optics::ElementKind::FlatWindow { thickness_mm: e.mm },
                other => {
                    return Err(ConfigError(format!(
                        "[optics.{name}] element {i}: unknown kind '{other}'"
                    )))
                }
            };
            elements.push(in_section(
                &format!("optics.{name}"),
                OpticalElement::new(kind, e.transmittance),
            )?);
        }
        in_section(
            &format!("optics.{name}"),
            ImagingTrain::new(elements, section.aberration_factor),
        )
    }

    pub fn sp_transition(&self) -> CResult<TransitionSpec> {
        in_section(
            "ion",
            Wavelength::from_nm(self.ion.wavelength_nm).and_then(|w| {
                TransitionSpec::new(
                    w,
                    self.ion.linewidth_mhz,
                    Intensity::from_mw_per_mm2(self.ion.saturation_intensity_mw_mm2)?,
                )
            }),
        )
    }

    pub fn rydberg_series(&self) -> CResult<RydbergSeries> {
        in_section(
            "ion",
            RydbergSeries::new(self.ion.series_limit_per_cm, self.ion.quantum_defect),
        )
    }

    pub fn loading_scenario(&self) -> CResult<LoadingScenario> {
        in_section(
            "loading",
            Length::from_um(self.loading.interaction_length_um).and_then(|len| {
                LoadingScenario::new(
                    self.loading.atom_flux_per_s,
                    len,
                    self.loading.mean_speed_m_per_s,
                    self.loading.ionization_rate_per_s,
                )
            }),
        )
    }

    pub fn ion_level_scheme(&self) -> CResult<IonLevelScheme> {
        if self.jumps.branching_denominator <= 1.0 {
            return Err(ConfigError(format!(
                "jumps.branching_denominator must exceed 1, got {}",
                self.jumps.branching_denominator
            )));
        }
        in_section(
            "jumps",
            Wavelength::from_nm(self.jumps.sp_wavelength_nm).and_then(|w| {
                IonLevelScheme::new(
                    w,
                    self.jumps.oscillator_strength,
                    1.0 / self.jumps.branching_denominator,
                    self.jumps.tau_dark_s,
                    self.jumps.tau_p_ns,
                )
            }),
        )
    }

    pub fn spot(&self) -> CResult<SpotGeometry> {
        in_section(
            "optics",
            Length::from_um(self.optics.spot_um).and_then(SpotGeometry::new),
        )
    }
}
