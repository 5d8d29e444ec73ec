//! Command-line surface of the photoionization toolkit. Exit codes:
//! 0 success, 1 report row out of tolerance, 2 configuration error,
//! 3 domain error.

mod config;
mod report;

use clap::{Parser, Subcommand};
use config::RunConfig;
use photoion::dispersion::ktp_z;
use photoion::ion::field_ionization_threshold;
use photoion::jumps::{
    estimate_rates, infer_resonant_power, scattering_probability, simulate_telegraph,
    TelegraphTrace,
};
use photoion::optics::{
    collection_fraction, fiber_coupling_feasible, image_extended_source, intensity_at_spot,
    transmission_budget, AngularModel, SourcePatch,
};
use photoion::shg::{
    focused_tuning_curve, normalized_efficiency, planewave_tuning_curve, qpm_period, shg_power,
};
use photoion::units::{Intensity, Length, Power, Temperature, Wavelength};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "photoion",
    version,
    about = "Design calculations for a two-color photoionization ion-loading system"
)]
struct Cli {
    /// TOML run configuration (defaults to the built-in paper defaults)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit structured JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Second-harmonic generation design
    #[command(subcommand)]
    Shg(ShgCmd),
    /// Imaging, collection and power-budget calculations
    #[command(subcommand)]
    Optics(OpticsCmd),
    /// Neutral-atom excitation and ionization
    #[command(subcommand)]
    Ion(IonCmd),
    /// Quantum-jump telegraph simulation and inference
    #[command(subcommand)]
    Jumps(JumpsCmd),
    /// Compare every computed quantity against its reference value
    Report {
        /// Seed for the Monte Carlo rows
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum ShgCmd {
    /// Quasi-phase-matching poling period
    Period {
        /// Pump wavelength in nm
        #[arg(long = "lambda")]
        lambda_nm: Option<f64>,
        /// Crystal temperature in °C
        #[arg(long = "temp", default_value_t = 20.0)]
        temp_c: f64,
        /// QPM order (positive odd integer)
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Temperature tuning curve (writes CSV)
    Tune {
        /// Average over the focused pump's angular spectrum
        #[arg(long)]
        focused: bool,
        /// Output CSV path
        #[arg(long, default_value = "tuning_curve.csv")]
        out: PathBuf,
    },
    /// Predicted single-pass second-harmonic power
    Power {
        #[arg(long = "pump-mw")]
        pump_mw: Option<f64>,
        #[arg(long = "waist-um")]
        waist_um: Option<f64>,
    },
    /// Length-normalized conversion efficiency from measured powers
    Efficiency {
        #[arg(long = "pump-mw")]
        pump_mw: f64,
        #[arg(long = "shg-uw")]
        shg_uw: f64,
        #[arg(long = "length-cm")]
        length_cm: f64,
    },
}

#[derive(Subcommand)]
enum OpticsCmd {
    /// Image an extended source through a configured train
    Image {
        /// Train name: led_relay or trap_relay
        #[arg(long)]
        train: String,
    },
    /// Collection solid angle and collected power of the LED
    Collect,
    /// In-band power and intensity at the trap through the fitted chain
    Budget,
    /// Flat-top intensity over a spot
    Intensity {
        #[arg(long = "power-uw")]
        power_uw: f64,
        #[arg(long = "spot-um")]
        spot_um: Option<f64>,
    },
}

#[derive(Subcommand)]
enum IonCmd {
    /// Steady-state excited fraction of the resonant step
    Excite {
        /// Intensity in mW/mm²
        #[arg(long = "i")]
        intensity: f64,
        /// Saturation intensity in mW/mm²
        #[arg(long = "isat")]
        isat: Option<f64>,
        #[arg(long = "detuning-mhz", default_value_t = 0.0)]
        detuning_mhz: f64,
    },
    /// Photon wavelength reaching a Rydberg state
    Rydberg {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        defect: Option<f64>,
    },
    /// Classical field-ionization threshold
    Field {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        defect: Option<f64>,
    },
    /// Parameterized two-step loading rate
    Load {
        #[arg(long = "flux")]
        atom_flux_per_s: Option<f64>,
        #[arg(long = "rate")]
        ionization_rate_per_s: Option<f64>,
    },
}

#[derive(Subcommand)]
enum JumpsCmd {
    /// Generate a seeded telegraph trace (CSV)
    Simulate {
        #[arg(long)]
        seed: Option<u64>,
        /// Trace length in seconds
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long = "rate-hz")]
        rate_hz: Option<f64>,
        #[arg(long = "tau-dark")]
        tau_dark_s: Option<f64>,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate jump statistics from a trace CSV
    Estimate {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Infer the resonant power at the ion from the observed jump rate
    Infer {
        #[arg(long = "rate")]
        rate_hz: Option<f64>,
        #[arg(long = "spot-um")]
        spot_um: Option<f64>,
    },
}

enum CliError {
    Config(String),
    Domain(String),
    OutOfTolerance,
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<photoion::Error> for CliError {
    fn from(e: photoion::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Collects (key, human text with units, json value) triples and prints
/// them in the selected format.
struct Emitter {
    json: bool,
    map: Map<String, Value>,
    lines: Vec<String>,
}

impl Emitter {
    fn new(json: bool) -> Self {
        Emitter {
            json,
            map: Map::new(),
            lines: Vec::new(),
        }
    }

    fn item(&mut self, key: &str, text: String, value: Value) {
        self.map.insert(key.to_string(), value);
        self.lines.push(format!("{key} = {text}"));
    }

    fn note(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    fn finish(self) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(self.map)).unwrap()
            );
        } else {
            for line in self.lines {
                println!("{line}");
            }
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::paper_defaults()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            Ok(RunConfig::parse(&text)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::OutOfTolerance) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli.config)?;
    let mut out = Emitter::new(cli.json);
    match cli.command {
        Command::Shg(cmd) => run_shg(cmd, &config, &mut out)?,
        Command::Optics(cmd) => run_optics(cmd, &config, &mut out)?,
        Command::Ion(cmd) => run_ion(cmd, &config, &mut out)?,
        Command::Jumps(cmd) => return run_jumps(cmd, &config, cli.json, out),
        Command::Report { seed } => {
            let seed = seed.unwrap_or(config.jumps.seed);
            let rows = report::build_report(&config, seed)?;
            let all_pass = rows.iter().all(|r| r.pass);
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(
                        &json!({ "seed": seed, "rows": rows, "pass": all_pass })
                    )
                    .unwrap()
                );
            } else {
                print!("{}", report::render_text(&rows));
                println!();
                println!(
                    "{} of {} rows within tolerance (seed {seed})",
                    rows.iter().filter(|r| r.pass).count(),
                    rows.len()
                );
            }
            if !all_pass {
                return Err(CliError::OutOfTolerance);
            }
            return Ok(());
        }
    }
    out.finish();
    Ok(())
}

fn run_shg(cmd: ShgCmd, config: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    match cmd {
        ShgCmd::Period {
            lambda_nm,
            temp_c,
            order,
        } => {
            let lambda = Wavelength::from_nm(lambda_nm.unwrap_or(config.pump.wavelength_nm))?;
            let t = Temperature::from_celsius(temp_c)?;
            let period = qpm_period(&ktp_z(), lambda, t, order)?;
            out.item(
                "qpm_period",
                format!("{:.4} µm", period.um()),
                json!({ "value_um": period.um() }),
            );
            out.item(
                "inputs",
                format!("λ = {} nm, T = {} °C, order {}", lambda.nm(), temp_c, order),
                json!({ "lambda_nm": lambda.nm(), "temp_c": temp_c, "order": order }),
            );
        }
        ShgCmd::Tune { focused, out: path } => {
            let crystal = config.crystal(ktp_z())?;
            let pump = config.pump_beam()?;
            let t_range = (config.shg.tune_t_min_c, config.shg.tune_t_max_c);
            let curve = if focused {
                focused_tuning_curve(&crystal, &pump, t_range, config.shg.tune_points)?
            } else {
                planewave_tuning_curve(&crystal, pump.wavelength, t_range, config.shg.tune_points)?
            };
            std::fs::write(&path, curve.to_csv())
                .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
            out.item(
                "peak_temperature",
                format!("{:.3} °C", curve.peak_t_c),
                json!({ "value_c": curve.peak_t_c }),
            );
            out.item(
                "fwhm",
                format!("{:.3} °C", curve.fwhm_c),
                json!({ "value_c": curve.fwhm_c }),
            );
            out.item(
                "curve_csv",
                path.display().to_string(),
                json!(path.display().to_string()),
            );
        }
        ShgCmd::Power { pump_mw, waist_um } => {
            let crystal = config.crystal(ktp_z())?;
            let mut pump = config.pump_beam()?;
            if let Some(mw) = pump_mw {
                pump.power = Power::from_mw(mw)?;
            }
            if let Some(um) = waist_um {
                pump.waist = Length::from_um(um)?;
            }
            let p = shg_power(&crystal, &pump, None, (-10.0, 80.0))?;
            out.item(
                "sh_power",
                format!("{:.1} µW", p.sh_power.uw()),
                json!({ "value_uw": p.sh_power.uw() }),
            );
            out.item(
                "phase_matching_temperature",
                format!("{:.2} °C", p.temperature.celsius()),
                json!({ "value_c": p.temperature.celsius() }),
            );
            out.item(
                "focusing",
                format!("ξ = {:.3}, h = {:.4}", p.xi, p.h),
                json!({ "xi": p.xi, "h": p.h }),
            );
            let eta = normalized_efficiency(pump.power, p.sh_power, crystal.length)?;
            out.item(
                "normalized_efficiency",
                format!("{:.4} %(W cm)⁻¹", eta * 100.0),
                json!({ "value_pct_per_w_cm": eta * 100.0 }),
            );
            out.note("ideal prediction: poling irregularities and beam shape reduce real output");
        }
        ShgCmd::Efficiency {
            pump_mw,
            shg_uw,
            length_cm,
        } => {
            let eta = normalized_efficiency(
                Power::from_mw(pump_mw)?,
                Power::from_uw(shg_uw)?,
                Length::from_cm(length_cm)?,
            )?;
            out.item(
                "normalized_efficiency",
                format!("{:.4} %(W cm)⁻¹", eta * 100.0),
                json!({ "value_pct_per_w_cm": eta * 100.0 }),
            );
        }
    }
    Ok(())
}

fn run_optics(cmd: OpticsCmd, config: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    match cmd {
        OpticsCmd::Image { train } => {
            let t = config.train(&train)?;
            let source = if train == "trap_relay" {
                // the trap relay images the fiber end face
                let fiber = config.fiber_spec()?;
                SourcePatch::new(
                    fiber.core_diameter,
                    AngularModel::Lambertian,
                    Power::from_uw(1.0)?,
                    1.0,
                )?
            } else {
                config.led_source()?
            };
            let img = image_extended_source(&source, &t)?;
            out.item(
                "magnification",
                format!("{:.4} (dimensionless)", img.magnification.abs()),
                json!({ "value": img.magnification.abs(), "signed": img.magnification }),
            );
            out.item(
                "geometric_image",
                format!("{:.1} µm", img.geometric_image_size.um()),
                json!({ "value_um": img.geometric_image_size.um() }),
            );
            out.item(
                "aberrated_image",
                format!(
                    "{:.1} µm (factor {:.3}, fitted)",
                    img.aberrated_image_size.um(),
                    t.aberration_factor
                ),
                json!({ "value_um": img.aberrated_image_size.um(),
                        "aberration_factor": t.aberration_factor, "fitted": true }),
            );
            out.item(
                "image_distance",
                format!("{:.1} mm", img.image_distance.mm()),
                json!({ "value_mm": img.image_distance.mm() }),
            );
            if train == "led_relay" {
                let fiber = config.fiber_spec()?;
                let na_image = config.collection.numerical_aperture / img.magnification.abs();
                let coupling =
                    fiber_coupling_feasible(img.geometric_image_size, na_image, &fiber)?;
                out.item(
                    "fiber_coupling",
                    format!(
                        "{} (étendue ratio {:.2})",
                        if coupling.feasible {
                            "feasible"
                        } else {
                            "infeasible"
                        },
                        coupling.etendue_ratio
                    ),
                    json!({ "feasible": coupling.feasible, "etendue_ratio": coupling.etendue_ratio }),
                );
            }
        }
        OpticsCmd::Collect => {
            let source = config.led_source()?;
            let c = collection_fraction(&source, config.collector()?)?;
            out.item(
                "solid_angle_fraction",
                format!("{:.4} % of 2π", c.solid_angle_fraction * 100.0),
                json!({ "value": c.solid_angle_fraction }),
            );
            out.item(
                "power_fraction",
                format!(
                    "{:.4} % (incl. polarized fraction, fitted pattern)",
                    c.power_fraction * 100.0
                ),
                json!({ "value": c.power_fraction, "fitted": true }),
            );
            out.item(
                "collected_power",
                format!("{:.1} µW", c.collected.uw()),
                json!({ "value_uw": c.collected.uw() }),
            );
        }
        OpticsCmd::Budget => {
            let source = config.led_source()?;
            let collected = collection_fraction(&source, config.collector()?)?.collected;
            let at_trap = transmission_budget(
                collected,
                &[config.fiber.transmission, config.optics.uv_path_transmission],
            )?;
            let spot = Length::from_um(config.optics.spot_um)?;
            let intensity = intensity_at_spot(at_trap, spot)?;
            out.item(
                "collected_power",
                format!("{:.1} µW (fitted angular pattern)", collected.uw()),
                json!({ "value_uw": collected.uw(), "fitted": true }),
            );
            out.item(
                "fiber_transmission",
                format!("{:.3} (fraction)", config.fiber.transmission),
                json!(config.fiber.transmission),
            );
            out.item(
                "uv_path_transmission",
                format!("{:.3} (fraction, fitted)", config.optics.uv_path_transmission),
                json!({ "value": config.optics.uv_path_transmission, "fitted": true }),
            );
            out.item(
                "band_power_at_trap",
                format!(
                    "{:.1} µW in [{}, {}] nm",
                    at_trap.uw(),
                    config.optics.band_lo_nm,
                    config.optics.band_hi_nm
                ),
                json!({ "value_uw": at_trap.uw(),
                        "band_nm": [config.optics.band_lo_nm, config.optics.band_hi_nm] }),
            );
            out.item(
                "intensity_at_trap",
                format!(
                    "{:.3} mW/mm² over {} µm",
                    intensity.mw_per_mm2(),
                    config.optics.spot_um
                ),
                json!({ "value_mw_per_mm2": intensity.mw_per_mm2(), "spot_um": config.optics.spot_um }),
            );
            let blue = transmission_budget(
                Power::from_uw(config.shg.measured_sh_power_uw)?,
                &[config.shg.blue_path_transmission],
            )?;
            let blue_intensity = intensity_at_spot(blue, spot)?;
            out.item(
                "resonant_intensity_at_trap",
                format!(
                    "{:.2} mW/mm² (423 nm path factor {:.2}, fitted)",
                    blue_intensity.mw_per_mm2(),
                    config.shg.blue_path_transmission
                ),
                json!({ "value_mw_per_mm2": blue_intensity.mw_per_mm2(), "fitted": true }),
            );
        }
        OpticsCmd::Intensity { power_uw, spot_um } => {
            let spot = Length::from_um(spot_um.unwrap_or(config.optics.spot_um))?;
            let i = intensity_at_spot(Power::from_uw(power_uw)?, spot)?;
            out.item(
                "intensity",
                format!("{:.3} mW/mm²", i.mw_per_mm2()),
                json!({ "value_mw_per_mm2": i.mw_per_mm2() }),
            );
        }
    }
    Ok(())
}

fn run_ion(cmd: IonCmd, config: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    match cmd {
        IonCmd::Excite {
            intensity,
            isat,
            detuning_mhz,
        } => {
            let transition = match isat {
                None => config.sp_transition()?,
                Some(v) => photoion::ion::TransitionSpec::new(
                    Wavelength::from_nm(config.ion.wavelength_nm)?,
                    config.ion.linewidth_mhz,
                    Intensity::from_mw_per_mm2(v)?,
                )?,
            };
            let rho = transition
                .excitation_fraction(Intensity::from_mw_per_mm2(intensity)?, detuning_mhz);
            out.item(
                "excited_fraction",
                format!("{rho:.4} (dimensionless)"),
                json!({ "value": rho }),
            );
            out.item(
                "saturation_parameter",
                format!(
                    "{:.3} (dimensionless)",
                    intensity / transition.saturation_intensity.mw_per_mm2()
                ),
                json!({ "value": intensity / transition.saturation_intensity.mw_per_mm2() }),
            );
        }
        IonCmd::Rydberg { n, defect } => {
            let series = photoion::ion::RydbergSeries::new(
                config.ion.series_limit_per_cm,
                defect.unwrap_or(config.ion.quantum_defect),
            )?;
            let w = series.wavelength(n)?;
            out.item(
                "wavelength",
                format!("{:.2} nm", w.nm()),
                json!({ "value_nm": w.nm(), "n": n }),
            );
            out.item(
                "series_limit",
                format!("{:.2} nm", series.limit_wavelength().nm()),
                json!({ "value_nm": series.limit_wavelength().nm() }),
            );
        }
        IonCmd::Field { n, defect } => {
            let f = field_ionization_threshold(n, defect.unwrap_or(config.ion.quantum_defect))?;
            out.item(
                "field_threshold",
                format!("{f:.1} V/cm"),
                json!({ "value_v_per_cm": f, "n": n }),
            );
        }
        IonCmd::Load {
            atom_flux_per_s,
            ionization_rate_per_s,
        } => {
            let mut scenario = config.loading_scenario()?;
            if let Some(flux) = atom_flux_per_s {
                scenario.atom_flux_per_s = flux;
            }
            if let Some(rate) = ionization_rate_per_s {
                scenario.ionization_rate_per_s = rate;
            }
            // excited fraction at the delivered resonant intensity
            let blue = transmission_budget(
                Power::from_uw(config.shg.measured_sh_power_uw)?,
                &[config.shg.blue_path_transmission],
            )?;
            let blue_intensity =
                intensity_at_spot(blue, Length::from_um(config.optics.spot_um)?)?;
            let rho = config
                .sp_transition()?
                .excitation_fraction(blue_intensity, 0.0);
            let rate = scenario.loading_rate(rho)?;
            out.item(
                "excited_fraction",
                format!("{rho:.3} (dimensionless)"),
                json!({ "value": rho }),
            );
            out.item(
                "transit_time",
                format!("{:.2e} s", scenario.transit_time_s()),
                json!({ "value_s": scenario.transit_time_s() }),
            );
            out.item(
                "loading_rate",
                format!("{rate:.1} ions/s"),
                json!({ "value_per_s": rate }),
            );
            out.note("scenario parameters (flux, ionization rate) are free inputs");
        }
    }
    Ok(())
}

fn run_jumps(
    cmd: JumpsCmd,
    config: &RunConfig,
    json: bool,
    mut out: Emitter,
) -> Result<(), CliError> {
    match cmd {
        JumpsCmd::Simulate {
            seed,
            duration,
            rate_hz,
            tau_dark_s,
            out: path,
        } => {
            let trace = simulate_telegraph(
                rate_hz.unwrap_or(config.jumps.r_qj_hz),
                tau_dark_s.unwrap_or(config.jumps.tau_dark_s),
                duration.unwrap_or(config.jumps.simulate_duration_s),
                seed.unwrap_or(config.jumps.seed),
            )?;
            match path {
                Some(p) => {
                    std::fs::write(&p, trace.to_csv()).map_err(|e| {
                        CliError::Domain(format!("cannot write {}: {e}", p.display()))
                    })?;
                    out.item(
                        "trace_csv",
                        p.display().to_string(),
                        json!(p.display().to_string()),
                    );
                    out.item(
                        "intervals",
                        format!("{} sojourns", trace.intervals.len()),
                        json!(trace.intervals.len()),
                    );
                    out.finish();
                }
                None => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&trace).unwrap());
                    } else {
                        print!("{}", trace.to_csv());
                    }
                }
            }
        }
        JumpsCmd::Estimate { trace } => {
            let text = std::fs::read_to_string(&trace)
                .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", trace.display())))?;
            let trace = TelegraphTrace::from_csv(&text)?;
            let stats = estimate_rates(&trace);
            if json {
                println!("{}", serde_json::to_string_pretty(&stats).unwrap());
                return Ok(());
            }
            match stats.r_qj_hz {
                Some(r) => out.item(
                    "r_qj",
                    format!("{:.4} ± {:.4} Hz", r.value, r.std_error),
                    json!(null),
                ),
                None => out.item(
                    "r_qj",
                    "unavailable (no jumps observed)".into(),
                    json!(null),
                ),
            }
            match stats.mean_dark_time_s {
                Some(d) => out.item(
                    "mean_dark_time",
                    format!("{:.4} ± {:.4} s", d.value, d.std_error),
                    json!(null),
                ),
                None => out.item(
                    "mean_dark_time",
                    "unavailable (no completed dark sojourns)".into(),
                    json!(null),
                ),
            }
            out.item(
                "counts",
                format!("{} bright / {} dark sojourns", stats.n_bright, stats.n_dark),
                json!(null),
            );
            out.item(
                "observed_time",
                format!(
                    "{:.1} s bright, {:.1} s dark",
                    stats.total_bright_time_s, stats.total_dark_time_s
                ),
                json!(null),
            );
            out.finish();
        }
        JumpsCmd::Infer { rate_hz, spot_um } => {
            let ion = config.ion_level_scheme()?;
            let spot = match spot_um {
                Some(um) => photoion::jumps::SpotGeometry::new(Length::from_um(um)?)?,
                None => config.spot()?,
            };
            let rate = rate_hz.unwrap_or(config.jumps.r_qj_hz);
            let (power, intensity) = infer_resonant_power(rate, &ion, &spot)?;
            out.item(
                "scattering_probability",
                format!("{:.3e} (dimensionless)", scattering_probability(&ion, &spot)),
                json!({ "value": scattering_probability(&ion, &spot) }),
            );
            out.item(
                "resonant_power",
                format!("{:.2} pW", power.pw()),
                json!({ "value_pw": power.pw() }),
            );
            out.item(
                "resonant_intensity",
                format!("{:.1} pW/mm²", intensity.pw_per_mm2()),
                json!({ "value_pw_per_mm2": intensity.pw_per_mm2() }),
            );
            out.finish();
        }
    }
    Ok(())
}
