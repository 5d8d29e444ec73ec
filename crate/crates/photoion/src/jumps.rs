//! Electron-shelving telegraph statistics: the forward model from resonant
//! power to quantum-jump rate, Monte Carlo generation of bright/dark
//! fluorescence traces, interval estimators and the inverse power inference.
//!
//! The telegraph is a pure two-state process. The fast detour through the
//! short-lived excited state back into the cooling cycle is unobservable on
//! the trace timescale and is not simulated as dead time.

use crate::error::{Error, Result};
use crate::units::{Intensity, Length, Power, Wavelength, HC};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Level-scheme parameters of the trapped ion relevant to shelving.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IonLevelScheme {
    /// Wavelength of the ground-state to upper-P transition driven by the
    /// broadband light (393 nm).
    pub sp_wavelength: Wavelength,
    pub oscillator_strength: f64,
    /// Branching fraction Γ_D5/2/Γ_tot of decay into the metastable state.
    pub branching_to_d52: f64,
    /// Metastable-state lifetime in seconds.
    pub tau_d_s: f64,
    /// Excited-state lifetime in nanoseconds.
    pub tau_p_ns: f64,
}

impl IonLevelScheme {
    pub fn new(
        sp_wavelength: Wavelength,
        oscillator_strength: f64,
        branching_to_d52: f64,
        tau_d_s: f64,
        tau_p_ns: f64,
    ) -> Result<Self> {
        if !(oscillator_strength.is_finite() && oscillator_strength > 0.0) {
            return Err(Error::domain(format!(
                "oscillator strength = {oscillator_strength}"
            )));
        }
        if !(branching_to_d52 > 0.0 && branching_to_d52 < 1.0) {
            return Err(Error::domain(format!(
                "branching fraction must be in (0,1), got {branching_to_d52}"
            )));
        }
        if !(tau_d_s.is_finite() && tau_d_s > 0.0) || !(tau_p_ns.is_finite() && tau_p_ns > 0.0) {
            return Err(Error::domain("lifetimes must be positive"));
        }
        Ok(Self {
            sp_wavelength,
            oscillator_strength,
            branching_to_d52,
            tau_d_s,
            tau_p_ns,
        })
    }
}

/// Focal spot illuminating the ion (flat-top of the given diameter).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpotGeometry {
    pub diameter: Length,
}

impl SpotGeometry {
    pub fn new(diameter: Length) -> Result<Self> {
        if diameter.m() <= 0.0 {
            return Err(Error::domain("spot diameter must be > 0"));
        }
        Ok(Self { diameter })
    }

    pub fn area_m2(&self) -> f64 {
        let r = 0.5 * self.diameter.m();
        PI * r * r
    }
}

/// Probability that an unpolarized resonant photon crossing the spot is
/// scattered by the ion: p_sc = f·σ/A with σ = λ²/2π.
pub fn scattering_probability(ion: &IonLevelScheme, spot: &SpotGeometry) -> f64 {
    let sigma = ion.sp_wavelength.m().powi(2) / (2.0 * PI);
    ion.oscillator_strength * sigma / spot.area_m2()
}

/// Forward model: quantum-jump (shelving) rate produced by a resonant
/// power `p` in the spot, R = (P·λ/hc)·p_sc·(Γ_D/Γ_tot).
pub fn shelving_rate(p: Power, ion: &IonLevelScheme, spot: &SpotGeometry) -> f64 {
    let photon_flux = p.w() * ion.sp_wavelength.m() / HC;
    photon_flux * scattering_probability(ion, spot) * ion.branching_to_d52
}

/// Resonant power and intensity inferred from an observed jump rate; the
/// exact algebraic inverse of [`shelving_rate`].
pub fn infer_resonant_power(
    r_qj_hz: f64,
    ion: &IonLevelScheme,
    spot: &SpotGeometry,
) -> Result<(Power, Intensity)> {
    if !(r_qj_hz.is_finite() && r_qj_hz > 0.0) {
        return Err(Error::domain(format!("jump rate = {r_qj_hz} Hz")));
    }
    let photon_flux = r_qj_hz / (scattering_probability(ion, spot) * ion.branching_to_d52);
    let power = Power::from_w(photon_flux * HC / ion.sp_wavelength.m())?;
    let intensity = Intensity::from_w_per_m2(power.w() / spot.area_m2())?;
    Ok((power, intensity))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluorescenceState {
    Bright,
    Dark,
}

impl std::fmt::Display for FluorescenceState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FluorescenceState::Bright => write!(f, "bright"),
            FluorescenceState::Dark => write!(f, "dark"),
        }
    }
}

/// One sojourn of the telegraph signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub state: FluorescenceState,
    pub duration_s: f64,
}

/// A simulated bright/dark fluorescence record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelegraphTrace {
    pub intervals: Vec<Interval>,
    pub seed: u64,
    pub total_duration_s: f64,
}

pub const TRACE_CSV_HEADER: &str = "t_start_s,state,duration_s";

impl TelegraphTrace {
    fn validate(&self) -> Result<()> {
        let mut sum = 0.0;
        for (i, iv) in self.intervals.iter().enumerate() {
            if !(iv.duration_s.is_finite() && iv.duration_s > 0.0) {
                return Err(Error::domain(format!(
                    "interval {i} has duration {}",
                    iv.duration_s
                )));
            }
            if i > 0 && iv.state == self.intervals[i - 1].state {
                return Err(Error::domain(format!(
                    "intervals {} and {i} do not alternate",
                    i - 1
                )));
            }
            sum += iv.duration_s;
        }
        if (sum - self.total_duration_s).abs() > 1e-9 * self.total_duration_s.max(1.0) {
            return Err(Error::domain(format!(
                "durations sum to {sum} s, expected {} s",
                self.total_duration_s
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        let mut t = 0.0;
        for iv in &self.intervals {
            out.push_str(&format!("{t},{},{}\n", iv.state, iv.duration_s));
            t += iv.duration_s;
        }
        out
    }

    /// Camera-like readout: the bright fraction of each fixed-width time
    /// bin, as (bin start, fraction) pairs covering the whole record.
    pub fn binned_brightness(&self, bin_width_s: f64) -> Result<Vec<(f64, f64)>> {
        if !(bin_width_s.is_finite() && bin_width_s > 0.0) {
            return Err(Error::domain(format!("bin width = {bin_width_s} s")));
        }
        let n_bins = (self.total_duration_s / bin_width_s).ceil() as usize;
        let mut bins = vec![0.0; n_bins];
        let mut t = 0.0;
        for iv in &self.intervals {
            if iv.state == FluorescenceState::Bright {
                let (start, end) = (t, t + iv.duration_s);
                let mut bin = (start / bin_width_s) as usize;
                while bin < n_bins {
                    let bin_start = bin as f64 * bin_width_s;
                    let bin_end = bin_start + bin_width_s;
                    if bin_start >= end {
                        break;
                    }
                    bins[bin] += end.min(bin_end) - start.max(bin_start);
                    bin += 1;
                }
            }
            t += iv.duration_s;
        }
        Ok(bins
            .iter()
            .enumerate()
            .map(|(i, &bright)| {
                let bin_start = i as f64 * bin_width_s;
                let width = bin_width_s.min(self.total_duration_s - bin_start);
                (bin_start, if width > 0.0 { bright / width } else { 0.0 })
            })
            .collect())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        let mut saw_header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != TRACE_CSV_HEADER {
                    return Err(Error::parse(
                        "trace csv",
                        n + 1,
                        format!("expected header '{TRACE_CSV_HEADER}'"),
                    ));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse("trace csv", n + 1, "expected 3 fields"));
            }
            let state = match fields[1] {
                "bright" => FluorescenceState::Bright,
                "dark" => FluorescenceState::Dark,
                other => {
                    return Err(Error::parse(
                        "trace csv",
                        n + 1,
                        format!("unknown state '{other}'"),
                    ))
                }
            };
            let duration_s = fields[2]
                .parse::<f64>()
                .map_err(|_| Error::parse("trace csv", n + 1, "bad duration"))?;
            intervals.push(Interval { state, duration_s });
        }
        let total = intervals.iter().map(|i| i.duration_s).sum();
        let trace = TelegraphTrace {
            intervals,
            seed: 0,
            total_duration_s: total,
        };
        trace.validate()?;
        Ok(trace)
    }
}

/// Deterministic per-trial sub-seed derived from (master seed, trial index)
/// via a SplitMix64 step, so concurrent trials are independent of
/// scheduling and worker count.
pub fn trial_seed(master: u64, trial_index: u64) -> u64 {
    let mut z = master.wrapping_add(
        trial_index
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate a telegraph trace of alternating exponential sojourns: bright
/// durations ~ Exp(`shelve_rate_hz`), dark durations ~ Exp(1/`tau_dark_s`).
/// The trace starts bright, is truncated at `duration_s` and is a pure
/// function of the seed.
pub fn simulate_telegraph(
    shelve_rate_hz: f64,
    tau_dark_s: f64,
    duration_s: f64,
    seed: u64,
) -> Result<TelegraphTrace> {
    if !(shelve_rate_hz.is_finite() && shelve_rate_hz >= 0.0) {
        return Err(Error::domain(format!("shelving rate = {shelve_rate_hz} Hz")));
    }
    if !(tau_dark_s.is_finite() && tau_dark_s > 0.0) {
        return Err(Error::domain(format!("dark lifetime = {tau_dark_s} s")));
    }
    if !(duration_s.is_finite() && duration_s >= 0.0) {
        return Err(Error::domain(format!("duration = {duration_s} s")));
    }
    let mut intervals = Vec::new();
    if duration_s > 0.0 {
        if shelve_rate_hz == 0.0 {
            intervals.push(Interval {
                state: FluorescenceState::Bright,
                duration_s,
            });
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bright_dist = Exp::new(shelve_rate_hz)
                .map_err(|e| Error::domain(format!("bright sojourn distribution: {e}")))?;
            let dark_dist = Exp::new(1.0 / tau_dark_s)
                .map_err(|e| Error::domain(format!("dark sojourn distribution: {e}")))?;
            let mut t = 0.0;
            let mut state = FluorescenceState::Bright;
            while t < duration_s {
                let drawn: f64 = match state {
                    FluorescenceState::Bright => bright_dist.sample(&mut rng),
                    FluorescenceState::Dark => dark_dist.sample(&mut rng),
                };
                // the RNG can in principle return exactly zero; keep the
                // alternation invariant intact
                let drawn = drawn.max(f64::MIN_POSITIVE);
                let duration = drawn.min(duration_s - t);
                intervals.push(Interval {
                    state,
                    duration_s: duration,
                });
                t += drawn;
                state = match state {
                    FluorescenceState::Bright => FluorescenceState::Dark,
                    FluorescenceState::Dark => FluorescenceState::Bright,
                };
            }
        }
    }
    let trace = TelegraphTrace {
        intervals,
        seed,
        total_duration_s: duration_s,
    };
    trace.validate()?;
    Ok(trace)
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Interval statistics of one or more telegraph traces. Estimates that the
/// data cannot support are absent rather than fabricated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpStatistics {
    /// Bright→dark (shelving) rate: dark entries per unit bright time.
    pub r_qj_hz: Option<Estimate>,
    /// Mean of completed dark sojourns.
    pub mean_dark_time_s: Option<Estimate>,
    pub n_bright: usize,
    pub n_dark: usize,
    pub total_bright_time_s: f64,
    pub total_dark_time_s: f64,
}

/// Sufficient statistics of a set of traces for rate estimation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct SufficientStats {
    n_dark_events: usize,
    n_bright: usize,
    n_dark: usize,
    bright_time: f64,
    dark_time: f64,
    completed_dark: usize,
    completed_dark_time: f64,
}

fn accumulate(trace: &TelegraphTrace, s: &mut SufficientStats) {
    for (i, iv) in trace.intervals.iter().enumerate() {
        match iv.state {
            FluorescenceState::Bright => {
                s.n_bright += 1;
                s.bright_time += iv.duration_s;
            }
            FluorescenceState::Dark => {
                s.n_dark += 1;
                s.dark_time += iv.duration_s;
                s.n_dark_events += 1;
                // the final interval of a trace is censored by the
                // observation window; only completed sojourns enter the mean
                if i + 1 < trace.intervals.len() {
                    s.completed_dark += 1;
                    s.completed_dark_time += iv.duration_s;
                }
            }
        }
    }
}

fn stats_from(s: SufficientStats) -> JumpStatistics {
    let r_qj_hz = if s.n_dark_events > 0 && s.bright_time > 0.0 {
        let rate = s.n_dark_events as f64 / s.bright_time;
        Some(Estimate {
            value: rate,
            std_error: rate / (s.n_dark_events as f64).sqrt(),
        })
    } else {
        None
    };
    let mean_dark_time_s = if s.completed_dark > 0 {
        let mean = s.completed_dark_time / s.completed_dark as f64;
        Some(Estimate {
            value: mean,
            std_error: mean / (s.completed_dark as f64).sqrt(),
        })
    } else {
        None
    };
    JumpStatistics {
        r_qj_hz,
        mean_dark_time_s,
        n_bright: s.n_bright,
        n_dark: s.n_dark,
        total_bright_time_s: s.bright_time,
        total_dark_time_s: s.dark_time,
    }
}

/// Estimate jump rates from one trace.
pub fn estimate_rates(trace: &TelegraphTrace) -> JumpStatistics {
    let mut s = SufficientStats::default();
    accumulate(trace, &mut s);
    stats_from(s)
}

/// Pool the sufficient statistics of several traces (the estimate a single
/// concatenated record would give, without joining intervals across trace
/// boundaries).
pub fn estimate_rates_pooled(traces: &[TelegraphTrace]) -> JumpStatistics {
    let mut s = SufficientStats::default();
    for t in traces {
        accumulate(t, &mut s);
    }
    stats_from(s)
}
