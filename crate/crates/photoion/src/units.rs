//! Unit-safe scalar quantities and fundamental constants.
//!
//! Each quantity is a newtype around an SI base value (metres, watts, kelvin,
//! W/m²). Constructors validate finiteness and sign at the boundary so the
//! physics code can work with plain `f64` accessors internally. Conversions
//! between unit spellings of the same dimension are pure ratio scalings
//! (offset 273.15 for °C ↔ K) and round-trip to within 1 ulp.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Planck constant, J·s (CODATA 2018, exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// h·c, J·m.
pub const HC: f64 = PLANCK_H * SPEED_OF_LIGHT;

/// Vacuum permittivity, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Rydberg constant corrected for the mass of the Ca-40 nucleus, cm⁻¹.
///
/// R_M = R_inf / (1 + m_e/M) with R_inf = 109737.31568160 cm⁻¹,
/// m_e = 5.48579909065e-4 u and M(Ca-40) = 39.962590851 u.
pub const RYDBERG_CA40_PER_CM: f64 = 109_735.809_30;

/// Offset between the Celsius and kelvin scales.
pub const CELSIUS_OFFSET: f64 = 273.15;

fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be finite, got {value}")))
    }
}

fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    ensure_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {value}")))
    }
}

fn ensure_non_negative(name: &'static str, value: f64) -> Result<f64> {
    ensure_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(format!("{name} must be >= 0, got {value}")))
    }
}

/// Vacuum wavelength. Stored in metres; strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavelength {
    metres: f64,
}

impl Wavelength {
    pub fn from_m(metres: f64) -> Result<Self> {
        Ok(Self {
            metres: ensure_positive("wavelength", metres)?,
        })
    }

    pub fn from_nm(nm: f64) -> Result<Self> {
        Self::from_m(nm * 1e-9)
    }

    pub fn from_um(um: f64) -> Result<Self> {
        Self::from_m(um * 1e-6)
    }

    pub fn m(&self) -> f64 {
        self.metres
    }

    pub fn nm(&self) -> f64 {
        self.metres / 1e-9
    }

    pub fn um(&self) -> f64 {
        self.metres / 1e-6
    }

    /// Photon energy h·c/λ in joules.
    pub fn photon_energy(&self) -> Energy {
        Energy {
            joules: HC / self.metres,
        }
    }

    /// Spectroscopic wavenumber 1/λ in cm⁻¹.
    pub fn wavenumber_per_cm(&self) -> f64 {
        1e-2 / self.metres
    }

    /// Wavelength corresponding to a wavenumber in cm⁻¹.
    pub fn from_wavenumber_per_cm(sigma: f64) -> Result<Self> {
        ensure_positive("wavenumber", sigma)?;
        Self::from_m(1e-2 / sigma)
    }
}

/// Photon or transition energy in joules.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy {
    joules: f64,
}

impl Energy {
    pub fn from_joules(joules: f64) -> Result<Self> {
        Ok(Self {
            joules: ensure_positive("energy", joules)?,
        })
    }

    pub fn joules(&self) -> f64 {
        self.joules
    }

    /// Equivalent wavenumber E/(h·c) in cm⁻¹.
    pub fn wavenumber_per_cm(&self) -> f64 {
        self.joules / HC / 100.0
    }
}

/// Optical power. Stored in watts; non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Power {
    watts: f64,
}

impl Power {
    pub fn from_w(watts: f64) -> Result<Self> {
        Ok(Self {
            watts: ensure_non_negative("power", watts)?,
        })
    }

    pub fn from_mw(mw: f64) -> Result<Self> {
        Self::from_w(mw * 1e-3)
    }

    pub fn from_uw(uw: f64) -> Result<Self> {
        Self::from_w(uw * 1e-6)
    }

    pub fn from_pw(pw: f64) -> Result<Self> {
        Self::from_w(pw * 1e-12)
    }

    pub fn w(&self) -> f64 {
        self.watts
    }

    pub fn mw(&self) -> f64 {
        self.watts / 1e-3
    }

    pub fn uw(&self) -> f64 {
        self.watts / 1e-6
    }

    pub fn pw(&self) -> f64 {
        self.watts / 1e-12
    }
}

/// Optical intensity (irradiance). Stored in W/m²; non-negative.
///
/// 1 mW/mm² = 1000 W/m², exactly.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Intensity {
    w_per_m2: f64,
}

impl Intensity {
    pub fn from_w_per_m2(v: f64) -> Result<Self> {
        Ok(Self {
            w_per_m2: ensure_non_negative("intensity", v)?,
        })
    }

    pub fn from_mw_per_mm2(v: f64) -> Result<Self> {
        Self::from_w_per_m2(v * 1e3)
    }

    pub fn from_pw_per_mm2(v: f64) -> Result<Self> {
        Self::from_w_per_m2(v * 1e-6)
    }

    pub fn w_per_m2(&self) -> f64 {
        self.w_per_m2
    }

    pub fn mw_per_mm2(&self) -> f64 {
        self.w_per_m2 / 1e3
    }

    pub fn pw_per_mm2(&self) -> f64 {
        self.w_per_m2 / 1e-6
    }
}

/// Temperature. Stored in kelvin internally, °C at the interfaces.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Temperature {
    kelvin: f64,
}

impl Temperature {
    pub fn from_kelvin(kelvin: f64) -> Result<Self> {
        ensure_finite("temperature", kelvin)?;
        if kelvin < 0.0 {
            return Err(Error::domain(format!(
                "temperature must be >= 0 K, got {kelvin} K"
            )));
        }
        Ok(Self { kelvin })
    }

    pub fn from_celsius(celsius: f64) -> Result<Self> {
        Self::from_kelvin(celsius + CELSIUS_OFFSET)
    }

    pub fn kelvin(&self) -> f64 {
        self.kelvin
    }

    pub fn celsius(&self) -> f64 {
        self.kelvin - CELSIUS_OFFSET
    }
}

/// Geometric length (crystal lengths, spot sizes, lens spacings).
/// Stored in metres; non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Length {
    metres: f64,
}

impl Length {
    pub fn from_m(metres: f64) -> Result<Self> {
        Ok(Self {
            metres: ensure_non_negative("length", metres)?,
        })
    }

    pub fn from_mm(mm: f64) -> Result<Self> {
        Self::from_m(mm * 1e-3)
    }

    pub fn from_um(um: f64) -> Result<Self> {
        Self::from_m(um * 1e-6)
    }

    pub fn from_cm(cm: f64) -> Result<Self> {
        Self::from_m(cm * 1e-2)
    }

    pub fn m(&self) -> f64 {
        self.metres
    }

    pub fn mm(&self) -> f64 {
        self.metres / 1e-3
    }

    pub fn um(&self) -> f64 {
        self.metres / 1e-6
    }

    pub fn cm(&self) -> f64 {
        self.metres / 1e-2
    }
}

/// h·c/λ for a validated wavelength.
pub fn photon_energy(wavelength: Wavelength) -> Energy {
    wavelength.photon_energy()
}
