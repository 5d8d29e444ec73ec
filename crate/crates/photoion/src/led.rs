//! LED spectral power distribution: band-power extraction for the
//! photoionization budget and rescaling of the whole spectrum from a
//! measured in-band resonant power (the inverse inference step).

use crate::error::{Error, Result};
use crate::spectrum::{BandPower, SampledSpectrum};
use crate::units::{Power, Wavelength};
use serde::{Deserialize, Serialize};

/// Calibrated effective bandwidth (nm) converting the inferred resonant
/// power at 393 nm into a spectral density. The value is fitted once so
/// that the default Gaussian spectrum, rescaled from 14 pW at 393 nm,
/// carries 144 µW in the 365-391 nm band; it is a reported convention, not
/// a first-principles prediction.
pub const DEFAULT_RESONANT_BANDWIDTH_NM: f64 = 3.587466e-6;

/// Spectral shape of the LED emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    Gaussian { center_nm: f64, fwhm_nm: f64 },
    Tabulated(SampledSpectrum),
}

/// LED emission: a spectral shape carrying a total power at some reference
/// plane (die, fiber input or trap, depending on the budget step).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedSpec {
    model: SpectrumModel,
    /// Realized spectrum, normalized so its integral equals the total power.
    spectrum: SampledSpectrum,
}

impl LedSpec {
    const GAUSSIAN_POINTS: usize = 2001;

    pub fn gaussian(center_nm: f64, fwhm_nm: f64, total: Power) -> Result<Self> {
        if total.w() <= 0.0 {
            return Err(Error::domain("LED total power must be > 0"));
        }
        let spectrum =
            SampledSpectrum::gaussian(center_nm, fwhm_nm, total, Self::GAUSSIAN_POINTS)?;
        Ok(Self {
            model: SpectrumModel::Gaussian { center_nm, fwhm_nm },
            spectrum,
        })
    }

    /// Tabulated spectrum, normalized to `total` on load.
    pub fn tabulated(shape: SampledSpectrum, total: Power) -> Result<Self> {
        if total.w() <= 0.0 {
            return Err(Error::domain("LED total power must be > 0"));
        }
        let spectrum = shape.rescaled_to_total(total)?;
        Ok(Self {
            model: SpectrumModel::Tabulated(shape),
            spectrum,
        })
    }

    pub fn model(&self) -> &SpectrumModel {
        &self.model
    }

    pub fn spectrum(&self) -> &SampledSpectrum {
        &self.spectrum
    }

    pub fn total_power(&self) -> Power {
        self.spectrum.total_power()
    }

    pub fn density_at(&self, wavelength: Wavelength) -> f64 {
        self.spectrum.density_at(wavelength.nm())
    }

    /// Power emitted in `[lo, hi]` nm.
    pub fn band_power(&self, band_lo_nm: f64, band_hi_nm: f64) -> Result<BandPower> {
        self.spectrum.integrate(band_lo_nm, band_hi_nm)
    }

    /// Rescale the whole spectrum so its density at `anchor` equals
    /// `resonant_power / effective_bandwidth`, preserving the shape. This is
    /// the inverse of reading a narrow resonant power off the distribution.
    pub fn rescaled_from_resonant_power(
        &self,
        resonant_power: Power,
        anchor: Wavelength,
        effective_bandwidth_nm: f64,
    ) -> Result<Self> {
        if !(effective_bandwidth_nm.is_finite() && effective_bandwidth_nm > 0.0) {
            return Err(Error::domain(format!(
                "effective bandwidth must be > 0, got {effective_bandwidth_nm} nm"
            )));
        }
        let current = self.density_at(anchor);
        if current <= 0.0 {
            return Err(Error::domain(format!(
                "spectrum has zero density at {} nm; cannot anchor a rescale there",
                anchor.nm()
            )));
        }
        let target_density = resonant_power.w() / effective_bandwidth_nm;
        let factor = target_density / current;
        Ok(Self {
            model: self.model.clone(),
            spectrum: self.spectrum.scaled(factor)?,
        })
    }
}
