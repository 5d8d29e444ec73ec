//! Sampled spectral power distributions.
//!
//! A spectrum is a list of (wavelength, spectral density) samples with
//! strictly increasing wavelengths, interpreted piecewise-linearly and
//! integrated with the trapezoidal rule. Densities are stored in W/nm so
//! rescaling and integration commute.

use crate::error::{Error, Result};
use crate::units::Power;
use serde::{Deserialize, Serialize};

pub const SPECTRUM_CSV_HEADER: &str = "wavelength_nm,density_w_per_nm";

/// Piecewise-linear spectral power density over wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSpectrum {
    /// (wavelength in nm, density in W/nm), wavelengths strictly increasing.
    samples: Vec<(f64, f64)>,
}

/// Result of integrating a spectrum over a band.
#[derive(Debug, Clone, Copy)]
pub struct BandPower {
    pub power: Power,
    /// True if the requested band extended beyond the sample support and
    /// was clamped to it.
    pub clamped: bool,
}

impl SampledSpectrum {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::domain(format!(
                "spectrum needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, &(w, d)) in samples.iter().enumerate() {
            if !w.is_finite() || !d.is_finite() {
                return Err(Error::domain(format!("non-finite sample at index {i}")));
            }
            if w <= 0.0 {
                return Err(Error::domain(format!("wavelength {w} nm at index {i}")));
            }
            if d < 0.0 {
                return Err(Error::domain(format!(
                    "negative density {d} W/nm at {w} nm"
                )));
            }
            if i > 0 && w <= samples[i - 1].0 {
                return Err(Error::domain(format!(
                    "wavelengths must be strictly increasing ({} nm after {} nm)",
                    w,
                    samples[i - 1].0
                )));
            }
        }
        Ok(Self { samples })
    }

    /// Sample a Gaussian line shape of the given total power on a uniform
    /// grid spanning ±5σ around the center.
    pub fn gaussian(center_nm: f64, fwhm_nm: f64, total: Power, points: usize) -> Result<Self> {
        if !(center_nm.is_finite() && center_nm > 0.0) {
            return Err(Error::domain(format!("gaussian center {center_nm} nm")));
        }
        if !(fwhm_nm.is_finite() && fwhm_nm > 0.0) {
            return Err(Error::domain(format!("gaussian fwhm {fwhm_nm} nm")));
        }
        let n = points.max(64);
        let sigma = fwhm_nm / (8.0 * std::f64::consts::LN_2).sqrt();
        let lo = (center_nm - 5.0 * sigma).max(center_nm * 1e-3);
        let hi = center_nm + 5.0 * sigma;
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let samples = (0..n)
            .map(|i| {
                let w = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                let z = (w - center_nm) / sigma;
                (w, norm * (-0.5 * z * z).exp())
            })
            .collect();
        let s = Self::new(samples)?;
        s.rescaled_to_total(total)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn support(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Linearly interpolated density at `wavelength_nm`; zero outside support.
    pub fn density_at(&self, wavelength_nm: f64) -> f64 {
        let (lo, hi) = self.support();
        if wavelength_nm < lo || wavelength_nm > hi {
            return 0.0;
        }
        let idx = self
            .samples
            .partition_point(|&(w, _)| w < wavelength_nm)
            .min(self.samples.len() - 1)
            .max(1);
        let (w0, d0) = self.samples[idx - 1];
        let (w1, d1) = self.samples[idx];
        let t = (wavelength_nm - w0) / (w1 - w0);
        d0 + t * (d1 - d0)
    }

    /// Trapezoidal integral of the density over the full support, in watts.
    pub fn total_power(&self) -> Power {
        let (lo, hi) = self.support();
        let total = self.integral(lo, hi);
        Power::from_w(total).expect("non-negative by construction")
    }

    /// Trapezoidal integral over `[band_lo, band_hi]`, clamped to the support.
    pub fn integrate(&self, band_lo_nm: f64, band_hi_nm: f64) -> Result<BandPower> {
        if !(band_lo_nm.is_finite() && band_hi_nm.is_finite()) {
            return Err(Error::domain("band edges must be finite".to_string()));
        }
        if band_lo_nm >= band_hi_nm {
            if band_lo_nm == band_hi_nm {
                return Ok(BandPower {
                    power: Power::from_w(0.0).unwrap(),
                    clamped: false,
                });
            }
            return Err(Error::domain(format!(
                "band [{band_lo_nm}, {band_hi_nm}] nm is reversed"
            )));
        }
        let (lo, hi) = self.support();
        let a = band_lo_nm.max(lo);
        let b = band_hi_nm.min(hi);
        let clamped = band_lo_nm < lo || band_hi_nm > hi;
        let power = if a >= b { 0.0 } else { self.integral(a, b) };
        Ok(BandPower {
            power: Power::from_w(power)?,
            clamped,
        })
    }

    // Exact trapezoidal integral of the piecewise-linear density over [a, b],
    // with a, b inside the support.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let mut sum = 0.0;
        for pair in self.samples.windows(2) {
            let (w0, d0) = pair[0];
            let (w1, d1) = pair[1];
            let seg_lo = w0.max(a);
            let seg_hi = w1.min(b);
            if seg_lo >= seg_hi {
                continue;
            }
            let t0 = (seg_lo - w0) / (w1 - w0);
            let t1 = (seg_hi - w0) / (w1 - w0);
            let f0 = d0 + t0 * (d1 - d0);
            let f1 = d0 + t1 * (d1 - d0);
            sum += 0.5 * (f0 + f1) * (seg_hi - seg_lo);
        }
        sum
    }

    /// Same spectrum with every density multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::domain(format!("scale factor {factor}")));
        }
        Self::new(
            self.samples
                .iter()
                .map(|&(w, d)| (w, d * factor))
                .collect(),
        )
    }

    /// Same shape, rescaled so the total power equals `total`.
    pub fn rescaled_to_total(&self, total: Power) -> Result<Self> {
        let current = self.total_power().w();
        if current <= 0.0 {
            return Err(Error::domain(
                "cannot rescale a spectrum with zero integral".to_string(),
            ));
        }
        self.scaled(total.w() / current)
    }

    /// Parse the `wavelength_nm,density_w_per_nm` CSV schema (header mandatory).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => continue,
                Some((n, l)) => break (n, l),
                None => return Err(Error::domain("empty spectrum file".to_string())),
            }
        };
        if header.1.trim() != SPECTRUM_CSV_HEADER {
            return Err(Error::parse(
                "spectrum csv",
                header.0 + 1,
                format!("expected header '{SPECTRUM_CSV_HEADER}', got '{}'", header.1.trim()),
            ));
        }
        let mut samples = Vec::new();
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let w = parts
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::parse("spectrum csv", n + 1, "bad wavelength field"))?;
            let d = parts
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::parse("spectrum csv", n + 1, "bad density field"))?;
            if parts.next().is_some() {
                return Err(Error::parse("spectrum csv", n + 1, "expected 2 fields"));
            }
            samples.push((w, d));
        }
        Self::new(samples)
    }

    /// Render in the CSV schema (LF line endings).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SPECTRUM_CSV_HEADER);
        out.push('\n');
        for &(w, d) in &self.samples {
            out.push_str(&format!("{w},{d}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flat_unit_spectrum() -> SampledSpectrum {
        // 1 W spread uniformly over [300, 400] nm
        SampledSpectrum::new(vec![(300.0, 0.01), (400.0, 0.01)]).unwrap()
    }

    #[test]
    fn full_support_of_unit_power_spectrum() {
        let s = flat_unit_spectrum();
        let b = s.integrate(300.0, 400.0).unwrap();
        assert_relative_eq!(b.power.w(), 1.0, max_relative = 1e-12);
        assert!(!b.clamped);
        assert_relative_eq!(s.total_power().w(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_width_band_is_zero() {
        let s = flat_unit_spectrum();
        let b = s.integrate(350.0, 350.0).unwrap();
        assert_eq!(b.power.w(), 0.0);
    }

    #[test]
    fn out_of_support_band_clamps_with_flag() {
        let s = flat_unit_spectrum();
        let b = s.integrate(200.0, 500.0).unwrap();
        assert!(b.clamped);
        assert_relative_eq!(b.power.w(), 1.0, max_relative = 1e-12);
        let b = s.integrate(100.0, 200.0).unwrap();
        assert!(b.clamped);
        assert_eq!(b.power.w(), 0.0);
    }

    #[test]
    fn gaussian_band_fraction_matches_fine_grid_oracle() {
        // independent oracle: midpoint rule on a 2e6-point grid of the
        // analytic gaussian density
        let (center, fwhm) = (380.0, 30.0);
        let sigma = fwhm / (8.0f64 * std::f64::consts::LN_2).sqrt();
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let (a, b) = (365.0, 391.0);
        let n = 2_000_000;
        let h = (b - a) / n as f64;
        let oracle: f64 = (0..n)
            .map(|i| {
                let w = a + (i as f64 + 0.5) * h;
                let z = (w - center) / sigma;
                norm * (-0.5 * z * z).exp() * h
            })
            .sum();

        let s = SampledSpectrum::gaussian(center, fwhm, Power::from_w(1.0).unwrap(), 4001).unwrap();
        let got = s.integrate(a, b).unwrap().power.w();
        assert_relative_eq!(got, oracle, max_relative = 2e-4);
        // frozen oracle value for the band used throughout the LED budget
        assert_relative_eq!(oracle, 0.6865, max_relative = 1e-3);
        assert!((got - 0.686).abs() < 0.002);
    }

    #[test]
    fn integration_is_additive_over_adjacent_bands() {
        let s = SampledSpectrum::gaussian(380.0, 30.0, Power::from_w(2.5).unwrap(), 1501).unwrap();
        let (lo, hi) = s.support();
        let cuts = [lo, 341.7, 365.0, 380.0, 391.0, 402.3, hi];
        let total: f64 = cuts
            .windows(2)
            .map(|w| s.integrate(w[0], w[1]).unwrap().power.w())
            .sum();
        let whole = s.integrate(lo, hi).unwrap().power.w();
        assert_relative_eq!(total, whole, max_relative = 1e-12);
    }

    #[test]
    fn declared_total_matches_integral() {
        let s = SampledSpectrum::gaussian(380.0, 30.0, Power::from_uw(80.0).unwrap(), 2001)
            .unwrap();
        assert_relative_eq!(s.total_power().uw(), 80.0, max_relative = 1e-9);
    }

    #[test]
    fn monotone_in_band_width() {
        let s = SampledSpectrum::gaussian(380.0, 30.0, Power::from_w(1.0).unwrap(), 1001).unwrap();
        let mut prev = 0.0;
        for half in [1.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
            let p = s.integrate(380.0 - half, 380.0 + half).unwrap().power.w();
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn invalid_spectra_rejected() {
        assert!(SampledSpectrum::new(vec![]).is_err());
        assert!(SampledSpectrum::new(vec![(400.0, 1.0)]).is_err());
        assert!(SampledSpectrum::new(vec![(400.0, 1.0), (400.0, 1.0)]).is_err());
        assert!(SampledSpectrum::new(vec![(400.0, 1.0), (390.0, 1.0)]).is_err());
        assert!(SampledSpectrum::new(vec![(390.0, -1.0), (400.0, 1.0)]).is_err());
        assert!(SampledSpectrum::new(vec![(390.0, 1.0), (400.0, f64::NAN)]).is_err());
    }

    #[test]
    fn reversed_band_rejected() {
        let s = flat_unit_spectrum();
        assert!(s.integrate(400.0, 300.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = SampledSpectrum::new(vec![(350.0, 0.25), (375.5, 1.0), (400.0, 0.5)]).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with(SPECTRUM_CSV_HEADER));
        let back = SampledSpectrum::from_csv(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn csv_header_is_mandatory() {
        assert!(SampledSpectrum::from_csv("350.0,0.25\n400.0,0.5\n").is_err());
        assert!(SampledSpectrum::from_csv("nm,w\n350.0,0.25\n400.0,0.5\n").is_err());
    }
}
