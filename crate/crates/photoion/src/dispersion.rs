//! Temperature-dependent refractive indices from Sellmeier coefficient sets.
//!
//! A [`DispersionSet`] is loaded from a plain-text data file (one
//! `name=value` pair per line, `#` comments) so that coefficient sets are
//! data, not code. The functional form is
//!
//! ```text
//! n(λ,T)² = a + b1/(1 - c1/λ²) + b2/(1 - c2/λ²) - d·λ²      (λ in µm)
//! n(λ,T)  = n(λ) + n1(λ)·(T - Tref) + n2(λ)·(T - Tref)²     (T in °C)
//! ```
//!
//! with the thermo-optic polynomials `n1`, `n2` cubic in 1/λ.

use crate::error::{Error, Result};
use crate::units::{Temperature, Wavelength, CELSIUS_OFFSET};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Principal axis of a biaxial crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// One published Sellmeier + thermo-optic coefficient set for one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSet {
    pub id: String,
    pub axis: Axis,
    /// Wavelength validity range in nm.
    pub valid_range_nm: (f64, f64),
    // Sellmeier: n² = a + b1/(1 - c1/λ²) + b2/(1 - c2/λ²) - d·λ², λ in µm
    a: f64,
    b1: f64,
    c1: f64,
    b2: f64,
    c2: f64,
    d: f64,
    // thermo-optic reference temperature, °C
    t_ref_c: f64,
    /// 1e-6 × cubic-in-1/λ coefficients for the linear temperature term.
    t1: [f64; 4],
    /// 1e-8 × cubic-in-1/λ coefficients for the quadratic temperature term.
    t2: [f64; 4],
}

/// The z-axis KTP set shipped with the crate (`data/ktp_z.dispersion`).
pub fn ktp_z() -> DispersionSet {
    DispersionSet::parse(include_str!("../data/ktp_z.dispersion"))
        .expect("shipped KTP data file is valid")
}

impl DispersionSet {
    /// Parse the `name=value` data-file schema.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse("dispersion file", n + 1, "expected name=value")
            })?;
            if map.insert(key.trim().to_string(), (n + 1, value.trim().to_string())).is_some() {
                return Err(Error::parse(
                    "dispersion file",
                    n + 1,
                    format!("duplicate key '{}'", key.trim()),
                ));
            }
        }
        let get = |key: &str| -> Result<String> {
            map.get(key)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::parse("dispersion file", 0, format!("missing key '{key}'")))
        };
        let num = |key: &str| -> Result<f64> {
            let (line, v) = map
                .get(key)
                .ok_or_else(|| Error::parse("dispersion file", 0, format!("missing key '{key}'")))?;
            v.parse::<f64>()
                .map_err(|_| Error::parse("dispersion file", *line, format!("bad number for '{key}'")))
        };
        let axis = match get("axis")?.as_str() {
            "x" => Axis::X,
            "y" => Axis::Y,
            "z" => Axis::Z,
            other => {
                return Err(Error::parse(
                    "dispersion file",
                    0,
                    format!("unknown axis '{other}'"),
                ))
            }
        };
        let set = DispersionSet {
            id: get("id")?,
            axis,
            valid_range_nm: (num("valid_min_nm")?, num("valid_max_nm")?),
            a: num("a")?,
            b1: num("b1")?,
            c1: num("c1")?,
            b2: num("b2")?,
            c2: num("c2")?,
            d: num("d")?,
            t_ref_c: num("t_ref_c")?,
            t1: [num("t1_0")?, num("t1_1")?, num("t1_2")?, num("t1_3")?],
            t2: [num("t2_0")?, num("t2_1")?, num("t2_2")?, num("t2_3")?],
        };
        set.validate()?;
        Ok(set)
    }

    /// Check physicality (n > 1) and smoothness of the set on a grid over
    /// its validity range.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.valid_range_nm;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(Error::domain(format!(
                "invalid wavelength range [{lo}, {hi}] nm"
            )));
        }
        let t = Temperature::from_celsius(self.t_ref_c).expect("reference temperature");
        let n_points = 64;
        let mut prev: Option<f64> = None;
        for i in 0..=n_points {
            let w_nm = lo + (hi - lo) * i as f64 / n_points as f64;
            let w = Wavelength::from_nm(w_nm)?;
            let n = self.index(w, t)?;
            if !(n.is_finite() && n > 1.0) {
                return Err(Error::domain(format!(
                    "{}: n({w_nm} nm) = {n} is unphysical",
                    self.id
                )));
            }
            // adjacent grid values must stay close: guards against a pole of
            // the Sellmeier form sitting inside the declared range
            if let Some(p) = prev {
                if (n - p).abs() > 0.2 {
                    return Err(Error::domain(format!(
                        "{}: index jumps by {} near {w_nm} nm",
                        self.id,
                        (n - p).abs()
                    )));
                }
            }
            prev = Some(n);
            // temperature smoothness at a few kelvin spacing
            let n_warm = self.index(w, Temperature::from_celsius(self.t_ref_c + 5.0)?)?;
            if (n_warm - n).abs() > 1e-2 {
                return Err(Error::domain(format!(
                    "{}: thermo-optic term too large near {w_nm} nm",
                    self.id
                )));
            }
        }
        Ok(())
    }

    fn check_range(&self, wavelength: Wavelength) -> Result<()> {
        let nm = wavelength.nm();
        let (lo, hi) = self.valid_range_nm;
        if nm < lo || nm > hi {
            return Err(Error::OutOfRange {
                name: "wavelength (nm)",
                value: nm,
                min: lo,
                max: hi,
            });
        }
        Ok(())
    }

    /// Refractive index n(λ, T).
    pub fn index(&self, wavelength: Wavelength, temperature: Temperature) -> Result<f64> {
        self.check_range(wavelength)?;
        let x = wavelength.um();
        let x2 = x * x;
        let n_sq = self.a + self.b1 / (1.0 - self.c1 / x2) + self.b2 / (1.0 - self.c2 / x2)
            - self.d * x2;
        if n_sq <= 1.0 {
            return Err(Error::domain(format!(
                "{}: n²({x} µm) = {n_sq} is unphysical",
                self.id
            )));
        }
        let inv = 1.0 / x;
        let poly = |c: &[f64; 4]| c[0] + inv * (c[1] + inv * (c[2] + inv * c[3]));
        let dt = (temperature.kelvin() - CELSIUS_OFFSET) - self.t_ref_c;
        let correction = 1e-6 * poly(&self.t1) * dt + 1e-8 * poly(&self.t2) * dt * dt;
        Ok(n_sq.sqrt() + correction)
    }
}
