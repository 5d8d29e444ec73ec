//! Paraxial imaging of extended sources: ABCD ray matrices, magnification,
//! collection solid angles, fiber-coupling feasibility, transmission budgets
//! and on-target intensities for the light-delivery chain.

use crate::error::{Error, Result};
use crate::units::{Intensity, Length, Power};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Refractive index assumed for flat windows (UV-grade glass).
const WINDOW_INDEX: f64 = 1.5;

/// 2×2 paraxial ray matrix acting on (height m, angle rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RayMatrix {
    pub const IDENTITY: RayMatrix = RayMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `self * rhs` (apply `rhs` first, then `self`).
    pub fn compose(&self, rhs: &RayMatrix) -> RayMatrix {
        RayMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Propagate a ray (height in metres, angle in radians).
    pub fn trace(&self, height_m: f64, angle_rad: f64) -> (f64, f64) {
        (
            self.a * height_m + self.b * angle_rad,
            self.c * height_m + self.d * angle_rad,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    ThinLens { focal_length_mm: f64 },
    FreeSpace { distance_mm: f64 },
    Aperture { diameter_mm: f64 },
    FlatWindow { thickness_mm: f64 },
}

/// One element of an imaging train with its power transmittance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalElement {
    pub kind: ElementKind,
    pub transmittance: f64,
}

impl OpticalElement {
    pub fn new(kind: ElementKind, transmittance: f64) -> Result<Self> {
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(Error::domain(format!(
                "transmittance must be in (0,1], got {transmittance}"
            )));
        }
        match kind {
            ElementKind::ThinLens { focal_length_mm } => {
                if focal_length_mm == 0.0 || !focal_length_mm.is_finite() {
                    return Err(Error::domain("thin lens focal length must be nonzero"));
                }
            }
            ElementKind::FreeSpace { distance_mm } => {
                if !(distance_mm.is_finite() && distance_mm >= 0.0) {
                    return Err(Error::domain(format!(
                        "free-space distance must be >= 0, got {distance_mm} mm"
                    )));
                }
            }
            ElementKind::Aperture { diameter_mm } => {
                if !(diameter_mm.is_finite() && diameter_mm > 0.0) {
                    return Err(Error::domain(format!(
                        "aperture diameter must be > 0, got {diameter_mm} mm"
                    )));
                }
            }
            ElementKind::FlatWindow { thickness_mm } => {
                if !(thickness_mm.is_finite() && thickness_mm >= 0.0) {
                    return Err(Error::domain(format!(
                        "window thickness must be >= 0, got {thickness_mm} mm"
                    )));
                }
            }
        }
        Ok(Self {
            kind,
            transmittance,
        })
    }

    pub fn lens(focal_length_mm: f64) -> Result<Self> {
        Self::new(ElementKind::ThinLens { focal_length_mm }, 1.0)
    }

    pub fn space(distance_mm: f64) -> Result<Self> {
        Self::new(ElementKind::FreeSpace { distance_mm }, 1.0)
    }

    /// Unit-determinant ray matrix in SI units.
    pub fn matrix(&self) -> RayMatrix {
        match self.kind {
            ElementKind::ThinLens { focal_length_mm } => RayMatrix {
                a: 1.0,
                b: 0.0,
                c: -1.0 / (focal_length_mm * 1e-3),
                d: 1.0,
            },
            ElementKind::FreeSpace { distance_mm } => RayMatrix {
                a: 1.0,
                b: distance_mm * 1e-3,
                c: 0.0,
                d: 1.0,
            },
            // index-matched entry and exit: reduced path t/n
            ElementKind::FlatWindow { thickness_mm } => RayMatrix {
                a: 1.0,
                b: thickness_mm * 1e-3 / WINDOW_INDEX,
                c: 0.0,
                d: 1.0,
            },
            ElementKind::Aperture { .. } => RayMatrix::IDENTITY,
        }
    }
}

/// Ordered sequence of optical elements, source plane at the entrance of
/// the first element. `aberration_factor` inflates the geometric image size
/// to the ray-traced spot of the real lenses (1.0 = ideal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagingTrain {
    pub elements: Vec<OpticalElement>,
    pub aberration_factor: f64,
}

impl ImagingTrain {
    pub fn new(elements: Vec<OpticalElement>, aberration_factor: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::domain("imaging train must contain an element"));
        }
        if !(aberration_factor.is_finite() && aberration_factor >= 1.0) {
            return Err(Error::domain(format!(
                "aberration factor must be >= 1, got {aberration_factor}"
            )));
        }
        Ok(Self {
            elements,
            aberration_factor,
        })
    }

    /// Ordered product of the element matrices.
    pub fn abcd(&self) -> RayMatrix {
        self.elements
            .iter()
            .fold(RayMatrix::IDENTITY, |m, e| e.matrix().compose(&m))
    }

    /// Product of the element transmittances.
    pub fn transmittance(&self) -> f64 {
        self.elements.iter().map(|e| e.transmittance).product()
    }
}

/// Angular emission model of an extended source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularModel {
    /// Radiance ∝ cos θ.
    Lambertian,
    /// Uniform emission per solid angle inside a cone.
    UniformCone { half_angle_rad: f64 },
    /// Tabulated relative intensity per solid angle vs polar angle.
    Tabulated(AngularPattern),
}

/// Tabulated angular intensity pattern, normalized to 1 at its maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularPattern {
    /// (angle deg, relative intensity), angles strictly increasing from 0.
    samples: Vec<(f64, f64)>,
}

pub const ANGULAR_CSV_HEADER: &str = "angle_deg,relative_intensity";

impl AngularPattern {
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::domain("angular pattern needs at least 2 samples"));
        }
        let mut peak: f64 = 0.0;
        for (i, &(a, v)) in samples.iter().enumerate() {
            if !(a.is_finite() && v.is_finite()) || v < 0.0 || !(0.0..=90.0).contains(&a) {
                return Err(Error::domain(format!(
                    "bad angular sample ({a} deg, {v}) at index {i}"
                )));
            }
            if i > 0 && a <= samples[i - 1].0 {
                return Err(Error::domain("angles must be strictly increasing"));
            }
            peak = peak.max(v);
        }
        if peak <= 0.0 {
            return Err(Error::domain("angular pattern is identically zero"));
        }
        for s in &mut samples {
            s.1 /= peak;
        }
        Ok(Self { samples })
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        let mut saw_header = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != ANGULAR_CSV_HEADER {
                    return Err(Error::parse(
                        "angular pattern csv",
                        n + 1,
                        format!("expected header '{ANGULAR_CSV_HEADER}'"),
                    ));
                }
                saw_header = true;
                continue;
            }
            let (a, v) = line
                .split_once(',')
                .and_then(|(a, v)| Some((a.trim().parse::<f64>().ok()?, v.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| Error::parse("angular pattern csv", n + 1, "bad sample line"))?;
            samples.push((a, v));
        }
        Self::new(samples)
    }

    // ∫ I(θ) sin θ dθ from 0 to `up_to_rad` by the trapezoidal rule on the
    // table grid, with an interpolated endpoint.
    fn weighted_integral(&self, up_to_rad: f64) -> f64 {
        let mut sum = 0.0;
        let f = |angle_deg: f64, value: f64| value * angle_deg.to_radians().sin();
        for pair in self.samples.windows(2) {
            let (a0, v0) = pair[0];
            let (a1, v1) = pair[1];
            let r0 = a0.to_radians();
            let r1 = a1.to_radians();
            if r0 >= up_to_rad {
                break;
            }
            if r1 <= up_to_rad {
                sum += 0.5 * (f(a0, v0) + f(a1, v1)) * (r1 - r0);
            } else {
                let t = (up_to_rad - r0) / (r1 - r0);
                let vc = v0 + t * (v1 - v0);
                let ac = a0 + t * (a1 - a0);
                sum += 0.5 * (f(a0, v0) + f(ac, vc)) * (up_to_rad - r0);
                break;
            }
        }
        sum
    }
}

/// Extended emitter (LED die, fiber end face).
#[derive(Debug, Clone)]
pub struct SourcePatch {
    /// Side length or diameter of the emitting area.
    pub size: Length,
    pub angular_model: AngularModel,
    pub total_power: Power,
    pub polarized_fraction: f64,
}

impl SourcePatch {
    pub fn new(
        size: Length,
        angular_model: AngularModel,
        total_power: Power,
        polarized_fraction: f64,
    ) -> Result<Self> {
        if size.m() <= 0.0 {
            return Err(Error::domain("source size must be > 0"));
        }
        if !(polarized_fraction > 0.0 && polarized_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "polarized fraction must be in (0,1], got {polarized_fraction}"
            )));
        }
        if let AngularModel::UniformCone { half_angle_rad } = angular_model {
            if !(half_angle_rad > 0.0 && half_angle_rad <= FRAC_PI_2) {
                return Err(Error::domain(format!(
                    "uniform cone half-angle must be in (0, π/2], got {half_angle_rad}"
                )));
            }
        }
        Ok(Self {
            size,
            angular_model,
            total_power,
            polarized_fraction,
        })
    }
}

/// Multimode delivery fiber.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FiberSpec {
    pub core_diameter: Length,
    pub numerical_aperture: f64,
    pub length: Length,
    pub transmittance: f64,
}

impl FiberSpec {
    pub fn new(
        core_diameter: Length,
        numerical_aperture: f64,
        length: Length,
        transmittance: f64,
    ) -> Result<Self> {
        if core_diameter.m() <= 0.0 {
            return Err(Error::domain("fiber core diameter must be > 0"));
        }
        if !(numerical_aperture > 0.0 && numerical_aperture < 1.0) {
            return Err(Error::domain(format!(
                "fiber NA must be in (0,1), got {numerical_aperture}"
            )));
        }
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(Error::domain(format!(
                "fiber transmittance must be in (0,1], got {transmittance}"
            )));
        }
        Ok(Self {
            core_diameter,
            numerical_aperture,
            length,
            transmittance,
        })
    }
}

/// Solved image of an extended source through a train.
#[derive(Debug, Clone, Copy)]
pub struct ImageResult {
    /// Signed transverse magnification.
    pub magnification: f64,
    /// Distance from the last element to the image plane.
    pub image_distance: Length,
    /// |m| × source size, aberration-free.
    pub geometric_image_size: Length,
    /// Geometric size scaled by the train's aberration factor.
    pub aberrated_image_size: Length,
}

/// Solve the image plane of `train` (B = 0 after a trailing free-space
/// propagation) and return the magnification and image size of `src`.
pub fn image_extended_source(src: &SourcePatch, train: &ImagingTrain) -> Result<ImageResult> {
    let m = train.abcd();
    if m.d.abs() < 1e-12 {
        return Err(Error::domain(
            "train is afocal: image plane at infinity".to_string(),
        ));
    }
    let s = -m.b / m.d;
    if s < -1e-12 {
        return Err(Error::domain(format!(
            "no real conjugate plane: solved image distance {:.3} mm is virtual",
            s * 1e3
        )));
    }
    let s = s.max(0.0);
    let mag = m.a + s * m.c;
    if mag.abs() < 1e-15 {
        return Err(Error::domain("degenerate imaging: zero magnification"));
    }
    let geometric = Length::from_m(src.size.m() * mag.abs())?;
    Ok(ImageResult {
        magnification: mag,
        image_distance: Length::from_m(s)?,
        geometric_image_size: geometric,
        aberrated_image_size: Length::from_m(geometric.m() * train.aberration_factor)?,
    })
}

/// How the collection cone of an optical system is specified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collector {
    HalfAngleRad(f64),
    NumericalAperture(f64),
    /// Fraction of the 2π hemisphere solid angle.
    SolidAngleFraction(f64),
    ApertureAtDistance {
        diameter_mm: f64,
        distance_mm: f64,
    },
}

impl Collector {
    pub fn half_angle_rad(&self) -> Result<f64> {
        let theta = match *self {
            Collector::HalfAngleRad(t) => t,
            Collector::NumericalAperture(na) => {
                if !(na > 0.0 && na < 1.0) {
                    return Err(Error::domain(format!("NA must be in (0,1), got {na}")));
                }
                na.asin()
            }
            Collector::SolidAngleFraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::domain(format!(
                        "solid-angle fraction must be in (0,1], got {f}"
                    )));
                }
                (1.0 - f).acos()
            }
            Collector::ApertureAtDistance {
                diameter_mm,
                distance_mm,
            } => {
                if diameter_mm <= 0.0 || distance_mm <= 0.0 {
                    return Err(Error::domain("aperture geometry must be positive"));
                }
                (0.5 * diameter_mm / distance_mm).atan()
            }
        };
        if !(theta > 0.0 && theta <= FRAC_PI_2) {
            return Err(Error::domain(format!(
                "collection half-angle {theta} rad outside (0, π/2]"
            )));
        }
        Ok(theta)
    }
}

/// Collected solid angle and power for a source and collection cone.
#[derive(Debug, Clone, Copy)]
pub struct CollectionResult {
    /// Ω/2π of the collection cone.
    pub solid_angle_fraction: f64,
    /// Fraction of the source's total power inside the cone, including the
    /// polarized fraction.
    pub power_fraction: f64,
    pub collected: Power,
}

/// Integrate the source's angular emission over the collection cone.
pub fn collection_fraction(src: &SourcePatch, collector: Collector) -> Result<CollectionResult> {
    let theta = collector.half_angle_rad()?;
    let solid_angle_fraction = 1.0 - theta.cos();
    let angular_fraction = match &src.angular_model {
        AngularModel::Lambertian => theta.sin().powi(2),
        AngularModel::UniformCone { half_angle_rad } => {
            let full = 1.0 - half_angle_rad.cos();
            ((1.0 - theta.min(*half_angle_rad).cos()) / full).min(1.0)
        }
        AngularModel::Tabulated(pattern) => {
            let denom = pattern.weighted_integral(FRAC_PI_2);
            if denom <= 0.0 {
                return Err(Error::domain("angular pattern integrates to zero"));
            }
            pattern.weighted_integral(theta) / denom
        }
    };
    let power_fraction = angular_fraction * src.polarized_fraction;
    Ok(CollectionResult {
        solid_angle_fraction,
        power_fraction,
        collected: Power::from_w(src.total_power.w() * power_fraction)?,
    })
}

/// Fiber-coupling verdict for an image of known size and convergence.
#[derive(Debug, Clone, Copy)]
pub struct FiberCoupling {
    pub feasible: bool,
    /// (image size × converging NA) / (core diameter × fiber NA).
    pub etendue_ratio: f64,
}

pub fn fiber_coupling_feasible(
    image_size: Length,
    converging_na: f64,
    fiber: &FiberSpec,
) -> Result<FiberCoupling> {
    if image_size.m() <= 0.0 || converging_na <= 0.0 {
        return Err(Error::domain("image size and NA must be positive"));
    }
    // exactly étendue-matched launches count as feasible
    let tol = 1.0 + 1e-9;
    let feasible = image_size.m() <= fiber.core_diameter.m() * tol
        && converging_na <= fiber.numerical_aperture * tol;
    let etendue_ratio = (image_size.m() * converging_na)
        / (fiber.core_diameter.m() * fiber.numerical_aperture);
    Ok(FiberCoupling {
        feasible,
        etendue_ratio,
    })
}

/// Product rule for a chain of power transmittances.
pub fn transmission_budget(input: Power, chain: &[f64]) -> Result<Power> {
    for &t in chain {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::domain(format!(
                "transmittance must be in (0,1], got {t}"
            )));
        }
    }
    Power::from_w(input.w() * chain.iter().product::<f64>())
}

/// Flat-top intensity I = P / (π·(d/2)²) over a spot of diameter `d`.
pub fn intensity_at_spot(power: Power, spot_diameter: Length) -> Result<Intensity> {
    if spot_diameter.m() <= 0.0 {
        return Err(Error::domain("spot diameter must be > 0"));
    }
    let r = 0.5 * spot_diameter.m();
    Intensity::from_w_per_m2(power.w() / (PI * r * r))
}

/// Divergence half-angle of an atomic beam collimated by an orifice.
pub fn beam_collimation_half_angle(orifice_diameter: Length, distance: Length) -> Result<f64> {
    if orifice_diameter.m() <= 0.0 || distance.m() <= 0.0 {
        return Err(Error::domain("orifice geometry must be positive"));
    }
    Ok((0.5 * orifice_diameter.m() / distance.m()).atan())
}

/// The fitted LED angular pattern shipped with the crate
/// (`data/led_angular_pattern.csv`).
pub fn led_angular_pattern() -> AngularPattern {
    AngularPattern::from_csv(include_str!("../data/led_angular_pattern.csv"))
        .expect("shipped angular pattern is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mm(v: f64) -> Length {
        Length::from_mm(v).unwrap()
    }

    fn um(v: f64) -> Length {
        Length::from_um(v).unwrap()
    }

    fn uw(v: f64) -> Power {
        Power::from_uw(v).unwrap()
    }

    fn train(elements: Vec<OpticalElement>) -> ImagingTrain {
        ImagingTrain::new(elements, 1.0).unwrap()
    }

    #[test]
    fn free_space_matrix() {
        let m = OpticalElement::space(250.0).unwrap().matrix();
        assert_eq!(m.a, 1.0);
        assert_relative_eq!(m.b, 0.25, max_relative = 1e-15);
        assert_eq!(m.c, 0.0);
        assert_eq!(m.d, 1.0);
    }

    #[test]
    fn opposite_lenses_at_zero_spacing_cancel() {
        let t = train(vec![
            OpticalElement::lens(100.0).unwrap(),
            OpticalElement::lens(-100.0).unwrap(),
        ]);
        let m = t.abcd();
        assert_relative_eq!(m.a, 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.b, 0.0, epsilon = 1e-15);
        assert_relative_eq!(m.c, 0.0, epsilon = 1e-12);
        assert_relative_eq!(m.d, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn four_f_system_inverts() {
        // symbolic product: FS(f)·L(f)·FS(2f)·L(f)·FS(f) = -I
        let f = 100.0;
        let t = train(vec![
            OpticalElement::space(f).unwrap(),
            OpticalElement::lens(f).unwrap(),
            OpticalElement::space(2.0 * f).unwrap(),
            OpticalElement::lens(f).unwrap(),
            OpticalElement::space(f).unwrap(),
        ]);
        let m = t.abcd();
        assert_relative_eq!(m.a, -1.0, epsilon = 1e-12);
        assert_relative_eq!(m.b, 0.0, epsilon = 1e-12);
        assert_relative_eq!(m.c, 0.0, epsilon = 1e-12);
        assert_relative_eq!(m.d, -1.0, epsilon = 1e-12);
    }

    fn one_mm_source() -> SourcePatch {
        SourcePatch::new(
            mm(1.0),
            AngularModel::Lambertian,
            Power::from_mw(80.0).unwrap(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn demagnifying_relay_gives_one_fifth() {
        // collimate with f=200 mm, focus with f=40 mm
        let t = train(vec![
            OpticalElement::space(200.0).unwrap(),
            OpticalElement::lens(200.0).unwrap(),
            OpticalElement::space(50.0).unwrap(),
            OpticalElement::lens(40.0).unwrap(),
        ]);
        let img = image_extended_source(&one_mm_source(), &t).unwrap();
        assert_relative_eq!(img.magnification.abs(), 0.2, epsilon = 1e-12);
        assert_relative_eq!(img.geometric_image_size.um(), 200.0, epsilon = 1e-9);
        assert_relative_eq!(img.image_distance.mm(), 40.0, epsilon = 1e-9);
    }

    #[test]
    fn one_to_one_relay() {
        let t = train(vec![
            OpticalElement::space(75.0).unwrap(),
            OpticalElement::lens(75.0).unwrap(),
            OpticalElement::space(150.0).unwrap(),
            OpticalElement::lens(75.0).unwrap(),
        ]);
        let img = image_extended_source(&one_mm_source(), &t).unwrap();
        assert_relative_eq!(img.magnification.abs(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(img.geometric_image_size.mm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_train_images_source_onto_itself() {
        let t = train(vec![OpticalElement::space(0.0).unwrap()]);
        let img = image_extended_source(&one_mm_source(), &t).unwrap();
        assert_eq!(img.magnification, 1.0);
        assert_eq!(img.geometric_image_size.mm(), 1.0);
        assert_eq!(img.image_distance.m(), 0.0);
    }

    #[test]
    fn aberration_factor_inflates_image() {
        let t = ImagingTrain::new(
            vec![
                OpticalElement::space(200.0).unwrap(),
                OpticalElement::lens(200.0).unwrap(),
                OpticalElement::space(50.0).unwrap(),
                OpticalElement::lens(40.0).unwrap(),
            ],
            215.0 / 200.0,
        )
        .unwrap();
        let img = image_extended_source(&one_mm_source(), &t).unwrap();
        assert_relative_eq!(img.aberrated_image_size.um(), 215.0, epsilon = 1e-9);
    }

    #[test]
    fn collimated_output_has_no_conjugate() {
        // source at the front focal plane: afocal output
        let t = train(vec![
            OpticalElement::space(200.0).unwrap(),
            OpticalElement::lens(200.0).unwrap(),
        ]);
        assert!(image_extended_source(&one_mm_source(), &t).is_err());
    }

    #[test]
    fn lambertian_hemisphere_collects_everything() {
        let src = one_mm_source();
        let c = collection_fraction(&src, Collector::SolidAngleFraction(1.0)).unwrap();
        assert_relative_eq!(c.power_fraction, 1.0, epsilon = 1e-12);
        assert_relative_eq!(c.solid_angle_fraction, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_cone_power_fraction_equals_solid_angle_fraction() {
        let src = SourcePatch::new(
            mm(1.0),
            AngularModel::UniformCone {
                half_angle_rad: FRAC_PI_2,
            },
            Power::from_mw(40.0).unwrap(),
            1.0,
        )
        .unwrap();
        let c = collection_fraction(&src, Collector::SolidAngleFraction(0.001)).unwrap();
        assert_relative_eq!(c.solid_angle_fraction, 0.001, epsilon = 1e-12);
        assert_relative_eq!(c.power_fraction, 0.001, epsilon = 1e-12);
    }

    #[test]
    fn fitted_led_pattern_reproduces_collected_power() {
        // 80 mW total, half polarized: the NA-0.044 cone must collect 210 µW
        let src = SourcePatch::new(
            mm(1.0),
            AngularModel::Tabulated(led_angular_pattern()),
            Power::from_mw(80.0).unwrap(),
            0.5,
        )
        .unwrap();
        let c = collection_fraction(&src, Collector::NumericalAperture(0.044)).unwrap();
        assert_relative_eq!(c.power_fraction, 0.5 * 0.00525, max_relative = 0.01);
        assert_relative_eq!(c.collected.uw(), 210.0, max_relative = 0.01);
        // the collection cone is the documented ~0.1% of the hemisphere
        assert_relative_eq!(c.solid_angle_fraction, 0.001, max_relative = 0.05);
    }

    #[test]
    fn too_wide_collection_cone_rejected() {
        let src = one_mm_source();
        assert!(collection_fraction(&src, Collector::HalfAngleRad(2.0)).is_err());
        assert!(collection_fraction(&src, Collector::NumericalAperture(1.5)).is_err());
        assert!(collection_fraction(&src, Collector::SolidAngleFraction(0.0)).is_err());
    }

    fn reference_fiber() -> FiberSpec {
        FiberSpec::new(um(200.0), 0.22, Length::from_m(2.0).unwrap(), 0.75).unwrap()
    }

    #[test]
    fn fiber_coupling_examples() {
        let fiber = reference_fiber();
        let ok = fiber_coupling_feasible(um(200.0), 0.12, &fiber).unwrap();
        assert!(ok.feasible);
        assert!(ok.etendue_ratio <= 1.0);

        let too_big = fiber_coupling_feasible(um(300.0), 0.12, &fiber).unwrap();
        assert!(!too_big.feasible);

        let too_fast = fiber_coupling_feasible(um(150.0), 0.4, &fiber).unwrap();
        assert!(!too_fast.feasible);
    }

    #[test]
    fn budget_examples() {
        let out = transmission_budget(uw(210.0), &[0.75, 0.952]).unwrap();
        assert_relative_eq!(out.uw(), 149.94, max_relative = 1e-9);

        let identity = transmission_budget(uw(210.0), &[]).unwrap();
        assert_eq!(identity.uw(), 210.0);

        let reordered = transmission_budget(uw(210.0), &[0.952, 0.75]).unwrap();
        assert_relative_eq!(out.uw(), reordered.uw(), max_relative = 1e-12);

        assert!(transmission_budget(uw(210.0), &[1.2]).is_err());
        assert!(transmission_budget(uw(210.0), &[0.0]).is_err());
    }

    #[test]
    fn intensity_examples() {
        let i = intensity_at_spot(uw(150.0), um(250.0)).unwrap();
        assert_relative_eq!(i.mw_per_mm2(), 3.0558, max_relative = 1e-3);

        // second-harmonic path: 315.5 µW × 0.78 over the same spot
        let p423 = transmission_budget(uw(315.5), &[0.78]).unwrap();
        let i423 = intensity_at_spot(p423, um(250.0)).unwrap();
        assert_relative_eq!(i423.mw_per_mm2(), 5.0, max_relative = 0.01);

        // quadrupling the diameter divides the intensity by 16
        let small = intensity_at_spot(uw(150.0), um(250.0)).unwrap();
        let large = intensity_at_spot(uw(150.0), um(1000.0)).unwrap();
        assert_relative_eq!(small.w_per_m2() / large.w_per_m2(), 16.0, max_relative = 1e-12);

        // intensity × spot area returns the power
        let d = um(313.0);
        let i = intensity_at_spot(uw(42.0), d).unwrap();
        let area_m2 = PI * (0.5 * d.m()).powi(2);
        assert_relative_eq!(i.w_per_m2() * area_m2, 42.0e-6, max_relative = 1e-12);
    }

    #[test]
    fn oven_collimation_angle() {
        let angle = beam_collimation_half_angle(mm(1.0), mm(19.8)).unwrap();
        assert_relative_eq!(angle, 25.25e-3, max_relative = 2e-3);

        let far = beam_collimation_half_angle(mm(1.0), Length::from_m(1e9).unwrap()).unwrap();
        assert!(far < 1e-9);

        let doubled = beam_collimation_half_angle(mm(2.0), mm(39.6)).unwrap();
        assert_relative_eq!(angle, doubled, max_relative = 1e-12);
    }

    prop_compose! {
        fn arb_element()(kind in 0..4usize, v in 0.01f64..1.0, sign in proptest::bool::ANY) -> OpticalElement {
            match kind {
                0 => OpticalElement::lens(if sign { v * 1000.0 } else { -v * 1000.0 }).unwrap(),
                1 => OpticalElement::space(v * 500.0).unwrap(),
                2 => OpticalElement::new(ElementKind::Aperture { diameter_mm: v * 50.0 }, 1.0).unwrap(),
                _ => OpticalElement::new(ElementKind::FlatWindow { thickness_mm: v * 20.0 }, 1.0).unwrap(),
            }
        }
    }

    proptest! {
        #[test]
        fn composite_determinant_is_unity(elements in proptest::collection::vec(arb_element(), 1..12)) {
            let t = ImagingTrain::new(elements, 1.0).unwrap();
            prop_assert!((t.abcd().det() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn infinite_conjugate_relay_magnification(
            f1 in 20.0f64..400.0,
            f2 in 20.0f64..400.0,
            gap in 0.0f64..200.0,
        ) {
            let t = train(vec![
                OpticalElement::space(f1).unwrap(),
                OpticalElement::lens(f1).unwrap(),
                OpticalElement::space(gap).unwrap(),
                OpticalElement::lens(f2).unwrap(),
            ]);
            let img = image_extended_source(&one_mm_source(), &t).unwrap();
            prop_assert!((img.magnification - (-f2 / f1)).abs() < 1e-9 * (f2 / f1));

            // étendue (size × angle product) is conserved by an ideal train:
            // trace the axial marginal ray to the solved image plane
            let theta = 0.05;
            let full = OpticalElement::space(img.image_distance.mm())
                .unwrap()
                .matrix()
                .compose(&t.abcd());
            let (h, a) = full.trace(0.0, theta);
            prop_assert!(h.abs() < 1e-12);
            let source_etendue = one_mm_source().size.m() * theta;
            let image_etendue = img.geometric_image_size.m() * a.abs();
            prop_assert!((image_etendue - source_etendue).abs() < 1e-9 * source_etendue);
        }

        #[test]
        fn budget_never_exceeds_input(p in 0.0f64..1e3, chain in proptest::collection::vec(0.01f64..1.0, 0..8)) {
            let input = Power::from_uw(p).unwrap();
            let out = transmission_budget(input, &chain).unwrap();
            prop_assert!(out.w() <= input.w() * (1.0 + 1e-15));
        }

        #[test]
        fn etendue_ratio_above_one_implies_infeasible(
            size_um in 10.0f64..500.0,
            na in 0.01f64..0.9,
        ) {
            let fiber = reference_fiber();
            let c = fiber_coupling_feasible(um(size_um), na, &fiber).unwrap();
            if c.etendue_ratio > 1.0 {
                prop_assert!(!c.feasible);
            }
        }
    }

    #[test]
    fn angular_pattern_csv_rejects_bad_input() {
        assert!(AngularPattern::from_csv("angle_deg,relative_intensity\n").is_err());
        assert!(AngularPattern::from_csv("bad_header\n0,1\n10,0.5\n").is_err());
        assert!(
            AngularPattern::from_csv("angle_deg,relative_intensity\n0,1\n10,-0.5\n").is_err()
        );
        assert!(AngularPattern::from_csv("angle_deg,relative_intensity\n10,1\n5,0.5\n").is_err());
    }

    #[test]
    fn shipped_pattern_is_normalized_and_forward_peaked() {
        let p = led_angular_pattern();
        assert_eq!(p.samples[0].1, 1.0);
        assert!(p.samples.last().unwrap().1 < 0.01);
    }
}
