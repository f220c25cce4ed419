//! Geometry and physical data model: LIS units in the `z = 0` plane, users in
//! front of them, an optional reflecting hall, and seeded scenario sampling.
//!
//! All lengths are meters and all powers are linear.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Euclidean distance between two points.
pub fn user_separation(a: Point3, b: Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// A square receiving surface of side `side`, centered at `center` in the
/// `z = 0` plane with edges parallel to the axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LisUnit {
    pub center: Point3,
    pub side: f64,
}

impl LisUnit {
    pub fn new(cx: f64, cy: f64, side: f64) -> Result<Self> {
        let unit = Self {
            center: Point3::new(cx, cy, 0.0),
            side,
        };
        unit.validate()?;
        Ok(unit)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::domain(format!("unit side must be positive, got {}", self.side)));
        }
        if !self.center.is_finite() || self.center.z != 0.0 {
            return Err(Error::domain("unit center must be finite with z = 0"));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// Interiors intersect. Abutting edges are allowed, with slack for
    /// rounding in computed centers.
    fn overlaps(&self, other: &LisUnit) -> bool {
        let reach = 0.5 * (self.side + other.side) * (1.0 - 1e-9);
        (self.center.x - other.center.x).abs() < reach && (self.center.y - other.center.y).abs() < reach
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub position: Point3,
    /// Transmit power, linear.
    pub power: f64,
}

impl User {
    pub fn new(position: Point3, power: f64) -> Result<Self> {
        let user = Self { position, power };
        user.validate()?;
        Ok(user)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || self.position.z <= 0.0 {
            return Err(Error::domain(format!(
                "user must sit strictly in front of the surface (z > 0), got {:?}",
                self.position
            )));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::domain(format!("user power must be positive, got {}", self.power)));
        }
        Ok(())
    }
}

/// The five reflecting planes of a hall. The sixth wall (`z = 0`) carries the
/// units and does not reflect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HallPlane {
    XMin,
    XMax,
    YMin,
    YMax,
    ZBack,
}

impl HallPlane {
    pub const ALL: [HallPlane; 5] = [
        HallPlane::XMin,
        HallPlane::XMax,
        HallPlane::YMin,
        HallPlane::YMax,
        HallPlane::ZBack,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hall {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_back: f64,
    /// Power loss per reflection in dB (zero or negative).
    pub attenuation_db: f64,
}

impl Hall {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max, self.z_back, self.attenuation_db]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) || !(self.z_back > 0.0) {
            return Err(Error::domain(format!("degenerate hall {self:?}")));
        }
        if self.attenuation_db > 0.0 {
            return Err(Error::domain("hall attenuation must be <= 0 dB"));
        }
        Ok(())
    }

    /// Field-amplitude multiplier for one bounce. The attenuation is a power
    /// ratio, hence the factor 20.
    pub fn amplitude_gain(&self) -> f64 {
        10f64.powf(self.attenuation_db / 20.0)
    }

    pub fn contains_strictly(&self, p: Point3) -> bool {
        self.x_min < p.x && p.x < self.x_max && self.y_min < p.y && p.y < self.y_max && 0.0 < p.z && p.z < self.z_back
    }

    /// Mirror `p` across one of the hall planes.
    pub fn reflect(&self, p: Point3, plane: HallPlane) -> Point3 {
        match plane {
            HallPlane::XMin => Point3::new(2.0 * self.x_min - p.x, p.y, p.z),
            HallPlane::XMax => Point3::new(2.0 * self.x_max - p.x, p.y, p.z),
            HallPlane::YMin => Point3::new(p.x, 2.0 * self.y_min - p.y, p.z),
            HallPlane::YMax => Point3::new(p.x, 2.0 * self.y_max - p.y, p.z),
            HallPlane::ZBack => Point3::new(p.x, p.y, 2.0 * self.z_back - p.z),
        }
    }
}

/// A mirrored copy of a user that models one wall bounce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSource {
    pub position: Point3,
    pub amplitude_gain: f64,
}

/// Single-bounce images of `user`, one per reflecting plane, in the order
/// x_min, x_max, y_min, y_max, z_back.
pub fn image_sources(user: &User, hall: &Hall) -> Result<Vec<ImageSource>> {
    hall.validate()?;
    if !hall.contains_strictly(user.position) {
        return Err(Error::domain(format!(
            "user at {:?} is not strictly inside the hall",
            user.position
        )));
    }
    let gain = hall.amplitude_gain();
    Ok(HallPlane::ALL
        .iter()
        .map(|&plane| ImageSource {
            position: hall.reflect(user.position, plane),
            amplitude_gain: gain,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub wavelength: f64,
    /// Noise power density, linear.
    pub noise_density: f64,
    pub units: Vec<LisUnit>,
    pub users: Vec<User>,
    pub hall: Option<Hall>,
}

impl Scenario {
    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.power).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::domain("wavelength must be positive"));
        }
        if !(self.noise_density > 0.0 && self.noise_density.is_finite()) {
            return Err(Error::domain("noise density must be positive"));
        }
        if self.users.is_empty() || self.units.is_empty() {
            return Err(Error::domain("scenario needs at least one unit and one user"));
        }
        if self.users.len() > self.units.len() {
            return Err(Error::domain(format!(
                "more users ({}) than units ({})",
                self.users.len(),
                self.units.len()
            )));
        }
        for unit in &self.units {
            unit.validate()?;
        }
        for user in &self.users {
            user.validate()?;
        }
        for (i, a) in self.units.iter().enumerate() {
            for b in &self.units[i + 1..] {
                if a.overlaps(b) {
                    return Err(Error::domain(format!("units at {:?} and {:?} overlap", a.center, b.center)));
                }
            }
        }
        if let Some(hall) = &self.hall {
            hall.validate()?;
            if let Some(u) = self.users.iter().find(|u| !hall.contains_strictly(u.position)) {
                return Err(Error::domain(format!("user at {:?} is outside the hall", u.position)));
            }
        }
        Ok(())
    }
}

/// Region users are drawn from: `x_min <= x <= x_max`, `y_min <= y <= y_max`,
/// `0 < z <= z_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_max: f64,
}

impl UserBox {
    pub const fn symmetric(half_width: f64, depth: f64) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            z_max: depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max, self.z_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) || !(self.z_max > 0.0) {
            return Err(Error::domain(format!("degenerate user box {self:?}")));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.x_min <= p.x && p.x <= self.x_max && self.y_min <= p.y && p.y <= self.y_max && 0.0 < p.z && p.z <= self.z_max
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point3 {
        let x = rng.gen_range(self.x_min..=self.x_max);
        let y = rng.gen_range(self.y_min..=self.y_max);
        // u in [0, 1) maps to z in (0, z_max]
        let z = self.z_max * (1.0 - rng.gen::<f64>());
        Point3::new(x, y, z)
    }

    /// The hall whose walls coincide with the box faces.
    pub fn as_hall(&self, attenuation_db: f64) -> Hall {
        Hall {
            x_min: self.x_min,
            x_max: self.x_max,
            y_min: self.y_min,
            y_max: self.y_max,
            z_back: self.z_max,
            attenuation_db,
        }
    }
}

impl Default for UserBox {
    fn default() -> Self {
        UserBox::symmetric(2.0, 4.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub num_units: usize,
    pub num_users: usize,
    pub side: f64,
    pub wavelength: f64,
    pub noise_density: f64,
    /// Transmit power of every user, linear.
    pub power: f64,
    pub user_box: UserBox,
    pub hall: Option<Hall>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            num_units: 7,
            num_users: 2,
            side: 0.5,
            wavelength: 0.125,
            noise_density: 1.0,
            power: 100.0,
            user_box: UserBox::default(),
            hall: None,
        }
    }
}

/// Centers of `count` abutting units of side `side` along the x axis,
/// symmetric about the origin.
pub fn unit_row(count: usize, side: f64) -> Result<Vec<LisUnit>> {
    let mid = (count as f64 - 1.0) / 2.0;
    (0..count).map(|m| LisUnit::new((m as f64 - mid) * side, 0.0, side)).collect()
}

/// Deterministic per-stream RNG. Distinct `(seed, stream)` pairs give
/// independent sequences.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw a scenario: the unit row is fixed by the config, user positions are
/// i.i.d. uniform over the user box.
pub fn sample_scenario(seed: u64, config: &SamplingConfig) -> Result<Scenario> {
    sample_scenario_with(&mut seeded_rng(seed, 0), config)
}

pub fn sample_scenario_with<R: Rng + ?Sized>(rng: &mut R, config: &SamplingConfig) -> Result<Scenario> {
    if config.num_users == 0 || config.num_units == 0 {
        return Err(Error::domain("need at least one unit and one user"));
    }
    if config.num_users > config.num_units {
        return Err(Error::domain(format!(
            "K = {} users exceeds M = {} units",
            config.num_users, config.num_units
        )));
    }
    config.user_box.validate()?;
    let units = unit_row(config.num_units, config.side)?;
    let users = (0..config.num_users)
        .map(|_| User::new(config.user_box.sample(rng), config.power))
        .collect::<Result<Vec<_>>>()?;
    let scenario = Scenario {
        wavelength: config.wavelength,
        noise_density: config.noise_density,
        units,
        users,
        hall: config.hall,
    };
    scenario.validate()?;
    Ok(scenario)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separation_examples() {
        assert_eq!(user_separation(Point3::new(0., 0., 1.), Point3::new(0., 0., 1.)), 0.0);
        assert_eq!(user_separation(Point3::new(0., 0., 1.), Point3::new(0., 0., 2.)), 1.0);
        assert_eq!(user_separation(Point3::new(1., 2., 2.), Point3::new(4., 6., 2.)), 5.0);
    }

    fn hall() -> Hall {
        Hall {
            x_min: -2.0,
            x_max: 2.0,
            y_min: -2.0,
            y_max: 2.0,
            z_back: 4.0,
            attenuation_db: -3.0,
        }
    }

    #[test]
    fn images_mirror_each_plane() {
        let user = User::new(Point3::new(1.0, 0.0, 2.0), 1.0).unwrap();
        let images = image_sources(&user, &hall()).unwrap();
        assert_eq!(images.len(), 5);
        assert_eq!(images[0].position, Point3::new(-5.0, 0.0, 2.0));
        assert_eq!(images[1].position, Point3::new(3.0, 0.0, 2.0));
        assert_eq!(images[2].position, Point3::new(1.0, -4.0, 2.0));
        assert_eq!(images[3].position, Point3::new(1.0, 4.0, 2.0));
        assert_eq!(images[4].position, Point3::new(1.0, 0.0, 6.0));
        for im in &images {
            assert!((im.amplitude_gain - 0.707_945_784_384_137_9).abs() < 1e-15);
        }
    }

    #[test]
    fn user_outside_hall_is_rejected() {
        let user = User::new(Point3::new(2.5, 0.0, 2.0), 1.0).unwrap();
        assert!(matches!(image_sources(&user, &hall()), Err(Error::Domain(_))));
        let on_wall = User::new(Point3::new(2.0, 0.0, 2.0), 1.0).unwrap();
        assert!(image_sources(&on_wall, &hall()).is_err());
    }

    #[test]
    fn unit_rows_are_centered() {
        let xs: Vec<f64> = unit_row(5, 0.5).unwrap().iter().map(|u| u.center.x).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let xs: Vec<f64> = unit_row(2, 0.5).unwrap().iter().map(|u| u.center.x).collect();
        assert_eq!(xs, vec![-0.25, 0.25]);
    }

    #[test]
    fn sampling_respects_box_and_seed() {
        let cfg = SamplingConfig::default();
        let a = sample_scenario(9, &cfg).unwrap();
        let b = sample_scenario(9, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_units(), 7);
        assert_eq!(a.num_users(), 2);
        for u in &a.users {
            assert!(cfg.user_box.contains(u.position));
        }
        assert_ne!(a, sample_scenario(10, &cfg).unwrap());
    }

    #[test]
    fn sampling_rejects_bad_configs() {
        let cfg = SamplingConfig {
            num_users: 8,
            ..SamplingConfig::default()
        };
        assert!(sample_scenario(1, &cfg).is_err());
        let cfg = SamplingConfig {
            user_box: UserBox::symmetric(0.0, 4.0),
            ..SamplingConfig::default()
        };
        assert!(sample_scenario(1, &cfg).is_err());
    }

    #[test]
    fn overlapping_units_fail_validation() {
        let mut s = sample_scenario(1, &SamplingConfig::default()).unwrap();
        s.units[1].center.x = s.units[0].center.x + 0.25;
        assert!(s.validate().is_err());
    }

    proptest! {
        #[test]
        fn double_reflection_is_identity(x in -1.99f64..1.99, y in -1.99f64..1.99, z in 0.01f64..3.99) {
            let h = hall();
            let p = Point3::new(x, y, z);
            for plane in HallPlane::ALL {
                let back = h.reflect(h.reflect(p, plane), plane);
                prop_assert!(user_separation(back, p) <= 1e-14);
            }
        }

        #[test]
        fn sampled_users_stay_in_box(seed in any::<u64>()) {
            let cfg = SamplingConfig::default();
            let s = sample_scenario(seed, &cfg).unwrap();
            for u in &s.users {
                prop_assert!(cfg.user_box.contains(u.position));
            }
            for unit in &s.units {
                prop_assert_eq!(unit.center.y, 0.0);
                prop_assert_eq!(unit.center.z, 0.0);
            }
        }
    }
}
