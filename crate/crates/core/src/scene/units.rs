//! Length, color and identifier newtypes shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const EMU_PER_INCH: i64 = 914_400;
pub const EMU_PER_CM: i64 = 360_000;
pub const EMU_PER_POINT: i64 = 12_700;

/// A length in English Metric Units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Emu(pub i64);

/// Result of converting a decimal quantity to EMU.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Converted {
    pub emu: Emu,
    /// False when the input was not an exact multiple of one EMU and had to be rounded.
    pub exact: bool,
}

fn convert(value: f64, per_unit: i64) -> Converted {
    let scaled = value * per_unit as f64;
    // half-up rounding, also for negative coordinates
    let rounded = (scaled + 0.5).floor();
    let exact = (scaled - scaled.round()).abs() < 1e-6;
    Converted {
        emu: Emu(rounded as i64),
        exact,
    }
}

impl Emu {
    pub const ZERO: Emu = Emu(0);

    pub fn from_inches(inches: f64) -> Converted {
        convert(inches, EMU_PER_INCH)
    }

    pub fn from_cm(cm: f64) -> Converted {
        convert(cm, EMU_PER_CM)
    }

    pub fn from_points(points: f64) -> Converted {
        convert(points, EMU_PER_POINT)
    }

    pub fn inches(inches: f64) -> Emu {
        Self::from_inches(inches).emu
    }

    pub fn points(points: f64) -> Emu {
        Self::from_points(points).emu
    }

    pub fn to_inches(self) -> f64 {
        self.0 as f64 / EMU_PER_INCH as f64
    }

    pub fn to_points(self) -> f64 {
        self.0 as f64 / EMU_PER_POINT as f64
    }
}

impl std::ops::Add for Emu {
    type Output = Emu;
    fn add(self, rhs: Emu) -> Emu {
        Emu(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Emu {
    type Output = Emu;
    fn sub(self, rhs: Emu) -> Emu {
        Emu(self.0 - rhs.0)
    }
}

impl fmt::Display for Emu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of fractional digits in the shortest decimal rendering of `value`.
pub(crate) fn fractional_digits(value: f64) -> usize {
    let text = format!("{value}");
    match text.split_once('.') {
        Some((_, frac)) => frac.trim_end_matches(|c: char| !c.is_ascii_digit()).len(),
        None => 0,
    }
}

/// Font size in hundredths of a point, the unit stored in OpenXML run properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FontSize(pub u32);

impl FontSize {
    pub fn from_points(points: f64) -> Option<FontSize> {
        if !(points.is_finite() && points > 0.0) {
            return None;
        }
        let cpt = (points * 100.0 + 0.5).floor();
        if cpt < 1.0 || cpt > u32::MAX as f64 {
            return None;
        }
        Some(FontSize(cpt as u32))
    }

    pub fn points(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

/// Fill opacity in per-cent-thousandths (100000 = opaque).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alpha(pub u32);

impl Alpha {
    pub const OPAQUE: Alpha = Alpha(100_000);

    pub fn from_fraction(fraction: f64) -> Option<Alpha> {
        if !(0.0..=1.0).contains(&fraction) {
            return None;
        }
        Some(Alpha((fraction * 100_000.0 + 0.5).floor() as u32))
    }

    pub fn fraction(self) -> f64 {
        self.0 as f64 / 100_000.0
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::OPAQUE
    }
}

/// An sRGB color, written as six uppercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Color(pub [u8; 3]);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid color '{0}': expected 6 hex digits such as 'F5F5F5'")]
pub struct ColorError(pub String);

impl Color {
    pub const BLACK: Color = Color([0, 0, 0]);
    pub const WHITE: Color = Color([0xFF, 0xFF, 0xFF]);

    pub fn hex(&self) -> String {
        format!("{:02X}{:02X}{:02X}", self.0[0], self.0[1], self.0[2])
    }

    /// Relative luminance on linearized sRGB channels, in [0, 1].
    pub fn luminance(&self) -> f64 {
        fn lin(c: u8) -> f64 {
            let c = c as f64 / 255.0;
            if c <= 0.04045 {
                c / 12.92
            } else {
                ((c + 0.055) / 1.055).powf(2.4)
            }
        }
        0.2126 * lin(self.0[0]) + 0.7152 * lin(self.0[1]) + 0.0722 * lin(self.0[2])
    }
}

impl FromStr for Color {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('#');
        if t.len() != 6 || !t.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(ColorError(s.to_string()));
        }
        let byte = |i: usize| u8::from_str_radix(&t[i..i + 2], 16).map_err(|_| ColorError(s.to_string()));
        Ok(Color([byte(0)?, byte(2)?, byte(4)?]))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Stable element identifier, persisted verbatim as the shape name in the archive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Option<ElementId> {
        let id = id.into();
        if id.trim().is_empty() {
            None
        } else {
            Some(ElementId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    /// Panics on an empty id; use [`ElementId::new`] for untrusted input.
    fn from(s: &str) -> Self {
        ElementId::new(s).expect("element id must be non-empty")
    }
}
