//! Exact rational angles in units of pi.
//!
//! Every combinatorial quantity in this crate (dihedral angles, exterior
//! angles of gates, combinatorial areas, edge lengths on cusp tori) is a
//! rational multiple of pi, so we store the rational coefficient and never
//! touch floating point outside `cusp_geom`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Exact rational scalar. Interpreted in units of pi wherever it denotes an
/// angle, an area, or a length on a cusp torus.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from(BigInt::from(num))
}

/// Whether the angle flavor of an [`Angle`] is the interior or the exterior
/// angle of a gate. The two are paired: interior + exterior = pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleFlavor {
    Interior,
    Exterior,
}

/// An angle strictly between 0 and pi, stored as an exact rational in units
/// of pi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Angle {
    value: Rat,
    flavor: AngleFlavor,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("angle {0} (in units of pi) is not strictly between 0 and pi")]
pub struct AngleOutOfRange(pub String);

impl Angle {
    pub fn new(value: Rat, flavor: AngleFlavor) -> Result<Self, AngleOutOfRange> {
        if value <= Rat::zero() || value >= Rat::one() {
            return Err(AngleOutOfRange(value.to_string()));
        }
        Ok(Angle { value, flavor })
    }

    pub fn interior(value: Rat) -> Result<Self, AngleOutOfRange> {
        Angle::new(value, AngleFlavor::Interior)
    }

    pub fn exterior(value: Rat) -> Result<Self, AngleOutOfRange> {
        Angle::new(value, AngleFlavor::Exterior)
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn flavor(&self) -> AngleFlavor {
        self.flavor
    }

    /// The paired angle of the opposite flavor; the two sum to pi.
    pub fn paired(&self) -> Angle {
        Angle {
            value: Rat::one() - &self.value,
            flavor: match self.flavor {
                AngleFlavor::Interior => AngleFlavor::Exterior,
                AngleFlavor::Exterior => AngleFlavor::Interior,
            },
        }
    }
}

/// Exact combinatorial area in units of pi. Closed under addition and
/// comparison with no rounding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize)]
pub struct AreaValue(#[serde(serialize_with = "serialize_rat")] pub Rat);

impl AreaValue {
    pub fn zero() -> Self {
        AreaValue(Rat::zero())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl std::ops::Add for AreaValue {
    type Output = AreaValue;
    fn add(self, rhs: AreaValue) -> AreaValue {
        AreaValue(self.0 + rhs.0)
    }
}

impl fmt::Display for AreaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*pi", self.0)
    }
}

/// Serializes a [`Rat`] as `{ "num": "...", "den": "..." }` with decimal
/// string components, so arbitrary-precision values survive JSON.
pub fn serialize_rat<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Rat", 2)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    st.end()
}

pub fn deserialize_rat<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
    #[derive(Deserialize)]
    struct Raw {
        num: String,
        den: String,
    }
    let raw = Raw::deserialize(d)?;
    let num: BigInt = raw
        .num
        .parse()
        .map_err(|_| serde::de::Error::custom("bad numerator"))?;
    let den: BigInt = raw
        .den
        .parse()
        .map_err(|_| serde::de::Error::custom("bad denominator"))?;
    if den.is_zero() {
        return Err(serde::de::Error::custom("zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Wrapper giving [`Rat`] a stable serde representation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RatJson(
    #[serde(serialize_with = "serialize_rat", deserialize_with = "deserialize_rat")] pub Rat,
);

impl From<&Rat> for RatJson {
    fn from(r: &Rat) -> Self {
        RatJson(r.clone())
    }
}

/// Parses "p/q" or "p" into an exact rational.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Rat::new(num, den))
    } else {
        let num: BigInt = text.parse().ok()?;
        Some(Rat::from(num))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_range_enforced() {
        assert!(Angle::exterior(rat(1, 2)).is_ok());
        assert!(Angle::exterior(rat(0, 1)).is_err());
        assert!(Angle::exterior(rat(1, 1)).is_err());
        assert!(Angle::exterior(rat(-1, 3)).is_err());
    }

    #[test]
    fn paired_angles_sum_to_pi() {
        let a = Angle::exterior(rat(3, 5)).unwrap();
        let b = a.paired();
        assert_eq!(a.value() + b.value(), Rat::one());
        assert_eq!(b.flavor(), AngleFlavor::Interior);
    }

    #[test]
    fn rat_json_round_trip() {
        let r = RatJson(rat(22, 7));
        let s = serde_json::to_string(&r).unwrap();
        let back: RatJson = serde_json::from_str(&s).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("1/3"), Some(rat(1, 3)));
        assert_eq!(parse_rat("-7/4"), Some(rat(-7, 4)));
        assert_eq!(parse_rat("5"), Some(rat_int(5)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
    }
}
