//! Unit-tagged config values. A bare number is read in the field's default
//! unit; a string `"<number> <unit>"` is converted at parse time.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::units::H_MEV_PER_GHZ;

pub trait Dimension {
    const KIND: &'static str;
    const DEFAULT_UNIT: &'static str;
    /// Size of `unit` in the dimension's base unit.
    fn factor(unit: &str) -> Option<f64>;
    fn units() -> &'static str;
}

/// A value stored in `D::DEFAULT_UNIT`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<D: Dimension> {
    pub value: f64,
    _dim: PhantomData<D>,
}

impl<D: Dimension> Quantity<D> {
    pub fn new(value: f64) -> Self {
        Quantity {
            value,
            _dim: PhantomData,
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, unit) = match s.find(char::is_whitespace) {
            Some(i) => (&s[..i], s[i..].trim()),
            None => (s, ""),
        };
        let v: f64 = num
            .parse()
            .map_err(|_| format!("cannot read {s:?} as \"<number> <unit>\""))?;
        if unit.is_empty() {
            return Ok(Self::new(v));
        }
        let f = D::factor(unit).ok_or_else(|| {
            format!(
                "unit mismatch: {unit:?} is not a {} unit (expected one of {})",
                D::KIND,
                D::units()
            )
        })?;
        let base = D::factor(D::DEFAULT_UNIT).expect("default unit is listed");
        Ok(Self::new(v * f / base))
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(deserializer: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);

        impl<D: Dimension> Visitor<'_> for V<D> {
            type Value = Quantity<D>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(
                    f,
                    "a number in {} or a string such as \"1.0 {}\"",
                    D::DEFAULT_UNIT,
                    D::DEFAULT_UNIT
                )
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(Quantity::new(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                Quantity::parse(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(V(PhantomData))
    }
}

fn energy_mev(unit: &str) -> Option<f64> {
    Some(match unit {
        "eV" => 1e3,
        "meV" => 1.0,
        "ueV" | "μeV" | "µeV" => 1e-3,
        "GHz" => H_MEV_PER_GHZ,
        "MHz" => H_MEV_PER_GHZ * 1e-3,
        "cm-1" | "cm^-1" => 0.123_984_198_4,
        _ => return None,
    })
}

const ENERGY_UNITS: &str = "eV, meV, ueV, GHz, MHz, cm-1";

macro_rules! energy_dim {
    ($name:ident, $unit:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;

        impl Dimension for $name {
            const KIND: &'static str = "energy";
            const DEFAULT_UNIT: &'static str = $unit;
            fn factor(unit: &str) -> Option<f64> {
                energy_mev(unit)
            }
            fn units() -> &'static str {
                ENERGY_UNITS
            }
        }
    };
}

energy_dim!(Ev, "eV");
energy_dim!(Mev, "meV");
energy_dim!(Ghz, "GHz");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gpa;

impl Dimension for Gpa {
    const KIND: &'static str = "stress";
    const DEFAULT_UNIT: &'static str = "GPa";
    fn factor(unit: &str) -> Option<f64> {
        Some(match unit {
            "GPa" => 1.0,
            "MPa" => 1e-3,
            "kbar" => 0.1,
            "bar" => 1e-4,
            "Pa" => 1e-9,
            _ => return None,
        })
    }
    fn units() -> &'static str {
        "GPa, MPa, kbar, bar, Pa"
    }
}

/// Rates, base unit MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mhz;

impl Dimension for Mhz {
    const KIND: &'static str = "rate";
    const DEFAULT_UNIT: &'static str = "MHz";
    fn factor(unit: &str) -> Option<f64> {
        Some(match unit {
            "GHz" | "1/ns" => 1e3,
            "MHz" | "1/us" => 1.0,
            "kHz" | "1/ms" => 1e-3,
            "Hz" | "1/s" => 1e-6,
            _ => return None,
        })
    }
    fn units() -> &'static str {
        "GHz, MHz, kHz, Hz, 1/ns, 1/us, 1/ms, 1/s"
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seconds;

impl Dimension for Seconds {
    const KIND: &'static str = "time";
    const DEFAULT_UNIT: &'static str = "s";
    fn factor(unit: &str) -> Option<f64> {
        Some(match unit {
            "s" => 1.0,
            "ms" => 1e-3,
            "us" | "μs" | "µs" => 1e-6,
            "ns" => 1e-9,
            "ps" => 1e-12,
            _ => return None,
        })
    }
    fn units() -> &'static str {
        "s, ms, us, ns, ps"
    }
}

/// SOC susceptibility, base unit GHz/GPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzPerGpa;

impl Dimension for GhzPerGpa {
    const KIND: &'static str = "energy per stress";
    const DEFAULT_UNIT: &'static str = "GHz/GPa";
    fn factor(unit: &str) -> Option<f64> {
        let (e, p) = unit.split_once('/')?;
        Some(energy_mev(e.trim())? / H_MEV_PER_GHZ / Gpa::factor(p.trim())?)
    }
    fn units() -> &'static str {
        "<energy>/<stress>, e.g. GHz/GPa or meV/GPa"
    }
}

pub type EnergyEv = Quantity<Ev>;
pub type EnergyMev = Quantity<Mev>;
pub type EnergyGhz = Quantity<Ghz>;
pub type Pressure = Quantity<Gpa>;
pub type Rate = Quantity<Mhz>;
pub type Time = Quantity<Seconds>;
pub type SocSlope = Quantity<GhzPerGpa>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(Pressure::parse("10").unwrap().value, 10.0);
        assert!((Pressure::parse("500 MPa").unwrap().value - 0.5).abs() < 1e-15);
        assert!((EnergyEv::parse("400 meV").unwrap().value - 0.4).abs() < 1e-15);
        assert!((Time::parse("10 ms").unwrap().value - 0.01).abs() < 1e-15);
        assert!((Rate::parse("100 kHz").unwrap().value - 0.1).abs() < 1e-15);
        let ghz = EnergyGhz::parse("1 meV").unwrap().value;
        assert!((ghz * H_MEV_PER_GHZ - 1.0).abs() < 1e-12);
        let s = SocSlope::parse("59 MHz/GPa").unwrap().value;
        assert!((s - 0.059).abs() < 1e-12);
    }

    #[test]
    fn mismatched_unit_is_rejected() {
        let e = Pressure::parse("3 ms").unwrap_err();
        assert!(e.contains("unit mismatch"), "{e}");
        assert!(Time::parse("3 GPa").is_err());
        assert!(Rate::parse("fast").is_err());
    }
}
