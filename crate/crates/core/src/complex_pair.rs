//! Serde helpers storing complex numbers as `[re, im]` pairs.
//!
//! JSON has no NaN or infinity, so non-finite parts are written as `null`
//! and read back as NaN.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [finite_or_none(z.re), finite_or_none(z.im)].serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let [re, im] = <[Option<f64>; 2]>::deserialize(d)?;
    Ok(Complex64::new(re.unwrap_or(f64::NAN), im.unwrap_or(f64::NAN)))
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [finite_or_none(z.re), finite_or_none(z.im)]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[Option<f64>; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re.unwrap_or(f64::NAN), im.unwrap_or(f64::NAN)))
            .collect())
    }
}

/// A real value that may be non-finite.
pub mod lossy_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        finite_or_none(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
