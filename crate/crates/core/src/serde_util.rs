use num_bigint::BigInt;
use serde::Serializer;

pub fn bigint_str<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ratio_str<S: Serializer>(v: &num_rational::Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}


pub fn opt_u32_str<S: Serializer>(v: &Option<u32>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_str("inf"),
    }
}
