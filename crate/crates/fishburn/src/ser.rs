//! serde glue: big integers render as decimal strings so JSON consumers
//! never lose precision to floating point.

use num_bigint::BigInt;
use serde::Serializer;

pub(crate) fn bigint_string<S: Serializer>(x: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&x.to_string())
}
