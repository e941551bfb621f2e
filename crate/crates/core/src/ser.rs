//! Complex numbers serialize as `[re, im]` pairs.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub(crate) fn complex<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&c.re)?;
    seq.serialize_element(&c.im)?;
    seq.end()
}
