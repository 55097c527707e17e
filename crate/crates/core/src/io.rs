//! On-disk formats.
//!
//! Binary `.ten`: magic `TEN1`, order as `u32` LE, each dim as `u32` LE, then
//! the entries as `f64` LE in storage (column-major) order.
//!
//! Sample streams: magic `TENS`, count as `u32` LE, then `count` complete
//! `.ten` records.
//!
//! Text: `{"dims":[…],"data":[…]}` with shortest round-trip decimals, so a
//! text/binary round trip is lossless.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

pub const TENSOR_MAGIC: &[u8; 4] = b"TEN1";
pub const STREAM_MAGIC: &[u8; 4] = b"TENS";

pub fn write_ten<W: Write>(w: &mut W, t: &DenseTensor<f64>) -> Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    write_u32(w, t.order(), "order")?;
    for &d in t.dims() {
        write_u32(w, d, "dimension")?;
    }
    let mut buf = Vec::with_capacity(8 * t.len());
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn write_u32<W: Write>(w: &mut W, v: usize, what: &str) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} exceeds u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_magic<R: Read>(r: &mut R, want: &[u8; 4]) -> Result<()> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != want {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(want)
        )));
    }
    Ok(())
}

pub fn read_ten<R: Read>(r: &mut R) -> Result<DenseTensor<f64>> {
    read_magic(r, TENSOR_MAGIC)?;
    read_ten_body(r)
}

fn read_ten_body<R: Read>(r: &mut R) -> Result<DenseTensor<f64>> {
    let order = read_u32(r)? as usize;
    let dims = (0..order).map(|_| read_u32(r).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let shape = Shape::new(dims)?;
    let mut bytes = vec![0u8; 8 * shape.size()];
    r.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseTensor::new(shape, data)
}

/// Writes a `TENS` stream whose length is fixed up front.
pub struct StreamWriter<W: Write> {
    inner: W,
    remaining: usize,
}

impl<W: Write> StreamWriter<W> {
    pub fn new(mut inner: W, count: usize) -> Result<Self> {
        inner.write_all(STREAM_MAGIC)?;
        write_u32(&mut inner, count, "count")?;
        Ok(StreamWriter { inner, remaining: count })
    }

    pub fn push(&mut self, t: &DenseTensor<f64>) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::Format("stream already holds its declared count".into()));
        }
        self.remaining -= 1;
        write_ten(&mut self.inner, t)
    }

    pub fn finish(mut self) -> Result<W> {
        if self.remaining != 0 {
            return Err(Error::Format(format!("{} tensors missing from stream", self.remaining)));
        }
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub fn write_stream<W: Write>(w: W, tensors: &[DenseTensor<f64>]) -> Result<W> {
    let mut sw = StreamWriter::new(w, tensors.len())?;
    for t in tensors {
        sw.push(t)?;
    }
    sw.finish()
}

pub fn read_stream<R: Read>(r: &mut R) -> Result<Vec<DenseTensor<f64>>> {
    read_magic(r, STREAM_MAGIC)?;
    let count = read_u32(r)? as usize;
    (0..count).map(|_| read_ten(r)).collect()
}

/// Text form of a tensor.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TensorText {
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl From<&DenseTensor<f64>> for TensorText {
    fn from(t: &DenseTensor<f64>) -> Self {
        TensorText { dims: t.dims().to_vec(), data: t.data().to_vec() }
    }
}

impl TryFrom<TensorText> for DenseTensor<f64> {
    type Error = Error;

    fn try_from(t: TensorText) -> Result<Self> {
        DenseTensor::from_dims(t.dims, t.data)
    }
}

pub fn to_text(t: &DenseTensor<f64>) -> String {
    serde_json::to_string(&TensorText::from(t)).expect("finite tensor serializes")
}

pub fn from_text(s: &str) -> Result<DenseTensor<f64>> {
    let t: TensorText = serde_json::from_str(s)?;
    t.try_into()
}

/// Decode one tensor from bytes, binary or text.
pub fn decode_tensor(bytes: &[u8]) -> Result<DenseTensor<f64>> {
    if bytes.starts_with(TENSOR_MAGIC) {
        read_ten(&mut &bytes[..])
    } else {
        let s = std::str::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
        from_text(s)
    }
}

/// Decode a sample stream, binary or a text JSON array of tensors.
pub fn decode_stream(bytes: &[u8]) -> Result<Vec<DenseTensor<f64>>> {
    if bytes.starts_with(STREAM_MAGIC) {
        read_stream(&mut &bytes[..])
    } else {
        let items: Vec<TensorText> = serde_json::from_slice(bytes)?;
        items.into_iter().map(DenseTensor::try_from).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseTensor<f64> {
        DenseTensor::from_dims(vec![2, 3, 2], (0..12).map(|v| v as f64 * 0.1 - 0.35).collect()).unwrap()
    }

    #[test]
    fn binary_layout_is_bit_exact() {
        let t = DenseTensor::from_dims(vec![2, 1], vec![1.0, -2.5]).unwrap();
        let mut buf = Vec::new();
        write_ten(&mut buf, &t).unwrap();
        let mut want = b"TEN1".to_vec();
        want.extend_from_slice(&2u32.to_le_bytes());
        want.extend_from_slice(&2u32.to_le_bytes());
        want.extend_from_slice(&1u32.to_le_bytes());
        want.extend_from_slice(&1.0f64.to_le_bytes());
        want.extend_from_slice(&(-2.5f64).to_le_bytes());
        assert_eq!(buf, want);
    }

    #[test]
    fn binary_round_trip() {
        let t = sample();
        let mut buf = Vec::new();
        write_ten(&mut buf, &t).unwrap();
        assert_eq!(read_ten(&mut &buf[..]).unwrap(), t);
        assert_eq!(decode_tensor(&buf).unwrap(), t);
    }

    #[test]
    fn scalar_round_trip() {
        let s = DenseTensor::scalar(std::f64::consts::PI);
        let mut buf = Vec::new();
        write_ten(&mut buf, &s).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8);
        assert_eq!(read_ten(&mut &buf[..]).unwrap(), s);
        assert_eq!(from_text(&to_text(&s)).unwrap(), s);
    }

    #[test]
    fn text_form() {
        let t = DenseTensor::from_dims(vec![2], vec![0.1, 1e-300]).unwrap();
        let s = to_text(&t);
        assert_eq!(s, r#"{"dims":[2],"data":[0.1,1e-300]}"#);
        assert_eq!(from_text(&s).unwrap(), t);
        assert!(from_text(r#"{"dims":[2,2],"data":[1,2,3]}"#).is_err());
    }

    #[test]
    fn stream_round_trip() {
        let ts = vec![sample(), sample().scale(2.0)];
        let buf = write_stream(Vec::new(), &ts).unwrap();
        assert_eq!(&buf[..4], b"TENS");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 2);
        assert_eq!(decode_stream(&buf).unwrap(), ts);
    }

    #[test]
    fn stream_writer_enforces_count() {
        let mut sw = StreamWriter::new(Vec::new(), 1).unwrap();
        sw.push(&sample()).unwrap();
        assert!(sw.push(&sample()).is_err());
        let sw = StreamWriter::new(Vec::new(), 2).unwrap();
        assert!(sw.finish().is_err());
    }

    #[test]
    fn bad_magic_and_truncation() {
        assert!(read_ten(&mut &b"NOPE\0\0\0\0"[..]).is_err());
        let mut buf = Vec::new();
        write_ten(&mut buf, &sample()).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_ten(&mut &buf[..]).is_err());
    }
}
