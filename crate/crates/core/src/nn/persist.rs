//! Weight file layout (all integers and reals little-endian):
//!
//! ```text
//! b"CMPNET1"                 magic, 7 bytes
//! u32 K, u32 p, u32 L        geometry
//! f64 * num_params           tensors in `Params::tensors` order
//! u64                        FNV-1a hash of every preceding byte
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Geometry, Params, Scalar};

pub const MAGIC: &[u8; 7] = b"CMPNET1";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("not a weight file: bad magic {found:?}")]
    BadMagic { found: Vec<u8> },
    #[error("dimension mismatch in field {field}: file has {found}, expected {expected}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid geometry in file: {0}")]
    Geometry(#[from] super::GeometryError),
    #[error("weight file truncated while reading {what}")]
    Truncated { what: String },
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error(transparent)]
    Io(io::Error),
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn encode_params<T: Scalar>(params: &Params<T>) -> Vec<u8> {
    let geo = params.geometry();
    let mut buf = Vec::with_capacity(7 + 12 + 8 * params.num_params() + 8);
    buf.extend_from_slice(MAGIC);
    for d in [geo.k, geo.p, geo.l] {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for (_, t) in params.tensors() {
        for &x in t {
            buf.extend_from_slice(&x.to_f64_exact().to_le_bytes());
        }
    }
    let sum = fnv1a(&buf);
    buf.extend_from_slice(&sum.to_le_bytes());
    buf
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(
        &mut self,
        len: usize,
        what: impl FnOnce() -> String,
    ) -> Result<&'a [u8], PersistError> {
        if self.bytes.len() - self.pos < len {
            return Err(PersistError::Truncated { what: what() });
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }
}

/// Decodes a weight file; with `expected` set, the stored geometry must match.
pub fn decode_params<T: Scalar>(
    bytes: &[u8],
    expected: Option<Geometry>,
) -> Result<Params<T>, PersistError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur
        .take(MAGIC.len(), || "magic".into())
        .map_err(|_| PersistError::BadMagic {
            found: bytes.to_vec(),
        })?;
    if magic != MAGIC {
        return Err(PersistError::BadMagic {
            found: magic.to_vec(),
        });
    }
    let mut dims = [0usize; 3];
    for (d, name) in dims.iter_mut().zip(["K", "p", "L"]) {
        let raw = cur.take(4, || format!("geometry field {name}"))?;
        *d = u32::from_le_bytes(raw.try_into().unwrap()) as usize;
    }
    let [k, p, l] = dims;
    if let Some(exp) = expected {
        for (field, e, f) in [("K", exp.k, k), ("p", exp.p, p), ("L", exp.l, l)] {
            if e != f {
                return Err(PersistError::DimensionMismatch {
                    field,
                    expected: e,
                    found: f,
                });
            }
        }
    }
    let geo = Geometry::new(k, p, l)?;
    let mut params = Params::<T>::zeros(geo);
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    for (tensor, name) in params.tensors_mut().into_iter().zip(names) {
        let raw = cur.take(8 * tensor.len(), || format!("tensor {name}"))?;
        for (x, chunk) in tensor.iter_mut().zip(raw.chunks_exact(8)) {
            *x = T::from_f64_exact(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
    }
    let body_end = cur.pos;
    let stored = u64::from_le_bytes(cur.take(8, || "checksum".into())?.try_into().unwrap());
    let computed = fnv1a(&bytes[..body_end]);
    if stored != computed {
        return Err(PersistError::Checksum { stored, computed });
    }
    Ok(params)
}

pub fn save_params<T: Scalar>(params: &Params<T>, mut w: impl Write) -> Result<(), PersistError> {
    w.write_all(&encode_params(params))
        .map_err(PersistError::Io)?;
    w.flush().map_err(PersistError::Io)
}

pub fn load_params<T: Scalar>(
    mut r: impl Read,
    expected: Option<Geometry>,
) -> Result<Params<T>, PersistError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(PersistError::Io)?;
    decode_params(&bytes, expected)
}

pub fn save_params_file<T: Scalar>(
    params: &Params<T>,
    path: impl AsRef<Path>,
) -> Result<(), PersistError> {
    fs::write(path, encode_params(params)).map_err(PersistError::Io)
}

pub fn load_params_file<T: Scalar>(
    path: impl AsRef<Path>,
    expected: Option<Geometry>,
) -> Result<Params<T>, PersistError> {
    decode_params(&fs::read(path).map_err(PersistError::Io)?, expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(p: &Params<f64>) -> Vec<u64> {
        p.flatten().into_iter().map(f64::to_bits).collect()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let p = Params::<f64>::init(Geometry::new(3, 4, 4).unwrap(), 2);
        let back: Params<f64> = decode_params(&encode_params(&p), None).unwrap();
        assert_eq!(back.geometry(), p.geometry());
        assert_eq!(bits(&back), bits(&p));
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = encode_params(&Params::<f64>::init(Geometry::new(1, 2, 2).unwrap(), 0));
        bytes[0] = b'X';
        assert!(matches!(
            decode_params::<f64>(&bytes, None),
            Err(PersistError::BadMagic { .. })
        ));
        assert!(matches!(
            decode_params::<f64>(b"CM", None),
            Err(PersistError::BadMagic { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_names_field() {
        let bytes = encode_params(&Params::<f64>::init(Geometry::new(3, 4, 4).unwrap(), 0));
        let err = decode_params::<f64>(&bytes, Some(Geometry::new(2, 4, 4).unwrap())).unwrap_err();
        assert!(err.to_string().contains("field K"), "{err}");
        match err {
            PersistError::DimensionMismatch {
                field,
                expected,
                found,
            } => {
                assert_eq!((field, expected, found), ("K", 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncation_and_corruption() {
        let bytes = encode_params(&Params::<f64>::init(Geometry::new(1, 2, 2).unwrap(), 0));
        let err = decode_params::<f64>(&bytes[..bytes.len() - 20], None).unwrap_err();
        assert!(matches!(err, PersistError::Truncated { .. }), "{err}");
        let err = decode_params::<f64>(&bytes[..10], None).unwrap_err();
        assert!(matches!(err, PersistError::Truncated { .. }));

        let mut flipped = bytes.clone();
        flipped[30] ^= 1;
        assert!(matches!(
            decode_params::<f64>(&flipped, None),
            Err(PersistError::Checksum { .. })
        ));
    }

    #[test]
    fn f32_params_round_trip_through_f64_file() {
        let p = Params::<f32>::init(Geometry::new(2, 3, 3).unwrap(), 8);
        let back: Params<f32> = decode_params(&encode_params(&p), None).unwrap();
        assert_eq!(back, p);
    }
}
