//! Portable graymap codec, `P2` (ASCII) and `P5` (binary), maxval 255 only.
//!
//! Headers are read liberally (any whitespace run, `#` comments anywhere a
//! separator may appear) and written canonically:
//! `P5\n<w> <h>\n255\n` followed by the payload.

use super::{GrayImage, RasterError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a PGM stream: expected magic P2 or P5")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u64),
    #[error("image dimensions {width}x{height} are not representable")]
    DimensionOverflow { width: u64, height: u64 },
    #[error("image dimensions must be nonzero, got {width}x{height}")]
    ZeroDimension { width: u64, height: u64 },
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid ASCII sample at pixel {index}")]
    InvalidSample { index: usize },
    #[error("sample {value} at pixel {index} exceeds maxval 255")]
    SampleOutOfRange { index: usize, value: u64 },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments. Returns whether anything was skipped.
    fn skip_separators(&mut self) -> bool {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
        self.pos > start
    }

    /// Reads a run of ASCII digits. `Ok(None)` if no digit is present,
    /// `Err(())` if the value does not fit in a u64.
    fn number(&mut self) -> Result<Option<u64>, ()> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(b) = self.peek().filter(u8::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(())?;
            self.pos += 1;
        }
        Ok((self.pos > start).then_some(value))
    }

    fn header_field(&mut self, what: &'static str) -> Result<u64, PgmError> {
        if !self.skip_separators() {
            return Err(PgmError::MalformedHeader(what));
        }
        match self.number() {
            Ok(Some(v)) => Ok(v),
            Ok(None) => Err(PgmError::MalformedHeader(what)),
            Err(()) => Err(PgmError::MalformedHeader("header value overflows")),
        }
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let encoding = match bytes.get(..2) {
        Some(b"P2") => Encoding::Ascii,
        Some(b"P5") => Encoding::Binary,
        _ => return Err(PgmError::BadMagic),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.header_field("missing or invalid width")?;
    let height = cur.header_field("missing or invalid height")?;
    let maxval = cur.header_field("missing or invalid maxval")?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension { width, height });
    }
    let overflow = PgmError::DimensionOverflow { width, height };
    let w = usize::try_from(width).map_err(|_| overflow.clone())?;
    let h = usize::try_from(height).map_err(|_| overflow.clone())?;
    let expected = w.checked_mul(h).ok_or(overflow)?;

    let data = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates the header from the payload.
            match cur.peek() {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                Some(_) => {
                    return Err(PgmError::MalformedHeader(
                        "missing separator before payload",
                    ))
                }
                None => return Err(PgmError::Truncated { expected, found: 0 }),
            }
            let payload = &bytes[cur.pos..];
            if payload.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: payload.len(),
                });
            }
            payload[..expected].to_vec()
        }
        Encoding::Ascii => {
            let mut data = Vec::with_capacity(expected.min(bytes.len()));
            for index in 0..expected {
                cur.skip_separators();
                match cur.number() {
                    Ok(Some(v)) if v <= 255 => data.push(v as u8),
                    Ok(Some(value)) => return Err(PgmError::SampleOutOfRange { index, value }),
                    Err(()) => {
                        return Err(PgmError::SampleOutOfRange {
                            index,
                            value: u64::MAX,
                        })
                    }
                    Ok(None) if cur.peek().is_none() => {
                        return Err(PgmError::Truncated {
                            expected,
                            found: index,
                        })
                    }
                    Ok(None) => return Err(PgmError::InvalidSample { index }),
                }
                // Samples must be separated.
                if index + 1 < expected && cur.peek().is_some_and(|b| b.is_ascii_digit()) {
                    return Err(PgmError::InvalidSample { index: index + 1 });
                }
            }
            data
        }
    };

    GrayImage::new(w, h, data).map_err(|e| match e {
        RasterError::DimensionOverflow { .. } => PgmError::DimensionOverflow { width, height },
        _ => PgmError::ZeroDimension { width, height },
    })
}

/// Encodes `img` as binary `P5` when `binary` is set, otherwise as `P2` with
/// one image row per line.
pub fn write_pgm(img: &GrayImage, binary: bool) -> Vec<u8> {
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    if binary {
        out.extend_from_slice(img.pixels());
    } else {
        out.reserve(img.len() * 4);
        for row in img.rows() {
            let mut first = true;
            for &v in row {
                if !first {
                    out.push(b' ');
                }
                first = false;
                out.extend_from_slice(v.to_string().as_bytes());
            }
            out.push(b'\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_binary() {
        let mut bytes = b"P5 2 1 255\n".to_vec();
        bytes.extend_from_slice(&[0, 255]);
        let img = read_pgm(&bytes).unwrap();
        assert_eq!(img.dimensions(), (2, 1));
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn decodes_ascii() {
        let img = read_pgm(b"P2 1 1 255 7").unwrap();
        assert_eq!(img.pixels(), &[7]);
    }

    #[test]
    fn skips_comments_and_odd_whitespace() {
        let bytes = b"P2\n# made by hand\n2\t2 # trailing\n\r\n255\n1 2\n# mid-payload\n3\n\n4\n";
        let img = read_pgm(bytes).unwrap();
        assert_eq!(img.pixels(), &[1, 2, 3, 4]);

        let mut bin = b"P5#c\n1 #x\n1\n255\n".to_vec();
        bin.push(b'#');
        assert_eq!(read_pgm(&bin).unwrap().pixels(), b"#");
    }

    #[test]
    fn binary_payload_may_start_with_whitespace_byte() {
        let mut bytes = b"P5\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(b"\n ");
        assert_eq!(read_pgm(&bytes).unwrap().pixels(), b"\n ");
    }

    #[test]
    fn distinct_errors() {
        let mut short = b"P5 2 1 255\n".to_vec();
        short.push(0);
        assert_eq!(
            read_pgm(&short),
            Err(PgmError::Truncated {
                expected: 2,
                found: 1
            })
        );
        assert_eq!(read_pgm(b"P6 1 1 255\n\0"), Err(PgmError::BadMagic));
        assert_eq!(read_pgm(b""), Err(PgmError::BadMagic));
        assert_eq!(
            read_pgm(b"P2 1 1 65535 7"),
            Err(PgmError::UnsupportedMaxval(65535))
        );
        assert_eq!(
            read_pgm(b"P2 1 1 15 7"),
            Err(PgmError::UnsupportedMaxval(15))
        );
        assert!(matches!(
            read_pgm(b"P5 18446744073709551615 18446744073709551615 255\n"),
            Err(PgmError::DimensionOverflow { .. })
        ));
        assert!(matches!(
            read_pgm(b"P5 99999999999999999999999 1 255\n"),
            Err(PgmError::MalformedHeader(_))
        ));
        assert!(matches!(
            read_pgm(b"P5 0 4 255\n"),
            Err(PgmError::ZeroDimension { .. })
        ));
        assert!(matches!(
            read_pgm(b"P2 x 1 255\n"),
            Err(PgmError::MalformedHeader(_))
        ));
        assert!(matches!(
            read_pgm(b"P2 2 1 255\n1"),
            Err(PgmError::Truncated { .. })
        ));
        assert_eq!(
            read_pgm(b"P2 2 1 255\n1 256"),
            Err(PgmError::SampleOutOfRange {
                index: 1,
                value: 256
            })
        );
        assert_eq!(
            read_pgm(b"P2 2 1 255\n1 x"),
            Err(PgmError::InvalidSample { index: 1 })
        );
    }

    #[test]
    fn canonical_encoding() {
        let one = GrayImage::new(1, 1, vec![0]).unwrap();
        assert_eq!(write_pgm(&one, true), b"P5\n1 1\n255\n\x00");

        let four = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(write_pgm(&four, false), b"P2\n2 2\n255\n1 2\n3 4\n");
    }

    fn gray_image() -> impl Strategy<Value = GrayImage> {
        (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h)
                .prop_map(move |data| GrayImage::new(w, h, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn round_trip(img in gray_image(), binary in any::<bool>()) {
            prop_assert_eq!(read_pgm(&write_pgm(&img, binary)).unwrap(), img);
        }

        #[test]
        fn never_panics_on_garbage(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let _ = read_pgm(&bytes);
            let mut prefixed = b"P5 3 2 255\n".to_vec();
            prefixed.extend_from_slice(&bytes);
            let _ = read_pgm(&prefixed);
        }
    }
}
