//! Fixed-length bit vectors with the payload wire convention: bit `i`
//! lives in byte `i / 8` at bit position `i % 8` (least-significant first),
//! and the hex form is `ceil(len / 8)` lowercase byte pairs with zero
//! padding in the unused high bits of the final byte.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    bytes: Vec<u8>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            bytes: vec![0u8; len.div_ceil(8)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of {}", self.len);
        self.bytes[index / 8] >> (index % 8) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of {}", self.len);
        let mask = 1u8 << (index % 8);
        if value {
            self.bytes[index / 8] |= mask;
        } else {
            self.bytes[index / 8] &= !mask;
        }
    }

    pub fn is_all_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Store the low `width` bits of `value` at `at`, least-significant first.
    pub fn store_u64(&mut self, at: usize, width: usize, value: u64) {
        assert!(width <= 64 && (width == 64 || value >> width == 0));
        for i in 0..width {
            self.set(at + i, value >> i & 1 == 1);
        }
    }

    pub fn load_u64(&self, at: usize, width: usize) -> u64 {
        assert!(width <= 64);
        let mut value = 0u64;
        for i in 0..width {
            if self.get(at + i) {
                value |= 1 << i;
            }
        }
        value
    }

    /// Store `value` into `width` bits at `at`, least-significant first.
    /// The value must fit: callers hold the native-range invariant.
    pub fn store_uint(&mut self, at: usize, width: usize, value: &BigUint) {
        assert!(value.bits() as usize <= width, "value wider than field");
        let mut offset = 0usize;
        for digit in value.iter_u64_digits() {
            let chunk = 64.min(width - offset);
            self.store_u64(at + offset, chunk, digit & mask64(chunk));
            offset += chunk;
            if offset >= width {
                break;
            }
        }
        for i in offset..width {
            self.set(at + i, false);
        }
    }

    pub fn load_uint(&self, at: usize, width: usize) -> BigUint {
        let mut digits = Vec::with_capacity(width.div_ceil(64));
        let mut offset = 0usize;
        while offset < width {
            let chunk = 64.min(width - offset);
            digits.push(self.load_u64(at + offset, chunk));
            offset += chunk;
        }
        BigUint::new(
            digits
                .iter()
                .flat_map(|d| [*d as u32, (*d >> 32) as u32])
                .collect(),
        )
    }

    pub fn copy_from(&mut self, at: usize, source: &Bits) {
        for i in 0..source.len {
            self.set(at + i, source.get(i));
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> Bits {
        let mut out = Bits::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn to_hex(&self) -> String {
        let mut text = String::with_capacity(self.bytes.len() * 2);
        for byte in &self.bytes {
            text.push_str(&format!("{byte:02x}"));
        }
        text
    }

    /// Parse a hex payload of exactly `len` bits. The padding bits in the
    /// final byte must be zero.
    pub fn from_hex(text: &str, len: usize) -> Result<Bits> {
        let text = text.trim();
        let expected_bytes = len.div_ceil(8);
        if text.len() != expected_bytes * 2 {
            return Err(Error::BadHex {
                reason: format!(
                    "expected {} hex characters for {} bits, got {}",
                    expected_bytes * 2,
                    len,
                    text.len()
                ),
            });
        }
        let mut bytes = Vec::with_capacity(expected_bytes);
        for i in 0..expected_bytes {
            let pair = &text[2 * i..2 * i + 2];
            let byte = u8::from_str_radix(pair, 16).map_err(|_| Error::BadHex {
                reason: format!("invalid hex pair {pair:?} at byte {i}"),
            })?;
            bytes.push(byte);
        }
        let bits = Bits { len, bytes };
        for i in len..expected_bytes * 8 {
            if bits.bytes[i / 8] >> (i % 8) & 1 == 1 {
                return Err(Error::BadHex {
                    reason: format!("padding bit {i} is set"),
                });
            }
        }
        Ok(bits)
    }
}

fn mask64(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({} bits, 0x{})", self.len, self.to_hex())
    }
}
