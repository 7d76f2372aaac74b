//! The mixed-radix representation core: echo samples, the root/affix
//! split and its inverse, and exact minimum-width computation.
//!
//! All feasibility arithmetic is exact big-integer work. Unit index 0 is
//! the least-significant radix digit and the first affix group; every
//! consumer (round coding, frame layout) uses this one order.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::model::Alphabet;

/// Arbitrary-precision unsigned integer used for all capacity decisions.
pub type WideUint = BigUint;

/// Smallest bit width `r` with `root_modulus^count <= 2^r`, by exact
/// comparison. A root modulus of 1 needs no representation at all.
pub fn min_bits_for(root_modulus: u32, count: u32) -> u32 {
    debug_assert!(root_modulus % 2 == 1, "root modulus must be odd");
    if root_modulus <= 1 || count == 0 {
        return 0;
    }
    let power = BigUint::from(root_modulus).pow(count);
    // x <= 2^r holds first at r = bits(x - 1)
    (power - 1u32).bits() as u32
}

/// One round's representation output: the merged root integer plus the
/// bypassed affix bits, unit 0 first, least-significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundCodeword {
    pub root: WideUint,
    pub affix: Bits,
    pub count: usize,
}

/// Merge `count` unit values into a root/affix codeword:
/// `root = sum((u_j div N_b) * N_r^j)`, affix groups are `u_j mod N_b`.
pub fn encode_round(values: &[u32], alphabet: &Alphabet) -> Result<RoundCodeword> {
    let modulus = alphabet.modulus();
    let bypass = alphabet.bypass_modulus();
    let width = alphabet.bypass_width() as usize;
    let root_modulus = BigUint::from(alphabet.root_modulus());

    let mut affix = Bits::zeros(values.len() * width);
    let mut root = BigUint::zero();
    for (j, &value) in values.iter().enumerate().rev() {
        if value >= modulus {
            return Err(Error::UnitValueOutOfRange { value, modulus });
        }
        root = root * &root_modulus + BigUint::from(value / bypass);
        affix.store_u64(j * width, width, (value % bypass) as u64);
    }
    Ok(RoundCodeword {
        root,
        affix,
        count: values.len(),
    })
}

/// Recover the unit values of a round: the j-th base-N_r digit of the
/// root recombined with the j-th affix group. Roots at or above
/// `N_r^count` are not native samples and are rejected.
pub fn decode_round(codeword: &RoundCodeword, alphabet: &Alphabet) -> Result<Vec<u32>> {
    let bypass = alphabet.bypass_modulus();
    let width = alphabet.bypass_width() as usize;
    let root_modulus = BigUint::from(alphabet.root_modulus());
    let count = codeword.count;

    if codeword.affix.len() != count * width {
        return Err(Error::AffixLengthMismatch {
            expected: count * width,
            actual: codeword.affix.len(),
        });
    }
    if codeword.root >= root_modulus.pow(count as u32) {
        return Err(Error::RootNotNative);
    }

    let mut values = Vec::with_capacity(count);
    let mut rest = codeword.root.clone();
    for j in 0..count {
        let digit = if alphabet.root_modulus() > 1 {
            let (quotient, remainder) = rest.div_rem(&root_modulus);
            rest = quotient;
            remainder.iter_u32_digits().next().unwrap_or(0)
        } else {
            0
        };
        let group = codeword.affix.load_u64(j * width, width) as u32;
        values.push(digit * bypass + group);
    }
    Ok(values)
}

/// The native echo sample of a round: `sum(u_j * N^j)`, always below
/// `N^count`.
pub fn echo_sample(values: &[u32], alphabet: &Alphabet) -> Result<WideUint> {
    let modulus = alphabet.modulus();
    let weight = BigUint::from(modulus);
    let mut echo = BigUint::zero();
    for &value in values.iter().rev() {
        if value >= modulus {
            return Err(Error::UnitValueOutOfRange { value, modulus });
        }
        echo = echo * &weight + BigUint::from(value);
    }
    Ok(echo)
}
