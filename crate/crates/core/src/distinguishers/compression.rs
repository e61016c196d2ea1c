//! A deterministic LZ78 compressor used only for its output length.
//!
//! Scheme:
//!
//! 1. The dictionary starts with a single entry, index 0, the empty phrase.
//! 2. Scan the input left to right. At each position take the longest
//!    dictionary phrase `w` that prefixes the remaining input. If the
//!    input continues with a byte `c` after `w`, emit the token
//!    `(index(w), c)` and add `w·c` to the dictionary with the next index.
//!    If the input ends right after `w` (so `w` is nonempty), emit the
//!    final token `(index(w))` with no byte.
//! 3. Token `i` (0-based) is written with `ceil(log2(i + 1))` bits for the
//!    index (the dictionary then holds `i + 1` entries, so token 0 needs
//!    zero index bits) plus 8 bits for the byte when present.
//! 4. The compressed length is the total bit count rounded up to whole
//!    bytes.
//!
//! The dictionary is unbounded. Everything is integer arithmetic on the
//! payload bytes, so the result is identical on every platform.

use std::collections::HashMap;

fn index_bits(token: usize) -> u64 {
    // ceil(log2(token + 1))
    let entries = token as u64 + 1;
    if entries <= 1 {
        0
    } else {
        64 - (entries - 1).leading_zeros() as u64
    }
}

/// Compressed size in bytes.
pub fn lz78_compressed_len(input: &[u8]) -> usize {
    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut next_index: u32 = 1;
    let mut bits: u64 = 0;
    let mut tokens = 0usize;
    let mut current: u32 = 0;
    for &byte in input {
        match dict.get(&(current, byte)) {
            Some(&idx) => current = idx,
            None => {
                bits += index_bits(tokens) + 8;
                tokens += 1;
                dict.insert((current, byte), next_index);
                next_index += 1;
                current = 0;
            }
        }
    }
    if current != 0 {
        bits += index_bits(tokens);
    }
    bits.div_ceil(8) as usize
}

/// `clamp(compressed_len / max(1, raw_len), 0, 1)`.
pub fn compression_ratio(payload: &[u8]) -> f64 {
    let raw = payload.len().max(1);
    (lz78_compressed_len(payload) as f64 / raw as f64).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_bit_widths() {
        assert_eq!(index_bits(0), 0);
        assert_eq!(index_bits(1), 1);
        assert_eq!(index_bits(2), 2);
        assert_eq!(index_bits(3), 2);
        assert_eq!(index_bits(4), 3);
    }

    #[test]
    fn hand_traced_small_input() {
        // "aab": (0,'a') 0+8 bits, then "a" is known, "ab" new → (1,'b') 1+8
        // bits. 17 bits → 3 bytes.
        assert_eq!(lz78_compressed_len(b"aab"), 3);
        // "aa": (0,'a') then trailing phrase "a" → index only, 1 bit. 9 bits.
        assert_eq!(lz78_compressed_len(b"aa"), 2);
    }

    #[test]
    fn repetitive_payload_compresses_well() {
        // phrases of length 1, 2, …, 44 cover 990 bytes; 10 bytes remain
        let ratio = compression_ratio(&[b'x'; 1000]);
        assert!(ratio < 0.5, "{ratio}");
        // index bits 0+1+2·2+4·3+8·4+16·5+12·6 = 201, bytes 44·8, tail 6 → 559 bits
        assert_eq!(lz78_compressed_len(&[b'x'; 1000]), 70);
    }

    #[test]
    fn empty_payload_is_zero() {
        assert_eq!(compression_ratio(&[]), 0.0);
    }

    #[test]
    fn incompressible_payload_is_clamped() {
        let r = compression_ratio(b"abcdefgh");
        assert!(r <= 1.0);
        assert_eq!(r, 1.0);
    }
}
