// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Counter-based random numbers.
//!
//! Every realization is addressed by `(key, index)`: the Philox4x32-10 block
//! cipher turns the counter `(index, block)` into four 32-bit words, so a
//! realization's draws do not depend on which worker produces it or in what
//! order. Independent substreams (one per tomography setting, Mermin term,
//! repeat, ...) get their own key derived from the parent key and a tag.

use num_complex::Complex64;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline]
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

fn split_u64(x: u64) -> [u32; 2] {
    [x as u32, (x >> 32) as u32]
}

/// A keyed family of reproducible realization streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleStream {
    key: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { key: seed }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream labelled by `tag`.
    pub fn substream(&self, tag: u64) -> SampleStream {
        let t = split_u64(tag);
        let out = philox4x32_10([t[0], t[1], 0x5EED_5EED, 0xC0FF_EE00], split_u64(self.key));
        SampleStream {
            key: out[0] as u64 | ((out[1] as u64) << 32),
        }
    }

    /// Draw sequence for realization `index`.
    pub fn realization_rng(&self, index: u64) -> RealizationRng {
        RealizationRng {
            key: split_u64(self.key),
            index: split_u64(index),
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }
}

/// Sequential draws within one realization.
#[derive(Debug, Clone)]
pub struct RealizationRng {
    key: [u32; 2],
    index: [u32; 2],
    block: u32,
    buf: [u32; 4],
    pos: usize,
}

impl RealizationRng {
    #[inline]
    fn refill(&mut self) {
        self.buf = philox4x32_10([self.index[0], self.index[1], self.block, 0], self.key);
        self.block = self.block.wrapping_add(1);
        self.pos = 0;
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let lo = self.next_u32() as u64;
        let hi = self.next_u32() as u64;
        lo | (hi << 32)
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Two independent standard normals (Marsaglia polar method).
    #[inline]
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    /// Circular complex Gaussian with `E[a] = 0`, `E[|a|²] = 1/2`.
    #[inline]
    pub fn vacuum_amplitude(&mut self) -> Complex64 {
        let (x, y) = self.standard_normal_pair();
        Complex64::new(0.5 * x, 0.5 * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0, 0, 0, 0], [0, 0]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn realizations_are_addressable() {
        let s = SampleStream::new(42);
        let mut a = s.realization_rng(17);
        let first: Vec<u64> = (0..10).map(|_| a.next_u64()).collect();
        let mut b = s.realization_rng(17);
        let again: Vec<u64> = (0..10).map(|_| b.next_u64()).collect();
        assert_eq!(first, again);
        let mut c = s.realization_rng(18);
        assert_ne!(first[0], c.next_u64());
    }

    #[test]
    fn substreams_differ() {
        let s = SampleStream::new(7);
        assert_ne!(s.substream(0), s.substream(1));
        assert_ne!(s.substream(0), s);
        assert_eq!(s.substream(5), SampleStream::new(7).substream(5));
    }

    #[test]
    fn uniform_in_open_interval() {
        let mut r = SampleStream::new(3).realization_rng(0);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
