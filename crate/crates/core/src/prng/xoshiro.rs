use crate::error::{Error, Result};

/// State shared by xoshiro256++ and xoshiro256**.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Xoshiro256 {
    s: [u64; 4],
}

impl Xoshiro256 {
    pub fn from_words(s: [u64; 4]) -> Result<Self> {
        if s.iter().all(|&w| w == 0) {
            return Err(Error::InvalidState("xoshiro256 state is all zero".into()));
        }
        Ok(Self { s })
    }

    pub fn words(&self) -> [u64; 4] {
        self.s
    }

    #[inline]
    fn advance(&mut self) {
        let s = &mut self.s;
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
    }

    /// xoshiro256++ output.
    #[inline]
    pub fn next_plusplus(&mut self) -> u64 {
        let result = self.s[0].wrapping_add(self.s[3]).rotate_left(23).wrapping_add(self.s[0]);
        self.advance();
        result
    }

    /// xoshiro256** output.
    #[inline]
    pub fn next_starstar(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        self.advance();
        result
    }
}

/// The 1024-bit `**` member of the family: sixteen words of state with a
/// rotating index, distributed by its designers as xoroshiro1024**.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Xoshiro1024 {
    s: [u64; 16],
    p: usize,
}

impl Xoshiro1024 {
    pub fn from_words(s: [u64; 16], p: usize) -> Result<Self> {
        if s.iter().all(|&w| w == 0) {
            return Err(Error::InvalidState("xoshiro1024 state is all zero".into()));
        }
        if p >= 16 {
            return Err(Error::InvalidState(format!("xoshiro1024 index {p} out of range")));
        }
        Ok(Self { s, p })
    }

    pub fn words(&self) -> [u64; 16] {
        self.s
    }

    pub fn index(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn next_starstar(&mut self) -> u64 {
        let q = self.p;
        self.p = (self.p + 1) & 15;
        let s0 = self.s[self.p];
        let mut s15 = self.s[q];
        let result = s0.wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        s15 ^= s0;
        self.s[q] = s0.rotate_left(25) ^ s15 ^ (s15 << 27);
        self.s[self.p] = s15.rotate_left(36);
        result
    }
}
