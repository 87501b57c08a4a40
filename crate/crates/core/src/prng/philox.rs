use crate::error::{Error, Result};

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

pub const ROUNDS: usize = 10;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

#[inline]
fn round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(M0, ctr[0]);
    let (hi1, lo1) = mulhilo(M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// The Philox4x32 keyed bijection with the given number of rounds.
pub fn philox4x32_rounds(ctr: [u32; 4], mut key: [u32; 2], rounds: usize) -> [u32; 4] {
    let mut x = ctr;
    for r in 0..rounds {
        if r > 0 {
            key[0] = key[0].wrapping_add(W0);
            key[1] = key[1].wrapping_add(W1);
        }
        x = round(x, key);
    }
    x
}

#[inline]
pub fn philox4x32_10(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    philox4x32_rounds(ctr, key, ROUNDS)
}

/// Counter-mode stream over Philox4x32-10: each counter value yields a
/// block of four words, handed out in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Philox4x32 {
    key: [u32; 2],
    counter: [u32; 4],
    buffer: [u32; 4],
    buffer_index: usize,
}

impl Philox4x32 {
    pub fn new(key: [u32; 2], counter: [u32; 4]) -> Self {
        Self { key, counter, buffer: [0; 4], buffer_index: 4 }
    }

    pub fn from_parts(key: [u32; 2], counter: [u32; 4], buffer: [u32; 4], buffer_index: usize) -> Result<Self> {
        if buffer_index > 4 {
            return Err(Error::InvalidState(format!("philox buffer index {buffer_index} > 4")));
        }
        Ok(Self { key, counter, buffer, buffer_index })
    }

    pub fn key(&self) -> [u32; 2] {
        self.key
    }

    /// Counter of the next block to be generated.
    pub fn counter(&self) -> [u32; 4] {
        self.counter
    }

    pub fn buffer(&self) -> [u32; 4] {
        self.buffer
    }

    pub fn buffer_index(&self) -> usize {
        self.buffer_index
    }

    /// Little-end word first, carrying into the next word.
    pub fn bump_counter(counter: &mut [u32; 4]) {
        for w in counter.iter_mut() {
            *w = w.wrapping_add(1);
            if *w != 0 {
                break;
            }
        }
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.buffer_index == 4 {
            self.buffer = philox4x32_10(self.counter, self.key);
            Self::bump_counter(&mut self.counter);
            self.buffer_index = 0;
        }
        let v = self.buffer[self.buffer_index];
        self.buffer_index += 1;
        v
    }
}
