use crate::error::{Error, Result};

const MULTIPLIER: u64 = 6_364_136_223_846_793_005;

/// Minimal PCG32 (XSH-RR 64/32).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    pub fn from_parts(state: u64, inc: u64) -> Result<Self> {
        if inc & 1 == 0 {
            return Err(Error::InvalidState(format!("pcg32 increment {inc:#x} is even")));
        }
        Ok(Self { state, inc })
    }

    /// The reference `pcg32_srandom_r` seeding protocol.
    pub fn srandom(initstate: u64, initseq: u64) -> Self {
        let mut g = Self { state: 0, inc: (initseq << 1) | 1 };
        g.next_u32();
        g.state = g.state.wrapping_add(initstate);
        g.next_u32();
        g
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn inc(&self) -> u64 {
        self.inc
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old.wrapping_mul(MULTIPLIER).wrapping_add(self.inc);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_unit_increment() {
        let mut g = Pcg32::from_parts(0, 1).unwrap();
        assert_eq!(g.next_u32(), 0);
        assert_eq!(g.state(), 1);
    }

    #[test]
    fn reference_demo_first_output() {
        let mut g = Pcg32::srandom(42, 54);
        assert_eq!(g.next_u32(), 0xa15c02b7);
    }

    #[test]
    fn even_increment_rejected() {
        assert!(Pcg32::from_parts(3, 2).is_err());
    }

    #[test]
    fn lcg_does_not_return_quickly() {
        let start = Pcg32::from_parts(12345, 1).unwrap();
        let mut g = start;
        for _ in 0..1_000_000 {
            g.next_u32();
            assert_ne!(g.state(), start.state());
            assert_eq!(g.inc() & 1, 1);
        }
    }
}
