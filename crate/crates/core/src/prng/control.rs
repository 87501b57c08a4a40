use crate::error::{Error, Result};

/// Deliberately weak generators used as negative controls for the battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlGenerator {
    /// `x <- 65539 x mod 2^31`.
    Randu(u64),
    /// Unscrambled 64-bit xorshift with shifts (13, 7, 17).
    RawXorshift64(u64),
}

impl ControlGenerator {
    pub fn randu(x: u64) -> Result<Self> {
        if x == 0 || x >= 1 << 31 {
            return Err(Error::InvalidState(format!("randu state {x} outside (0, 2^31)")));
        }
        Ok(Self::Randu(x))
    }

    pub fn xorshift64(x: u64) -> Result<Self> {
        if x == 0 {
            return Err(Error::InvalidState("xorshift64 state is zero".into()));
        }
        Ok(Self::RawXorshift64(x))
    }

    pub fn state(&self) -> u64 {
        match *self {
            Self::Randu(x) | Self::RawXorshift64(x) => x,
        }
    }

    /// Low 32 bits of the advanced state.
    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        match self {
            Self::Randu(x) => {
                *x = x.wrapping_mul(65_539) & 0x7fff_ffff;
                *x as u32
            }
            Self::RawXorshift64(x) => {
                *x ^= *x << 13;
                *x ^= *x >> 7;
                *x ^= *x << 17;
                *x as u32
            }
        }
    }
}
