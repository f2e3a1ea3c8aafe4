use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::{Error, Result};

/// BitFlip noise: before each gate, every operand qubit independently
/// receives an X with probability `p_bitflip`. Inserted X gates are noiseless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p_bitflip: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::noiseless()
    }
}

impl NoiseModel {
    pub fn new(p_bitflip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_bitflip) {
            return Err(Error::InvalidProbability(p_bitflip));
        }
        Ok(NoiseModel { p_bitflip })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p_bitflip: 0.0 }
    }

    pub fn p_bitflip(&self) -> f64 {
        self.p_bitflip
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_bitflip == 0.0
    }

    /// Sorted indices of flipped operand slots among `slots` Bernoulli trials.
    ///
    /// Gaps between flips are drawn geometrically, which has the same law as
    /// one draw per slot but costs one draw per flip.
    pub fn sample_flips<R: Rng + ?Sized>(&self, slots: usize, rng: &mut R) -> Vec<usize> {
        if self.p_bitflip == 0.0 {
            return Vec::new();
        }
        if self.p_bitflip == 1.0 {
            return (0..slots).collect();
        }
        let geo = Geometric::new(self.p_bitflip).expect("probability checked in constructor");
        let mut flips = Vec::new();
        let mut pos: u64 = 0;
        loop {
            pos = pos.saturating_add(geo.sample(rng));
            if pos >= slots as u64 {
                return flips;
            }
            flips.push(pos as usize);
            pos += 1;
        }
    }
}
