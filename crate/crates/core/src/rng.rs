//! Deterministic random streams.
//!
//! A single master seed fans out into independent ChaCha streams keyed by
//! what the randomness is for. Keys use grid *values*, not positions, so a
//! sub-grid reproduces the matching cells of a full sweep and evaluation order
//! never matters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Shots(crate::circuit::Variant),
    ChiCalibration,
    BayesianSplit,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Shots(crate::circuit::Variant::I) => 1,
            Purpose::Shots(crate::circuit::Variant::X) => 2,
            Purpose::ChiCalibration => 3,
            Purpose::BayesianSplit => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    /// χ in units of π, quantised to 1e-9.
    pub chi_key: u64,
    /// p quantised to 1e-9; zero where a stream does not depend on p.
    pub p_key: u64,
    pub purpose: Purpose,
}

fn quantise(x: f64) -> u64 {
    libm::round(x * 1e9) as u64
}

impl StreamKey {
    pub fn new(chi: f64, p: Option<f64>, purpose: Purpose) -> Self {
        Self {
            chi_key: quantise(chi / core::f64::consts::PI),
            p_key: p.map_or(0, |p| quantise(p) + 1),
            purpose,
        }
    }

    fn stream_id(&self) -> u64 {
        let mut h = splitmix(self.purpose.tag());
        h = splitmix(h ^ self.chi_key);
        splitmix(h ^ self.p_key)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_rng(master_seed: u64, key: StreamKey) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(key.stream_id());
    rng
}
