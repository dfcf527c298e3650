//! Sobol sequence with Joe-Kuo direction numbers and a digital shift.
//!
//! Points are generated in Gray-code order with 32-bit direction numbers,
//! so a replicate may draw up to 2³² points. Each coordinate is lifted to
//! 64 bits before XOR-ing with the replicate's shift, so shifted points do
//! not sit on the dyadic grid of the unshifted sequence.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::QmcError;

/// Number of dimensions covered by the embedded direction-number table.
pub const MAX_DIMENSION: usize = 21;

const BITS: usize = 32;

/// Largest usable point index (exclusive).
pub const MAX_POINTS: u64 = 1 << BITS;

// (degree s, coefficient a, initial m_1..m_s) for dimensions 2..=21,
// from new-joe-kuo-6.21201.
const DIRECTION_TABLE: [(u32, u32, &[u32]); MAX_DIMENSION - 1] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
];

fn directions(dimension: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dimension == 0 {
        for (j, v) in v.iter_mut().enumerate() {
            *v = 1 << (BITS - 1 - j);
        }
        return v;
    }
    let (s, a, m) = DIRECTION_TABLE[dimension - 1];
    let s = s as usize;
    for j in 0..s {
        v[j] = m[j] << (BITS - 1 - j);
    }
    for j in s..BITS {
        v[j] = v[j - s] ^ (v[j - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                v[j] ^= v[j - k];
            }
        }
    }
    v
}

/// Per-replicate XOR mask, one 64-bit word per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalShift(Vec<u64>);

impl DigitalShift {
    pub fn zero(dimension: usize) -> Self {
        Self(vec![0; dimension])
    }

    pub fn new(words: Vec<u64>) -> Self {
        Self(words)
    }

    /// Shift for `replicate`, drawn from ChaCha8 stream `replicate` under
    /// `seed`.
    pub fn for_replicate(seed: u64, replicate: u64, dimension: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replicate);
        Self((0..dimension).map(|_| rng.next_u64()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn words(&self) -> &[u64] {
        &self.0
    }
}

#[inline]
fn to_unit(raw: u32, shift: u64) -> f64 {
    let bits = ((raw as u64) << 32) ^ shift;
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sobol point set in `dimension` coordinates.
#[derive(Debug, Clone)]
pub struct Sobol {
    directions: Vec<[u32; BITS]>,
}

impl Sobol {
    pub fn new(dimension: usize) -> Result<Self, QmcError> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(QmcError::Dimension(dimension));
        }
        Ok(Self {
            directions: (0..dimension).map(directions).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Unshifted integer coordinates of point `index` (Gray-code order).
    pub fn raw(&self, index: u64, out: &mut [u32]) {
        assert!(index < MAX_POINTS, "Sobol index {index} exceeds 2^32");
        let gray = index ^ (index >> 1);
        for (o, v) in out.iter_mut().zip(&self.directions) {
            let mut x = 0;
            let mut g = gray;
            let mut bit = 0;
            while g != 0 {
                if g & 1 == 1 {
                    x ^= v[bit];
                }
                g >>= 1;
                bit += 1;
            }
            *o = x;
        }
    }

    /// Point `index` with the shift applied; coordinates in `[0, 1)`.
    pub fn point(&self, index: u64, shift: &DigitalShift) -> Vec<f64> {
        let mut raw = vec![0u32; self.dimension()];
        self.raw(index, &mut raw);
        raw.iter()
            .zip(shift.words())
            .map(|(&r, &s)| to_unit(r, s))
            .collect()
    }

    /// Visits points `0..count` in order, reusing one buffer.
    pub fn for_each_point<E>(
        &self,
        count: u64,
        shift: &DigitalShift,
        mut visit: impl FnMut(&[f64]) -> Result<(), E>,
    ) -> Result<(), E> {
        assert!(count <= MAX_POINTS, "at most 2^32 Sobol points");
        let dim = self.dimension();
        let words = shift.words();
        let mut raw = [0u32; MAX_DIMENSION];
        let mut unit = [0f64; MAX_DIMENSION];
        for n in 0..count {
            if n > 0 {
                let bit = n.trailing_zeros() as usize;
                for (r, v) in raw[..dim].iter_mut().zip(&self.directions) {
                    *r ^= v[bit];
                }
            }
            for j in 0..dim {
                unit[j] = to_unit(raw[j], words[j]);
            }
            visit(&unit[..dim])?;
        }
        Ok(())
    }
}

/// Point `index` of the `dimension`-dimensional sequence under `shift`.
pub fn ld_point(index: u64, dimension: usize, shift: &DigitalShift) -> Result<Vec<f64>, QmcError> {
    if shift.dimension() != dimension {
        return Err(QmcError::ShiftDimension {
            expected: dimension,
            got: shift.dimension(),
        });
    }
    Ok(Sobol::new(dimension)?.point(index, shift))
}
