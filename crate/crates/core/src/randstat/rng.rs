//! Seeded random families.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sequence::{words_for, BinarySequence, Family};

/// Streams at or above this index belong to auxiliary samplers, never to
/// families.
pub(crate) const AUX_STREAM: u64 = 1 << 63;

/// The generator for stream `stream` of `seed`. Streams are independent
/// ChaCha keystreams, so any stream can be produced without the others.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Family number `index` of `seed`: `S` rows of `N` i.i.d. uniform signs.
pub fn sample_family(seq_len: usize, count: usize, seed: u64, index: u64) -> Result<Family> {
    if seq_len == 0 || count == 0 {
        return Err(Error::domain(
            "N >= 1 and S >= 1",
            format!("N={seq_len}, S={count}"),
        ));
    }
    if index >= AUX_STREAM {
        return Err(Error::domain("sample index < 2^63", index.to_string()));
    }
    let mut rng = stream_rng(seed, index);
    let rows = (0..count)
        .map(|_| {
            let words = (0..words_for(seq_len)).map(|_| rng.next_u64()).collect();
            BinarySequence::from_words(seq_len, words)
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_index_repeat() {
        let a = sample_family(70, 3, 7, 11).unwrap();
        assert_eq!(a, sample_family(70, 3, 7, 11).unwrap());
        assert_ne!(a, sample_family(70, 3, 7, 12).unwrap());
        assert_ne!(a, sample_family(70, 3, 8, 11).unwrap());
        assert!(sample_family(0, 3, 7, 11).is_err());
    }

    #[test]
    fn entries_look_fair_and_independent() {
        let trials = 10_000;
        let mut sums = vec![0i64; 128];
        let mut agree = 0;
        for i in 0..trials {
            let g = sample_family(64, 2, 2024, i).unwrap();
            for s in 1..=2 {
                for n in 1..=64 {
                    sums[(s - 1) * 64 + n - 1] += i64::from(g.entry(n, s));
                }
            }
            agree += u32::from(g.entry(1, 1) == g.entry(1, 2));
        }
        let tol = 4.0 / (trials as f64).sqrt();
        for (j, s) in sums.iter().enumerate() {
            let mean = *s as f64 / trials as f64;
            assert!(mean.abs() < tol, "entry {j}: mean {mean}");
        }
        assert!((f64::from(agree) / trials as f64 - 0.5).abs() < 0.05);
    }
}
