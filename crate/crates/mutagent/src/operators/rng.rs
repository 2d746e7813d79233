//! Deterministic random draws for mutation values.
//!
//! Every descriptor gets its own subseed derived from the campaign seed, the
//! operator id and the enumeration ordinal, so campaigns reproduce the same
//! values regardless of which operators run, in what order, or on which
//! platform. The generator is SplitMix64: tiny, portable, and stable forever,
//! which is worth more here than statistical sophistication.

/// Alphabet for random replacement strings.
pub const STRING_ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

/// Length of random replacement strings.
pub const STRING_LENGTH: usize = 12;

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    state: u64,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Subseed for one descriptor: campaign seed mixed with the operator id
    /// and the per-operator ordinal.
    pub fn subseed(campaign_seed: u64, operator_id: &str, ordinal: u64) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325; // FNV-1a offset basis
        for byte in operator_id.bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let mut mix = RandomPolicy::new(campaign_seed ^ h);
        mix.next_u64();
        mix.state = mix.state.wrapping_add(ordinal.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        mix.next_u64();
        mix.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[lo, hi]` via rejection sampling.
    pub fn int_in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        let zone = u64::MAX - (u64::MAX % span);
        loop {
            let draw = self.next_u64();
            if draw < zone {
                return lo + (draw % span) as i64;
            }
        }
    }

    /// Draw in `[lo, hi]` distinct from `original` (which may lie outside the
    /// range). Requires at least one admissible value.
    pub fn int_in_range_excluding(&mut self, lo: i64, hi: i64, original: i64) -> i64 {
        debug_assert!(hi > lo || original != lo);
        loop {
            let draw = self.int_in_range(lo, hi);
            if draw != original {
                return draw;
            }
        }
    }

    /// Random lowercase string of the policy length, distinct from `original`.
    pub fn string_excluding(&mut self, original: &str) -> String {
        loop {
            let drawn: String = (0..STRING_LENGTH)
                .map(|_| STRING_ALPHABET[(self.next_u64() % STRING_ALPHABET.len() as u64) as usize] as char)
                .collect();
            if drawn != original {
                return drawn;
            }
        }
    }

    /// Deterministic pick from a non-empty slice.
    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        debug_assert!(!items.is_empty());
        &items[(self.next_u64() % items.len() as u64) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomPolicy::new(42);
        let mut b = RandomPolicy::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn subseed_varies_with_operator_and_ordinal() {
        let a = RandomPolicy::subseed(1, "changeIntentPriority", 0);
        let b = RandomPolicy::subseed(1, "changeIntentPriority", 1);
        let c = RandomPolicy::subseed(1, "changeFlowOutContextLifespan", 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn lifespan_draws_stay_in_range_and_exclude_original() {
        let mut rng = RandomPolicy::new(7);
        for _ in 0..1000 {
            let v = rng.int_in_range_excluding(1, 3, 2);
            assert!(v == 1 || v == 3);
        }
    }

    #[test]
    fn strings_use_declared_alphabet_and_length() {
        let mut rng = RandomPolicy::new(9);
        for _ in 0..200 {
            let s = rng.string_excluding("hello");
            assert_eq!(s.len(), STRING_LENGTH);
            assert!(s.bytes().all(|b| b.is_ascii_lowercase()));
            assert_ne!(s, "hello");
        }
    }
}
