/// Derives an independent 64-bit seed from a master seed and a salt
/// (round index, trial index, ...) via SplitMix64 finalization.
///
/// `mix_seed(seed, 0) != seed` in general; callers that need stream 0 to
/// coincide with the master seed must special-case it themselves.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
