//! Small numeric helpers shared across modules.

/// Compensated (Neumaier) summation. Order-deterministic and accurate to a
/// couple of ulps regardless of cancellation in the inputs.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// SplitMix64 output function; used to derive independent substream seeds
/// from a single master seed.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `index` derived from `master`. Streams are fixed up
/// front so that any evaluation order (serial or parallel) yields identical
/// results.
pub(crate) fn substream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}
