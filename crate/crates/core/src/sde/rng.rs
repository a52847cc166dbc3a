use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream of path `index` under master seed `seed`.
///
/// The master seed fixes the ChaCha8 key and the path index selects the
/// 64-bit stream, so each path's increments depend only on `(seed, index)`
/// and never on scheduling. Normals are drawn with the ziggurat sampler of
/// `rand_distr::StandardNormal`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
