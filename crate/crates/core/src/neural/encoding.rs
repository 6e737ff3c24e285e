/// Number of dyadic frequency bands (2, 4, ..., 64).
pub const BANDS: usize = 6;
/// Length of the encoded coordinate vector.
pub const ENCODED_LEN: usize = 2 + 4 * BANDS;

/// Fourier features of a coordinate pair:
/// `[c, sin(2c), cos(2c), sin(4c), cos(4c), ..., sin(64c), cos(64c)]`.
pub fn fourier_encode(c: [f64; 2]) -> [f64; ENCODED_LEN] {
    let mut out = [0.0; ENCODED_LEN];
    out[0] = c[0];
    out[1] = c[1];
    for band in 0..BANDS {
        let freq = (2u32 << band) as f64;
        let base = 2 + 4 * band;
        let (sx, cx) = (freq * c[0]).sin_cos();
        let (sy, cy) = (freq * c[1]).sin_cos();
        out[base..base + 4].copy_from_slice(&[sx, sy, cx, cy]);
    }
    out
}
