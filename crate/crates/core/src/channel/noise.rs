use rand::Rng;
use rand_distr::StandardNormal;

use crate::dd::C64;

/// Add circularly-symmetric complex Gaussian noise of variance `noise_var`
/// per sample.
pub fn awgn<R: Rng + ?Sized>(x: &[C64], noise_var: f64, rng: &mut R) -> Vec<C64> {
    if noise_var <= 0.0 {
        return x.to_vec();
    }
    let sd = (noise_var / 2.0).sqrt();
    x.iter()
        .map(|v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + C64::new(re, im) * sd
        })
        .collect()
}
