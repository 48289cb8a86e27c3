use rustfft::FftPlanner;

use super::{DdGrid, QpSignal, C64};
use crate::{Error, Result};

/// Discrete Zak transform of a length-`MN` sequence:
/// `X[k, l] = N^{-1/2} sum_m x[k + mM] exp(-j 2 pi l m / N)`.
pub fn zak(grid: &DdGrid, x: &[C64]) -> Result<QpSignal> {
    let (m, n) = (grid.m(), grid.n());
    if x.len() != grid.len() {
        return Err(Error::MalformedFrame {
            expected: grid.len(),
            got: x.len(),
        });
    }
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for k in 0..m {
        for (mi, b) in buf.iter_mut().enumerate() {
            *b = x[k + mi * m];
        }
        fft.process(&mut buf);
        for (l, b) in buf.iter().enumerate() {
            out[k + l * m] = b * scale;
        }
    }
    QpSignal::new(*grid, out)
}

/// Inverse discrete Zak transform:
/// `x[k + mM] = N^{-1/2} sum_l X[k, l] exp(j 2 pi l m / N)`.
pub fn inverse_zak(signal: &QpSignal) -> Vec<C64> {
    let grid = signal.grid();
    let (m, n) = (grid.m(), grid.n());
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let scale = 1.0 / (n as f64).sqrt();
    let data = signal.as_slice();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for k in 0..m {
        for (l, b) in buf.iter_mut().enumerate() {
            *b = data[k + l * m];
        }
        ifft.process(&mut buf);
        for (mi, b) in buf.iter().enumerate() {
            out[k + mi * m] = b * scale;
        }
    }
    out
}
