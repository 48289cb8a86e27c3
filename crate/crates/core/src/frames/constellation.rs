use crate::dd::C64;
use crate::{Error, Result};

/// Square QAM with unit average energy and per-axis reflected Gray labels.
///
/// A symbol's first half of bits selects the in-phase level and the second
/// half the quadrature level, MSB first. Level index `i` (amplitude
/// `(L - 1) - 2 i` before scaling) carries the Gray code `i ^ (i >> 1)`, so
/// 4-QAM maps `00` to `(1 + j)/sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_axis: usize,
    levels: usize,
    scale: f64,
    points: Vec<C64>,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 256) {
            return Err(Error::InvalidParameter(format!(
                "QAM order must be 4, 16 or 256, got {order}"
            )));
        }
        let bits_per_axis = order.trailing_zeros() as usize / 2;
        let levels = 1usize << bits_per_axis;
        let scale = (2.0 * ((levels * levels) as f64 - 1.0) / 3.0).sqrt().recip();
        let mut c = Self {
            order,
            bits_per_axis,
            levels,
            scale,
            points: Vec::with_capacity(order),
        };
        c.points = (0..order)
            .map(|word| {
                let i_gray = word >> bits_per_axis;
                let q_gray = word & (levels - 1);
                C64::new(c.amplitude(gray_decode(i_gray)), c.amplitude(gray_decode(q_gray)))
            })
            .collect();
        Ok(c)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    /// Points indexed by their bit label read as an MSB-first integer.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    fn amplitude(&self, idx: usize) -> f64 {
        ((self.levels - 1) as f64 - 2.0 * idx as f64) * self.scale
    }

    fn axis_index(&self, a: f64) -> usize {
        let raw = (((self.levels - 1) as f64 - a / self.scale) / 2.0).round();
        raw.clamp(0.0, (self.levels - 1) as f64) as usize
    }

    /// Label of the nearest point.
    pub fn slice_label(&self, s: C64) -> usize {
        let i = self.axis_index(s.re);
        let q = self.axis_index(s.im);
        (gray_encode(i) << self.bits_per_axis) | gray_encode(q)
    }

    /// Nearest constellation point.
    pub fn slice(&self, s: C64) -> C64 {
        self.points[self.slice_label(s)]
    }
}

fn gray_encode(i: usize) -> usize {
    i ^ (i >> 1)
}

fn gray_decode(mut g: usize) -> usize {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// Map bits (values 0/1) to constellation points.
pub fn qam_modulate(bits: &[u8], constellation: &Constellation) -> Result<Vec<C64>> {
    let bps = constellation.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::InvalidParameter(format!(
            "{} bits is not a multiple of {bps}",
            bits.len()
        )));
    }
    Ok(bits
        .chunks(bps)
        .map(|chunk| {
            let word = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            constellation.points[word]
        })
        .collect())
}

/// Nearest-point slicing back to bits.
pub fn qam_hard_demod(symbols: &[C64], constellation: &Constellation) -> Vec<u8> {
    let bps = constellation.bits_per_symbol();
    let mut bits = Vec::with_capacity(symbols.len() * bps);
    for &s in symbols {
        let word = constellation.slice_label(s);
        bits.extend((0..bps).rev().map(|j| ((word >> j) & 1) as u8));
    }
    bits
}
