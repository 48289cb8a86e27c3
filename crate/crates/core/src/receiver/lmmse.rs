use nalgebra::{DMatrix, DVector};

use crate::channel::{build_channel_matrix, EffectiveChannel, TimeKernel};
use crate::dd::{zak, C64};
use crate::frames::{qam_hard_demod, Constellation};
use crate::{Error, Result};

/// Added to the LMMSE diagonal so noiseless runs stay solvable.
pub const REG_FLOOR: f64 = 1e-12;

/// LMMSE output on the DD grid (delay-fastest order).
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Unsliced symbol estimates.
    pub soft: Vec<C64>,
    pub symbols: Vec<C64>,
    pub bits: Vec<u8>,
}

fn finish(soft: Vec<C64>, constellation: &Constellation) -> Detection {
    let symbols = soft.iter().map(|&s| constellation.slice(s)).collect();
    let bits = qam_hard_demod(&soft, constellation);
    Detection { soft, symbols, bits }
}

fn regularization(noise_var: f64, e: f64, floor: f64) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    if !(noise_var >= 0.0 && floor >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise variance {noise_var} and floor {floor} must be non-negative"
        )));
    }
    Ok(noise_var / e + floor)
}

/// Solve `(H^H H + (sigma^2 / e + floor) I) z = H^H vec(Y)` and slice
/// `z / sqrt(e)`.
///
/// `y` is the received time-domain frame. The system is solved in the time
/// domain, where the channel is a cyclic band matrix; this is unitarily
/// equivalent to the DD form and costs `O(MN K^2)` for a delay spread `K`.
pub fn lmmse_detect(
    y: &[C64],
    h: &EffectiveChannel,
    noise_var: f64,
    e: f64,
    constellation: &Constellation,
    floor: f64,
) -> Result<Detection> {
    let lambda = regularization(noise_var, e, floor)?;
    let kernel = TimeKernel::new(h);
    let rhs = kernel.adjoint(y)?;
    let x = solve_normal_equations(&kernel, &rhs, lambda)?;
    let z = zak(h.grid(), &x)?;
    let s = e.sqrt().recip();
    let soft = z.as_slice().iter().map(|v| v * s).collect();
    Ok(finish(soft, constellation))
}

/// Dense reference for [`lmmse_detect`] built on the `MN x MN` DD channel
/// matrix. Only practical for small grids.
pub fn lmmse_detect_dense(
    y: &[C64],
    h: &EffectiveChannel,
    noise_var: f64,
    e: f64,
    constellation: &Constellation,
    floor: f64,
) -> Result<Detection> {
    let lambda = regularization(noise_var, e, floor)?;
    let len = h.grid().len();
    let yd = zak(h.grid(), y)?;
    let hm = build_channel_matrix(h);
    let hh = hm.adjoint();
    let a = &hh * &hm + DMatrix::<C64>::identity(len, len) * C64::new(lambda, 0.0);
    let b = &hh * DVector::from_column_slice(yd.as_slice());
    let z = dense_solve(a, b)?;
    let s = e.sqrt().recip();
    let soft = z.iter().map(|v| v * s).collect();
    Ok(finish(soft, constellation))
}

fn dense_solve(a: DMatrix<C64>, b: DVector<C64>) -> Result<DVector<C64>> {
    let n = a.nrows();
    match a.cholesky() {
        Some(c) => Ok(c.solve(&b)),
        None => Err(Error::Singular {
            row: n,
            pivot: f64::NAN,
        }),
    }
}

/// Normal-equation matrix `A = H^H H + lambda I` in cyclic band storage:
/// `band[m][delta + K] = A[m, (m + delta) mod L]` for `|delta| <= K`.
struct CyclicBand {
    len: usize,
    half: usize,
    band: Vec<Vec<C64>>,
}

impl CyclicBand {
    fn new(kernel: &TimeKernel, lambda: f64) -> Self {
        let len = kernel.len();
        let delays = kernel.delays();
        let lo = delays.iter().copied().min().unwrap_or(0);
        let hi = delays.iter().copied().max().unwrap_or(0);
        let half = (hi - lo) as usize;
        let mut band = vec![vec![C64::new(0.0, 0.0); 2 * half + 1]; len];
        for row in band.iter_mut() {
            row[half] = C64::new(lambda, 0.0);
        }
        let l = len as i64;
        for (j1, &d1) in delays.iter().enumerate() {
            let g1 = kernel.gains(j1);
            for (j2, &d2) in delays.iter().enumerate() {
                let g2 = kernel.gains(j2);
                let col = (d1 - d2 + half as i64) as usize;
                for n in 0..len {
                    let m = (n as i64 - d1).rem_euclid(l) as usize;
                    band[m][col] += g1[n].conj() * g2[n];
                }
            }
        }
        Self { len, half, band }
    }

    /// `A[i, j]` for indices within the band, zero elsewhere.
    fn get(&self, i: usize, j: usize) -> C64 {
        let l = self.len as i64;
        let mut delta = (j as i64 - i as i64).rem_euclid(l);
        if delta > l / 2 {
            delta -= l;
        }
        if delta.unsigned_abs() as usize > self.half {
            return C64::new(0.0, 0.0);
        }
        self.band[i][(delta + self.half as i64) as usize]
    }

}

fn dense_normal_matrix(kernel: &TimeKernel, lambda: f64) -> DMatrix<C64> {
    let len = kernel.len();
    let l = len as i64;
    let mut a = DMatrix::<C64>::identity(len, len) * C64::new(lambda, 0.0);
    let delays = kernel.delays();
    for (j1, &d1) in delays.iter().enumerate() {
        let g1 = kernel.gains(j1);
        for (j2, &d2) in delays.iter().enumerate() {
            let g2 = kernel.gains(j2);
            for n in 0..len {
                let r = (n as i64 - d1).rem_euclid(l) as usize;
                let c = (n as i64 - d2).rem_euclid(l) as usize;
                a[(r, c)] += g1[n].conj() * g2[n];
            }
        }
    }
    a
}

/// Cholesky factor of a Hermitian band matrix of half-bandwidth `K`:
/// `lower[i][j] = L[i, i - j]` for `j <= K`.
struct BandCholesky {
    half: usize,
    lower: Vec<Vec<C64>>,
}

impl BandCholesky {
    fn factor(n: usize, half: usize, entry: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let mut lower = vec![vec![C64::new(0.0, 0.0); half + 1]; n];
        for i in 0..n {
            let first = i.saturating_sub(half);
            for j in first..=i {
                let mut s = entry(i, j);
                let kfirst = first.max(j.saturating_sub(half));
                for k in kfirst..j {
                    s -= lower[i][i - k] * lower[j][j - k].conj();
                }
                if i == j {
                    let pivot = s.re;
                    if !(pivot > 0.0) || !pivot.is_finite() {
                        return Err(Error::Singular { row: i, pivot });
                    }
                    lower[i][0] = C64::new(pivot.sqrt(), 0.0);
                } else {
                    lower[i][i - j] = s / lower[j][0].re;
                }
            }
        }
        Ok(Self { half, lower })
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [C64]) {
        let n = b.len();
        for i in 0..n {
            let mut s = b[i];
            for k in i.saturating_sub(self.half)..i {
                s -= self.lower[i][i - k] * b[k];
            }
            b[i] = s / self.lower[i][0].re;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n.min(i + self.half + 1) {
                s -= self.lower[k][k - i].conj() * b[k];
            }
            b[i] = s / self.lower[i][0].re;
        }
    }
}

/// Solve `A x = rhs` for the cyclic band matrix of `kernel`.
///
/// The last `K` unknowns form a border; the remaining interior block is
/// an ordinary band matrix, and the border is closed with a dense Schur
/// complement.
fn solve_normal_equations(kernel: &TimeKernel, rhs: &[C64], lambda: f64) -> Result<Vec<C64>> {
    let a = CyclicBand::new(kernel, lambda);
    let (len, half) = (a.len, a.half);
    if len < 3 * half + 3 {
        let dense = dense_normal_matrix(kernel, lambda);
        let x = dense_solve(dense, DVector::from_column_slice(rhs))?;
        return Ok(x.iter().copied().collect());
    }
    let inner = len - half;
    let chol = BandCholesky::factor(inner, half, |i, j| a.get(i, j))?;
    let mut x_inner = rhs[..inner].to_vec();
    chol.solve_in_place(&mut x_inner);
    if half == 0 {
        return Ok(x_inner);
    }
    // Z = A_II^{-1} A_IS, one column per border unknown.
    let mut z = Vec::with_capacity(half);
    for s in 0..half {
        let col = inner + s;
        let mut v: Vec<C64> = (0..inner).map(|i| a.get(i, col)).collect();
        chol.solve_in_place(&mut v);
        z.push(v);
    }
    let schur = DMatrix::from_fn(half, half, |r, c| {
        let row = inner + r;
        let mut v = a.get(row, inner + c);
        for (i, zi) in z[c].iter().enumerate() {
            let arow = a.get(row, i);
            if arow != C64::new(0.0, 0.0) {
                v -= arow * zi;
            }
        }
        v
    });
    let reduced = DVector::from_fn(half, |r, _| {
        let row = inner + r;
        let mut v = rhs[row];
        for (i, xi) in x_inner.iter().enumerate() {
            let arow = a.get(row, i);
            if arow != C64::new(0.0, 0.0) {
                v -= arow * xi;
            }
        }
        v
    });
    let x_border = dense_solve(schur, reduced)?;
    for (s, col) in z.iter().enumerate() {
        let xb = x_border[s];
        for (xi, zi) in x_inner.iter_mut().zip(col) {
            *xi -= zi * xb;
        }
    }
    x_inner.extend(x_border.iter().copied());
    Ok(x_inner)
}
