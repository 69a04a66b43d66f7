//! Real trigonometric transforms on the uniform grid `θ_j = j/N`.
//!
//! A function is represented as
//!
//! ```text
//! x(θ) = c_0 + Σ_{k=1}^{N/2-1} (c_k cos 2πkθ + s_k sin 2πkθ) + c_{N/2} cos πNθ
//! ```
//!
//! which has exactly `N` real degrees of freedom. Transforms are direct
//! `O(N²)` sums over a precomputed table of exact grid angles.

use crate::error::{Error, Result};
use crate::numerics::scalar::Real;

/// Checks that `n` is a power of two no smaller than 4.
pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 4 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// Values on the uniform grid `θ_j = j/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples<R> {
    values: Vec<R>,
}

impl<R: Real> GridSamples<R> {
    pub fn new(values: Vec<R>) -> Result<Self> {
        check_grid_size(values.len())?;
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(R) -> R) -> Result<Self> {
        check_grid_size(n)?;
        let nr = R::from_usize(n);
        let values = (0..n).map(|j| f(R::from_usize(j) / nr)).collect();
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn into_values(self) -> Vec<R> {
        self.values
    }

    /// Sup norm.
    pub fn max_abs(&self) -> R {
        self.values.iter().fold(R::zero(), |m, v| m.max(v.abs()))
    }
}

/// Cosine/sine coefficient record of a real trigonometric polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs<R> {
    /// `c_0 ..= c_{N/2}`
    pub cos: Vec<R>,
    /// `s_1 .. s_{N/2-1}`
    pub sin: Vec<R>,
}

impl<R: Real> FourierCoeffs<R> {
    pub fn zeros(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        Ok(Self { cos: vec![R::zero(); n / 2 + 1], sin: vec![R::zero(); n / 2 - 1] })
    }

    pub fn constant(n: usize, c0: R) -> Result<Self> {
        let mut c = Self::zeros(n)?;
        c.cos[0] = c0;
        Ok(c)
    }

    /// Number of grid points `N` this record is paired with.
    pub fn grid_len(&self) -> usize {
        self.cos.len() + self.sin.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.grid_len();
        check_grid_size(n)?;
        if self.cos.len() != n / 2 + 1 {
            return Err(Error::Structural(format!(
                "coefficient record has {} cosine and {} sine terms",
                self.cos.len(),
                self.sin.len()
            )));
        }
        Ok(())
    }

    /// Packs into `[c_0..=c_{N/2}, s_1..s_{N/2-1}]`.
    pub fn to_vec(&self) -> Vec<R> {
        self.cos.iter().chain(self.sin.iter()).copied().collect()
    }

    pub fn from_vec(v: &[R]) -> Result<Self> {
        let n = v.len();
        check_grid_size(n)?;
        Ok(Self { cos: v[..=n / 2].to_vec(), sin: v[n / 2 + 1..].to_vec() })
    }

    /// Same function on a grid of `new_n >= N` points (zero-padded spectrum).
    pub fn resized(&self, new_n: usize) -> Result<Self> {
        check_grid_size(new_n)?;
        let n = self.grid_len();
        if new_n < n {
            return Err(Error::Structural(format!("cannot shrink {n} modes to {new_n}")));
        }
        let mut out = Self::zeros(new_n)?;
        out.cos[..self.cos.len()].copy_from_slice(&self.cos);
        out.sin[..self.sin.len()].copy_from_slice(&self.sin);
        Ok(out)
    }

    /// Magnitude of harmonic `k` (`sqrt(c_k² + s_k²)`).
    pub fn harmonic_magnitude(&self, k: usize) -> R {
        let c = self.cos.get(k).copied().unwrap_or(R::zero());
        let s = if k >= 1 { self.sin.get(k - 1).copied().unwrap_or(R::zero()) } else { R::zero() };
        (c * c + s * s).sqrt()
    }

    /// Largest harmonic index retained (`N/2`).
    pub fn max_harmonic(&self) -> usize {
        self.cos.len() - 1
    }

    /// Evaluation at an arbitrary angle.
    pub fn eval(&self, theta: R) -> R {
        self.eval_with_derivatives(theta).0
    }

    /// `(x, x', x'')` at `theta`, derivatives taken with respect to `θ`.
    pub fn eval_with_derivatives(&self, theta: R) -> (R, R, R) {
        let row = BasisRow::at(self.grid_len(), theta);
        let v = self.to_vec();
        let dot = |r: &[R]| r.iter().zip(&v).map(|(a, b)| *a * *b).sum::<R>();
        (dot(&row.value), dot(&row.d1), dot(&row.d2))
    }
}

/// Basis functions and their first two derivatives at one angle, in the
/// packed unknown ordering of [`FourierCoeffs::to_vec`].
pub struct BasisRow<R> {
    pub value: Vec<R>,
    pub d1: Vec<R>,
    pub d2: Vec<R>,
}

impl<R: Real> BasisRow<R> {
    pub fn at(n: usize, theta: R) -> Self {
        let half = n / 2;
        let mut value = vec![R::zero(); n];
        let mut d1 = vec![R::zero(); n];
        let mut d2 = vec![R::zero(); n];
        let two_pi = R::from_f64(2.0) * R::pi();
        let (s1, c1) = theta.fract_turns().sin_cos_turns();
        let (mut sk, mut ck) = (R::zero(), R::one());
        value[0] = R::one();
        for k in 1..=half {
            let next_c = ck * c1 - sk * s1;
            let next_s = sk * c1 + ck * s1;
            ck = next_c;
            sk = next_s;
            let w = two_pi * R::from_usize(k);
            value[k] = ck;
            d1[k] = -w * sk;
            d2[k] = -w * w * ck;
            if k < half {
                value[half + k] = sk;
                d1[half + k] = w * ck;
                d2[half + k] = -w * w * sk;
            }
        }
        Self { value, d1, d2 }
    }
}

/// Precomputed transform tables for one grid size.
#[derive(Clone, Debug)]
pub struct Transform<R> {
    n: usize,
    cos_table: Vec<R>,
    sin_table: Vec<R>,
}

impl<R: Real> Transform<R> {
    pub fn new(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let nr = R::from_usize(n);
        let (sin_table, cos_table) =
            (0..n).map(|m| (R::from_usize(m) / nr).sin_cos_turns()).unzip();
        Ok(Self { n, cos_table, sin_table })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid angle `θ_j`.
    pub fn node(&self, j: usize) -> R {
        R::from_usize(j) / R::from_usize(self.n)
    }

    /// `cos 2π m/N`, `sin 2π m/N` for any integer `m`.
    #[inline]
    pub fn cos_sin(&self, m: usize) -> (R, R) {
        let i = m % self.n;
        (self.cos_table[i], self.sin_table[i])
    }

    pub fn forward(&self, samples: &GridSamples<R>) -> Result<FourierCoeffs<R>> {
        if samples.len() != self.n {
            return Err(Error::Structural(format!(
                "transform of size {} applied to {} samples",
                self.n,
                samples.len()
            )));
        }
        let n = self.n;
        let half = n / 2;
        let x = samples.values();
        let nr = R::from_usize(n);
        let two_over_n = R::from_f64(2.0) / nr;
        let mut out = FourierCoeffs::zeros(n)?;
        out.cos[0] = x.iter().copied().sum::<R>() / nr;
        for k in 1..half {
            let (mut cs, mut ss) = (R::zero(), R::zero());
            for (j, &xj) in x.iter().enumerate() {
                let (c, s) = self.cos_sin(k * j);
                cs += xj * c;
                ss += xj * s;
            }
            out.cos[k] = cs * two_over_n;
            out.sin[k - 1] = ss * two_over_n;
        }
        let nyq: R = x
            .iter()
            .enumerate()
            .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
            .sum();
        out.cos[half] = nyq / nr;
        Ok(out)
    }

    pub fn inverse(&self, coeffs: &FourierCoeffs<R>) -> Result<GridSamples<R>> {
        coeffs.check()?;
        if coeffs.grid_len() != self.n {
            return Err(Error::Structural(format!(
                "transform of size {} applied to {} coefficients",
                self.n,
                coeffs.grid_len()
            )));
        }
        let n = self.n;
        let half = n / 2;
        let values = (0..n)
            .map(|j| {
                let mut v = coeffs.cos[0];
                for k in 1..half {
                    let (c, s) = self.cos_sin(k * j);
                    v += coeffs.cos[k] * c + coeffs.sin[k - 1] * s;
                }
                if j % 2 == 0 {
                    v + coeffs.cos[half]
                } else {
                    v - coeffs.cos[half]
                }
            })
            .collect();
        Ok(GridSamples { values })
    }

    /// Row-major `N×N` matrix `B[j][i] = basis_i(θ_j + tau)` so that
    /// `B · coeffs.to_vec()` evaluates the series at the shifted nodes.
    pub fn shifted_basis(&self, tau: R) -> Vec<R> {
        let n = self.n;
        let half = n / 2;
        let tau = tau.fract_turns();
        // per-harmonic phase cos/sin(2πkτ), each evaluated directly
        let phase: Vec<(R, R)> = (0..=half)
            .map(|k| {
                let (s, c) = (R::from_usize(k) * tau).fract_turns().sin_cos_turns();
                (c, s)
            })
            .collect();
        let mut b = vec![R::zero(); n * n];
        for j in 0..n {
            let row = &mut b[j * n..(j + 1) * n];
            row[0] = R::one();
            for k in 1..=half {
                let (cg, sg) = self.cos_sin(k * j);
                let (cp, sp) = phase[k];
                let c = cg * cp - sg * sp;
                let s = sg * cp + cg * sp;
                row[k] = c;
                if k < half {
                    row[half + k] = s;
                }
            }
        }
        b
    }
}

/// Forward transform of a sample vector.
pub fn dft_forward<R: Real>(samples: &GridSamples<R>) -> Result<FourierCoeffs<R>> {
    Transform::new(samples.len())?.forward(samples)
}

/// Inverse transform of a coefficient record.
pub fn dft_inverse<R: Real>(coeffs: &FourierCoeffs<R>) -> Result<GridSamples<R>> {
    coeffs.check()?;
    Transform::new(coeffs.grid_len())?.inverse(coeffs)
}
