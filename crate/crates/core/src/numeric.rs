//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated accumulator for complex values (re and im summed separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `-p ln p` with `0 ln 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of a two-point distribution.
pub fn binary_entropy(p: f64) -> f64 {
    (plogp(p) + plogp(1.0 - p)) / std::f64::consts::LN_2
}

/// Inverse of the binary entropy on `[0, 1/2]` by bisection.
pub fn inverse_binary_entropy(h: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `base^exp` if it fits in `u64`.
pub fn checked_pow(base: u32, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u64)?;
    }
    Some(acc)
}

/// `e^{2 pi i t}` for `t` given as a fraction of a full turn.
#[inline]
pub fn turn(t: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `(k * num / den) mod 1` as a fraction in `[0, 1)`, exact before the final division.
#[inline]
pub fn frac_phase(k: i64, num: u64, den: u64) -> f64 {
    let den128 = den as u128;
    let kk = (k as i128).rem_euclid(den as i128) as u128;
    let r = (kk * num as u128) % den128;
    r as f64 / den as f64
}

/// Digits of `index` in base `base`, most significant first, padded to `len`.
pub fn index_to_word(mut index: u64, base: u32, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for slot in w.iter_mut().rev() {
        *slot = (index % base as u64) as u8;
        index /= base as u64;
    }
    w
}

/// Inverse of [`index_to_word`].
pub fn word_to_index(word: &[u8], base: u32) -> u64 {
    word.iter().fold(0u64, |acc, &d| acc * base as u64 + d as u64)
}
