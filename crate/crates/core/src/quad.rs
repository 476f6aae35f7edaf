//! Composite Simpson quadrature and compensated summation.
//!
//! Integrands here are smooth Gaussian-Lorentzian products, for which
//! composite Simpson on a uniform grid converges fast and reproduces
//! bit-for-bit across runs.

use num_complex::Complex64;

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated complex accumulator (independent real/imaginary parts).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSumC64 {
    re: KahanSum,
    im: KahanSum,
}

impl KahanSumC64 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Simpson weight (1, 4, 2, ..., 4, 1)/3 for sample `i` of `n` (n odd).
#[inline]
pub fn simpson_weight(i: usize, n: usize) -> f64 {
    debug_assert!(n % 2 == 1 && n >= 3);
    if i == 0 || i == n - 1 {
        1.0 / 3.0
    } else if i % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}

/// Integral of pre-sampled complex values on a uniform grid of step `h`.
pub fn simpson_sampled_c64(y: &[Complex64], h: f64) -> Complex64 {
    let n = y.len();
    debug_assert!(n % 2 == 1 && n >= 3);
    let mut acc = KahanSumC64::new();
    for (i, v) in y.iter().enumerate() {
        acc.add(simpson_weight(i, n) * v);
    }
    acc.value() * h
}

/// Integral of pre-sampled real values on a uniform grid of step `h`.
pub fn simpson_sampled_f64(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    debug_assert!(n % 2 == 1 && n >= 3);
    let mut acc = KahanSum::new();
    for (i, v) in y.iter().enumerate() {
        acc.add(simpson_weight(i, n) * v);
    }
    acc.value() * h
}

/// Composite Simpson of `f` over [a, b] with `n` samples (n = 4k + 1), also
/// returning the half-resolution estimate from the even-indexed samples. The
/// difference between the two is the standard refinement error gauge.
pub fn simpson_with_refinement<F>(f: F, a: f64, b: f64, n: usize) -> (Complex64, Complex64)
where
    F: Fn(f64) -> Complex64,
{
    debug_assert!(n % 4 == 1 && n >= 5, "need n = 4k + 1 samples");
    let h = (b - a) / (n - 1) as f64;
    let n_half = n.div_ceil(2);
    let mut fine = KahanSumC64::new();
    let mut half = KahanSumC64::new();
    for i in 0..n {
        let x = a + i as f64 * h;
        let v = f(x);
        fine.add(simpson_weight(i, n) * v);
        if i % 2 == 0 {
            half.add(simpson_weight(i / 2, n_half) * v);
        }
    }
    (fine.value() * h, half.value() * (2.0 * h))
}

/// Round up to the next odd integer.
pub fn next_odd(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    }
}

/// Round up to the next integer of the form 4k + 1.
pub fn next_4k1(n: usize) -> usize {
    let mut m = n.max(5);
    while m % 4 != 1 {
        m += 1;
    }
    m
}
