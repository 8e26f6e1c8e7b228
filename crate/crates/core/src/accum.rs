//! Compensated summation and deterministic reductions.
//!
//! Lattice sums and quadrature grids in this crate accumulate millions of
//! terms whose magnitudes span many orders; plain `f64` accumulation loses
//! digits and, worse, parallel reductions make the result depend on the
//! thread schedule. Two rules fix both problems:
//!
//! * every sequential accumulation is Neumaier-compensated;
//! * every parallel reduction splits the index range into fixed-size chunks,
//!   sums each chunk sequentially, and combines the chunk partials in index
//!   order — so the result is bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Neumaier (improved Kahan) compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values (independent real/imag lanes).
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierC {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierC {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Chunk size for deterministic parallel reductions.
///
/// Fixed once; changing it changes the rounding pattern (not the math), so it
/// is a crate constant rather than a tunable.
pub const REDUCTION_CHUNK: usize = 8192;

/// Deterministic parallel mean of `f(i)` over `0..n`, producing one complex
/// value per output slot (`slots` values are accumulated simultaneously so a
/// grid sweep can feed a whole Gram matrix in one pass).
///
/// The chunk partials are computed in parallel but merged in index order, so
/// the result does not depend on the number of threads.
pub fn par_mean_complex<F>(n: usize, slots: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(REDUCTION_CHUNK)
        .map(|s| (s, (s + REDUCTION_CHUNK).min(n)))
        .collect();

    let partials: Vec<Vec<NeumaierC>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![NeumaierC::new(); slots];
            let mut buf = vec![Complex64::default(); slots];
            for i in lo..hi {
                for b in buf.iter_mut() {
                    *b = Complex64::default();
                }
                f(i, &mut buf);
                for (a, b) in acc.iter_mut().zip(buf.iter()) {
                    a.add(*b);
                }
            }
            acc
        })
        .collect();

    // in-order merge of chunk partials
    let mut total = vec![NeumaierC::new(); slots];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part.iter()) {
            t.add(p.value());
        }
    }
    total
        .iter()
        .map(|t| t.value() / (n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_digits() {
        // 1 + 1e-16 repeated: plain sum stays at 1, compensated does not.
        let mut plain = 1.0f64;
        let mut comp = Neumaier::new();
        comp.add(1.0);
        for _ in 0..1000 {
            plain += 1e-17;
            comp.add(1e-17);
        }
        assert_eq!(plain, 1.0);
        assert!((comp.value() - (1.0 + 1000.0 * 1e-17)).abs() < 1e-18);
    }

    #[test]
    fn par_mean_is_thread_count_independent() {
        let f = |i: usize, out: &mut [Complex64]| {
            let x = (i as f64).sin() * 1e-3 + 1.0;
            out[0] = Complex64::new(x, -x);
        };
        let a = par_mean_complex(100_000, 1, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| par_mean_complex(100_000, 1, f));
        assert_eq!(a[0], b[0]);
    }
}
