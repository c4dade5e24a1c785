//! In-place radix-2 FFT with unitary (1/√N) scaling in both directions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `exp(-j2πkn/N)`
    Forward,
    /// `exp(+j2πkn/N)`
    Inverse,
}

/// Unitary DFT of `data` in place. The length must be a power of two.
pub fn transform_in_place(data: &mut [Complex64], direction: Direction) -> Result<()> {
    let n = data.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n == 1 {
        return Ok(());
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles computed directly per butterfly column; avoids the
        // accumulated error of repeated multiplication
        let step = sign * 2.0 * PI / len as f64;
        for k in 0..half {
            let w = Complex64::from_polar(1.0, step * k as f64);
            for start in (0..n).step_by(len) {
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }

    let scale = 1.0 / (n as f64).sqrt();
    for x in data.iter_mut() {
        *x *= scale;
    }
    Ok(())
}

pub fn forward(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = input.to_vec();
    transform_in_place(&mut out, Direction::Forward)?;
    Ok(out)
}

pub fn inverse(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = input.to_vec();
    transform_in_place(&mut out, Direction::Inverse)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct O(N²) unitary DFT.
    fn dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let angle = sign * 2.0 * PI * ((k * i) % n) as f64 / n as f64;
                        v * Complex64::from_polar(1.0, angle)
                    })
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len).prop_map(|v| {
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect()
        })
    }

    #[test]
    fn rejects_non_power_of_two() {
        let mut v = vec![Complex64::default(); 12];
        assert_eq!(
            transform_in_place(&mut v, Direction::Forward),
            Err(Error::NotPowerOfTwo(12))
        );
        assert_eq!(inverse(&[]), Err(Error::NotPowerOfTwo(0)));
    }

    #[test]
    fn dc_bin_gives_constant() {
        let n = 128;
        let mut x = vec![Complex64::default(); n];
        x[0] = Complex64::new((n as f64).sqrt(), 0.0);
        for s in inverse(&x).unwrap() {
            assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn matches_direct_dft(x in (0u32..8).prop_flat_map(|p| complex_vec(1 << p))) {
            let fast_fwd = forward(&x).unwrap();
            let fast_inv = inverse(&x).unwrap();
            for (a, b) in fast_fwd.iter().zip(dft(&x, -1.0)) {
                prop_assert!((a - b).norm() < 1e-10);
            }
            for (a, b) in fast_inv.iter().zip(dft(&x, 1.0)) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }

        #[test]
        fn round_trip_and_parseval(x in complex_vec(128)) {
            let time = inverse(&x).unwrap();
            let back = forward(&time).unwrap();
            let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let time_energy: f64 = time.iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((energy - time_energy).abs() <= 1e-9 * energy.max(1e-300));
            let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).norm() <= 1e-12 * scale.max(1.0));
            }
        }
    }
}
