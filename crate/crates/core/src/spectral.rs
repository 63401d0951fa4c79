//! FFT plumbing over row-major n-d arrays.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    /// Inverse, normalised so that forward followed by inverse is identity.
    Inverse,
}

/// In-place FFT along each of `axes`.
pub(crate) fn fft_axes(data: &mut [Complex64], shape: &[usize], axes: &[usize], dir: Direction) {
    for &axis in axes {
        fft_axis(data, shape, axis, dir);
    }
}

pub(crate) fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, dir: Direction) {
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    let direction = match dir {
        Direction::Forward => FftDirection::Forward,
        Direction::Inverse => FftDirection::Inverse,
    };
    let fft = FftPlanner::<f64>::new().plan_fft(len, direction);
    let norm = match dir {
        Direction::Forward => 1.0,
        Direction::Inverse => 1.0 / len as f64,
    };

    if stride == 1 {
        data.par_chunks_mut(len).for_each(|line| {
            fft.process(line);
            if norm != 1.0 {
                line.iter_mut().for_each(|v| *v *= norm);
            }
        });
        return;
    }

    // Transpose each (len × stride) block so the axis is contiguous, run the
    // batched transform, transpose back.
    let block = len * stride;
    data.par_chunks_mut(block).for_each(|blk| {
        let mut t = vec![Complex64::new(0.0, 0.0); block];
        for k in 0..len {
            for j in 0..stride {
                t[j * len + k] = blk[k * stride + j];
            }
        }
        fft.process(&mut t);
        for k in 0..len {
            for j in 0..stride {
                blk[k * stride + j] = t[j * len + k] * norm;
            }
        }
    });
}

/// Pre-planned FFT over every axis of a cube of side `side`, run on the
/// calling thread. Meant for use inside parallel loops.
pub(crate) struct CubeFft {
    side: usize,
    ndim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CubeFft {
    pub(crate) fn new(side: usize, ndim: usize) -> Self {
        let mut planner = FftPlanner::new();
        CubeFft {
            side,
            ndim,
            forward: planner.plan_fft_forward(side),
            inverse: planner.plan_fft_inverse(side),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.side.pow(self.ndim as u32)
    }

    pub(crate) fn process(&self, data: &mut [Complex64], dir: Direction) {
        debug_assert_eq!(data.len(), self.len());
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let side = self.side;
        let mut line = vec![Complex64::new(0.0, 0.0); side];
        for axis in 0..self.ndim {
            let stride = side.pow((self.ndim - 1 - axis) as u32);
            if stride == 1 {
                data.chunks_exact_mut(side).for_each(|c| fft.process(c));
                continue;
            }
            let block = side * stride;
            for outer in 0..data.len() / block {
                for inner in 0..stride {
                    let base = outer * block + inner;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
        if dir == Direction::Inverse {
            let norm = 1.0 / self.len() as f64;
            data.iter_mut().for_each(|v| *v *= norm);
        }
    }
}

/// Angular frequencies of a length-`len` DFT on spacing `h`, in FFT order.
/// The Nyquist bin is mapped to zero so odd derivatives stay real-symmetric.
pub(crate) fn angular_frequencies(len: usize, h: f64) -> Vec<f64> {
    let base = 2.0 * std::f64::consts::PI / (len as f64 * h);
    (0..len)
        .map(|m| {
            let signed = signed_index(m, len);
            if 2 * m == len {
                0.0
            } else {
                signed as f64 * base
            }
        })
        .collect()
}

/// FFT bin `m` as a signed frequency index in `[-len/2, len/2)`.
pub(crate) fn signed_index(m: usize, len: usize) -> i64 {
    if m >= len / 2 {
        m as i64 - len as i64
    } else {
        m as i64
    }
}

/// Inverse of [`signed_index`]; `None` outside the representable band.
pub(crate) fn bin_of(signed: i64, len: usize) -> Option<usize> {
    let half = (len / 2) as i64;
    if signed < -half || signed >= half {
        None
    } else if signed < 0 {
        Some((signed + len as i64) as usize)
    } else {
        Some(signed as usize)
    }
}

/// Two-thirds dealiasing mask for one axis.
pub(crate) fn two_thirds_mask(len: usize) -> Vec<bool> {
    (0..len)
        .map(|m| 3 * signed_index(m, len).unsigned_abs() as usize <= len)
        .collect()
}

/// Row-major digit decomposition of `flat` for a cube of side `len`.
#[inline]
pub(crate) fn digits(mut flat: usize, len: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = flat % len;
        flat /= len;
    }
}
