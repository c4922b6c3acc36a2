//! In-place fast Walsh-Hadamard transform.
//!
//! The transform is the `L`-fold tensor power of the single-site Hadamard
//! gate. Butterflies for the low bits run inside cache-sized blocks; the
//! remaining bits are handled two at a time (radix-4) to halve the number of
//! sweeps over memory. There are no reductions, so results do not depend on
//! how rayon splits the work.

use std::ops::{Add, MulAssign, Sub};

use rayon::prelude::*;

use super::StateVector;
use crate::error::{Error, Result};

const BLOCK: usize = 1 << 14;

pub trait Butterfly: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + MulAssign<f64> {}

impl<T> Butterfly for T where T: Copy + Send + Sync + Add<Output = T> + Sub<Output = T> + MulAssign<f64> {}

/// Normalised transform of a state vector (an involution).
pub fn fwht(state: &mut StateVector) {
    let amps = state.amplitudes_mut();
    fwht_unnormalized(amps);
    let scale = (amps.len() as f64).sqrt().recip();
    amps.par_iter_mut().for_each(|a| *a *= scale);
}

/// Normalised transform of an arbitrary power-of-two buffer.
pub fn fwht_in_place<T: Butterfly>(data: &mut [T]) -> Result<()> {
    if !data.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(data.len()));
    }
    fwht_unnormalized(data);
    let scale = (data.len() as f64).sqrt().recip();
    data.par_iter_mut().for_each(|a| *a *= scale);
    Ok(())
}

/// Transform without the `2^{-L/2}` factor. Applying it twice multiplies by
/// `2^L`. Length must be a power of two.
pub(crate) fn fwht_unnormalized<T: Butterfly>(data: &mut [T]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }
    let inner = n.min(BLOCK);
    data.par_chunks_mut(inner).for_each(block_butterflies);

    let mut h = inner;
    while h < n {
        if 4 * h <= n {
            data.par_chunks_mut(4 * h).for_each(|quad| radix4(quad, h));
            h *= 4;
        } else {
            data.par_chunks_mut(2 * h).for_each(|pair| radix2(pair, h));
            h *= 2;
        }
    }
}

fn block_butterflies<T: Butterfly>(chunk: &mut [T]) {
    let n = chunk.len();
    let mut h = 1;
    while h < n {
        if 4 * h <= n {
            for quad in chunk.chunks_exact_mut(4 * h) {
                radix4_serial(quad, h);
            }
            h *= 4;
        } else {
            for pair in chunk.chunks_exact_mut(2 * h) {
                let (lo, hi) = pair.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*a, *b);
                    *a = u + v;
                    *b = u - v;
                }
            }
            h *= 2;
        }
    }
}

#[inline]
fn radix4_serial<T: Butterfly>(quad: &mut [T], h: usize) {
    let (first, second) = quad.split_at_mut(2 * h);
    let (q0, q1) = first.split_at_mut(h);
    let (q2, q3) = second.split_at_mut(h);
    for (((a, b), c), d) in q0.iter_mut().zip(q1.iter_mut()).zip(q2.iter_mut()).zip(q3.iter_mut()) {
        let (s01, d01) = (*a + *b, *a - *b);
        let (s23, d23) = (*c + *d, *c - *d);
        *a = s01 + s23;
        *b = d01 + d23;
        *c = s01 - s23;
        *d = d01 - d23;
    }
}

fn radix2<T: Butterfly>(pair: &mut [T], h: usize) {
    let (lo, hi) = pair.split_at_mut(h);
    lo.par_chunks_mut(BLOCK)
        .zip(hi.par_chunks_mut(BLOCK))
        .for_each(|(lo, hi)| {
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        });
}

/// Two butterfly layers (strides `h` and `2h`) in one sweep.
fn radix4<T: Butterfly>(quad: &mut [T], h: usize) {
    let (first, second) = quad.split_at_mut(2 * h);
    let (q0, q1) = first.split_at_mut(h);
    let (q2, q3) = second.split_at_mut(h);
    q0.par_chunks_mut(BLOCK)
        .zip(q1.par_chunks_mut(BLOCK))
        .zip(q2.par_chunks_mut(BLOCK).zip(q3.par_chunks_mut(BLOCK)))
        .for_each(|((c0, c1), (c2, c3))| {
            for (((a, b), c), d) in c0.iter_mut().zip(c1.iter_mut()).zip(c2.iter_mut()).zip(c3.iter_mut()) {
                let (s01, d01) = (*a + *b, *a - *b);
                let (s23, d23) = (*c + *d, *c - *d);
                *a = s01 + s23;
                *b = d01 + d23;
                *c = s01 - s23;
                *d = d01 - d23;
            }
        });
}
