//! Amplitude kernels shared by the state-vector and density-matrix backends.
//!
//! All kernels address a flat complex buffer whose index bits are "wires";
//! a density matrix over `n` qubits is handled as a buffer over `2n` wires.
//! Updates are purely element-wise (no reductions), so results are bitwise
//! identical whether or not the work is split across threads.

use num_complex::Complex64;
use rayon::prelude::*;

/// Buffers shorter than this are processed on the calling thread.
pub(crate) const PAR_THRESHOLD: usize = 1 << 15;

/// Calls `f(lo, hi)` for every amplitude pair differing only in `bit`
/// (`lo` has the bit clear).
pub(crate) fn for_each_pair<F>(state: &mut [Complex64], bit: usize, f: F)
where
    F: Fn(&mut Complex64, &mut Complex64) + Sync,
{
    let stride = 1usize << bit;
    debug_assert!(2 * stride <= state.len());
    let serial = |chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(stride);
        lo.iter_mut().zip(hi.iter_mut()).for_each(|(a, b)| f(a, b));
    };
    if state.len() < PAR_THRESHOLD {
        state.chunks_exact_mut(2 * stride).for_each(serial);
    } else if state.len() / (2 * stride) >= 64 {
        state.par_chunks_exact_mut(2 * stride).for_each(serial);
    } else {
        state.chunks_exact_mut(2 * stride).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .for_each(|(a, b)| f(a, b));
        });
    }
}

/// Calls `f(index, amp)` on every amplitude.
pub(crate) fn for_each_indexed<F>(state: &mut [Complex64], f: F)
where
    F: Fn(usize, &mut Complex64) + Sync,
{
    if state.len() < PAR_THRESHOLD {
        state.iter_mut().enumerate().for_each(|(i, a)| f(i, a));
    } else {
        state.par_iter_mut().enumerate().for_each(|(i, a)| f(i, a));
    }
}

/// Inserts zero bits at the (ascending) positions in `bits`.
#[inline]
fn deposit(mut idx: usize, sorted_bits: &[usize]) -> usize {
    for &b in sorted_bits {
        let low = idx & ((1usize << b) - 1);
        idx = low | ((idx >> b) << (b + 1));
    }
    idx
}

#[derive(Clone, Copy)]
struct SharedMut(*mut Complex64);
// Groups visited by `for_each_group` are disjoint, so concurrent writers never alias.
unsafe impl Send for SharedMut {}
unsafe impl Sync for SharedMut {}

impl SharedMut {
    fn get(&self) -> *mut Complex64 {
        self.0
    }
}

/// Calls `f(group)` for every group of `2^k` amplitudes that differ only in
/// the given wires. Within `group`, local index bit `m` is wire `bits[m]`.
pub(crate) fn for_each_group<F>(state: &mut [Complex64], bits: &[usize], f: F)
where
    F: Fn(&mut [Complex64]) + Sync,
{
    let k = bits.len();
    assert!(k <= 4, "group kernel supports at most 4 wires");
    let size = 1usize << k;
    let mut sorted: Vec<usize> = bits.to_vec();
    sorted.sort_unstable();
    debug_assert!(sorted.windows(2).all(|w| w[0] != w[1]));
    debug_assert!(sorted.last().is_none_or(|&b| (1usize << b) < state.len()));

    let offsets: Vec<usize> = (0..size)
        .map(|m| {
            (0..k)
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| 1usize << bits[i])
                .sum()
        })
        .collect();
    let groups = state.len() >> k;
    let ptr = SharedMut(state.as_mut_ptr());

    let visit = |g: usize| {
        let base = deposit(g, &sorted);
        let mut buf = [Complex64::new(0.0, 0.0); 16];
        for (m, off) in offsets.iter().enumerate() {
            // SAFETY: base + off < len, and distinct groups touch distinct indices.
            buf[m] = unsafe { *ptr.get().add(base + off) };
        }
        f(&mut buf[..size]);
        for (m, off) in offsets.iter().enumerate() {
            unsafe { *ptr.get().add(base + off) = buf[m] };
        }
    };
    if state.len() < PAR_THRESHOLD {
        (0..groups).for_each(visit);
    } else {
        (0..groups).into_par_iter().for_each(visit);
    }
}

/// Real 2x2 matrix on one wire.
pub(crate) fn apply_real_1q(state: &mut [Complex64], bit: usize, m: [[f64; 2]; 2]) {
    for_each_pair(state, bit, |a, b| {
        let (x, y) = (*a, *b);
        *a = x * m[0][0] + y * m[0][1];
        *b = x * m[1][0] + y * m[1][1];
    });
}

/// Ry matrix `[[c, -s], [s, c]]` with `c = cos(angle/2)`, `s = sin(angle/2)`.
pub(crate) fn ry_matrix(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = (0.5 * angle).sin_cos();
    [[c, -s], [s, c]]
}

pub(crate) fn h_matrix() -> [[f64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[r, r], [r, -r]]
}

pub(crate) fn apply_x(state: &mut [Complex64], bit: usize) {
    for_each_pair(state, bit, std::mem::swap);
}

/// `Y = [[0, -i], [i, 0]]`, or its conjugate when `conj` is set.
pub(crate) fn apply_y(state: &mut [Complex64], bit: usize, conj: bool) {
    let sign = if conj { -1.0 } else { 1.0 };
    for_each_pair(state, bit, |a, b| {
        let (x, y) = (*a, *b);
        // new_lo = -i * y, new_hi = i * x
        *a = Complex64::new(y.im, -y.re) * sign;
        *b = Complex64::new(-x.im, x.re) * sign;
    });
}

pub(crate) fn apply_z(state: &mut [Complex64], bit: usize) {
    for_each_pair(state, bit, |_, b| *b = -*b);
}

pub(crate) fn apply_cz(state: &mut [Complex64], b1: usize, b2: usize) {
    let mask = (1usize << b1) | (1usize << b2);
    for_each_indexed(state, |i, a| {
        if i & mask == mask {
            *a = -*a;
        }
    });
}

pub(crate) fn apply_cx(state: &mut [Complex64], control: usize, target: usize) {
    for_each_group(state, &[control, target], |g| g.swap(1, 3));
}
