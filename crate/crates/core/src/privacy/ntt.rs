//! Number-theoretic transform over Z_p with p = 15·2²⁷ + 1.

pub const MODULUS: u64 = 2_013_265_921;
const PRIMITIVE_ROOT: u64 = 31;
/// Largest supported transform length.
pub const MAX_LEN: usize = 1 << 27;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    b %= MODULUS;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % MODULUS;
        }
        b = b * b % MODULUS;
        e >>= 1;
    }
    r
}

/// In-place iterative radix-2 transform; `a.len()` must be a power of two.
pub fn ntt(a: &mut [u64], inverse: bool) {
    let n = a.len();
    assert!(n.is_power_of_two() && n <= MAX_LEN);
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(PRIMITIVE_ROOT, (MODULUS - 1) / len as u64);
        if inverse {
            w = pow_mod(w, MODULUS - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut t = 1u64;
        for _ in 0..half {
            twiddles.push(t);
            t = t * w % MODULUS;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * tw % MODULUS;
                *u = if x + y >= MODULUS { x + y - MODULUS } else { x + y };
                *v = if x >= y { x - y } else { x + MODULUS - y };
            }
        }
        len <<= 1;
    }
    if inverse {
        let inv_n = pow_mod(n as u64, MODULUS - 2);
        for v in a.iter_mut() {
            *v = *v * inv_n % MODULUS;
        }
    }
}

/// Cyclic convolution of length `len` (power of two) of two 0/1 vectors.
/// Coefficients stay below the modulus for inputs shorter than 2³⁰.
pub fn cyclic_convolution(a: &[u8], b: &[u8], len: usize) -> Vec<u64> {
    let mut fa = vec![0u64; len];
    let mut fb = vec![0u64; len];
    for (i, &v) in a.iter().enumerate() {
        fa[i % len] += v as u64;
    }
    for (i, &v) in b.iter().enumerate() {
        fb[i % len] += v as u64;
    }
    ntt(&mut fa, false);
    ntt(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % MODULUS;
    }
    ntt(&mut fa, true);
    fa
}
