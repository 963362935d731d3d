//! Number-theoretic transforms modulo word-sized primes, used for the exact
//! bulk autoconvolution in [`crate::conv`].
//!
//! Two NTT-friendly primes are used and the residues recombined by CRT, so
//! convolution values are exact integers for any scan size the sieve can
//! reach.

use crate::arith::pow_mod;

/// `29 * 2^57 + 1`, primitive root 3.
pub const P1: u64 = 4_179_340_454_199_820_289;
pub const ROOT1: u64 = 3;
/// `27 * 2^56 + 1`, primitive root 5.
pub const P2: u64 = 1_945_555_039_024_054_273;
pub const ROOT2: u64 = 5;

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

fn invmod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

/// In-place radix-2 transform of a power-of-two-length slice.
///
/// `invert` selects the inverse transform (including the 1/n scaling).
pub fn ntt(values: &mut [u64], modulus: u64, root: u64, invert: bool) {
    let n = values.len();
    assert!(n.is_power_of_two(), "ntt length must be a power of two");
    assert!(
        (modulus - 1) % n as u64 == 0,
        "modulus does not support length {n}"
    );

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }

    let mut len = 2usize;
    while len <= n {
        let mut w_len = pow_mod(root, (modulus - 1) / len as u64, modulus);
        if invert {
            w_len = invmod(w_len, modulus);
        }
        let mut i = 0usize;
        while i < n {
            let mut w = 1u64;
            for k in 0..len / 2 {
                let u = values[i + k];
                let v = mulmod(values[i + k + len / 2], w, modulus);
                values[i + k] = addmod(u, v, modulus);
                values[i + k + len / 2] = submod(u, v, modulus);
                w = mulmod(w, w_len, modulus);
            }
            i += len;
        }
        len <<= 1;
    }

    if invert {
        let n_inv = invmod(n as u64, modulus);
        for v in values.iter_mut() {
            *v = mulmod(*v, n_inv, modulus);
        }
    }
}

/// Cyclic autoconvolution of `signs` (entries +-1 as i8) modulo one prime.
fn autoconvolve_mod(signs: &[i8], size: usize, modulus: u64, root: u64) -> Vec<u64> {
    let mut a = vec![0u64; size];
    for (i, &s) in signs.iter().enumerate() {
        a[i] = if s >= 0 { s as u64 } else { modulus - (-s) as u64 };
    }
    ntt(&mut a, modulus, root, false);
    for v in a.iter_mut() {
        *v = mulmod(*v, *v, modulus);
    }
    ntt(&mut a, modulus, root, true);
    a
}

/// Exact integer autoconvolution `c[k] = sum_{i+j=k} signs[i] signs[j]`.
///
/// Index 0 of `signs` is coefficient 0; the result has length
/// `2 * signs.len() - 1`.
pub fn autoconvolve_exact(signs: &[i8]) -> Vec<i64> {
    let out_len = 2 * signs.len() - 1;
    let size = out_len.next_power_of_two();
    let c1 = autoconvolve_mod(signs, size, P1, ROOT1);
    let c2 = autoconvolve_mod(signs, size, P2, ROOT2);
    (0..out_len).map(|k| crt_signed(c1[k], c2[k])).collect()
}

/// Lift residues mod P1 and P2 to the centered representative mod P1*P2.
fn crt_signed(r1: u64, r2: u64) -> i64 {
    // x = r1 + P1 * ((r2 - r1) * P1^{-1} mod P2)
    let p1_inv_mod_p2 = invmod(P1 % P2, P2);
    let diff = submod(r2 % P2, r1 % P2, P2);
    let k = mulmod(diff, p1_inv_mod_p2, P2);
    let x = r1 as i128 + P1 as i128 * k as i128;
    let modulus = P1 as i128 * P2 as i128;
    let centered = if x > modulus / 2 { x - modulus } else { x };
    i64::try_from(centered).expect("convolution value exceeds i64")
}
