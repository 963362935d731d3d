//! Foundational arithmetic: the parity-of-Omega sieve behind the Liouville
//! function, deterministic 64-bit primality, Jacobi/Legendre symbols,
//! primitive roots, largest prime factors, and the [`SignFunction`]
//! evaluation contract shared by every other module.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

/// Hard cap on sieve size: 2^33 integers packs into 1 GiB of bits.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 33;

/// Sieve segment length; a multiple of 8 so segments map to whole bytes.
const SEGMENT_LEN: u64 = 1 << 20;

const PARITY_MAGIC: &[u8; 4] = b"LPAR";
const PARITY_VERSION: u8 = 0x01;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("limit {limit} exceeds sieve capacity {max}")]
    Capacity { limit: u64, max: u64 },
    #[error("limit must be at least 1")]
    ZeroLimit,
    #[error("argument {n} outside table range [1, {limit}]")]
    OutOfRange { n: u64, limit: u64 },
    #[error("Jacobi symbol modulus must be odd and positive, got {n}")]
    BadJacobiModulus { n: u64 },
    #[error("{n} is not an odd prime")]
    NotOddPrime { n: u64 },
    #[error("largest_prime_factor requires n >= 2, got {n}")]
    TooSmallToFactor { n: u64 },
    #[error("custom sign function undefined at {n}: beyond cutoff {cutoff}")]
    BeyondCutoff { n: u64, cutoff: u64 },
    #[error("custom sign function has no assignment for prime {p}")]
    MissingPrime { p: u64 },
    #[error("quadratic character modulus must be an odd prime, got {p}")]
    BadCharacterModulus { p: u64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a parity-table file (bad magic)")]
    BadMagic,
    #[error("unsupported parity-table version {0}")]
    BadVersion(u8),
    #[error("parity-table file truncated")]
    Truncated,
}

/// Bit-packed parity of `Omega(n)` for `1 <= n <= limit`.
///
/// Bit `j` (least-significant first) of data byte `i` holds the parity for
/// `n = 8i + j + 1`, the same layout as the on-disk format.
pub struct ParityTable {
    limit: u64,
    bytes: Vec<u8>,
}

impl ParityTable {
    /// Builds the table with a segmented sieve.
    ///
    /// Per segment, prime powers `p^e <= limit` of primes `p <= sqrt(limit)`
    /// flip the parity at their multiples (counting multiplicity), while a
    /// running product of the flipped primes lets the single possible prime
    /// factor above `sqrt(limit)` be detected without per-element factoring.
    /// Segments are independent and byte-aligned, so the result is
    /// bit-identical regardless of how they are scheduled across workers.
    pub fn build(limit: u64) -> Result<ParityTable, ArithError> {
        if limit == 0 {
            return Err(ArithError::ZeroLimit);
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(ArithError::Capacity {
                limit,
                max: MAX_SIEVE_LIMIT,
            });
        }
        let root = (limit as f64).sqrt() as u64 + 1;
        let small_primes = simple_prime_sieve(root);

        let n_bytes = limit.div_ceil(8) as usize;
        let mut bytes = vec![0u8; n_bytes];

        // Chunk output bytes so each worker owns a disjoint byte range.
        let bytes_per_seg = (SEGMENT_LEN / 8) as usize;
        bytes
            .par_chunks_mut(bytes_per_seg)
            .enumerate()
            .for_each(|(seg, out)| {
                let lo = seg as u64 * SEGMENT_LEN + 1;
                let hi = (lo + SEGMENT_LEN - 1).min(limit);
                sieve_segment(lo, hi, limit, &small_primes, out);
            });

        Ok(ParityTable { limit, bytes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Parity bit of `Omega(n)`.
    pub fn parity(&self, n: u64) -> Result<u8, ArithError> {
        if n == 0 || n > self.limit {
            return Err(ArithError::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(self.parity_unchecked(n))
    }

    #[inline]
    pub(crate) fn parity_unchecked(&self, n: u64) -> u8 {
        let idx = n - 1;
        (self.bytes[(idx / 8) as usize] >> (idx % 8)) & 1
    }

    /// `lambda(n) = (-1)^Omega(n)`.
    pub fn liouville(&self, n: u64) -> Result<i8, ArithError> {
        Ok(if self.parity(n)? == 0 { 1 } else { -1 })
    }

    #[inline]
    pub(crate) fn liouville_unchecked(&self, n: u64) -> i8 {
        if self.parity_unchecked(n) == 0 {
            1
        } else {
            -1
        }
    }

    /// Writes the table in the `LPAR` v1 format.
    pub fn save(&self, path: &Path) -> Result<(), ArithError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(PARITY_MAGIC)?;
        w.write_all(&[PARITY_VERSION])?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.bytes)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ParityTable, ArithError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| ArithError::Truncated)?;
        if &magic != PARITY_MAGIC {
            return Err(ArithError::BadMagic);
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version)
            .map_err(|_| ArithError::Truncated)?;
        if version[0] != PARITY_VERSION {
            return Err(ArithError::BadVersion(version[0]));
        }
        let mut limit_bytes = [0u8; 8];
        r.read_exact(&mut limit_bytes)
            .map_err(|_| ArithError::Truncated)?;
        let limit = u64::from_le_bytes(limit_bytes);
        if limit == 0 || limit > MAX_SIEVE_LIMIT {
            return Err(ArithError::Capacity {
                limit,
                max: MAX_SIEVE_LIMIT,
            });
        }
        let n_bytes = limit.div_ceil(8) as usize;
        let mut bytes = vec![0u8; n_bytes];
        r.read_exact(&mut bytes).map_err(|_| ArithError::Truncated)?;
        Ok(ParityTable { limit, bytes })
    }
}

/// Sieve one segment `[lo, hi]`, writing parity bits into `out`.
fn sieve_segment(lo: u64, hi: u64, limit: u64, small_primes: &[u64], out: &mut [u8]) {
    let len = (hi - lo + 1) as usize;
    let mut parity = vec![0u8; len];
    // Product of the small prime factors flipped for each n, with
    // multiplicity; n / product > 1 iff a prime > sqrt(limit) remains.
    let mut removed = vec![1u64; len];

    for &p in small_primes {
        let mut pe = p;
        loop {
            let start = lo.div_ceil(pe) * pe;
            let mut m = start;
            while m <= hi {
                let i = (m - lo) as usize;
                parity[i] ^= 1;
                removed[i] *= p;
                m += pe;
            }
            if pe > limit / p {
                break;
            }
            pe *= p;
        }
    }

    for i in 0..len {
        let n = lo + i as u64;
        if removed[i] < n {
            // One leftover prime factor above sqrt(limit).
            parity[i] ^= 1;
        }
    }

    for (i, &b) in parity.iter().enumerate() {
        if b == 1 {
            out[i / 8] |= 1 << (i % 8);
        }
    }
}

/// Primes up to `bound` inclusive, by plain Eratosthenes.
pub fn simple_prime_sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Jacobi symbol `(a | n)` for odd positive `n`, via binary reciprocity.
///
/// Equals the Legendre symbol when `n` is prime.
pub fn jacobi_symbol(a: i64, n: u64) -> Result<i8, ArithError> {
    if n == 0 || n % 2 == 0 {
        return Err(ArithError::BadJacobiModulus { n });
    }
    let mut n = n;
    let mut a = (a.rem_euclid(n as i64)) as u64;
    let mut sign: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set is known to be exact for all n < 2^64.
    'witness: for a in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n`, by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo an odd prime `p`.
///
/// A candidate `d` is accepted once `d^((p-1)/q) != 1 (mod p)` for every
/// prime `q | p-1`.
pub fn find_primitive_root(p: u64) -> Result<u64, ArithError> {
    if p < 3 || !is_prime(p) {
        return Err(ArithError::NotOddPrime { n: p });
    }
    let factors = distinct_prime_factors(p - 1);
    for d in 2..p {
        if factors.iter().all(|&q| pow_mod(d, (p - 1) / q, p) != 1) {
            return Ok(d);
        }
    }
    unreachable!("every prime has a primitive root");
}

/// `n` split as its largest prime factor times a cofactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorView {
    pub n: u64,
    pub largest_prime: u64,
    pub cofactor: u64,
}

pub fn largest_prime_factor(n: u64) -> Result<FactorView, ArithError> {
    if n < 2 {
        return Err(ArithError::TooSmallToFactor { n });
    }
    let mut rem = n;
    let mut largest = 1u64;
    let mut d = 2u64;
    while d * d <= rem {
        while rem % d == 0 {
            largest = d;
            rem /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        largest = rem;
    }
    Ok(FactorView {
        n,
        largest_prime: largest,
        cofactor: n / largest,
    })
}

/// Evaluation contract for completely multiplicative +-1 functions and
/// quadratic characters (the value 0 is permitted only for a character at
/// multiples of its modulus).
pub enum SignFunction<'a> {
    Liouville(&'a ParityTable),
    QuadraticCharacter { p: u64 },
    Custom {
        prime_signs: BTreeMap<u64, i8>,
        cutoff: u64,
    },
}

impl<'a> SignFunction<'a> {
    pub fn liouville(table: &'a ParityTable) -> SignFunction<'a> {
        SignFunction::Liouville(table)
    }

    /// Legendre symbol `(. | p)`; `p = 2` is rejected rather than given a
    /// convention.
    pub fn quadratic(p: u64) -> Result<SignFunction<'a>, ArithError> {
        if p < 3 || !is_prime(p) {
            return Err(ArithError::BadCharacterModulus { p });
        }
        Ok(SignFunction::QuadraticCharacter { p })
    }

    /// Completely multiplicative extension of `prime_signs`, defined on
    /// `[1, cutoff]` only.
    pub fn custom(prime_signs: BTreeMap<u64, i8>, cutoff: u64) -> SignFunction<'a> {
        SignFunction::Custom {
            prime_signs,
            cutoff,
        }
    }

    pub fn eval(&self, n: u64) -> Result<i8, ArithError> {
        match self {
            SignFunction::Liouville(table) => table.liouville(n),
            SignFunction::QuadraticCharacter { p } => jacobi_symbol(n as i64, *p),
            SignFunction::Custom {
                prime_signs,
                cutoff,
            } => {
                if n == 0 || n > *cutoff {
                    return Err(ArithError::BeyondCutoff { n, cutoff: *cutoff });
                }
                let mut sign: i8 = 1;
                let mut rem = n;
                let mut d = 2u64;
                while d * d <= rem {
                    while rem % d == 0 {
                        sign *= prime_signs
                            .get(&d)
                            .copied()
                            .ok_or(ArithError::MissingPrime { p: d })?;
                        rem /= d;
                    }
                    d += if d == 2 { 1 } else { 2 };
                }
                if rem > 1 {
                    sign *= prime_signs
                        .get(&rem)
                        .copied()
                        .ok_or(ArithError::MissingPrime { p: rem })?;
                }
                Ok(sign)
            }
        }
    }

    /// Short identifier used when serializing spectra and reports.
    pub fn source_id(&self) -> String {
        match self {
            SignFunction::Liouville(_) => "liouville".to_string(),
            SignFunction::QuadraticCharacter { p } => format!("chi_{p}"),
            SignFunction::Custom { cutoff, .. } => format!("custom[1,{cutoff}]"),
        }
    }
}
