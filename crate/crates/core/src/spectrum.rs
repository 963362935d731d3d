//! Harmonic analysis over `Z/pZ`: spectra `S_f(xi) = sum_{n<p} f(n) e(n xi / p)`,
//! twisted Gauss sums, Plancherel and dilation residuals, inversion, and the
//! lambda-versus-character match diagnostic.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, jacobi_symbol, ArithError, ParityTable, SignFunction};

/// Below this modulus the spectrum is computed by direct summation, which
/// doubles as the oracle for the transform path.
pub const DIRECT_DFT_CUTOFF: u64 = 512;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("{p} is not an odd prime")]
    NotOddPrime { p: u64 },
    #[error("dilation factor {d} outside [1, p-1]")]
    BadDilation { d: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The `p` values `S_f(xi)`, `xi = 0..p-1`, of `f` restricted to `[1, p-1]`.
#[derive(Debug, Clone)]
pub struct SpectrumVector {
    pub p: u64,
    pub values: Vec<Complex64>,
    pub source: String,
}

#[derive(Debug, Clone, Copy)]
pub struct GaussSum {
    pub p: u64,
    pub xi: u64,
    pub value: Complex64,
}

fn check_odd_prime(p: u64) -> Result<(), SpectrumError> {
    if p < 3 || !is_prime(p) {
        return Err(SpectrumError::NotOddPrime { p });
    }
    Ok(())
}

/// Samples `f` on `[1, p-1]` (position 0 is the excluded n = 0).
fn sample(f: &SignFunction, p: u64) -> Result<Vec<Complex64>, SpectrumError> {
    let mut x = vec![Complex64::new(0.0, 0.0); p as usize];
    for n in 1..p {
        x[n as usize] = Complex64::new(f.eval(n)? as f64, 0.0);
    }
    Ok(x)
}

/// Spectrum of `f` over `Z/pZ`, with the `e(+n xi / p)` sign convention.
///
/// Direct summation below [`DIRECT_DFT_CUTOFF`], an O(p log p) transform
/// above it.
pub fn spectrum(f: &SignFunction, p: u64) -> Result<SpectrumVector, SpectrumError> {
    check_odd_prime(p)?;
    let values = if p <= DIRECT_DFT_CUTOFF {
        spectrum_values_direct(f, p)?
    } else {
        let mut x = sample(f, p)?;
        // rustfft's inverse transform uses e(+nk/N), matching our convention;
        // it applies no 1/N scaling, so the raw output is the spectrum.
        FftPlanner::new()
            .plan_fft_inverse(p as usize)
            .process(&mut x);
        x
    };
    Ok(SpectrumVector {
        p,
        values,
        source: f.source_id(),
    })
}

/// Reference O(p^2) evaluation of the same sums.
pub fn spectrum_values_direct(f: &SignFunction, p: u64) -> Result<Vec<Complex64>, SpectrumError> {
    check_odd_prime(p)?;
    let x = sample(f, p)?;
    let base = 2.0 * std::f64::consts::PI / p as f64;
    Ok((0..p)
        .map(|xi| {
            (1..p)
                .map(|n| {
                    let angle = base * ((n * xi) % p) as f64;
                    x[n as usize] * Complex64::new(angle.cos(), angle.sin())
                })
                .sum()
        })
        .collect())
}

/// Twisted Gauss sum `tau(chi_p, xi) = sum_{1 <= n <= p} chi_p(n) e(n xi / p)`.
///
/// The n = p term vanishes, so the sum over `n < p` is evaluated.
pub fn twisted_gauss(p: u64, xi: u64) -> Result<GaussSum, SpectrumError> {
    check_odd_prime(p)?;
    let xi = xi % p;
    let base = 2.0 * std::f64::consts::PI / p as f64;
    let mut value = Complex64::new(0.0, 0.0);
    for n in 1..p {
        let chi = jacobi_symbol(n as i64, p)? as f64;
        let angle = base * ((n * xi) % p) as f64;
        value += chi * Complex64::new(angle.cos(), angle.sin());
    }
    Ok(GaussSum { p, xi, value })
}

/// `|(1/p) sum_xi |S(xi)|^2 - (p-1)|`; near zero for any +-1-valued f.
pub fn plancherel_residual(spec: &SpectrumVector) -> f64 {
    let p = spec.p as f64;
    let energy: f64 = spec.values.iter().map(|v| v.norm_sqr()).sum();
    (energy / p - (p - 1.0)).abs()
}

/// `max_xi |S(d xi mod p) - s * S(xi)|`.
///
/// Zero (to rounding) exactly when the dilation property holds with sign `s`.
pub fn dilation_residual(spec: &SpectrumVector, d: u64, s: i8) -> Result<f64, SpectrumError> {
    let p = spec.p;
    if d == 0 || d >= p {
        return Err(SpectrumError::BadDilation { d });
    }
    let s = s as f64;
    let mut worst = 0.0f64;
    for xi in 0..p {
        let dxi = (d * xi) % p;
        let diff = (spec.values[dxi as usize] - s * spec.values[xi as usize]).norm();
        worst = worst.max(diff);
    }
    Ok(worst)
}

/// Fourier inversion: `f(n) = (1/p) sum_xi S(xi) e(-n xi / p)` on `[1, p-1]`.
pub fn inverse_spectrum(spec: &SpectrumVector) -> Vec<f64> {
    let p = spec.p;
    let mut x = spec.values.clone();
    // Forward transform (e(-nk/N) kernel), then 1/p scaling.
    FftPlanner::new()
        .plan_fft_forward(p as usize)
        .process(&mut x);
    (1..p).map(|n| x[n as usize].re / p as f64).collect()
}

/// Agreement of `lambda(n)` with `chi_p(n)` over `n < bound`, `p` not
/// dividing `n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CharacterMatch {
    pub p: u64,
    pub bound: u64,
    pub agreements: u64,
    pub first_disagreement: Option<u64>,
}

pub fn character_match(
    table: &ParityTable,
    p: u64,
    bound: u64,
) -> Result<CharacterMatch, SpectrumError> {
    check_odd_prime(p)?;
    if bound > table.limit() + 1 {
        return Err(SpectrumError::Arith(ArithError::OutOfRange {
            n: bound,
            limit: table.limit(),
        }));
    }
    let mut agreements = 0u64;
    let mut first_disagreement = None;
    for n in 1..bound {
        if n % p == 0 {
            continue;
        }
        let lam = table.liouville(n)?;
        let chi = jacobi_symbol(n as i64, p)?;
        if lam == chi {
            agreements += 1;
        } else if first_disagreement.is_none() {
            first_disagreement = Some(n);
        }
    }
    Ok(CharacterMatch {
        p,
        bound,
        agreements,
        first_disagreement,
    })
}

/// Serializes a spectrum as JSON: `{"p":..,"source":..,"values":[[re,im],..]}`.
pub fn spectrum_to_json(spec: &SpectrumVector) -> String {
    #[derive(Serialize)]
    struct Repr<'a> {
        p: u64,
        source: &'a str,
        values: Vec<[f64; 2]>,
    }
    serde_json::to_string(&Repr {
        p: spec.p,
        source: &spec.source,
        values: spec.values.iter().map(|v| [v.re, v.im]).collect(),
    })
    .expect("spectrum serialization cannot fail")
}
