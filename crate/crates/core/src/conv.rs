//! The convolution sum `L_f(N) = sum_{1 <= n < N} f(n) f(N-n)`: single exact
//! evaluation, bulk scans via NTT autoconvolution, the divisor-reduction
//! inequality, extremal structure reports, and the minus-minus Goldbach
//! search.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, ParityTable, SignFunction};
use crate::ntt;

/// Largest scan limit the transform is allowed to attempt; beyond this the
/// two residue vectors alone pass 1 GiB.
pub const MAX_SCAN_LIMIT: u64 = 1 << 26;

#[derive(Debug, Error)]
pub enum ConvError {
    #[error("convolution requires N >= 2, got {n}")]
    TooSmall { n: u64 },
    #[error("scan limit {x} exceeds transform budget {max}")]
    ScanCapacity { x: u64, max: u64 },
    #[error("scan limit {x} exceeds parity table limit {limit}")]
    BeyondTable { x: u64, limit: u64 },
    #[error("minus-minus search requires even N >= 4, got {n}")]
    BadGoldbachInput { n: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// One scanned value of `L_lambda(N)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvolutionRecord {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "L")]
    pub l: i64,
    pub ratio: f64,
    pub extremal: bool,
}

impl ConvolutionRecord {
    fn new(n: u64, l: i64) -> ConvolutionRecord {
        ConvolutionRecord {
            n,
            l,
            ratio: l.unsigned_abs() as f64 / (n - 1) as f64,
            extremal: l.unsigned_abs() == n - 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub limit: u64,
    pub records: Vec<ConvolutionRecord>,
}

impl ScanReport {
    /// All N with `|L(N)| = N - 1`, ascending.
    pub fn extremal_list(&self) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.extremal)
            .map(|r| r.n)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "N,L,ratio,extremal")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{:.6},{}",
                r.n,
                r.l,
                r.ratio,
                if r.extremal { 1 } else { 0 }
            )?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        serde_json::to_writer(&mut *w, self)?;
        writeln!(w)
    }
}

/// `sum_{1 <= n < N} f(n) f(N-n)` by direct summation, O(N).
///
/// Zero values (a character at multiples of its modulus) contribute 0.
pub fn conv_sum_naive(f: &SignFunction, n: u64) -> Result<i64, ConvError> {
    if n < 2 {
        return Err(ConvError::TooSmall { n });
    }
    let mut acc = 0i64;
    for k in 1..n {
        acc += f.eval(k)? as i64 * f.eval(n - k)? as i64;
    }
    Ok(acc)
}

/// `L_lambda(N)` for every `2 <= N <= x` via exact NTT autoconvolution of
/// the sign vector.
pub fn conv_scan(table: &ParityTable, x: u64) -> Result<ScanReport, ConvError> {
    if x < 2 {
        return Err(ConvError::TooSmall { n: x });
    }
    if x > MAX_SCAN_LIMIT {
        return Err(ConvError::ScanCapacity {
            x,
            max: MAX_SCAN_LIMIT,
        });
    }
    if x > table.limit() {
        return Err(ConvError::BeyondTable {
            x,
            limit: table.limit(),
        });
    }
    // signs[n] = lambda(n) for 1 <= n < x, signs[0] = 0; the autoconvolution
    // coefficient at N is then exactly L_lambda(N).
    let mut signs = vec![0i8; x as usize];
    for n in 1..x {
        signs[n as usize] = table.liouville_unchecked(n);
    }
    let coeffs = ntt::autoconvolve_exact(&signs);
    let records = (2..=x)
        .map(|n| ConvolutionRecord::new(n, coeffs[n as usize]))
        .collect();
    Ok(ScanReport { limit: x, records })
}

/// Ascending divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DivisorBoundEntry {
    pub d: u64,
    pub l_d: i64,
    /// `|L(N)| <= |L(d)| + N - d`.
    pub bound_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct DivisorReductionReport {
    pub n: u64,
    pub l_n: i64,
    pub entries: Vec<DivisorBoundEntry>,
    pub violations: usize,
}

/// Checks `|L(N)| <= |L(d)| + N - d` for every divisor `d | N`.
///
/// A violation here falsifies the implementation, not the input.
pub fn divisor_reduction_check(
    table: &ParityTable,
    n: u64,
) -> Result<DivisorReductionReport, ConvError> {
    let f = SignFunction::liouville(table);
    let l_n = conv_sum_naive(&f, n)?;
    let mut entries = Vec::new();
    let mut violations = 0usize;
    for d in divisors(n) {
        if d < 2 {
            continue;
        }
        let l_d = conv_sum_naive(&f, d)?;
        let bound_holds = l_n.unsigned_abs() <= l_d.unsigned_abs() + (n - d);
        if !bound_holds {
            violations += 1;
        }
        entries.push(DivisorBoundEntry { d, l_d, bound_holds });
    }
    Ok(DivisorReductionReport {
        n,
        l_n,
        entries,
        violations,
    })
}

#[derive(Debug, Serialize)]
pub enum ExtremalStructure {
    /// `|L(N)| = N-1`: every divisor must satisfy `L(d) = lambda(d-1)(d-1)`
    /// and `lambda(N-1) = lambda(d-1)`.
    Extremal {
        n: u64,
        l_n: i64,
        divisor_checks: Vec<(u64, bool)>,
        violations: usize,
    },
    /// Not extremal; `witness` is the least n with
    /// `lambda(n) lambda(N-n) != lambda(N-1)`.
    NonExtremal { n: u64, l_n: i64, witness: u64 },
}

pub fn extremal_structure_report(
    table: &ParityTable,
    n: u64,
) -> Result<ExtremalStructure, ConvError> {
    let f = SignFunction::liouville(table);
    let l_n = conv_sum_naive(&f, n)?;
    if l_n.unsigned_abs() == n - 1 {
        let lam_n1 = table.liouville(n - 1)?;
        let mut divisor_checks = Vec::new();
        let mut violations = 0usize;
        for d in divisors(n) {
            if d < 2 {
                continue;
            }
            let l_d = conv_sum_naive(&f, d)?;
            let lam_d1 = table.liouville(d - 1)?;
            let ok = l_d == lam_d1 as i64 * (d as i64 - 1) && lam_n1 == lam_d1;
            if !ok {
                violations += 1;
            }
            divisor_checks.push((d, ok));
        }
        Ok(ExtremalStructure::Extremal {
            n,
            l_n,
            divisor_checks,
            violations,
        })
    } else {
        let lam_n1 = table.liouville(n - 1)?;
        let witness = (1..n)
            .find(|&k| {
                table.liouville_unchecked(k) * table.liouville_unchecked(n - k) != lam_n1
            })
            .expect("non-extremal N must have a witness");
        Ok(ExtremalStructure::NonExtremal { n, l_n, witness })
    }
}

/// Outcome of the minus-minus pair search at an even N.
#[derive(Debug, Serialize)]
pub enum MmSearch {
    /// Lexicographically least `(a, b)`, `a <= b`, `a + b = N`,
    /// `lambda(a) = lambda(b) = -1`.
    Pair { a: u64, b: u64 },
    /// No pair exists; the fallback inequality
    /// `|L(N)| > N - 2 |sum_{n<N} lambda(n)|` is then verified.
    None {
        conv_abs: u64,
        partial_sum_abs: u64,
        inequality_holds: bool,
    },
}

pub fn goldbach_mm_pair(table: &ParityTable, n: u64) -> Result<MmSearch, ConvError> {
    if n < 4 || n % 2 != 0 {
        return Err(ConvError::BadGoldbachInput { n });
    }
    if n > table.limit() {
        return Err(ConvError::BeyondTable {
            x: n,
            limit: table.limit(),
        });
    }
    for a in 2..=n / 2 {
        if table.liouville_unchecked(a) == -1 && table.liouville_unchecked(n - a) == -1 {
            return Ok(MmSearch::Pair { a, b: n - a });
        }
    }
    let f = SignFunction::liouville(table);
    let conv_abs = conv_sum_naive(&f, n)?.unsigned_abs();
    let partial: i64 = (1..n).map(|k| table.liouville_unchecked(k) as i64).sum();
    let partial_sum_abs = partial.unsigned_abs();
    Ok(MmSearch::None {
        conv_abs,
        partial_sum_abs,
        inequality_holds: conv_abs as i128 > n as i128 - 2 * partial_sum_abs as i128,
    })
}
