//! The combinatorial descent on pairs `(m, j)`: classification into the
//! interval sets `A_{q,r}`, the maps `psi_r`, signature iteration, and
//! checkers for the conditional identities that hold exactly for quadratic
//! characters and, empirically, for lambda at extremal primes.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{is_prime, ArithError, SignFunction};

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("invalid pair state: p={p}, q={q}, m={m}, j={j}")]
    InvalidState { p: u64, q: u64, m: u64, j: u64 },
    #[error("boundary hit m+jp = pq/(r+1); input is corrupted (p, q not both prime?)")]
    Boundary,
    #[error("psi_{r} applied to a pair classified as r={actual}")]
    WrongBranch { r: u64, actual: u64 },
    #[error("residue class of {r}*{m} is divisible by p={p}")]
    DegenerateResidue { r: u64, m: u64, p: u64 },
    #[error("descent did not terminate within q steps; implementation bug")]
    NonTermination,
    #[error("iteration identity requires q | m + jp (got m={m}, j={j}, q={q})")]
    CongruenceViolated { m: u64, j: u64, q: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A pair `(m, j)` in context `(p, q)`: `1 <= m < p`, `0 <= j < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairState {
    pub p: u64,
    pub q: u64,
    pub m: u64,
    pub j: u64,
}

impl PairState {
    pub fn new(p: u64, q: u64, m: u64, j: u64) -> Result<PairState, SignatureError> {
        let valid = is_prime(p) && p % 2 == 1 && is_prime(q) && q < p && (1..p).contains(&m)
            && j < q;
        if !valid {
            return Err(SignatureError::InvalidState { p, q, m, j });
        }
        Ok(PairState { p, q, m, j })
    }

    /// `m + jp`, the quantity the descent strictly decreases.
    pub fn height(&self) -> u64 {
        self.m + self.j * self.p
    }
}

/// The strictly increasing descent indices together with the terminal state
/// and the full trajectory (initial state first, terminal state last).
#[derive(Debug, Clone, Serialize)]
pub struct Signature {
    pub rs: Vec<u64>,
    pub terminal_m: u64,
    pub trajectory: Vec<PairState>,
}

/// The unique `r` with `pq/(r+1) < m+jp < pq/r` (or `r = q` when `j = 0`).
pub fn classify(state: &PairState) -> Result<u64, SignatureError> {
    if state.j == 0 {
        return Ok(state.q);
    }
    let t = state.height();
    let pq = state.p * state.q;
    if pq % t == 0 {
        // Impossible for valid prime p, q; signals corrupted input.
        return Err(SignatureError::Boundary);
    }
    let r = pq / t;
    debug_assert!((1..state.q).contains(&r));
    debug_assert!(pq < t * (r + 1) && t * r < pq);
    Ok(r)
}

/// `psi_r(m, j) = (ceil(rm/p) p - rm, q - jr - ceil(rm/p))`.
///
/// All arithmetic is exact integer quotient/remainder; the identity
/// `m' + j'p = pq - r(m + jp)` holds exactly by construction.
pub fn psi(r: u64, state: &PairState) -> Result<PairState, SignatureError> {
    let actual = classify(state)?;
    if actual != r || r >= state.q {
        return Err(SignatureError::WrongBranch { r, actual });
    }
    let (p, q) = (state.p, state.q);
    let ceil_rm_p = (r * state.m).div_ceil(p);
    let m2 = ceil_rm_p * p - r * state.m;
    let j2 = q - state.j * r - ceil_rm_p;
    let next = PairState {
        p,
        q,
        m: m2,
        j: j2,
    };
    debug_assert_eq!(next.height(), p * q - r * state.height());
    Ok(next)
}

/// Iterates classify/psi until the `j` component reaches 0.
pub fn compute_signature(state: &PairState) -> Result<Signature, SignatureError> {
    let mut rs = Vec::new();
    let mut trajectory = vec![*state];
    let mut current = *state;
    for _ in 0..state.q {
        if current.j == 0 {
            return Ok(Signature {
                rs,
                terminal_m: current.m,
                trajectory,
            });
        }
        let r = classify(&current)?;
        current = psi(r, &current)?;
        rs.push(r);
        trajectory.push(current);
    }
    Err(SignatureError::NonTermination)
}

/// `rm mod p`, as a representative in `[1, p-1]`; equals `p {rm/p}`.
pub fn residue_rep(r: u64, m: u64, p: u64) -> Result<u64, SignatureError> {
    let v = (r * m) % p;
    if v == 0 {
        return Err(SignatureError::DegenerateResidue { r, m, p });
    }
    Ok(v)
}

/// Violation counts for the three mod-p translation relations:
/// (a) `f(p+m) = f(m)` for odd m,
/// (b) `f(2p+m) = f(m)` for `m = p (mod 3)`,
/// (c) `f(2p-m) = f(p-1) f(m)` for `m = 2p (mod 3)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelationsReport {
    pub p: u64,
    pub violations_a: u64,
    pub violations_b: u64,
    pub violations_c: u64,
    pub first_witness: Option<(char, u64)>,
}

impl RelationsReport {
    pub fn total(&self) -> u64 {
        self.violations_a + self.violations_b + self.violations_c
    }
}

pub fn relations_check(f: &SignFunction, p: u64) -> Result<RelationsReport, SignatureError> {
    let mut report = RelationsReport {
        p,
        violations_a: 0,
        violations_b: 0,
        violations_c: 0,
        first_witness: None,
    };
    let f_p1 = f.eval(p - 1)?;
    for m in 1..p {
        if m % 2 == 1 && f.eval(p + m)? != f.eval(m)? {
            report.violations_a += 1;
            report.first_witness.get_or_insert(('a', m));
        }
        if m % 3 == p % 3 && f.eval(2 * p + m)? != f.eval(m)? {
            report.violations_b += 1;
            report.first_witness.get_or_insert(('b', m));
        }
        if m % 3 == (2 * p) % 3 && f.eval(2 * p - m)? != f_p1 * f.eval(m)? {
            report.violations_c += 1;
            report.first_witness.get_or_insert(('c', m));
        }
    }
    Ok(report)
}

/// Counts `m` in `[1, p-1]` with `f(rm mod p) != f(r) f(m)`.
pub fn periodicity_check(f: &SignFunction, p: u64, r: u64) -> Result<u64, SignatureError> {
    let f_r = f.eval(r)?;
    let mut violations = 0u64;
    for m in 1..p {
        if f.eval(residue_rep(r, m, p)?)? != f_r * f.eval(m)? {
            violations += 1;
        }
    }
    Ok(violations)
}

/// Both sides of the telescoped product identity along a signature
/// trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IterationIdentity {
    pub lhs: i8,
    pub rhs: i8,
    pub equal: bool,
}

/// `lhs = f(m) f(m+jp)`; `rhs` is the product of
/// `f(m_i r_{i+1}) f(r_{i+1} m_i mod p)` along the trajectory. Requires
/// `q | m + jp`.
pub fn iteration_identity_check(
    f: &SignFunction,
    state: &PairState,
) -> Result<IterationIdentity, SignatureError> {
    if state.height() % state.q != 0 {
        return Err(SignatureError::CongruenceViolated {
            m: state.m,
            j: state.j,
            q: state.q,
        });
    }
    let sig = compute_signature(state)?;
    let lhs = f.eval(state.m)? * f.eval(state.height())?;
    let mut rhs: i8 = 1;
    for (i, &r) in sig.rs.iter().enumerate() {
        let m_i = sig.trajectory[i].m;
        rhs *= f.eval(m_i * r)?;
        rhs *= f.eval(residue_rep(r, m_i, state.p)?)?;
    }
    Ok(IterationIdentity {
        lhs,
        rhs,
        equal: lhs == rhs,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquivcondReport {
    pub p: u64,
    pub q: u64,
    pub violations: u64,
    pub first_witness: Option<(u64, u64)>,
}

/// Counts pairs `(m, j)` with `q | m + jp` and `f(m) f(m+jp) != +1`.
pub fn equivcond_scan(f: &SignFunction, p: u64, q: u64) -> Result<EquivcondReport, SignatureError> {
    if !is_prime(p) || p % 2 == 0 || !is_prime(q) || q >= p {
        return Err(SignatureError::InvalidState { p, q, m: 0, j: 0 });
    }
    let mut violations = 0u64;
    let mut first_witness = None;
    for m in 1..p {
        for j in 0..q {
            if (m + j * p) % q != 0 {
                continue;
            }
            if f.eval(m)? * f.eval(m + j * p)? != 1 {
                violations += 1;
                first_witness.get_or_insert((m, j));
            }
        }
    }
    Ok(EquivcondReport {
        p,
        q,
        violations,
        first_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ParityTable;

    #[test]
    fn classify_hand_cases() {
        let s = PairState::new(7, 5, 3, 2).unwrap();
        assert_eq!(classify(&s).unwrap(), 2); // 35/3 < 17 < 35/2
        let s = PairState::new(7, 5, 3, 1).unwrap();
        assert_eq!(classify(&s).unwrap(), 3); // 35/4 < 10 < 35/3
        let s = PairState::new(7, 5, 4, 0).unwrap();
        assert_eq!(classify(&s).unwrap(), 5); // j = 0 lands in A_{q,q}
    }

    #[test]
    fn pair_state_validation() {
        assert!(PairState::new(7, 5, 0, 0).is_err());
        assert!(PairState::new(7, 5, 7, 0).is_err());
        assert!(PairState::new(7, 5, 3, 5).is_err());
        assert!(PairState::new(7, 11, 3, 2).is_err()); // q > p
        assert!(PairState::new(9, 5, 3, 2).is_err()); // p composite
    }

    #[test]
    fn psi_hand_cases() {
        let s = PairState::new(7, 5, 3, 2).unwrap();
        let next = psi(2, &s).unwrap();
        assert_eq!((next.m, next.j), (1, 0));
        assert_eq!(next.height(), 35 - 2 * 17);

        let s = PairState::new(7, 5, 3, 1).unwrap();
        let next = psi(3, &s).unwrap();
        assert_eq!((next.m, next.j), (5, 0));
        assert_eq!(next.height(), 35 - 3 * 10);
        // Congruence preserved: 10 = 0 mod 5 and 5 = 0 mod 5.
        assert_eq!(s.height() % 5, 0);
        assert_eq!(next.height() % 5, 0);

        assert!(matches!(
            psi(4, &PairState::new(7, 5, 3, 2).unwrap()),
            Err(SignatureError::WrongBranch { .. })
        ));
    }

    #[test]
    fn signature_hand_cases() {
        let sig = compute_signature(&PairState::new(7, 5, 3, 2).unwrap()).unwrap();
        assert_eq!(sig.rs, vec![2]);
        assert_eq!(sig.terminal_m, 1);
        assert_eq!(sig.trajectory.len(), 2);

        let sig = compute_signature(&PairState::new(7, 5, 3, 1).unwrap()).unwrap();
        assert_eq!(sig.rs, vec![3]);
        assert_eq!(sig.terminal_m, 5);

        let sig = compute_signature(&PairState::new(7, 5, 4, 0).unwrap()).unwrap();
        assert!(sig.rs.is_empty());
        assert_eq!(sig.terminal_m, 4);
    }

    #[test]
    fn descent_invariants_exhaustive() {
        let primes = crate::arith::simple_prime_sieve(97);
        for &p in primes.iter().filter(|&&p| p > 2) {
            for &q in primes.iter().filter(|&&q| q < p) {
                for m in 1..p {
                    for j in 0..q {
                        let s = PairState::new(p, q, m, j).unwrap();
                        let sig = compute_signature(&s).unwrap();
                        // Strictly increasing indices, at most q-1 of them.
                        assert!(sig.rs.windows(2).all(|w| w[0] < w[1]));
                        assert!(sig.rs.len() <= (q - 1) as usize);
                        // Per-step exact identity and range preservation.
                        for (i, &r) in sig.rs.iter().enumerate() {
                            let cur = &sig.trajectory[i];
                            let next = &sig.trajectory[i + 1];
                            assert_eq!(next.height(), p * q - r * cur.height());
                            assert!((1..p).contains(&next.m));
                            assert!(next.j < q);
                            // Congruence preservation mod q.
                            if cur.height() % q == 0 {
                                assert_eq!(next.height() % q, 0);
                            }
                        }
                        assert_eq!(sig.trajectory.last().unwrap().j, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn partition_is_exhaustive_and_disjoint() {
        let primes = crate::arith::simple_prime_sieve(97);
        for &p in primes.iter().filter(|&&p| p > 2) {
            for &q in primes.iter().filter(|&&q| q < p) {
                for m in 1..p {
                    for j in 0..q {
                        let s = PairState::new(p, q, m, j).unwrap();
                        let r = classify(&s).unwrap();
                        let t = s.height();
                        // Membership in exactly one interval.
                        let mut hits = 0;
                        for cand in 1..q {
                            if p * q < t * (cand + 1) && t * cand < p * q {
                                hits += 1;
                                assert_eq!(cand, r);
                            }
                        }
                        if t < p {
                            hits += 1;
                            assert_eq!(r, q);
                        }
                        assert_eq!(hits, 1, "p={p} q={q} m={m} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn residue_rep_cases() {
        assert_eq!(residue_rep(2, 3, 7).unwrap(), 6);
        assert_eq!(residue_rep(3, 3, 7).unwrap(), 2);
        assert_eq!(residue_rep(4, 6, 7).unwrap(), 3);
        assert!(residue_rep(7, 2, 7).is_err());
    }

    #[test]
    fn relations_character_and_lambda() {
        for p in crate::arith::simple_prime_sieve(500).into_iter().skip(1) {
            let chi = SignFunction::quadratic(p).unwrap();
            let rep = relations_check(&chi, p).unwrap();
            assert_eq!(rep.total(), 0, "p = {p}");
        }
        let t = ParityTable::build(25).unwrap();
        let lam = SignFunction::liouville(&t);
        assert_eq!(relations_check(&lam, 5).unwrap().total(), 0);
        assert!(relations_check(&lam, 7).unwrap().total() >= 1);
    }

    #[test]
    fn periodicity_character_and_lambda() {
        for p in crate::arith::simple_prime_sieve(500).into_iter().skip(1) {
            let chi = SignFunction::quadratic(p).unwrap();
            for r in [1u64, 2, p - 1] {
                if r < p {
                    assert_eq!(periodicity_check(&chi, p, r).unwrap(), 0, "p={p} r={r}");
                }
            }
        }
        let t = ParityTable::build(10).unwrap();
        let lam = SignFunction::liouville(&t);
        for r in [2u64, 3, 4] {
            assert_eq!(periodicity_check(&lam, 5, r).unwrap(), 0, "r = {r}");
        }
        assert!(periodicity_check(&lam, 7, 2).unwrap() > 0);
    }

    #[test]
    fn iteration_identity_cases() {
        let t = ParityTable::build(40).unwrap();
        let lam = SignFunction::liouville(&t);

        // p=7, q=5, (3,1): lambda(3) lambda(10) = -1 and the telescoped
        // product lambda(9) lambda(2) = -1 coincide here.
        let s = PairState::new(7, 5, 3, 1).unwrap();
        let id = iteration_identity_check(&lam, &s).unwrap();
        assert_eq!((id.lhs, id.rhs, id.equal), (-1, -1, true));

        // p=7 is non-extremal; (1,1) at q=2 breaks the identity:
        // lhs = lambda(1) lambda(8) = -1 but the product is +1.
        let s = PairState::new(7, 2, 1, 1).unwrap();
        let id = iteration_identity_check(&lam, &s).unwrap();
        assert_eq!((id.lhs, id.rhs, id.equal), (-1, 1, false));

        // Extremal p=5, q=3: identity holds for every qualifying pair.
        for m in 1..5u64 {
            for j in 0..3u64 {
                if (m + 5 * j) % 3 != 0 {
                    continue;
                }
                let s = PairState::new(5, 3, m, j).unwrap();
                let id = iteration_identity_check(&lam, &s).unwrap();
                assert!(id.equal, "m={m} j={j}");
            }
        }

        // Congruence precondition enforced.
        let s = PairState::new(7, 5, 3, 2).unwrap();
        assert!(matches!(
            iteration_identity_check(&lam, &s),
            Err(SignatureError::CongruenceViolated { .. })
        ));
    }

    #[test]
    fn iteration_identity_character_exhaustive() {
        let primes = crate::arith::simple_prime_sieve(97);
        for &p in primes.iter().filter(|&&p| p > 2) {
            let chi = SignFunction::quadratic(p).unwrap();
            for &q in primes.iter().filter(|&&q| q < p) {
                for m in 1..p {
                    for j in 0..q {
                        if (m + j * p) % q != 0 {
                            continue;
                        }
                        let s = PairState::new(p, q, m, j).unwrap();
                        let id = iteration_identity_check(&chi, &s).unwrap();
                        assert!(id.equal && id.lhs == 1, "p={p} q={q} m={m} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn equivcond_cases() {
        let t = ParityTable::build(20).unwrap();
        let lam = SignFunction::liouville(&t);
        assert_eq!(equivcond_scan(&lam, 5, 3).unwrap().violations, 0);
        let rep = equivcond_scan(&lam, 7, 2).unwrap();
        assert!(rep.violations >= 1);
        assert_eq!(rep.first_witness, Some((1, 1))); // lambda(1) lambda(8) = -1

        for p in crate::arith::simple_prime_sieve(97).into_iter().skip(1) {
            let chi = SignFunction::quadratic(p).unwrap();
            for q in crate::arith::simple_prime_sieve(p - 1) {
                assert_eq!(
                    equivcond_scan(&chi, p, q).unwrap().violations,
                    0,
                    "p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn equivcond_matches_dilation_residual() {
        // Zero violations at (p, q) iff the spectrum dilation residual for
        // d = q with s = lambda(q) vanishes.
        let t = ParityTable::build(13 * 11).unwrap();
        let lam = SignFunction::liouville(&t);
        for p in [5u64, 7, 11, 13] {
            let spec = crate::spectrum::spectrum(&lam, p).unwrap();
            for q in crate::arith::simple_prime_sieve(p - 1) {
                let violations = equivcond_scan(&lam, p, q).unwrap().violations;
                let s = t.liouville(q).unwrap();
                let resid = crate::spectrum::dilation_residual(&spec, q, s).unwrap();
                assert_eq!(
                    violations == 0,
                    resid < 1e-9 * p as f64,
                    "p={p} q={q} violations={violations} resid={resid}"
                );
            }
        }
    }
}
