//! Small dense univariate polynomial helpers used to derive and certify the
//! minimal polynomials of the number fields.
//!
//! Polynomials are stored with ascending coefficients (`p[i]` is the
//! coefficient of `x^i`) and are kept trimmed: no trailing zero coefficients,
//! the zero polynomial is the empty vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Remove trailing zero coefficients.
pub(crate) fn trim<T: Zero>(p: &mut Vec<T>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Product of two integer polynomials.
pub(crate) fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Exact quotient of integer polynomials where the divisor is monic.
///
/// Panics if the division leaves a remainder; callers only divide when the
/// divisor is known to be a factor.
pub(crate) fn div_exact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    if rem.len() < den.len() {
        assert!(rem.iter().all(Zero::is_zero), "non-exact polynomial division");
        return Vec::new();
    }
    let mut quo = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quo[i] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "non-exact polynomial division");
    trim(&mut quo);
    quo
}

/// Möbius function by trial division.
pub(crate) fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Euler's totient.
pub(crate) fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// The cyclotomic polynomial `Φ_m` via the Möbius product
/// `Φ_m(x) = Π_{d | m} (x^d − 1)^{μ(m/d)}`.
pub(crate) fn cyclotomic(m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    let mut den: Vec<BigInt> = vec![BigInt::one()];
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mut f = vec![BigInt::zero(); d as usize + 1];
        f[0] = BigInt::from(-1);
        f[d as usize] = BigInt::one();
        match mobius(m / d) {
            1 => num = mul_int(&num, &f),
            -1 => den = mul_int(&den, &f),
            _ => {}
        }
    }
    div_exact_monic(&num, &den)
}

/// Minimal polynomial of `2cos(2π/m)` obtained from `Φ_m` by the substitution
/// `y = x + 1/x`.
///
/// For `m ≥ 3` the cyclotomic polynomial is palindromic of degree `2h`, so
/// `x^{-h} Φ_m(x) = a_h + Σ_{k ≥ 1} a_{h+k} (x^k + x^{-k})`, and
/// `x^k + x^{-k} = T_k(y)` with `T_0 = 2`, `T_1 = y`, `T_{k+1} = y T_k − T_{k−1}`.
pub(crate) fn min_poly_2cos(m: u64) -> Vec<BigInt> {
    match m {
        1 => return vec![BigInt::from(-2), BigInt::one()],
        2 => return vec![BigInt::from(2), BigInt::one()],
        _ => {}
    }
    let phi = cyclotomic(m);
    let h = (phi.len() - 1) / 2;
    // Chebyshev-like polynomials T_k(y) with integer coefficients.
    let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
    for k in 2..=h {
        let mut next = vec![BigInt::zero(); k + 1];
        for (i, c) in t[k - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in t[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        trim(&mut next);
        t.push(next);
    }
    let mut out = vec![BigInt::zero(); h + 1];
    out[0] += &phi[h];
    for k in 1..=h {
        let a = &phi[h + k];
        for (i, c) in t[k].iter().enumerate() {
            out[i] += a * c;
        }
    }
    trim(&mut out);
    out
}

/// Evaluate an integer polynomial at a rational point.
pub(crate) fn eval_int_at(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

fn to_rat(p: &[BigInt]) -> Vec<BigRational> {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn eval_rat(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut out);
    out
}

fn rem_rat(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = &r[top] / lead;
        let shift = top - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn sign_changes(seq: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut prev = 0i32;
    let mut count = 0;
    for p in seq {
        let v = eval_rat(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
    }
    count
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`,
/// counted with a Sturm sequence.
pub(crate) fn sturm_count(p: &[BigInt], a: &BigRational, b: &BigRational) -> usize {
    let p0 = to_rat(p);
    let p1 = derivative(&p0);
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let mut r = rem_rat(&seq[n - 2], &seq[n - 1]);
        for c in &mut r {
            *c = -c.clone();
        }
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    sign_changes(&seq, a) - sign_changes(&seq, b)
}
