//! Exact arithmetic in embedded real algebraic number fields `Q(θ)`.
//!
//! A [`FieldDescriptor`] fixes a monic irreducible integer polynomial and a
//! rational interval isolating one of its real roots; that root is `θ`. A
//! [`Scalar`] is an element of `Q(θ)` written in the power basis
//! `1, θ, …, θ^{d−1}`. Because the minimal polynomial is irreducible this
//! representation is canonical, so exact equality and the zero test are plain
//! coefficient comparisons; only the *sign* needs the embedding, and it is
//! decided by a rigorous floating-point filter backed by exact interval
//! refinement of `θ`.
//!
//! Elements whose non-constant coefficients vanish are stored as plain
//! rationals ([`Scalar::Rat`]); they mix freely with elements of any field.
//! This is the rational fast path that keeps the tetrahedral and octahedral
//! computations cheap.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly;

/// Exact rational numbers.
pub type Rational = BigRational;

/// Default cap on the degree of a number field.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Errors raised by field construction and scalar arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    /// Division by an exact zero.
    #[error("division by zero")]
    DivisionByZero,
    /// The two operands live in different (non-rational) fields.
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    /// A requested field exceeds the configured degree cap.
    #[error("field degree {degree} exceeds the cap {cap}")]
    DegreeCap {
        /// Degree that would have been required.
        degree: usize,
        /// Configured cap.
        cap: usize,
    },
    /// A field descriptor failed validation.
    #[error("invalid field descriptor: {0}")]
    InvalidField(String),
    /// A value is not representable in the requested field.
    #[error("not representable: {0}")]
    NotRepresentable(String),
    /// Malformed serialized scalar.
    #[error("parse error: {0}")]
    Parse(String),
}

/// One refinement level of the isolating interval: `θ ∈ [lo, hi]` together
/// with enclosures of the powers `θ^0 … θ^{d−1}`.
#[derive(Debug)]
struct Level {
    lo: Rational,
    hi: Rational,
    powers: Vec<(Rational, Rational)>,
}

/// Description of an embedded real number field `Q(θ)`.
#[derive(Debug)]
pub struct FieldDescriptor {
    min_poly: Vec<BigInt>,
    iso: (Rational, Rational),
    label: String,
    /// When `θ = 2cos(2π/m)`, the value of `m`.
    cyclo_order: Option<u64>,
    /// Reduction table: `θ^{d+i}` in the power basis, for `i < d − 1`.
    /// Integral because the minimal polynomial is monic.
    reduce: Vec<Vec<BigInt>>,
    /// Powers of `θ` rounded to `f64`, for the sign filter.
    powers_f64: Vec<f64>,
    levels: RwLock<Vec<Arc<Level>>>,
}

/// Shared handle to a field descriptor.
pub type Field = Arc<FieldDescriptor>;

impl FieldDescriptor {
    /// Build and validate a descriptor.
    ///
    /// `min_poly` must be monic with ascending coefficients and must have
    /// exactly one real root in `(iso.0, iso.1)`; both conditions are
    /// checked (the root count with a Sturm sequence). Irreducibility is the
    /// caller's responsibility.
    pub fn new(
        min_poly: Vec<BigInt>,
        iso: (Rational, Rational),
        label: impl Into<String>,
    ) -> Result<Field, ScalarError> {
        Self::build(min_poly, iso, label.into(), None)
    }

    fn build(
        mut min_poly: Vec<BigInt>,
        iso: (Rational, Rational),
        label: String,
        cyclo_order: Option<u64>,
    ) -> Result<Field, ScalarError> {
        poly::trim(&mut min_poly);
        if min_poly.len() < 2 {
            return Err(ScalarError::InvalidField("constant minimal polynomial".into()));
        }
        if !min_poly.last().unwrap().is_one() {
            return Err(ScalarError::InvalidField("minimal polynomial must be monic".into()));
        }
        if iso.0 >= iso.1 {
            return Err(ScalarError::InvalidField("empty isolating interval".into()));
        }
        let d = min_poly.len() - 1;
        let fa = poly::eval_int_at(&min_poly, &iso.0);
        let fb = poly::eval_int_at(&min_poly, &iso.1);
        if fa.is_zero() || fb.is_zero() || fa.signum() == fb.signum() {
            return Err(ScalarError::InvalidField(format!(
                "{label}: no sign change on the isolating interval"
            )));
        }
        if poly::sturm_count(&min_poly, &iso.0, &iso.1) != 1 {
            return Err(ScalarError::InvalidField(format!(
                "{label}: isolating interval does not contain exactly one root"
            )));
        }
        // θ^{d+i} = −Σ_j m_j θ^{j+i} reduced recursively.
        let mut reduce: Vec<Vec<BigInt>> = Vec::new();
        if d >= 2 {
            let mut cur: Vec<BigInt> = min_poly[..d].iter().map(|c| -c).collect();
            reduce.push(cur.clone());
            for _ in 1..(d - 1) {
                // multiply by θ: shift up, reduce the overflow θ^d.
                let top = cur[d - 1].clone();
                let mut next = vec![BigInt::zero(); d];
                for i in (1..d).rev() {
                    next[i] = cur[i - 1].clone();
                }
                if !top.is_zero() {
                    for (i, r) in reduce[0].iter().enumerate() {
                        next[i] += &top * r;
                    }
                }
                cur = next;
                reduce.push(cur.clone());
            }
        }
        let field = FieldDescriptor {
            min_poly,
            iso,
            label,
            cyclo_order,
            reduce,
            powers_f64: Vec::new(),
            levels: RwLock::new(Vec::new()),
        };
        // f64 powers from a 128-bit accurate enclosure.
        let lvl = field.level(2);
        let powers_f64 = lvl
            .powers
            .iter()
            .map(|(lo, hi)| ((lo + hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN))
            .collect();
        Ok(Arc::new(FieldDescriptor { powers_f64, ..field }))
    }

    /// Degree `[Q(θ) : Q]`.
    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    /// Minimal polynomial, ascending integer coefficients.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// The isolating interval given at construction.
    pub fn iso_interval(&self) -> &(Rational, Rational) {
        &self.iso
    }

    /// Human-readable tag.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// `Some(m)` when the generator is `2cos(2π/m)`.
    pub fn cyclo_order(&self) -> Option<u64> {
        self.cyclo_order
    }

    /// True for the rational field (any degree-one descriptor).
    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// Structural equality of descriptors (same polynomial and same root).
    pub fn same_as(&self, other: &FieldDescriptor) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        self.min_poly == other.min_poly && {
            // Same root iff the isolating intervals overlap and each contains
            // exactly one root; overlap of the two intervals suffices because
            // both are isolating for the same polynomial.
            let lo = std::cmp::max(&self.iso.0, &other.iso.0);
            let hi = std::cmp::min(&self.iso.1, &other.iso.1);
            lo < hi
        }
    }

    /// The generator `θ` as a scalar.
    pub fn theta(self: &Arc<Self>) -> Scalar {
        if self.is_rational() {
            return Scalar::Rat(-Rational::from_integer(self.min_poly[0].clone()));
        }
        let mut c = vec![Rational::zero(); self.degree()];
        c[1] = Rational::one();
        Scalar::from_coeffs(self, c)
    }

    /// Interval enclosure of `θ` refined by `32·2^k` bisection steps together
    /// with enclosures of its powers.
    fn level(&self, k: usize) -> Arc<Level> {
        if let Some(l) = self.levels.read().unwrap().get(k) {
            return l.clone();
        }
        let mut levels = self.levels.write().unwrap();
        while levels.len() <= k {
            let (mut lo, mut hi) = match levels.last() {
                Some(l) => (l.lo.clone(), l.hi.clone()),
                None => self.iso.clone(),
            };
            let steps = 32usize << levels.len().min(12);
            let flo_sign = poly::eval_int_at(&self.min_poly, &lo).signum();
            let two = Rational::from_integer(2.into());
            for _ in 0..steps {
                let mid = (&lo + &hi) / &two;
                let fm = poly::eval_int_at(&self.min_poly, &mid);
                if fm.is_zero() {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if fm.signum() == flo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let d = self.degree();
            let mut powers = Vec::with_capacity(d);
            powers.push((Rational::one(), Rational::one()));
            for i in 1..d {
                let (plo, phi): &(Rational, Rational) = &powers[i - 1];
                let cands = [plo * &lo, plo * &hi, phi * &lo, phi * &hi];
                let mn = cands.iter().min().unwrap().clone();
                let mx = cands.iter().max().unwrap().clone();
                powers.push((mn, mx));
            }
            levels.push(Arc::new(Level { lo, hi, powers }));
        }
        levels[k].clone()
    }

    fn check_cap(degree: usize, cap: usize) -> Result<(), ScalarError> {
        if degree > cap {
            Err(ScalarError::DegreeCap { degree, cap })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// The rational field `Q` (generator `θ = 0`, minimal polynomial `x`).
pub fn field_rationals() -> Field {
    static Q: std::sync::OnceLock<Field> = std::sync::OnceLock::new();
    Q.get_or_init(|| {
        FieldDescriptor::build(
            vec![BigInt::zero(), BigInt::one()],
            (Rational::from_integer((-1).into()), Rational::from_integer(1.into())),
            "Q".into(),
            None,
        )
        .expect("rational field")
    })
    .clone()
}

/// The golden field `Q(Φ)` with minimal polynomial `x² − x − 1` and isolating
/// interval `(1, 2)`.
pub fn field_golden() -> Field {
    static G: std::sync::OnceLock<Field> = std::sync::OnceLock::new();
    G.get_or_init(|| {
        FieldDescriptor::build(
            vec![BigInt::from(-1), BigInt::from(-1), BigInt::one()],
            (Rational::from_integer(1.into()), Rational::from_integer(2.into())),
            "Q(phi)".into(),
            None,
        )
        .expect("golden field")
    })
    .clone()
}

/// `Q(2cos(2π/m))` with the default degree cap.
pub fn field_2cos(m: u64) -> Result<Field, ScalarError> {
    field_2cos_capped(m, DEFAULT_DEGREE_CAP)
}

/// `Q(2cos(2π/m))`, erroring when its degree `φ(m)/2` exceeds `cap`.
///
/// Fields are memoized per `m` so that repeated requests share one
/// descriptor (and its refinement cache).
pub fn field_2cos_capped(m: u64, cap: usize) -> Result<Field, ScalarError> {
    assert!(m >= 1, "m must be positive");
    let degree = if m <= 2 { 1 } else { (poly::totient(m) / 2) as usize };
    FieldDescriptor::check_cap(degree, cap)?;
    static CACHE: std::sync::OnceLock<std::sync::Mutex<std::collections::HashMap<u64, Field>>> =
        std::sync::OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&m) {
        return Ok(f.clone());
    }
    let min_poly = poly::min_poly_2cos(m);
    debug_assert_eq!(min_poly.len() - 1, degree);
    let approx = 2.0 * (2.0 * std::f64::consts::PI / m as f64).cos();
    let scale = 1i64 << 24;
    let lo = Rational::new(BigInt::from((approx * scale as f64).floor() as i64 - 2), BigInt::from(scale));
    let hi = Rational::new(BigInt::from((approx * scale as f64).ceil() as i64 + 2), BigInt::from(scale));
    let field = FieldDescriptor::build(min_poly, (lo, hi), format!("Q(2cos(2pi/{m}))"), Some(m))?;
    cache.lock().unwrap().insert(m, field.clone());
    Ok(field)
}

/// Field containing `cos(2π/n)` and `sin(2π/n)`: `Q(2cos(2π/(4n)))`, using
/// `sin(2π/n) = cos(2π(n−4)/(4n))`.
pub fn field_for_angle(n: u64) -> Result<Field, ScalarError> {
    field_for_angle_capped(n, DEFAULT_DEGREE_CAP)
}

/// [`field_for_angle`] with an explicit degree cap.
pub fn field_for_angle_capped(n: u64, cap: usize) -> Result<Field, ScalarError> {
    assert!(n >= 1, "n must be positive");
    field_2cos_capped(4 * n, cap)
}

/// The smallest cyclotomic real field containing both `cos(2π/n)` and
/// `sin(2π/n)`: `Q(2cos(2π/lcm(n,4)))`. Its degree is never larger than that
/// of [`field_for_angle`], and often much smaller (e.g. `Q(√2)` for `n = 8`).
pub fn field_for_rotation(n: u64) -> Result<Field, ScalarError> {
    assert!(n >= 1, "n must be positive");
    let m = n.lcm(&4);
    if m == 4 {
        return Ok(field_rationals());
    }
    field_2cos(m)
}

/// `(cos(2πk/n), sin(2πk/n))` inside `field`, which must be `Q(2cos(2π/m))`
/// with `n | m` and `4 | m` (or the rational field when the values are
/// rational).
pub fn cos_sin(field: &Field, k: i64, n: u64) -> Result<(Scalar, Scalar), ScalarError> {
    let n_i = n as i64;
    let k = k.rem_euclid(n_i);
    // Rational cases first.
    let quarter = |j: i64| -> (i64, i64) {
        match j.rem_euclid(4) {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    };
    if (4 * k) % n_i == 0 {
        let (c, s) = quarter(4 * k / n_i);
        return Ok((Scalar::from_int(c), Scalar::from_int(s)));
    }
    let m = field.cyclo_order().ok_or_else(|| {
        ScalarError::NotRepresentable(format!("cos(2pi*{k}/{n}) in {}", field.label()))
    })?;
    if m % n != 0 || m % 4 != 0 {
        return Err(ScalarError::NotRepresentable(format!(
            "cos(2pi*{k}/{n}) in {}",
            field.label()
        )));
    }
    let step = (m / n) as i64 * k;
    let m_i = m as i64;
    let c = half_cheb(field, step, m_i);
    let s = half_cheb(field, step - m_i / 4, m_i);
    Ok((c, s))
}

/// `cos(2πj/m)` as `T_j(θ)/2` where `θ = 2cos(2π/m)`.
fn half_cheb(field: &Field, j: i64, m: i64) -> Scalar {
    let mut j = j.rem_euclid(m);
    if j > m / 2 {
        j = m - j;
    }
    let theta = field.theta();
    let mut t0 = Scalar::from_int(2);
    if j == 0 {
        return Scalar::one();
    }
    let mut t1 = theta.clone();
    for _ in 1..j {
        let t2 = &(&theta * &t1) - &t0;
        t0 = t1;
        t1 = t2;
    }
    &t1 / &Scalar::from_int(2)
}

/// An element of an embedded real number field.
#[derive(Clone)]
pub enum Scalar {
    /// A rational number (belongs to every field).
    Rat(Rational),
    /// A genuinely irrational element: power-basis coefficients in its field.
    /// Invariant: at least one non-constant coefficient is nonzero.
    Alg(Field, Box<[Rational]>),
}

impl Scalar {
    /// Zero.
    pub fn zero() -> Scalar {
        Scalar::Rat(Rational::zero())
    }

    /// One.
    pub fn one() -> Scalar {
        Scalar::Rat(Rational::one())
    }

    /// Embed an integer.
    pub fn from_int(v: i64) -> Scalar {
        Scalar::Rat(Rational::from_integer(v.into()))
    }

    /// Embed the rational `p/q`.
    pub fn frac(p: i64, q: i64) -> Scalar {
        Scalar::Rat(Rational::new(p.into(), q.into()))
    }

    /// Embed a rational.
    pub fn from_rational(r: Rational) -> Scalar {
        Scalar::Rat(r)
    }

    /// Build from power-basis coefficients (normalizing to [`Scalar::Rat`]
    /// when the value is rational).
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<Rational>) -> Scalar {
        let d = field.degree();
        assert!(coeffs.len() <= d, "too many coefficients for {}", field.label());
        coeffs.resize(d, Rational::zero());
        if d == 1 || coeffs[1..].iter().all(Zero::is_zero) {
            return Scalar::Rat(coeffs.swap_remove(0));
        }
        Scalar::Alg(field.clone(), coeffs.into_boxed_slice())
    }

    /// Power-basis coefficients in `field` (length = degree).
    pub fn coeffs_in(&self, field: &Field) -> Result<Vec<Rational>, ScalarError> {
        let d = field.degree();
        match self {
            Scalar::Rat(r) => {
                let mut v = vec![Rational::zero(); d];
                v[0] = r.clone();
                Ok(v)
            }
            Scalar::Alg(f, c) => {
                if f.same_as(field) {
                    Ok(c.to_vec())
                } else {
                    Err(ScalarError::FieldMismatch(f.label().into(), field.label().into()))
                }
            }
        }
    }

    /// The field this element forces (`None` for rationals).
    pub fn field(&self) -> Option<&Field> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Alg(f, _) => Some(f),
        }
    }

    /// True for exact zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    /// The rational value, if rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Alg(..) => None,
        }
    }

    fn common_field<'a>(a: &'a Scalar, b: &'a Scalar) -> Result<Option<&'a Field>, ScalarError> {
        match (a, b) {
            (Scalar::Alg(f, _), Scalar::Alg(g, _)) => {
                if f.same_as(g) {
                    Ok(Some(f))
                } else {
                    Err(ScalarError::FieldMismatch(f.label().into(), g.label().into()))
                }
            }
            (Scalar::Alg(f, _), _) | (_, Scalar::Alg(f, _)) => Ok(Some(f)),
            _ => Ok(None),
        }
    }

    /// Exact sum.
    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Alg(f, a), Scalar::Rat(b)) | (Scalar::Rat(b), Scalar::Alg(f, a)) => {
                let mut c = a.to_vec();
                c[0] += b;
                Ok(Scalar::Alg(f.clone(), c.into_boxed_slice()))
            }
            (Scalar::Alg(..), Scalar::Alg(..)) => {
                let f = Self::common_field(self, other)?.unwrap().clone();
                let (Scalar::Alg(_, a), Scalar::Alg(_, b)) = (self, other) else { unreachable!() };
                let c: Vec<Rational> = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                Ok(Scalar::from_coeffs(&f, c))
            }
        }
    }

    /// Exact difference.
    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.checked_add(&-other)
    }

    /// Exact product.
    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Alg(f, a), Scalar::Rat(b)) | (Scalar::Rat(b), Scalar::Alg(f, a)) => {
                if b.is_zero() {
                    return Ok(Scalar::zero());
                }
                let c: Vec<Rational> = a.iter().map(|x| x * b).collect();
                Ok(Scalar::Alg(f.clone(), c.into_boxed_slice()))
            }
            (Scalar::Alg(..), Scalar::Alg(..)) => {
                let f = Self::common_field(self, other)?.unwrap().clone();
                let (Scalar::Alg(_, a), Scalar::Alg(_, b)) = (self, other) else { unreachable!() };
                Ok(Scalar::from_coeffs(&f, mul_reduce(&f, a, b)))
            }
        }
    }

    /// Multiplicative inverse.
    pub fn checked_inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(ScalarError::DivisionByZero)
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Alg(f, a) => Ok(Scalar::from_coeffs(f, inverse(f, a))),
        }
    }

    /// Exact quotient.
    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if let Scalar::Rat(b) = other {
            if b.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            return match self {
                Scalar::Rat(a) => Ok(Scalar::Rat(a / b)),
                Scalar::Alg(f, a) => Ok(Scalar::Alg(f.clone(), a.iter().map(|x| x / b).collect())),
            };
        }
        Self::common_field(self, other)?;
        self.checked_mul(&other.checked_inv()?)
    }

    /// Exact sign of the real embedding: −1, 0 or +1.
    pub fn sign(&self) -> i32 {
        match self {
            Scalar::Rat(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Scalar::Alg(f, c) => alg_sign(f, c),
        }
    }

    /// Absolute value.
    pub fn abs(&self) -> Scalar {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// A rational interval `[lo, hi]` of width at most `eps` containing the
    /// value.
    pub fn approx(&self, eps: &Rational) -> (Rational, Rational) {
        assert!(eps.is_positive(), "eps must be positive");
        match self {
            Scalar::Rat(r) => (r.clone(), r.clone()),
            Scalar::Alg(f, c) => {
                let mut k = 0;
                loop {
                    let (lo, hi) = eval_interval(&f.level(k), c);
                    if &(&hi - &lo) <= eps {
                        return (lo, hi);
                    }
                    k += 1;
                }
            }
        }
    }

    /// Floating-point approximation (for diagnostics and OFF output only).
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.approx(&Rational::new(1.into(), BigInt::from(1u64) << 60));
        ((lo + hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` fractional digits, rounded from an
    /// exact enclosure (no floating point involved).
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten = BigInt::from(10);
        let scale = num_traits::pow(ten, digits);
        let eps = Rational::new(1.into(), &scale * BigInt::from(100));
        let (lo, hi) = self.approx(&eps);
        let mid = (lo + hi) / Rational::from_integer(2.into());
        let scaled = mid * Rational::from_integer(scale.clone());
        let rounded = scaled.round().to_integer();
        let neg = rounded.is_negative();
        let mag = rounded.abs();
        let (int_part, frac_part) = mag.div_rem(&scale);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int_part.to_string());
        if digits > 0 {
            let frac = frac_part.to_string();
            s.push('.');
            for _ in frac.len()..digits {
                s.push('0');
            }
            s.push_str(&frac);
        }
        s
    }

    /// Serialize as `{"field": label, "coeffs": ["p/q", ...]}`.
    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        let coeffs = self
            .coeffs_in(field)
            .expect("scalar not in the given field")
            .iter()
            .map(|c| serde_json::Value::String(c.to_string()))
            .collect();
        serde_json::json!({ "field": field.label(), "coeffs": serde_json::Value::Array(coeffs) })
    }

    /// Parse the format written by [`Scalar::to_json`] against a known field.
    pub fn from_json(v: &serde_json::Value, field: &Field) -> Result<Scalar, ScalarError> {
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| ScalarError::Parse("missing coeffs".into()))?;
        if coeffs.len() != field.degree() {
            return Err(ScalarError::Parse("coefficient count differs from field degree".into()));
        }
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let s = c.as_str().ok_or_else(|| ScalarError::Parse("coefficient not a string".into()))?;
            out.push(parse_rational(s)?);
        }
        Ok(Scalar::from_coeffs(field, out))
    }
}

/// Parse `"p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let s = s.trim();
    let bad = || ScalarError::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Serialize a field descriptor as `{"min_poly": [...], "iso": [a, b]}`.
pub fn field_to_json(field: &Field) -> serde_json::Value {
    serde_json::json!({
        "label": field.label(),
        "min_poly": field.min_poly().iter().map(|c| serde_json::Value::String(c.to_string())).collect::<Vec<_>>(),
        "iso": [field.iso_interval().0.to_string(), field.iso_interval().1.to_string()],
    })
}

/// Parse the format written by [`field_to_json`].
pub fn field_from_json(v: &serde_json::Value) -> Result<Field, ScalarError> {
    let label = v.get("label").and_then(|l| l.as_str()).unwrap_or("Q(theta)");
    if label == "Q" {
        return Ok(field_rationals());
    }
    if label == "Q(phi)" {
        return Ok(field_golden());
    }
    if let Some(m) = label.strip_prefix("Q(2cos(2pi/").and_then(|r| r.strip_suffix("))")) {
        if let Ok(m) = m.parse::<u64>() {
            return field_2cos(m);
        }
    }
    let mp = v
        .get("min_poly")
        .and_then(|m| m.as_array())
        .ok_or_else(|| ScalarError::Parse("missing min_poly".into()))?
        .iter()
        .map(|c| match c {
            serde_json::Value::String(s) => s.parse::<BigInt>().map_err(|_| ScalarError::Parse(s.clone())),
            serde_json::Value::Number(n) => Ok(BigInt::from(n.as_i64().unwrap_or(0))),
            _ => Err(ScalarError::Parse("bad coefficient".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let iso = v
        .get("iso")
        .and_then(|m| m.as_array())
        .ok_or_else(|| ScalarError::Parse("missing iso".into()))?;
    if iso.len() != 2 {
        return Err(ScalarError::Parse("iso must have two entries".into()));
    }
    let a = parse_rational(iso[0].as_str().unwrap_or_default())?;
    let b = parse_rational(iso[1].as_str().unwrap_or_default())?;
    FieldDescriptor::new(mp, (a, b), label)
}

/// Clear denominators: `a = nums / den` with `den` the lcm of the
/// coefficient denominators.
fn to_ints(a: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = a.iter().fold(BigInt::one(), |l, x| if x.denom().is_one() { l } else { l.lcm(x.denom()) });
    let nums = a
        .iter()
        .map(|x| if x.denom() == &den { x.numer().clone() } else { x.numer() * (&den / x.denom()) })
        .collect();
    (nums, den)
}

/// Product of two integer coefficient vectors, reduced modulo the minimal
/// polynomial (exact because the reduction table is integral).
fn mul_reduce_int(f: &FieldDescriptor, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = f.degree();
    let mut prod = vec![BigInt::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    let high = prod.split_off(d);
    for (i, c) in high.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (j, r) in f.reduce[i].iter().enumerate() {
            if !r.is_zero() {
                prod[j] += c * r;
            }
        }
    }
    prod
}

fn mul_reduce(f: &FieldDescriptor, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (an, ad) = to_ints(a);
    let (bn, bd) = to_ints(b);
    let den = ad * bd;
    mul_reduce_int(f, &an, &bn).into_iter().map(|n| Rational::new(n, den.clone())).collect()
}

/// Inverse by fraction-free Gauss–Jordan elimination on the integer
/// multiplication-by-`a` matrix.
fn inverse(f: &FieldDescriptor, a: &[Rational]) -> Vec<Rational> {
    let d = f.degree();
    let (an, ad) = to_ints(a);
    // Column j of M is a·θ^j (scaled to integers); augmented with e_0.
    let cols: Vec<Vec<BigInt>> = (0..d)
        .map(|j| {
            let mut e = vec![BigInt::zero(); d];
            e[j] = BigInt::one();
            mul_reduce_int(f, &an, &e)
        })
        .collect();
    let mut m: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            let mut row: Vec<BigInt> = (0..d).map(|j| cols[j][i].clone()).collect();
            row.push(if i == 0 { BigInt::one() } else { BigInt::zero() });
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..d {
        let piv = (k..d).find(|&r| !m[r][k].is_zero()).expect("nonzero element is invertible");
        m.swap(k, piv);
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                let t = &pivot_row[k] * &*v - &factor * p;
                debug_assert!((&t % &prev).is_zero());
                *v = t / &prev;
            }
        }
        prev = pivot_row[k].clone();
    }
    // Every diagonal entry now equals the (signed) determinant.
    m.into_iter().enumerate().map(|(i, row)| Rational::new(&row[d] * &ad, row[i].clone())).collect()
}

fn eval_interval(level: &Level, c: &[Rational]) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (ci, (plo, phi)) in c.iter().zip(level.powers.iter()) {
        if ci.is_zero() {
            continue;
        }
        if ci.is_positive() {
            lo += ci * plo;
            hi += ci * phi;
        } else {
            lo += ci * phi;
            hi += ci * plo;
        }
    }
    (lo, hi)
}

/// Sign of a nonzero algebraic element.
fn alg_sign(f: &FieldDescriptor, c: &[Rational]) -> i32 {
    // Floating-point filter with a conservative forward-error bound.
    let mut sum = 0.0f64;
    let mut mag = 0.0f64;
    let mut ok = true;
    for (ci, p) in c.iter().zip(f.powers_f64.iter()) {
        if ci.is_zero() {
            continue;
        }
        let cf = ci.to_f64().unwrap_or(f64::NAN);
        if !cf.is_finite() || cf.abs() < 1e-280 || cf.abs() > 1e280 || !p.is_finite() {
            ok = false;
            break;
        }
        let t = cf * p;
        sum += t;
        mag += t.abs();
    }
    if ok {
        let bound = mag * (2.0 * c.len() as f64 + 16.0) * f64::EPSILON;
        if sum > bound {
            return 1;
        }
        if sum < -bound {
            return -1;
        }
    }
    // Exact interval refinement; terminates because the element is nonzero
    // (canonical representation) and the enclosures shrink to θ.
    let mut k = 0;
    loop {
        let (lo, hi) = eval_interval(&f.level(k), c);
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        k += 1;
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            (Scalar::Alg(f, a), Scalar::Alg(g, b)) => f.same_as(g) && a == b,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rat(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Scalar::Alg(_, c) => {
                1u8.hash(state);
                c.hash(state);
            }
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) {
            return a.cmp(b);
        }
        (self - other).sign().cmp(&0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Alg(_, c) => {
                let mut first = true;
                for (i, ci) in c.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    match i {
                        0 => write!(f, "{ci}")?,
                        1 => write!(f, "({ci})t")?,
                        _ => write!(f, "({ci})t^{i}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Alg(f, c) => Scalar::Alg(f.clone(), c.iter().map(|x| -x).collect()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (&mut *self, rhs) {
            *a += b;
            return;
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (&mut *self, rhs) {
            *a -= b;
            return;
        }
        *self = &*self - rhs;
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_int(v)
    }
}

impl From<Rational> for Scalar {
    fn from(v: Rational) -> Scalar {
        Scalar::Rat(v)
    }
}
