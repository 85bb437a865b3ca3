//! Exact scalars: Laurent polynomials and rational functions in `u` with
//! `u² = v`, the quadratic numbers `a + b√q` used on the Hall side, and a
//! prime-field shadow used for fast rank certificates.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, CoreResult};

pub type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// LaurentPoly

/// `Σ c_e u^e`, stored densely from the lowest exponent. Never holds a zero
/// at either end, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    low: i32,
    c: Vec<Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> Self {
        Self::monomial(r, 0)
    }

    pub fn monomial(r: Rat, e: i32) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: e, c: vec![r] }
    }

    /// `u^e`.
    pub fn u_pow(e: i32) -> Self {
        Self::monomial(Rat::one(), e)
    }

    /// `v^e = u^{2e}`.
    pub fn v_pow(e: i32) -> Self {
        Self::u_pow(2 * e)
    }

    /// Build from `(u-exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rat)>>(terms: I) -> Self {
        let mut acc = Self::zero();
        for (e, r) in terms {
            acc = acc.add(&Self::monomial(r, e));
        }
        acc
    }

    fn from_dense(low: i32, mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        let lead = c.iter().take_while(|x| x.is_zero()).count();
        if lead == c.len() {
            return Self::zero();
        }
        if lead > 0 {
            c.drain(..lead);
        }
        LaurentPoly { low: low + lead as i32, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }

    /// Lowest exponent (0 for the zero polynomial).
    pub fn low(&self) -> i32 {
        self.low
    }

    /// Highest exponent (meaningless for zero).
    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }

    pub fn num_terms(&self) -> usize {
        self.c.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn coeff(&self, e: i32) -> Rat {
        let k = e - self.low;
        if k < 0 || k as usize >= self.c.len() {
            Rat::zero()
        } else {
            self.c[k as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (self.low + k as i32, x))
    }

    /// True when only even powers of `u` occur, i.e. the element lies in ℚ[v^±1].
    pub fn is_even(&self) -> bool {
        self.terms().all(|(e, _)| e % 2 == 0)
    }

    pub fn shift(&self, k: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low + k, c: self.c.clone() }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { low: self.low, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low, c: self.c.iter().map(|x| x * r).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![Rat::zero(); (high - low + 1) as usize];
        for (k, x) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + k] += x;
        }
        for (k, x) in o.c.iter().enumerate() {
            c[(o.low - low) as usize + k] += x;
        }
        Self::from_dense(low, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        Self::from_dense(self.low + o.low, c)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute `u ↦ x` in a ring where `x` is invertible.
    pub fn eval_with<T, F>(&self, upow: F, zero: T, add: impl Fn(T, T) -> T, scal: impl Fn(&Rat, T) -> T) -> T
    where
        F: Fn(i32) -> T,
    {
        let mut acc = zero;
        for (e, r) in self.terms() {
            acc = add(acc, scal(r, upow(e)));
        }
        acc
    }
}

// Dense polynomial helpers (index = exponent, low exponent 0).

fn dense_trim(mut a: Vec<Rat>) -> Vec<Rat> {
    while a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
    a
}

fn dense_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    if r.len() < b.len() {
        return (Vec::new(), dense_trim(r));
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let t = &r[k + db] / lb;
        if !t.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[k + j] -= &t * y;
            }
        }
        q[k] = t;
    }
    r.truncate(db);
    (dense_trim(q), dense_trim(r))
}

fn dense_monic(a: Vec<Rat>) -> Vec<Rat> {
    let lc = a.last().cloned().unwrap();
    a.into_iter().map(|x| x / &lc).collect()
}

fn dense_gcd(a: Vec<Rat>, b: Vec<Rat>) -> Vec<Rat> {
    let (mut a, mut b) = (dense_trim(a), dense_trim(b));
    if a.len() < b.len() {
        core::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let (_, r) = dense_divrem(&a, &b);
        a = b;
        b = if r.is_empty() { r } else { dense_monic(r) };
    }
    if a.is_empty() {
        a
    } else {
        dense_monic(a)
    }
}

// ---------------------------------------------------------------------------
// FieldElem

/// Element of ℚ(u), `u² = v`, kept as a reduced fraction whose denominator is
/// monic with lowest exponent 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for FieldElem {
    fn default() -> Self {
        Self::zero()
    }
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        FieldElem { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(LaurentPoly::constant(rat(n)))
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_poly(LaurentPoly::constant(r))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        FieldElem { num: p, den: LaurentPoly::one() }
    }

    pub fn u() -> Self {
        Self::u_pow(1)
    }

    pub fn v() -> Self {
        Self::v_pow(1)
    }

    pub fn u_pow(e: i32) -> Self {
        Self::from_poly(LaurentPoly::u_pow(e))
    }

    pub fn v_pow(e: i32) -> Self {
        Self::from_poly(LaurentPoly::v_pow(e))
    }

    /// `[n]_v = (v^n − v^{−n})/(v − v^{−1})`.
    pub fn qint(n: i32) -> Self {
        let mut p = LaurentPoly::zero();
        for k in 0..n {
            p = p.add(&LaurentPoly::v_pow(n - 1 - 2 * k));
        }
        Self::from_poly(p)
    }

    /// Build `num/den` and normalize.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> CoreResult<Self> {
        if den.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = (num.shift(-den.low), den.shift(-den.low));
        let (num, den) = if den.c.len() == 1 {
            (num, den)
        } else {
            let g = dense_gcd(num.c.clone(), den.c.clone());
            if g.len() <= 1 {
                (num, den)
            } else {
                let (qn, _) = dense_divrem(&num.c, &g);
                let (qd, _) = dense_divrem(&den.c, &g);
                (LaurentPoly::from_dense(num.low, qn), LaurentPoly::from_dense(0, qd))
            }
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            FieldElem { num, den }
        } else {
            let inv = lc.recip();
            FieldElem { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// Lies in ℚ(v): only even u-powers in the reduced form.
    pub fn in_qv(&self) -> bool {
        self.num.is_even() && self.den.is_even()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return FieldElem { num: self.num.add(&o.num), den: LaurentPoly::one() };
            }
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        if o.den.is_one() {
            return Self::normalized(self.num.add(&o.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return Self::normalized(self.num.mul(&o.den).add(&o.num), o.den.clone());
        }
        Self::normalized(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        FieldElem { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return FieldElem { num: self.num.mul(&o.num), den: LaurentPoly::one() };
        }
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> CoreResult<Self> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Self) -> CoreResult<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: i32) -> CoreResult<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Multiply by `u^k` (cheap: no gcd needed).
    pub fn mul_upow(&self, k: i32) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        FieldElem { num: self.num.shift(k), den: self.den.clone() }
    }

    /// If the element is `c·u^e` with `c` rational, return `(c, e)`.
    pub fn as_monomial(&self) -> Option<(Rat, i32)> {
        if self.den.is_one() && self.num.c.len() == 1 {
            Some((self.num.c[0].clone(), self.num.low))
        } else {
            None
        }
    }

    /// Substitute `v ↦ √q`.
    pub fn specialize(&self, q: u32) -> CoreResult<QuadNum> {
        if !self.in_qv() {
            return Err(CoreError::OddHalfPower);
        }
        let n = eval_sqrtq(&self.num, q);
        let d = eval_sqrtq(&self.den, q);
        if d.is_zero() {
            return Err(CoreError::PoleAtSqrtQ);
        }
        Ok(n.mul(&d.inv().ok_or(CoreError::PoleAtSqrtQ)?))
    }

    /// Reduce into the prime field at `u ↦ A`; `None` if a denominator vanishes.
    pub fn to_fp<const A: u64>(&self) -> Option<Fp<A>> {
        let n = poly_to_fp::<A>(&self.num)?;
        let d = poly_to_fp::<A>(&self.den)?;
        if d.0 == 0 {
            return None;
        }
        Some(n.mul(&d.inv_fp()?))
    }

    pub fn parse(s: &str) -> CoreResult<Self> {
        Parser::new(s).parse_all()
    }
}

fn eval_sqrtq(p: &LaurentPoly, q: u32) -> QuadNum {
    let mut acc = QuadNum::zero(q);
    for (e, r) in p.terms() {
        acc = acc.add(&QuadNum::sqrtq_pow(q, e / 2).scale(r));
    }
    acc
}

/// `√(s)` for `s = c·v^m` with `c` a positive rational square; the root with
/// positive leading coefficient.
pub fn sqrt_unit(s: &FieldElem) -> CoreResult<FieldElem> {
    let (c, e) = s
        .as_monomial()
        .ok_or_else(|| CoreError::NotASquare(s.to_string()))?;
    if c.is_negative() || e % 2 != 0 {
        return Err(CoreError::NotASquare(s.to_string()));
    }
    let rn = c.numer().sqrt();
    let rd = c.denom().sqrt();
    if &(&rn * &rn) != c.numer() || &(&rd * &rd) != c.denom() {
        return Err(CoreError::NotASquare(s.to_string()));
    }
    Ok(FieldElem::from_poly(LaurentPoly::monomial(Rat::new(rn, rd), e / 2)))
}

// ---------------------------------------------------------------------------
// Scalar trait

/// Minimal field interface shared by the exact field and its prime shadows, so
/// the rewriting engine can run in either.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// Multiply by `u^k`.
    fn mul_upow(&self, k: i32) -> Self;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Scalar for FieldElem {
    fn zero() -> Self {
        FieldElem::zero()
    }
    fn one() -> Self {
        FieldElem::one()
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        FieldElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        FieldElem::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        FieldElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        FieldElem::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        FieldElem::inv(self).ok()
    }
    fn from_i64(n: i64) -> Self {
        FieldElem::from_int(n)
    }
    fn mul_upow(&self, k: i32) -> Self {
        FieldElem::mul_upow(self, k)
    }
    fn is_one(&self) -> bool {
        FieldElem::is_one(self)
    }
}

// ---------------------------------------------------------------------------
// Prime field shadow

pub const P61: u64 = (1u64 << 61) - 1;

/// Residue mod `2^61 − 1`, with `u` evaluated at the constant `A`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp<const A: u64>(pub u64);

/// Default evaluation point for rank certificates.
pub type FpA = Fp<1_000_003>;
/// Second independent point, used when the first one is unlucky.
pub type FpB = Fp<7_919_113>;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let p = (a as u128) * (b as u128);
    let lo = (p as u64) & P61;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= P61 {
        s - P61
    } else {
        s
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

impl<const A: u64> Fp<A> {
    pub fn new(x: i64) -> Self {
        let m = x.rem_euclid(P61 as i64) as u64;
        Fp(m)
    }

    fn inv_fp(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(Fp(powmod(self.0, P61 - 2)))
        }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let m = n.mod_floor(&BigInt::from(P61));
        Fp(m.to_u64().unwrap())
    }

    pub fn from_rat(r: &Rat) -> Option<Self> {
        let n = Self::from_bigint(r.numer());
        let d = Self::from_bigint(r.denom());
        Some(n.mul(&d.inv_fp()?))
    }

    pub fn upow(k: i32) -> Self {
        let a = Fp::<A>(A % P61);
        if k >= 0 {
            Fp(powmod(a.0, k as u64))
        } else {
            Fp(powmod(a.inv_fp().unwrap().0, (-k) as u64))
        }
    }
}

fn poly_to_fp<const A: u64>(p: &LaurentPoly) -> Option<Fp<A>> {
    let mut acc = Fp::<A>(0);
    for (e, r) in p.terms() {
        acc = acc.add(&Fp::<A>::from_rat(r)?.mul(&Fp::<A>::upow(e)));
    }
    Some(acc)
}

impl<const A: u64> Scalar for Fp<A> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P61 { s - P61 } else { s })
    }
    fn sub(&self, o: &Self) -> Self {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P61 - o.0 })
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(mulmod(self.0, o.0))
    }
    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { P61 - self.0 })
    }
    fn inv(&self) -> Option<Self> {
        self.inv_fp()
    }
    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }
    fn mul_upow(&self, k: i32) -> Self {
        if k == 0 {
            *self
        } else {
            self.mul(&Self::upow(k))
        }
    }
}

// ---------------------------------------------------------------------------
// QuadNum

/// `a + b√q` with rational `a, b` and a fixed non-square `q`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadNum {
    pub a: Rat,
    pub b: Rat,
    pub q: u32,
}

impl QuadNum {
    pub fn new(a: Rat, b: Rat, q: u32) -> Self {
        QuadNum { a, b, q }
    }

    pub fn zero(q: u32) -> Self {
        QuadNum { a: Rat::zero(), b: Rat::zero(), q }
    }

    pub fn one(q: u32) -> Self {
        Self::from_rat(Rat::one(), q)
    }

    pub fn from_rat(a: Rat, q: u32) -> Self {
        QuadNum { a, b: Rat::zero(), q }
    }

    pub fn from_int(n: i64, q: u32) -> Self {
        Self::from_rat(rat(n), q)
    }

    /// `(√q)^k` for any integer `k`.
    pub fn sqrtq_pow(q: u32, k: i32) -> Self {
        let qq = rat(q as i64);
        let half = k.div_euclid(2);
        let r = k.rem_euclid(2);
        let base = if half >= 0 {
            num_traits::pow(qq.clone(), half as usize)
        } else {
            num_traits::pow(qq.clone().recip(), (-half) as usize)
        };
        if r == 0 {
            QuadNum { a: base, b: Rat::zero(), q }
        } else {
            QuadNum { a: Rat::zero(), b: base, q }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.q, o.q);
        QuadNum { a: &self.a + &o.a, b: &self.b + &o.b, q: self.q }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadNum { a: &self.a - &o.a, b: &self.b - &o.b, q: self.q }
    }

    pub fn neg(&self) -> Self {
        QuadNum { a: -&self.a, b: -&self.b, q: self.q }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuadNum { a: &self.a * r, b: &self.b * r, q: self.q }
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.q, o.q);
        let qq = rat(self.q as i64);
        QuadNum {
            a: &self.a * &o.a + &self.b * &o.b * qq,
            b: &self.a * &o.b + &self.b * &o.a,
            q: self.q,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        let norm = &self.a * &self.a - &self.b * &self.b * rat(self.q as i64);
        if norm.is_zero() {
            return None;
        }
        Some(QuadNum { a: &self.a / &norm, b: -&self.b / &norm, q: self.q })
    }

    pub fn pow(&self, n: i32) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.q);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt({})", self.b, self.q),
            _ => write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q),
        }
    }
}

// ---------------------------------------------------------------------------
// Text form

fn fmt_mono(e: i32) -> String {
    if e % 2 == 0 {
        match e / 2 {
            0 => String::new(),
            1 => "v".to_string(),
            k => alloc::format!("v^{}", k),
        }
    } else if e == 1 {
        "u".to_string()
    } else {
        alloc::format!("u^{}", e)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, r) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let neg = r.is_negative();
            let mag = r.abs();
            let m = fmt_mono(e);
            let body = if m.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                m
            } else {
                alloc::format!("{}*{}", mag, m)
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{}", body)?;
            } else {
                write!(f, " {} {}", if neg { "-" } else { "+" }, body)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, what: &str) -> CoreResult<T> {
        Err(CoreError::Parse(alloc::format!("{} at byte {}", what, self.pos)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn parse_all(mut self) -> CoreResult<FieldElem> {
        let x = self.expr()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(x)
    }

    fn expr(&mut self) -> CoreResult<FieldElem> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> CoreResult<FieldElem> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> CoreResult<FieldElem> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> CoreResult<FieldElem> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let mut neg = false;
            if self.peek() == Some(b'-') {
                neg = true;
                self.pos += 1;
            }
            let n = self.integer()?;
            let n = i32::try_from(n).or_else(|_| self.err("exponent too large"))?;
            return base.pow(if neg { -n } else { n });
        }
        Ok(base)
    }

    fn integer(&mut self) -> CoreResult<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let txt = core::str::from_utf8(&self.s[start..self.pos]).unwrap();
        txt.parse::<i64>().or_else(|_| self.err("integer overflow"))
    }

    fn atom(&mut self) -> CoreResult<FieldElem> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(x)
            }
            Some(b'u') => {
                self.pos += 1;
                Ok(FieldElem::u())
            }
            Some(b'v') => {
                self.pos += 1;
                Ok(FieldElem::v())
            }
            Some(c) if c.is_ascii_digit() => {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let txt = core::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let n: BigInt = txt.parse().or_else(|_| self.err("bad number"))?;
                Ok(FieldElem::from_rat(Rat::from_integer(n)))
            }
            _ => self.err("unexpected token"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElem {
        FieldElem::parse(s).unwrap()
    }

    #[test]
    fn inverse_of_v_minus_vinv() {
        let x = fe("v - v^-1");
        assert!(x.mul(&x.inv().unwrap()).is_one());
        assert!(fe("v").add(&fe("-v")).is_zero());
        assert_eq!(fe("u").mul(&fe("u")), fe("v"));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(FieldElem::zero().inv(), Err(CoreError::DivisionByZero));
    }

    #[test]
    fn normal_form_is_canonical() {
        let a = fe("(v^2 - 1)/(v - v^-1)");
        assert_eq!(a, fe("v"));
        let b = fe("(v^4 - 1)/(2*v^2 + 2)");
        assert_eq!(b, fe("(v^2 - 1)/2"));
        assert!(b.den().is_one());
        let c = fe("1/(3*v^-1 + 3*v)");
        assert_eq!(c.den().low(), 0);
        assert!(c.den().leading_coeff().is_one());
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["-v^-2", "u^3", "v + v^-1", "(u)/(v^2 + 1)", "3/2*v^2 - 1", "0", "1"] {
            let x = fe(s);
            assert_eq!(fe(&x.to_string()), x, "{}", s);
        }
        assert_eq!(fe("-v^-2").to_string(), "-v^-2");
        assert_eq!(fe("u^3").to_string(), "u^3");
    }

    #[test]
    fn specialize_examples() {
        let two = fe("v^2").specialize(2).unwrap();
        assert_eq!(two, QuadNum::from_int(2, 2));
        let m = fe("-1/(v^2-1)").specialize(2).unwrap();
        assert_eq!(m, QuadNum::from_int(-1, 2));
        let h = fe("v/(v^2-1)").specialize(3).unwrap();
        assert_eq!(h, QuadNum::new(Rat::zero(), Rat::new(1.into(), 2.into()), 3));
        assert_eq!(fe("u").specialize(2), Err(CoreError::OddHalfPower));
        assert_eq!(fe("1/(v^2-2)").specialize(2), Err(CoreError::PoleAtSqrtQ));
    }

    #[test]
    fn sqrt_unit_examples() {
        let s = fe("-v^2").mul(&fe("-v^-2"));
        assert!(sqrt_unit(&s).unwrap().is_one());
        assert_eq!(sqrt_unit(&fe("v^2")).unwrap(), fe("v"));
        assert_eq!(sqrt_unit(&fe("v")).unwrap(), fe("u"));
        assert!(matches!(sqrt_unit(&fe("-v^4")), Err(CoreError::NotASquare(_))));
    }

    #[test]
    fn prime_shadow_is_a_homomorphism() {
        let xs = ["v - v^-1", "(u^3 + 2)/(v^2 + 1)", "-v^-2", "7/3*u"];
        for a in xs {
            for b in xs {
                let (x, y) = (fe(a), fe(b));
                let lhs = x.mul(&y).add(&x).to_fp::<1_000_003>().unwrap();
                let (xp, yp) = (x.to_fp::<1_000_003>().unwrap(), y.to_fp::<1_000_003>().unwrap());
                assert_eq!(lhs, xp.mul(&yp).add(&xp));
            }
        }
    }

    #[test]
    fn quadnum_ring() {
        let s = QuadNum::sqrtq_pow(3, 1);
        assert_eq!(s.mul(&s), QuadNum::from_int(3, 3));
        let x = QuadNum::new(rat(2), rat(1), 3);
        assert_eq!(x.mul(&x.inv().unwrap()), QuadNum::one(3));
        assert_eq!(QuadNum::sqrtq_pow(2, -1).mul(&QuadNum::sqrtq_pow(2, 1)), QuadNum::one(2));
    }

    #[test]
    fn qint_values() {
        assert_eq!(FieldElem::qint(2), fe("v + v^-1"));
        assert_eq!(FieldElem::qint(3), fe("v^2 + 1 + v^-2"));
    }
}
