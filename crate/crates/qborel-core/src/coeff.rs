//! Exact arithmetic in the coefficient field `K = Q(q, p12)`.
//!
//! Scalars are fractions of integer Laurent polynomials in the two
//! parameters `q` and `p12`. The remaining quantization parameters are
//! eliminated at construction time via `p11 = q^3`, `p22 = q` and
//! `p21 = q^-3 p12^-1`, so two generators suffice.
//!
//! Fractions are *not* kept in lowest terms; equality is decided by
//! cross-multiplication. A cheap normalization pass (integer content and
//! common monomial factors) bounds growth without multivariate GCDs.
//!
//! An optional [`CyclotomicContext`] specializes `q` to a primitive `t`-th
//! root of unity (`t > 4`, `t != 6`): Laurent exponents of `q` fold modulo
//! `t` and numerators/denominators reduce modulo the `t`-th cyclotomic
//! polynomial, which keeps representatives canonical, so a zero test is
//! still a syntactic check. `p12` stays transcendental.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors surfaced by coefficient arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("division by zero coefficient")]
    DivisionByZero,
    #[error("denominator vanishes in the cyclotomic quotient")]
    VanishingDenominator,
    #[error("cyclotomic order {0} not allowed: need t > 4 and t != 6")]
    BadCyclotomicOrder(u32),
    #[error("denominator vanishes at the sample point; resample")]
    Resample,
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("mixed cyclotomic contexts (orders {0} and {1})")]
    ContextMismatch(u32, u32),
}

/// Integer Laurent polynomial in `q` and `p12`.
///
/// Terms map exponent pairs `(e_q, e_p)` to nonzero integers; the map never
/// stores a zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0, 0)
    }

    pub fn monomial(coeff: BigInt, e_q: i64, e_p: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((e_q, e_p), coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(BigInt::from(n), 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    /// True when the polynomial is the constant 1.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&(0, 0))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    fn insert_term(&mut self, key: (i64, i64), value: BigInt) {
        if value.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += value;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.insert_term(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.insert_term(*k, -v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for ((aq, ap), ac) in &self.terms {
            for ((bq, bp), bc) in &rhs.terms {
                out.insert_term((aq + bq, ap + bp), ac * bc);
            }
        }
        out
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * n)).collect(),
        }
    }

    /// GCD of the integer coefficients (positive; 0 for the zero poly).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide every coefficient by `d` (must divide exactly).
    pub fn div_int_exact(&self, d: &BigInt) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v / d)).collect(),
        }
    }

    /// Componentwise minimum of the exponent pairs.
    pub fn min_exponents(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |(mq, mp), &(eq, ep)| (mq.min(eq), mp.min(ep))))
    }

    /// Multiply by the monomial `q^dq * p12^dp` (a unit).
    pub fn shift_exponents(&self, dq: i64, dp: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|((eq, ep), v)| ((eq + dq, ep + dp), v.clone()))
                .collect(),
        }
    }

    /// Fold `q`-exponents modulo `t` (valid in the quotient where `q^t = 1`).
    fn fold_q(&self, t: u32) -> Self {
        let t = t as i64;
        let mut out = LaurentPoly::zero();
        for ((eq, ep), c) in &self.terms {
            out.insert_term((eq.rem_euclid(t), *ep), c.clone());
        }
        out
    }

    /// Reduce modulo the (monic) cyclotomic polynomial in `q`, treating the
    /// polynomial as a `q`-polynomial for each fixed `p12`-exponent.
    /// Exponents of `q` must already be non-negative (fold first).
    fn rem_cyclotomic(&self, ctx: &CyclotomicContext) -> Self {
        let deg = ctx.modulus.len() as i64 - 1;
        let mut by_p: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
        for ((eq, ep), c) in &self.terms {
            debug_assert!(*eq >= 0);
            let v = by_p.entry(*ep).or_default();
            let idx = *eq as usize;
            if v.len() <= idx {
                v.resize(idx + 1, BigInt::zero());
            }
            v[idx] += c;
        }
        let mut out = LaurentPoly::zero();
        for (ep, mut coeffs) in by_p {
            // Long division by the monic modulus; remainder stays integral.
            while coeffs.len() as i64 > deg {
                let lead = coeffs.pop().unwrap();
                if lead.is_zero() {
                    continue;
                }
                let shift = coeffs.len() - (deg as usize);
                for (i, m) in ctx.modulus.iter().take(deg as usize).enumerate() {
                    let delta = &lead * m;
                    coeffs[shift + i] -= delta;
                }
            }
            for (i, c) in coeffs.into_iter().enumerate() {
                out.insert_term((i as i64, ep), c);
            }
        }
        out
    }

    /// Canonical form under the given context: in cyclotomic mode fold the
    /// `q`-exponents and reduce modulo the cyclotomic polynomial, so zero is
    /// syntactic; in generic mode this is the identity.
    pub fn normalize_in(&self, ctx: &CoeffCtx) -> Self {
        match ctx {
            CoeffCtx::Generic => self.clone(),
            CoeffCtx::Cyclotomic(c) => self.fold_q(c.t).rem_cyclotomic(c),
        }
    }

    /// Evaluate at a point of a prime field; `q0` and `p0` must be nonzero
    /// so that the negative Laurent exponents make sense.
    pub fn eval_mod(&self, q0: u64, p0: u64, field: &PrimeField) -> u64 {
        let qi = field.inv(q0);
        let pi = field.inv(p0);
        let mut acc: u64 = 0;
        for ((eq, ep), c) in &self.terms {
            let mut v = field.from_bigint(c);
            v = field.mul(
                v,
                if *eq >= 0 {
                    field.pow(q0, *eq as u64)
                } else {
                    field.pow(qi, (-eq) as u64)
                },
            );
            v = field.mul(
                v,
                if *ep >= 0 {
                    field.pow(p0, *ep as u64)
                } else {
                    field.pow(pi, (-ep) as u64)
                },
            );
            acc = field.add(acc, v);
        }
        acc
    }

    /// Total degree spread, a crude size bound used for error reporting.
    pub fn degree_span(&self) -> u64 {
        match (self.min_exponents(), self.max_exponents()) {
            (Some((aq, ap)), Some((bq, bp))) => ((bq - aq) + (bp - ap)).unsigned_abs(),
            _ => 0,
        }
    }

    pub fn max_exponents(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |(mq, mp), &(eq, ep)| (mq.max(eq), mp.max(ep))))
    }

    /// Leading coefficient under the exponent-pair order (used only to pick
    /// a canonical sign).
    fn leading_int(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    /// When every term carries the same `p12`-exponent the polynomial is a
    /// monomial times a univariate polynomial in `q`; return that shape as
    /// `(e_p, min e_q, dense ascending q-coefficients)`.
    pub fn split_p_monomial(&self) -> Option<(i64, i64, Vec<BigInt>)> {
        let mut it = self.terms.keys();
        let (_, ep) = *it.next()?;
        if !it.all(|(_, e)| *e == ep) {
            return None;
        }
        let (min_q, _) = self.min_exponents().unwrap();
        let (max_q, _) = self.max_exponents().unwrap();
        let mut dense = vec![BigInt::zero(); (max_q - min_q + 1) as usize];
        for ((eq, _), c) in &self.terms {
            dense[(eq - min_q) as usize] = c.clone();
        }
        Some((ep, min_q, dense))
    }

    pub fn from_q_poly(dense: &[BigInt], q_shift: i64, e_p: i64) -> Self {
        let mut out = LaurentPoly::zero();
        for (i, c) in dense.iter().enumerate() {
            out.insert_term((q_shift + i as i64, e_p), c.clone());
        }
        out
    }

    /// Divide exactly by a univariate polynomial in `q` (no `p12` part).
    pub fn div_exact_q_poly(&self, g: &[BigInt]) -> Self {
        let mut out = LaurentPoly::zero();
        let (ep, shift, dense) = self
            .split_p_monomial()
            .expect("dividend splits as monomial times q-polynomial");
        let quot = poly_div_exact(&dense, g);
        for (i, c) in quot.into_iter().enumerate() {
            out.insert_term((shift + i as i64, ep), c);
        }
        out
    }
}

/// Trim trailing zeros of a dense polynomial.
fn upoly_trim(v: &mut Vec<BigInt>) {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn upoly_content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Primitive part with positive leading coefficient.
fn upoly_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    upoly_trim(&mut v);
    if v.is_empty() {
        return v;
    }
    let mut c = upoly_content(&v);
    if v.last().unwrap().is_negative() {
        c = -c;
    }
    if !c.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &c;
        }
    }
    v
}

/// Pseudo-remainder of `a` by `b` (`b` nonempty, deg a >= deg b not
/// required).
fn upoly_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.to_vec();
    upoly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().expect("nonzero divisor");
    while r.len() > db {
        let rl = r.pop().unwrap();
        if rl.is_zero() {
            continue;
        }
        let shift = r.len() - db;
        for x in r.iter_mut() {
            *x = &*x * lead;
        }
        for (i, c) in b.iter().take(db).enumerate() {
            r[shift + i] -= &rl * c;
        }
        upoly_trim(&mut r);
    }
    r
}

/// Primitive-PRS greatest common divisor of two dense integer polynomials.
pub(crate) fn upoly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = upoly_primitive(a.to_vec());
    let mut b = upoly_primitive(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = upoly_primitive(upoly_pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    a
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Render highest exponents first, the way the formulas are written.
        for (i, ((eq, ep), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || (*eq == 0 && *ep == 0) {
                factors.push(abs.to_string());
            }
            if *eq != 0 {
                factors.push(if *eq == 1 {
                    "q".to_string()
                } else {
                    format!("q^{}", eq)
                });
            }
            if *ep != 0 {
                factors.push(if *ep == 1 {
                    "p12".to_string()
                } else {
                    format!("p12^{}", ep)
                });
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

/// Specialization data for `q` a primitive `t`-th root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicContext {
    t: u32,
    /// Coefficients of the `t`-th cyclotomic polynomial, ascending in `q`,
    /// including the leading 1.
    modulus: Vec<BigInt>,
}

impl CyclotomicContext {
    /// Build the context for multiplicative order `t`. The standing
    /// hypothesis of the root-of-unity theory requires `t > 4`, `t != 6`.
    pub fn new(t: u32) -> Result<Self, CoeffError> {
        if t <= 4 || t == 6 {
            return Err(CoeffError::BadCyclotomicOrder(t));
        }
        Ok(CyclotomicContext {
            t,
            modulus: cyclotomic_polynomial(t),
        })
    }

    pub fn order(&self) -> u32 {
        self.t
    }

    pub fn modulus_degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

/// Dense integer polynomial product (ascending coefficients).
fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact dense division, panics if the division leaves a remainder.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dlead = den.last().expect("nonzero divisor");
    let mut quot = vec![BigInt::zero(); rem.len() - den.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + den.len() - 1] / dlead;
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= &c * d;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact poly division");
    quot
}

/// The `t`-th cyclotomic polynomial via `x^t - 1 = prod_{d | t} Phi_d`.
fn cyclotomic_polynomial(t: u32) -> Vec<BigInt> {
    fn compute(t: u32, memo: &mut BTreeMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
        if let Some(p) = memo.get(&t) {
            return p.clone();
        }
        // x^t - 1
        let mut num = vec![BigInt::zero(); t as usize + 1];
        num[0] = -BigInt::one();
        num[t as usize] = BigInt::one();
        let mut den = vec![BigInt::one()];
        for d in 1..t {
            if t % d == 0 {
                den = poly_mul(&den, &compute(d, memo));
            }
        }
        let phi = poly_div_exact(&num, &den);
        memo.insert(t, phi.clone());
        phi
    }
    compute(t, &mut BTreeMap::new())
}

/// Arithmetic context a coefficient lives in.
#[derive(Debug, Clone)]
pub enum CoeffCtx {
    Generic,
    Cyclotomic(Arc<CyclotomicContext>),
}

impl CoeffCtx {
    fn unify(&self, other: &CoeffCtx) -> Result<CoeffCtx, CoeffError> {
        match (self, other) {
            (CoeffCtx::Generic, CoeffCtx::Generic) => Ok(CoeffCtx::Generic),
            (CoeffCtx::Cyclotomic(a), CoeffCtx::Generic) => Ok(CoeffCtx::Cyclotomic(a.clone())),
            (CoeffCtx::Generic, CoeffCtx::Cyclotomic(b)) => Ok(CoeffCtx::Cyclotomic(b.clone())),
            (CoeffCtx::Cyclotomic(a), CoeffCtx::Cyclotomic(b)) => {
                if a.t == b.t {
                    Ok(CoeffCtx::Cyclotomic(a.clone()))
                } else {
                    Err(CoeffError::ContextMismatch(a.t, b.t))
                }
            }
        }
    }

    pub fn cyclotomic_order(&self) -> Option<u32> {
        match self {
            CoeffCtx::Generic => None,
            CoeffCtx::Cyclotomic(c) => Some(c.t),
        }
    }
}

/// Exact rational function in `q` and `p12`, optionally in a cyclotomic
/// quotient. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Coefficient {
    num: LaurentPoly,
    den: LaurentPoly,
    ctx: CoeffCtx,
}

impl Coefficient {
    fn make(num: LaurentPoly, den: LaurentPoly, ctx: CoeffCtx) -> Self {
        let mut c = Coefficient { num, den, ctx };
        c.normalize();
        c
    }

    pub fn zero() -> Self {
        Coefficient {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
            ctx: CoeffCtx::Generic,
        }
    }

    pub fn one() -> Self {
        Coefficient {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
            ctx: CoeffCtx::Generic,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient {
            num: LaurentPoly::from_int(n),
            den: LaurentPoly::one(),
            ctx: CoeffCtx::Generic,
        }
    }

    /// The parameter `q` (so `p22 = q`, `p11 = q^3`).
    pub fn q() -> Self {
        Self::monomial(1, 1, 0)
    }

    /// The free parameter `p12`.
    pub fn p12() -> Self {
        Self::monomial(1, 0, 1)
    }

    /// The eliminated parameter `p21 = q^-3 p12^-1`.
    pub fn p21() -> Self {
        Self::monomial(1, -3, -1)
    }

    /// Integer multiple of `q^e_q p12^e_p`.
    pub fn monomial(coeff: i64, e_q: i64, e_p: i64) -> Self {
        Coefficient {
            num: LaurentPoly::monomial(BigInt::from(coeff), e_q, e_p),
            den: LaurentPoly::one(),
            ctx: CoeffCtx::Generic,
        }
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        Coefficient {
            num,
            den: LaurentPoly::one(),
            ctx: CoeffCtx::Generic,
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn ctx(&self) -> &CoeffCtx {
        &self.ctx
    }

    /// Cheap growth control: canonicalize under the context, cancel the
    /// common integer content and a common Laurent monomial, and give the
    /// denominator a positive leading sign.
    fn normalize(&mut self) {
        self.num = self.num.normalize_in(&self.ctx);
        self.den = self.den.normalize_in(&self.ctx);
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        let g = self.num.integer_content().gcd(&self.den.integer_content());
        if !g.is_one() && !g.is_zero() {
            self.num = self.num.div_int_exact(&g);
            self.den = self.den.div_int_exact(&g);
        }
        // Cancel a common monomial factor, but never clear negative Laurent
        // exponents into the denominator: those are stored as written.
        if let (Some((nq, np)), Some((dq, dp))) =
            (self.num.min_exponents(), self.den.min_exponents())
        {
            let (mq, mp) = (nq.min(dq).max(0), np.min(dp).max(0));
            if mq != 0 || mp != 0 {
                self.num = self.num.shift_exponents(-mq, -mp);
                self.den = self.den.shift_exponents(-mq, -mp);
            }
        }
        if self
            .den
            .leading_int()
            .map(|c| c.is_negative())
            .unwrap_or(false)
        {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.eq_coeff(&Coefficient::one())
    }

    fn ctx_with(&self, rhs: &Coefficient) -> CoeffCtx {
        self.ctx
            .unify(&rhs.ctx)
            .expect("coefficients from different cyclotomic contexts")
    }

    pub fn add(&self, rhs: &Coefficient) -> Coefficient {
        let ctx = self.ctx_with(rhs);
        if self.den == rhs.den {
            return Coefficient::make(self.num.add(&rhs.num), self.den.clone(), ctx);
        }
        Coefficient::make(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
            ctx,
        )
    }

    pub fn sub(&self, rhs: &Coefficient) -> Coefficient {
        let ctx = self.ctx_with(rhs);
        if self.den == rhs.den {
            return Coefficient::make(self.num.sub(&rhs.num), self.den.clone(), ctx);
        }
        Coefficient::make(
            self.num.mul(&rhs.den).sub(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
            ctx,
        )
    }

    pub fn neg(&self) -> Coefficient {
        Coefficient {
            num: self.num.neg(),
            den: self.den.clone(),
            ctx: self.ctx.clone(),
        }
    }

    pub fn mul(&self, rhs: &Coefficient) -> Coefficient {
        let ctx = self.ctx_with(rhs);
        Coefficient::make(self.num.mul(&rhs.num), self.den.mul(&rhs.den), ctx)
    }

    pub fn div(&self, rhs: &Coefficient) -> Result<Coefficient, CoeffError> {
        let ctx = self.ctx_with(rhs);
        if rhs.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Coefficient::make(
            self.num.mul(&rhs.den),
            self.den.mul(&rhs.num),
            ctx,
        ))
    }

    pub fn inv(&self) -> Result<Coefficient, CoeffError> {
        Coefficient::one().div(self)
    }

    pub fn pow(&self, n: i64) -> Result<Coefficient, CoeffError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut base = self.clone();
        let mut out = Coefficient::one();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(out)
    }

    /// Equality by cross-multiplication: `a/b = c/d` iff `ad - cb = 0`.
    pub fn eq_coeff(&self, rhs: &Coefficient) -> bool {
        let ctx = self.ctx_with(rhs);
        self.num
            .mul(&rhs.den)
            .sub(&rhs.num.mul(&self.den))
            .normalize_in(&ctx)
            .is_zero()
    }

    /// `1 + p + ... + p^{n-1}`.
    pub fn q_bracket(n: u32, p: &Coefficient) -> Coefficient {
        let mut acc = Coefficient::zero();
        let mut pw = Coefficient::one();
        for _ in 0..n {
            acc = acc.add(&pw);
            pw = pw.mul(p);
        }
        acc
    }

    /// Move the coefficient into the cyclotomic quotient. The denominator
    /// must stay nonzero there.
    pub fn specialize(&self, ctx: &Arc<CyclotomicContext>) -> Result<Coefficient, CoeffError> {
        let target = CoeffCtx::Cyclotomic(ctx.clone());
        let den = self.den.normalize_in(&target);
        if den.is_zero() {
            return Err(CoeffError::VanishingDenominator);
        }
        let _ = self.ctx.unify(&target)?;
        Ok(Coefficient::make(self.num.clone(), self.den.clone(), target))
    }

    /// Exact evaluation at a prime-field point; signals a resample when the
    /// denominator vanishes there.
    pub fn eval_at_point(&self, q0: u64, p0: u64, field: &PrimeField) -> Result<u64, CoeffError> {
        let d = self.den.eval_mod(q0, p0, field);
        if d == 0 {
            return Err(CoeffError::Resample);
        }
        let n = self.num.eval_mod(q0, p0, field);
        Ok(field.mul(n, field.inv(d)))
    }

    /// A crude degree bound used for probabilistic error reporting.
    pub fn degree_span(&self) -> u64 {
        self.num.degree_span().max(self.den.degree_span())
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        self.eq_coeff(other)
    }
}

impl Eq for Coefficient {}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

/// Arithmetic modulo a fixed odd prime that fits in 62 bits.
#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    p: u64,
}

/// Default prime for the probabilistic zero-testing backend (> 2^61).
pub const DEFAULT_PRIME: u64 = 2_305_843_009_213_693_967;

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let m = n.mod_floor(&BigInt::from(self.p));
        let (_, digits) = m.to_u64_digits();
        *digits.first().unwrap_or(&0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Coefficient {
        Coefficient::q()
    }

    fn p12() -> Coefficient {
        Coefficient::p12()
    }

    #[test]
    fn monomial_product() {
        assert!(q().mul(&q()).eq_coeff(&Coefficient::monomial(1, 2, 0)));
    }

    #[test]
    fn difference_of_squares() {
        let lhs = Coefficient::one()
            .sub(&q())
            .mul(&Coefficient::one().add(&q()));
        let rhs = Coefficient::one().sub(&Coefficient::monomial(1, 2, 0));
        assert!(lhs.eq_coeff(&rhs));
    }

    #[test]
    fn p12_p21_eliminates_to_q_minus_three() {
        let prod = p12().mul(&Coefficient::p21());
        assert!(prod.eq_coeff(&Coefficient::monomial(1, -3, 0)));
        // 1 - p12 p21 q^3 = 0, the instance of the parameter relations.
        let expr = Coefficient::one().sub(&prod.mul(&Coefficient::monomial(1, 3, 0)));
        assert!(expr.is_zero());
    }

    #[test]
    fn zero_over_anything_is_zero() {
        let z = Coefficient::zero()
            .div(&q().sub(&Coefficient::one()))
            .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn one_minus_q_inv_cubed_is_not_zero() {
        let c = Coefficient::one().sub(&Coefficient::monomial(1, -3, 0));
        assert!(!c.is_zero());
    }

    #[test]
    fn division_by_zero_reports() {
        assert_eq!(
            q().div(&Coefficient::zero()).unwrap_err(),
            CoeffError::DivisionByZero
        );
    }

    #[test]
    fn q_bracket_values() {
        assert!(Coefficient::q_bracket(1, &q()).eq_coeff(&Coefficient::one()));
        // 1 + q + q^2 + q^3
        let b4 = Coefficient::q_bracket(4, &q());
        let expect = Coefficient::one()
            .add(&q())
            .add(&Coefficient::monomial(1, 2, 0))
            .add(&Coefficient::monomial(1, 3, 0));
        assert!(b4.eq_coeff(&expect));
        let b3 = Coefficient::q_bracket(3, &q());
        let expect3 = Coefficient::one()
            .add(&q())
            .add(&Coefficient::monomial(1, 2, 0));
        assert!(b3.eq_coeff(&expect3));
    }

    #[test]
    fn q_bracket_telescopes() {
        // (1 + p + ... + p^{n-1})(p - 1) = p^n - 1 for several p.
        let samples = [
            q(),
            p12(),
            q().mul(&p12()),
            Coefficient::from_int(3),
            q().add(&Coefficient::one()),
        ];
        for p in &samples {
            for n in 1..=12u32 {
                let lhs = Coefficient::q_bracket(n, p).mul(&p.sub(&Coefficient::one()));
                let rhs = p.pow(n as i64).unwrap().sub(&Coefficient::one());
                assert!(lhs.eq_coeff(&rhs), "failed at n = {n}");
            }
        }
    }

    #[test]
    fn cyclotomic_orders_guard() {
        assert!(CyclotomicContext::new(4).is_err());
        assert!(CyclotomicContext::new(6).is_err());
        assert!(CyclotomicContext::new(5).is_ok());
        assert!(CyclotomicContext::new(9).is_ok());
    }

    #[test]
    fn cyclotomic_polynomials_are_the_classical_ones() {
        let phi5 = CyclotomicContext::new(5).unwrap();
        assert_eq!(
            phi5.modulus,
            (0..=4).map(|_| BigInt::one()).collect::<Vec<_>>()
        );
        let phi9 = CyclotomicContext::new(9).unwrap();
        // q^6 + q^3 + 1
        let mut expect = vec![BigInt::zero(); 7];
        expect[0] = BigInt::one();
        expect[3] = BigInt::one();
        expect[6] = BigInt::one();
        assert_eq!(phi9.modulus, expect);
    }

    #[test]
    fn specialization_at_order_five() {
        let ctx = Arc::new(CyclotomicContext::new(5).unwrap());
        // q^5 -> 1
        let q5 = Coefficient::monomial(1, 5, 0).specialize(&ctx).unwrap();
        assert!(q5.eq_coeff(&Coefficient::one().specialize(&ctx).unwrap()));
        // 1 + q + q^2 + q^3 + q^4 -> 0
        let b5 = Coefficient::q_bracket(5, &q()).specialize(&ctx).unwrap();
        assert!(b5.is_zero());
        // p12 untouched
        let p = p12().specialize(&ctx).unwrap();
        assert!(!p.is_zero());
        assert!(p.eq_coeff(&p12().specialize(&ctx).unwrap()));
    }

    #[test]
    fn specialize_rejects_vanishing_denominator() {
        let ctx = Arc::new(CyclotomicContext::new(5).unwrap());
        let bad = Coefficient::one()
            .div(&Coefficient::q_bracket(5, &q()))
            .unwrap();
        assert_eq!(
            bad.specialize(&ctx).unwrap_err(),
            CoeffError::VanishingDenominator
        );
    }

    #[test]
    fn specialize_is_multiplicative() {
        let ctx = Arc::new(CyclotomicContext::new(7).unwrap());
        let a = q().add(&p12()).mul(&q()).sub(&Coefficient::from_int(2));
        let b = Coefficient::q_bracket(3, &q()).mul(&p12());
        let lhs = a.mul(&b).specialize(&ctx).unwrap();
        let rhs = a
            .specialize(&ctx)
            .unwrap()
            .mul(&b.specialize(&ctx).unwrap());
        assert!(lhs.eq_coeff(&rhs));
    }

    #[test]
    fn eval_at_point_matches_direct_substitution() {
        let field = PrimeField::new(DEFAULT_PRIME);
        // (1 - q^-3) at q0 = 2: 1 - 1/8 = 7/8.
        let c = Coefficient::one().sub(&Coefficient::monomial(1, -3, 0));
        let got = c.eval_at_point(2, 3, &field).unwrap();
        let expect = field.mul(7, field.inv(8));
        assert_eq!(got, expect);
        // p12 p21 = q^-3 at q0 = 2: 1/8, independent of p0.
        let prod = p12().mul(&Coefficient::p21());
        assert_eq!(
            prod.eval_at_point(2, 5, &field).unwrap(),
            field.inv(8)
        );
        assert_eq!(
            Coefficient::zero().eval_at_point(17, 23, &field).unwrap(),
            0
        );
    }

    #[test]
    fn eval_resamples_on_vanishing_denominator() {
        let field = PrimeField::new(101);
        // 1/(q - 2) at q0 = 2 vanishes in the denominator.
        let c = Coefficient::one()
            .div(&q().sub(&Coefficient::from_int(2)))
            .unwrap();
        assert_eq!(c.eval_at_point(2, 3, &field).unwrap_err(), CoeffError::Resample);
    }

    #[test]
    fn display_round_shape() {
        let c = Coefficient::one().sub(&Coefficient::monomial(1, -3, 0));
        assert_eq!(c.to_string(), "(1 - q^-3)/(1)");
    }
}
