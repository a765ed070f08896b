//! Words, orders, skew polynomials and twisted derivations in the free
//! algebra `k<x1, x2>`.
//!
//! The word order is lexicographic with priority from the left, letters
//! ordered `x1 > x2`, and a proper beginning of a word counted *greater*
//! than the word itself. Multidegrees (constitutions) are ordered
//! lexicographically with the `x1`-count first. The leading term of a
//! polynomial is the order-maximal word among the terms of maximal
//! constitution.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use crate::coeff::{Coefficient, CoeffError, CyclotomicContext};

/// A word over the alphabet `{x1, x2}`, stored as a packed byte sequence
/// with letters `1` and `2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn x1() -> Self {
        Word(vec![1])
    }

    pub fn x2() -> Self {
        Word(vec![2])
    }

    /// Build from letter indices; every entry must be 1 or 2.
    pub fn from_letters(letters: &[u8]) -> Self {
        assert!(letters.iter().all(|&l| l == 1 || l == 2), "letters are 1 or 2");
        Word(letters.to_vec())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn constitution(&self) -> Constitution {
        let m1 = self.0.iter().filter(|&&l| l == 1).count() as u32;
        Constitution {
            m1,
            m2: self.0.len() as u32 - m1,
        }
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + rhs.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&rhs.0);
        Word(v)
    }

    /// The word with the letter at `k` removed.
    pub fn drop_letter(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(k);
        Word(v)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    /// First position of `pattern` as a contiguous subword.
    pub fn find_subword(&self, pattern: &Word) -> Option<usize> {
        if pattern.0.is_empty() || pattern.0.len() > self.0.len() {
            return None;
        }
        self.0
            .windows(pattern.0.len())
            .position(|w| w == pattern.0.as_slice())
    }

    /// Replace `len` letters starting at `at` with the given word.
    pub fn splice(&self, at: usize, len: usize, replacement: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() - len + replacement.0.len());
        v.extend_from_slice(&self.0[..at]);
        v.extend_from_slice(&replacement.0);
        v.extend_from_slice(&self.0[at + len..]);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a != b {
                // x1 > x2 and the letters are stored as 1 < 2.
                return if a < b { Ordering::Greater } else { Ordering::Less };
            }
        }
        // A proper beginning is greater than the word itself.
        other.0.len().cmp(&self.0.len())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for l in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "x{}", l)?;
            first = false;
        }
        Ok(())
    }
}

/// Multidegree of a word: occurrence counts of `x1` and `x2`. The derived
/// `Ord` is lexicographic with the `x1`-count first, which is exactly the
/// degree order on the grading monoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Constitution {
    pub m1: u32,
    pub m2: u32,
}

impl Constitution {
    pub fn new(m1: u32, m2: u32) -> Self {
        Constitution { m1, m2 }
    }

    pub fn zero() -> Self {
        Constitution { m1: 0, m2: 0 }
    }

    pub fn of_letter(letter: u8) -> Self {
        match letter {
            1 => Constitution { m1: 1, m2: 0 },
            2 => Constitution { m1: 0, m2: 1 },
            _ => panic!("letters are 1 or 2"),
        }
    }

    pub fn total(&self) -> u32 {
        self.m1 + self.m2
    }

    pub fn componentwise_le(&self, other: &Constitution) -> bool {
        self.m1 <= other.m1 && self.m2 <= other.m2
    }

    pub fn checked_sub(&self, other: &Constitution) -> Option<Constitution> {
        Some(Constitution {
            m1: self.m1.checked_sub(other.m1)?,
            m2: self.m2.checked_sub(other.m2)?,
        })
    }
}

impl Add for Constitution {
    type Output = Constitution;
    fn add(self, rhs: Constitution) -> Constitution {
        Constitution {
            m1: self.m1 + rhs.m1,
            m2: self.m2 + rhs.m2,
        }
    }
}

impl fmt::Display for Constitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

/// The 2x2 table of quantization parameters `p_ij = chi^i(g_j)`.
#[derive(Debug, Clone)]
pub struct CharacterData {
    p: [[Coefficient; 2]; 2],
}

impl CharacterData {
    pub fn new(p: [[Coefficient; 2]; 2]) -> Self {
        CharacterData { p }
    }

    /// The G2 parameters over the generic field: `p11 = q^3`, `p22 = q`,
    /// `p12` free and `p21 = q^-3 p12^-1`.
    pub fn g2_generic() -> Self {
        CharacterData {
            p: [
                [Coefficient::monomial(1, 3, 0), Coefficient::p12()],
                [Coefficient::p21(), Coefficient::q()],
            ],
        }
    }

    /// Same parameters pushed into the cyclotomic quotient of order `t`.
    pub fn g2_cyclotomic(ctx: &Arc<CyclotomicContext>) -> Result<Self, CoeffError> {
        let g = Self::g2_generic();
        Ok(CharacterData {
            p: [
                [g.p[0][0].specialize(ctx)?, g.p[0][1].specialize(ctx)?],
                [g.p[1][0].specialize(ctx)?, g.p[1][1].specialize(ctx)?],
            ],
        })
    }

    /// Entry `p_ij` with 1-based indices.
    pub fn p(&self, i: usize, j: usize) -> &Coefficient {
        &self.p[i - 1][j - 1]
    }

    /// The bicharacter `p(u, v) = prod p_ij^{u_i v_j}`, a function of the
    /// constitutions only.
    pub fn p_form(&self, u: Constitution, v: Constitution) -> Coefficient {
        let e = [
            [u.m1 as i64 * v.m1 as i64, u.m1 as i64 * v.m2 as i64],
            [u.m2 as i64 * v.m1 as i64, u.m2 as i64 * v.m2 as i64],
        ];
        let mut out = Coefficient::one();
        for i in 0..2 {
            for j in 0..2 {
                if e[i][j] != 0 {
                    out = out.mul(&self.p[i][j].pow(e[i][j]).expect("p_ij invertible"));
                }
            }
        }
        out
    }
}

/// Finite association from words to nonzero coefficients.
#[derive(Debug, Clone, Default)]
pub struct SkewPolynomial {
    terms: BTreeMap<Word, Coefficient>,
}

impl SkewPolynomial {
    pub fn zero() -> Self {
        SkewPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_term(Word::empty(), Coefficient::one())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, Coefficient::one())
    }

    pub fn from_term(w: Word, c: Coefficient) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        SkewPolynomial { terms }
    }

    pub fn scalar(c: Coefficient) -> Self {
        Self::from_term(Word::empty(), c)
    }

    pub fn x1() -> Self {
        Self::from_word(Word::x1())
    }

    pub fn x2() -> Self {
        Self::from_word(Word::x2())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Option<&Coefficient> {
        self.terms.get(w)
    }

    pub fn add_term(&mut self, w: Word, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &SkewPolynomial) -> SkewPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &SkewPolynomial) -> SkewPolynomial {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> SkewPolynomial {
        SkewPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> SkewPolynomial {
        if c.is_zero() {
            return SkewPolynomial::zero();
        }
        let mut out = SkewPolynomial::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.mul(c));
        }
        out
    }

    /// Bilinear extension of word concatenation.
    pub fn mul(&self, rhs: &SkewPolynomial) -> SkewPolynomial {
        let mut out = SkewPolynomial::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(v), a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> SkewPolynomial {
        let mut out = SkewPolynomial::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Split into multihomogeneous components, keyed by constitution.
    pub fn components(&self) -> BTreeMap<Constitution, SkewPolynomial> {
        let mut out: BTreeMap<Constitution, SkewPolynomial> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.constitution())
                .or_insert_with(SkewPolynomial::zero)
                .add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn is_multihomogeneous(&self) -> bool {
        let mut it = self.terms.keys();
        match it.next() {
            None => true,
            Some(first) => {
                let d = first.constitution();
                it.all(|w| w.constitution() == d)
            }
        }
    }

    /// The order-maximal word among terms of maximal constitution, with its
    /// coefficient. Errors on the zero polynomial.
    pub fn leading_term(&self) -> Result<(&Word, &Coefficient), CoeffError> {
        self.terms
            .iter()
            .max_by(|(u, _), (v, _)| {
                (u.constitution(), *u).cmp(&(v.constitution(), *v))
            })
            .ok_or(CoeffError::ZeroPolynomial)
    }

    /// Render terms in decreasing leading order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ts: Vec<(&Word, &Coefficient)> = self.terms.iter().collect();
        ts.sort_by(|(u, _), (v, _)| {
            (v.constitution(), *v).cmp(&(u.constitution(), *u))
        });
        ts.iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("{}", c)
                } else {
                    format!("{} {}", c, w)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl PartialEq for SkewPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for SkewPolynomial {}

impl fmt::Display for SkewPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The skew commutator `[f, g] = fg - p(f, g) gf`, extended componentwise:
/// the twist depends only on constitutions, so the bracket of sums is the
/// sum of brackets of the multihomogeneous pieces.
pub fn skew_bracket(
    f: &SkewPolynomial,
    g: &SkewPolynomial,
    chars: &CharacterData,
) -> SkewPolynomial {
    let mut out = SkewPolynomial::zero();
    for (cf, fp) in f.components() {
        for (cg, gp) in g.components() {
            let twist = chars.p_form(cf, cg);
            out = out.add(&fp.mul(&gp).sub(&gp.mul(&fp).scale(&twist)));
        }
    }
    out
}

/// The twisted derivation `d_i` determined by `d_i(x_j) = delta_ij` and
/// `d_i(uv) = d_i(u) v + p(u, x_i) u d_i(v)`. On a word this removes each
/// occurrence of `x_i` in turn, twisting by the bicharacter of the prefix.
pub fn derivation(i: u8, f: &SkewPolynomial, chars: &CharacterData) -> SkewPolynomial {
    assert!(i == 1 || i == 2);
    let ei = Constitution::of_letter(i);
    let mut out = SkewPolynomial::zero();
    for (w, c) in f.terms() {
        let mut prefix = Constitution::zero();
        for (k, &letter) in w.letters().iter().enumerate() {
            if letter == i {
                let twist = chars.p_form(prefix, ei);
                out.add_term(w.drop_letter(k), c.mul(&twist));
            }
            prefix = prefix + Constitution::of_letter(letter);
        }
    }
    out
}

/// Apply a sequence of derivations, leftmost symbol applied last (so
/// `deriv_word(&[1, 2], f)` computes `d1(d2(f))`).
pub fn derivation_seq(seq: &[u8], f: &SkewPolynomial, chars: &CharacterData) -> SkewPolynomial {
    let mut acc = f.clone();
    for &i in seq.iter().rev() {
        acc = derivation(i, &acc, chars);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[u8]) -> Word {
        Word::from_letters(letters)
    }

    fn chars() -> CharacterData {
        CharacterData::g2_generic()
    }

    #[test]
    fn word_order_basics() {
        assert!(w(&[1, 2]) > w(&[2, 1]));
        // A proper beginning is greater than the word itself.
        assert!(w(&[1]) > w(&[1, 2]));
        // Word of B*D against the longer word of B*C: the first difference
        // is at position five where the longer word carries x1.
        assert!(w(&[1, 2, 1, 2, 2]) < w(&[1, 2, 1, 2, 1, 2, 2]));
    }

    #[test]
    fn word_order_sorts_the_six_generators() {
        let a = w(&[1]);
        let b = w(&[1, 2]);
        let c = w(&[1, 2, 1, 2, 2]);
        let d = w(&[1, 2, 2]);
        let e = w(&[1, 2, 2, 2]);
        let f = w(&[2]);
        assert!(a > b && b > c && c > d && d > e && e > f);
    }

    #[test]
    fn degree_order() {
        assert!(Constitution::new(2, 3) > Constitution::new(1, 5));
        assert_eq!(Constitution::new(1, 1), Constitution::new(1, 1));
        assert!(Constitution::new(1, 0) > Constitution::new(0, 4));
    }

    #[test]
    fn p_form_on_generator_constitutions() {
        let ch = chars();
        // p(B, B) = q for the constitution (1,1).
        let b = Constitution::new(1, 1);
        assert!(ch.p_form(b, b).eq_coeff(&Coefficient::q()));
        // p(C, C) = q^3 for (2,3).
        let c = Constitution::new(2, 3);
        assert!(ch.p_form(c, c).eq_coeff(&Coefficient::monomial(1, 3, 0)));
        // Empty constitution gives the empty product.
        assert!(ch
            .p_form(Constitution::zero(), c)
            .eq_coeff(&Coefficient::one()));
    }

    #[test]
    fn concatenation_product() {
        let x1 = SkewPolynomial::x1();
        let x2 = SkewPolynomial::x2();
        assert_eq!(x1.mul(&x2), SkewPolynomial::from_word(w(&[1, 2])));

        let b = skew_bracket(&x1, &x2, &chars());
        let bx2 = b.mul(&x2);
        let mut expect = SkewPolynomial::from_word(w(&[1, 2, 2]));
        expect.add_term(w(&[2, 1, 2]), Coefficient::p12().neg());
        assert_eq!(bx2, expect);

        assert!(x1.mul(&SkewPolynomial::zero()).is_zero());
    }

    #[test]
    fn bracket_of_the_generators() {
        let b = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &chars());
        let mut expect = SkewPolynomial::from_word(w(&[1, 2]));
        expect.add_term(w(&[2, 1]), Coefficient::p12().neg());
        assert_eq!(b, expect);
    }

    #[test]
    fn bracket_with_itself() {
        // [u, u] = (1 - p(u, u)) u^2 for a multihomogeneous u.
        let ch = chars();
        let u = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &ch);
        let lhs = skew_bracket(&u, &u, &ch);
        let d = Constitution::new(1, 1);
        let rhs = u
            .mul(&u)
            .scale(&Coefficient::one().sub(&ch.p_form(d, d)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn double_bracket_expansion() {
        // [[x1,x2],x2] = x1 x2^2 - p12 (1+q) x2 x1 x2 + p12^2 q x2^2 x1,
        // computed here by expanding the definition by hand.
        let ch = chars();
        let b = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &ch);
        let d = skew_bracket(&b, &SkewPolynomial::x2(), &ch);
        let p12 = Coefficient::p12();
        let q = Coefficient::q();
        let mut expect = SkewPolynomial::from_word(w(&[1, 2, 2]));
        expect.add_term(
            w(&[2, 1, 2]),
            p12.mul(&Coefficient::one().add(&q)).neg(),
        );
        expect.add_term(w(&[2, 2, 1]), p12.mul(&p12).mul(&q));
        assert_eq!(d, expect);
    }

    #[test]
    fn derivation_on_letters() {
        let ch = chars();
        let d1x1 = derivation(1, &SkewPolynomial::x1(), &ch);
        assert_eq!(d1x1, SkewPolynomial::one());
        assert!(derivation(2, &SkewPolynomial::x1(), &ch).is_zero());
    }

    #[test]
    fn derivation_of_the_bracket() {
        // d1([x1,x2]) = (1 - q^-3) x2.
        let ch = chars();
        let b = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &ch);
        let got = derivation(1, &b, &ch);
        let coeff = Coefficient::one().sub(&Coefficient::monomial(1, -3, 0));
        assert_eq!(got, SkewPolynomial::x2().scale(&coeff));
        assert!(derivation(2, &b, &ch).is_zero());
    }

    #[test]
    fn leading_terms() {
        let ch = chars();
        let b = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &ch);
        let (lw, lc) = b.leading_term().unwrap();
        assert_eq!(*lw, w(&[1, 2]));
        assert!(lc.eq_coeff(&Coefficient::one()));

        let five = SkewPolynomial::scalar(Coefficient::from_int(5));
        let (lw, lc) = five.leading_term().unwrap();
        assert!(lw.is_empty());
        assert!(lc.eq_coeff(&Coefficient::from_int(5)));

        // Constitution dominates the word comparison.
        let mut f = SkewPolynomial::from_word(w(&[1, 2]));
        f.add_term(w(&[2, 1, 2]), Coefficient::one());
        let (lw, _) = f.leading_term().unwrap();
        assert_eq!(*lw, w(&[2, 1, 2]));

        assert!(SkewPolynomial::zero().leading_term().is_err());
    }

    #[test]
    fn formula_for_bracket_with_annihilated_variable() {
        // If d_i(u) = 0 then d_i([u, x_i]) = 0; instances with i = 2.
        let ch = chars();
        let b = skew_bracket(&SkewPolynomial::x1(), &SkewPolynomial::x2(), &ch);
        let d = skew_bracket(&b, &SkewPolynomial::x2(), &ch);
        let e = skew_bracket(&d, &SkewPolynomial::x2(), &ch);
        for u in [&b, &d, &e] {
            assert!(derivation(2, u, &ch).is_zero());
            let bracket = skew_bracket(u, &SkewPolynomial::x2(), &ch);
            assert!(derivation(2, &bracket, &ch).is_zero());
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec(prop::sample::select(vec![1u8, 2u8]), 1..=max_len)
                .prop_map(|v| Word::from_letters(&v))
        }

        fn arb_coeff() -> impl Strategy<Value = Coefficient> {
            (-3i64..=3, -2i64..=2, -2i64..=2)
                .prop_map(|(c, eq, ep)| Coefficient::monomial(if c == 0 { 1 } else { c }, eq, ep))
        }

        /// A multihomogeneous polynomial: random words of one constitution.
        fn arb_homogeneous(max_len: usize) -> impl Strategy<Value = SkewPolynomial> {
            (arb_word(max_len), prop::collection::vec(arb_coeff(), 1..=3)).prop_flat_map(
                |(w, coeffs)| {
                    let d = w.constitution();
                    let words = words_of_constitution(d);
                    let n = coeffs.len().min(words.len());
                    prop::sample::subsequence(words, n).prop_map(move |chosen| {
                        let mut f = SkewPolynomial::zero();
                        for (w, c) in chosen.into_iter().zip(coeffs.iter()) {
                            f.add_term(w, c.clone());
                        }
                        f
                    })
                },
            )
        }

        fn words_of_constitution(d: Constitution) -> Vec<Word> {
            fn rec(m1: u32, m2: u32, prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
                if m1 == 0 && m2 == 0 {
                    out.push(Word::from_letters(prefix));
                    return;
                }
                if m1 > 0 {
                    prefix.push(1);
                    rec(m1 - 1, m2, prefix, out);
                    prefix.pop();
                }
                if m2 > 0 {
                    prefix.push(2);
                    rec(m1, m2 - 1, prefix, out);
                    prefix.pop();
                }
            }
            let mut out = Vec::new();
            rec(d.m1, d.m2, &mut Vec::new(), &mut out);
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn word_order_is_total_and_transitive(
                a in arb_word(7), b in arb_word(7), c in arb_word(7)
            ) {
                // Antisymmetry
                if a.cmp(&b) == Ordering::Less {
                    prop_assert_eq!(b.cmp(&a), Ordering::Greater);
                }
                if a.cmp(&b) == Ordering::Equal {
                    prop_assert_eq!(&a, &b);
                }
                // Transitivity
                if a <= b && b <= c {
                    prop_assert!(a <= c);
                }
            }

            #[test]
            fn bracket_product_identity_left(
                u in arb_homogeneous(3), v in arb_homogeneous(3), wpoly in arb_homogeneous(3)
            ) {
                // [u v, w] = p_{vw} [u, w] v + u [v, w]
                let ch = CharacterData::g2_generic();
                let (du, dv, dw) = match (
                    u.terms().next(), v.terms().next(), wpoly.terms().next()
                ) {
                    (Some((a, _)), Some((b, _)), Some((c, _))) =>
                        (a.constitution(), b.constitution(), c.constitution()),
                    _ => return Ok(()),
                };
                if dv.total() + dw.total() + du.total() > 9 { return Ok(()); }
                let lhs = skew_bracket(&u.mul(&v), &wpoly, &ch);
                let rhs = skew_bracket(&u, &wpoly, &ch)
                    .mul(&v)
                    .scale(&ch.p_form(dv, dw))
                    .add(&u.mul(&skew_bracket(&v, &wpoly, &ch)));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn bracket_product_identity_right(
                u in arb_homogeneous(3), v in arb_homogeneous(3), wpoly in arb_homogeneous(3)
            ) {
                // [u, v w] = [u, v] w + p_{uv} v [u, w]
                let ch = CharacterData::g2_generic();
                let (du, dv, dw) = match (
                    u.terms().next(), v.terms().next(), wpoly.terms().next()
                ) {
                    (Some((a, _)), Some((b, _)), Some((c, _))) =>
                        (a.constitution(), b.constitution(), c.constitution()),
                    _ => return Ok(()),
                };
                if dv.total() + dw.total() + du.total() > 9 { return Ok(()); }
                let lhs = skew_bracket(&u, &v.mul(&wpoly), &ch);
                let rhs = skew_bracket(&u, &v, &ch)
                    .mul(&wpoly)
                    .add(&v.mul(&skew_bracket(&u, &wpoly, &ch)).scale(&ch.p_form(du, dv)));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn p_form_is_a_bicharacter(
                a1 in 0u32..4, a2 in 0u32..4, b1 in 0u32..4, b2 in 0u32..4,
                c1 in 0u32..4, c2 in 0u32..4
            ) {
                let ch = CharacterData::g2_generic();
                let u = Constitution::new(a1, a2);
                let up = Constitution::new(b1, b2);
                let v = Constitution::new(c1, c2);
                let lhs = ch.p_form(u + up, v);
                let rhs = ch.p_form(u, v).mul(&ch.p_form(up, v));
                prop_assert!(lhs.eq_coeff(&rhs));
                let lhs2 = ch.p_form(v, u + up);
                let rhs2 = ch.p_form(v, u).mul(&ch.p_form(v, up));
                prop_assert!(lhs2.eq_coeff(&rhs2));
            }

            #[test]
            fn twisted_leibniz_rule(
                f in arb_homogeneous(3), g in arb_homogeneous(4), i in 1u8..=2
            ) {
                let ch = CharacterData::g2_generic();
                let df = match f.terms().next() {
                    Some((w, _)) => w.constitution(),
                    None => return Ok(()),
                };
                let lhs = derivation(i, &f.mul(&g), &ch);
                let rhs = derivation(i, &f, &ch).mul(&g).add(
                    &f.mul(&derivation(i, &g, &ch))
                        .scale(&ch.p_form(df, Constitution::of_letter(i))),
                );
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
