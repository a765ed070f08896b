//! The concrete rank-2 instance of type G2: quantization parameters, the
//! two defining relations, the six PBW-generating super-letters, and the
//! verification drivers that recompute every identity the classification
//! rests on.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::coeff::{CoeffError, Coefficient, CyclotomicContext};
use crate::freealg::{
    derivation, skew_bracket, CharacterData, Constitution, SkewPolynomial, Word,
};
use crate::lyndon::{standard_factorization, BracketTree, SuperLetter};
use crate::reduce::{ReductionOracle, RelationSet};
use crate::report::CheckRecord;

/// The six PBW-generating super-letters in decreasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Letter {
    /// All letters in decreasing super-letter order: A > B > ... > F.
    pub const DESCENDING: [Letter; 6] =
        [Letter::A, Letter::B, Letter::C, Letter::D, Letter::E, Letter::F];

    /// Ascending order, the one PBW products are written in.
    pub const ASCENDING: [Letter; 6] =
        [Letter::F, Letter::E, Letter::D, Letter::C, Letter::B, Letter::A];

    pub fn word(&self) -> Word {
        match self {
            Letter::A => Word::from_letters(&[1]),
            Letter::B => Word::from_letters(&[1, 2]),
            Letter::C => Word::from_letters(&[1, 2, 1, 2, 2]),
            Letter::D => Word::from_letters(&[1, 2, 2]),
            Letter::E => Word::from_letters(&[1, 2, 2, 2]),
            Letter::F => Word::from_letters(&[2]),
        }
    }

    pub fn constitution(&self) -> Constitution {
        self.word().constitution()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Letter::A => "A",
            Letter::B => "B",
            Letter::C => "C",
            Letter::D => "D",
            Letter::E => "E",
            Letter::F => "F",
        }
    }

    /// True when `self` is a strictly larger super-letter than `other`.
    pub fn is_above(&self, other: &Letter) -> bool {
        self.word() > other.word()
    }
}

/// A PBW monomial: letters with multiplicity, ascending left to right.
pub type PbwMonomial = Vec<Letter>;

pub fn pbw_monomial_name(m: &[Letter]) -> String {
    if m.is_empty() {
        return "1".to_string();
    }
    m.iter().map(|l| l.name()).collect::<Vec<_>>().join("")
}

/// How the probabilistic fast path is used by the verification drivers.
#[derive(Debug, Clone, Copy)]
pub struct VerifyMode {
    /// Run the one oversized membership check exactly instead.
    pub exact_everywhere: bool,
    pub trials: u32,
    pub seed: u64,
}

impl Default for VerifyMode {
    fn default() -> Self {
        VerifyMode {
            exact_everywhere: false,
            trials: 3,
            seed: 0x5eed_c0de,
        }
    }
}

/// The G2 quantization: parameters, relations, super-letters and the
/// membership oracle. Immutable after construction.
pub struct G2Instance {
    chars: CharacterData,
    relation_polys: Vec<SkewPolynomial>,
    oracle: ReductionOracle,
    letters: [SuperLetter; 6],
    cyclotomic: Option<Arc<CyclotomicContext>>,
}

impl G2Instance {
    /// Generic parameters: `q` and `p12` algebraically independent.
    pub fn new() -> Self {
        Self::build(CharacterData::g2_generic(), None)
    }

    /// Parameters in the cyclotomic quotient where `q` has order `t`.
    pub fn cyclotomic(t: u32) -> Result<Self, CoeffError> {
        let ctx = Arc::new(CyclotomicContext::new(t)?);
        Ok(Self::build(CharacterData::g2_cyclotomic(&ctx)?, Some(ctx)))
    }

    fn build(chars: CharacterData, cyclotomic: Option<Arc<CyclotomicContext>>) -> Self {
        let x1 = SkewPolynomial::x1();
        let x2 = SkewPolynomial::x2();
        let b = skew_bracket(&x1, &x2, &chars);
        let d = skew_bracket(&b, &x2, &chars);
        let e = skew_bracket(&d, &x2, &chars);
        let r1 = skew_bracket(&e, &x2, &chars);
        let r2 = skew_bracket(&x1, &b, &chars);
        let relation_polys = vec![r1, r2];
        let oracle = ReductionOracle::new(RelationSet::new(relation_polys.clone()));
        let letters = Letter::DESCENDING
            .map(|l| SuperLetter::build(&l.word(), &chars).expect("generator words are standard"));
        G2Instance {
            chars,
            relation_polys,
            oracle,
            letters,
            cyclotomic,
        }
    }

    pub fn chars(&self) -> &CharacterData {
        &self.chars
    }

    pub fn oracle(&self) -> &ReductionOracle {
        &self.oracle
    }

    pub fn cyclotomic_order(&self) -> Option<u32> {
        self.cyclotomic.as_ref().map(|c| c.order())
    }

    pub fn letter(&self, l: Letter) -> &SuperLetter {
        &self.letters[Letter::DESCENDING.iter().position(|x| *x == l).unwrap()]
    }

    pub fn value(&self, l: Letter) -> &SkewPolynomial {
        &self.letter(l).value
    }

    pub fn relations(&self) -> &[SkewPolynomial] {
        &self.relation_polys
    }

    /// The quartic relation rewritten on the word basis:
    /// `x1 x2^4 + a1 x2 x1 x2^3 + a2 x2^2 x1 x2^2 + a3 x2^3 x1 x2 + a4 x2^4 x1`.
    pub fn quartic_coefficients(&self) -> [Coefficient; 4] {
        let q = self.chars.p(2, 2).clone();
        let p12 = self.chars.p(1, 2).clone();
        let a1 = p12.mul(&Coefficient::q_bracket(4, &q)).neg();
        let a2 = p12
            .pow(2)
            .unwrap()
            .mul(&q)
            .mul(&Coefficient::q_bracket(3, &q))
            .mul(&q.pow(2).unwrap().add(&Coefficient::one()));
        let a3 = p12
            .pow(3)
            .unwrap()
            .mul(&q.pow(3).unwrap())
            .mul(&Coefficient::q_bracket(4, &q))
            .neg();
        let a4 = p12.pow(4).unwrap().mul(&q.pow(6).unwrap());
        [a1, a2, a3, a4]
    }

    /// The quadratic relation coefficients:
    /// `x1^2 x2 + b1 x1 x2 x1 + b2 x2 x1^2`.
    pub fn quadratic_coefficients(&self) -> [Coefficient; 2] {
        let p11 = self.chars.p(1, 1).clone();
        let p12 = self.chars.p(1, 2).clone();
        let b1 = p12.mul(&Coefficient::one().add(&p11)).neg();
        let b2 = p12.pow(2).unwrap().mul(&p11);
        [b1, b2]
    }

    /// All PBW monomials in the six letters with the given constitution,
    /// each written ascending.
    pub fn pbw_monomials(&self, d: Constitution) -> Vec<PbwMonomial> {
        let mut out = Vec::new();
        let (m1, m2) = (d.m1, d.m2);
        for n_c in 0..=(m1 / 2).min(m2 / 3) {
            for n_b in 0..=(m1 - 2 * n_c).min(m2 - 3 * n_c) {
                for n_d in 0..=(m1 - 2 * n_c - n_b).min((m2 - 3 * n_c - n_b) / 2) {
                    let max_e =
                        (m1 - 2 * n_c - n_b - n_d).min((m2 - 3 * n_c - n_b - 2 * n_d) / 3);
                    for n_e in 0..=max_e {
                        let n_a = m1 - 2 * n_c - n_b - n_d - n_e;
                        let n_f = m2 - (3 * n_c + n_b + 2 * n_d + 3 * n_e);
                        let mut m = Vec::new();
                        m.extend(std::iter::repeat(Letter::F).take(n_f as usize));
                        m.extend(std::iter::repeat(Letter::E).take(n_e as usize));
                        m.extend(std::iter::repeat(Letter::D).take(n_d as usize));
                        m.extend(std::iter::repeat(Letter::C).take(n_c as usize));
                        m.extend(std::iter::repeat(Letter::B).take(n_b as usize));
                        m.extend(std::iter::repeat(Letter::A).take(n_a as usize));
                        out.push(m);
                    }
                }
            }
        }
        out
    }

    pub fn pbw_monomial_value(&self, m: &[Letter]) -> SkewPolynomial {
        let mut v = SkewPolynomial::one();
        for l in m {
            v = v.mul(self.value(*l));
        }
        v
    }

    /// Rewrite a polynomial in the PBW monomial basis: take the normal
    /// form, then greedily factor leading words into nondecreasing products
    /// of the six generator words. Fails when a leading word has a factor
    /// outside the generator list, which signals an order or oracle bug.
    pub fn pbw_decompose(
        &self,
        f: &SkewPolynomial,
    ) -> Result<BTreeMap<PbwMonomial, Coefficient>, String> {
        let mut rem = self.oracle.normal_form(f);
        let mut out: BTreeMap<PbwMonomial, Coefficient> = BTreeMap::new();
        let mut cache: HashMap<Vec<Letter>, SkewPolynomial> = HashMap::new();
        while !rem.is_zero() {
            let (w, c) = rem
                .leading_term()
                .map(|(w, c)| (w.clone(), c.clone()))
                .unwrap();
            let factors = standard_factorization(&w);
            let mut monomial: PbwMonomial = Vec::with_capacity(factors.len());
            for fac in &factors {
                match Letter::DESCENDING.iter().find(|l| l.word() == *fac) {
                    Some(l) => monomial.push(*l),
                    None => {
                        return Err(format!(
                            "leading word {w} has factor {fac} outside the generator list"
                        ))
                    }
                }
            }
            let value = cache
                .entry(monomial.clone())
                .or_insert_with(|| self.oracle.normal_form(&self.pbw_monomial_value(&monomial)))
                .clone();
            rem = rem.sub(&value.scale(&c));
            if let Ok((w2, _)) = rem.leading_term() {
                if (w2.constitution(), w2.clone()) >= (w.constitution(), w.clone()) {
                    return Err(format!("reduction failed to decrease at {w}"));
                }
            }
            out.insert(monomial, c);
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Count of PBW monomials at one constitution.
    pub fn pbw_count(&self, d: Constitution) -> usize {
        self.pbw_monomials(d).len()
    }
}

impl Default for G2Instance {
    fn default() -> Self {
        Self::new()
    }
}

// ---------------------------------------------------------------------------
// Verification drivers
// ---------------------------------------------------------------------------

fn coeff_check(
    name: impl Into<String>,
    subject: impl Into<String>,
    got: &Coefficient,
    expect: &Coefficient,
) -> CheckRecord {
    let ok = got.eq_coeff(expect);
    CheckRecord::expect(name, subject, ok, format!("got {got}, expected {expect}"))
}

fn poly_check(
    name: impl Into<String>,
    subject: impl Into<String>,
    got: &SkewPolynomial,
    expect: &SkewPolynomial,
) -> CheckRecord {
    let diff = got.sub(expect);
    CheckRecord::expect(
        name,
        subject,
        diff.is_zero(),
        format!("difference {}", diff.render()),
    )
}

impl G2Instance {
    /// Parameter relations and generator structure.
    pub fn verify_parameters(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let q = self.chars.p(2, 2);
        out.push(coeff_check(
            "params/p11",
            "p11 = q^3",
            self.chars.p(1, 1),
            &q.pow(3).unwrap(),
        ));
        out.push(coeff_check(
            "params/p12-p21",
            "p12 p21 = q^-3",
            &self.chars.p(1, 2).mul(self.chars.p(2, 1)),
            &q.pow(-3).unwrap(),
        ));
        let r1c = self.relation_polys[0]
            .terms()
            .next()
            .map(|(w, _)| w.constitution());
        let r2c = self.relation_polys[1]
            .terms()
            .next()
            .map(|(w, _)| w.constitution());
        out.push(CheckRecord::expect(
            "params/serre-shape",
            "relations have constitutions (1,4) and (2,1)",
            r1c == Some(Constitution::new(1, 4))
                && r2c == Some(Constitution::new(2, 1))
                && self.relation_polys.iter().all(|r| r.is_multihomogeneous()),
            format!("got {:?} and {:?}", r1c, r2c),
        ));
        let sorted = Letter::DESCENDING
            .windows(2)
            .all(|p| p[0].word() > p[1].word());
        out.push(CheckRecord::expect(
            "params/letter-order",
            "A > B > C > D > E > F in the word order",
            sorted,
            "order violated",
        ));
        for l in Letter::DESCENDING {
            let s = self.letter(l);
            let monic = s
                .value
                .leading_term()
                .map(|(w, c)| *w == s.word && c.eq_coeff(&Coefficient::one()))
                .unwrap_or(false);
            out.push(CheckRecord::expect(
                format!("params/letter-{}", l.name()),
                format!("[{}] is monic with leading word {}", l.name(), s.word),
                monic && s.tree.is_standard_nonassociative(),
                "leading term or bracketing wrong",
            ));
        }
        let b = self.letter(Letter::B);
        let d = self.letter(Letter::D);
        out.push(CheckRecord::expect(
            "params/letter-C-shape",
            "[C] = [[B],[D]] as bracketings",
            self.letter(Letter::C).tree == BracketTree::pair(b.tree.clone(), d.tree.clone()),
            "tree differs",
        ));
        out
    }

    /// The two relations rewritten on the word basis with the displayed
    /// coefficients.
    pub fn verify_relation_coefficients(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let [a1, a2, a3, a4] = self.quartic_coefficients();
        let [b1, b2] = self.quadratic_coefficients();
        let wl = Word::from_letters;

        let mut expect_r1 = SkewPolynomial::from_word(wl(&[1, 2, 2, 2, 2]));
        expect_r1.add_term(wl(&[2, 1, 2, 2, 2]), a1.clone());
        expect_r1.add_term(wl(&[2, 2, 1, 2, 2]), a2.clone());
        expect_r1.add_term(wl(&[2, 2, 2, 1, 2]), a3.clone());
        expect_r1.add_term(wl(&[2, 2, 2, 2, 1]), a4.clone());
        out.push(poly_check(
            "relations/quartic",
            "fourfold bracket equals x1 x2^4 + a1 x2 x1 x2^3 + ... + a4 x2^4 x1",
            &self.relation_polys[0],
            &expect_r1,
        ));

        let mut expect_r2 = SkewPolynomial::from_word(wl(&[1, 1, 2]));
        expect_r2.add_term(wl(&[1, 2, 1]), b1.clone());
        expect_r2.add_term(wl(&[2, 1, 1]), b2.clone());
        out.push(poly_check(
            "relations/quadratic",
            "double bracket equals x1^2 x2 + b1 x1 x2 x1 + b2 x2 x1^2",
            &self.relation_polys[1],
            &expect_r2,
        ));

        let pairs: [(&str, &Coefficient, usize, Word); 6] = [
            ("a1", &a1, 0, wl(&[2, 1, 2, 2, 2])),
            ("a2", &a2, 0, wl(&[2, 2, 1, 2, 2])),
            ("a3", &a3, 0, wl(&[2, 2, 2, 1, 2])),
            ("a4", &a4, 0, wl(&[2, 2, 2, 2, 1])),
            ("b1", &b1, 1, wl(&[1, 2, 1])),
            ("b2", &b2, 1, wl(&[2, 1, 1])),
        ];
        for (name, expect, rel, word) in pairs {
            let got = self.relation_polys[rel]
                .coefficient(&word)
                .cloned()
                .unwrap_or_else(Coefficient::zero);
            out.push(coeff_check(
                format!("relations/coeff-{name}"),
                format!("{name} as displayed"),
                &got,
                expect,
            ));
        }
        out
    }

    /// The full table of derivatives of the six letters, rewritten in the
    /// PBW basis.
    pub fn verify_derivative_table(&self) -> Vec<CheckRecord> {
        let q = self.chars.p(2, 2).clone();
        let p21 = self.chars.p(2, 1).clone();
        let one = Coefficient::one();
        let qm = |k: i64| q.pow(k).unwrap();
        let f1 = one.sub(&qm(-1));
        let f2 = one.sub(&qm(-2));
        let f3 = one.sub(&qm(-3));

        let mut expected: BTreeMap<(Letter, u8), BTreeMap<PbwMonomial, Coefficient>> =
            BTreeMap::new();
        let mut table = |l: Letter, i: u8, entries: Vec<(PbwMonomial, Coefficient)>| {
            expected.insert((l, i), entries.into_iter().collect());
        };
        table(Letter::A, 1, vec![(vec![], one.clone())]);
        table(Letter::A, 2, vec![]);
        table(Letter::B, 1, vec![(vec![Letter::F], f3.clone())]);
        table(Letter::B, 2, vec![]);
        table(
            Letter::C,
            1,
            vec![
                (vec![Letter::F, Letter::D], qm(2).mul(&f3).mul(&f3)),
                (
                    vec![Letter::E],
                    p21.mul(&f3).mul(&qm(3).sub(&qm(2)).sub(&qm(1))),
                ),
            ],
        );
        table(Letter::C, 2, vec![]);
        table(Letter::D, 1, vec![(vec![Letter::F, Letter::F], f3.mul(&f2))]);
        table(Letter::D, 2, vec![]);
        table(
            Letter::E,
            1,
            vec![(vec![Letter::F, Letter::F, Letter::F], f3.mul(&f2).mul(&f1))],
        );
        table(Letter::E, 2, vec![]);
        table(Letter::F, 1, vec![]);
        table(Letter::F, 2, vec![(vec![], one.clone())]);

        let mut out = Vec::new();
        for l in Letter::DESCENDING {
            for i in [1u8, 2u8] {
                let got = derivation(i, self.value(l), &self.chars);
                let name = format!("derivative-table/{}-d{}", l.name(), i);
                let subject = format!("d{}([{}]) in the PBW basis", i, l.name());
                match self.pbw_decompose(&got) {
                    Err(e) => out.push(CheckRecord::fail(name, subject, e)),
                    Ok(decomp) => {
                        let want = &expected[&(l, i)];
                        let ok = decomp.len() == want.len()
                            && want
                                .iter()
                                .all(|(m, c)| decomp.get(m).map(|g| g.eq_coeff(c)).unwrap_or(false));
                        let witness = format!(
                            "got {}",
                            decomp
                                .iter()
                                .map(|(m, c)| format!("{} {}", c, pbw_monomial_name(m)))
                                .collect::<Vec<_>>()
                                .join(" + ")
                        );
                        out.push(CheckRecord::expect(name, subject, ok, witness));
                    }
                }
            }
        }
        out
    }

    /// The three derived relations obtained from the defining ones by
    /// one-sided multiplications and differences, with their displayed
    /// coefficients, and the leading coefficient of the final pair
    /// computation.
    pub fn verify_derived_relations(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let [a1, a2, a3, a4] = self.quartic_coefficients();
        let [b1, b2] = self.quadratic_coefficients();
        let r1 = &self.relation_polys[0];
        let r2 = &self.relation_polys[1];
        let x1 = SkewPolynomial::x1();
        let x2 = SkewPolynomial::x2();
        let wl = Word::from_letters;
        let a1_minus_b1 = a1.sub(&b1);

        // First derived relation: x1 * (quartic) - (quadratic) * x2^3.
        let d1 = x1.mul(r1).sub(&r2.mul(&x2.pow(3)));
        let mut d1_expect = SkewPolynomial::zero();
        d1_expect.add_term(wl(&[1, 2, 1, 2, 2, 2]), a1_minus_b1.clone());
        d1_expect.add_term(wl(&[1, 2, 2, 1, 2, 2]), a2.clone());
        d1_expect.add_term(wl(&[1, 2, 2, 2, 1, 2]), a3.clone());
        d1_expect.add_term(wl(&[1, 2, 2, 2, 2, 1]), a4.clone());
        d1_expect.add_term(wl(&[2, 1, 1, 2, 2, 2]), b2.neg());
        out.push(poly_check(
            "derived/quintic",
            "x1*(quartic) - (quadratic)*x2^3 has the displayed five terms",
            &d1,
            &d1_expect,
        ));
        out.push(CheckRecord::expect(
            "derived/quintic-member",
            "the first derived relation lies in the ideal",
            self.oracle.is_in_ideal(&d1_expect),
            self.oracle.normal_form(&d1_expect).render(),
        ));

        // Second derived relation:
        // (a1-b1) x1 x2 * (quartic) - (first derived) * x2.
        let d2 = SkewPolynomial::from_word(wl(&[1, 2]))
            .scale(&a1_minus_b1)
            .mul(r1)
            .sub(&d1.mul(&x2));
        let mut d2_expect = SkewPolynomial::zero();
        d2_expect.add_term(wl(&[1, 2, 2, 1, 2, 2, 2]), a1.mul(&a1_minus_b1).sub(&a2));
        d2_expect.add_term(
            wl(&[1, 2, 2, 2, 1, 2, 2]),
            a3.sub(&a2.mul(&a1_minus_b1)).neg(),
        );
        d2_expect.add_term(
            wl(&[1, 2, 2, 2, 2, 1, 2]),
            a4.sub(&a3.mul(&a1_minus_b1)).neg(),
        );
        d2_expect.add_term(wl(&[1, 2, 2, 2, 2, 2, 1]), a4.mul(&a1_minus_b1));
        d2_expect.add_term(wl(&[2, 1, 1, 2, 2, 2, 2]), b2.clone());
        out.push(poly_check(
            "derived/sextic",
            "(a1-b1) x1 x2*(quartic) - (first derived)*x2 matches the displayed form",
            &d2,
            &d2_expect,
        ));
        out.push(CheckRecord::expect(
            "derived/sextic-member",
            "the second derived relation lies in the ideal",
            self.oracle.is_in_ideal(&d2_expect),
            self.oracle.normal_form(&d2_expect).render(),
        ));
        // Its head coefficient is what exhibits the DE word as reducible.
        out.push(CheckRecord::expect(
            "derived/sextic-head-nonzero",
            "a1(a1-b1) - a2 does not vanish",
            !a1.mul(&a1_minus_b1).sub(&a2).is_zero(),
            "vanishing head coefficient",
        ));

        // Third derived relation: (quadratic) * (a1-b1) x1 x2^3 - x1 *
        // (first derived), then one generation of rewriting x1^2 x2 ->
        // -b1 x1 x2 x1 - b2 x2 x1^2 inside the words not starting with x2.
        let g0 = r2
            .mul(&SkewPolynomial::from_word(wl(&[1, 2, 2, 2])).scale(&a1_minus_b1))
            .sub(&x1.mul(&d1));
        let g = rewrite_x1x1x2_once(&g0, &b1, &b2);
        let c_head = a2.mul(&b1).sub(&b1.mul(&a1_minus_b1).add(&b2).mul(&b1));
        let mut nonx2_expect = SkewPolynomial::zero();
        nonx2_expect.add_term(wl(&[1, 2, 1, 2, 1, 2, 2]), c_head.clone());
        nonx2_expect.add_term(
            wl(&[1, 2, 2, 1, 1, 2, 2]),
            b1.mul(&a1_minus_b1).add(&b2).mul(&b2).neg(),
        );
        nonx2_expect.add_term(wl(&[1, 2, 1, 2, 2, 1, 2]), a3.mul(&b1));
        nonx2_expect.add_term(wl(&[1, 2, 1, 2, 2, 2, 1]), a4.mul(&b1));
        let mut g_nonx2 = SkewPolynomial::zero();
        for (w, c) in g.terms() {
            if w.letters().first() != Some(&2) {
                g_nonx2.add_term(w.clone(), c.clone());
            }
        }
        out.push(poly_check(
            "derived/septic",
            "terms not starting with x2 match the four displayed ones",
            &g_nonx2,
            &nonx2_expect,
        ));
        out.push(CheckRecord::expect(
            "derived/septic-member",
            "the third derived relation lies in the ideal",
            self.oracle.is_in_ideal(&g),
            self.oracle.normal_form(&g).render(),
        ));
        out.push(CheckRecord::expect(
            "derived/septic-head-nonzero",
            "its coefficient at x1x2 x1x2 x1x2^2 does not vanish",
            !c_head.is_zero(),
            "vanishing head coefficient",
        ));

        // The pair elimination: (third derived)*(a1-b1) x2 minus
        // c_head * x1 x2 * (first derived); its leading term is the stated
        // multiple of the concatenation of the words of [C] and [D].
        let h = g
            .mul(&x2)
            .scale(&a1_minus_b1)
            .sub(&SkewPolynomial::from_word(wl(&[1, 2])).scale(&c_head).mul(&d1));
        let cd_coeff = a3.mul(&b1).mul(&a1_minus_b1).sub(&a2.mul(&c_head));
        let lead_ok = h
            .leading_term()
            .map(|(w, c)| *w == wl(&[1, 2, 1, 2, 2, 1, 2, 2]) && c.eq_coeff(&cd_coeff))
            .unwrap_or(false);
        out.push(CheckRecord::expect(
            "derived/cd-leading",
            "leading term of the pair elimination is the stated multiple of the CD word",
            lead_ok,
            format!(
                "leading term {:?}",
                h.leading_term().map(|(w, c)| format!("{c} {w}")).ok()
            ),
        ));
        let q = self.chars.p(2, 2).clone();
        let p12 = self.chars.p(1, 2).clone();
        let expect_cd = p12
            .pow(5)
            .unwrap()
            .mul(&q.pow(5).unwrap())
            .mul(&Coefficient::one().add(&q.pow(3).unwrap()))
            .mul(&Coefficient::one().add(&q.pow(2).unwrap()))
            .neg();
        out.push(coeff_check(
            "derived/cd-coefficient",
            "that coefficient equals -p12^5 q^5 (1+q^3)(1+q^2)",
            &cd_coeff,
            &expect_cd,
        ));
        out.push(CheckRecord::expect(
            "derived/cd-member",
            "the pair elimination lies in the ideal",
            self.oracle.is_in_ideal(&h),
            "normal form nonzero",
        ));
        out
    }

    /// Hardness of the six letters and the classification of all fifteen
    /// bracketed pairs.
    pub fn verify_hard_letters(&self) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        for l in Letter::DESCENDING {
            out.push(CheckRecord::expect(
                format!("hard/letter-{}", l.name()),
                format!("[{}] is hard", l.name()),
                self.oracle.is_hard(self.letter(l)),
                "tests non-hard",
            ));
        }

        #[derive(Debug, PartialEq, Eq, Clone, Copy)]
        enum PairClass {
            InList(Letter),
            NotStandard,
            NotHard,
            Hard,
        }
        use PairClass::*;
        let expected: &[(Letter, Letter, PairClass)] = &[
            (Letter::A, Letter::B, NotHard),
            (Letter::A, Letter::C, NotHard),
            (Letter::A, Letter::D, NotHard),
            (Letter::A, Letter::E, NotHard),
            (Letter::A, Letter::F, InList(Letter::B)),
            (Letter::B, Letter::C, NotHard),
            (Letter::B, Letter::D, InList(Letter::C)),
            (Letter::B, Letter::E, NotHard),
            (Letter::B, Letter::F, InList(Letter::D)),
            (Letter::C, Letter::D, NotHard),
            (Letter::C, Letter::E, NotStandard),
            (Letter::C, Letter::F, NotStandard),
            (Letter::D, Letter::E, NotHard),
            (Letter::D, Letter::F, InList(Letter::E)),
            (Letter::E, Letter::F, NotHard),
        ];
        for (x, y, want) in expected {
            let tree =
                BracketTree::pair(self.letter(*x).tree.clone(), self.letter(*y).tree.clone());
            let word = x.word().concat(&y.word());
            let got = if !tree.is_standard_nonassociative() {
                NotStandard
            } else if let Some(l) = Letter::DESCENDING
                .iter()
                .find(|l| l.word() == word && self.letter(**l).tree == tree)
            {
                InList(*l)
            } else if self.oracle.is_hard_word(&word) {
                Hard
            } else {
                NotHard
            };
            out.push(CheckRecord::expect(
                format!("hard/pair-{}{}", x.name(), y.name()),
                format!("[[{}],[{}]] classifies as {:?}", x.name(), y.name(), want),
                got == *want,
                format!("classified as {:?}", got),
            ));
        }
        out
    }

    /// Every standard word of constitution at most (3,6) outside the
    /// generator list tests non-hard.
    pub fn verify_standard_sweep(&self) -> Vec<CheckRecord> {
        let bound = Constitution::new(3, 6);
        let words = crate::lyndon::enumerate_standard(bound);
        let letters: Vec<Word> = Letter::DESCENDING.iter().map(|l| l.word()).collect();
        let ds: Vec<Constitution> = {
            let mut v: Vec<Constitution> = words.iter().map(|w| w.constitution()).collect();
            v.sort();
            v.dedup();
            v
        };
        self.oracle.warm_blocks(&ds);
        let mut bad = Vec::new();
        let mut count = 0usize;
        for w in &words {
            if letters.contains(w) {
                continue;
            }
            count += 1;
            if self.oracle.is_hard_word(w) {
                bad.push(w.to_string());
            }
        }
        vec![CheckRecord::expect(
            "hard/standard-sweep",
            format!("all {count} other standard words of constitution <= (3,6) are non-hard"),
            bad.is_empty(),
            format!("hard words found: {}", bad.join(", ")),
        )]
    }

    /// For every constitution of total degree at most `max_total`, the
    /// dimension of the quotient component equals the number of PBW
    /// monomials in the six letters.
    pub fn verify_dimension_identity(&self, max_total: u32) -> Vec<CheckRecord> {
        let mut ds = Vec::new();
        for total in 1..=max_total {
            for m1 in 0..=total {
                ds.push(Constitution::new(m1, total - m1));
            }
        }
        self.oracle.warm_blocks(&ds);
        ds.par_iter()
            .map(|d| {
                let free_dim = self.oracle.block(*d).dim();
                let rank = self.oracle.rank(*d);
                let pbw = self.pbw_count(*d);
                CheckRecord::expect(
                    format!("dimension/{}", d),
                    format!("free dim {free_dim} - rank {rank} = {pbw} PBW monomials at {d}"),
                    free_dim - rank == pbw,
                    format!("quotient dim {} vs PBW count {pbw}", free_dim - rank),
                )
            })
            .collect()
    }

    /// The two structure constants and the three vanishing brackets among
    /// the letters; returns the constants for reuse.
    pub fn verify_structure_constants(
        &self,
    ) -> (Vec<CheckRecord>, Option<Coefficient>, Option<Coefficient>) {
        let mut out = Vec::new();
        let cf = skew_bracket(self.value(Letter::C), self.value(Letter::F), &self.chars);
        let dd = self.value(Letter::D).mul(self.value(Letter::D));
        let alpha =
            self.proportionality("structure/alpha", "[[C],[F]] = alpha [D]^2", &cf, &dd, &mut out);
        let ce = skew_bracket(self.value(Letter::C), self.value(Letter::E), &self.chars);
        let ddd = dd.mul(self.value(Letter::D));
        let beta =
            self.proportionality("structure/beta", "[[C],[E]] = beta [D]^3", &ce, &ddd, &mut out);
        for (x, y, name) in [
            (Letter::B, Letter::C, "structure/bc"),
            (Letter::C, Letter::D, "structure/cd"),
            (Letter::D, Letter::E, "structure/de"),
        ] {
            let v = skew_bracket(self.value(x), self.value(y), &self.chars);
            out.push(CheckRecord::expect(
                name,
                format!("[[{}],[{}]] = 0 modulo the ideal", x.name(), y.name()),
                self.oracle.is_in_ideal(&v),
                self.oracle.normal_form(&v).render(),
            ));
        }
        (out, alpha, beta)
    }

    /// Solve `lhs = c * rhs` modulo the ideal; unique because the normal
    /// form of `rhs` is nonzero.
    fn proportionality(
        &self,
        name: &str,
        subject: &str,
        lhs: &SkewPolynomial,
        rhs: &SkewPolynomial,
        out: &mut Vec<CheckRecord>,
    ) -> Option<Coefficient> {
        let nl = self.oracle.normal_form(lhs);
        let nr = self.oracle.normal_form(rhs);
        let Ok((lw, lc)) = nr.leading_term() else {
            out.push(CheckRecord::fail(name, subject, "right side reduces to zero"));
            return None;
        };
        let c = match nl.coefficient(lw) {
            Some(v) => v.div(lc).expect("leading coefficient nonzero"),
            None => Coefficient::zero(),
        };
        let ok = nl.sub(&nr.scale(&c)).is_zero();
        out.push(CheckRecord::expect(
            name,
            format!("{subject}, with the constant = {c}"),
            ok,
            "no scalar makes the difference vanish",
        ));
        if ok {
            Some(c)
        } else {
            None
        }
    }

    /// The nested brackets of each letter against its own derivative
    /// vanish modulo the ideal at the stated depth.
    pub fn verify_nested_vanishing(&self, mode: VerifyMode) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        let depth = |l: Letter| match l {
            Letter::A | Letter::E | Letter::F => 1usize,
            Letter::C => 2,
            Letter::B | Letter::D => 3,
        };
        for l in Letter::DESCENDING {
            let i = if l == Letter::F { 2 } else { 1 };
            let mut nested = derivation(i, self.value(l), &self.chars);
            for _ in 0..depth(l) {
                nested = skew_bracket(self.value(l), &nested, &self.chars);
            }
            let name = format!("nested/{}-d{}", l.name(), i);
            let subject = format!(
                "the {}-fold nested bracket of [{}] against d{}([{}]) vanishes mod ideal",
                depth(l),
                l.name(),
                i,
                l.name()
            );
            let heavy = nested
                .terms()
                .next()
                .map(|(w, _)| w.constitution().total() > 12)
                .unwrap_or(false);
            if heavy && !mode.exact_everywhere {
                let r = self
                    .oracle
                    .probabilistic_is_zero(&nested, mode.trials, mode.seed);
                out.push(CheckRecord::expect(
                    name,
                    format!(
                        "{subject} (probabilistic, {} trials, error bound {:.3e})",
                        r.trials, r.error_bound
                    ),
                    r.is_zero,
                    r.witness.unwrap_or_default(),
                ));
            } else {
                out.push(CheckRecord::expect(
                    name,
                    subject,
                    nested.is_zero() || self.oracle.is_in_ideal(&nested),
                    "normal form nonzero",
                ));
            }
            // The other derivation annihilates the letter, so the nested
            // bracket vanishes syntactically.
            let j = if i == 1 { 2 } else { 1 };
            let dj = derivation(j, self.value(l), &self.chars);
            out.push(CheckRecord::expect(
                format!("nested/{}-d{}", l.name(), j),
                format!("d{}([{}]) = 0 makes its nested bracket vanish", j, l.name()),
                dj.is_zero() && skew_bracket(self.value(l), &dj, &self.chars).is_zero(),
                dj.render(),
            ));
        }
        out
    }

    /// Bicharacter values on the letters and the height table at a finite
    /// order `t`; at small orders the power-derivative identity for [B] is
    /// verified inside the quotient.
    pub fn verify_heights(t: u32) -> Result<Vec<CheckRecord>, CoeffError> {
        let inst = G2Instance::cyclotomic(t)?;
        let mut out = Vec::new();
        let q = inst.chars.p(2, 2).clone();
        for l in Letter::DESCENDING {
            let d = l.constitution();
            let got = inst.chars.p_form(d, d);
            let exp_pow = match l {
                Letter::A | Letter::C | Letter::E => 3,
                Letter::B | Letter::D | Letter::F => 1,
            };
            out.push(coeff_check(
                format!("heights/t{t}/puu-{}", l.name()),
                format!("p({0},{0}) = q^{1}", l.name(), exp_pow),
                &got,
                &q.pow(exp_pow).unwrap(),
            ));
        }
        for l in Letter::DESCENDING {
            let d = l.constitution();
            let puu = inst.chars.p_form(d, d);
            let mut order = None;
            let mut pw = Coefficient::one();
            for m in 1..=t {
                pw = pw.mul(&puu);
                if pw.sub(&Coefficient::one()).is_zero() {
                    order = Some(m);
                    break;
                }
            }
            let expected = match l {
                Letter::B | Letter::D | Letter::F => t,
                Letter::A | Letter::C | Letter::E => {
                    if t % 3 == 0 {
                        t / 3
                    } else {
                        t
                    }
                }
            };
            out.push(CheckRecord::expect(
                format!("heights/t{t}/order-{}", l.name()),
                format!("height of [{}] at order {t} is {expected}", l.name()),
                order == Some(expected),
                format!("computed order {:?}", order),
            ));
        }
        if t <= 7 {
            let b = inst.value(Letter::B).clone();
            let lhs = derivation(1, &b.pow(t), &inst.chars);
            let mut rhs = derivation(1, &b, &inst.chars);
            for _ in 0..t - 1 {
                rhs = skew_bracket(&b, &rhs, &inst.chars);
            }
            let twist = inst
                .chars
                .p_form(Letter::B.constitution(), Constitution::new(1, 0))
                .pow(t as i64 - 1)
                .unwrap();
            let diff = lhs.sub(&rhs.scale(&twist));
            let ok = diff.is_zero() || inst.oracle.is_in_ideal(&diff);
            out.push(CheckRecord::expect(
                format!("heights/t{t}/power-derivative-B"),
                format!(
                    "d1([B]^{t}) equals the twisted {}-fold nested bracket",
                    t - 1
                ),
                ok,
                "difference not in the ideal",
            ));
        }
        Ok(out)
    }

    /// The complete verification suite for this instance, in registry
    /// order; height tables for the three sample orders are appended.
    pub fn verify_all(&self, mode: VerifyMode) -> Vec<CheckRecord> {
        let mut out = Vec::new();
        out.extend(self.verify_parameters());
        out.extend(self.verify_relation_coefficients());
        out.extend(self.verify_derivative_table());
        out.extend(self.verify_derived_relations());
        out.extend(self.verify_hard_letters());
        out.extend(self.verify_standard_sweep());
        out.extend(self.verify_dimension_identity(9));
        let (sc, _, _) = self.verify_structure_constants();
        out.extend(sc);
        out.extend(self.verify_nested_vanishing(mode));
        for t in [5, 7, 9] {
            out.extend(Self::verify_heights(t).expect("admissible orders"));
        }
        out
    }
}

/// One generation of the subword rewriting `x1^2 x2 -> -b1 x1x2x1 - b2
/// x2x1^2`: every term whose word does not start with x2 is rewritten at
/// the leftmost occurrence; the outputs are not revisited.
fn rewrite_x1x1x2_once(
    f: &SkewPolynomial,
    b1: &Coefficient,
    b2: &Coefficient,
) -> SkewPolynomial {
    let pattern = Word::from_letters(&[1, 1, 2]);
    let sub1 = Word::from_letters(&[1, 2, 1]);
    let sub2 = Word::from_letters(&[2, 1, 1]);
    let mut out = SkewPolynomial::zero();
    for (w, c) in f.terms() {
        if w.letters().first() == Some(&2) {
            out.add_term(w.clone(), c.clone());
            continue;
        }
        match w.find_subword(&pattern) {
            None => out.add_term(w.clone(), c.clone()),
            Some(at) => {
                out.add_term(w.splice(at, 3, &sub1), c.mul(b1).neg());
                out.add_term(w.splice(at, 3, &sub2), c.mul(b2).neg());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_builds_with_expected_letters() {
        let g = G2Instance::new();
        assert_eq!(
            g.letter(Letter::C).word,
            Word::from_letters(&[1, 2, 1, 2, 2])
        );
        assert_eq!(g.relations().len(), 2);
        for r in g.verify_parameters() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn relation_coefficients_match() {
        let g = G2Instance::new();
        for r in g.verify_relation_coefficients() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn derivative_table_matches() {
        let g = G2Instance::new();
        for r in g.verify_derivative_table() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn derived_relations_match() {
        let g = G2Instance::new();
        for r in g.verify_derived_relations() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn pair_classification_matches() {
        let g = G2Instance::new();
        for r in g.verify_hard_letters() {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn pbw_counts_at_spot_checked_constitutions() {
        // Frozen from a hand enumeration of solutions of
        // nA(1,0) + nB(1,1) + nC(2,3) + nD(1,2) + nE(1,3) + nF(0,1) = d.
        let g = G2Instance::new();
        assert_eq!(g.pbw_count(Constitution::new(2, 4)), 9);
        assert_eq!(g.pbw_count(Constitution::new(4, 5)), 19);
        assert_eq!(g.pbw_count(Constitution::new(3, 6)), 20);
        assert_eq!(g.pbw_count(Constitution::new(5, 0)), 1);
        assert_eq!(g.pbw_count(Constitution::new(0, 3)), 1);
    }

    #[test]
    fn structure_constants_exist() {
        let g = G2Instance::new();
        let (records, alpha, beta) = g.verify_structure_constants();
        for r in records {
            assert!(r.passed(), "{r}");
        }
        assert!(alpha.is_some());
        assert!(beta.is_some());
    }

    #[test]
    fn pbw_decompose_round_trips() {
        let g = G2Instance::new();
        let m = vec![Letter::F, Letter::D, Letter::B];
        let v = g.pbw_monomial_value(&m);
        let decomp = g.pbw_decompose(&v).unwrap();
        assert_eq!(decomp.len(), 1);
        assert!(decomp[&m].eq_coeff(&Coefficient::one()));
    }

    #[test]
    fn heights_tables() {
        for t in [5, 7, 9] {
            for r in G2Instance::verify_heights(t).unwrap() {
                assert!(r.passed(), "{r}");
            }
        }
    }
}
