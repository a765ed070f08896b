use std::time::Instant;
use qborel_core::freealg::{skew_bracket, CharacterData, Constitution, SkewPolynomial, Word};
use qborel_core::reduce::{ReductionOracle, RelationSet};

fn serre() -> RelationSet {
    let ch = CharacterData::g2_generic();
    let x1 = SkewPolynomial::x1();
    let x2 = SkewPolynomial::x2();
    let b = skew_bracket(&x1, &x2, &ch);
    let d = skew_bracket(&b, &x2, &ch);
    let e = skew_bracket(&d, &x2, &ch);
    let r1 = skew_bracket(&e, &x2, &ch);
    let r2 = skew_bracket(&x1, &b, &ch);
    RelationSet::new(vec![r1, r2])
}

#[test]
fn probe_exact_blocks() {
    let oracle = ReductionOracle::new(serre());
    for (m1, m2) in [(4u32, 5u32), (3, 6), (5, 4), (4, 4), (2, 6), (2, 7), (3, 8)] {
        let d = Constitution::new(m1, m2);
        let t = Instant::now();
        let rank = oracle.rank(d);
        let dim = oracle.block(d).dim();
        println!("block {d}: dim {dim} rank {rank} in {:?}", t.elapsed());
    }
}

#[test]
fn probe_modular_59() {
    let oracle = ReductionOracle::new(serre());
    let r1 = oracle.relations().generators()[0].clone();
    let pad_l = SkewPolynomial::from_word(Word::from_letters(&[1,2,1,2,2,1,2,2]));
    let pad_r = SkewPolynomial::from_word(Word::from_letters(&[2,2]));
    let f = pad_l.mul(&r1).mul(&pad_r);
    let t = Instant::now();
    let out = oracle.probabilistic_is_zero(&f, 3, 12345);
    println!("(5,9) probabilistic x3: {:?}  zero={} err<{:.3e}", t.elapsed(), out.is_zero, out.error_bound);
    assert!(out.is_zero);
}
