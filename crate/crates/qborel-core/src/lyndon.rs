//! Standard (Lyndon) words, Shirshov bracketing and super-letters.
//!
//! A nonempty word `u` is standard when `vw > wv` for every decomposition
//! `u = vw` with both parts nonempty. Each standard word carries a unique
//! bracketing making it a standard non-associative word; it is found by
//! splitting off the shortest proper standard prefix whose complement is
//! standard, and recursing.

use std::fmt;

use thiserror::Error;

use crate::coeff::Coefficient;
use crate::freealg::{skew_bracket, CharacterData, Constitution, SkewPolynomial, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LyndonError {
    #[error("the empty word is neither standard nor non-standard")]
    EmptyWord,
    #[error("word {0} is not standard")]
    NotStandard(String),
}

/// True when `vw > wv` holds for every split of `w` into nonempty parts.
pub fn is_standard(w: &Word) -> Result<bool, LyndonError> {
    if w.is_empty() {
        return Err(LyndonError::EmptyWord);
    }
    let n = w.len();
    for k in 1..n {
        let v = w.slice(0..k);
        let tail = w.slice(k..n);
        if v.concat(&tail) <= tail.concat(&v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All standard words with constitution componentwise at most `max`,
/// in decreasing word order.
pub fn enumerate_standard(max: Constitution) -> Vec<Word> {
    let mut out = Vec::new();
    let mut prefix: Vec<u8> = Vec::new();
    fn rec(m1: u32, m2: u32, prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
        if !prefix.is_empty() {
            let w = Word::from_letters(prefix);
            if is_standard(&w).unwrap() {
                out.push(w);
            }
        }
        // Letter 1 first keeps the output in decreasing word order within a
        // fixed length; a final sort fixes the cross-length comparisons.
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
    rec(max.m1, max.m2, &mut prefix, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

/// A bracket arrangement over a word: either a letter or a pair of
/// sub-arrangements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketTree {
    Leaf(u8),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn pair(left: BracketTree, right: BracketTree) -> Self {
        BracketTree::Node(Box::new(left), Box::new(right))
    }

    /// Flatten to the underlying word.
    pub fn word(&self) -> Word {
        let mut letters = Vec::new();
        self.collect_letters(&mut letters);
        Word::from_letters(&letters)
    }

    fn collect_letters(&self, out: &mut Vec<u8>) {
        match self {
            BracketTree::Leaf(l) => out.push(*l),
            BracketTree::Node(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
        }
    }

    /// Evaluate the tree with the skew commutator at every node.
    pub fn evaluate(&self, chars: &CharacterData) -> SkewPolynomial {
        match self {
            BracketTree::Leaf(1) => SkewPolynomial::x1(),
            BracketTree::Leaf(2) => SkewPolynomial::x2(),
            BracketTree::Leaf(_) => unreachable!("letters are 1 or 2"),
            BracketTree::Node(a, b) => {
                skew_bracket(&a.evaluate(chars), &b.evaluate(chars), chars)
            }
        }
    }

    /// Check the defining conditions of standard non-associative words:
    /// at every node `[v][w]` the words `v > w` are standard, and whenever
    /// the left factor is itself a node `[[v1][v2]]`, `v2 <= w`.
    pub fn is_standard_nonassociative(&self) -> bool {
        match self {
            BracketTree::Leaf(_) => true,
            BracketTree::Node(a, b) => {
                let (va, vb) = (a.word(), b.word());
                if va <= vb {
                    return false;
                }
                if is_standard(&va) != Ok(true) || is_standard(&vb) != Ok(true) {
                    return false;
                }
                if let BracketTree::Node(_, a2) = a.as_ref() {
                    if a2.word() > vb {
                        return false;
                    }
                }
                a.is_standard_nonassociative() && b.is_standard_nonassociative()
            }
        }
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Leaf(l) => write!(f, "x{}", l),
            BracketTree::Node(a, b) => write!(f, "[{},{}]", a, b),
        }
    }
}

/// The unique standard bracketing of a standard word, built by splitting
/// off the left factor of minimal length.
pub fn shirshov_bracketing(w: &Word) -> Result<BracketTree, LyndonError> {
    if !is_standard(w)? {
        return Err(LyndonError::NotStandard(w.to_string()));
    }
    if w.len() == 1 {
        return Ok(BracketTree::Leaf(w.letters()[0]));
    }
    for k in 1..w.len() {
        let v = w.slice(0..k);
        let tail = w.slice(k..w.len());
        if is_standard(&v) == Ok(true) && is_standard(&tail) == Ok(true) {
            return Ok(BracketTree::pair(
                shirshov_bracketing(&v)?,
                shirshov_bracketing(&tail)?,
            ));
        }
    }
    unreachable!("every standard word of length > 1 admits a standard split")
}

/// The unique factorization of a word into a nondecreasing product of
/// standard words (Duval's algorithm; nondecreasing in this orientation of
/// the order corresponds to the classical non-increasing Lyndon
/// factorization).
pub fn standard_factorization(w: &Word) -> Vec<Word> {
    let s = w.letters();
    let n = s.len();
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        let mut i = k;
        let mut j = k + 1;
        while j < n && s[i] <= s[j] {
            if s[i] < s[j] {
                i = k;
            } else {
                i += 1;
            }
            j += 1;
        }
        let len = j - i;
        while k <= i {
            out.push(w.slice(k..k + len));
            k += len;
        }
    }
    out
}

/// A standard word together with its bracketing and skew-polynomial value.
#[derive(Debug, Clone)]
pub struct SuperLetter {
    pub word: Word,
    pub tree: BracketTree,
    pub value: SkewPolynomial,
}

impl SuperLetter {
    pub fn build(w: &Word, chars: &CharacterData) -> Result<SuperLetter, LyndonError> {
        let tree = shirshov_bracketing(w)?;
        let value = tree.evaluate(chars);
        Ok(SuperLetter {
            word: w.clone(),
            tree,
            value,
        })
    }

    pub fn constitution(&self) -> Constitution {
        self.word.constitution()
    }

    /// Leading coefficient of the value; 1 for every super-letter.
    pub fn leading_coefficient(&self) -> Coefficient {
        self.value
            .leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|_| Coefficient::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[u8]) -> Word {
        Word::from_letters(letters)
    }

    #[test]
    fn standard_words_basics() {
        assert_eq!(is_standard(&w(&[1, 2])), Ok(true));
        assert_eq!(is_standard(&w(&[2, 1])), Ok(false));
        assert_eq!(is_standard(&w(&[1, 2, 1, 2, 2])), Ok(true));
        assert_eq!(is_standard(&Word::empty()), Err(LyndonError::EmptyWord));
    }

    #[test]
    fn enumeration_small() {
        let words = enumerate_standard(Constitution::new(1, 1));
        assert_eq!(words, vec![w(&[1]), w(&[1, 2]), w(&[2])]);
        let to_23 = enumerate_standard(Constitution::new(2, 3));
        assert!(to_23.contains(&w(&[1, 2, 1, 2, 2])));
    }

    #[test]
    fn counts_match_necklace_numbers() {
        // Number of standard words of length n over two letters:
        // (1/n) sum_{d | n} mu(d) 2^{n/d}.
        fn necklace(n: u32) -> usize {
            fn mu(mut n: u32) -> i64 {
                let mut m = 1i64;
                let mut p = 2;
                while p * p <= n {
                    if n % p == 0 {
                        n /= p;
                        if n % p == 0 {
                            return 0;
                        }
                        m = -m;
                    }
                    p += 1;
                }
                if n > 1 {
                    m = -m;
                }
                m
            }
            let mut total = 0i64;
            for d in 1..=n {
                if n % d == 0 {
                    total += mu(d) * 2i64.pow(n / d);
                }
            }
            (total / n as i64) as usize
        }
        let all = enumerate_standard(Constitution::new(8, 8));
        for n in 1..=8u32 {
            let count = all.iter().filter(|w| w.len() as u32 == n).count();
            assert_eq!(count, necklace(n), "length {n}");
        }
        assert_eq!(necklace(4), 3);
    }

    #[test]
    fn standard_agrees_with_suffix_characterization() {
        // A word is standard iff it is strictly greater than each of its
        // proper suffixes under this orientation of the order.
        let all_words = |n: usize| -> Vec<Word> {
            (0..(1u32 << n))
                .map(|mask| {
                    let letters: Vec<u8> =
                        (0..n).map(|i| if mask >> i & 1 == 0 { 1 } else { 2 }).collect();
                    Word::from_letters(&letters)
                })
                .collect()
        };
        for n in 1..=8 {
            for word in all_words(n) {
                let by_def = is_standard(&word).unwrap();
                let by_suffix = (1..n).all(|k| word > word.slice(k..n));
                assert_eq!(by_def, by_suffix, "word {word}");
            }
        }
    }

    #[test]
    fn bracketing_of_the_generators() {
        assert_eq!(
            shirshov_bracketing(&w(&[1, 2])).unwrap(),
            BracketTree::pair(BracketTree::Leaf(1), BracketTree::Leaf(2))
        );
        // [C] = [[x1,x2],[[x1,x2],x2]]
        let c = shirshov_bracketing(&w(&[1, 2, 1, 2, 2])).unwrap();
        let b = BracketTree::pair(BracketTree::Leaf(1), BracketTree::Leaf(2));
        let d = BracketTree::pair(b.clone(), BracketTree::Leaf(2));
        assert_eq!(c, BracketTree::pair(b.clone(), d.clone()));
        assert_eq!(c.to_string(), "[[x1,x2],[[x1,x2],x2]]");
        // [E] = [[[x1,x2],x2],x2]
        let e = shirshov_bracketing(&w(&[1, 2, 2, 2])).unwrap();
        assert_eq!(e, BracketTree::pair(d, BracketTree::Leaf(2)));

        assert_eq!(
            shirshov_bracketing(&w(&[2, 1])).unwrap_err(),
            LyndonError::NotStandard("x2 x1".into())
        );
    }

    #[test]
    fn minimal_left_factor_agrees_with_longest_standard_suffix() {
        // The classical construction takes the longest proper standard
        // suffix as the right factor; both rules must agree on all standard
        // words up to length 9.
        for word in enumerate_standard(Constitution::new(9, 9)) {
            if word.len() < 2 || word.len() > 9 {
                continue;
            }
            let tree = shirshov_bracketing(&word).unwrap();
            let BracketTree::Node(_, right) = &tree else {
                panic!("length >= 2 must split");
            };
            let n = word.len();
            let longest_suffix = (1..n)
                .map(|k| word.slice(k..n))
                .filter(|s| is_standard(s) == Ok(true))
                .max_by(|a, b| a.len().cmp(&b.len()))
                .unwrap();
            assert_eq!(right.word(), longest_suffix, "word {word}");
        }
    }

    #[test]
    fn superletter_values() {
        let ch = CharacterData::g2_generic();
        let leaf = BracketTree::Leaf(2);
        assert_eq!(leaf.evaluate(&ch), SkewPolynomial::x2());

        let b = SuperLetter::build(&w(&[1, 2]), &ch).unwrap();
        let mut expect = SkewPolynomial::from_word(w(&[1, 2]));
        expect.add_term(w(&[2, 1]), Coefficient::p12().neg());
        assert_eq!(b.value, expect);

        let d = SuperLetter::build(&w(&[1, 2, 2]), &ch).unwrap();
        let (lw, lc) = d.value.leading_term().unwrap();
        assert_eq!(*lw, w(&[1, 2, 2]));
        assert!(lc.eq_coeff(&Coefficient::one()));
    }

    #[test]
    fn values_are_monic_with_their_word_leading() {
        let ch = CharacterData::g2_generic();
        for word in enumerate_standard(Constitution::new(3, 6)) {
            let s = SuperLetter::build(&word, &ch).unwrap();
            let (lw, lc) = s.value.leading_term().unwrap();
            assert_eq!(*lw, word, "leading word of [{word}]");
            assert!(lc.eq_coeff(&Coefficient::one()), "leading coeff of [{word}]");
            assert!(s.tree.is_standard_nonassociative());
        }
    }

    #[test]
    fn factorization_into_nondecreasing_standard_factors() {
        let all_words = |n: usize| -> Vec<Word> {
            (0..(1u32 << n))
                .map(|mask| {
                    let letters: Vec<u8> =
                        (0..n).map(|i| if mask >> i & 1 == 0 { 1 } else { 2 }).collect();
                    Word::from_letters(&letters)
                })
                .collect()
        };
        for n in 1..=9 {
            for word in all_words(n) {
                let factors = standard_factorization(&word);
                // Concatenation restores the word.
                let mut cat = Word::empty();
                for f in &factors {
                    assert_eq!(is_standard(f), Ok(true), "factor {f} of {word}");
                    cat = cat.concat(f);
                }
                assert_eq!(cat, word);
                // Factors are nondecreasing left to right.
                for pair in factors.windows(2) {
                    assert!(pair[0] <= pair[1], "factors of {word}");
                }
            }
        }
        // A standard word is its own single factor.
        let c = w(&[1, 2, 1, 2, 2]);
        assert_eq!(standard_factorization(&c), vec![c.clone()]);
        // The product D then B factors back into D, B.
        let db = w(&[1, 2, 2, 1, 2]);
        assert_eq!(
            standard_factorization(&db),
            vec![w(&[1, 2, 2]), w(&[1, 2])]
        );
    }

    #[test]
    fn superletter_order_is_word_order() {
        let ch = CharacterData::g2_generic();
        let words = [
            w(&[1]),
            w(&[1, 2]),
            w(&[1, 2, 1, 2, 2]),
            w(&[1, 2, 2]),
            w(&[1, 2, 2, 2]),
            w(&[2]),
        ];
        let letters: Vec<SuperLetter> = words
            .iter()
            .map(|word| SuperLetter::build(word, &ch).unwrap())
            .collect();
        for i in 0..letters.len() {
            for j in i + 1..letters.len() {
                assert!(letters[i].word > letters[j].word);
            }
        }
    }
}
