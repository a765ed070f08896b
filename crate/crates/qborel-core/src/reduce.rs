//! Bounded-constitution membership oracle for the two-sided ideal spanned
//! by the defining relations, with normal forms and the hardness test.
//!
//! The ideal is generated by multihomogeneous elements, so its component of
//! constitution `d` is exactly the span of the padded products `w1 * r * w2`
//! over words `w1, w2` and generators `r` that land in `d`. Each component
//! is echelonized by leading word with exact coefficient arithmetic:
//! denominator-free rows (integer Laurent polynomials), cross-multiplication
//! pivoting, and per-row content stripping to bound growth. The published
//! rows are monic and fully reduced, so a hardness test is a leading-word
//! lookup and a normal form is a single subtraction pass.
//!
//! Above the exact-arithmetic comfort zone a Schwartz-Zippel style fast
//! path evaluates every coefficient at random points of a large prime field
//! and repeats the elimination there.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coeff::{CoeffCtx, Coefficient, LaurentPoly, PrimeField, DEFAULT_PRIME};
use crate::freealg::{Constitution, SkewPolynomial, Word};
use crate::lyndon::SuperLetter;

/// Generators of the defining ideal; each must be multihomogeneous and
/// nonzero.
#[derive(Debug, Clone)]
pub struct RelationSet {
    generators: Vec<SkewPolynomial>,
}

impl RelationSet {
    pub fn new(generators: Vec<SkewPolynomial>) -> Self {
        for g in &generators {
            assert!(!g.is_zero(), "relation generators are nonzero");
            assert!(
                g.is_multihomogeneous(),
                "relation generators are multihomogeneous"
            );
        }
        RelationSet { generators }
    }

    pub fn generators(&self) -> &[SkewPolynomial] {
        &self.generators
    }
}

/// All words of one constitution in decreasing order, with index lookup.
/// Index 0 is the largest word, so "smaller index" means "larger word".
#[derive(Debug)]
pub struct WordTable {
    constitution: Constitution,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl WordTable {
    pub fn new(d: Constitution) -> Self {
        let mut words = Vec::new();
        fn rec(m1: u32, m2: u32, prefix: &mut Vec<u8>, out: &mut Vec<Word>) {
            if m1 == 0 && m2 == 0 {
                out.push(Word::from_letters(prefix));
                return;
            }
            // Letter x1 first: for fixed length this enumerates in
            // decreasing word order.
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
        rec(d.m1, d.m2, &mut Vec::new(), &mut words);
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        WordTable {
            constitution: d,
            words,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn constitution(&self) -> Constitution {
        self.constitution
    }
}

/// Sparse denominator-free row over a word table: entries sorted by index
/// ascending, so the first entry is the largest word.
type PolyRow = Vec<(usize, LaurentPoly)>;

fn row_normalize(row: &mut PolyRow, ctx: &CoeffCtx) {
    for (_, p) in row.iter_mut() {
        *p = p.normalize_in(ctx);
    }
    row.retain(|(_, p)| !p.is_zero());
    if row.is_empty() {
        return;
    }
    // Strip the common integer content and a common Laurent monomial.
    let mut content = num_bigint::BigInt::from(0);
    let (mut mq, mut mp) = (i64::MAX, i64::MAX);
    for (_, p) in row.iter() {
        content = num_integer::Integer::gcd(&content, &p.integer_content());
        if let Some((aq, ap)) = p.min_exponents() {
            mq = mq.min(aq);
            mp = mp.min(ap);
        }
    }
    let strip_int = !num_traits::One::is_one(&content) && !num_traits::Zero::is_zero(&content);
    for (_, p) in row.iter_mut() {
        if strip_int {
            *p = p.div_int_exact(&content);
        }
        if mq != 0 || mp != 0 {
            *p = p.shift_exponents(-mq, -mp);
        }
    }
    // Cross-multiplication pivoting accumulates genuine polynomial factors
    // shared by the whole row; without removing them the entry sizes grow
    // exponentially. The defining relations are homogeneous in the
    // p12-degree relative to the word, so every entry here is a monomial
    // times a univariate polynomial in q and a primitive-PRS gcd strips the
    // common factor cheaply. Skipped in a cyclotomic quotient, where a
    // polynomial factor need not be invertible.
    if ctx.cyclotomic_order().is_none() {
        row_strip_poly_content(row);
    }
}

fn row_strip_poly_content(row: &mut PolyRow) {
    let mut parts = Vec::with_capacity(row.len());
    for (_, p) in row.iter() {
        match p.split_p_monomial() {
            Some((_, _, dense)) => parts.push(dense),
            None => return,
        }
    }
    parts.sort_by_key(|d| d.len());
    let mut g = parts[0].clone();
    for part in &parts[1..] {
        if g.len() <= 1 {
            break;
        }
        g = crate::coeff::upoly_gcd(&g, part);
    }
    if g.len() <= 1 {
        return;
    }
    for (_, p) in row.iter_mut() {
        *p = p.div_exact_q_poly(&g);
    }
}

/// `row := pivot_lead * row - row_coeff * pivot`, cancelling `col`.
fn row_eliminate(row: &PolyRow, col: usize, pivot: &PolyRow, ctx: &CoeffCtx) -> PolyRow {
    let pivot_lead = &pivot[0].1;
    let coeff = &row
        .iter()
        .find(|(i, _)| *i == col)
        .expect("column present")
        .1;
    let mut out: PolyRow = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (row.iter().peekable(), pivot.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some((ia, pa)), Some((ib, pb))) => {
                if ia < ib {
                    out.push((*ia, pa.mul(pivot_lead)));
                    a.next();
                } else if ib < ia {
                    out.push((*ib, pb.mul(coeff).neg()));
                    b.next();
                } else {
                    let v = pa.mul(pivot_lead).sub(&pb.mul(coeff));
                    if !v.is_zero() {
                        out.push((*ia, v));
                    }
                    a.next();
                    b.next();
                }
            }
            (Some((ia, pa)), None) => {
                out.push((*ia, pa.mul(pivot_lead)));
                a.next();
            }
            (None, Some((ib, pb))) => {
                out.push((*ib, pb.mul(coeff).neg()));
                b.next();
            }
            (None, None) => break,
        }
    }
    let mut out = out;
    row_normalize(&mut out, ctx);
    out
}

/// One monic row of the published echelon.
#[derive(Debug, Clone)]
pub struct EchelonRow {
    pub lead: usize,
    pub entries: Vec<(usize, Coefficient)>,
}

impl EchelonRow {
    pub fn as_polynomial(&self, table: &WordTable) -> SkewPolynomial {
        let mut f = SkewPolynomial::zero();
        for (i, c) in &self.entries {
            f.add_term(table.word(*i).clone(), c.clone());
        }
        f
    }
}

/// The echelonized component of the ideal at one constitution. Rows are
/// monic with pairwise distinct leading words; leading words strictly
/// decrease down the row list, and no row's leading word occurs in any
/// other row.
#[derive(Debug)]
pub struct IdealBlock {
    constitution: Constitution,
    table: WordTable,
    rows: Vec<EchelonRow>,
    lead_set: BTreeSet<usize>,
}

impl IdealBlock {
    pub fn constitution(&self) -> Constitution {
        self.constitution
    }

    pub fn table(&self) -> &WordTable {
        &self.table
    }

    pub fn rows(&self) -> &[EchelonRow] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn is_lead_word(&self, w: &Word) -> bool {
        self.table
            .position(w)
            .map(|i| self.lead_set.contains(&i))
            .unwrap_or(false)
    }

    pub fn row_with_lead(&self, w: &Word) -> Option<&EchelonRow> {
        let i = self.table.position(w)?;
        self.rows.iter().find(|r| r.lead == i)
    }

    /// Reduce a coefficient vector over the table in place.
    fn reduce_vec(&self, v: &mut [Coefficient]) {
        for row in &self.rows {
            let c = v[row.lead].clone();
            if c.is_zero() {
                continue;
            }
            for (i, e) in &row.entries {
                v[*i] = v[*i].sub(&c.mul(e));
            }
        }
    }
}

/// Split `rem` into ordered pairs of constitutions.
fn constitution_splits(rem: Constitution) -> Vec<(Constitution, Constitution)> {
    let mut out = Vec::new();
    for a1 in 0..=rem.m1 {
        for a2 in 0..=rem.m2 {
            out.push((
                Constitution::new(a1, a2),
                Constitution::new(rem.m1 - a1, rem.m2 - a2),
            ));
        }
    }
    out
}

fn infer_ctx(rels: &RelationSet) -> CoeffCtx {
    for g in rels.generators() {
        for (_, c) in g.terms() {
            return c.ctx().clone();
        }
    }
    CoeffCtx::Generic
}

fn build_block(rels: &RelationSet, d: Constitution, ctx: &CoeffCtx) -> IdealBlock {
    let table = WordTable::new(d);
    // Forward elimination with pivots keyed by leading index.
    let mut pivots: HashMap<usize, PolyRow> = HashMap::new();
    for g in rels.generators() {
        let gc = g
            .terms()
            .next()
            .map(|(w, _)| w.constitution())
            .expect("nonzero generator");
        let Some(rem) = d.checked_sub(&gc) else {
            continue;
        };
        for (c1, c2) in constitution_splits(rem) {
            let left = WordTable::new(c1);
            let right = WordTable::new(c2);
            for i1 in 0..left.len() {
                for i2 in 0..right.len() {
                    let w1 = left.word(i1);
                    let w2 = right.word(i2);
                    let mut row: PolyRow = g
                        .terms()
                        .map(|(u, c)| {
                            let idx = table
                                .position(&w1.concat(u).concat(w2))
                                .expect("padded word stays in the component");
                            debug_assert!(c.denominator().is_one());
                            (idx, c.numerator().clone())
                        })
                        .collect();
                    row.sort_by_key(|(i, _)| *i);
                    row_normalize(&mut row, ctx);
                    // Fully reduce against the current pivots, then insert.
                    loop {
                        if row.is_empty() {
                            break;
                        }
                        let lead = row[0].0;
                        match pivots.get(&lead) {
                            Some(p) => row = row_eliminate(&row, lead, p, ctx),
                            None => {
                                pivots.insert(lead, row);
                                break;
                            }
                        }
                    }
                }
            }
        }
    }

    // Back-substitution: clear every pivot column from the other rows,
    // working from the smallest leading word upward.
    let mut leads: Vec<usize> = pivots.keys().copied().collect();
    leads.sort_unstable();
    for k in (0..leads.len()).rev() {
        let col = leads[k];
        let pivot = pivots.get(&col).cloned().expect("pivot present");
        for &other in leads.iter().take(k) {
            let row = pivots.get(&other).expect("row present");
            if row.iter().any(|(i, _)| *i == col) {
                let reduced = row_eliminate(row, col, &pivot, ctx);
                pivots.insert(other, reduced);
            }
        }
    }

    // Publish monic rows in decreasing leading word order.
    let mut rows: Vec<EchelonRow> = leads
        .iter()
        .map(|&lead| {
            let row = &pivots[&lead];
            let lc = Coefficient::from_poly(row[0].1.clone());
            let entries = row
                .iter()
                .map(|(i, p)| {
                    (
                        *i,
                        Coefficient::from_poly(p.clone())
                            .div(&lc)
                            .expect("leading coefficient nonzero"),
                    )
                })
                .collect();
            EchelonRow { lead, entries }
        })
        .collect();
    rows.sort_by_key(|r| r.lead);
    let lead_set = leads.into_iter().collect();
    IdealBlock {
        constitution: d,
        table,
        rows,
        lead_set,
    }
}

/// Outcome of the probabilistic membership test.
#[derive(Debug, Clone)]
pub struct ProbabilisticOutcome {
    pub is_zero: bool,
    pub trials: u32,
    /// Upper bound for the one-sided error of a "zero" verdict.
    pub error_bound: f64,
    pub witness: Option<String>,
}

/// Membership oracle with a per-constitution block cache. Deterministic:
/// results depend only on the relation set and the inputs.
pub struct ReductionOracle {
    rels: RelationSet,
    ctx: CoeffCtx,
    cache: Mutex<HashMap<Constitution, Arc<IdealBlock>>>,
}

impl ReductionOracle {
    pub fn new(rels: RelationSet) -> Self {
        let ctx = infer_ctx(&rels);
        ReductionOracle {
            rels,
            ctx,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn relations(&self) -> &RelationSet {
        &self.rels
    }

    pub fn block(&self, d: Constitution) -> Arc<IdealBlock> {
        if let Some(b) = self.cache.lock().unwrap().get(&d) {
            return b.clone();
        }
        let block = Arc::new(build_block(&self.rels, d, &self.ctx));
        self.cache
            .lock()
            .unwrap()
            .entry(d)
            .or_insert(block)
            .clone()
    }

    /// Precompute blocks for several constitutions in parallel.
    pub fn warm_blocks(&self, ds: &[Constitution]) {
        let fresh: Vec<Constitution> = {
            let cache = self.cache.lock().unwrap();
            ds.iter().filter(|d| !cache.contains_key(d)).copied().collect()
        };
        let built: Vec<(Constitution, IdealBlock)> = fresh
            .par_iter()
            .map(|d| (*d, build_block(&self.rels, *d, &self.ctx)))
            .collect();
        let mut cache = self.cache.lock().unwrap();
        for (d, b) in built {
            cache.entry(d).or_insert_with(|| Arc::new(b));
        }
    }

    /// The unique representative of `f` modulo the ideal component with no
    /// term reducible by the echelon; components are handled independently.
    pub fn normal_form(&self, f: &SkewPolynomial) -> SkewPolynomial {
        let mut out = SkewPolynomial::zero();
        for (d, comp) in f.components() {
            let block = self.block(d);
            let mut v = vec![Coefficient::zero(); block.dim()];
            for (w, c) in comp.terms() {
                v[block.table.position(w).expect("word in component")] = c.clone();
            }
            block.reduce_vec(&mut v);
            for (i, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    out.add_term(block.table.word(i).clone(), c);
                }
            }
        }
        out
    }

    pub fn is_in_ideal(&self, f: &SkewPolynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// A word fails to be hard exactly when it occurs as a leading word of
    /// the ideal component of its constitution.
    pub fn is_hard_word(&self, w: &Word) -> bool {
        !self.block(w.constitution()).is_lead_word(w)
    }

    pub fn is_hard(&self, s: &SuperLetter) -> bool {
        self.is_hard_word(&s.word)
    }

    pub fn rank(&self, d: Constitution) -> usize {
        self.block(d).rank()
    }

    /// Dimension of the quotient component at `d`.
    pub fn quotient_dim(&self, d: Constitution) -> usize {
        let b = self.block(d);
        b.dim() - b.rank()
    }

    /// Schwartz-Zippel membership: run the elimination with every
    /// coefficient evaluated at random points of a large prime field. A
    /// nonzero reduction is a witness for "not in the ideal"; agreement on
    /// all trials reports "zero" with the stated error bound. Generic
    /// coefficients only.
    pub fn probabilistic_is_zero(
        &self,
        f: &SkewPolynomial,
        trials: u32,
        seed: u64,
    ) -> ProbabilisticOutcome {
        assert!(trials >= 1);
        assert!(
            self.ctx.cyclotomic_order().is_none(),
            "probabilistic path runs over the generic field"
        );
        let field = PrimeField::new(DEFAULT_PRIME);
        if f.is_zero() {
            return ProbabilisticOutcome {
                is_zero: true,
                trials,
                error_bound: 0.0,
                witness: None,
            };
        }
        let comps: Vec<(Constitution, SkewPolynomial)> = f.components().into_iter().collect();
        let mut max_dim = 0usize;
        let mut max_span = 0u64;
        for (d, _) in &comps {
            max_dim = max_dim.max(WordTable::new(*d).len());
        }
        for g in self.rels.generators() {
            for (_, c) in g.terms() {
                max_span = max_span.max(c.degree_span());
            }
        }
        let per_trial =
            ((max_dim as f64) * (max_span.max(1) as f64) / (field.order() as f64)).min(1.0);
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            for (d, comp) in &comps {
                match self.modular_component_reduce(*d, comp, &field, &mut rng) {
                    None => {}
                    Some(witness_word) => {
                        return ProbabilisticOutcome {
                            is_zero: false,
                            trials: trial + 1,
                            error_bound: 0.0,
                            witness: Some(format!(
                                "trial {trial}: irreducible term at {witness_word}"
                            )),
                        };
                    }
                }
            }
        }
        ProbabilisticOutcome {
            is_zero: true,
            trials,
            error_bound: per_trial.powi(trials as i32),
            witness: None,
        }
    }

    /// Reduce one component at a random point; `None` means it vanished.
    fn modular_component_reduce(
        &self,
        d: Constitution,
        comp: &SkewPolynomial,
        field: &PrimeField,
        rng: &mut ChaCha8Rng,
    ) -> Option<Word> {
        'resample: for _ in 0..64 {
            let q0 = rng.gen_range(2..field.order() - 1);
            let p0 = rng.gen_range(2..field.order() - 1);
            let table = WordTable::new(d);
            let mut fvec = vec![0u64; table.len()];
            for (w, c) in comp.terms() {
                match c.eval_at_point(q0, p0, field) {
                    Ok(v) => fvec[table.position(w).expect("word in component")] = v,
                    Err(_) => continue 'resample,
                }
            }
            // Sparse forward elimination over the prime field.
            let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
            for g in self.rels.generators() {
                let gc = g.terms().next().map(|(w, _)| w.constitution()).unwrap();
                let Some(rem) = d.checked_sub(&gc) else {
                    continue;
                };
                let gterms: Vec<(&Word, u64)> = {
                    let mut v = Vec::new();
                    for (w, c) in g.terms() {
                        match c.eval_at_point(q0, p0, field) {
                            Ok(x) => v.push((w, x)),
                            Err(_) => continue 'resample,
                        }
                    }
                    v
                };
                for (c1, c2) in constitution_splits(rem) {
                    let left = WordTable::new(c1);
                    let right = WordTable::new(c2);
                    for i1 in 0..left.len() {
                        for i2 in 0..right.len() {
                            let (w1, w2) = (left.word(i1), right.word(i2));
                            let mut row: Vec<(usize, u64)> = gterms
                                .iter()
                                .map(|(u, c)| {
                                    (table.position(&w1.concat(u).concat(w2)).unwrap(), *c)
                                })
                                .collect();
                            row.sort_by_key(|(i, _)| *i);
                            insert_mod_row(&mut pivots, row, field);
                        }
                    }
                }
            }
            // Reduce the target vector.
            let mut fs: Vec<(usize, u64)> = fvec
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(i, v)| (i, *v))
                .collect();
            loop {
                let Some(&(lead, coeff)) = fs.first() else {
                    return None;
                };
                match pivots.get(&lead) {
                    Some(p) => fs = mod_row_subtract(&fs, coeff, p, field),
                    None => return Some(table.word(lead).clone()),
                }
            }
        }
        panic!("could not find a sample point with nonvanishing denominators")
    }
}

/// Insert a row into the pivot map, reducing it first. Pivot rows are
/// scaled so the leading entry is 1.
fn insert_mod_row(
    pivots: &mut HashMap<usize, Vec<(usize, u64)>>,
    mut row: Vec<(usize, u64)>,
    field: &PrimeField,
) {
    row.retain(|(_, v)| *v != 0);
    loop {
        let Some(&(lead, coeff)) = row.first() else {
            return;
        };
        match pivots.get(&lead) {
            Some(p) => row = mod_row_subtract(&row, coeff, p, field),
            None => {
                let inv = field.inv(coeff);
                for (_, v) in row.iter_mut() {
                    *v = field.mul(*v, inv);
                }
                pivots.insert(lead, row);
                return;
            }
        }
    }
}

/// `row - c * pivot` over the prime field; `pivot` is monic.
fn mod_row_subtract(
    row: &[(usize, u64)],
    c: u64,
    pivot: &[(usize, u64)],
    field: &PrimeField,
) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (row.iter().peekable(), pivot.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some((ia, va)), Some((ib, vb))) => {
                if ia < ib {
                    out.push((*ia, *va));
                    a.next();
                } else if ib < ia {
                    out.push((*ib, field.sub(0, field.mul(c, *vb))));
                    b.next();
                } else {
                    let v = field.sub(*va, field.mul(c, *vb));
                    if v != 0 {
                        out.push((*ia, v));
                    }
                    a.next();
                    b.next();
                }
            }
            (Some((ia, va)), None) => {
                out.push((*ia, *va));
                a.next();
            }
            (None, Some((ib, vb))) => {
                out.push((*ib, field.sub(0, field.mul(c, *vb))));
                b.next();
            }
            (None, None) => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::{skew_bracket, CharacterData};

    fn w(letters: &[u8]) -> Word {
        Word::from_letters(letters)
    }

    /// The two defining relations of the G2 quantization, built by nested
    /// skew brackets.
    fn serre_relations() -> RelationSet {
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

    /// Independent rank oracle: dense elimination over fraction
    /// coefficients, used only to cross-check the production path.
    fn brute_force_rank(rels: &RelationSet, d: Constitution) -> usize {
        let table = WordTable::new(d);
        let mut rows: Vec<Vec<Coefficient>> = Vec::new();
        for g in rels.generators() {
            let gc = g.terms().next().unwrap().0.constitution();
            let Some(rem) = d.checked_sub(&gc) else { continue };
            for (c1, c2) in constitution_splits(rem) {
                let left = WordTable::new(c1);
                let right = WordTable::new(c2);
                for i1 in 0..left.len() {
                    for i2 in 0..right.len() {
                        let mut row = vec![Coefficient::zero(); table.len()];
                        for (u, c) in g.terms() {
                            let idx = table
                                .position(&left.word(i1).concat(u).concat(right.word(i2)))
                                .unwrap();
                            row[idx] = row[idx].add(c);
                        }
                        rows.push(row);
                    }
                }
            }
        }
        let mut rank = 0;
        let n = table.len();
        let mut pivot_rows: Vec<Vec<Coefficient>> = Vec::new();
        for mut row in rows {
            for p in &pivot_rows {
                let lead = p.iter().position(|c| !c.is_zero()).unwrap();
                if !row[lead].is_zero() {
                    let f = row[lead].div(&p[lead]).unwrap();
                    for j in 0..n {
                        row[j] = row[j].sub(&f.mul(&p[j]));
                    }
                }
            }
            if row.iter().any(|c| !c.is_zero()) {
                rank += 1;
                pivot_rows.push(row);
            }
        }
        rank
    }

    #[test]
    fn pure_x2_components_are_empty() {
        let oracle = ReductionOracle::new(serre_relations());
        for n in 1..=6 {
            assert_eq!(oracle.rank(Constitution::new(0, n)), 0);
        }
    }

    #[test]
    fn quadratic_relation_block() {
        let oracle = ReductionOracle::new(serre_relations());
        let d = Constitution::new(2, 1);
        let block = oracle.block(d);
        assert_eq!(block.rank(), 1);
        assert_eq!(block.rank(), brute_force_rank(oracle.relations(), d));
        // The single leading word is x1 x1 x2.
        assert!(block.is_lead_word(&w(&[1, 1, 2])));

        // normal_form(x1^2 x2) = -b1 x1 x2 x1 - b2 x2 x1^2.
        let p12 = Coefficient::p12();
        let q3 = Coefficient::monomial(1, 3, 0);
        let b1 = p12.mul(&Coefficient::one().add(&q3)).neg();
        let b2 = p12.mul(&p12).mul(&q3);
        let nf = oracle.normal_form(&SkewPolynomial::from_word(w(&[1, 1, 2])));
        let mut expect = SkewPolynomial::zero();
        expect.add_term(w(&[1, 2, 1]), b1.neg());
        expect.add_term(w(&[2, 1, 1]), b2.neg());
        assert_eq!(nf, expect);
    }

    #[test]
    fn quartic_relation_block() {
        let oracle = ReductionOracle::new(serre_relations());
        let d = Constitution::new(1, 4);
        let block = oracle.block(d);
        assert_eq!(block.rank(), 1);
        assert_eq!(block.rank(), brute_force_rank(oracle.relations(), d));
        assert!(block.is_lead_word(&w(&[1, 2, 2, 2, 2])));

        // normal_form(x1 x2^4) = -a1 x2 x1 x2^3 - ... - a4 x2^4 x1.
        let p12 = Coefficient::p12();
        let q = Coefficient::q();
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
        let nf = oracle.normal_form(&SkewPolynomial::from_word(w(&[1, 2, 2, 2, 2])));
        let mut expect = SkewPolynomial::zero();
        expect.add_term(w(&[2, 1, 2, 2, 2]), a1.neg());
        expect.add_term(w(&[2, 2, 1, 2, 2]), a2.neg());
        expect.add_term(w(&[2, 2, 2, 1, 2]), a3.neg());
        expect.add_term(w(&[2, 2, 2, 2, 1]), a4.neg());
        assert_eq!(nf, expect);
    }

    #[test]
    fn generators_reduce_to_zero() {
        let oracle = ReductionOracle::new(serre_relations());
        for g in oracle.relations().generators().to_vec() {
            assert!(oracle.is_in_ideal(&g));
        }
        // Padded consequences vanish too.
        let g0 = oracle.relations().generators()[1].clone();
        let padded = SkewPolynomial::x2().mul(&g0).mul(&SkewPolynomial::x1());
        assert!(oracle.is_in_ideal(&padded));
    }

    #[test]
    fn membership_is_not_trivial() {
        let oracle = ReductionOracle::new(serre_relations());
        assert!(!oracle.is_in_ideal(&SkewPolynomial::from_word(w(&[1, 2]))));
        assert!(oracle.is_hard_word(&w(&[1, 2])));
        assert!(!oracle.is_hard_word(&w(&[1, 1, 2])));
    }

    #[test]
    fn normal_form_is_idempotent_and_linear() {
        let oracle = ReductionOracle::new(serre_relations());
        let f = SkewPolynomial::from_word(w(&[1, 1, 2, 2]));
        let g = SkewPolynomial::from_word(w(&[1, 2, 1, 2])).scale(&Coefficient::p12());
        let nf = |x: &SkewPolynomial| oracle.normal_form(x);
        assert_eq!(nf(&nf(&f)), nf(&f));
        let alpha = Coefficient::q();
        let beta = Coefficient::from_int(-2);
        let lhs = nf(&f.scale(&alpha).add(&g.scale(&beta)));
        let rhs = nf(&f).scale(&alpha).add(&nf(&g).scale(&beta));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn redundant_generators_do_not_change_blocks() {
        let base = serre_relations();
        let consequence = SkewPolynomial::x1().mul(&base.generators()[1]);
        let mut gens = base.generators().to_vec();
        gens.push(consequence);
        let extended = ReductionOracle::new(RelationSet::new(gens));
        let base = ReductionOracle::new(base);
        for d in [
            Constitution::new(2, 1),
            Constitution::new(3, 1),
            Constitution::new(2, 2),
            Constitution::new(3, 2),
        ] {
            assert_eq!(base.rank(d), extended.rank(d));
            let bb = base.block(d);
            let eb = extended.block(d);
            for (r1, r2) in bb.rows().iter().zip(eb.rows().iter()) {
                assert_eq!(r1.as_polynomial(bb.table()), r2.as_polynomial(eb.table()));
            }
        }
    }

    #[test]
    fn probabilistic_agrees_with_exact() {
        let oracle = ReductionOracle::new(serre_relations());
        let member = SkewPolynomial::x2().mul(&oracle.relations().generators()[1]);
        let out = oracle.probabilistic_is_zero(&member, 3, 7);
        assert!(out.is_zero);
        assert!(out.error_bound < 1e-15);

        let non_member = SkewPolynomial::from_word(w(&[1, 2, 1, 2]));
        let out = oracle.probabilistic_is_zero(&non_member, 3, 7);
        assert!(!out.is_zero);
        assert!(out.witness.is_some());

        let zero = oracle.probabilistic_is_zero(&SkewPolynomial::zero(), 3, 7);
        assert!(zero.is_zero);
    }
}
