//! Exact symbolic engine for skew-commutator calculus in two quantum
//! variables over the parametric coefficient field `Q(q, p12)`, together
//! with the machinery needed to compute PBW-generators and right coideal
//! subalgebra lattices for the rank-2 Borel quantization of type G2.
//!
//! The crate is organized bottom-up:
//!
//! * [`coeff`] — Laurent-fraction arithmetic in `Q(q, p12)`, optionally
//!   specialized to a cyclotomic quotient where `q` has finite order.
//! * [`freealg`] — words, orders, skew polynomials, the bicharacter
//!   `p(u, v)`, skew brackets and the twisted derivations.
//! * [`lyndon`] — standard (Lyndon) words, Shirshov bracketing and
//!   super-letter values.
//! * [`reduce`] — per-constitution ideal blocks, normal forms, hardness
//!   tests, and the modular fast path for large constitutions.
//! * [`g2`] — the concrete G2 instance and its verification suite.
//! * [`coideal`] — generator templates, derivative constraint systems and
//!   the lattice of right coideal subalgebras.
//! * [`report`] — structured pass/fail records shared by the verifiers.

pub mod coeff;
pub mod coideal;
pub mod freealg;
pub mod g2;
pub mod lyndon;
pub mod reduce;
pub mod report;

pub use coeff::{Coefficient, CoeffError, CyclotomicContext, LaurentPoly, PrimeField};
pub use coideal::{enumerate_lattice, templates, Branch, CoidealNode, GeneratorTemplate, Lattice};
pub use freealg::{CharacterData, Constitution, SkewPolynomial, Word};
pub use g2::G2Instance;
pub use lyndon::{BracketTree, SuperLetter};
pub use reduce::{IdealBlock, ReductionOracle, RelationSet};
pub use report::{CheckRecord, CheckStatus};
