//! Vacuum expectation values of fermionic operator strings by Wick's
//! theorem.
//!
//! Against the vacuum, only contractions of an annihilator with a creator to
//! its right survive. The expectation value is the sum over perfect matchings
//! of such pairs, each weighted by the product of its kernel values and by
//! `(-1)^crossings` of the matching's chords. Kernels may return numbers or
//! symbolic overlap monomials ([`OverlapPolynomial`]), which is how the
//! broadened matrix elements reduce to products of `L` and `M`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::fock::Species;
use crate::overlaps::OverlapQuad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Create,
    Annihilate,
}

/// Momentum tag of an operator: a grid index or a symbolic centre such as
/// `k` or `k'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Grid(i64),
    Center(String),
}

impl Label {
    pub fn center(name: &str) -> Self {
        Label::Center(name.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Grid(i) => write!(f, "#{i}"),
            Label::Center(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSymbol {
    pub kind: OpKind,
    pub species: Species,
    pub spin: u8,
    pub label: Label,
}

impl OpSymbol {
    pub fn create(species: Species, spin: u8, label: Label) -> Self {
        OpSymbol {
            kind: OpKind::Create,
            species,
            spin,
            label,
        }
    }

    pub fn annihilate(species: Species, spin: u8, label: Label) -> Self {
        OpSymbol {
            kind: OpKind::Annihilate,
            species,
            spin,
            label,
        }
    }

    /// Hermitian conjugate of a single operator: flips the kind only.
    pub fn conjugate(&self) -> Self {
        OpSymbol {
            kind: match self.kind {
                OpKind::Create => OpKind::Annihilate,
                OpKind::Annihilate => OpKind::Create,
            },
            ..self.clone()
        }
    }

    fn same_orbital_type(&self, other: &OpSymbol) -> bool {
        self.species == other.species && self.spin == other.spin
    }
}

/// Values a kernel may produce: anything closed under `+`, `*` and negation.
pub trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {}

impl<T> Scalar for T where T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Neg<Output = T> {}

/// Value of the contraction `⟨0| a · c† |0⟩` for an annihilator `a` standing
/// left of a creator `c†`.
pub trait ContractionKernel {
    type Value: Scalar;

    fn pair_value(&self, annihilator: &OpSymbol, creator: &OpSymbol) -> Self::Value;
}

/// Discrete anticommutator: 1 when species, spin and label all agree.
#[derive(Debug, Clone, Copy, Default)]
pub struct KroneckerKernel;

impl ContractionKernel for KroneckerKernel {
    type Value = Complex64;

    fn pair_value(&self, a: &OpSymbol, c: &OpSymbol) -> Complex64 {
        if a.same_orbital_type(c) && a.label == c.label {
            Complex64::one()
        } else {
            Complex64::zero()
        }
    }
}

/// Named overlap `g(bra, ket) = ∫ f*(x - bra) f(x - ket) dx` of one species.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Overlap {
    pub species: Species,
    pub bra: Label,
    pub ket: Label,
}

/// Integer-coefficient polynomial in [`Overlap`] symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OverlapPolynomial {
    terms: BTreeMap<Vec<Overlap>, i64>,
}

impl OverlapPolynomial {
    pub fn monomial(factor: Overlap) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![factor], 1);
        OverlapPolynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Overlap], i64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    fn insert(&mut self, monomial: Vec<Overlap>, coeff: i64) {
        let entry = self.terms.entry(monomial).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }
}

impl Zero for OverlapPolynomial {
    fn zero() -> Self {
        OverlapPolynomial::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for OverlapPolynomial {
    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), 1);
        OverlapPolynomial { terms }
    }
}

impl Add for OverlapPolynomial {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.insert(m, c);
        }
        self
    }
}

impl Mul for OverlapPolynomial {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = OverlapPolynomial::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m: Vec<Overlap> = ma.iter().chain(mb).cloned().collect();
                m.sort();
                out.insert(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for OverlapPolynomial {
    type Output = Self;

    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}

/// Contraction against broadened modes: the continuum delta of the
/// anticommutator integrates against the two profiles into the named overlap
/// `g(annihilator label, creator label)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmearedKernel;

impl ContractionKernel for SmearedKernel {
    type Value = OverlapPolynomial;

    fn pair_value(&self, a: &OpSymbol, c: &OpSymbol) -> OverlapPolynomial {
        if !a.same_orbital_type(c) {
            return OverlapPolynomial::zero();
        }
        OverlapPolynomial::monomial(Overlap {
            species: a.species,
            bra: a.label.clone(),
            ket: c.label.clone(),
        })
    }
}

/// All perfect matchings in which every annihilator is paired with a creator
/// to its right. Each matching lists `(annihilator, creator)` positions.
pub fn vacuum_matchings(kinds: &[OpKind]) -> Vec<Vec<(usize, usize)>> {
    let n = kinds.len();
    let creators = kinds.iter().filter(|k| **k == OpKind::Create).count();
    if n % 2 != 0 || 2 * creators != n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut current = Vec::with_capacity(n / 2);
    extend_matchings(kinds, &mut used, &mut current, &mut out);
    out
}

fn extend_matchings(
    kinds: &[OpKind],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    let Some(i) = used.iter().position(|u| !u) else {
        out.push(current.clone());
        return;
    };
    // the leftmost free operator must annihilate, or the vacuum kills it
    if kinds[i] != OpKind::Annihilate {
        return;
    }
    used[i] = true;
    for j in i + 1..kinds.len() {
        if !used[j] && kinds[j] == OpKind::Create {
            used[j] = true;
            current.push((i, j));
            extend_matchings(kinds, used, current, out);
            current.pop();
            used[j] = false;
        }
    }
    used[i] = false;
}

/// Number of pairs of chords `(a, b)`, `(c, d)` with `a < c < b < d`.
pub fn crossings(matching: &[(usize, usize)]) -> usize {
    let mut count = 0;
    for (x, &(a, b)) in matching.iter().enumerate() {
        for &(c, d) in &matching[x + 1..] {
            let (lo, hi) = if a < c { ((a, b), (c, d)) } else { ((c, d), (a, b)) };
            if lo.0 < hi.0 && hi.0 < lo.1 && lo.1 < hi.1 {
                count += 1;
            }
        }
    }
    count
}

/// `⟨0| ops[0] ops[1] … |0⟩`.
pub fn vacuum_expectation<K: ContractionKernel>(ops: &[OpSymbol], kernel: &K) -> K::Value {
    let kinds: Vec<OpKind> = ops.iter().map(|o| o.kind).collect();
    let mut total = K::Value::zero();
    for matching in vacuum_matchings(&kinds) {
        let mut term = K::Value::one();
        for &(a, c) in &matching {
            term = term * kernel.pair_value(&ops[a], &ops[c]);
            if term.is_zero() {
                break;
            }
        }
        if term.is_zero() {
            continue;
        }
        total = if crossings(&matching) % 2 == 0 { total + term } else { total + (-term) };
    }
    total
}

/// Which of the two pair overlaps a product of two named overlaps is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairOverlap {
    /// `g(k,k) g(k',k')`, i.e. `L`.
    Direct,
    /// `g(k,k') g(k',k)`, i.e. `M`.
    Exchange,
}

/// A matrix element written as `Σ c · X_e · X_h` with `X ∈ {L, M}` for the
/// electron pair and `{L̃, M̃}` for the hole pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicElement {
    pub terms: BTreeMap<(PairOverlap, PairOverlap), i64>,
}

impl SymbolicElement {
    pub fn coefficient(&self, electron: PairOverlap, hole: PairOverlap) -> i64 {
        self.terms.get(&(electron, hole)).copied().unwrap_or(0)
    }

    pub fn evaluate(&self, q: &OverlapQuad) -> f64 {
        self.terms
            .iter()
            .map(|(&(e, h), &c)| {
                let ev = match e {
                    PairOverlap::Direct => q.l,
                    PairOverlap::Exchange => q.m,
                };
                let hv = match h {
                    PairOverlap::Direct => q.l_tilde,
                    PairOverlap::Exchange => q.m_tilde,
                };
                c as f64 * ev * hv
            })
            .sum()
    }
}

const K: &str = "k";
const K_PRIME: &str = "k'";
const HOLE_K: &str = "~k";
const HOLE_K_PRIME: &str = "~k'";

fn pair_class(factors: &[&Overlap]) -> Option<PairOverlap> {
    let [a, b] = factors else {
        return None;
    };
    let key = |o: &Overlap| (o.bra.clone(), o.ket.clone());
    let mut pairs = [key(a), key(b)];
    pairs.sort();
    let (ka, kb) = match a.species {
        Species::Electron => (Label::center(K), Label::center(K_PRIME)),
        Species::Hole => (Label::center(HOLE_K), Label::center(HOLE_K_PRIME)),
    };
    let mut direct = [(ka.clone(), ka.clone()), (kb.clone(), kb.clone())];
    direct.sort();
    let mut exchange = [(ka.clone(), kb.clone()), (kb, ka)];
    exchange.sort();
    if pairs == direct {
        Some(PairOverlap::Direct)
    } else if pairs == exchange {
        Some(PairOverlap::Exchange)
    } else {
        None
    }
}

/// Operator string `Ψ_r(k) Ψ_r'(k') Ψ†_s(k) Ψ†_s'(k')` with
/// `Ψ†_s(k) = e†_s(k) h†_s(k̃)` and hence `Ψ_s(k) = h_s(k̃) e_s(k)`.
pub fn pair_correlator_string(r: u8, rp: u8, s: u8, sp: u8) -> Vec<OpSymbol> {
    use Species::{Electron, Hole};
    let lbl = Label::center;
    vec![
        OpSymbol::annihilate(Hole, r, lbl(HOLE_K)),
        OpSymbol::annihilate(Electron, r, lbl(K)),
        OpSymbol::annihilate(Hole, rp, lbl(HOLE_K_PRIME)),
        OpSymbol::annihilate(Electron, rp, lbl(K_PRIME)),
        OpSymbol::create(Electron, s, lbl(K)),
        OpSymbol::create(Hole, s, lbl(HOLE_K)),
        OpSymbol::create(Electron, sp, lbl(K_PRIME)),
        OpSymbol::create(Hole, sp, lbl(HOLE_K_PRIME)),
    ]
}

/// Wick-reduce the broadened two-pair correlator into `L`/`M` products.
pub fn smeared_matrix_symbolic(r: u8, rp: u8, s: u8, sp: u8) -> SymbolicElement {
    let poly = vacuum_expectation(&pair_correlator_string(r, rp, s, sp), &SmearedKernel);
    let mut out = SymbolicElement::default();
    for (monomial, coeff) in poly.terms() {
        let electron: Vec<&Overlap> = monomial.iter().filter(|o| o.species == Species::Electron).collect();
        let hole: Vec<&Overlap> = monomial.iter().filter(|o| o.species == Species::Hole).collect();
        let (Some(e), Some(h)) = (pair_class(&electron), pair_class(&hole)) else {
            unreachable!("two-pair contraction produced monomial {monomial:?}");
        };
        *out.terms.entry((e, h)).or_insert(0) += coeff;
    }
    out.terms.retain(|_, c| *c != 0);
    out
}

/// Broadened matrix element `ρ_{r r' s s'}` evaluated on `q`.
pub fn smeared_matrix_element(r: u8, rp: u8, s: u8, sp: u8, q: &OverlapQuad) -> f64 {
    smeared_matrix_symbolic(r, rp, s, sp).evaluate(q)
}
