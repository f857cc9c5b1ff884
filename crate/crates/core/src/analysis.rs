//! Reflection-pair analytics and representation-level checks.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cartan::{classify_pair, OrderClass};
use crate::construction::{FieldMatrix, ReflectionRep};
use crate::cyclotomic::FieldElement;
use crate::error::{CoxError, Result};
use crate::graph::{edge, CoxeterMatrix, Edge};
use crate::polynomial::Polynomial;

/// A reflection `M = I + a f^T` with `f(a) = -2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionData {
    pub matrix: FieldMatrix,
    /// Spans the image of `M - I`; first nonzero entry is 1.
    pub directing: Vec<FieldElement>,
    /// The linear form with `M x = x + f(x) a`.
    pub functional: Vec<FieldElement>,
    /// Basis of the fixed hyperplane.
    pub hyperplane: Vec<Vec<FieldElement>>,
}

/// `Some` iff `M^2 = I` and `M - I` has rank 1.
pub fn is_reflection(m: &FieldMatrix) -> Option<ReflectionData> {
    if !m.is_square() || !m.mul(m).is_identity() {
        return None;
    }
    let n = m.rows();
    let d = m.sub(&FieldMatrix::identity(n));
    if d.rank() != 1 {
        return None;
    }
    let col = (0..n).find(|&j| (0..n).any(|i| !d[(i, j)].is_zero()))?;
    let pivot = (0..n).find(|&i| !d[(i, col)].is_zero())?;
    let inv = d[(pivot, col)].invert().ok()?;
    let directing: Vec<FieldElement> = (0..n).map(|i| &d[(i, col)] * &inv).collect();
    let functional = d.row(pivot).to_vec();
    let hyperplane = FieldMatrix::new(1, n, functional.clone()).nullspace();
    Some(ReflectionData { matrix: m.clone(), directing, functional, hyperplane })
}

fn apply_form(f: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    f.iter().zip(v).fold(FieldElement::zero(), |acc, (a, b)| &acc + &(a * b))
}

fn parallel(a: &[FieldElement], b: &[FieldElement]) -> bool {
    FieldMatrix::from_rows(vec![a.to_vec(), b.to_vec()]).rank() < 2
}

/// Off-diagonal coefficients `(c(r,a;s,b), c(s,b;r,a))` for independent
/// directing vectors: `r(b) = b - c_rs a`, `s(a) = a - c_sr b`.
pub fn pair_coefficients(r: &ReflectionData, s: &ReflectionData) -> Option<(FieldElement, FieldElement)> {
    if parallel(&r.directing, &s.directing) {
        return None;
    }
    Some((-apply_form(&r.functional, &s.directing), -apply_form(&s.functional, &r.directing)))
}

/// The Cartan coefficient `C(r, s)`; 4 when the directing vectors are parallel.
pub fn cartan_coefficient(r: &ReflectionData, s: &ReflectionData) -> FieldElement {
    match pair_coefficients(r, s) {
        Some((a, b)) => &a * &b,
        None => FieldElement::integer(4),
    }
}

/// Order class and characteristic polynomial of a product of two reflections.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductAnalysis {
    pub class: OrderClass,
    pub charpoly: Polynomial<FieldElement>,
    pub cartan: FieldElement,
}

/// `(X - 1)^(n-2) (X^2 - (C - 2) X + 1)`.
pub fn pair_charpoly(n: usize, c: &FieldElement) -> Polynomial<FieldElement> {
    let one = FieldElement::one();
    let lin = Polynomial::new(vec![-one.clone(), one.clone()]);
    let quad = Polynomial::new(vec![one.clone(), -(c - &FieldElement::integer(2)), one]);
    lin.pow(n.saturating_sub(2) as u32).mul(&quad)
}

fn primes(n: u64) -> Vec<u64> {
    (2..=n).filter(|p| n.is_multiple_of(*p) && (2..*p).all(|q| p % q != 0)).collect()
}

/// Whether `P` has order exactly `n`.
pub fn has_order(p: &FieldMatrix, n: u64) -> bool {
    p.pow(n).is_identity() && primes(n).iter().all(|q| !p.pow(n / q).is_identity())
}

/// Classifies `rs` and cross-checks the class against exact matrix powers.
pub fn product_analysis(r: &ReflectionData, s: &ReflectionData, max_order: u64) -> Result<ProductAnalysis> {
    if r.matrix == s.matrix {
        return Err(CoxError::IdenticalReflections);
    }
    let n = r.matrix.rows();
    let p = r.matrix.mul(&s.matrix);
    let charpoly = p.charpoly();
    let (class, cartan) = match pair_coefficients(r, s) {
        Some((a, b)) => {
            let c = &a * &b;
            if charpoly != pair_charpoly(n, &c) {
                return Err(CoxError::Internal("characteristic polynomial differs from the closed form".into()));
            }
            (classify_pair(&a, &b, max_order), c)
        }
        None => (OrderClass::Unipotent, FieldElement::integer(4)),
    };
    let consistent = match class {
        OrderClass::Commuting => has_order(&p, 2),
        OrderClass::Finite(k) => has_order(&p, k),
        OrderClass::Unipotent => {
            let d = p.sub(&FieldMatrix::identity(n));
            !p.is_identity() && d.pow(n as u64).is_zero()
        }
        OrderClass::Indeterminate => {
            let mut acc = p.clone();
            let mut ok = true;
            for _ in 1..=max_order {
                if acc.is_identity() {
                    ok = false;
                    break;
                }
                acc = acc.mul(&p);
            }
            ok
        }
    };
    if !consistent {
        return Err(CoxError::OrderMismatch(format!("class {class:?} disagrees with matrix powers")));
    }
    Ok(ProductAnalysis { class, charpoly, cartan })
}

/// Truth values of the four unipotency conditions for a pair of reflections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnipotentReport {
    /// `rs` is unipotent and not the identity.
    pub unipotent: bool,
    /// `C(r, s) = 4`.
    pub cartan_is_four: bool,
    /// The plane of the directing vectors meets both hyperplanes.
    pub common_fixed_in_plane: bool,
    /// `H(r) = H(s)`.
    pub same_hyperplane: bool,
    /// The directing vectors are parallel.
    pub parallel: bool,
}

/// Evaluates the four conditions and checks the implications that hold in
/// every rank: the first three agree for independent directing vectors,
/// equal hyperplanes force unipotency, and parallel directing vectors force
/// a unipotent product with Cartan coefficient 4.
pub fn unipotent_equivalences(r: &ReflectionData, s: &ReflectionData) -> Result<UnipotentReport> {
    if r.matrix == s.matrix {
        return Err(CoxError::IdenticalReflections);
    }
    let n = r.matrix.rows();
    let id = FieldMatrix::identity(n);
    let p = r.matrix.mul(&s.matrix);
    let unipotent = !p.is_identity() && p.sub(&id).pow(n as u64).is_zero();
    let cartan_is_four = cartan_coefficient(r, s) == FieldElement::integer(4);
    let is_parallel = parallel(&r.directing, &s.directing);
    let common_fixed_in_plane = if is_parallel {
        r.matrix.mul_vec(&r.directing) == r.directing && s.matrix.mul_vec(&r.directing) == r.directing
    } else {
        // x = u a + v b with (r - I) x = (s - I) x = 0
        let dr = r.matrix.sub(&id);
        let ds = s.matrix.sub(&id);
        let cols = [&r.directing, &s.directing];
        let system = FieldMatrix::from_fn(2 * n, 2, |i, j| {
            let m = if i < n { &dr } else { &ds };
            let row = m.row(i % n);
            apply_form(row, cols[j])
        });
        system.rank() < 2
    };
    let same_hyperplane = FieldMatrix::from_rows(vec![r.functional.clone(), s.functional.clone()]).rank() == 1;
    let report = UnipotentReport { unipotent, cartan_is_four, common_fixed_in_plane, same_hyperplane, parallel: is_parallel };
    let violated = if is_parallel {
        !(unipotent && cartan_is_four)
    } else {
        unipotent != cartan_is_four || cartan_is_four != common_fixed_in_plane
    } || (same_hyperplane && !unipotent);
    if violated {
        return Err(CoxError::EquivalenceViolation(format!("{report:?}")));
    }
    Ok(report)
}

/// One row of a good-morphism table.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub pair: Edge,
    pub expected: u64,
    pub class: OrderClass,
    pub computed: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodMorphismReport {
    pub pairs: Vec<PairCheck>,
    /// Generators that are not reflections.
    pub non_reflections: Vec<usize>,
    pub pass: bool,
}

/// Checks that every generator is a reflection and every product of two
/// generators has the order prescribed by the Coxeter matrix.
pub fn verify_good_morphism(generators: &[FieldMatrix], cox: &CoxeterMatrix, max_order: u64) -> Result<GoodMorphismReport> {
    let n = generators.len();
    if cox.rank() != n {
        return Err(CoxError::DimensionMismatch(format!("{n} generators for rank {}", cox.rank())));
    }
    let data: Vec<Option<ReflectionData>> = generators.iter().map(is_reflection).collect();
    let non_reflections: Vec<usize> = (0..n).filter(|&s| data[s].is_none()).collect();
    let mut pairs = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            let expected = cox.entry(s, t) as u64;
            let (class, computed) = match (&data[s], &data[t]) {
                (Some(r), Some(q)) if r.matrix != q.matrix => {
                    let class = product_analysis(r, q, max_order.max(expected))?.class;
                    (class, class.order())
                }
                _ => (OrderClass::Indeterminate, None),
            };
            let powers_ok = has_order(&generators[s].mul(&generators[t]), expected);
            pairs.push(PairCheck { pair: (s, t), expected, class, computed, pass: computed == Some(expected) && powers_ok });
        }
    }
    let pass = non_reflections.is_empty() && pairs.iter().all(|p| p.pass);
    Ok(GoodMorphismReport { pairs, non_reflections, pass })
}

/// Row-major coefficient matrix of `X -> X * B_s - A_s * X` stacked over `s`.
fn sylvester_system(left: &[FieldMatrix], right: &[FieldMatrix]) -> FieldMatrix {
    let n = left[0].rows();
    let mut out = FieldMatrix::zeros(left.len() * n * n, n * n);
    for (k, (a, b)) in left.iter().zip(right).enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = k * n * n + i * n + j;
                // (X B)_ij = sum_m X_im B_mj ; (A X)_ij = sum_m A_im X_mj
                for m in 0..n {
                    if !b[(m, j)].is_zero() {
                        out[(row, i * n + m)] += &b[(m, j)];
                    }
                    if !a[(i, m)].is_zero() {
                        out[(row, m * n + j)] -= &a[(i, m)];
                    }
                }
            }
        }
    }
    out
}

/// Basis of `{X : X * to_s = from_s * X for all s}`.
pub fn intertwiner_space(from: &[FieldMatrix], to: &[FieldMatrix]) -> Vec<FieldMatrix> {
    if from.is_empty() {
        return Vec::new();
    }
    let n = from[0].rows();
    sylvester_system(from, to)
        .nullspace()
        .into_iter()
        .map(|v| FieldMatrix::new(n, n, v))
        .collect()
}

/// Dimension of the centraliser of the generators in the full matrix algebra.
pub fn commutant_dimension(generators: &[FieldMatrix]) -> usize {
    intertwiner_space(generators, generators).len()
}

/// Trace of the product along a chord circuit, and the closed form when the
/// circuit has no internal chords.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitTrace {
    pub chord: Edge,
    pub word: Vec<usize>,
    pub trace: FieldElement,
    pub closed_form: Option<FieldElement>,
}

impl CircuitTrace {
    pub fn matches(&self) -> Option<bool> {
        self.closed_form.as_ref().map(|f| *f == self.trace)
    }
}

/// Product of the generators along `word`, left to right.
pub fn word_matrix(generators: &[FieldMatrix], word: &[usize]) -> FieldMatrix {
    let n = generators[0].rows();
    word.iter().fold(FieldMatrix::identity(n), |acc, &s| acc.mul(&generators[s]))
}

/// Whether two non-consecutive vertices of the cycle `word` are adjacent.
fn has_internal_chord(rep: &ReflectionRep, word: &[usize]) -> bool {
    let m = word.len();
    let d = rep.diagram();
    (0..m).any(|i| (i + 2..m).any(|j| !(i == 0 && j == m - 1) && d.has_edge(word[i], word[j])))
}

/// Trace of `s_1 s_2 ... s_m` along the circuit of `chord`, starting at its
/// smaller endpoint. For a circuit without internal chords it equals
/// `|S| - 2m + sum of alphas + (alphas from the entry onwards) * l'` where
/// `l'` is the chord scalar for the direction back to the start.
pub fn circuit_trace(rep: &ReflectionRep, chord: Edge) -> Result<CircuitTrace> {
    let circuit = rep.tree().chord_circuit(chord.0, chord.1)?;
    let word = circuit.path.clone();
    let trace = word_matrix(rep.generators(), &word).trace();
    let closed_form = if has_internal_chord(rep, &word) {
        None
    } else {
        let (s, t) = circuit.chord;
        let m = word.len() as i64;
        let mut sum = rep.alpha((s, t))?;
        let mut tail = rep.context().one();
        for (k, w) in word.windows(2).enumerate() {
            let a = rep.alpha((w[0], w[1]))?;
            sum = &sum + &a;
            if k >= circuit.entry {
                tail = &tail * &a;
            }
        }
        let back = rep.alpha((s, t))?.checked_div(rep.params().chord_value((s, t))?)?;
        let base = FieldElement::integer(rep.rank() as i64 - 2 * m);
        Some(&(&base + &sum) + &(&tail * &back))
    };
    Ok(CircuitTrace { chord: circuit.chord, word, trace, closed_form })
}

/// Words whose traces separate parameter systems: every edge `st`, every
/// chord circuit, and for circuits with internal chords a chordless cycle
/// through the chord.
pub fn separating_words(rep: &ReflectionRep) -> Result<Vec<Vec<usize>>> {
    let d = rep.diagram();
    let mut words: Vec<Vec<usize>> = d.edges().iter().map(|&(s, t)| vec![s, t]).collect();
    for &(s, t) in rep.tree().chords() {
        let circuit = rep.tree().chord_circuit(s, t)?;
        let internal = has_internal_chord(rep, &circuit.path);
        words.push(circuit.path);
        if internal {
            let cycle = d
                .shortest_path_avoiding(s, t, edge(s, t))
                .ok_or_else(|| CoxError::Internal("chord lies on no cycle".into()))?;
            words.push(cycle);
        }
    }
    Ok(words)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// The traces of `word` differ.
    Distinct { word: Vec<usize>, first: FieldElement, second: FieldElement },
    /// `g * second_s = first_s * g` for every generator.
    Equivalent { intertwiner: FieldMatrix },
    Inconclusive,
}

/// Compares characters on the separating words, then looks for an
/// invertible intertwiner when all traces agree.
pub fn characters_distinguish(first: &ReflectionRep, second: &ReflectionRep) -> Result<Verdict> {
    if first.diagram().matrix() != second.diagram().matrix() {
        return Err(CoxError::DifferentDiagram);
    }
    if first.tree().tree_edges() != second.tree().tree_edges() || first.root() != second.root() {
        return Err(CoxError::InvalidInput("representations use different trees or roots".into()));
    }
    for word in separating_words(first)? {
        let a = word_matrix(first.generators(), &word).trace();
        let b = word_matrix(second.generators(), &word).trace();
        if a != b {
            return Ok(Verdict::Distinct { word, first: a, second: b });
        }
    }
    for g in intertwiner_space(first.generators(), second.generators()) {
        if !g.det().is_zero() {
            return Ok(Verdict::Equivalent { intertwiner: normalize(&g)? });
        }
    }
    Ok(Verdict::Inconclusive)
}

/// Scales a matrix so that its first nonzero entry (row-major) is 1.
pub fn normalize(g: &FieldMatrix) -> Result<FieldMatrix> {
    match g.entries().iter().find(|x| !x.is_zero()) {
        Some(x) => Ok(g.scale(&x.invert()?)),
        None => Ok(g.clone()),
    }
}

/// Smallest positive `k <= bound` with `M^k = I`.
pub fn matrix_order(m: &FieldMatrix, bound: u64) -> Option<u64> {
    let mut acc = m.clone();
    for k in 1..=bound {
        if acc.is_identity() {
            return Some(k);
        }
        acc = acc.mul(m);
    }
    None
}

/// Least common multiple helper for group orders.
pub fn lcm_all(values: &[u64]) -> u64 {
    values.iter().fold(1, |a, b| a.lcm(b))
}
