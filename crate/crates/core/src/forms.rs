//! Invariant sesquilinear forms twisted by a Galois automorphism, and the
//! dual representation in its adapted basis.
//!
//! A form is stored as its Gram matrix `B[s][t] = phi(a_s, a_t)`, linear in
//! the first argument and `theta`-semilinear in the second, so invariance
//! reads `M^T B theta(M) = B` for every generator `M`.

use std::sync::Arc;

use num_traits::Zero;

use crate::construction::{FieldMatrix, ReflectionRep};
use crate::cyclotomic::{FieldContext, FieldElement, GaloisMap};
use crate::error::{CoxError, Result};
use crate::graph::Edge;

/// A Galois automorphism `c -> 2cos(2 pi j / N)` of the ambient field.
#[derive(Clone, Debug)]
pub struct Automorphism {
    map: GaloisMap,
}

impl Automorphism {
    pub fn new(ctx: &Arc<FieldContext>, j: i64) -> Result<Self> {
        Ok(Automorphism { map: GaloisMap::new(ctx, j)? })
    }

    pub fn identity(ctx: &Arc<FieldContext>) -> Self {
        Self::new(ctx, 1).expect("1 is a unit")
    }

    pub fn index(&self) -> u64 {
        self.map.index()
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.map.context()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_identity()
    }

    /// The automorphism applied twice.
    pub fn square(&self) -> Self {
        let n = self.context().conductor();
        let j = (self.index() * self.index()) % n.max(1);
        Self::new(self.context(), j as i64).expect("square of a unit")
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        self.map.apply(x)
    }

    pub fn apply_matrix(&self, m: &FieldMatrix) -> Result<FieldMatrix> {
        m.try_map(|x| self.apply(x))
    }
}

/// Product of the alphas on the tree path from the root to `s`.
pub fn tree_product(rep: &ReflectionRep, s: usize) -> Result<FieldElement> {
    let path = rep.tree().root_path(s);
    let mut acc = rep.context().one();
    for w in path.windows(2) {
        acc = &acc * &rep.alpha((w[0], w[1]))?;
    }
    Ok(acc)
}

/// The first condition that rules out an invariant form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// `theta^2` moves the alpha or chord scalar of this edge.
    NotInvolutive(Edge),
    /// `theta` moves the alpha of this edge.
    MovesAlpha(Edge),
    /// The balance equation fails on this chord.
    Unbalanced(Edge),
}

impl Obstruction {
    /// Condition number: 1, 2 or 3.
    pub fn condition(&self) -> u8 {
        match self {
            Obstruction::NotInvolutive(_) => 1,
            Obstruction::MovesAlpha(_) => 2,
            Obstruction::Unbalanced(_) => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormVerdict {
    Exists,
    Obstructed(Obstruction),
}

impl FormVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, FormVerdict::Exists)
    }
}

fn product_along(rep: &ReflectionRep, path: &[usize]) -> Result<FieldElement> {
    let mut acc = rep.context().one();
    for w in path.windows(2) {
        acc = &acc * &rep.alpha((w[0], w[1]))?;
    }
    Ok(acc)
}

/// Decides whether a nonzero invariant `theta`-sesquilinear form exists.
///
/// Chords are tested in the split form
/// `theta(l_st) * prod(entry..s) = l_ts * prod(entry..t)`, where products
/// run over tree paths from the circuit's top vertex.
pub fn form_exists(rep: &ReflectionRep, theta: &Automorphism) -> Result<FormVerdict> {
    let theta2 = theta.square();
    let d = rep.diagram();
    for &e in d.edges() {
        let a = rep.alpha(e)?;
        if theta2.apply(&a)? != a {
            return Ok(FormVerdict::Obstructed(Obstruction::NotInvolutive(e)));
        }
    }
    for &e in rep.tree().chords() {
        let l = rep.params().chord_value(e)?;
        if theta2.apply(l)? != *l {
            return Ok(FormVerdict::Obstructed(Obstruction::NotInvolutive(e)));
        }
    }
    for &e in d.edges() {
        let a = rep.alpha(e)?;
        if theta.apply(&a)? != a {
            return Ok(FormVerdict::Obstructed(Obstruction::MovesAlpha(e)));
        }
    }
    for &(s, t) in rep.tree().chords() {
        let circuit = rep.tree().chord_circuit(s, t)?;
        let top = circuit.entry_vertex();
        let l = rep.params().chord_value((s, t))?;
        let back = rep.alpha((s, t))?.checked_div(l)?;
        let lhs = &theta.apply(l)? * &product_along(rep, &rep.tree().path(top, s))?;
        let rhs = &back * &product_along(rep, &rep.tree().path(top, t))?;
        if lhs != rhs {
            return Ok(FormVerdict::Obstructed(Obstruction::Unbalanced((s, t))));
        }
    }
    Ok(FormVerdict::Exists)
}

/// Gram matrix of an invariant form with `B[root][root] = 2 * scale`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub entries: FieldMatrix,
    pub theta: u64,
    pub scale: FieldElement,
}

/// Builds the invariant form normalized by `B[root][root] = 2`.
pub fn build_form(rep: &ReflectionRep, theta: &Automorphism) -> Result<GramMatrix> {
    if let FormVerdict::Obstructed(o) = form_exists(rep, theta)? {
        return Err(CoxError::NoInvariantForm(format!("{o:?}")));
    }
    let n = rep.rank();
    let ctx = rep.context();
    let prods: Vec<FieldElement> = (0..n).map(|s| tree_product(rep, s)).collect::<Result<_>>()?;
    let mut b = FieldMatrix::from_fn(n, n, |_, _| ctx.zero());
    for s in 0..n {
        b[(s, s)] = &prods[s] * &ctx.from_i64(2);
    }
    for &(s, t) in rep.tree().tree_edges() {
        let (p, v) = if rep.tree().parent(t) == Some(s) { (s, t) } else { (t, s) };
        b[(p, v)] = -prods[v].clone();
        b[(v, p)] = -prods[v].clone();
    }
    for &(s, t) in rep.tree().chords() {
        let l = rep.params().chord_value((s, t))?;
        b[(s, t)] = -(&theta.apply(l)? * &prods[s]);
        b[(t, s)] = -(l * &prods[s]);
    }
    Ok(GramMatrix { entries: b, theta: theta.index(), scale: ctx.one() })
}

/// Outcome of checking a candidate Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub hermitian: bool,
    /// The matrix is zero, so the checks hold vacuously.
    pub degenerate: bool,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.invariant && self.hermitian
    }
}

/// Checks `M^T B theta(M) = B` for every generator and `theta(B)^T = B`.
pub fn verify_invariance(rep: &ReflectionRep, gram: &FieldMatrix, theta: &Automorphism) -> Result<InvarianceReport> {
    let n = rep.rank();
    if gram.rows() != n || gram.cols() != n {
        return Err(CoxError::DimensionMismatch(format!("{}x{} Gram matrix for rank {n}", gram.rows(), gram.cols())));
    }
    let mut invariant = true;
    for m in rep.generators() {
        if m.transpose().mul(gram).mul(&theta.apply_matrix(m)?) != *gram {
            invariant = false;
            break;
        }
    }
    let hermitian = theta.apply_matrix(gram)?.transpose() == *gram;
    Ok(InvarianceReport { invariant, hermitian, degenerate: gram.is_zero() })
}

/// Whether `B = diag(B_ss / 2) * Car` exactly (bilinear case).
pub fn gram_cartan_relation(rep: &ReflectionRep, gram: &FieldMatrix) -> bool {
    let n = rep.rank();
    let half = FieldElement::rational(&crate::Rational::new(1.into(), 2.into()));
    let gamma: Vec<FieldElement> = (0..n).map(|i| &gram[(i, i)] * &half).collect();
    FieldMatrix::diagonal(&gamma).mul(rep.cartan()) == *gram
}

/// Dimension over the field of `{X : M^T X theta(M) = X for all M}`.
///
/// Invariance under generator `s` forces `X_is = Car_si X_ss / 2` and
/// `X_sj = theta(Car_sj) X_ss / 2`, so `X` is fixed by its diagonal and the
/// space is the nullspace of `theta(Car_ij) X_ii = Car_ji X_jj` over `i != j`.
pub fn form_space_dimension(rep: &ReflectionRep, theta: &Automorphism) -> Result<usize> {
    let n = rep.rank();
    let car = rep.cartan();
    let mut system = FieldMatrix::zeros(n * n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let row = i * n + j;
                system[(row, i)] = theta.apply(&car[(i, j)])?;
                system[(row, j)] = -car[(j, i)].clone();
            }
        }
    }
    Ok(system.nullspace().len())
}

/// `k` with `a = k * b`, if any.
pub fn global_scalar(a: &FieldMatrix, b: &FieldMatrix) -> Option<FieldElement> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let idx = b.entries().iter().position(|x| !x.is_zero())?;
    let k = a.entries()[idx].checked_div(&b.entries()[idx]).ok()?;
    (b.scale(&k) == *a).then_some(k)
}

fn vector_scalar(a: &[FieldElement], b: &[FieldElement]) -> Option<FieldElement> {
    let idx = b.iter().position(|x| !x.is_zero())?;
    let k = a[idx].checked_div(&b[idx]).ok()?;
    a.iter().zip(b).all(|(x, y)| *x == &k * y).then_some(k)
}

/// The contragredient representation with the primed and adapted vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct DualRep {
    /// Inverse-transposes of the generators, acting on dual coordinates.
    pub generators: Vec<FieldMatrix>,
    /// Row `s`: the directing vector of `s` on the dual space.
    pub primed: FieldMatrix,
    /// Row `s`: `tree_product(s)` times row `s` of `primed`.
    pub adapted: FieldMatrix,
    pub products: Vec<FieldElement>,
    /// The primed vectors are linearly dependent.
    pub degenerate: bool,
    /// Cartan matrix of the dual in the adapted basis, when it is a basis.
    pub cartan: Option<FieldMatrix>,
}

/// Builds the dual representation and, when the Cartan determinant is
/// nonzero, its Cartan matrix in the adapted basis.
pub fn dual_representation(rep: &ReflectionRep) -> Result<DualRep> {
    let n = rep.rank();
    let generators: Vec<FieldMatrix> = rep.generators().iter().map(|m| m.transpose()).collect();
    let primed = rep.cartan().clone();
    let products: Vec<FieldElement> = (0..n).map(|s| tree_product(rep, s)).collect::<Result<_>>()?;
    let adapted = FieldMatrix::diagonal(&products).mul(&primed);
    for (g, m) in generators.iter().zip(rep.generators()) {
        if !g.transpose().mul(m).is_identity() {
            return Err(CoxError::Internal("dual generator is not the inverse transpose".into()));
        }
    }
    let degenerate = primed.rank() < n;
    let cartan = if degenerate {
        None
    } else {
        // t . A_s = A_s - c*_ts A_t
        let basis = adapted.transpose();
        let mut c = FieldMatrix::zeros(n, n);
        for t in 0..n {
            let image = generators[t].mul(&basis).sub(&basis);
            let target = basis.column(t);
            for s in 0..n {
                let k = vector_scalar(&image.column(s), &target)
                    .ok_or_else(|| CoxError::Internal("dual generator is not a reflection along its root".into()))?;
                c[(t, s)] = -k;
            }
        }
        Some(c)
    };
    Ok(DualRep { generators, primed, adapted, products, degenerate, cartan })
}

impl DualRep {
    /// Coefficient of `A_t` in `t . A_s`.
    pub fn chord_coefficient(&self, s: usize, t: usize) -> Option<FieldElement> {
        self.cartan.as_ref().map(|c| -c[(t, s)].clone())
    }
}

/// Chord scalars `(l_st, l_ts)` of a chord taken in the order `(s, t)`.
pub fn chord_pair(rep: &ReflectionRep, s: usize, t: usize) -> Result<(FieldElement, FieldElement)> {
    let stored = rep.params().chord_value((s, t))?.clone();
    let other = rep.alpha((s, t))?.checked_div(&stored)?;
    Ok(if s < t { (stored, other) } else { (other, stored) })
}

/// `prod(s) * l_ts / prod(t)`, the displayed coefficient of `A_t` in `t . A_s`.
pub fn displayed_chord_ratio(rep: &ReflectionRep, s: usize, t: usize) -> Result<FieldElement> {
    let (_, l_ts) = chord_pair(rep, s, t)?;
    (&tree_product(rep, s)? * &l_ts).checked_div(&tree_product(rep, t)?)
}

/// `prod(s) * l_st / prod(t)`, the coefficient forced by the Cartan entry `c_st`.
pub fn derived_chord_ratio(rep: &ReflectionRep, s: usize, t: usize) -> Result<FieldElement> {
    let (l_st, _) = chord_pair(rep, s, t)?;
    (&tree_product(rep, s)? * &l_st).checked_div(&tree_product(rep, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    use crate::analysis::verify_good_morphism;
    use crate::construction::{build, cartan_matrix, geometric_parameters, ParameterSystem};
    use crate::graph::{spanning_tree, validate, CoxeterMatrix};

    fn rep_with(m: Vec<Vec<i64>>, root: usize, k: u64) -> ReflectionRep {
        let d = validate(&CoxeterMatrix::new(m)).unwrap();
        let t = spanning_tree(&d, root).unwrap();
        let mut p = geometric_parameters(&t).unwrap();
        for v in p.alpha.values_mut() {
            *v = k;
        }
        build(&t, &p).unwrap()
    }

    fn b3() -> Vec<Vec<i64>> {
        vec![vec![1, 3, 2], vec![3, 1, 4], vec![2, 4, 1]]
    }

    fn h3() -> Vec<Vec<i64>> {
        vec![vec![1, 3, 2], vec![3, 1, 5], vec![2, 5, 1]]
    }

    fn triangle() -> Vec<Vec<i64>> {
        vec![vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]]
    }

    fn ints(rows: &[&[i64]]) -> FieldMatrix {
        FieldMatrix::from_i64_rows(rows)
    }

    #[test]
    fn tree_products() {
        let rep = rep_with(b3(), 1, 1);
        assert_eq!(tree_product(&rep, 1).unwrap(), FieldElement::integer(1));
        assert_eq!(tree_product(&rep, 2).unwrap(), FieldElement::integer(2));
        let h = rep_with(h3(), 1, 1);
        assert_eq!(tree_product(&h, 2).unwrap(), h.alpha((1, 2)).unwrap());
    }

    #[test]
    fn b3_gram() {
        let rep = rep_with(b3(), 1, 1);
        let id = Automorphism::identity(rep.context());
        let g = build_form(&rep, &id).unwrap();
        assert_eq!(g.entries, ints(&[&[2, -1, 0], &[-1, 2, -2], &[0, -2, 4]]));
        assert!(verify_invariance(&rep, &g.entries, &id).unwrap().holds());
        assert!(gram_cartan_relation(&rep, &g.entries));
        assert_eq!(form_space_dimension(&rep, &id).unwrap(), 1);

        let at3 = rep_with(b3(), 2, 1);
        let g3 = build_form(&at3, &id).unwrap();
        let k = global_scalar(&g3.entries, &ints(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 1]])).unwrap();
        assert_eq!(k, FieldElement::integer(2));
    }

    #[test]
    fn h3_gram_factorizes() {
        let rep = rep_with(h3(), 1, 1);
        let id = Automorphism::identity(rep.context());
        let g = build_form(&rep, &id).unwrap();
        let alpha = rep.alpha((1, 2)).unwrap();
        let gamma = FieldMatrix::diagonal(&[FieldElement::integer(1), FieldElement::integer(1), alpha]);
        assert_eq!(g.entries, gamma.mul(rep.cartan()));
        let det = g.entries.det();
        let prod: FieldElement = (0..3).map(|i| &g.entries[(i, i)] * &FieldElement::rational(&crate::Rational::new(1.into(), 2.into()))).fold(FieldElement::one(), |a, b| &a * &b);
        assert_eq!(det, &prod * &cartan_matrix(&rep).discriminant);
    }

    #[test]
    fn h3_conjugation_has_no_form() {
        let rep = rep_with(h3(), 2, 1);
        let conj = Automorphism::new(rep.context(), 7).unwrap();
        assert!(!conj.is_identity());
        assert_eq!(form_exists(&rep, &conj).unwrap(), FormVerdict::Obstructed(Obstruction::MovesAlpha((1, 2))));
        assert_eq!(form_space_dimension(&rep, &conj).unwrap(), 0);
        assert!(matches!(build_form(&rep, &conj).unwrap_err(), CoxError::NoInvariantForm(_)));
    }

    fn direct_dimension(rep: &ReflectionRep, theta: &Automorphism) -> usize {
        let n = rep.rank();
        let mut system = FieldMatrix::zeros(n * n * n, n * n);
        for (k, m) in rep.generators().iter().enumerate() {
            let tm = theta.apply_matrix(m).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let row = k * n * n + i * n + j;
                    for p in 0..n {
                        for q in 0..n {
                            system[(row, p * n + q)] += &(&m[(p, i)] * &tm[(q, j)]);
                        }
                    }
                    system[(row, i * n + j)] -= &FieldElement::one();
                }
            }
        }
        system.nullspace().len()
    }

    #[test]
    fn reduced_dimension_matches_direct_system() {
        let tri = validate(&CoxeterMatrix::new(triangle())).unwrap();
        let t = spanning_tree(&tri, 0).unwrap();
        let mut p = geometric_parameters(&t).unwrap();
        let geo = build(&t, &p).unwrap();
        p.chords.values_mut().for_each(|l| *l = FieldElement::integer(2));
        let off = build(&t, &p).unwrap();
        for rep in [rep_with(b3(), 0, 1), rep_with(h3(), 0, 1), rep_with(h3(), 2, 1), geo, off] {
            for j in [1, rep.context().conductor() as i64 - 1] {
                let Ok(theta) = Automorphism::new(rep.context(), j) else { continue };
                assert_eq!(form_space_dimension(&rep, &theta).unwrap(), direct_dimension(&rep, &theta));
            }
        }
        let h = rep_with(h3(), 0, 1);
        let conj = Automorphism::new(h.context(), 7).unwrap();
        assert_eq!(form_space_dimension(&h, &conj).unwrap(), direct_dimension(&h, &conj));
    }

    #[test]
    fn unbalanced_triangle() {
        let d = validate(&CoxeterMatrix::new(triangle())).unwrap();
        let t = spanning_tree(&d, 0).unwrap();
        let mut p = geometric_parameters(&t).unwrap();
        p.chords.insert((1, 2), FieldElement::integer(2));
        let rep = build(&t, &p).unwrap();
        let id = Automorphism::identity(rep.context());
        assert_eq!(form_exists(&rep, &id).unwrap(), FormVerdict::Obstructed(Obstruction::Unbalanced((1, 2))));
        assert_eq!(form_space_dimension(&rep, &id).unwrap(), 0);
        let geo = build(&t, &geometric_parameters(&t).unwrap()).unwrap();
        assert_eq!(form_space_dimension(&geo, &id).unwrap(), 1);
        let g = build_form(&geo, &id).unwrap();
        assert!(verify_invariance(&geo, &g.entries, &id).unwrap().holds());
    }

    #[test]
    fn perturbed_and_zero_forms() {
        let rep = rep_with(h3(), 0, 1);
        let id = Automorphism::identity(rep.context());
        let mut g = build_form(&rep, &id).unwrap().entries;
        g[(0, 0)] = FieldElement::integer(3);
        assert!(!verify_invariance(&rep, &g, &id).unwrap().holds());
        let z = verify_invariance(&rep, &FieldMatrix::zeros(3, 3), &id).unwrap();
        assert!(z.holds() && z.degenerate);
    }

    #[test]
    fn rank_one() {
        let rep = rep_with(vec![vec![1]], 0, 1);
        let id = Automorphism::identity(rep.context());
        let g = build_form(&rep, &id).unwrap();
        assert_eq!(g.entries, ints(&[&[2]]));
        assert!(gram_cartan_relation(&rep, &g.entries));
        let dual = dual_representation(&rep).unwrap();
        assert_eq!(dual.generators[0], ints(&[&[-1]]));
        assert!(!dual.degenerate);
    }

    #[test]
    fn automorphism_squares() {
        let ctx = crate::cyclotomic::field_context(20);
        let a = Automorphism::new(&ctx, 3).unwrap();
        assert_eq!(a.square().index(), 9);
        let c = ctx.generator();
        assert_eq!(a.apply(&a.apply(&c).unwrap()).unwrap(), a.square().apply(&c).unwrap());
    }

    #[test]
    fn h3_dual_is_reflection_rep() {
        let rep = rep_with(h3(), 1, 1);
        let dual = dual_representation(&rep).unwrap();
        assert!(!dual.degenerate);
        assert!(verify_good_morphism(&dual.generators, rep.diagram().matrix(), 60).unwrap().pass);
        assert_eq!(dual.primed.det(), cartan_matrix(&rep).discriminant);
        // same tree, same alphas
        assert_eq!(dual.cartan.unwrap(), *rep.cartan());
    }

    #[test]
    fn dual_chord_coefficients() {
        let d = validate(&CoxeterMatrix::new(triangle())).unwrap();
        let t = spanning_tree(&d, 0).unwrap();
        let mut p: ParameterSystem = geometric_parameters(&t).unwrap();
        p.chords.insert((1, 2), FieldElement::integer(3));
        let rep = build(&t, &p).unwrap();
        let dual = dual_representation(&rep).unwrap();
        for (s, t) in [(1, 2), (2, 1)] {
            assert_eq!(dual.chord_coefficient(s, t).unwrap(), derived_chord_ratio(&rep, s, t).unwrap());
        }
        assert_ne!(dual.chord_coefficient(1, 2).unwrap(), displayed_chord_ratio(&rep, 1, 2).unwrap());
    }

    #[test]
    fn degenerate_dual() {
        // affine A2: Cartan determinant 0
        let rep = rep_with(triangle(), 0, 1);
        assert!(cartan_matrix(&rep).discriminant.is_zero());
        let dual = dual_representation(&rep).unwrap();
        assert!(dual.degenerate && dual.cartan.is_none());
        assert_eq!(dual.primed.rank(), 2);
    }
}
