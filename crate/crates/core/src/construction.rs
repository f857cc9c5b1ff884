//! Reflection representations from a rooted spanning tree and a parameter
//! system, their Cartan matrices, the geometric parameters, and the diagonal
//! intertwiners relating different roots and trees.
//!
//! Conventions: the generator of `s` maps `a_t` to `a_t - c_st a_s`, so its
//! matrix is the identity with row `s` replaced by `e_s - (row s of C)`. For a
//! tree edge with `s` above `t`, `c_st = -alpha` and `c_ts = -1`. A chord
//! `(s, t)` with `s < t` stores `l` with `c_st = -l`, and `c_ts = -alpha / l`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cartan::alpha_value;
use crate::cyclotomic::{cos_element, field_context, FieldContext, FieldElement};
use crate::error::{CoxError, Result};
use crate::graph::{edge, swap_sequence, Diagram, Edge, SpanningTree};
use crate::matrix::Matrix;

pub type FieldMatrix = Matrix<FieldElement>;

/// Root choices per edge and chord scalars per chord.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ParameterSystem {
    /// `k` selecting `alpha_e = 4cos^2(k pi / m_e)`.
    pub alpha: BTreeMap<Edge, u64>,
    /// `l` for the direction smaller index to larger index.
    pub chords: BTreeMap<Edge, FieldElement>,
}

/// A problem with a parameter choice that still builds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceIssue {
    pub edge: Edge,
    pub index: u64,
    pub order: u64,
}

impl ParameterSystem {
    pub fn alpha_index(&self, e: Edge) -> Result<u64> {
        self.alpha
            .get(&edge(e.0, e.1))
            .copied()
            .ok_or_else(|| CoxError::IncompleteParameters(format!("no root choice for edge {e:?}")))
    }

    /// `alpha_e` as a field element of `ctx`.
    pub fn alpha_value(&self, ctx: &Arc<FieldContext>, diagram: &Diagram, e: Edge) -> Result<FieldElement> {
        let e = edge(e.0, e.1);
        alpha_value(ctx, self.alpha_index(e)?, diagram.order(e.0, e.1))
    }

    /// The stored chord scalar for `s -> t` (`s < t`).
    pub fn chord_value(&self, e: Edge) -> Result<&FieldElement> {
        self.chords
            .get(&edge(e.0, e.1))
            .ok_or_else(|| CoxError::IncompleteParameters(format!("no chord parameter for {e:?}")))
    }

    /// Checks that every edge and chord is covered and nothing else is.
    pub fn check_complete(&self, tree: &SpanningTree) -> Result<()> {
        let d = tree.diagram();
        for &e in d.edges() {
            self.alpha_index(e)?;
        }
        for &e in tree.chords() {
            if self.chord_value(e)?.is_zero() {
                return Err(CoxError::ZeroChordParameter(e.0, e.1));
            }
        }
        for e in self.alpha.keys() {
            if !d.has_edge(e.0, e.1) {
                return Err(CoxError::InvalidInput(format!("root choice for non-edge {e:?}")));
            }
        }
        for e in self.chords.keys() {
            if !tree.is_chord(e.0, e.1) {
                return Err(CoxError::NotAChord(e.0, e.1));
            }
        }
        Ok(())
    }

    /// Root choices that are not roots of `v_m`: `k` outside `1..=m/2` or
    /// not coprime to `m`.
    pub fn choice_issues(&self, diagram: &Diagram) -> Vec<ChoiceIssue> {
        self.alpha
            .iter()
            .filter_map(|(&e, &k)| {
                let m = diagram.order(e.0, e.1);
                let ok = k >= 1 && k <= m / 2 && k.gcd(&m) == 1;
                (!ok).then_some(ChoiceIssue { edge: e, index: k, order: m })
            })
            .collect()
    }
}

/// A representation built by the fundamental construction.
#[derive(Clone, Debug)]
pub struct ReflectionRep {
    ctx: Arc<FieldContext>,
    tree: SpanningTree,
    params: ParameterSystem,
    cartan: FieldMatrix,
    generators: Vec<FieldMatrix>,
}

/// Cartan matrix and its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanMatrixData {
    pub entries: FieldMatrix,
    pub discriminant: FieldElement,
}

/// Generator matrices `I - E_s C` from a Cartan matrix.
pub fn generators_from_cartan(cartan: &FieldMatrix) -> Vec<FieldMatrix> {
    let n = cartan.rows();
    (0..n)
        .map(|s| {
            let mut m = FieldMatrix::identity(n);
            for t in 0..n {
                let delta = if s == t { FieldElement::one() } else { FieldElement::zero() };
                m[(s, t)] = &delta - &cartan[(s, t)];
            }
            m
        })
        .collect()
}

/// Builds the representation attached to `tree` (and its root) and `params`.
pub fn build(tree: &SpanningTree, params: &ParameterSystem) -> Result<ReflectionRep> {
    params.check_complete(tree)?;
    let d = tree.diagram();
    let ctx = field_context(d.conductor());
    let n = d.rank();
    let mut cartan = FieldMatrix::from_fn(n, n, |i, j| if i == j { ctx.from_i64(2) } else { ctx.zero() });
    for &(s, t) in tree.tree_edges() {
        let alpha = params.alpha_value(&ctx, d, (s, t))?;
        let (upper, lower) = if tree.parent(t) == Some(s) { (s, t) } else { (t, s) };
        cartan[(upper, lower)] = -alpha;
        cartan[(lower, upper)] = ctx.from_i64(-1);
    }
    for &(s, t) in tree.chords() {
        let alpha = params.alpha_value(&ctx, d, (s, t))?;
        let l = params.chord_value((s, t))?.in_context(&ctx)?;
        let l_back = alpha.checked_div(&l)?;
        cartan[(s, t)] = -l;
        cartan[(t, s)] = -l_back;
    }
    let generators = generators_from_cartan(&cartan);
    Ok(ReflectionRep { ctx, tree: tree.clone(), params: params.clone(), cartan, generators })
}

impl ReflectionRep {
    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn diagram(&self) -> &Arc<Diagram> {
        self.tree.diagram()
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }

    pub fn params(&self) -> &ParameterSystem {
        &self.params
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[FieldMatrix] {
        &self.generators
    }

    pub fn generator(&self, s: usize) -> &FieldMatrix {
        &self.generators[s]
    }

    /// The Cartan matrix assembled during the build.
    pub fn cartan(&self) -> &FieldMatrix {
        &self.cartan
    }

    pub fn alpha(&self, e: Edge) -> Result<FieldElement> {
        self.params.alpha_value(&self.ctx, self.diagram(), e)
    }
}

/// Cartan matrix read back from the generator matrices, with its determinant.
pub fn cartan_matrix(rep: &ReflectionRep) -> CartanMatrixData {
    let n = rep.rank();
    let entries = FieldMatrix::from_fn(n, n, |j, i| {
        let delta = if i == j { rep.ctx.one() } else { rep.ctx.zero() };
        &delta - &rep.generators[j][(j, i)]
    });
    let discriminant = entries.det();
    CartanMatrixData { entries, discriminant }
}

/// `2cos(pi / m)` in `ctx`; requires `2m | N`.
pub fn half_angle_cos(ctx: &Arc<FieldContext>, m: u64) -> Result<FieldElement> {
    cos_element(ctx, 1, 2 * m)
}

/// Parameters of the geometric representation: `k = 1` on every edge, and
/// chord scalars making the representation conjugate to the one with
/// symmetric Cartan entries `-2cos(pi / m)`.
pub fn geometric_parameters(tree: &SpanningTree) -> Result<ParameterSystem> {
    let d = tree.diagram();
    let ctx = field_context(d.conductor());
    let alpha: BTreeMap<Edge, u64> = d.edges().iter().map(|&e| (e, 1)).collect();
    let mut chords = BTreeMap::new();
    for &(s, t) in tree.chords() {
        let circuit = tree.chord_circuit(s, t)?;
        let mut b = half_angle_cos(&ctx, d.order(s, t))?;
        let mut before_entry = ctx.one();
        for (k, w) in circuit.path.windows(2).enumerate() {
            let m = d.order(w[0], w[1]);
            b = &b * &half_angle_cos(&ctx, m)?;
            if k < circuit.entry {
                before_entry = &before_entry * &alpha_value(&ctx, 1, m)?;
            }
        }
        chords.insert((s, t), b.checked_div(&before_entry)?);
    }
    Ok(ParameterSystem { alpha, chords })
}

/// A diagonal matrix `g` with `g * target_s = source_s * g` for every
/// generator, together with the target representation.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    pub matrix: FieldMatrix,
    pub target: ReflectionRep,
}

/// Whether `g` is invertible and `g * to_s = from_s * g` for all `s`.
pub fn is_intertwiner(g: &FieldMatrix, from: &[FieldMatrix], to: &[FieldMatrix]) -> bool {
    from.len() == to.len()
        && !g.det().is_zero()
        && from.iter().zip(to).all(|(a, b)| g.mul(b) == a.mul(g))
}

/// Parameters carried over to `tree` by conjugating with `diag(lambda)`.
fn transported_params(rep: &ReflectionRep, tree: &SpanningTree, lambda: &[FieldElement]) -> Result<ParameterSystem> {
    let mut chords = BTreeMap::new();
    for &(s, t) in tree.chords() {
        let c = &rep.cartan[(s, t)] * &lambda[t];
        chords.insert((s, t), -c.checked_div(&lambda[s])?);
    }
    Ok(ParameterSystem { alpha: rep.params.alpha.clone(), chords })
}

/// Intertwiner to the representation rooted at `new_root`.
///
/// Each step to an adjacent root scales the side of the old root by the
/// alpha of the edge crossed; chords crossing the cut have their scalars
/// transported accordingly.
pub fn root_change_intertwiner(rep: &ReflectionRep, new_root: usize) -> Result<Intertwiner> {
    let n = rep.rank();
    if new_root >= n {
        return Err(CoxError::UnknownVertex(new_root.to_string()));
    }
    let mut lambda = vec![rep.ctx.one(); n];
    let mut current = rep.tree.clone();
    for w in rep.tree.path(rep.root(), new_root).windows(2) {
        let (r, next) = (w[0], w[1]);
        let alpha = rep.alpha((r, next))?;
        for (v, l) in lambda.iter_mut().enumerate() {
            if !current.precedes(next, v) {
                *l = &*l * &alpha;
            }
        }
        current = current.with_root(next)?;
    }
    let params = transported_params(rep, &current, &lambda)?;
    let target = build(&current, &params)?;
    Ok(Intertwiner { matrix: FieldMatrix::diagonal(&lambda), target })
}

/// Scaling over a tree sharing the root of `rep`: parents first, each child
/// scaled so that its edge gets the `(-alpha, -1)` pattern.
fn propagate(rep: &ReflectionRep, tree: &SpanningTree) -> Result<(Vec<FieldElement>, ReflectionRep)> {
    let n = rep.rank();
    let mut lambda = vec![rep.ctx.one(); n];
    for v in tree.top_down() {
        let Some(p) = tree.parent(v) else { continue };
        let c = &rep.cartan[(p, v)];
        if c.is_zero() {
            return Err(CoxError::InvalidInput(format!("edge ({p}, {v}) has a zero Cartan entry")));
        }
        let alpha = rep.alpha((p, v))?;
        lambda[v] = (-(&lambda[p] * &alpha)).checked_div(c)?;
    }
    let params = transported_params(rep, tree, &lambda)?;
    let target = build(tree, &params)?;
    Ok((lambda, target))
}

/// Intertwiner to the representation built on `new_tree`, composed from
/// single edge swaps (and a final root change if the roots differ).
pub fn tree_change_intertwiner(rep: &ReflectionRep, new_tree: &SpanningTree) -> Result<Intertwiner> {
    if new_tree.diagram().matrix() != rep.diagram().matrix() {
        return Err(CoxError::DifferentDiagram);
    }
    let n = rep.rank();
    let mut g = FieldMatrix::identity(n);
    let mut current = rep.clone();
    for (add, remove) in swap_sequence(&rep.tree, new_tree)? {
        let next = current.tree.swap(add, remove)?;
        let (lambda, target) = propagate(&current, &next)?;
        g = g.mul(&FieldMatrix::diagonal(&lambda));
        current = target;
    }
    if new_tree.root() != current.root() {
        let step = root_change_intertwiner(&current, new_tree.root())?;
        g = g.mul(&step.matrix);
        current = step.target;
    }
    Ok(Intertwiner { matrix: g, target: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{spanning_tree, validate, CoxeterMatrix};
    use crate::scalar::Rational;

    fn diagram(m: Vec<Vec<i64>>) -> Arc<Diagram> {
        validate(&CoxeterMatrix::new(m)).unwrap()
    }

    fn b3() -> Arc<Diagram> {
        diagram(vec![vec![1, 3, 2], vec![3, 1, 4], vec![2, 4, 1]])
    }

    fn triangle() -> Arc<Diagram> {
        diagram(vec![vec![1, 3, 3], vec![3, 1, 3], vec![3, 3, 1]])
    }

    fn ints(m: &FieldMatrix) -> Vec<Vec<i64>> {
        m.to_rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let q = x.as_rational().expect("rational entry");
                        assert!(q.is_integer());
                        i64::try_from(q.to_integer()).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    fn geometric(d: &Arc<Diagram>, root: usize) -> ReflectionRep {
        let t = spanning_tree(d, root).unwrap();
        build(&t, &geometric_parameters(&t).unwrap()).unwrap()
    }

    #[test]
    fn b3_cartan_matrices() {
        let d = b3();
        let at2 = geometric(&d, 1);
        assert_eq!(ints(at2.cartan()), vec![vec![2, -1, 0], vec![-1, 2, -2], vec![0, -1, 2]]);
        let at3 = geometric(&d, 2);
        assert_eq!(ints(at3.cartan()), vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -2, 2]]);
        assert_eq!(cartan_matrix(&at2).entries, *at2.cartan());
    }

    #[test]
    fn rank_one() {
        let d = diagram(vec![vec![1]]);
        let rep = geometric(&d, 0);
        assert_eq!(ints(rep.generator(0)), vec![vec![-1]]);
        assert_eq!(cartan_matrix(&rep).discriminant, FieldElement::integer(2));
    }

    #[test]
    fn a2_discriminant() {
        let rep = geometric(&diagram(vec![vec![1, 3], vec![3, 1]]), 0);
        assert_eq!(cartan_matrix(&rep).discriminant, FieldElement::integer(3));
    }

    #[test]
    fn generators_are_reflections() {
        let rep = geometric(&triangle(), 0);
        for m in rep.generators() {
            assert!(m.mul(m).is_identity());
            assert_eq!(m.sub(&FieldMatrix::identity(3)).rank(), 1);
        }
    }

    #[test]
    fn triangle_geometric_chord() {
        let t = spanning_tree(&triangle(), 0).unwrap();
        let p = geometric_parameters(&t).unwrap();
        assert_eq!(p.chords[&(1, 2)], FieldElement::integer(1));
    }

    #[test]
    fn geometric_rep_is_diagonally_conjugate_to_symmetric_one() {
        // the symmetric Cartan matrix -2cos(pi/m) must be reachable by a
        // diagonal change of basis
        let d = diagram(vec![
            vec![1, 3, 2, 4],
            vec![3, 1, 5, 3],
            vec![2, 5, 1, 3],
            vec![4, 3, 3, 1],
        ]);
        for root in 0..4 {
            let rep = geometric(&d, root);
            let ctx = rep.context().clone();
            let sym = FieldMatrix::from_fn(4, 4, |i, j| {
                if i == j {
                    ctx.from_i64(2)
                } else if d.has_edge(i, j) {
                    -half_angle_cos(&ctx, d.order(i, j)).unwrap()
                } else {
                    ctx.zero()
                }
            });
            // c_st = sym_st * mu_s / mu_t, mu propagated over the tree
            let mut mu = vec![ctx.one(); 4];
            for v in rep.tree().top_down() {
                if let Some(p) = rep.tree().parent(v) {
                    mu[v] = (&mu[p] * &sym[(p, v)]).checked_div(&rep.cartan()[(p, v)]).unwrap();
                }
            }
            for s in 0..4 {
                for t in 0..4 {
                    let want = (&sym[(s, t)] * &mu[s]).checked_div(&mu[t]).unwrap();
                    assert_eq!(rep.cartan()[(s, t)], want, "root {root} entry ({s},{t})");
                }
            }
        }
    }

    #[test]
    fn incomplete_and_zero_parameters() {
        let t = spanning_tree(&triangle(), 0).unwrap();
        let mut p = geometric_parameters(&t).unwrap();
        p.chords.insert((1, 2), FieldElement::integer(0));
        assert_eq!(build(&t, &p).unwrap_err(), CoxError::ZeroChordParameter(1, 2));
        p.chords.clear();
        assert!(matches!(build(&t, &p).unwrap_err(), CoxError::IncompleteParameters(_)));
    }

    #[test]
    fn choice_issues_flag_non_roots() {
        let d = b3();
        let t = spanning_tree(&d, 1).unwrap();
        let mut p = geometric_parameters(&t).unwrap();
        assert!(p.choice_issues(&d).is_empty());
        p.alpha.insert((1, 2), 2);
        assert_eq!(p.choice_issues(&d), vec![ChoiceIssue { edge: (1, 2), index: 2, order: 4 }]);
        // still builds: alpha = 0 on that edge
        assert!(build(&t, &p).is_ok());
    }

    #[test]
    fn b3_root_change() {
        let rep = geometric(&b3(), 1);
        let step = root_change_intertwiner(&rep, 2).unwrap();
        assert_eq!(ints(&step.matrix), vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        assert!(is_intertwiner(&step.matrix, rep.generators(), step.target.generators()));
        assert_eq!(step.target.cartan(), geometric(&b3(), 2).cartan());
        let same = root_change_intertwiner(&rep, 1).unwrap();
        assert!(same.matrix.is_identity());
    }

    #[test]
    fn triangle_tree_change() {
        let d = triangle();
        let star = spanning_tree(&d, 0).unwrap();
        let path = SpanningTree::from_edges(&d, 0, &[(0, 1), (1, 2)]).unwrap();
        let mut p = geometric_parameters(&star).unwrap();
        p.chords.insert((1, 2), FieldElement::rational(&Rational::new(3.into(), 7.into())));
        let rep = build(&star, &p).unwrap();
        let change = tree_change_intertwiner(&rep, &path).unwrap();
        assert!(change.matrix.is_diagonal());
        assert!(is_intertwiner(&change.matrix, rep.generators(), change.target.generators()));
        assert_eq!(change.target.tree().tree_edges(), path.tree_edges());
        let same = tree_change_intertwiner(&rep, &star).unwrap();
        assert!(same.matrix.is_identity());
    }

    #[test]
    fn root_change_with_crossing_chord() {
        let d = triangle();
        let star = spanning_tree(&d, 0).unwrap();
        let mut p = geometric_parameters(&star).unwrap();
        p.chords.insert((1, 2), FieldElement::integer(5));
        let rep = build(&star, &p).unwrap();
        for r in 0..3 {
            let step = root_change_intertwiner(&rep, r).unwrap();
            assert!(is_intertwiner(&step.matrix, rep.generators(), step.target.generators()));
            assert_eq!(step.target.root(), r);
        }
    }
}
