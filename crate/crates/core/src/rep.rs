//! Representations, relation evaluation and extension middle terms.
//!
//! A representation of dimension vector `d` assigns to each arrow `a` a
//! `d[t(a)] x d[s(a)]` matrix. All dimensions computed from these matrices
//! are dimensions of solution spaces of rational linear systems, hence agree
//! with the dimensions over any algebraically closed field containing `Q`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{random_invertible_with, Matrix};
use crate::quiver::{BoundQuiver, DimVector, Path, Quiver, Relation};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Representation<F> {
    quiver: Arc<Quiver>,
    dim: DimVector,
    matrices: Vec<Matrix<F>>,
}

pub(crate) fn same_quiver(a: &Arc<Quiver>, b: &Arc<Quiver>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::DifferentQuivers)
    }
}

impl<F: Scalar> Representation<F> {
    /// Checks every matrix against the shape `d[t] x d[s]` of its arrow.
    pub fn new(quiver: Arc<Quiver>, dim: DimVector, matrices: Vec<Matrix<F>>) -> Result<Self> {
        if dim.len() != quiver.vertex_count() {
            return Err(Error::WrongDimension(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                dim.len(),
                quiver.vertex_count()
            )));
        }
        if matrices.len() != quiver.arrow_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for {} arrows",
                matrices.len(),
                quiver.arrow_count()
            )));
        }
        for (arrow, m) in quiver.arrows().iter().zip(&matrices) {
            let expected = (dim.get(arrow.target), dim.get(arrow.source));
            if m.shape() != expected {
                return Err(Error::ShapeMismatch(format!(
                    "arrow `{}` needs {}x{}, got {}x{}",
                    arrow.name,
                    expected.0,
                    expected.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Representation {
            quiver,
            dim,
            matrices,
        })
    }

    /// All arrow matrices zero.
    pub fn zero(quiver: Arc<Quiver>, dim: DimVector) -> Result<Self> {
        let matrices = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(dim.get(a.target), dim.get(a.source)))
            .collect();
        Self::new(quiver, dim, matrices)
    }

    /// The simple representation at vertex `v`.
    pub fn simple(quiver: Arc<Quiver>, v: usize) -> Self {
        let n = quiver.vertex_count();
        Self::zero(quiver, DimVector::unit(n, v)).expect("unit vector has the right length")
    }

    /// Replaces the matrix of the named arrow.
    pub fn with_matrix(mut self, arrow: &str, m: Matrix<F>) -> Result<Self> {
        let a = self.quiver.arrow_id(arrow)?;
        let arr = self.quiver.arrow(a);
        let expected = (self.dim.get(arr.target), self.dim.get(arr.source));
        if m.shape() != expected {
            return Err(Error::ShapeMismatch(format!(
                "arrow `{arrow}` needs {}x{}, got {}x{}",
                expected.0,
                expected.1,
                m.rows(),
                m.cols()
            )));
        }
        self.matrices[a] = m;
        Ok(self)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn matrix(&self, a: usize) -> &Matrix<F> {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.matrices
    }

    /// `sum_x d_x^2`, the dimension of the base-change group.
    pub fn gl_dim(&self) -> usize {
        self.dim.entries().iter().map(|d| d * d).sum()
    }

    /// Product of the arrow matrices along `p`; the identity on trivial paths.
    pub fn evaluate_path(&self, p: &Path) -> Matrix<F> {
        let mut acc = Matrix::identity(self.dim.get(p.target()));
        for &a in p.arrows() {
            acc = acc.mul(&self.matrices[a]);
        }
        acc
    }

    /// Coefficient-weighted sum of the path evaluations.
    pub fn evaluate_relation(&self, rel: &Relation<F>) -> Matrix<F> {
        let mut out = Matrix::zeros(self.dim.get(rel.target()), self.dim.get(rel.source()));
        for (c, p) in rel.terms() {
            out.add_scaled(c, &self.evaluate_path(p));
        }
        out
    }

    /// Index of the first relation that does not vanish, if any.
    pub fn first_failing_relation(&self, bq: &BoundQuiver<F>) -> Option<usize> {
        bq.relations()
            .iter()
            .position(|rel| !self.evaluate_relation(rel).is_zero())
    }

    /// `true` iff every relation of `bq` evaluates to zero.
    pub fn is_variety_point(&self, bq: &BoundQuiver<F>) -> bool {
        self.first_failing_relation(bq).is_none()
    }

    /// Block-diagonal sum with `self` in the first block.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        same_quiver(&self.quiver, &other.quiver)?;
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.block_diag(b))
            .collect();
        Self::new(self.quiver.clone(), self.dim.add(&other.dim), matrices)
    }

    /// The base change `(g M)_a = g_t M_a g_s^{-1}` for invertible `g_x`.
    pub fn conjugate(&self, g: &[Matrix<F>]) -> Result<Self> {
        if g.len() != self.quiver.vertex_count() {
            return Err(Error::ShapeMismatch("one matrix per vertex required".into()));
        }
        let inverses = g
            .iter()
            .enumerate()
            .map(|(v, gv)| {
                let d = self.dim.get(v);
                if gv.shape() != (d, d) {
                    return Err(Error::ShapeMismatch(format!(
                        "base change at vertex `{}` must be {d}x{d}",
                        self.quiver.vertex_name(v)
                    )));
                }
                gv.inverse().ok_or_else(|| {
                    Error::ShapeMismatch(format!(
                        "base change at vertex `{}` is singular",
                        self.quiver.vertex_name(v)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let matrices = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.matrices)
            .map(|(a, m)| g[a.target].mul(m).mul(&inverses[a.source]))
            .collect();
        Self::new(self.quiver.clone(), self.dim.clone(), matrices)
    }

    /// Conjugates by a random invertible base change with entries in
    /// `[-bound, bound]`; returns the base change as well.
    pub fn random_conjugate<R: Rng>(&self, rng: &mut R, bound: i64) -> (Self, Vec<Matrix<F>>) {
        let g: Vec<Matrix<F>> = self
            .dim
            .entries()
            .iter()
            .map(|&d| random_invertible_with(rng, d, bound))
            .collect();
        let conj = self.conjugate(&g).expect("random base change is invertible");
        (conj, g)
    }
}

/// A tuple `Z = (Z_a)` with `Z_a` of shape `d'[t(a)] x d''[s(a)]`, where
/// `d'` is the dimension of the sub representation `U` and `d''` that of
/// the quotient `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleElement<F> {
    matrices: Vec<Matrix<F>>,
}


/// Shapes `(d'[t(a)], d''[s(a)])` of the cocycle components for `(U, V)`.
pub fn cocycle_shapes<F: Scalar>(u: &Representation<F>, v: &Representation<F>) -> Vec<(usize, usize)> {
    u.quiver()
        .arrows()
        .iter()
        .map(|a| (u.dim().get(a.target), v.dim().get(a.source)))
        .collect()
}

/// `sum_a d'[t(a)] * d''[s(a)]`.
pub fn cocycle_ambient_dim<F: Scalar>(u: &Representation<F>, v: &Representation<F>) -> usize {
    cocycle_shapes(u, v).iter().map(|(r, c)| r * c).sum()
}

impl<F: Scalar> CocycleElement<F> {
    pub fn zero(u: &Representation<F>, v: &Representation<F>) -> Self {
        CocycleElement {
            matrices: cocycle_shapes(u, v)
                .into_iter()
                .map(|(r, c)| Matrix::zeros(r, c))
                .collect(),
        }
    }

    /// Checks the shapes against `(U, V)`.
    pub fn new(u: &Representation<F>, v: &Representation<F>, matrices: Vec<Matrix<F>>) -> Result<Self> {
        let shapes = cocycle_shapes(u, v);
        if matrices.len() != shapes.len()
            || matrices.iter().zip(&shapes).any(|(m, s)| m.shape() != *s)
        {
            return Err(Error::ShapeMismatch("cocycle components have wrong shapes".into()));
        }
        Ok(CocycleElement { matrices })
    }

    /// Unpacks coordinates laid out arrow by arrow, each block row-major.
    pub fn from_coords(u: &Representation<F>, v: &Representation<F>, coords: &[F]) -> Self {
        let mut offset = 0;
        let matrices = cocycle_shapes(u, v)
            .into_iter()
            .map(|(r, c)| {
                let m = Matrix::from_vec(r, c, coords[offset..offset + r * c].to_vec());
                offset += r * c;
                m
            })
            .collect();
        assert_eq!(offset, coords.len(), "coordinate vector has wrong length");
        CocycleElement { matrices }
    }

    pub fn coords(&self) -> Vec<F> {
        self.matrices
            .iter()
            .flat_map(|m| m.as_slice().iter().cloned())
            .collect()
    }

    pub fn matrix(&self, a: usize) -> &Matrix<F> {
        &self.matrices[a]
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.matrices
    }
}

/// `Z_rho`: for each term, the sum over all ways of replacing exactly one
/// arrow matrix by its `Z` component, `U` to the left and `V` to the right.
pub fn twisted_evaluate<F: Scalar>(
    z: &CocycleElement<F>,
    rel: &Relation<F>,
    u: &Representation<F>,
    v: &Representation<F>,
) -> Matrix<F> {
    let rows = u.dim().get(rel.target());
    let cols = v.dim().get(rel.source());
    let mut out = Matrix::zeros(rows, cols);
    for (c, p) in rel.terms() {
        let arrows = p.arrows();
        // suffix[j] = V_{a_{j+1}} ... V_{a_m}
        let mut suffix = vec![Matrix::identity(cols); arrows.len()];
        for j in (0..arrows.len().saturating_sub(1)).rev() {
            suffix[j] = v.matrix(arrows[j + 1]).mul(&suffix[j + 1]);
        }
        let mut prefix = Matrix::identity(rows);
        for (j, &a) in arrows.iter().enumerate() {
            let term = prefix.mul(z.matrix(a)).mul(&suffix[j]);
            out.add_scaled(c, &term);
            prefix = prefix.mul(u.matrix(a));
        }
    }
    out
}

/// `true` iff `Z_rho = 0` for every relation.
pub fn is_cocycle<F: Scalar>(
    z: &CocycleElement<F>,
    bq: &BoundQuiver<F>,
    u: &Representation<F>,
    v: &Representation<F>,
) -> bool {
    bq.relations()
        .iter()
        .all(|rel| twisted_evaluate(z, rel, u, v).is_zero())
}

/// The middle term `W^Z` with `W_a = [[U_a, Z_a], [0, V_a]]`.
pub fn middle_term<F: Scalar>(
    z: &CocycleElement<F>,
    u: &Representation<F>,
    v: &Representation<F>,
    bq: &BoundQuiver<F>,
) -> Result<Representation<F>> {
    same_quiver(u.quiver(), v.quiver())?;
    same_quiver(u.quiver(), bq.quiver())?;
    if let Some(relation) = bq
        .relations()
        .iter()
        .position(|rel| !twisted_evaluate(z, rel, u, v).is_zero())
    {
        return Err(Error::NotACocycle { relation });
    }
    Ok(block_extension(z, u, v))
}

/// `W^Z` without the cocycle check.
pub(crate) fn block_extension<F: Scalar>(
    z: &CocycleElement<F>,
    u: &Representation<F>,
    v: &Representation<F>,
) -> Representation<F> {
    let matrices = (0..u.quiver().arrow_count())
        .map(|a| {
            let lower = Matrix::zeros(v.matrix(a).rows(), u.matrix(a).cols());
            Matrix::block2x2(u.matrix(a), z.matrix(a), &lower, v.matrix(a))
        })
        .collect();
    Representation::new(u.quiver().clone(), u.dim().add(v.dim()), matrices)
        .expect("block shapes follow from U and V")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_int(v)
    }

    fn a3_bound() -> BoundQuiver<Q> {
        let quiver = Arc::new(
            Quiver::new(["1", "2", "3"], [("alpha", "2", "1"), ("beta", "3", "2")]).unwrap(),
        );
        let rel = Relation::from_named(&quiver, &[(1, &["alpha", "beta"])]).unwrap();
        BoundQuiver::new(quiver, vec![rel]).unwrap()
    }

    fn a3_point(alpha: i64, beta: i64) -> Representation<Q> {
        let bq = a3_bound();
        Representation::zero(bq.quiver().clone(), DimVector::new(vec![1, 1, 1]))
            .unwrap()
            .with_matrix("alpha", Matrix::scalar(q(alpha)))
            .unwrap()
            .with_matrix("beta", Matrix::scalar(q(beta)))
            .unwrap()
    }

    #[test]
    fn evaluate_path_examples() {
        let bq = a3_bound();
        let m = a3_point(1, 0);
        assert_eq!(m.evaluate_path(&Path::trivial(1)), Matrix::identity(1));
        let ab = Path::from_names(bq.quiver(), &["alpha", "beta"]).unwrap();
        assert_eq!(m.evaluate_path(&ab), Matrix::scalar(q(0)));
        let a = Path::from_names(bq.quiver(), &["alpha"]).unwrap();
        assert_eq!(m.evaluate_path(&a), Matrix::scalar(q(1)));
    }

    #[test]
    fn variety_membership() {
        let bq = a3_bound();
        assert!(a3_point(1, 0).is_variety_point(&bq));
        assert!(!a3_point(1, 1).is_variety_point(&bq));
        let zero = Representation::zero(bq.quiver().clone(), DimVector::new(vec![2, 1, 3])).unwrap();
        assert!(zero.evaluate_relation(&bq.relations()[0]).is_zero());
        assert!(a3_point(1, 1).is_variety_point(&BoundQuiver::free(bq.quiver().clone())));
    }

    #[test]
    fn shape_checks() {
        let bq = a3_bound();
        let m = Representation::<Q>::zero(bq.quiver().clone(), DimVector::new(vec![1, 2, 1])).unwrap();
        assert!(m.clone().with_matrix("alpha", Matrix::zeros(2, 1)).is_err());
        assert!(m.with_matrix("alpha", Matrix::zeros(1, 2)).is_ok());
    }

    #[test]
    fn twisted_evaluation_a3() {
        let bq = a3_bound();
        let m = a3_point(1, 0);
        let z = CocycleElement::from_coords(&m, &m, &[q(5), q(7)]);
        // Z_rho = U_alpha Z_beta + Z_alpha V_beta = Z_beta
        assert_eq!(twisted_evaluate(&z, &bq.relations()[0], &m, &m), Matrix::scalar(q(7)));
        let z0 = CocycleElement::zero(&m, &m);
        assert!(twisted_evaluate(&z0, &bq.relations()[0], &m, &m).is_zero());
    }

    #[test]
    fn length_one_relation_returns_component() {
        let quiver = Arc::new(Quiver::new(["1", "2"], [("a", "1", "2")]).unwrap());
        let rel = Relation::<Q>::from_named(&quiver, &[(1, &["a"])]).unwrap();
        let m = Representation::zero(quiver, DimVector::new(vec![2, 1])).unwrap();
        let z = CocycleElement::from_coords(&m, &m, &[q(3), q(-4)]);
        assert_eq!(twisted_evaluate(&z, &rel, &m, &m), Matrix::from_ints(1, 2, &[3, -4]));
    }

    #[test]
    fn direct_sum_and_split_middle_term() {
        let quiver = Arc::new(Quiver::new(["1", "2"], [("a", "1", "2")]).unwrap());
        let bq = BoundQuiver::<Q>::free(quiver.clone());
        let s1 = Representation::simple(quiver.clone(), 0);
        let s2 = Representation::simple(quiver.clone(), 1);
        let sum = s1.direct_sum(&s2).unwrap();
        assert_eq!(sum.dim().entries(), &[1, 1]);
        assert_eq!(sum.matrix(0), &Matrix::scalar(q(0)));

        let z0 = CocycleElement::zero(&s2, &s1);
        assert_eq!(middle_term(&z0, &s2, &s1, &bq).unwrap(), s2.direct_sum(&s1).unwrap());

        let z = CocycleElement::from_coords(&s2, &s1, &[q(1)]);
        let w = middle_term(&z, &s2, &s1, &bq).unwrap();
        assert_eq!(w.matrix(0), &Matrix::scalar(q(1)));
        assert_eq!(w.dim().entries(), &[1, 1]);
    }

    #[test]
    fn middle_term_rejects_non_cocycle() {
        let bq = a3_bound();
        let m = a3_point(1, 0);
        let z = CocycleElement::from_coords(&m, &m, &[q(0), q(1)]);
        assert_eq!(middle_term(&z, &m, &m, &bq), Err(Error::NotACocycle { relation: 0 }));
    }

    #[test]
    fn conjugation_preserves_relations() {
        let bq = a3_bound();
        let m = a3_point(3, 0);
        let g = vec![Matrix::scalar(q(2)), Matrix::scalar(q(-1)), Matrix::scalar(q(5))];
        let gm = m.conjugate(&g).unwrap();
        assert_eq!(gm.matrix(0), &Matrix::scalar(q(-6)));
        assert!(gm.is_variety_point(&bq));
        assert!(m.conjugate(&[Matrix::scalar(q(0)), Matrix::identity(1), Matrix::identity(1)]).is_err());
    }
}
