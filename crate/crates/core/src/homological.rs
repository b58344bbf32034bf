//! Hom spaces, cocycles, coboundaries and the Ext dimensions derived from
//! them.
//!
//! Conventions: for a pair `(V, U)` the cocycle space `Z(V, U)` consists of
//! tuples `Z_a : V_{s(a)} -> U_{t(a)}` killed by every twisted relation, and
//! classifies extensions `0 -> U -> W^Z -> V -> 0`. The coboundary map is
//! `h |-> (U_a h_{s(a)} - h_{t(a)} V_a)_a` on `h = (h_x : V_x -> U_x)`; its
//! kernel is `Hom(V, U)` and its image is `B(V, U)`. No projective
//! resolutions are built: `Ext^1 = Z / B` and `Ext^2` is read off the Euler
//! form when the caller vouches for global dimension at most two.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::euler_form;
use crate::linalg::{matrix_of_linear_map, seeded_rng, Matrix, SubspaceBasis};
use crate::quiver::BoundQuiver;
use crate::rep::{cocycle_ambient_dim, same_quiver, twisted_evaluate, CocycleElement, Representation};
use crate::scalar::Scalar;

/// Default number of random draws in [`iso_probable`].
pub const DEFAULT_ISO_TRIALS: usize = 8;
/// Default coefficient bound for the random draws in [`iso_probable`].
pub const DEFAULT_ISO_BOUND: i64 = 100;

/// Shapes `(rows, cols)` of the per-vertex blocks of a map `from -> to`.
fn vertex_shapes<F: Scalar>(from: &Representation<F>, to: &Representation<F>) -> Vec<(usize, usize)> {
    (0..from.quiver().vertex_count())
        .map(|x| (to.dim().get(x), from.dim().get(x)))
        .collect()
}

fn unpack_blocks<F: Scalar>(coords: &[F], shapes: &[(usize, usize)]) -> Vec<Matrix<F>> {
    let mut offset = 0;
    shapes
        .iter()
        .map(|&(r, c)| {
            let m = Matrix::from_vec(r, c, coords[offset..offset + r * c].to_vec());
            offset += r * c;
            m
        })
        .collect()
}

/// The linear map `h |-> (to_a h_{s(a)} - h_{t(a)} from_a)_a`, whose kernel is
/// `Hom(from, to)` and whose image is `B(from, to)`. Columns index the
/// vertex blocks of `h`, rows the arrow blocks in cocycle layout.
fn intertwiner_system<F: Scalar>(from: &Representation<F>, to: &Representation<F>) -> Matrix<F> {
    let shapes = vertex_shapes(from, to);
    let n_in: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let n_out = cocycle_ambient_dim(to, from);
    let quiver = from.quiver().clone();
    matrix_of_linear_map(n_in, n_out, |coords| {
        let h = unpack_blocks(coords, &shapes);
        let mut out = Vec::with_capacity(n_out);
        for (a, arrow) in quiver.arrows().iter().enumerate() {
            let lhs = to.matrix(a).mul(&h[arrow.source]);
            let rhs = h[arrow.target].mul(from.matrix(a));
            out.extend(lhs.sub(&rhs).into_vec());
        }
        out
    })
}

/// A basis of `Hom(M, N)`; each member is a family `(f_x)` of
/// `N_x x M_x` matrices with `N_a f_{s(a)} = f_{t(a)} M_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomBasis<F> {
    pub maps: Vec<Vec<Matrix<F>>>,
}


impl<F: Scalar> HomBasis<F> {
    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    /// The combination `sum_i coeffs[i] * maps[i]`, vertex by vertex.
    pub fn combine(&self, coeffs: &[F]) -> Option<Vec<Matrix<F>>> {
        let first = self.maps.first()?;
        let mut out: Vec<Matrix<F>> = first.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
        for (c, map) in coeffs.iter().zip(&self.maps) {
            for (o, f) in out.iter_mut().zip(map) {
                o.add_scaled(c, f);
            }
        }
        Some(out)
    }
}

pub fn hom_basis<F: Scalar>(m: &Representation<F>, n: &Representation<F>) -> Result<HomBasis<F>> {
    same_quiver(m.quiver(), n.quiver())?;
    let shapes = vertex_shapes(m, n);
    let kernel = intertwiner_system(m, n).kernel_basis();
    Ok(HomBasis {
        maps: kernel
            .vectors
            .iter()
            .map(|v| unpack_blocks(v, &shapes))
            .collect(),
    })
}

/// `dim Hom(M, N)`.
pub fn hom_dim<F: Scalar>(m: &Representation<F>, n: &Representation<F>) -> Result<usize> {
    same_quiver(m.quiver(), n.quiver())?;
    let system = intertwiner_system(m, n);
    Ok(system.cols() - system.rank())
}

/// The matrix of `Z |-> (Z_rho)_rho` on the ambient cocycle coordinates.
pub(crate) fn cocycle_constraints<F: Scalar>(
    v: &Representation<F>,
    u: &Representation<F>,
    bq: &BoundQuiver<F>,
) -> Matrix<F> {
    let n_in = cocycle_ambient_dim(u, v);
    let n_out: usize = bq
        .relations()
        .iter()
        .map(|r| u.dim().get(r.target()) * v.dim().get(r.source()))
        .sum();
    matrix_of_linear_map(n_in, n_out, |coords| {
        let z = CocycleElement::from_coords(u, v, coords);
        bq.relations()
            .iter()
            .flat_map(|rel| twisted_evaluate(&z, rel, u, v).into_vec())
            .collect()
    })
}

fn check_pair<F: Scalar>(v: &Representation<F>, u: &Representation<F>, bq: &BoundQuiver<F>) -> Result<()> {
    same_quiver(v.quiver(), u.quiver())?;
    same_quiver(v.quiver(), bq.quiver())
}

/// Basis of `Z(V, U)` in cocycle coordinates (arrow blocks, row-major).
pub fn cocycle_space<F: Scalar>(
    v: &Representation<F>,
    u: &Representation<F>,
    bq: &BoundQuiver<F>,
) -> Result<SubspaceBasis<F>> {
    check_pair(v, u, bq)?;
    Ok(cocycle_constraints(v, u, bq).kernel_basis())
}

/// Basis of `B(V, U)`, the image of the coboundary map.
pub fn coboundary_space<F: Scalar>(v: &Representation<F>, u: &Representation<F>) -> Result<SubspaceBasis<F>> {
    same_quiver(v.quiver(), u.quiver())?;
    Ok(intertwiner_system(v, u).column_space_basis())
}

/// The coboundary `delta(h)` of a vertex family `h_x : V_x -> U_x`.
pub fn coboundary<F: Scalar>(
    h: &[Matrix<F>],
    v: &Representation<F>,
    u: &Representation<F>,
) -> CocycleElement<F> {
    let matrices = u
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, arrow)| {
            u.matrix(a)
                .mul(&h[arrow.source])
                .sub(&h[arrow.target].mul(v.matrix(a)))
        })
        .collect();
    CocycleElement::new(u, v, matrices).expect("coboundary has cocycle shapes")
}

pub fn cocycle_dim<F: Scalar>(v: &Representation<F>, u: &Representation<F>, bq: &BoundQuiver<F>) -> Result<usize> {
    check_pair(v, u, bq)?;
    let c = cocycle_constraints(v, u, bq);
    Ok(c.cols() - c.rank())
}

pub fn coboundary_dim<F: Scalar>(v: &Representation<F>, u: &Representation<F>) -> Result<usize> {
    same_quiver(v.quiver(), u.quiver())?;
    Ok(intertwiner_system(v, u).rank())
}

/// `dim Ext^1(V, U) = dim Z(V, U) - dim B(V, U)`.
pub fn ext1_dim<F: Scalar>(v: &Representation<F>, u: &Representation<F>, bq: &BoundQuiver<F>) -> Result<usize> {
    let z = cocycle_dim(v, u, bq)?;
    let b = coboundary_dim(v, u)?;
    Ok(z.checked_sub(b).expect("coboundaries are cocycles"))
}

/// `dim Ext^2(M, N)` as the Euler residual `<dim M, dim N> - hom + ext1`.
///
/// Returns `Ok(None)` unless `assert_gldim2` is set. The global dimension
/// bound is trusted, not verified; a negative residual disproves it.
pub fn ext2_dim_via_euler<F: Scalar>(
    m: &Representation<F>,
    n: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<Option<usize>> {
    check_pair(m, n, bq)?;
    if !assert_gldim2 {
        return Ok(None);
    }
    if !bq.is_triangular() {
        return Err(Error::NotTriangular);
    }
    let euler = euler_form(m.dim(), n.dim(), bq)?;
    let hom = hom_dim(m, n)? as i64;
    let ext1 = ext1_dim(m, n, bq)? as i64;
    let value = euler - hom + ext1;
    if value < 0 {
        return Err(Error::NegativeExt2 { value });
    }
    Ok(Some(value as usize))
}

/// Invariants of an ordered pair `(V, U)`; `hom`, `ext1` and `ext2` refer to
/// `Hom(V, U)`, `Ext^1(V, U)` and `Ext^2(V, U)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtReport {
    pub hom: usize,
    pub z_dim: usize,
    pub b_dim: usize,
    pub ext1: usize,
    pub ext2: Option<usize>,
    pub euler: i64,
    /// `sum_x d'_x d''_x`
    pub vertex_pairing: usize,
}

pub fn ext_report<F: Scalar>(
    v: &Representation<F>,
    u: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<ExtReport> {
    check_pair(v, u, bq)?;
    let hom = hom_dim(v, u)?;
    let z_dim = cocycle_dim(v, u, bq)?;
    let b_dim = coboundary_dim(v, u)?;
    let ext1 = z_dim - b_dim;
    let euler = euler_form(v.dim(), u.dim(), bq)?;
    let ext2 = ext2_dim_via_euler(v, u, bq, assert_gldim2)?;
    let vertex_pairing = v
        .dim()
        .entries()
        .iter()
        .zip(u.dim().entries())
        .map(|(a, b)| a * b)
        .sum();
    Ok(ExtReport {
        hom,
        z_dim,
        b_dim,
        ext1,
        ext2,
        euler,
        vertex_pairing,
    })
}

/// `dim End(M)`.
pub fn end_dim<F: Scalar>(m: &Representation<F>) -> usize {
    hom_dim(m, m).expect("a representation shares its own quiver")
}

/// `dim O(M) = sum_x d_x^2 - dim End(M)`.
pub fn orbit_dim<F: Scalar>(m: &Representation<F>) -> usize {
    m.gl_dim() - end_dim(m)
}

#[derive(Clone, Debug, PartialEq)]
pub enum IsoVerdict<F> {
    /// Carries an explicit isomorphism `(f_x : M_x -> N_x)`.
    Isomorphic(Vec<Matrix<F>>),
    NotIsomorphic,
    Inconclusive,
}

impl<F> IsoVerdict<F> {
    pub fn label(&self) -> &'static str {
        match self {
            IsoVerdict::Isomorphic(_) => "Isomorphic",
            IsoVerdict::NotIsomorphic => "NotIsomorphic",
            IsoVerdict::Inconclusive => "Inconclusive",
        }
    }
}

/// Randomized isomorphism test.
///
/// Cheap invariants (dimension vectors, `dim End`, `dim Hom(M, N)`) decide
/// non-isomorphism. Otherwise random integer combinations of a basis of
/// `Hom(M, N)` are tried; an invertible one is an exact certificate. When
/// all draws are singular the answer is `Inconclusive`.
pub fn iso_probable<F: Scalar>(
    m: &Representation<F>,
    n: &Representation<F>,
    trials: usize,
    seed: u64,
) -> Result<IsoVerdict<F>> {
    iso_probable_with(m, n, trials, &mut seeded_rng(seed))
}

pub fn iso_probable_with<F: Scalar, R: Rng>(
    m: &Representation<F>,
    n: &Representation<F>,
    trials: usize,
    rng: &mut R,
) -> Result<IsoVerdict<F>> {
    same_quiver(m.quiver(), n.quiver())?;
    if m.dim() != n.dim() {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    let end = end_dim(m);
    if end != end_dim(n) {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    let basis = hom_basis(m, n)?;
    if basis.dim() != end {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    if m.dim().is_zero() {
        return Ok(IsoVerdict::Isomorphic(
            (0..m.quiver().vertex_count()).map(|_| Matrix::zeros(0, 0)).collect(),
        ));
    }
    for _ in 0..trials {
        let coeffs: Vec<F> = (0..basis.dim())
            .map(|_| F::from_int(rng.gen_range(-DEFAULT_ISO_BOUND..=DEFAULT_ISO_BOUND)))
            .collect();
        let Some(f) = basis.combine(&coeffs) else {
            break;
        };
        if f.iter().all(Matrix::is_invertible) {
            return Ok(IsoVerdict::Isomorphic(f));
        }
    }
    Ok(IsoVerdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use num_traits::Zero;
    use crate::quiver::{DimVector, Quiver, Relation};
    use num_rational::BigRational;

    type Q = BigRational;

    fn a2() -> (BoundQuiver<Q>, Representation<Q>, Representation<Q>, Representation<Q>) {
        let quiver = Arc::new(Quiver::new(["1", "2"], [("a", "1", "2")]).unwrap());
        let s1 = Representation::simple(quiver.clone(), 0);
        let s2 = Representation::simple(quiver.clone(), 1);
        let p = Representation::zero(quiver.clone(), DimVector::new(vec![1, 1]))
            .unwrap()
            .with_matrix("a", Matrix::identity(1))
            .unwrap();
        (BoundQuiver::free(quiver), s1, s2, p)
    }

    fn a3_bound() -> (BoundQuiver<Q>, Representation<Q>) {
        let quiver = Arc::new(
            Quiver::new(["1", "2", "3"], [("alpha", "2", "1"), ("beta", "3", "2")]).unwrap(),
        );
        let rel = Relation::from_named(&quiver, &[(1, &["alpha", "beta"])]).unwrap();
        let m = Representation::zero(quiver.clone(), DimVector::new(vec![1, 1, 1]))
            .unwrap()
            .with_matrix("alpha", Matrix::identity(1))
            .unwrap();
        (BoundQuiver::new(quiver, vec![rel]).unwrap(), m)
    }

    #[test]
    fn hom_on_a2() {
        let (_, s1, s2, p) = a2();
        // P = (k -> k): its top is S1 at the source vertex 1
        assert_eq!(hom_dim(&p, &s1).unwrap(), 1);
        assert_eq!(hom_dim(&p, &s2).unwrap(), 0);
        assert_eq!(hom_dim(&s2, &p).unwrap(), 1);
        assert_eq!(end_dim(&p), 1);
        assert_eq!(orbit_dim(&p), 1);
        let basis = hom_basis(&p, &s1).unwrap();
        assert_eq!(basis.dim(), 1);
        assert_eq!(basis.maps[0][1].shape(), (0, 1));
    }

    #[test]
    fn cocycles_on_a2() {
        let (bq, s1, s2, _) = a2();
        assert_eq!(cocycle_dim(&s1, &s2, &bq).unwrap(), 1);
        assert_eq!(coboundary_dim(&s1, &s2).unwrap(), 0);
        assert_eq!(ext1_dim(&s1, &s2, &bq).unwrap(), 1);
        assert_eq!(ext1_dim(&s2, &s1, &bq).unwrap(), 0);
        assert_eq!(cocycle_ambient_dim(&s1, &s2), 0);
    }

    #[test]
    fn simple_without_arrows_has_no_coboundaries() {
        let quiver = Arc::new(Quiver::new(["x"], Vec::<(&str, &str, &str)>::new()).unwrap());
        let s = Representation::<Q>::simple(quiver, 0);
        assert_eq!(coboundary_dim(&s, &s).unwrap(), 0);
        assert_eq!(end_dim(&s), 1);
        assert_eq!(orbit_dim(&s), 0);
        let ss = s.direct_sum(&s).unwrap();
        assert_eq!(end_dim(&ss), 4);
        assert_eq!(orbit_dim(&ss), 0);
    }

    #[test]
    fn cocycles_on_a3_with_relation() {
        let (bq, m) = a3_bound();
        assert_eq!(cocycle_dim(&m, &m, &bq).unwrap(), 1);
        let z = cocycle_space(&m, &m, &bq).unwrap();
        // Z_beta is forced to vanish, Z_alpha is free
        assert!(z.vectors[0][1].is_zero());
        assert_eq!(end_dim(&m), 2);
        assert_eq!(ext1_dim(&m, &m, &bq).unwrap(), 0);
        assert_eq!(ext2_dim_via_euler(&m, &m, &bq, true).unwrap(), Some(0));
    }

    #[test]
    fn ext2_from_relation() {
        let (bq, _) = a3_bound();
        let s3 = Representation::simple(bq.quiver().clone(), 2);
        let s1 = Representation::simple(bq.quiver().clone(), 0);
        assert_eq!(hom_dim(&s3, &s1).unwrap(), 0);
        assert_eq!(ext1_dim(&s3, &s1, &bq).unwrap(), 0);
        assert_eq!(ext2_dim_via_euler(&s3, &s1, &bq, true).unwrap(), Some(1));
        assert_eq!(ext2_dim_via_euler(&s3, &s1, &bq, false).unwrap(), None);
    }

    #[test]
    fn non_triangular_quiver_is_rejected() {
        let lq = Arc::new(Quiver::new(["x"], [("l", "x", "x")]).unwrap());
        let lbq = BoundQuiver::<Q>::free(lq.clone());
        let s = Representation::simple(lq, 0);
        assert_eq!(ext2_dim_via_euler(&s, &s, &lbq, true), Err(Error::NotTriangular));
    }

    #[test]
    fn residual_counts_relations_between_simples() {
        // Two parallel arrows identified by a - b.
        let quiver = Arc::new(Quiver::new(["1", "2"], [("a", "1", "2"), ("b", "1", "2")]).unwrap());
        let rel = Relation::from_named(&quiver, &[(1, &["a"]), (-1, &["b"])]).unwrap();
        let bq = BoundQuiver::new(quiver.clone(), vec![rel]).unwrap();
        let s1 = Representation::<Q>::simple(quiver.clone(), 0);
        let s2 = Representation::<Q>::simple(quiver, 1);
        // <e1, e2> = 0 - 2 + 1 = -1, hom = 0, ext1 = 1
        assert_eq!(ext1_dim(&s1, &s2, &bq).unwrap(), 1);
        assert_eq!(ext2_dim_via_euler(&s1, &s2, &bq, true).unwrap(), Some(0));
        assert_eq!(ext2_dim_via_euler(&s2, &s1, &bq, true).unwrap(), Some(0));
        // A redundant third relation shows up in the residual.
        let rels = vec![
            Relation::from_named(bq.quiver(), &[(1, &["a"])]).unwrap(),
            Relation::from_named(bq.quiver(), &[(1, &["b"])]).unwrap(),
            Relation::from_named(bq.quiver(), &[(1, &["a"]), (1, &["b"])]).unwrap(),
        ];
        let bq2 = BoundQuiver::new(bq.quiver().clone(), rels).unwrap();
        assert_eq!(ext2_dim_via_euler(&s1, &s2, &bq2, true).unwrap(), Some(1));
    }

    #[test]
    fn iso_examples() {
        let (_, s1, s2, p) = a2();
        let sum = s1.direct_sum(&s2).unwrap();
        assert_eq!(iso_probable(&sum, &p, 8, 1).unwrap(), IsoVerdict::NotIsomorphic);
        assert!(matches!(iso_probable(&p, &p, 8, 1).unwrap(), IsoVerdict::Isomorphic(_)));
        let mut rng = seeded_rng(3);
        let (gp, _) = sum.random_conjugate(&mut rng, 10);
        let verdict = iso_probable(&sum, &gp, 8, 2).unwrap();
        let IsoVerdict::Isomorphic(f) = verdict else {
            panic!("expected isomorphism");
        };
        // f is an intertwiner sum -> gp
        for (a, arrow) in sum.quiver().arrows().iter().enumerate() {
            assert_eq!(gp.matrix(a).mul(&f[arrow.source]), f[arrow.target].mul(sum.matrix(a)));
        }
    }

    #[test]
    fn ext_report_fields_consistent() {
        let (bq, m) = a3_bound();
        let s1 = Representation::simple(bq.quiver().clone(), 0);
        let r = ext_report(&m, &s1, &bq, true).unwrap();
        assert_eq!(r.b_dim + r.hom, r.vertex_pairing);
        assert_eq!(r.ext1, r.z_dim - r.b_dim);
        assert_eq!(r.euler, r.hom as i64 - r.ext1 as i64 + r.ext2.unwrap() as i64);
    }
}
