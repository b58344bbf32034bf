//! Integral forms and local invariants of module varieties.
//!
//! Tangent spaces of the varieties themselves are never computed. Every
//! geometric statement goes through the cocycle space `Z(M, M)`, which
//! contains the tangent space at `M`, and through dimension counts built from
//! the Euler form.

use crate::error::{Error, Result};
use crate::homological::{
    coboundary_space, cocycle_dim, cocycle_space, ext1_dim, ext2_dim_via_euler, hom_basis,
    hom_dim,
};
use crate::linalg::{matrix_of_linear_map, Matrix, SubspaceBasis};
use crate::quiver::{support, BoundQuiver, DimVector};
use crate::rep::{block_extension, cocycle_ambient_dim, same_quiver, CocycleElement, Representation};
use crate::scalar::Scalar;

fn check_len<F: Scalar>(d: &DimVector, bq: &BoundQuiver<F>) -> Result<()> {
    let n = bq.quiver().vertex_count();
    if d.len() != n {
        return Err(Error::WrongDimension(format!(
            "vector has {} entries, quiver has {n} vertices",
            d.len()
        )));
    }
    Ok(())
}

/// `<d1, d2> = sum_x d1_x d2_x - sum_a d1_{s(a)} d2_{t(a)} + sum_rho d1_{s(rho)} d2_{t(rho)}`.
pub fn euler_form<F: Scalar>(d1: &DimVector, d2: &DimVector, bq: &BoundQuiver<F>) -> Result<i64> {
    check_len(d1, bq)?;
    check_len(d2, bq)?;
    let x = |d: &DimVector, v: usize| d.get(v) as i64;
    let vertices: i64 = (0..d1.len()).map(|v| x(d1, v) * x(d2, v)).sum();
    let arrows: i64 = bq
        .quiver()
        .arrows()
        .iter()
        .map(|a| x(d1, a.source) * x(d2, a.target))
        .sum();
    let relations: i64 = bq
        .relations()
        .iter()
        .map(|r| x(d1, r.source()) * x(d2, r.target()))
        .sum();
    Ok(vertices - arrows + relations)
}

/// `q(d) = <d, d>`.
pub fn tits_form<F: Scalar>(d: &DimVector, bq: &BoundQuiver<F>) -> Result<i64> {
    euler_form(d, d, bq)
}

/// `dim GL(d) = sum_x d_x^2`.
pub fn gl_dim_group(d: &DimVector) -> i64 {
    d.entries().iter().map(|&x| (x * x) as i64).sum()
}

/// `a(d) = sum_a d_{s(a)} d_{t(a)} - sum_rho d_{s(rho)} d_{t(rho)}`.
pub fn a_dim<F: Scalar>(d: &DimVector, bq: &BoundQuiver<F>) -> Result<i64> {
    check_len(d, bq)?;
    let x = |v: usize| d.get(v) as i64;
    let arrows: i64 = bq.quiver().arrows().iter().map(|a| x(a.source) * x(a.target)).sum();
    let relations: i64 = bq.relations().iter().map(|r| x(r.source()) * x(r.target())).sum();
    let a = arrows - relations;
    debug_assert_eq!(a, gl_dim_group(d) - tits_form(d, bq)?);
    Ok(a)
}

/// Form values attached to a single dimension vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormValue {
    pub tits: i64,
    pub a_dim: i64,
    pub gl_dim_group: i64,
}

pub fn form_values<F: Scalar>(d: &DimVector, bq: &BoundQuiver<F>) -> Result<FormValue> {
    let v = FormValue {
        tits: tits_form(d, bq)?,
        a_dim: a_dim(d, bq)?,
        gl_dim_group: gl_dim_group(d),
    };
    assert_eq!(v.a_dim, v.gl_dim_group - v.tits, "a(d) = dim GL(d) - q(d) failed");
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimClass {
    NoIndecomposable,
    UniqueIndecomposable,
    OneParameterFamilies,
}

/// Indecomposables of dimension vector `d` over a tame quasi-tilted algebra:
/// they exist iff `d` is connected with `q(d)` in `{0, 1}`; unique for
/// `q(d) = 1`, in one-parameter families for `q(d) = 0`.
///
/// The tame quasi-tilted hypothesis is the caller's responsibility; without
/// it (`assert_tame_quasi_tilted == false`) no answer is given.
pub fn classify_dimvector<F: Scalar>(
    d: &DimVector,
    bq: &BoundQuiver<F>,
    assert_tame_quasi_tilted: bool,
) -> Result<Option<DimClass>> {
    let connected = support(d, bq.quiver())?.is_connected;
    if !assert_tame_quasi_tilted {
        return Ok(None);
    }
    let q = tits_form(d, bq)?;
    Ok(Some(match (connected, q) {
        (true, 1) => DimClass::UniqueIndecomposable,
        (true, 0) => DimClass::OneParameterFamilies,
        _ => DimClass::NoIndecomposable,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedRegular,
    BoundOnly,
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::CertifiedRegular => "CertifiedRegular",
            Verdict::BoundOnly => "BoundOnly",
            Verdict::NotApplicable => "NotApplicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityCertificate<F> {
    pub subject: Representation<F>,
    pub z_self_dim: usize,
    pub a_dim: i64,
    pub ext2_self: Option<usize>,
    pub verdict: Verdict,
    pub narrative: String,
}

/// Certifies that `M` is a regular point of its module variety.
///
/// With a triangular quiver, global dimension at most two (asserted by the
/// caller) and `Ext^2(M, M) = 0`, the space `Z(M, M)` has dimension `a(d)`
/// and `M` is regular. The certificate is issued only when that equality is
/// also confirmed numerically. `NotApplicable` means the hypotheses cannot
/// be evaluated (cyclic quiver or no global dimension assertion).
pub fn regularity_certificate<F: Scalar>(
    m: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<RegularityCertificate<F>> {
    same_quiver(m.quiver(), bq.quiver())?;
    if let Some(relation) = m.first_failing_relation(bq) {
        return Err(Error::NotAVarietyPoint { relation });
    }
    let z_self_dim = cocycle_dim(m, m, bq)?;
    let a = a_dim(m.dim(), bq)?;
    let triangular = bq.is_triangular();
    let ext2_self = if triangular {
        ext2_dim_via_euler(m, m, bq, assert_gldim2)?
    } else {
        None
    };
    let (verdict, narrative) = match (triangular, ext2_self) {
        (false, _) => (
            Verdict::NotApplicable,
            format!("quiver has an oriented cycle; dim Z(M,M) = {z_self_dim}, a(d) = {a}"),
        ),
        (true, None) => (
            Verdict::NotApplicable,
            format!("gldim <= 2 not asserted; dim Z(M,M) = {z_self_dim}, a(d) = {a}"),
        ),
        (true, Some(0)) if z_self_dim as i64 == a => (
            Verdict::CertifiedRegular,
            format!(
                "triangular, gldim <= 2 asserted, Ext^2(M,M) = 0 and dim Z(M,M) = a(d) = {a}: M is a regular point"
            ),
        ),
        (true, Some(0)) => (
            Verdict::BoundOnly,
            format!("Ext^2(M,M) = 0 but dim Z(M,M) = {z_self_dim} differs from a(d) = {a}; gldim assertion suspect"),
        ),
        (true, Some(e)) => (
            Verdict::BoundOnly,
            format!("Ext^2(M,M) = {e} != 0; dim Z(M,M) = {z_self_dim}, a(d) = {a}"),
        ),
    };
    Ok(RegularityCertificate {
        subject: m.clone(),
        z_self_dim,
        a_dim: a,
        ext2_self,
        verdict,
        narrative,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumReport<F> {
    /// `dim Hom(probe, N)`, the index `d` of the stratum containing `N`.
    pub hom_to_probe: usize,
    /// `dim Z(N, N)`.
    pub z_dim: usize,
    /// `dim Z_probe(N, N)`.
    pub constrained_dim: usize,
    /// Basis of `Z_probe(N, N)` in cocycle coordinates.
    pub basis: SubspaceBasis<F>,
}

/// `Z_P(N, N) = { Z in Z(N, N) : dim Hom(P, W^Z) = 2 dim Hom(P, N) }`.
///
/// From `0 -> N -> W^Z -> N -> 0` one gets
/// `dim Hom(P, W^Z) = h + dim ker(delta_Z)` with `h = dim Hom(P, N)` and
/// `delta_Z : Hom(P, N) -> Ext^1(P, N)` sending `f` to the class of the
/// pulled-back cocycle `(Z_a f_{s(a)})_a`. The defining condition is thus
/// `(Z_a f_{s(a)}) in B(P, N)` for every `f` in a basis of `Hom(P, N)`,
/// which is linear in `Z`.
///
/// The linear description is then checked against the defining rank
/// condition: every basis vector of the computed subspace (and a weighted
/// sum of them) must satisfy it, and every basis vector of `Z(N, N)` lying
/// outside the subspace must fail it. A disagreement is reported as
/// [`Error::NonlinearLocus`].
pub fn constrained_cocycles<F: Scalar>(
    probe: &Representation<F>,
    n: &Representation<F>,
    bq: &BoundQuiver<F>,
) -> Result<StratumReport<F>> {
    same_quiver(probe.quiver(), n.quiver())?;
    same_quiver(probe.quiver(), bq.quiver())?;
    if let Some(relation) = n.first_failing_relation(bq) {
        return Err(Error::NotAVarietyPoint { relation });
    }
    let homs = hom_basis(probe, n)?;
    let h = homs.dim();
    let z_basis = cocycle_space(n, n, bq)?;
    let z_dim = z_basis.dim();

    // Rows of `annihilator` cut out B(P, N) inside the ambient cocycle space.
    let b = coboundary_space(probe, n)?;
    let ambient = cocycle_ambient_dim(n, probe);
    let annihilator = Matrix::from_rows(b.as_columns().transpose().kernel_basis().vectors);
    let annihilator = if annihilator.rows() == 0 {
        Matrix::zeros(0, ambient)
    } else {
        annihilator
    };

    let z_elems: Vec<CocycleElement<F>> = z_basis
        .vectors
        .iter()
        .map(|c| CocycleElement::from_coords(n, n, c))
        .collect();
    let pullback = |z: &CocycleElement<F>, f: &[Matrix<F>]| -> Vec<F> {
        n.quiver()
            .arrows()
            .iter()
            .enumerate()
            .flat_map(|(a, arrow)| z.matrix(a).mul(&f[arrow.source]).into_vec())
            .collect()
    };
    let n_out = h * annihilator.rows();
    let condition = matrix_of_linear_map(z_dim, n_out, |coeffs| {
        let z = CocycleElement::from_coords(n, n, &z_basis.combine(coeffs));
        homs.maps
            .iter()
            .flat_map(|f| annihilator.apply(&pullback(&z, f)))
            .collect()
    });
    let kernel = condition.kernel_basis();
    let basis = SubspaceBasis {
        ambient: z_basis.ambient,
        vectors: kernel.vectors.iter().map(|c| z_basis.combine(c)).collect(),
    };

    let meets = |coords: &[F]| -> Result<bool> {
        let z = CocycleElement::from_coords(n, n, coords);
        let w = block_extension(&z, n, n);
        Ok(hom_dim(probe, &w)? == 2 * h)
    };
    let mut inside: Vec<Vec<F>> = basis.vectors.clone();
    if !basis.vectors.is_empty() {
        let weights: Vec<F> = (1..=basis.dim() as i64).map(F::from_int).collect();
        inside.push(basis.combine(&weights));
    }
    for v in &inside {
        if !meets(v)? {
            return Err(Error::NonlinearLocus { generic_dim: z_dim });
        }
    }
    for (zc, z) in z_basis.vectors.iter().zip(&z_elems) {
        if !basis.contains(zc) && meets(&z.coords())? {
            return Err(Error::NonlinearLocus { generic_dim: z_dim });
        }
    }

    Ok(StratumReport {
        hom_to_probe: h,
        z_dim,
        constrained_dim: basis.dim(),
        basis,
    })
}

/// Upper bound `a(d') + a(d'') - dim Ext^2(V, U)` for the tangent space of
/// the stratum of pairs `(U, V)` with `Hom(V, U) = 0` and fixed `dim Ext^1(V, U)`.
///
/// Only the bound is evaluated; `None` without the global dimension
/// assertion.
pub fn ext_stratum_tangent_bound<F: Scalar>(
    u: &Representation<F>,
    v: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<Option<i64>> {
    same_quiver(u.quiver(), v.quiver())?;
    let hom = hom_dim(v, u)?;
    if hom != 0 {
        return Err(Error::HomNotZero(hom));
    }
    let Some(ext2) = ext2_dim_via_euler(v, u, bq, assert_gldim2)? else {
        return Ok(None);
    };
    Ok(Some(a_dim(u.dim(), bq)? + a_dim(v.dim(), bq)? - ext2 as i64))
}

/// Dimension of `U1 + U2` (the locus of direct sums) from the dimensions of
/// the summand loci and the generic Hom dimensions between them:
/// `dim U1 + dim U2 + dim GL(d1 + d2) - dim GL(d1) - dim GL(d2) - min_hom_12 - min_hom_21`.
pub fn direct_sum_stratum_dim(
    dim_u1: i64,
    dim_u2: i64,
    d1: &DimVector,
    d2: &DimVector,
    min_hom_12: i64,
    min_hom_21: i64,
) -> i64 {
    dim_u1 + dim_u2 + gl_dim_group(&d1.add(d2)) - gl_dim_group(d1) - gl_dim_group(d2) - min_hom_12 - min_hom_21
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bisection {
    /// `Hom(T, M) = 0` only.
    InF,
    /// `Ext^1(T, M) = 0` only.
    InT,
    Both,
    Neither,
}

/// Position of `M` relative to the torsion-free class `F(T)` (`Hom(T, -) = 0`)
/// and the torsion class `T(T)` (`Ext^1(T, -) = 0`).
pub fn bisection_classify<F: Scalar>(
    t: &Representation<F>,
    m: &Representation<F>,
    bq: &BoundQuiver<F>,
) -> Result<Bisection> {
    let in_f = hom_dim(t, m)? == 0;
    let in_t = ext1_dim(t, m, bq)? == 0;
    Ok(match (in_f, in_t) {
        (true, true) => Bisection::Both,
        (true, false) => Bisection::InF,
        (false, true) => Bisection::InT,
        (false, false) => Bisection::Neither,
    })
}
