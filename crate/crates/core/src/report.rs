//! Plain-text invariant reports. Every value carries a note on how it was
//! obtained.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{a_dim, classify_dimvector, gl_dim_group, tits_form, DimClass};
use crate::homological::{end_dim, ext_report, orbit_dim};
use crate::quiver::{support, BoundQuiver};
use crate::rep::Representation;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportField {
    pub key: String,
    pub value: String,
    pub provenance: &'static str,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub fields: Vec<ReportField>,
}

impl InvariantReport {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString, provenance: &'static str) {
        self.fields.push(ReportField {
            key: key.into(),
            value: value.to_string(),
            provenance,
        });
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|f| f.key == key).map(|f| f.value.as_str())
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.fields.iter().map(|x| x.key.len()).max().unwrap_or(0);
        for field in &self.fields {
            writeln!(f, "{:<width$} = {}  [{}]", field.key, field.value, field.provenance)?;
        }
        Ok(())
    }
}

fn class_label(c: Option<DimClass>) -> String {
    match c {
        Some(c) => format!("{c:?}"),
        None => "n/a".into(),
    }
}

fn single<F: Scalar>(
    r: &mut InvariantReport,
    tag: &str,
    m: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<()> {
    let q = bq.quiver();
    let d = m.dim();
    let sup = support(d, q)?;
    r.push(format!("{tag}.dim"), d.display(q), "input");
    r.push(format!("{tag}.variety_point"), m.is_variety_point(bq), "relation evaluation");
    r.push(format!("{tag}.sincere"), sup.is_sincere, "support of dimension vector");
    r.push(format!("{tag}.connected_support"), sup.is_connected, "support of dimension vector");
    r.push(format!("{tag}.end"), end_dim(m), "kernel of intertwiner system");
    r.push(format!("{tag}.orbit_dim"), orbit_dim(m), "dim GL(d) - dim End");
    r.push(format!("{tag}.gl_dim"), gl_dim_group(d), "sum of squares");
    r.push(format!("{tag}.q"), tits_form(d, bq)?, "Euler form of arrows and relations");
    r.push(format!("{tag}.a"), a_dim(d, bq)?, "arrow products minus relation products");
    let class = match classify_dimvector(d, bq, assert_gldim2) {
        Ok(c) => class_label(c),
        Err(Error::NotTriangular) => "n/a (cyclic quiver)".into(),
        Err(e) => return Err(e),
    };
    r.push(format!("{tag}.class"), class, "value of q, needs gldim <= 2");
    Ok(())
}

fn pair<F: Scalar>(
    r: &mut InvariantReport,
    tag: &str,
    v: &Representation<F>,
    u: &Representation<F>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<()> {
    let e = match ext_report(v, u, bq, assert_gldim2) {
        Err(Error::NotTriangular) => ext_report(v, u, bq, false)?,
        other => other?,
    };
    r.push(format!("hom({tag})"), e.hom, "kernel of intertwiner system");
    r.push(format!("Z({tag})"), e.z_dim, "kernel of linearised relations");
    r.push(format!("B({tag})"), e.b_dim, "rank of coboundary map");
    r.push(format!("ext1({tag})"), e.ext1, "dim Z - dim B");
    r.push(format!("euler({tag})"), e.euler, "bilinear form on dimension vectors");
    let ext2 = match e.ext2 {
        Some(x) => x.to_string(),
        None if assert_gldim2 => "n/a (cyclic quiver)".into(),
        None => "n/a (needs --assume-gldim2)".into(),
    };
    r.push(format!("ext2({tag})"), ext2, "euler - hom + ext1, trusting gldim <= 2");
    Ok(())
}

/// Invariants of `M`, and of the pairs `(M, N)` and `(N, M)` when `N` is given.
pub fn invariant_report<F: Scalar>(
    m: &Representation<F>,
    n: Option<&Representation<F>>,
    bq: &BoundQuiver<F>,
    assert_gldim2: bool,
) -> Result<InvariantReport> {
    let mut r = InvariantReport::default();
    r.push("quiver.triangular", bq.is_triangular(), "topological sort");
    r.push("quiver.admissible", bq.is_admissible(), "relation path lengths");
    r.push("assume_gldim2", assert_gldim2, "caller assertion");
    single(&mut r, "M", m, bq, assert_gldim2)?;
    pair(&mut r, "M,M", m, m, bq, assert_gldim2)?;
    if let Some(n) = n {
        single(&mut r, "N", n, bq, assert_gldim2)?;
        pair(&mut r, "M,N", m, n, bq, assert_gldim2)?;
        pair(&mut r, "N,M", n, m, bq, assert_gldim2)?;
    }
    Ok(r)
}
