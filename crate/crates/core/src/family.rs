//! The five-parameter family of bound quivers with three arms from `b` to
//! `a` and two arms from `c` to `b`, its canonical one-parameter families of
//! representations, and the verification run over a grid of family members.
//!
//! Layout of the quiver for parameters `(p, q, r, s, t)`:
//!
//! ```text
//!   a <-alpha1- A1 <- ... <-alpha_p-  b  <-xi1-    X1 <- ... <-xi_s-    c
//!   a <-beta1-  B1 <- ... <-beta_q-   b  <-delta1- D1 <- ... <-delta_t- c
//!   a <-gamma1- G1 <- ... <-gamma_r-  b
//! ```
//!
//! with relations
//! `alpha1..alpha_p - beta1..beta_q + gamma1..gamma_r`, `alpha_p xi1`,
//! `beta_q xi1..xi_s - beta_q delta1..delta_t` and `gamma_r delta1`.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    a_dim, constrained_cocycles, direct_sum_stratum_dim, euler_form, ext_stratum_tangent_bound,
    gl_dim_group, tits_form,
};
use crate::homological::{coboundary_dim, cocycle_dim, hom_dim, iso_probable_with, IsoVerdict, DEFAULT_ISO_TRIALS};
use crate::linalg::{seeded_rng, Matrix};
use crate::quiver::{support, BoundQuiver, DimVector, Quiver, Relation};
use crate::rep::Representation;
use crate::scalar::Scalar;

/// Arm lengths; all at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub t: usize,
}

impl FamilyParams {
    pub fn new(p: usize, q: usize, r: usize, s: usize, t: usize) -> Result<Self> {
        if [p, q, r, s, t].contains(&0) {
            return Err(Error::InvalidParams("all arm lengths must be at least 1".into()));
        }
        Ok(FamilyParams { p, q, r, s, t })
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} q={} r={} s={} t={}", self.p, self.q, self.r, self.s, self.t)
    }
}

/// Scalar or arrow label of a member of one of the two families.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyLabel<F> {
    Scalar(F),
    Arrow(String),
}

impl<F: Scalar> FamilyLabel<F> {
    /// Parses a rational scalar, falling back to an arrow name.
    pub fn parse(s: &str) -> Self {
        match F::parse_exact(s) {
            Some(v) => FamilyLabel::Scalar(v),
            None => FamilyLabel::Arrow(s.to_string()),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, FamilyLabel::Scalar(_))
    }
}

impl<F: fmt::Display> fmt::Display for FamilyLabel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyLabel::Scalar(v) => write!(f, "{v}"),
            FamilyLabel::Arrow(a) => write!(f, "{a}"),
        }
    }
}

fn arm(prefix: &str, len: usize) -> Vec<String> {
    (1..=len).map(|i| format!("{prefix}{i}")).collect()
}

/// A generated family member with its named pieces.
#[derive(Clone, Debug)]
pub struct Family<F> {
    pub params: FamilyParams,
    pub bq: BoundQuiver<F>,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// Arrows of the convex hull of `{a, b}`: the alpha, beta, gamma arms.
    pub first_arrows: Vec<usize>,
    /// Arrows of the convex hull of `{b, c}`: the xi and delta arms.
    pub second_arrows: Vec<usize>,
}

impl<F: Scalar> Family<F> {
    pub fn new(params: FamilyParams) -> Result<Self> {
        let FamilyParams { p, q, r, s, t } = params;
        let mut vertices: Vec<String> = vec!["a".into()];
        for (prefix, len) in [("A", p), ("B", q), ("G", r)] {
            vertices.extend(arm(prefix, len - 1));
        }
        vertices.push("b".into());
        for (prefix, len) in [("X", s), ("D", t)] {
            vertices.extend(arm(prefix, len - 1));
        }
        vertices.push("c".into());

        // Arrow i of an arm runs from vertex i to vertex i-1, with vertex 0
        // the sink end and vertex len the source end.
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        let mut push_arm = |name: &str, vprefix: &str, len: usize, sink: &str, source: &str| {
            let node = |i: usize| -> String {
                if i == 0 {
                    sink.to_string()
                } else if i == len {
                    source.to_string()
                } else {
                    format!("{vprefix}{i}")
                }
            };
            for i in 1..=len {
                arrows.push((format!("{name}{i}"), node(i), node(i - 1)));
            }
        };
        push_arm("alpha", "A", p, "a", "b");
        push_arm("beta", "B", q, "a", "b");
        push_arm("gamma", "G", r, "a", "b");
        push_arm("xi", "X", s, "b", "c");
        push_arm("delta", "D", t, "b", "c");

        let quiver = Arc::new(Quiver::new(
            vertices.iter().map(String::as_str),
            arrows.iter().map(|(n, s, t)| (n.as_str(), s.as_str(), t.as_str())),
        )?);

        let names = |prefix: &str, len: usize| arm(prefix, len);
        let alpha = names("alpha", p);
        let beta = names("beta", q);
        let gamma = names("gamma", r);
        let xi = names("xi", s);
        let delta = names("delta", t);
        fn refs(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        let alpha_p = alpha[p - 1].as_str();
        let beta_q = beta[q - 1].as_str();
        let gamma_r = gamma[r - 1].as_str();

        let mut beta_xi = vec![beta_q];
        beta_xi.extend(refs(&xi));
        let mut beta_delta = vec![beta_q];
        beta_delta.extend(refs(&delta));

        let relations = vec![
            Relation::from_named(
                &quiver,
                &[(1, &refs(&alpha)), (-1, &refs(&beta)), (1, &refs(&gamma))],
            )?,
            Relation::from_named(&quiver, &[(1, &[alpha_p, "xi1"])])?,
            Relation::from_named(&quiver, &[(1, &beta_xi), (-1, &beta_delta)])?,
            Relation::from_named(&quiver, &[(1, &[gamma_r, "delta1"])])?,
        ];
        let a = quiver.vertex("a")?;
        let b = quiver.vertex("b")?;
        let c = quiver.vertex("c")?;
        let ids = |v: &[String]| v.iter().map(|n| quiver.arrow_id(n)).collect::<Result<Vec<_>>>();
        let first_arrows = [ids(&alpha)?, ids(&beta)?, ids(&gamma)?].concat();
        let second_arrows = [ids(&xi)?, ids(&delta)?].concat();
        Ok(Family {
            params,
            bq: BoundQuiver::new(quiver, relations)?,
            a,
            b,
            c,
            first_arrows,
            second_arrows,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        self.bq.quiver()
    }

    /// `(h', h'', h' + h'')`: indicators of the convex hulls of `{a, b}`
    /// and `{b, c}`, and their sum.
    pub fn canonical_dimvecs(&self) -> (DimVector, DimVector, DimVector) {
        let q = self.quiver();
        let n = q.vertex_count();
        let indicator = |vs: Vec<usize>| {
            let mut d = vec![0; n];
            for v in vs {
                d[v] = 1;
            }
            DimVector::new(d)
        };
        let h1 = indicator(q.minimal_convex_vertices(&[self.a, self.b]));
        let h2 = indicator(q.minimal_convex_vertices(&[self.b, self.c]));
        let d = h1.add(&h2);
        (h1, h2, d)
    }

    fn arrow_named(&self, name: &str, allowed: &[usize]) -> Result<usize> {
        let id = self
            .quiver()
            .arrow_id(name)
            .map_err(|_| Error::InvalidLabel(format!("unknown arrow `{name}`")))?;
        if !allowed.contains(&id) {
            return Err(Error::InvalidLabel(format!("arrow `{name}` is not on the required arms")));
        }
        Ok(id)
    }

    fn one_by_one(&self, h: &DimVector, values: &[(usize, F)]) -> Representation<F> {
        let mut m = Representation::zero(self.quiver().clone(), h.clone()).expect("family dimension vector");
        for (a, v) in values {
            let name = self.quiver().arrow(*a).name.clone();
            m = m.with_matrix(&name, Matrix::scalar(v.clone())).expect("1x1 on the support");
        }
        m
    }

    /// `H'(label)` of dimension vector `h'`.
    ///
    /// Scalar `l` (not 0 or 1): `alpha1 -> l`, `beta1 -> l + 1`, other
    /// first-hull arrows `-> 1`. Arrow `x` of the alpha or gamma arm: `x -> 0`,
    /// others `-> 1`. Arrow `x` of the beta arm: `x -> 0`, `alpha1 -> -1`,
    /// others `-> 1`, so that the three-arm relation still vanishes.
    pub fn build_h1(&self, label: &FamilyLabel<F>) -> Result<Representation<F>> {
        let (h1, _, _) = self.canonical_dimvecs();
        let q = self.quiver();
        let alpha1 = q.arrow_id("alpha1")?;
        let beta1 = q.arrow_id("beta1")?;
        let mut values: Vec<(usize, F)> = self.first_arrows.iter().map(|&a| (a, F::one())).collect();
        let set = |values: &mut Vec<(usize, F)>, arrow: usize, v: F| {
            if let Some(slot) = values.iter_mut().find(|(a, _)| *a == arrow) {
                slot.1 = v;
            }
        };
        match label {
            FamilyLabel::Scalar(l) => {
                if l.is_zero() || l.is_one() {
                    return Err(Error::InvalidLabel(format!("H' needs a scalar outside {{0, 1}}, got {l}")));
                }
                set(&mut values, alpha1, l.clone());
                set(&mut values, beta1, l.clone() + F::one());
            }
            FamilyLabel::Arrow(name) => {
                let x = self.arrow_named(name, &self.first_arrows)?;
                set(&mut values, x, F::zero());
                if q.arrow(x).name.starts_with("beta") {
                    set(&mut values, alpha1, -F::one());
                }
            }
        }
        Ok(self.one_by_one(&h1, &values))
    }

    /// `H''(label)` of dimension vector `h''`.
    ///
    /// Scalar `l` (nonzero): `xi1 -> l`, other second-hull arrows `-> 1`.
    /// Arrow `x` of the xi or delta arm: `x -> 0`, others `-> 1`.
    pub fn build_h2(&self, label: &FamilyLabel<F>) -> Result<Representation<F>> {
        let (_, h2, _) = self.canonical_dimvecs();
        let xi1 = self.quiver().arrow_id("xi1")?;
        let mut values: Vec<(usize, F)> = self.second_arrows.iter().map(|&a| (a, F::one())).collect();
        let target = match label {
            FamilyLabel::Scalar(l) => {
                if l.is_zero() {
                    return Err(Error::InvalidLabel("H'' needs a nonzero scalar".into()));
                }
                (xi1, l.clone())
            }
            FamilyLabel::Arrow(name) => (self.arrow_named(name, &self.second_arrows)?, F::zero()),
        };
        if let Some(slot) = values.iter_mut().find(|(a, _)| *a == target.0) {
            slot.1 = target.1;
        }
        Ok(self.one_by_one(&h2, &values))
    }

    /// The simple representation at `b`.
    pub fn simple_at_b(&self) -> Representation<F> {
        Representation::simple(self.quiver().clone(), self.b)
    }

    /// Membership of a point of dimension `h' + h''` in the locus of
    /// direct sums `mod(h') + mod(h'')`: the arrows leaving `b` jointly have
    /// rank at most one, the arrows entering `b` jointly have rank at most
    /// one, and every composite through `b` vanishes.
    pub fn decomposable_locus_member(&self, m: &Representation<F>) -> Result<bool> {
        let (_, _, d) = self.canonical_dimvecs();
        if *m.dim() != d {
            return Err(Error::WrongDimension(format!(
                "expected {}, got {}",
                d.display(self.quiver()),
                m.dim().display(self.quiver())
            )));
        }
        let q = self.quiver();
        let outgoing: Vec<usize> = (0..q.arrow_count()).filter(|&a| q.arrow(a).source == self.b).collect();
        let incoming: Vec<usize> = (0..q.arrow_count()).filter(|&a| q.arrow(a).target == self.b).collect();
        let out_stack: Vec<&Matrix<F>> = outgoing.iter().map(|&a| m.matrix(a)).collect();
        let in_stack: Vec<&Matrix<F>> = incoming.iter().map(|&a| m.matrix(a)).collect();
        if Matrix::vstack(&out_stack).rank() > 1 || Matrix::hstack(&in_stack).rank() > 1 {
            return Ok(false);
        }
        Ok(outgoing.iter().all(|&o| {
            incoming
                .iter()
                .all(|&i| m.matrix(o).mul(m.matrix(i)).is_zero())
        }))
    }

    /// All labels of `H'` (scalars then first-hull arrows) for the given
    /// scalar samples.
    pub fn h1_labels(&self, scalars: &[F]) -> Vec<FamilyLabel<F>> {
        self.labels(scalars, &self.first_arrows)
    }

    /// All labels of `H''` for the given scalar samples.
    pub fn h2_labels(&self, scalars: &[F]) -> Vec<FamilyLabel<F>> {
        self.labels(scalars, &self.second_arrows)
    }

    fn labels(&self, scalars: &[F], arrows: &[usize]) -> Vec<FamilyLabel<F>> {
        scalars
            .iter()
            .cloned()
            .map(FamilyLabel::Scalar)
            .chain(arrows.iter().map(|&a| FamilyLabel::Arrow(self.quiver().arrow(a).name.clone())))
            .collect()
    }
}

/// The family's bound quiver.
pub fn build_family<F: Scalar>(params: FamilyParams) -> Result<BoundQuiver<F>> {
    Ok(Family::new(params)?.bq)
}

pub fn default_u_samples<F: Scalar>() -> Vec<F> {
    [2, 3, 7].into_iter().map(F::from_int).collect()
}

pub fn default_v_samples<F: Scalar>() -> Vec<F> {
    [2, 3, 5].into_iter().map(F::from_int).collect()
}

/// One cell of the verification grid: `M = H'(u) + H''(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRow {
    pub u: String,
    pub v: String,
    pub scalar_pair: bool,
    /// `dim Hom(S, M)` for the simple `S` at `b`.
    pub hom_s_m: usize,
    /// `dim Z(H'(u), H'(u))`
    pub z_h1: usize,
    /// `dim Z(H''(v), H''(v))`
    pub z_h2: usize,
    /// `dim Z(H'(u), H''(v))`: extensions with sub `H''(v)` and quotient `H'(u)`.
    pub z_h1_h2: usize,
    /// `dim B(H''(v), H'(u))`
    pub b_h2_h1: usize,
    /// `dim Z(M, M)`
    pub z_m: usize,
    /// `dim Z_S(M, M)`, computed on `M` directly.
    pub z_s: usize,
    pub a_d: i64,
    pub locus: bool,
    pub iso: &'static str,
    pub failures: Vec<String>,
}

impl FamilyRow {
    pub fn total(&self) -> usize {
        self.z_h1 + self.z_h2 + self.z_h1_h2 + self.b_h2_h1
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Integer invariants of the family that do not depend on the grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyForms {
    pub q_h1: i64,
    pub q_h2: i64,
    pub euler_h1_h2: i64,
    pub euler_h2_h1: i64,
    pub q_d: i64,
    pub a_h1: i64,
    pub a_h2: i64,
    pub a_d: i64,
    pub gl_d: i64,
    pub gl_h1: i64,
    pub gl_h2: i64,
    pub d_sincere: bool,
    pub h1_connected: bool,
    pub h2_connected: bool,
}

pub fn family_forms<F: Scalar>(family: &Family<F>) -> Result<FamilyForms> {
    let bq = &family.bq;
    let (h1, h2, d) = family.canonical_dimvecs();
    Ok(FamilyForms {
        q_h1: tits_form(&h1, bq)?,
        q_h2: tits_form(&h2, bq)?,
        euler_h1_h2: euler_form(&h1, &h2, bq)?,
        euler_h2_h1: euler_form(&h2, &h1, bq)?,
        q_d: tits_form(&d, bq)?,
        a_h1: a_dim(&h1, bq)?,
        a_h2: a_dim(&h2, bq)?,
        a_d: a_dim(&d, bq)?,
        gl_d: gl_dim_group(&d),
        gl_h1: gl_dim_group(&h1),
        gl_h2: gl_dim_group(&h2),
        d_sincere: support(&d, bq.quiver())?.is_sincere,
        h1_connected: support(&h1, bq.quiver())?.is_connected,
        h2_connected: support(&h2, bq.quiver())?.is_connected,
    })
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub params: FamilyParams,
    pub seed: u64,
    pub admissible: bool,
    pub vertices: usize,
    pub arrows: usize,
    pub relations: usize,
    pub forms: FamilyForms,
    pub u_scalars: Vec<String>,
    pub v_scalars: Vec<String>,
    pub rows: Vec<FamilyRow>,
    /// Minimum of `dim Hom(H'(u), H''(v))` over the grid.
    pub min_hom_h1_h2: usize,
    /// Minimum of `dim Hom(H''(v), H'(u))` over the grid.
    pub min_hom_h2_h1: usize,
    /// Direct-sum locus dimension from `a(h')`, `a(h'')` and the grid minima.
    pub direct_sum_dim: i64,
    /// Tangent bound for the stratum through `(H'(u0), H''(v0))`, first scalars.
    pub tangent_bound: Option<i64>,
}

impl FamilyReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(FamilyRow::passed)
    }

    /// The first failing row as an error.
    pub fn check(&self) -> Result<()> {
        for row in &self.rows {
            if row.z_s != row.total() {
                return Err(Error::DecompositionMismatch {
                    u: row.u.clone(),
                    v: row.v.clone(),
                    direct: row.z_s,
                    total: row.total(),
                });
            }
            if row.z_s as i64 > row.a_d {
                return Err(Error::InequalityViolated {
                    u: row.u.clone(),
                    v: row.v.clone(),
                    direct: row.z_s,
                    bound: row.a_d,
                });
            }
            if let Some(reason) = row.failures.first() {
                return Err(Error::CheckFailed {
                    u: row.u.clone(),
                    v: row.v.clone(),
                    reason: reason.clone(),
                });
            }
        }
        Ok(())
    }

    /// Deterministic plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let f = &self.forms;
        let _ = writeln!(out, "# family verification");
        let _ = writeln!(out, "params: {}", self.params);
        let _ = writeln!(
            out,
            "quiver: {} vertices, {} arrows, {} relations, admissible={}",
            self.vertices, self.arrows, self.relations, self.admissible
        );
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(
            out,
            "conventions: H'(beta_i) puts -1 on alpha1; H''(l) puts l on xi1"
        );
        if !self.admissible {
            let _ = writeln!(
                out,
                "note: an arm of length 1 gives a relation with a length-1 path; computed as a representation variety"
            );
        }
        let _ = writeln!(
            out,
            "forms: q(h')={} q(h'')={} <h',h''>={} <h'',h'>={} q(d)={}",
            f.q_h1, f.q_h2, f.euler_h1_h2, f.euler_h2_h1, f.q_d
        );
        let _ = writeln!(
            out,
            "dims: a(h')={} a(h'')={} a(d)={} dimGL(h')={} dimGL(h'')={} dimGL(d)={} sincere(d)={}",
            f.a_h1, f.a_h2, f.a_d, f.gl_h1, f.gl_h2, f.gl_d, f.d_sincere
        );
        let _ = writeln!(
            out,
            "scalar samples: u in {{{}}}, v in {{{}}}",
            self.u_scalars.join(", "),
            self.v_scalars.join(", ")
        );
        let _ = writeln!(
            out,
            "grid minima: hom(H',H'')={} hom(H'',H')={}; direct-sum locus dim={}",
            self.min_hom_h1_h2, self.min_hom_h2_h1, self.direct_sum_dim
        );
        match self.tangent_bound {
            Some(b) => {
                let _ = writeln!(out, "ext-stratum tangent bound at first scalar pair: {b}");
            }
            None => {
                let _ = writeln!(out, "ext-stratum tangent bound at first scalar pair: n/a");
            }
        }
        let _ = writeln!(
            out,
            "{:<9} {:<9} {:>8} {:>9} {:>10} {:>10} {:>10} {:>6} {:>7} {:>9} {:>5} {:>6} {:<12} verdict",
            "u", "v", "hom(S,M)", "Z(H',H')", "Z(H'',H'')", "Z(H',H'')", "B(H'',H')", "total", "Z(M,M)", "Z_S(M,M)", "a(d)", "locus", "iso"
        );
        for r in &self.rows {
            let verdict = if r.passed() {
                "ok".to_string()
            } else {
                format!("FAIL: {}", r.failures.join("; "))
            };
            let _ = writeln!(
                out,
                "{:<9} {:<9} {:>8} {:>9} {:>10} {:>10} {:>10} {:>6} {:>7} {:>9} {:>5} {:>6} {:<12} {}",
                r.u, r.v, r.hom_s_m, r.z_h1, r.z_h2, r.z_h1_h2, r.b_h2_h1, r.total(), r.z_m, r.z_s, r.a_d, r.locus, r.iso, verdict
            );
        }
        let failed = self.rows.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(out, "rows: {} checked, {} failed", self.rows.len(), failed);
        if failed == 0 {
            let _ = writeln!(out, "ALL CHECKS PASSED");
        } else {
            let _ = writeln!(out, "CHECKS FAILED");
        }
        out
    }

    /// Deterministic `key=value` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let f = &self.forms;
        let p = &self.params;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("params.p", p.p.to_string());
        kv("params.q", p.q.to_string());
        kv("params.r", p.r.to_string());
        kv("params.s", p.s.to_string());
        kv("params.t", p.t.to_string());
        kv("seed", self.seed.to_string());
        kv("quiver.vertices", self.vertices.to_string());
        kv("quiver.arrows", self.arrows.to_string());
        kv("quiver.relations", self.relations.to_string());
        kv("quiver.admissible", self.admissible.to_string());
        kv("forms.q_h1", f.q_h1.to_string());
        kv("forms.q_h2", f.q_h2.to_string());
        kv("forms.euler_h1_h2", f.euler_h1_h2.to_string());
        kv("forms.euler_h2_h1", f.euler_h2_h1.to_string());
        kv("forms.q_d", f.q_d.to_string());
        kv("forms.a_h1", f.a_h1.to_string());
        kv("forms.a_h2", f.a_h2.to_string());
        kv("forms.a_d", f.a_d.to_string());
        kv("forms.gl_d", f.gl_d.to_string());
        kv("forms.d_sincere", f.d_sincere.to_string());
        kv("grid.min_hom_h1_h2", self.min_hom_h1_h2.to_string());
        kv("grid.min_hom_h2_h1", self.min_hom_h2_h1.to_string());
        kv("grid.direct_sum_dim", self.direct_sum_dim.to_string());
        kv(
            "grid.tangent_bound",
            self.tangent_bound.map_or("n/a".to_string(), |b| b.to_string()),
        );
        kv("rows", self.rows.len().to_string());
        for (i, r) in self.rows.iter().enumerate() {
            let pre = format!("row.{i}");
            kv(&format!("{pre}.u"), r.u.clone());
            kv(&format!("{pre}.v"), r.v.clone());
            kv(&format!("{pre}.hom_s_m"), r.hom_s_m.to_string());
            kv(&format!("{pre}.z_h1"), r.z_h1.to_string());
            kv(&format!("{pre}.z_h2"), r.z_h2.to_string());
            kv(&format!("{pre}.z_h1_h2"), r.z_h1_h2.to_string());
            kv(&format!("{pre}.b_h2_h1"), r.b_h2_h1.to_string());
            kv(&format!("{pre}.total"), r.total().to_string());
            kv(&format!("{pre}.z_m"), r.z_m.to_string());
            kv(&format!("{pre}.z_s"), r.z_s.to_string());
            kv(&format!("{pre}.a_d"), r.a_d.to_string());
            kv(&format!("{pre}.locus"), r.locus.to_string());
            kv(&format!("{pre}.iso"), r.iso.to_string());
            kv(&format!("{pre}.passed"), r.passed().to_string());
        }
        kv("all_passed", self.all_passed().to_string());
        out
    }
}

/// Stream id of grid cell `(i, j)` for the per-cell generator.
fn cell_stream(i: usize, j: usize) -> u64 {
    ((i as u64) << 32) | j as u64
}

fn verify_cell<F: Scalar>(
    family: &Family<F>,
    u: &FamilyLabel<F>,
    v: &FamilyLabel<F>,
    a_d: i64,
    rng: &mut impl Rng,
) -> Result<(FamilyRow, usize, usize)> {
    let bq = &family.bq;
    let h1 = family.build_h1(u)?;
    let h2 = family.build_h2(v)?;
    let m = h1.direct_sum(&h2)?;
    let s = family.simple_at_b();

    let hom_s_m = hom_dim(&s, &m)?;
    let z_h1 = cocycle_dim(&h1, &h1, bq)?;
    let z_h2 = cocycle_dim(&h2, &h2, bq)?;
    let z_h1_h2 = cocycle_dim(&h1, &h2, bq)?;
    let b_h2_h1 = coboundary_dim(&h2, &h1)?;
    let z_m = cocycle_dim(&m, &m, bq)?;
    let z_s = constrained_cocycles(&s, &m, bq)?.constrained_dim;

    let mut failures = Vec::new();
    for (name, rep) in [("H'", &h1), ("H''", &h2)] {
        if let Some(rel) = rep.first_failing_relation(bq) {
            failures.push(format!("{name} violates relation {rel}"));
        }
    }
    if hom_s_m != 1 {
        failures.push(format!("dim Hom(S,M) = {hom_s_m}, expected 1"));
    }
    let total = z_h1 + z_h2 + z_h1_h2 + b_h2_h1;
    if z_s != total {
        failures.push(format!("decomposition mismatch: {z_s} != {total}"));
    }
    if z_s as i64 > a_d {
        failures.push(format!("dim Z_S(M,M) = {z_s} > a(d) = {a_d}"));
    }
    let locus = family.decomposable_locus_member(&m)?;
    let (gm, _) = m.random_conjugate(rng, 10);
    if !locus || !family.decomposable_locus_member(&gm)? {
        failures.push("not in the direct-sum locus".into());
    }
    let iso = iso_probable_with(&m, &gm, DEFAULT_ISO_TRIALS, rng)?;
    if !matches!(iso, IsoVerdict::Isomorphic(_)) {
        failures.push(format!("conjugate not recognised as isomorphic ({})", iso.label()));
    }

    let row = FamilyRow {
        u: u.to_string(),
        v: v.to_string(),
        scalar_pair: u.is_scalar() && v.is_scalar(),
        hom_s_m,
        z_h1,
        z_h2,
        z_h1_h2,
        b_h2_h1,
        z_m,
        z_s,
        a_d,
        locus,
        iso: iso.label(),
        failures,
    };
    Ok((row, hom_dim(&h1, &h2)?, hom_dim(&h2, &h1)?))
}

/// Runs the verification over every pair `(u, v)` of scalar samples and arm
/// arrows. Cells are evaluated in parallel; each cell draws from its own
/// ChaCha stream `(seed, i, j)`, so the report does not depend on scheduling.
pub fn verify_section4<F: Scalar>(
    params: FamilyParams,
    u_samples: &[F],
    v_samples: &[F],
    seed: u64,
) -> Result<FamilyReport> {
    let family = Family::<F>::new(params)?;
    let forms = family_forms(&family)?;
    let u_labels = family.h1_labels(u_samples);
    let v_labels = family.h2_labels(v_samples);
    // Reject excluded scalars up front.
    for u in &u_labels {
        family.build_h1(u)?;
    }
    for v in &v_labels {
        family.build_h2(v)?;
    }

    let cells: Vec<(usize, usize)> = (0..u_labels.len())
        .flat_map(|i| (0..v_labels.len()).map(move |j| (i, j)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut rng = seeded_rng(seed);
            rng.set_stream(cell_stream(i, j));
            verify_cell(&family, &u_labels[i], &v_labels[j], forms.a_d, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let min_hom_h1_h2 = results.iter().map(|r| r.1).min().unwrap_or(0);
    let min_hom_h2_h1 = results.iter().map(|r| r.2).min().unwrap_or(0);
    let (h1, h2, _) = family.canonical_dimvecs();
    let direct_sum_dim = direct_sum_stratum_dim(
        forms.a_h1,
        forms.a_h2,
        &h1,
        &h2,
        min_hom_h1_h2 as i64,
        min_hom_h2_h1 as i64,
    );
    let tangent_bound = match (u_samples.first(), v_samples.first()) {
        (Some(u), Some(v)) => {
            let hu = family.build_h1(&FamilyLabel::Scalar(u.clone()))?;
            let hv = family.build_h2(&FamilyLabel::Scalar(v.clone()))?;
            match ext_stratum_tangent_bound(&hu, &hv, &family.bq, true) {
                Ok(b) => b,
                Err(Error::HomNotZero(_)) => None,
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };

    Ok(FamilyReport {
        params,
        seed,
        admissible: family.bq.is_admissible(),
        vertices: family.quiver().vertex_count(),
        arrows: family.quiver().arrow_count(),
        relations: family.bq.relations().len(),
        forms,
        u_scalars: u_samples.iter().map(|x| x.to_string()).collect(),
        v_scalars: v_samples.iter().map(|x| x.to_string()).collect(),
        rows: results.into_iter().map(|r| r.0).collect(),
        min_hom_h1_h2,
        min_hom_h2_h1,
        direct_sum_dim,
        tangent_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn fam(p: usize, q: usize, r: usize, s: usize, t: usize) -> Family<Q> {
        Family::new(FamilyParams::new(p, q, r, s, t).unwrap()).unwrap()
    }

    fn scalar(v: i64) -> FamilyLabel<Q> {
        FamilyLabel::Scalar(Q::from_int(v))
    }

    fn arrow(name: &str) -> FamilyLabel<Q> {
        FamilyLabel::Arrow(name.into())
    }

    #[test]
    fn shape_of_the_quiver() {
        let f = fam(2, 2, 2, 2, 2);
        assert_eq!(f.quiver().vertex_count(), 8);
        assert_eq!(f.quiver().arrow_count(), 10);
        assert_eq!(f.bq.relations().len(), 4);
        assert!(f.bq.is_admissible());
        assert!(f.bq.is_triangular());
        assert_eq!(f.bq.relations()[0].endpoints(), (f.b, f.a));
        let q = f.quiver();
        assert_eq!(
            f.bq.relations()[3].endpoints(),
            (q.vertex("D1").unwrap(), q.vertex("G1").unwrap())
        );

        let f = fam(1, 1, 1, 1, 1);
        assert_eq!(f.quiver().vertex_count(), 3);
        assert_eq!(f.quiver().arrow_count(), 5);
        assert!(!f.bq.is_admissible());
        assert!(f.bq.is_triangular());
    }

    #[test]
    fn canonical_vectors() {
        let f = fam(2, 2, 2, 2, 2);
        let (h1, h2, d) = f.canonical_dimvecs();
        assert_eq!(h1.total(), 5);
        assert_eq!(h2.total(), 4);
        assert_eq!(d.get(f.b), 2);
        assert!(d.entries().iter().enumerate().all(|(v, &x)| v == f.b || x == 1));
        let hull = f.quiver().minimal_convex(&["a", "b"]).unwrap();
        assert_eq!(hull.vertex_count(), 5);
        let hull = f.quiver().minimal_convex(&["b", "c"]).unwrap();
        assert_eq!(hull.vertex_count(), 4);
    }

    #[test]
    fn h1_members_are_variety_points() {
        let f = fam(2, 2, 2, 2, 2);
        let rho1 = &f.bq.relations()[0];
        let m = f.build_h1(&scalar(2)).unwrap();
        assert!(m.evaluate_relation(rho1).is_zero());
        for name in ["alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2"] {
            let m = f.build_h1(&arrow(name)).unwrap();
            assert!(m.is_variety_point(&f.bq), "{name}");
        }
        let m = f.build_h1(&arrow("beta2")).unwrap();
        let alpha1 = f.quiver().arrow_id("alpha1").unwrap();
        assert_eq!(m.matrix(alpha1), &Matrix::scalar(Q::from_int(-1)));
    }

    #[test]
    fn invalid_labels() {
        let f = fam(2, 2, 2, 2, 2);
        assert!(matches!(f.build_h1(&scalar(0)), Err(Error::InvalidLabel(_))));
        assert!(matches!(f.build_h1(&scalar(1)), Err(Error::InvalidLabel(_))));
        assert!(matches!(f.build_h1(&arrow("xi1")), Err(Error::InvalidLabel(_))));
        assert!(matches!(f.build_h2(&scalar(0)), Err(Error::InvalidLabel(_))));
        assert!(matches!(f.build_h2(&arrow("alpha1")), Err(Error::InvalidLabel(_))));
        assert!(matches!(f.build_h2(&arrow("nope")), Err(Error::InvalidLabel(_))));
        assert!(f.build_h2(&scalar(1)).is_ok());
    }

    #[test]
    fn h2_members_are_variety_points() {
        let f = fam(2, 2, 2, 2, 2);
        for label in [scalar(3), arrow("xi1"), arrow("xi2"), arrow("delta1"), arrow("delta2")] {
            let m = f.build_h2(&label).unwrap();
            assert!(m.is_variety_point(&f.bq));
        }
    }

    #[test]
    fn simple_at_b_homs() {
        let f = fam(2, 2, 2, 2, 2);
        let s = f.simple_at_b();
        let h1 = f.build_h1(&scalar(2)).unwrap();
        let h2 = f.build_h2(&scalar(3)).unwrap();
        assert_eq!(hom_dim(&s, &h2).unwrap(), 1);
        assert_eq!(hom_dim(&s, &h1).unwrap(), 0);
        assert_eq!(hom_dim(&s, &h1.direct_sum(&h2).unwrap()).unwrap(), 1);
    }

    #[test]
    fn locus_membership() {
        let f = fam(2, 2, 2, 2, 2);
        let m = f
            .build_h1(&scalar(2))
            .unwrap()
            .direct_sum(&f.build_h2(&scalar(3)).unwrap())
            .unwrap();
        assert!(f.decomposable_locus_member(&m).unwrap());
        assert!(matches!(
            f.decomposable_locus_member(&f.build_h1(&scalar(2)).unwrap()),
            Err(Error::WrongDimension(_))
        ));
    }

    #[test]
    fn small_grid_rows() {
        let params = FamilyParams::new(2, 2, 2, 2, 2).unwrap();
        let report = verify_section4::<Q>(params, &[Q::from_int(2)], &[Q::from_int(3)], 1).unwrap();
        assert_eq!(report.rows.len(), 7 * 5);
        let first = &report.rows[0];
        assert_eq!((first.z_h1, first.z_h2, first.z_h1_h2, first.b_h2_h1), (5, 4, 0, 1));
        assert_eq!(first.z_s, 10);
        assert!(report.rows.iter().all(|r| r.hom_s_m == 1 && r.locus && r.iso == "Isomorphic"));
        let failing: Vec<(&str, &str)> = report
            .rows
            .iter()
            .filter(|r| !r.passed())
            .map(|r| (r.u.as_str(), r.v.as_str()))
            .collect();
        assert_eq!(failing, [("alpha2", "xi2"), ("gamma2", "delta2")]);
        assert!(matches!(report.check(), Err(Error::DecompositionMismatch { direct: 11, total: 10, .. })));
    }

    // With alpha_p and xi_s both zero, gluing H''(xi_s) at X1 into H'(alpha_p)
    // at b is a cocycle outside B(H'', H') that keeps hom(S, -) doubled.
    #[test]
    fn extra_constrained_direction_at_alpha_p_xi_s() {
        use crate::homological::coboundary_space;
        use crate::rep::{is_cocycle, middle_term, CocycleElement};

        let f = fam(2, 2, 2, 2, 2);
        let h1 = f.build_h1(&arrow("alpha2")).unwrap();
        let h2 = f.build_h2(&arrow("xi2")).unwrap();
        let m = h1.direct_sum(&h2).unwrap();
        let s = f.simple_at_b();
        let xi1 = f.quiver().arrow_id("xi1").unwrap();

        let mut mats: Vec<Matrix<Q>> = CocycleElement::zero(&m, &m).matrices().to_vec();
        mats[xi1] = Matrix::from_ints(2, 1, &[1, 0]);
        let z = CocycleElement::new(&m, &m, mats).unwrap();
        assert!(is_cocycle(&z, &f.bq, &m, &m));
        let w = middle_term(&z, &m, &m, &f.bq).unwrap();
        assert_eq!(hom_dim(&s, &m).unwrap(), 1);
        assert_eq!(hom_dim(&s, &w).unwrap(), 2);

        // Its block in Z(H'', H') is not a coboundary.
        let mut block: Vec<Matrix<Q>> = CocycleElement::zero(&h1, &h2).matrices().to_vec();
        block[xi1] = Matrix::from_ints(1, 1, &[1]);
        let block = CocycleElement::new(&h1, &h2, block).unwrap();
        assert!(is_cocycle(&block, &f.bq, &h1, &h2));
        let b = coboundary_space(&h2, &h1).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(!b.contains(&block.coords()));
        assert_eq!(cocycle_dim(&h2, &h1, &f.bq).unwrap(), 2);
    }
}
