//! Shared generators and a from-scratch linear algebra oracle for the
//! integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use num_traits::{One, Zero};
use quiver_varieties::linalg::{random_matrix_with, seeded_rng, Matrix};
use quiver_varieties::{
    DimVector, Path, QBoundQuiver, QRepresentation, Quiver, Rational, Relation, Scalar,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

pub fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

/// Random acyclic quiver: arrows always run from a higher to a lower vertex.
pub fn random_quiver(rng: &mut impl Rng, max_vertices: usize, max_arrows: usize) -> Arc<Quiver> {
    let n = rng.gen_range(1..=max_vertices);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let k = if n == 1 { 0 } else { rng.gen_range(0..=max_arrows) };
    let arrows: Vec<(String, String, String)> = (0..k)
        .map(|i| {
            let s = rng.gen_range(1..n);
            let t = rng.gen_range(0..s);
            (format!("a{i}"), vertices[s].clone(), vertices[t].clone())
        })
        .collect();
    Arc::new(Quiver::new(&vertices, arrows.iter().map(|(a, s, t)| (a, s, t))).unwrap())
}

/// All paths of length at least two, written as arrow lists.
fn long_paths(q: &Quiver) -> Vec<Path> {
    let mut frontier: Vec<Path> = (0..q.arrow_count()).map(|a| Path::arrow(q, a)).collect();
    let mut out = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for a in 0..q.arrow_count() {
                if let Ok(longer) = p.compose(q, &Path::arrow(q, a)) {
                    next.push(longer);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Up to `max_relations` random relations of one or two paths of length >= 2.
pub fn random_bound_quiver(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_arrows: usize,
    max_relations: usize,
) -> QBoundQuiver {
    let quiver = random_quiver(rng, max_vertices, max_arrows);
    let paths = long_paths(&quiver);
    let mut relations = Vec::new();
    if !paths.is_empty() {
        for _ in 0..rng.gen_range(max_relations.min(1)..=max_relations) {
            let p = paths[rng.gen_range(0..paths.len())].clone();
            let mut terms = vec![(q(rng.gen_range(1..=3)), p.clone())];
            let partners: Vec<&Path> = paths
                .iter()
                .filter(|o| **o != p && o.source() == p.source() && o.target() == p.target())
                .collect();
            if !partners.is_empty() && rng.gen_bool(0.5) {
                let o = partners[rng.gen_range(0..partners.len())].clone();
                terms.push((q(-rng.gen_range(1..=3)), o));
            }
            relations.push(Relation::new(terms).unwrap());
        }
    }
    QBoundQuiver::new(quiver, relations).unwrap()
}

pub fn random_dim(rng: &mut impl Rng, q: &Quiver, max_dim: usize) -> DimVector {
    DimVector::new((0..q.vertex_count()).map(|_| rng.gen_range(0..=max_dim)).collect())
}

/// Random point of the variety: random matrices, then one arrow of every
/// relation path is zeroed so every relation vanishes termwise.
pub fn random_point(rng: &mut impl Rng, bq: &QBoundQuiver, d: &DimVector, bound: i64) -> QRepresentation {
    let q = bq.quiver();
    let mut zero = vec![false; q.arrow_count()];
    for rel in bq.relations() {
        for (_, p) in rel.terms() {
            if !p.arrows().iter().any(|&a| zero[a]) {
                zero[p.arrows()[rng.gen_range(0..p.len())]] = true;
            }
        }
    }
    let matrices = (0..q.arrow_count())
        .map(|a| {
            let arrow = q.arrow(a);
            let (r, c) = (d.get(arrow.target), d.get(arrow.source));
            if zero[a] {
                Matrix::zeros(r, c)
            } else {
                random_matrix_with(rng, r, c, bound)
            }
        })
        .collect();
    QRepresentation::new(q.clone(), d.clone(), matrices).unwrap()
}

/// Independent dense linear algebra over the rationals.
pub mod oracle {
    use super::*;
    use quiver_varieties::Representation;

    pub type Mat = Vec<Vec<Rational>>;

    pub fn to_mat(m: &Matrix<Rational>) -> Mat {
        (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
    }

    pub fn identity(n: usize) -> Mat {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    }

    pub fn mul(a: &Mat, b: &Mat, inner: usize, cols: usize) -> Mat {
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                    .collect()
            })
            .collect()
    }

    /// Rank by Gaussian elimination on a row list.
    pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r][c].clone();
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let f = &rows[i][c] / &pivot;
                    for j in c..cols {
                        let sub = &f * &rows[r][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Linear equations in `n` unknowns, each a dense coefficient row.
    pub struct System {
        pub n: usize,
        pub rows: Vec<Vec<Rational>>,
    }

    impl System {
        pub fn new(n: usize) -> Self {
            System { n, rows: Vec::new() }
        }
        pub fn nullity(&self) -> usize {
            if self.rows.is_empty() {
                return self.n;
            }
            self.n - rank(self.rows.clone())
        }
    }

    fn dims(m: &Representation<Rational>) -> Vec<usize> {
        m.dim().entries().to_vec()
    }

    /// Offsets of per-vertex blocks `to_x x from_x`.
    fn vertex_offsets(from: &[usize], to: &[usize]) -> (Vec<usize>, usize) {
        let mut off = Vec::new();
        let mut n = 0;
        for x in 0..from.len() {
            off.push(n);
            n += to[x] * from[x];
        }
        (off, n)
    }

    /// Matrix of `h -> to_a h_s - h_t from_a`, one row per output entry.
    fn intertwiner_rows(from: &Representation<Rational>, to: &Representation<Rational>) -> System {
        let q = from.quiver();
        let (df, dt) = (dims(from), dims(to));
        let (off, n) = vertex_offsets(&df, &dt);
        let mut sys = System::new(n);
        for a in 0..q.arrow_count() {
            let arr = q.arrow(a);
            let (s, t) = (arr.source, arr.target);
            let fa = to_mat(from.matrix(a));
            let ta = to_mat(to.matrix(a));
            for i in 0..dt[t] {
                for j in 0..df[s] {
                    let mut row = vec![Rational::zero(); n];
                    for k in 0..dt[s] {
                        row[off[s] + k * df[s] + j] += &ta[i][k];
                    }
                    for k in 0..df[t] {
                        row[off[t] + i * df[t] + k] -= &fa[k][j];
                    }
                    sys.rows.push(row);
                }
            }
        }
        sys
    }

    pub fn hom(m: &Representation<Rational>, n: &Representation<Rational>) -> usize {
        intertwiner_rows(m, n).nullity()
    }

    /// `dim B(V, U)`: rank of `h -> U_a h_s - h_t V_a`.
    pub fn coboundaries(v: &Representation<Rational>, u: &Representation<Rational>) -> usize {
        let sys = intertwiner_rows(v, u);
        if sys.rows.is_empty() {
            0
        } else {
            rank(sys.rows)
        }
    }

    /// Offsets of per-arrow blocks `U_t x V_s`.
    fn arrow_offsets(v: &Representation<Rational>, u: &Representation<Rational>) -> (Vec<usize>, usize) {
        let q = v.quiver();
        let mut off = Vec::new();
        let mut n = 0;
        for a in 0..q.arrow_count() {
            off.push(n);
            n += u.dim().get(q.arrow(a).target) * v.dim().get(q.arrow(a).source);
        }
        (off, n)
    }

    fn path_product(m: &Representation<Rational>, arrows: &[usize]) -> Mat {
        let q = m.quiver();
        // arrows[0] is applied last; start from the source of the last arrow.
        let src = q.arrow(*arrows.last().unwrap()).source;
        let mut acc = identity(m.dim().get(src));
        let mut cur_dim = m.dim().get(src);
        for &a in arrows.iter().rev() {
            let t = q.arrow(a).target;
            acc = mul(&to_mat(m.matrix(a)), &acc, cur_dim, m.dim().get(src));
            cur_dim = m.dim().get(t);
        }
        acc
    }

    /// Cocycle equations: for each relation, the sum over paths and split
    /// positions of `U...U Z V...V`.
    fn cocycle_rows(bq: &QBoundQuiver, v: &Representation<Rational>, u: &Representation<Rational>, sys: &mut System, shift: usize) {
        let q = bq.quiver();
        let (off, _) = arrow_offsets(v, u);
        for rel in bq.relations() {
            let (s, t) = rel.endpoints();
            let (rows_out, cols_out) = (u.dim().get(t), v.dim().get(s));
            let mut eqs = vec![vec![Rational::zero(); sys.n]; rows_out * cols_out];
            for (c, p) in rel.terms() {
                let arrows = p.arrows();
                for k in 0..arrows.len() {
                    let a = arrows[k];
                    let (za_t, za_s) = (q.arrow(a).target, q.arrow(a).source);
                    let left = if k == 0 {
                        identity(u.dim().get(t))
                    } else {
                        path_product(u, &arrows[..k])
                    };
                    let right = if k + 1 == arrows.len() {
                        identity(v.dim().get(s))
                    } else {
                        path_product(v, &arrows[k + 1..])
                    };
                    let (zr, zc) = (u.dim().get(za_t), v.dim().get(za_s));
                    for i in 0..rows_out {
                        for j in 0..cols_out {
                            for pp in 0..zr {
                                for qq in 0..zc {
                                    let coef = c * &left[i][pp] * &right[qq][j];
                                    eqs[i * cols_out + j][shift + off[a] + pp * zc + qq] += coef;
                                }
                            }
                        }
                    }
                }
            }
            sys.rows.extend(eqs);
        }
    }

    pub fn cocycles(bq: &QBoundQuiver, v: &Representation<Rational>, u: &Representation<Rational>) -> usize {
        let (_, n) = arrow_offsets(v, u);
        let mut sys = System::new(n);
        cocycle_rows(bq, v, u, &mut sys, 0);
        sys.nullity()
    }

    /// `dim Z_S(M, M)` for the simple `S` at vertex `b`, from the definition
    /// `dim Hom(S, W^Z) = 2 dim Hom(S, M)`: writing `w = (w1, w2)` at `b`,
    /// `Hom(S, W^Z)` is `{M_out w2 = 0, M_out w1 + Z_out w2 = 0}`, so the
    /// condition is `Z_out K in im M_out` with `K = ker M_out`. Solved jointly
    /// with one auxiliary `w1` per basis vector of `K`.
    pub fn constrained_at_simple(bq: &QBoundQuiver, m: &Representation<Rational>, b: usize) -> usize {
        let q = bq.quiver();
        let db = m.dim().get(b);
        let out: Vec<usize> = (0..q.arrow_count()).filter(|&a| q.arrow(a).source == b).collect();
        // Stacked out-map and a basis of its kernel.
        let mut stacked: Mat = Vec::new();
        for &a in &out {
            stacked.extend(to_mat(m.matrix(a)));
        }
        let kernel = kernel_basis(&stacked, db);
        let h = kernel.len();
        let (off, nz) = arrow_offsets(m, m);
        let n = nz + h * db;
        let mut sys = System::new(n);
        cocycle_rows(bq, m, m, &mut sys, 0);
        for (ki, k) in kernel.iter().enumerate() {
            for &a in &out {
                let rows_a = m.dim().get(q.arrow(a).target);
                let ma = to_mat(m.matrix(a));
                for i in 0..rows_a {
                    let mut row = vec![Rational::zero(); n];
                    for j in 0..db {
                        row[nz + ki * db + j] += &ma[i][j];
                        row[off[a] + i * db + j] += &k[j];
                    }
                    sys.rows.push(row);
                }
            }
        }
        sys.nullity() - h * h
    }

    /// Kernel basis of a `rows x cols` matrix by reduced row echelon form.
    pub fn kernel_basis(a: &Mat, cols: usize) -> Vec<Vec<Rational>> {
        let mut rows = a.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r][c].clone();
            for j in 0..cols {
                rows[r][j] = &rows[r][j] / &pivot;
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    for j in 0..cols {
                        let sub = &f * &rows[r][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (0..cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![Rational::zero(); cols];
                v[free] = Rational::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -rows[i][free].clone();
                }
                v
            })
            .collect()
    }
}

/// Random dimension vector and a random point of that dimension.
pub fn random_rep(rng: &mut impl Rng, bq: &QBoundQuiver, max_dim: usize, bound: i64) -> QRepresentation {
    let d = random_dim(rng, bq.quiver(), max_dim);
    random_point(rng, bq, &d, bound)
}
