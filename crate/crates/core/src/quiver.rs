//! Quivers, paths, relations and dimension vectors.
//!
//! Vertices and arrows are named by strings and indexed by declaration
//! order; that order fixes every matrix and basis layout downstream.
//!
//! A path `a1 a2 ... an` is written with the leftmost arrow applied last, so
//! composability means `source(a_i) == target(a_{i+1})`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite quiver with uniquely named vertices and arrows.
#[derive(Clone, Debug)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arrows == other.arrows
    }
}

impl Eq for Quiver {}

impl Quiver {
    /// Builds a quiver from vertex names and `(name, source, target)` triples.
    pub fn new<V, A, S>(vertices: V, arrows: A) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        A: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut q = Quiver {
            vertices: Vec::new(),
            arrows: Vec::new(),
            vertex_index: HashMap::new(),
            arrow_index: HashMap::new(),
        };
        for v in vertices {
            q.push_vertex(v.as_ref())?;
        }
        for (name, s, t) in arrows {
            q.push_arrow(name.as_ref(), s.as_ref(), t.as_ref())?;
        }
        Ok(q)
    }

    pub(crate) fn push_vertex(&mut self, name: &str) -> Result<usize> {
        if self.vertex_index.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let idx = self.vertices.len();
        self.vertices.push(name.to_string());
        self.vertex_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub(crate) fn push_arrow(&mut self, name: &str, source: &str, target: &str) -> Result<usize> {
        if self.arrow_index.contains_key(name) {
            return Err(Error::DuplicateArrow(name.to_string()));
        }
        let source = self.vertex(source)?;
        let target = self.vertex(target)?;
        let idx = self.arrows.len();
        self.arrows.push(Arrow {
            name: name.to_string(),
            source,
            target,
        });
        self.arrow_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    /// Index of the vertex called `name`.
    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// Index of the arrow called `name`.
    pub fn arrow_id(&self, name: &str) -> Result<usize> {
        self.arrow_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    /// `true` iff the quiver has no oriented cycle (loops included).
    pub fn is_triangular(&self) -> bool {
        let n = self.vertex_count();
        let mut indegree = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in &self.arrows {
            indegree[a.target] += 1;
            out[a.source].push(a.target);
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &w in &out[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen == n
    }

    /// Full subquiver on `keep` (vertex and arrow order inherited).
    pub fn full_subquiver(&self, keep: &[usize]) -> Quiver {
        let set: HashSet<usize> = keep.iter().copied().collect();
        let vertices: Vec<&str> = (0..self.vertex_count())
            .filter(|v| set.contains(v))
            .map(|v| self.vertices[v].as_str())
            .collect();
        let arrows: Vec<(&str, &str, &str)> = self
            .arrows
            .iter()
            .filter(|a| set.contains(&a.source) && set.contains(&a.target))
            .map(|a| {
                (
                    a.name.as_str(),
                    self.vertices[a.source].as_str(),
                    self.vertices[a.target].as_str(),
                )
            })
            .collect();
        Quiver::new(vertices, arrows).expect("subquiver of a valid quiver is valid")
    }

    /// Vertices reachable from `v` along arrows, `v` included.
    fn forward_reach(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            for a in self.arrows.iter().filter(|a| a.source == x) {
                if !seen[a.target] {
                    seen[a.target] = true;
                    stack.push(a.target);
                }
            }
        }
        seen
    }

    /// Smallest convex vertex set containing `seed`, as sorted indices.
    ///
    /// A vertex lies on a path from `x` to `y` iff it is reachable from `x`
    /// and reaches `y`; the closure is iterated to a fixed point.
    pub fn minimal_convex_vertices(&self, seed: &[usize]) -> Vec<usize> {
        let n = self.vertex_count();
        let reach: Vec<Vec<bool>> = (0..n).map(|v| self.forward_reach(v)).collect();
        let mut member = vec![false; n];
        for &s in seed {
            member[s] = true;
        }
        loop {
            let current: Vec<usize> = (0..n).filter(|&v| member[v]).collect();
            let mut changed = false;
            for v in 0..n {
                if member[v] {
                    continue;
                }
                let from = current.iter().any(|&x| reach[x][v]);
                let to = current.iter().any(|&y| reach[v][y]);
                if from && to {
                    member[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&v| member[v]).collect()
    }

    /// Minimal convex full subquiver containing the named seed vertices.
    pub fn minimal_convex(&self, seed: &[&str]) -> Result<Quiver> {
        let seed = seed
            .iter()
            .map(|s| self.vertex(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.full_subquiver(&self.minimal_convex_vertices(&seed)))
    }

    /// `true` iff the underlying graph restricted to `vertices` is connected.
    /// The empty set is not connected.
    pub fn is_connected_on(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let set: HashSet<usize> = vertices.iter().copied().collect();
        let mut seen = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for a in &self.arrows {
                let next = if a.source == x {
                    a.target
                } else if a.target == x {
                    a.source
                } else {
                    continue;
                };
                if set.contains(&next) && seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen.len() == set.len()
    }
}

/// A path in a quiver, stored as arrow indices in written order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    arrows: Vec<usize>,
    source: usize,
    target: usize,
}

#[allow(clippy::len_without_is_empty)]
impl Path {
    /// The trivial path at vertex `v`.
    pub fn trivial(v: usize) -> Self {
        Path {
            arrows: Vec::new(),
            source: v,
            target: v,
        }
    }

    /// The length-one path along arrow `a`.
    pub fn arrow(q: &Quiver, a: usize) -> Self {
        let arr = q.arrow(a);
        Path {
            arrows: vec![a],
            source: arr.source,
            target: arr.target,
        }
    }

    /// Builds the path `names[0] names[1] ...` (rightmost applied first).
    pub fn from_names(q: &Quiver, names: &[&str]) -> Result<Self> {
        let ids = names
            .iter()
            .map(|n| q.arrow_id(n))
            .collect::<Result<Vec<_>>>()?;
        Self::from_arrows(q, &ids)
    }

    /// Builds a nontrivial path from arrow indices, checking composability.
    pub fn from_arrows(q: &Quiver, ids: &[usize]) -> Result<Self> {
        let (&first, rest) = ids.split_first().ok_or(Error::TrivialPathInRelation)?;
        let mut path = Path::arrow(q, first);
        for &a in rest {
            path = path.compose(q, &Path::arrow(q, a))?;
        }
        Ok(path)
    }

    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// The composite `self * other`: `other` first, then `self`.
    pub fn compose(&self, q: &Quiver, other: &Path) -> Result<Path> {
        if self.source != other.target {
            return Err(Error::NonComposable {
                source_vertex: q.vertex_name(self.source).to_string(),
                target_vertex: q.vertex_name(other.target).to_string(),
            });
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Ok(Path {
            arrows,
            source: other.source,
            target: self.target,
        })
    }

    /// Arrow names joined by `.`; trivial paths print as `e_<vertex>`.
    pub fn display(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return format!("e_{}", q.vertex_name(self.source));
        }
        self.arrows
            .iter()
            .map(|&a| q.arrow(a).name.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A linear combination of parallel nontrivial paths.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<F> {
    terms: Vec<(F, Path)>,
    source: usize,
    target: usize,
}

impl<F: Scalar> Relation<F> {
    pub fn new(terms: Vec<(F, Path)>) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptyRelation)?;
        let (source, target) = (first.source, first.target);
        for (c, p) in &terms {
            if c.is_zero() {
                return Err(Error::ZeroCoefficient);
            }
            if p.is_trivial() {
                return Err(Error::TrivialPathInRelation);
            }
            if p.source != source || p.target != target {
                return Err(Error::MixedEndpoints);
            }
        }
        Ok(Relation {
            terms,
            source,
            target,
        })
    }

    /// Convenience constructor from `(coefficient, arrow names)` pairs.
    pub fn from_named(q: &Quiver, terms: &[(i64, &[&str])]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|(c, names)| Ok((F::from_int(*c), Path::from_names(q, names)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(F, Path)] {
        &self.terms
    }

    /// Common `(source, target)` of all constituent paths.
    pub fn endpoints(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// All paths have length at least two.
    pub fn is_admissible(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.len() >= 2)
    }
}

/// A quiver together with a finite set of relations.
///
/// Relation sets containing length-one paths are accepted and flagged via
/// [`BoundQuiver::is_admissible`]; the variety constructions still apply.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundQuiver<F> {
    quiver: Arc<Quiver>,
    relations: Vec<Relation<F>>,
}

impl<F: Scalar> BoundQuiver<F> {
    pub fn new(quiver: Arc<Quiver>, relations: Vec<Relation<F>>) -> Result<Self> {
        let arrows = quiver.arrow_count();
        let vertices = quiver.vertex_count();
        for rel in &relations {
            for (_, p) in rel.terms() {
                if let Some(&bad) = p.arrows().iter().find(|&&a| a >= arrows) {
                    return Err(Error::UnknownArrow(format!("#{bad}")));
                }
                let mut path = Path::arrow(&quiver, p.arrows()[0]);
                for &a in &p.arrows()[1..] {
                    path = path.compose(&quiver, &Path::arrow(&quiver, a))?;
                }
                if path.source >= vertices || path != *p {
                    return Err(Error::MixedEndpoints);
                }
            }
        }
        Ok(BoundQuiver { quiver, relations })
    }

    /// A quiver without relations.
    pub fn free(quiver: Arc<Quiver>) -> Self {
        BoundQuiver {
            quiver,
            relations: Vec::new(),
        }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn relations(&self) -> &[Relation<F>] {
        &self.relations
    }

    pub fn is_admissible(&self) -> bool {
        self.relations.iter().all(Relation::is_admissible)
    }

    pub fn is_triangular(&self) -> bool {
        self.quiver.is_triangular()
    }
}

/// A nonnegative integer vector indexed by the vertices of a quiver.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimVector(Vec<usize>);

impl DimVector {
    pub fn new(entries: Vec<usize>) -> Self {
        DimVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, v: usize) -> Self {
        let mut d = vec![0; n];
        d[v] = 1;
        DimVector(d)
    }

    /// Builds a vector from `(vertex name, value)` pairs, which must name
    /// every vertex exactly once.
    pub fn from_named(q: &Quiver, entries: &[(&str, usize)]) -> Result<Self> {
        let mut d: Vec<Option<usize>> = vec![None; q.vertex_count()];
        for (name, value) in entries {
            let v = q.vertex(name)?;
            if d[v].replace(*value).is_some() {
                return Err(Error::WrongDimension(format!("vertex `{name}` given twice")));
            }
        }
        d.into_iter()
            .enumerate()
            .map(|(v, x)| {
                x.ok_or_else(|| {
                    Error::WrongDimension(format!("vertex `{}` missing", q.vertex_name(v)))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(DimVector)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &DimVector) -> DimVector {
        assert_eq!(self.len(), other.len(), "dimension vectors of different length");
        DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Indices of the vertices with nonzero entry.
    pub fn support_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.0[v] != 0).collect()
    }

    /// `name=value` pairs joined by commas.
    pub fn display(&self, q: &Quiver) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(v, d)| format!("{}={}", q.vertex_name(v), d))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The support of a dimension vector and its predicates.
#[derive(Clone, Debug)]
pub struct Support {
    pub subquiver: Quiver,
    pub vertices: Vec<usize>,
    pub is_sincere: bool,
    pub is_connected: bool,
}

pub fn support(d: &DimVector, q: &Quiver) -> Result<Support> {
    if d.len() != q.vertex_count() {
        return Err(Error::WrongDimension(format!(
            "vector has {} entries, quiver has {} vertices",
            d.len(),
            q.vertex_count()
        )));
    }
    let vertices = d.support_vertices();
    Ok(Support {
        subquiver: q.full_subquiver(&vertices),
        is_sincere: vertices.len() == q.vertex_count(),
        is_connected: q.is_connected_on(&vertices),
        vertices,
    })
}
