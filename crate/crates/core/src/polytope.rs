//! Lattice polytopes in H-representation, their face lattices, dilations and
//! exact integrals of polynomials over faces.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use crate::arith::matrix::{affine_rank, det, kernel, left_inverse, rank, rank_int, solve, RatMatrix};
use crate::arith::rational::{dot_ri, factorial, gcd_vec, primitive_of_rat, rbig, ri, to_rat_vec, Rat};
use crate::arith::{MPoly, SpanLattice};
use crate::error::{Error, Result};

pub type IVec = Vec<i64>;
pub type RVec = Vec<Rat>;

/// The closed halfspace `<m, normal> + offset >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: IVec,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: IVec, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    /// `<m, u> + c`
    pub fn eval(&self, m: &[Rat]) -> Rat {
        dot_ri(m, &self.normal) + &self.offset
    }
}

/// A face, identified by its vertices; `facets` lists every facet containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
}

/// A full-dimensional polytope with irredundant facets and rational vertices.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    facets: Vec<Halfspace>,
    vertices: Vec<RVec>,
    vertex_facets: Vec<Vec<usize>>,
    faces: Vec<Face>,
    face_index: HashMap<Vec<usize>, usize>,
}

/// Upper limit on facets for the desk-scale enumeration.
pub const MAX_FACETS: usize = 32;
pub const MAX_DIM: usize = 4;

impl Polytope {
    /// Builds the polytope `{m : <m, u_i> + c_i >= 0}`; redundant inequalities are dropped.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        Self::build(dim, halfspaces, false)
    }

    /// Convex hull of integer points.
    pub fn from_vertices(dim: usize, points: &[IVec]) -> Result<Self> {
        check_dim(dim)?;
        let mut pts: Vec<IVec> = points.to_vec();
        for p in &pts {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!("point {p:?} does not have {dim} coordinates")));
            }
        }
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Err(Error::Empty);
        }
        let rpts: Vec<RVec> = pts.iter().map(|p| to_rat_vec(p)).collect();
        let ar = affine_rank(&rpts);
        if ar < dim {
            return Err(Error::NotFullDimensional(ar));
        }
        let mut found: BTreeSet<(IVec, Rat)> = BTreeSet::new();
        for subset in combinations(pts.len(), dim) {
            let base = &rpts[subset[0]];
            let diffs: RatMatrix = subset[1..]
                .iter()
                .map(|&i| rpts[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            if rank(&diffs) != dim - 1 {
                continue;
            }
            let ker = kernel(&diffs, dim);
            let u = primitive_of_rat(&ker[0]);
            let vals: Vec<Rat> = rpts.iter().map(|p| dot_ri(p, &u)).collect();
            let b = dot_ri(base, &u);
            let (u, b) = if vals.iter().all(|v| v >= &b) {
                (u, b)
            } else if vals.iter().all(|v| v <= &b) {
                (u.iter().map(|x| -x).collect(), -b)
            } else {
                continue;
            };
            found.insert((u, -b));
        }
        let hs = found.into_iter().map(|(u, c)| Halfspace::new(u, c)).collect();
        Self::from_halfspaces(dim, hs)
    }

    fn build(dim: usize, halfspaces: Vec<Halfspace>, keep_all: bool) -> Result<Self> {
        check_dim(dim)?;
        if halfspaces.len() > MAX_FACETS {
            return Err(Error::Resource(format!("{} facets exceed the limit of {MAX_FACETS}", halfspaces.len())));
        }
        let mut hs = Vec::with_capacity(halfspaces.len());
        for h in halfspaces {
            if h.normal.len() != dim {
                return Err(Error::InvalidInput(format!("normal {:?} does not have {dim} coordinates", h.normal)));
            }
            let g = gcd_vec(&h.normal);
            if g == 0 {
                return Err(Error::InvalidInput("zero facet normal".into()));
            }
            hs.push(Halfspace::new(h.normal.iter().map(|x| x / g).collect(), h.offset / ri(g)));
        }
        if !keep_all {
            let mut seen = BTreeSet::new();
            hs.retain(|h| seen.insert((h.normal.clone(), h.offset.clone())));
        }
        let normals: Vec<IVec> = hs.iter().map(|h| h.normal.clone()).collect();
        if rank_int(&normals) < dim {
            return Err(Error::Unbounded);
        }
        check_bounded(dim, &normals)?;

        let mut vertices: Vec<RVec> = Vec::new();
        for subset in combinations(hs.len(), dim) {
            let m: RatMatrix = subset.iter().map(|&i| to_rat_vec(&hs[i].normal)).collect();
            let b: RVec = subset.iter().map(|&i| -hs[i].offset.clone()).collect();
            let Ok(x) = solve(&m, &b) else { continue };
            if hs.iter().all(|h| !h.eval(&x).is_negative()) && !vertices.contains(&x) {
                vertices.push(x);
            }
        }
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        vertices.sort();
        let ar = affine_rank(&vertices);
        if ar < dim {
            return Err(Error::NotFullDimensional(ar));
        }
        let active = |hs: &[Halfspace], v: &RVec| -> Vec<usize> {
            hs.iter().enumerate().filter(|(_, h)| h.eval(v).is_zero()).map(|(i, _)| i).collect()
        };
        // Irredundant facets touch an (n-1)-dimensional set of vertices.
        let facet_dim = |hs: &[Halfspace], i: usize| {
            let pts: Vec<RVec> = vertices.iter().filter(|v| hs[i].eval(v).is_zero()).cloned().collect();
            if pts.is_empty() {
                None
            } else {
                Some(affine_rank(&pts))
            }
        };
        let redundant: Vec<usize> = (0..hs.len()).filter(|&i| facet_dim(&hs, i) != Some(dim - 1)).collect();
        if !redundant.is_empty() {
            if keep_all {
                return Err(Error::TypeChange(format!("inequalities {redundant:?} no longer define facets")));
            }
            let keep: Vec<Halfspace> = hs
                .iter()
                .enumerate()
                .filter(|(i, _)| !redundant.contains(i))
                .map(|(_, h)| h.clone())
                .collect();
            hs = keep;
        }
        let vertex_facets: Vec<Vec<usize>> = vertices.iter().map(|v| active(&hs, v)).collect();
        let mut p = Polytope {
            dim,
            facets: hs,
            vertices,
            vertex_facets,
            faces: Vec::new(),
            face_index: HashMap::new(),
        };
        p.build_faces();
        Ok(p)
    }

    fn build_faces(&mut self) {
        let nv = self.vertices.len();
        let facet_sets: Vec<Vec<usize>> = (0..self.facets.len())
            .map(|f| (0..nv).filter(|&v| self.vertex_facets[v].contains(&f)).collect())
            .collect();
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        all.insert((0..nv).collect());
        let mut queue: Vec<Vec<usize>> = facet_sets.clone();
        while let Some(s) = queue.pop() {
            if s.is_empty() || !all.insert(s.clone()) {
                continue;
            }
            for f in &facet_sets {
                let t: Vec<usize> = s.iter().filter(|v| f.contains(v)).cloned().collect();
                if !t.is_empty() && !all.contains(&t) {
                    queue.push(t);
                }
            }
        }
        let mut faces: Vec<Face> = all
            .into_iter()
            .map(|vs| {
                let pts: Vec<RVec> = vs.iter().map(|&v| self.vertices[v].clone()).collect();
                let facets: Vec<usize> = (0..self.facets.len())
                    .filter(|f| vs.iter().all(|&v| self.vertex_facets[v].contains(f)))
                    .collect();
                Face { dim: affine_rank(&pts), vertices: vs, facets }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        self.face_index = faces.iter().enumerate().map(|(i, f)| (f.vertices.clone(), i)).collect();
        self.faces = faces;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> &[RVec] {
        &self.vertices
    }

    /// Facets active at vertex `v`.
    pub fn vertex_facets(&self, v: usize) -> &[usize] {
        &self.vertex_facets[v]
    }

    /// All faces, ordered by dimension; the last one is the polytope itself.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    pub fn faces_of_dim(&self, d: usize) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(move |(_, f)| f.dim == d)
    }

    pub fn whole_face(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn vertex_face(&self, v: usize) -> usize {
        self.face_index[&vec![v]]
    }

    /// Face index of facet `f`.
    pub fn facet_face(&self, f: usize) -> usize {
        let vs: Vec<usize> = (0..self.vertices.len()).filter(|&v| self.vertex_facets[v].contains(&f)).collect();
        self.face_index[&vs]
    }

    /// The face whose facet set is exactly `facets`, if the intersection is a face of that codimension.
    pub fn face_with_facets(&self, facets: &[usize]) -> Option<usize> {
        let mut key: Vec<usize> = facets.to_vec();
        key.sort();
        self.faces.iter().position(|f| f.facets == key)
    }

    pub fn face_by_vertices(&self, vs: &[usize]) -> Option<usize> {
        self.face_index.get(vs).copied()
    }

    /// Faces of `face` one dimension lower.
    pub fn subfacets(&self, face: usize) -> Vec<usize> {
        let f = &self.faces[face];
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, g)| g.dim + 1 == f.dim && g.vertices.iter().all(|v| f.vertices.contains(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Faces contained in `face` (including itself).
    pub fn subfaces(&self, face: usize) -> Vec<usize> {
        let f = &self.faces[face];
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, g)| g.vertices.iter().all(|v| f.vertices.contains(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Faces containing vertex `v`.
    pub fn faces_containing_vertex(&self, v: usize) -> Vec<usize> {
        self.faces.iter().enumerate().filter(|(_, f)| f.vertices.contains(&v)).map(|(i, _)| i).collect()
    }

    /// The other endpoints of edges at `v`, with the edge face index.
    pub fn edges_at(&self, v: usize) -> Vec<(usize, usize)> {
        self.faces_of_dim(1)
            .filter(|(_, f)| f.vertices.contains(&v))
            .map(|(i, f)| (*f.vertices.iter().find(|&&w| w != v).expect("edge has two vertices"), i))
            .collect()
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|x| x.is_integer()))
    }

    pub fn is_simple(&self) -> bool {
        self.vertex_facets.iter().all(|a| a.len() == self.dim)
    }

    /// Simple with every vertex cone of the normal fan unimodular.
    pub fn is_delzant(&self) -> bool {
        self.is_simple()
            && self.vertex_facets.iter().all(|a| {
                let rows: RatMatrix = a.iter().map(|&i| to_rat_vec(&self.facets[i].normal)).collect();
                det(&rows).abs().is_one()
            })
    }

    pub fn contains(&self, m: &[Rat]) -> bool {
        self.facets.iter().all(|h| !h.eval(m).is_negative())
    }

    /// `P(h)`: offsets `c + h`, keeping the combinatorial type.
    pub fn dilate(&self, h: &[Rat]) -> Result<Polytope> {
        self.dilate_y(&Rat::zero(), h)
    }

    /// `P_y(h)`: offsets `(1 + y) c + h`, keeping the combinatorial type.
    pub fn dilate_y(&self, y: &Rat, h: &[Rat]) -> Result<Polytope> {
        let k = Rat::one() + y;
        if !k.is_positive() {
            return Err(Error::InvalidInput("dilation needs y > -1".into()));
        }
        if h.len() != self.facets.len() {
            return Err(Error::InvalidInput(format!(
                "dilation vector has {} entries for {} facets",
                h.len(),
                self.facets.len()
            )));
        }
        let hs: Vec<Halfspace> = self
            .facets
            .iter()
            .zip(h)
            .map(|(f, hi)| Halfspace::new(f.normal.clone(), &k * &f.offset + hi))
            .collect();
        let q = Self::build(self.dim, hs, true).map_err(|e| match e {
            Error::TypeChange(_) => e,
            other => Error::TypeChange(other.to_string()),
        })?;
        let mine: BTreeSet<&Vec<usize>> = self.vertex_facets.iter().collect();
        let theirs: BTreeSet<&Vec<usize>> = q.vertex_facets.iter().collect();
        if mine != theirs {
            return Err(Error::TypeChange("vertex incidences differ".into()));
        }
        Ok(q)
    }

    /// Integer dilate `k P`.
    pub fn scale(&self, k: &Rat) -> Result<Polytope> {
        if !k.is_positive() {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        let hs = self.facets.iter().map(|f| Halfspace::new(f.normal.clone(), k * &f.offset)).collect();
        Self::build(self.dim, hs, true)
    }

    /// Pulling triangulation of a face: simplices as vertex index lists.
    pub fn triangulate_face(&self, face: usize) -> Vec<Vec<usize>> {
        let f = &self.faces[face];
        if f.dim == 0 {
            return vec![f.vertices.clone()];
        }
        let apex = f.vertices[0];
        let mut out = Vec::new();
        for g in self.subfacets(face) {
            if self.faces[g].vertices.contains(&apex) {
                continue;
            }
            for mut s in self.triangulate_face(g) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }

    /// Integral chart for a face: lattice basis of its direction space.
    pub fn face_chart(&self, face: usize) -> FaceChart {
        let f = &self.faces[face];
        let base = &self.vertices[f.vertices[0]];
        let gens: Vec<IVec> = f.vertices[1..]
            .iter()
            .map(|&v| primitive_of_rat(&self.vertices[v].iter().zip(base).map(|(a, b)| a - b).collect::<RVec>()))
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        FaceChart::new(&gens, self.dim)
    }

    /// Lattice-normalized volume of a face; a vertex has volume 1.
    pub fn volume(&self, face: usize) -> Rat {
        self.integrate(face, &MPoly::constant(self.dim, Rat::one()))
    }

    /// `int_E f dm` in the lattice measure of the face's affine span.
    pub fn integrate(&self, face: usize, f: &MPoly<Rat>) -> Rat {
        let chart = self.face_chart(face);
        let simplices = self.triangulate_face(face);
        integrate_simplices(&chart, &simplices, &self.vertices, f)
    }

    /// Full-dimensional convenience wrapper.
    pub fn integrate_polynomial(&self, f: &MPoly<Rat>) -> Rat {
        self.integrate(self.whole_face(), f)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Resource(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

/// The recession cone `{d : <d, u> >= 0}` is trivial iff no extreme ray exists.
fn check_bounded(dim: usize, normals: &[IVec]) -> Result<()> {
    if dim == 1 {
        let pos = normals.iter().any(|u| u[0] > 0);
        let neg = normals.iter().any(|u| u[0] < 0);
        return if pos && neg { Ok(()) } else { Err(Error::Unbounded) };
    }
    for subset in combinations(normals.len(), dim - 1) {
        let rows: RatMatrix = subset.iter().map(|&i| to_rat_vec(&normals[i])).collect();
        if rank(&rows) != dim - 1 {
            continue;
        }
        let d = &kernel(&rows, dim)[0];
        let vals: Vec<Rat> = normals.iter().map(|u| dot_ri(d, u)).collect();
        if vals.iter().all(|v| !v.is_negative()) || vals.iter().all(|v| !v.is_positive()) {
            return Err(Error::Unbounded);
        }
    }
    Ok(())
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Coordinates on the lattice `span(E - v) ∩ Z^n` of a face.
#[derive(Clone, Debug)]
pub struct FaceChart {
    pub dim: usize,
    pub basis: Vec<IVec>,
    left_inv: RatMatrix,
}

impl FaceChart {
    pub fn new(gens: &[IVec], ambient: usize) -> Self {
        let lat = SpanLattice::new(gens, ambient);
        let cols: Vec<RVec> = lat.basis.iter().map(|b| to_rat_vec(b)).collect();
        let left_inv = left_inverse(&cols).expect("lattice basis has full column rank");
        FaceChart { dim: lat.rank, basis: lat.basis, left_inv }
    }

    /// Chart coordinates of a direction vector in the span.
    pub fn coords(&self, d: &[Rat]) -> RVec {
        self.left_inv.iter().map(|row| row.iter().zip(d).map(|(a, b)| a * b).sum()).collect()
    }
}

/// `sum over simplices` of `int f`, vertices taken from `positions`.
pub fn integrate_simplices(chart: &FaceChart, simplices: &[Vec<usize>], positions: &[RVec], f: &MPoly<Rat>) -> Rat {
    let mut total = Rat::zero();
    for s in simplices {
        let pts: Vec<&RVec> = s.iter().map(|&i| &positions[i]).collect();
        total += integrate_simplex(chart, &pts, f);
    }
    total
}

/// `int_S f` over a simplex lying in a face with the given chart.
pub fn integrate_simplex(chart: &FaceChart, pts: &[&RVec], f: &MPoly<Rat>) -> Rat {
    let k = chart.dim;
    let n = pts[0].len();
    if k == 0 {
        return f.eval(pts[0]);
    }
    let dirs: Vec<RVec> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    let w: RatMatrix = dirs.iter().map(|d| chart.coords(d)).collect();
    let jac = det(&w).abs();
    if jac.is_zero() {
        return Rat::zero();
    }
    // f(p0 + sum_i s_i d_i) as a polynomial in s.
    let subs: Vec<MPoly<Rat>> = (0..n)
        .map(|j| {
            let coeffs: Vec<Rat> = dirs.iter().map(|d| d[j].clone()).collect();
            MPoly::affine(&coeffs, pts[0][j].clone())
        })
        .collect();
    let g = f.compose(&subs);
    let mut acc = Rat::zero();
    for (e, c) in g.terms() {
        // Dirichlet: int over the standard simplex of s^e = prod e_i! / (k + |e|)!
        let num: Rat = e.iter().map(|&a| rbig(&factorial(a as usize))).product();
        let tot: usize = e.iter().map(|&a| a as usize).sum();
        acc += c * num / rbig(&factorial(k + tot));
    }
    acc * jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn square() -> Polytope {
        Polytope::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn square_faces() {
        let p = square();
        assert_eq!(p.num_facets(), 4);
        assert_eq!(p.faces().len(), 9);
        assert!(p.is_delzant());
        assert_eq!(p.volume(p.whole_face()), ri(1));
    }

    #[test]
    fn triangle_not_delzant() {
        let p = Polytope::from_vertices(2, &[vec![0, 0], vec![1, 0], vec![0, 2]]).unwrap();
        assert!(p.is_simple());
        assert!(!p.is_delzant());
        assert_eq!(p.volume(p.whole_face()), ri(1));
        // the hypotenuse from (1,0) to (0,2) has lattice length 1
        let e = p.faces_of_dim(1).find(|(_, f)| f.facets.len() == 1 && p.facets()[f.facets[0]].normal == vec![-2, -1]);
        assert_eq!(p.volume(e.unwrap().0), ri(1));
    }

    #[test]
    fn unbounded_and_degenerate() {
        let h = |u: IVec, c: i64| Halfspace::new(u, ri(c));
        assert_eq!(Polytope::from_halfspaces(1, vec![h(vec![1], 0)]).unwrap_err(), Error::Unbounded);
        assert_eq!(
            Polytope::from_halfspaces(2, vec![h(vec![1, 0], 0), h(vec![0, 1], 0), h(vec![-1, -1], 2), h(vec![1, 1], -3)])
                .unwrap_err(),
            Error::Empty
        );
        let seg = vec![h(vec![1, 0], 0), h(vec![-1, 0], 0), h(vec![0, 1], 0), h(vec![0, -1], 1)];
        assert_eq!(Polytope::from_halfspaces(2, seg).unwrap_err(), Error::NotFullDimensional(1));
    }

    #[test]
    fn redundant_inequality_dropped() {
        let h = |u: IVec, c: i64| Halfspace::new(u, ri(c));
        let p = Polytope::from_halfspaces(
            2,
            vec![h(vec![1, 0], 0), h(vec![0, 1], 0), h(vec![-1, 0], 1), h(vec![0, -1], 1), h(vec![-1, -1], 5)],
        )
        .unwrap();
        assert_eq!(p.num_facets(), 4);
    }

    #[test]
    fn square_pyramid_not_simple() {
        let p = Polytope::from_vertices(
            3,
            &[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 1]],
        )
        .unwrap();
        assert!(!p.is_simple());
    }

    #[test]
    fn dilation_preserves_type() {
        let p = square();
        let q = p.dilate(&[rat(1, 10), ri(0), ri(0), ri(0)]).unwrap();
        assert_eq!(q.vertices().len(), 4);
        assert!(p.dilate_y(&ri(-1), &vec![ri(0); 4]).is_err());
    }

    #[test]
    fn monomial_over_square() {
        let p = square();
        let f = MPoly::monomial(vec![1, 1], ri(1));
        assert_eq!(p.integrate_polynomial(&f), rat(1, 4));
        let g = MPoly::monomial(vec![2, 0], ri(1));
        assert_eq!(p.integrate_polynomial(&g), rat(1, 3));
    }
}
