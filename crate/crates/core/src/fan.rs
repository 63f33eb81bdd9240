//! Normal fans, cone multiplicities and the finite groups `G_sigma`,
//! unimodular subdivision with half-open decompositions, star fans and the
//! fibration data of nef divisors.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::matrix::{affine_rank, inverse, mat_vec, rank, rref, RatMatrix};
use crate::arith::rational::{dot_ri, dot_rr, frac, gcd_vec, primitive, primitive_of_rat, ri, to_rat_vec, Rat};
use crate::arith::snf::{coset_representatives, lattice_index, IntMatrix};
use crate::arith::SpanLattice;
use crate::error::{Error, Result};
use crate::polytope::{IVec, Polytope, RVec};

/// The inner normal fan: rays are facet normals, one cone per face.
#[derive(Clone, Debug)]
pub struct NormalFan {
    pub dim: usize,
    pub rays: Vec<IVec>,
    /// `cones[i]` lists the rays of the cone of face `i` of the polytope.
    pub cones: Vec<Vec<usize>>,
}

impl NormalFan {
    pub fn of(p: &Polytope) -> Self {
        NormalFan {
            dim: p.dim(),
            rays: p.facets().iter().map(|h| h.normal.clone()).collect(),
            cones: p.faces().iter().map(|f| f.facets.clone()).collect(),
        }
    }

    pub fn cone_generators(&self, cone: &[usize]) -> Vec<IVec> {
        cone.iter().map(|&r| self.rays[r].clone()).collect()
    }

    /// Multiplicity of the cone of face `face`.
    pub fn multiplicity(&self, face: usize) -> BigInt {
        cone_multiplicity(&self.cone_generators(&self.cones[face]), self.dim)
    }

    /// The group `G_Sigma` as characters on the rays, identity first.
    pub fn group(&self) -> Vec<Vec<Rat>> {
        fan_group(&self.rays, &self.cones, self.dim)
    }
}

/// `[N_sigma : <gens>]`, the index of the generators in their saturated span.
pub fn cone_multiplicity(gens: &[IVec], dim: usize) -> BigInt {
    if gens.is_empty() {
        return BigInt::one();
    }
    lattice_index(gens, dim)
}

/// Elements of `G_sigma = N_sigma / <u_1..u_k>` through their phases
/// `gamma_j(g)` in `[0, 1)`, one per generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupData {
    pub elements: Vec<Vec<Rat>>,
}

impl GroupData {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Elements with every phase nonzero (`G°_sigma`).
    pub fn primitive_elements(&self) -> Vec<Vec<Rat>> {
        self.elements.iter().filter(|g| g.iter().all(|x| !x.is_zero())).cloned().collect()
    }
}

/// Generators expressed in coordinates of their saturated span.
fn span_coords(gens: &[IVec], dim: usize) -> (SpanLattice, Vec<IVec>) {
    let lat = SpanLattice::new(gens, dim);
    let coords = gens.iter().map(|g| lat.coords(g)).collect();
    (lat, coords)
}

/// Group data of a simplicial cone.
pub fn group_data(gens: &[IVec], dim: usize) -> Result<GroupData> {
    if gens.is_empty() {
        return Ok(GroupData { elements: vec![Vec::new()] });
    }
    let (lat, coords) = span_coords(gens, dim);
    if lat.rank != gens.len() {
        return Err(Error::InvalidInput("cone generators are not linearly independent".into()));
    }
    let k = lat.rank;
    let g = IntMatrix::from_columns(&coords, k);
    let ginv = inverse(&g.to_rat()).expect("independent generators");
    let mut elements: Vec<Vec<Rat>> = coset_representatives(&g)
        .into_iter()
        .map(|r| {
            let rr: RVec = r.iter().map(|x| Rat::from_integer(x.clone())).collect();
            mat_vec(&ginv, &rr).iter().map(frac).collect()
        })
        .collect();
    elements.sort();
    elements.dedup();
    Ok(GroupData { elements })
}

/// Nonzero lattice points `sum lambda_i g_i` with `0 <= lambda_i < 1`, as
/// `(point, lambda)`, ordered by coordinate sum and then lexicographically.
pub fn parallelepiped_points(gens: &[IVec], dim: usize) -> Result<Vec<(IVec, RVec)>> {
    let gd = group_data(gens, dim)?;
    let mut pts: Vec<(IVec, RVec)> = gd
        .elements
        .into_iter()
        .filter(|l| l.iter().any(|x| !x.is_zero()))
        .map(|l| {
            let p: RVec = (0..dim)
                .map(|j| gens.iter().zip(&l).map(|(g, x)| ri(g[j]) * x).sum())
                .collect();
            let p = p.iter().map(|x| x.to_integer().to_i64().expect("lattice point")).collect();
            (p, l)
        })
        .collect();
    pts.sort_by(|a, b| {
        let sa: Rat = a.1.iter().sum();
        let sb: Rat = b.1.iter().sum();
        (sa, &a.0).cmp(&(sb, &b.0))
    });
    Ok(pts)
}

/// Stellar subdivision of a simplicial cone into cones unimodular in the
/// saturated span of the generators.
pub fn unimodular_subdivide(gens: &[IVec], dim: usize) -> Result<Vec<Vec<IVec>>> {
    if gens.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    let (lat, coords) = span_coords(gens, dim);
    if lat.rank != gens.len() {
        return Err(Error::InvalidInput("unimodular subdivision needs a simplicial cone".into()));
    }
    let k = lat.rank;
    let mut done: Vec<Vec<IVec>> = Vec::new();
    let mut work = vec![coords];
    while let Some(c) = work.pop() {
        let pts = parallelepiped_points(&c, k)?;
        let Some((p, lambda)) = pts.into_iter().next() else {
            done.push(c);
            continue;
        };
        for (i, l) in lambda.iter().enumerate() {
            if !l.is_zero() {
                let mut d = c.clone();
                d[i] = p.clone();
                work.push(d);
            }
        }
    }
    let mut out: Vec<Vec<IVec>> = done.into_iter().map(|c| c.iter().map(|x| lat.lift(x)).collect()).collect();
    out.sort();
    Ok(out)
}

/// A pointed cone with its face structure given as ray subsets.
#[derive(Clone, Debug)]
pub struct ConeComplex {
    pub dim: usize,
    pub rays: Vec<IVec>,
    /// Every face, as sorted ray indices, including the cone itself.
    pub faces: Vec<Vec<usize>>,
}

impl ConeComplex {
    fn face_rank(&self, f: &[usize]) -> usize {
        rank(&f.iter().map(|&r| to_rat_vec(&self.rays[r])).collect::<RatMatrix>())
    }

    /// Pulling triangulation of a face into simplicial cones (ray index lists).
    pub fn triangulate(&self, face: &[usize]) -> Vec<Vec<usize>> {
        let d = self.face_rank(face);
        if face.len() == d {
            return vec![face.to_vec()];
        }
        let apex = face[0];
        let mut out = Vec::new();
        for g in &self.faces {
            if g.contains(&apex) || !g.iter().all(|r| face.contains(r)) || self.face_rank(g) + 1 != d {
                continue;
            }
            for mut s in self.triangulate(g) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}

/// A simplicial unimodular piece with some facets removed: facet `i` (the
/// one opposite generator `i`) is excluded when `removed[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOpenPiece {
    pub generators: Vec<IVec>,
    pub removed: Vec<bool>,
}

/// Assigns removed facets so that the pieces partition the parent cone.
///
/// The reference vector is the sum of the parent's generators; when it lies on
/// a wall it moves along `sum_j g_j / t^(j+1)` for `t = 2, 3, ...`.
pub fn half_open_decomposition(parent: &[IVec], pieces: &[Vec<IVec>], dim: usize) -> Result<Vec<HalfOpenPiece>> {
    if parent.is_empty() {
        return Ok(pieces.iter().map(|p| HalfOpenPiece { generators: p.clone(), removed: vec![false; p.len()] }).collect());
    }
    let lat = SpanLattice::new(parent, dim);
    let k = lat.rank;
    let duals: Vec<RatMatrix> = pieces
        .iter()
        .map(|p| {
            let cols: Vec<IVec> = p.iter().map(|g| lat.coords(g)).collect();
            inverse(&IntMatrix::from_columns(&cols, k).to_rat())
        })
        .collect::<Result<_>>()?;
    let pc: Vec<RVec> = parent.iter().map(|g| to_rat_vec(&lat.coords(g))).collect();
    let base: RVec = (0..k).map(|j| pc.iter().map(|g| g[j].clone()).sum()).collect();
    let generic = |q: &RVec| duals.iter().all(|d| d.iter().all(|row| !dot_rr(row, q).is_zero()));
    let mut q = base.clone();
    let mut t = 1i64;
    while !generic(&q) {
        t += 1;
        if t > 10_000 {
            return Err(Error::NoGenericDirection(10_000));
        }
        q = base.clone();
        let mut w = Rat::one();
        for g in &pc {
            w /= ri(t);
            for (qi, gi) in q.iter_mut().zip(g) {
                *qi += &w * gi;
            }
        }
    }
    Ok(pieces
        .iter()
        .zip(&duals)
        .map(|(p, d)| HalfOpenPiece {
            generators: p.clone(),
            removed: d.iter().map(|row| dot_rr(row, &q).is_negative()).collect(),
        })
        .collect())
}

/// The tangent cone `v + Cone(primitive edge directions)` at a vertex.
#[derive(Clone, Debug)]
pub struct TangentCone {
    pub apex: RVec,
    pub complex: ConeComplex,
    /// For each face of the polytope containing the vertex, its face of the cone.
    pub face_map: Vec<(usize, Vec<usize>)>,
}

pub fn tangent_cone(p: &Polytope, v: usize) -> TangentCone {
    let edges = p.edges_at(v);
    let apex = p.vertices()[v].clone();
    let rays: Vec<IVec> = edges
        .iter()
        .map(|(w, _)| primitive_of_rat(&p.vertices()[*w].iter().zip(&apex).map(|(a, b)| a - b).collect::<RVec>()))
        .collect();
    let mut face_map = Vec::new();
    let mut faces = Vec::new();
    for fi in p.faces_containing_vertex(v) {
        let f = p.face(fi);
        let rs: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, (w, _))| f.vertices.contains(w))
            .map(|(i, _)| i)
            .collect();
        face_map.push((fi, rs.clone()));
        faces.push(rs);
    }
    TangentCone { apex, complex: ConeComplex { dim: p.dim(), rays, faces }, face_map }
}

/// The group `G_Sigma = {id} ⊔ ⊔_{sigma singular} G°_sigma` of a simplicial fan,
/// as phases on every ray (zero off the cone), identity first.
pub fn fan_group(rays: &[IVec], cones: &[Vec<usize>], dim: usize) -> Vec<Vec<Rat>> {
    let mut out = vec![vec![Rat::zero(); rays.len()]];
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for c in cones {
        if c.is_empty() || seen.contains(c) {
            continue;
        }
        seen.push(c.clone());
        let gens: Vec<IVec> = c.iter().map(|&r| rays[r].clone()).collect();
        let Ok(gd) = group_data(&gens, dim) else { continue };
        for g in gd.primitive_elements() {
            let mut ch = vec![Rat::zero(); rays.len()];
            for (&r, x) in c.iter().zip(g) {
                ch[r] = x;
            }
            out.push(ch);
        }
    }
    out
}

/// `Star(sigma)` in `N(sigma) = N / N_sigma`.
#[derive(Clone, Debug)]
pub struct StarFan {
    pub dim: usize,
    /// Facet index of each star ray.
    pub facets: Vec<usize>,
    /// Primitive image of each ray in the quotient lattice.
    pub rays: Vec<IVec>,
    /// `image(u_rho) = k_rho * ray`.
    pub scale: Vec<i64>,
    /// Cones as star-ray indices, one per face of the base face.
    pub cones: Vec<Vec<usize>>,
}

impl StarFan {
    pub fn group(&self) -> Vec<Vec<Rat>> {
        fan_group(&self.rays, &self.cones, self.dim)
    }
}

pub fn star_fan(p: &Polytope, face: usize) -> StarFan {
    let fan = NormalFan::of(p);
    let sigma = &fan.cones[face];
    let gens = fan.cone_generators(sigma);
    let lat = SpanLattice::new(&gens, p.dim());
    let e = p.face(face);
    let star: Vec<usize> = (0..p.num_facets())
        .filter(|r| !sigma.contains(r) && e.vertices.iter().any(|&v| p.vertex_facets(v).contains(r)))
        .collect();
    let mut rays = Vec::new();
    let mut scale = Vec::new();
    for &r in &star {
        let img = lat.quotient_coords(&fan.rays[r]);
        let k = gcd_vec(&img).abs();
        rays.push(primitive(&img));
        scale.push(k);
    }
    let cones = p
        .subfaces(face)
        .into_iter()
        .map(|g| {
            p.face(g)
                .facets
                .iter()
                .filter(|f| !sigma.contains(f))
                .map(|f| star.iter().position(|s| s == f).expect("star ray"))
                .collect()
        })
        .collect();
    StarFan { dim: p.dim() - lat.rank, facets: star, rays, scale, cones }
}

/// How the cones of the fan distribute over the faces of `P_{D'}`.
#[derive(Clone, Debug)]
pub struct FibrationData {
    pub dim: usize,
    /// The polytope `{m : <m, u_rho> + d'_rho >= 0}` (possibly lower-dimensional).
    pub normals: Vec<IVec>,
    pub offsets: Vec<Rat>,
    pub vertices: Vec<IVec>,
    pub faces: Vec<FibrationFace>,
    /// For each face of the original polytope, the index into `faces`.
    pub face_of_cone: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationFace {
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// `d[l]` counts cones of relative codimension `l` lying over this face.
    pub d: Vec<usize>,
}

impl FibrationFace {
    pub fn alternating_sum(&self) -> i64 {
        self.d.iter().enumerate().map(|(l, &c)| if l % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }
}

/// Checks that `D' = sum d'_rho D_rho` is globally generated and computes `d_l(X/E')`.
pub fn fibration_multiplicities(p: &Polytope, d_prime: &[Rat]) -> Result<FibrationData> {
    let n = p.dim();
    if d_prime.len() != p.num_facets() {
        return Err(Error::InvalidInput(format!("divisor has {} entries for {} facets", d_prime.len(), p.num_facets())));
    }
    let normals: Vec<IVec> = p.facets().iter().map(|h| h.normal.clone()).collect();
    let value = |m: &RVec, r: usize| dot_ri(m, &normals[r]) + &d_prime[r];
    let mut vertex_of_cone: Vec<IVec> = Vec::new();
    for v in 0..p.vertices().len() {
        let act = p.vertex_facets(v);
        let mut aug: RatMatrix = act
            .iter()
            .map(|&r| {
                let mut row = to_rat_vec(&normals[r]);
                row.push(-d_prime[r].clone());
                row
            })
            .collect();
        let piv = rref(&mut aug);
        if piv.contains(&n) {
            return Err(Error::NotNef(format!("no Cartier data on the cone of vertex {v}")));
        }
        let mut m = vec![Rat::zero(); n];
        for (row, &c) in piv.iter().enumerate() {
            m[c] = aug[row][n].clone();
        }
        if let Some(r) = (0..normals.len()).find(|&r| value(&m, r).is_negative()) {
            return Err(Error::NotNef(format!("vertex datum of cone {v} violates facet {r}")));
        }
        let Some(mi) = crate::arith::rational::to_int_vec(&m) else {
            return Err(Error::NotNef(format!("vertex datum of cone {v} is not integral")));
        };
        vertex_of_cone.push(mi);
    }
    let mut vertices = vertex_of_cone.clone();
    vertices.sort();
    vertices.dedup();
    let mut faces: Vec<FibrationFace> = Vec::new();
    let mut face_of_cone = Vec::new();
    for f in p.faces() {
        let u: IVec = (0..n).map(|j| f.facets.iter().map(|&r| normals[r][j]).sum()).collect();
        let vals: Vec<Rat> = vertices.iter().map(|w| ri(crate::arith::rational::dot_ii(w, &u))).collect();
        let min = vals.iter().min().expect("nonempty").clone();
        let vs: Vec<usize> = (0..vertices.len()).filter(|&i| vals[i] == min).collect();
        let pts: Vec<RVec> = vs.iter().map(|&i| to_rat_vec(&vertices[i])).collect();
        let dim = affine_rank(&pts);
        let l = f.dim.checked_sub(dim).ok_or_else(|| Error::NotNef("face maps to a larger face".into()))?;
        let idx = match faces.iter().position(|g| g.vertices == vs) {
            Some(i) => i,
            None => {
                faces.push(FibrationFace { vertices: vs, dim, d: vec![0; n + 1] });
                faces.len() - 1
            }
        };
        faces[idx].d[l] += 1;
        face_of_cone.push(idx);
    }
    for f in &mut faces {
        while f.d.len() > 1 && f.d.last() == Some(&0) {
            f.d.pop();
        }
    }
    Ok(FibrationData { dim: n, normals, offsets: d_prime.to_vec(), vertices, faces, face_of_cone })
}

/// Lattice points of the coarsened polytope `P_{D'}` grouped by carrier face.
pub fn fibration_relint_points(data: &FibrationData) -> Vec<Vec<IVec>> {
    let n = data.dim;
    let mut out = vec![Vec::new(); data.faces.len()];
    let lo: IVec = (0..n).map(|j| data.vertices.iter().map(|v| v[j]).min().unwrap()).collect();
    let hi: IVec = (0..n).map(|j| data.vertices.iter().map(|v| v[j]).max().unwrap()).collect();
    let tight = |m: &IVec| -> Vec<usize> {
        (0..data.normals.len())
            .filter(|&r| (ri(crate::arith::rational::dot_ii(m, &data.normals[r])) + &data.offsets[r]).is_zero())
            .collect()
    };
    let mut m = lo.clone();
    loop {
        let mr = to_rat_vec(&m);
        let inside = (0..data.normals.len()).all(|r| !(dot_ri(&mr, &data.normals[r]) + &data.offsets[r]).is_negative());
        if inside {
            let act = tight(&m);
            let vs: Vec<usize> = (0..data.vertices.len())
                .filter(|&i| act.iter().all(|r| tight(&data.vertices[i]).contains(r)))
                .collect();
            if let Some(i) = data.faces.iter().position(|f| f.vertices == vs) {
                out[i].push(m.clone());
            }
        }
        let mut j = 0;
        loop {
            if j == n {
                return out;
            }
            m[j] += 1;
            if m[j] <= hi[j] {
                break;
            }
            m[j] = lo[j];
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicity_two() {
        assert_eq!(cone_multiplicity(&[vec![1, 0], vec![1, 2]], 2), BigInt::from(2));
        assert_eq!(cone_multiplicity(&[vec![0, 1], vec![-2, -1]], 2), BigInt::from(2));
        // a ray inside Z^3 that is primitive has multiplicity one
        assert_eq!(cone_multiplicity(&[vec![1, 1, 0]], 3), BigInt::one());
    }

    #[test]
    fn group_of_mult_two_cone() {
        let g = group_data(&[vec![1, 0], vec![1, 2]], 2).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.elements[1], vec![Rat::new(1.into(), 2.into()), Rat::new(1.into(), 2.into())]);
    }

    #[test]
    fn split_mult_four() {
        let pieces = unimodular_subdivide(&[vec![1, 0], vec![1, 4]], 2).unwrap();
        assert_eq!(pieces.len(), 4);
        for p in &pieces {
            assert_eq!(cone_multiplicity(p, 2), BigInt::one());
        }
    }

    #[test]
    fn half_open_single_wall() {
        let parent = vec![vec![1, 0], vec![1, 2]];
        let pieces = unimodular_subdivide(&parent, 2).unwrap();
        let ho = half_open_decomposition(&parent, &pieces, 2).unwrap();
        let removed: usize = ho.iter().map(|p| p.removed.iter().filter(|&&r| r).count()).sum();
        assert_eq!(removed, 1);
    }
}
