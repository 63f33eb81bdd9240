use latticetodd::arith::{ri, MPoly, Rat, YPoly};
use latticetodd::emops::*;
use latticetodd::polytope::{IVec, Polytope};
use latticetodd::Error;
use num_traits::Zero;

fn poly(dim: usize, pts: &[&[i64]]) -> Polytope {
    let v: Vec<IVec> = pts.iter().map(|p| p.to_vec()).collect();
    Polytope::from_vertices(dim, &v).unwrap()
}

fn rat(a: i64, b: i64) -> Rat {
    Rat::new(a.into(), b.into())
}

fn square() -> Polytope {
    poly(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
}

fn big_square() -> Polytope {
    poly(2, &[&[0, 0], &[2, 0], &[0, 2], &[2, 2]])
}

fn thin_triangle() -> Polytope {
    poly(2, &[&[0, 0], &[1, 0], &[0, 2]])
}

fn skew_triangle() -> Polytope {
    poly(2, &[&[0, 0], &[2, 1], &[1, 3]])
}

fn tetrahedron() -> Polytope {
    poly(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
}

fn cube() -> Polytope {
    poly(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]])
}

fn one(n: usize) -> MPoly<Rat> {
    MPoly::constant(n, ri(1))
}

/// `x0^2 x1 + 3 x1 - 2`, or its analogue in three variables.
fn cubic(n: usize) -> MPoly<Rat> {
    let mut f = MPoly::zero(n);
    let mut e = vec![0u32; n];
    e[0] = 2;
    e[1] = 1;
    f.add_term(e, ri(1));
    let mut e = vec![0u32; n];
    e[1] = 1;
    f.add_term(e, ri(3));
    f.add_term(vec![0; n], ri(-2));
    f
}

fn passes(p: &Polytope, f: &MPoly<Rat>, id: Identity, params: &Params) -> EMReport {
    let r = em_verify(p, f, &id, params).unwrap();
    assert!(r.passed, "{} failed: {} vs {}", r.identity, r.operator_side, r.lattice_side);
    r
}

#[test]
fn todd_on_unit_square_counts_four() {
    let r = passes(&square(), &one(2), Identity::Embv, &Params::exact());
    assert_eq!(r.operator_side, Value::Rational(ri(4)));
}

#[test]
fn dual_on_unit_square_counts_no_interior_point() {
    let r = passes(&square(), &one(2), Identity::Dual, &Params::exact());
    assert_eq!(r.operator_side, Value::Rational(ri(0)));
}

#[test]
fn unit_square_volume_polynomial_factors() {
    let p = square();
    let q = integral_h_polynomial(&p, &one(2), None).unwrap();
    // Opposite facets pair up into the two side lengths.
    let mut pairs = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let ni = &p.facets()[i].normal;
            let nj = &p.facets()[j].normal;
            if ni.iter().zip(nj).all(|(a, b)| a + b == 0) {
                pairs.push((i, j));
            }
        }
    }
    assert_eq!(pairs.len(), 2);
    let side = |(i, j): (usize, usize)| {
        let mut s = one(4);
        s = s.plus(&MPoly::var(4, i)).plus(&MPoly::var(4, j));
        s
    };
    assert_eq!(q, side(pairs[0]).times(&side(pairs[1])));
}

#[test]
fn dilation_polynomial_matches_direct_integration() {
    let p = skew_triangle();
    let f = cubic(2);
    let q = integral_h_polynomial(&p, &f, None).unwrap();
    let h = vec![rat(1, 7), rat(1, 5), rat(1, 9)];
    let direct = p.dilate(&h).unwrap().integrate_polynomial(&f);
    assert_eq!(q.eval(&h), direct);
}

#[test]
fn face_polynomials_satisfy_derivative_relation() {
    for p in [square(), thin_triangle(), skew_triangle(), tetrahedron()] {
        let polys = face_integral_h_polynomials(&p, &one(p.dim()), None).unwrap();
        assert!(face_derivative_relation_holds(&p, &polys).unwrap());
    }
}

#[test]
fn every_exact_identity_holds_on_delzant_inputs() {
    let cases = [(square(), one(2)), (big_square(), cubic(2)), (tetrahedron(), cubic(3))];
    for (p, f) in &cases {
        let r = p.num_facets();
        let mut ids = vec![Identity::Embv, Identity::Dual, Identity::Weighted, Identity::Pick, Identity::VertexSpecialization];
        ids.push(Identity::FacetsRemoved(vec![0]));
        ids.push(Identity::FacetsRemoved((0..r).collect()));
        ids.push(Identity::WeightedFacetsRemoved(vec![1]));
        for e in 0..p.faces().len() {
            ids.push(Identity::FaceClosed(e));
            ids.push(Identity::FaceRelint(e));
            ids.push(Identity::WeightedFace(e));
        }
        ids.push(Identity::Stokes(vec![1; p.dim()]));
        for id in ids {
            passes(p, f, id, &Params::exact());
        }
    }
}

#[test]
fn weighted_big_square_is_a_polynomial_in_y() {
    let r = passes(&big_square(), &one(2), Identity::Weighted, &Params::exact());
    let expected = &(&YPoly::constant(ri(4)) + &YPoly::one_plus_y_pow(1).scale(&ri(4))) + &YPoly::one_plus_y_pow(2);
    assert_eq!(r.lattice_side, Value::Polynomial(expected));
}

#[test]
fn sampled_y_and_renormalized_operator() {
    for y in [rat(0, 1), rat(1, 2), rat(-1, 3), ri(2)] {
        let params = Params::exact().with_y(y.clone());
        passes(&big_square(), &cubic(2), Identity::Weighted, &params);
        passes(&big_square(), &cubic(2), Identity::WeightedRenormalized, &params);
        passes(&tetrahedron(), &cubic(3), Identity::WeightedRenormalized, &params);
    }
}

#[test]
fn complex_backend_handles_non_delzant_polygons() {
    for p in [thin_triangle(), skew_triangle()] {
        assert!(!p.is_delzant());
        let f = cubic(2);
        let exact = em_verify(&p, &f, &Identity::Embv, &Params::exact());
        assert!(matches!(exact, Err(Error::NotDelzant)));
        for id in [Identity::Embv, Identity::Dual, Identity::FacetsRemoved(vec![0, 2]), Identity::FaceClosed(p.vertex_face(0))] {
            passes(&p, &f, id, &Params::complex());
        }
        for id in [Identity::Weighted, Identity::WeightedFace(p.facet_face(1)), Identity::WeightedRenormalized] {
            passes(&p, &f, id, &Params::complex().with_y(rat(1, 2)));
        }
    }
}

#[test]
fn guillemin_recovers_the_count_of_the_thin_triangle() {
    let r = passes(&thin_triangle(), &one(2), Identity::Guillemin, &Params::complex());
    let Value::Complex(c) = r.operator_side else { panic!() };
    assert!((c.re - 4.0).abs() < 1e-9 && c.im.abs() < 1e-9);
    passes(&skew_triangle(), &cubic(2), Identity::Guillemin, &Params::complex());
}

#[test]
fn minkowski_summand_of_a_square() {
    // D' with one offset set to zero collapses the square to a segment.
    let p = big_square();
    let mut d: Vec<Rat> = p.facets().iter().map(|h| h.offset.clone()).collect();
    passes(&p, &one(2), Identity::Minkowski(d.clone()), &Params::exact());
    let k = d.iter().position(|x| !x.is_zero()).unwrap();
    d[k] = ri(0);
    passes(&p, &cubic(2), Identity::Minkowski(d), &Params::exact());
}

#[test]
fn pick_coefficients_of_the_unit_square() {
    let p = square();
    let r: Vec<Rat> = pick_coefficients(&p).unwrap();
    for (e, face) in p.faces().iter().enumerate() {
        let expected = match face.dim {
            2 => ri(1),
            1 => rat(1, 2),
            _ => rat(1, 4),
        };
        assert_eq!(r[e], expected, "face {e}");
    }
    let signed: Rat = p
        .faces()
        .iter()
        .enumerate()
        .map(|(e, face)| {
            let s = if (2 - face.dim) % 2 == 0 { ri(1) } else { ri(-1) };
            s * &r[e] * p.volume(e)
        })
        .sum();
    assert_eq!(signed, ri(0));
}

#[test]
fn pick_coefficients_of_the_tetrahedron_sum_to_the_count() {
    let p = tetrahedron();
    let r: Vec<Rat> = pick_coefficients(&p).unwrap();
    let total: Rat = (0..p.faces().len()).map(|e| &r[e] * p.volume(e)).sum();
    assert_eq!(total, ri(4));
}

#[test]
fn order_too_low_is_reported() {
    let r = em_verify(&square(), &cubic(2), &Identity::Embv, &Params::exact().with_order(2));
    assert!(matches!(r, Err(Error::OrderExceeded { .. })));
}

#[test]
fn raising_the_order_does_not_change_the_answer() {
    let p = big_square();
    let f = cubic(2);
    let base = em_verify(&p, &f, &Identity::Embv, &Params::exact()).unwrap();
    for extra in 1..4 {
        let r = em_verify(&p, &f, &Identity::Embv, &Params::exact().with_order(5 + extra)).unwrap();
        assert_eq!(r.operator_side, base.operator_side);
    }
}

#[test]
fn cube_counts_eight() {
    let r = passes(&cube(), &one(3), Identity::Embv, &Params::exact());
    assert_eq!(r.operator_side, Value::Rational(ri(8)));
}

#[test]
fn local_identities_at_vertices() {
    let dir = [rat(-1, 1), rat(-1, 3)];
    for p in [square(), thin_triangle()] {
        for v in 0..p.vertices().len() {
            let fs = p.vertex_facets(v).to_vec();
            // Choose a direction with -z inside the vertex cone.
            let u0 = &p.facets()[fs[0]].normal;
            let u1 = &p.facets()[fs[1]].normal;
            let z: Vec<Rat> = (0..2).map(|i| -(ri(u0[i]) * &dir[0].abs_val() + ri(u1[i]) * &dir[1].abs_val())).collect();
            for kind in [LocalKind::Todd, LocalKind::Dual, LocalKind::FacetsRemoved(vec![fs[0]]), LocalKind::Weighted(rat(1, 2))] {
                let r = local_em_verify(&p, v, &kind, &z, &rat(1, 2), 1e-8).unwrap();
                assert!(r.passed, "{}: {} vs {}", r.identity, r.operator_side, r.lattice_side);
            }
        }
    }
}

trait AbsVal {
    fn abs_val(&self) -> Rat;
}

impl AbsVal for Rat {
    fn abs_val(&self) -> Rat {
        num_traits::Signed::abs(self)
    }
}

#[test]
fn local_identity_rejects_a_direction_outside_the_cone() {
    let p = square();
    let v = 0;
    let fs = p.vertex_facets(v).to_vec();
    let z: Vec<Rat> = p.facets()[fs[0]].normal.iter().map(|&x| ri(x)).collect();
    assert!(local_em_verify(&p, v, &LocalKind::Todd, &z, &ri(1), 1e-8).is_err());
}
