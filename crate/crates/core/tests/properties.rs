use latticetodd::arith::interpolate::interpolate_simplex_grid;
use latticetodd::arith::matrix::{inverse, mat_vec};
use latticetodd::arith::{rat, ri, smith_normal_form, IntMatrix, MPoly, Rat};
use latticetodd::brion::{brion_count, weighted_brion};
use latticetodd::emops::{em_verify, Identity, Params};
use latticetodd::fan::{half_open_decomposition, unimodular_subdivide};
use latticetodd::oracle;
use latticetodd::polytope::{IVec, Polytope};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..4, 1usize..4).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-6i64..7, n), m))
}

fn lattice_triangle() -> impl Strategy<Value = Vec<IVec>> {
    prop::collection::vec(prop::collection::vec(-3i64..4, 2), 3).prop_filter("nondegenerate", |v| {
        (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) != (v[1][1] - v[0][1]) * (v[2][0] - v[0][0])
    })
}

fn in_piece(coords: &[Rat], removed: &[bool]) -> bool {
    coords.iter().zip(removed).all(|(c, r)| if *r { c.is_positive() } else { !c.is_negative() })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_is_a_diagonal_factorization(rows in small_matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        for i in 0..a.rows {
            for j in 0..a.cols {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        let inv = |m: &IntMatrix| inverse(&m.to_rat()).is_ok();
        prop_assert!(inv(&s.u) && inv(&s.v));
    }

    #[test]
    fn simplex_grid_interpolation_recovers_polynomials(
        coeffs in prop::collection::vec(-9i64..10, 10),
        step_exp in 0u32..3,
    ) {
        let grid = latticetodd::arith::mpoly::monomials_up_to(2, 3);
        let mut f = MPoly::zero(2);
        for (e, c) in grid.iter().zip(&coeffs) {
            f.add_term(e.clone(), ri(*c));
        }
        let step = rat(1, 1 << step_exp);
        let g = interpolate_simplex_grid(2, 3, &step, |h| Ok(f.eval(h))).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn half_open_pieces_partition_the_cone(a in 1i64..5, b in 1i64..6) {
        let parent: Vec<IVec> = vec![vec![1, 0], vec![a, b]];
        let pieces = unimodular_subdivide(&parent, 2).unwrap();
        let half_open = half_open_decomposition(&parent, &pieces, 2).unwrap();
        let invs: Vec<_> = half_open
            .iter()
            .map(|p| {
                let cols: Vec<Vec<Rat>> = (0..2).map(|i| p.generators.iter().map(|g| ri(g[i])).collect()).collect();
                inverse(&cols).unwrap()
            })
            .collect();
        let parent_inv = {
            let cols: Vec<Vec<Rat>> = (0..2).map(|i| parent.iter().map(|g| ri(g[i])).collect()).collect();
            inverse(&cols).unwrap()
        };
        for x in -2..=8i64 {
            for y in -2..=8i64 {
                let m = [ri(x), ri(y)];
                let inside = mat_vec(&parent_inv, &m).iter().all(|c| !c.is_negative());
                let hits = half_open
                    .iter()
                    .zip(&invs)
                    .filter(|(p, inv)| in_piece(&mat_vec(inv, &m), &p.removed))
                    .count();
                prop_assert_eq!(hits, usize::from(inside), "point ({}, {})", x, y);
            }
        }
    }

    #[test]
    fn brion_count_matches_scan_on_triangles(v in lattice_triangle(), seed in 0u64..4) {
        let p = Polytope::from_vertices(2, &v).unwrap();
        let scan = ri(oracle::count(&p).unwrap() as i64);
        prop_assert_eq!(brion_count(&p, seed).unwrap(), scan);
        let w = weighted_brion(&p, seed).unwrap();
        prop_assert_eq!(w, oracle::weighted_face_sum(&p, &MPoly::constant(2, ri(1))).unwrap());
    }

    #[test]
    fn euler_maclaurin_holds_on_boxes(a in 1i64..4, b in 1i64..4, i in 0u32..3, j in 0u32..3) {
        let v: Vec<IVec> = vec![vec![0, 0], vec![a, 0], vec![0, b], vec![a, b]];
        let p = Polytope::from_vertices(2, &v).unwrap();
        let f = MPoly::monomial(vec![i, j], ri(1));
        for id in [Identity::Embv, Identity::Dual, Identity::Weighted] {
            let r = em_verify(&p, &f, &id, &Params::exact()).unwrap();
            prop_assert!(r.passed, "{}: {} vs {}", r.identity, r.operator_side, r.lattice_side);
        }
        let power_sum = |n: i64, k: u32| -> BigInt { (0..=n).map(|x| BigInt::from(x).pow(k)).sum() };
        let lattice = oracle::sum_f(&oracle::points(&p).unwrap(), &f);
        prop_assert_eq!(lattice, Rat::from_integer(power_sum(a, i) * power_sum(b, j)));
    }
}
