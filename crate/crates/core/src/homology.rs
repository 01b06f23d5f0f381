//! Boundary operators, combinatorial Laplacians, Betti numbers and ranks of
//! maps induced by inclusions of complexes.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::complexes::SimplicialComplex;
use crate::error::Result;
use crate::linalg::{null_space, rank, ColumnReducer, Field, FieldMatrix, Fp, SparseVec};

/// Which field the exact computations run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    /// ℚ with arbitrary-precision integers.
    #[default]
    Rational,
    /// ℤ/p, p = 2³¹ − 1. Ranks only.
    Prime,
}

/// `∂ₖ : Cₖ → Cₖ₋₁` as an `n_{k−1} × n_k` matrix in the complex's list
/// order. Dropping vertex `j` of an ascending tuple contributes `(−1)ʲ`.
/// `∂₀` is `0 × n₀`; above `k_max` the matrix has no columns.
pub fn boundary_matrix<F: Field>(c: &SimplicialComplex, k: usize) -> FieldMatrix<F> {
    if k == 0 {
        return FieldMatrix::zeros(0, c.count(0));
    }
    let rows = c.count(k - 1);
    if k > c.k_max() {
        return FieldMatrix::zeros(rows, 0);
    }
    let faces = c.simplices(k - 1).positions();
    let mut face = Vec::with_capacity(k);
    let columns = c
        .simplices(k)
        .iter()
        .map(|s| {
            let mut col: SparseVec<F> = (0..=k)
                .map(|drop| {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != drop)
                            .map(|(_, &v)| v),
                    );
                    let sign = if drop % 2 == 0 {
                        F::one()
                    } else {
                        F::one().neg()
                    };
                    (faces[face.as_slice()] as u32, sign)
                })
                .collect();
            col.sort_by_key(|(i, _)| *i);
            col
        })
        .collect();
    FieldMatrix::from_sorted_columns(rows, columns)
}

/// `Lₖ = ∂ₖ₊₁∂ₖ₊₁ᵀ + ∂ₖᵀ∂ₖ`.
pub fn laplacian<F: Field>(c: &SimplicialComplex, k: usize) -> FieldMatrix<F> {
    let up: FieldMatrix<F> = boundary_matrix(c, k + 1);
    let down: FieldMatrix<F> = boundary_matrix(c, k);
    let a = up.mul(&up.transpose()).expect("shapes agree");
    let b = down.transpose().mul(&down).expect("shapes agree");
    a.add(&b).expect("shapes agree")
}

fn boundary_rank(c: &SimplicialComplex, k: usize, arith: Arithmetic) -> usize {
    match arith {
        Arithmetic::Rational => rank(&boundary_matrix::<BigRational>(c, k)),
        Arithmetic::Prime => rank(&boundary_matrix::<Fp>(c, k)),
    }
}

/// `βₖ = nₖ − rank ∂ₖ − rank ∂ₖ₊₁` (with `∂_{k_max+1} = 0`).
pub fn betti(c: &SimplicialComplex, k: usize, arith: Arithmetic) -> usize {
    c.count(k) - boundary_rank(c, k, arith) - boundary_rank(c, k + 1, arith)
}

/// `βₖ` as `dim ker Lₖ` over ℚ.
pub fn betti_laplacian(c: &SimplicialComplex, k: usize) -> usize {
    let l = laplacian::<BigRational>(c, k);
    l.cols() - rank(&l)
}

/// Rank of `Hₖ(c1) → Hₖ(c2)` induced by inclusion, where `c1` is stored as a
/// prefix of `c2`.
///
/// Over ℚ, a basis of `ker Lₖ` of `c1` (harmonic representatives of
/// `Hₖ(c1)`) is zero-padded into the chains of `c2` and appended to
/// `∂ₖ₊₁` of `c2`; the rank increase is the answer. Over ℤ/p the cycle space
/// `ker ∂ₖ` of `c1` stands in for the harmonic basis: it differs from it only
/// by boundaries of `c1`, which already lie in the column span of `∂ₖ₊₁`.
pub fn image_rank(
    c1: &SimplicialComplex,
    c2: &SimplicialComplex,
    k: usize,
    arith: Arithmetic,
) -> Result<usize> {
    c1.check_prefix_of(c2)?;
    Ok(match arith {
        Arithmetic::Rational => {
            let l1 = laplacian::<BigRational>(c1, k);
            appended_rank_increase(&boundary_matrix(c2, k + 1), null_space(&l1))
        }
        Arithmetic::Prime => {
            let d1 = boundary_matrix::<Fp>(c1, k);
            appended_rank_increase(&boundary_matrix(c2, k + 1), null_space(&d1))
        }
    })
}

/// `rank[a | extra] − rank a`.
fn appended_rank_increase<F: Field>(a: &FieldMatrix<F>, extra: Vec<SparseVec<F>>) -> usize {
    let mut red = ColumnReducer::new();
    for j in 0..a.cols() {
        red.push(a.column(j).to_vec());
    }
    let base = red.rank();
    for v in extra {
        red.push(v);
    }
    red.rank() - base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{build_filtered_rips, build_rips, DEFAULT_BUDGET};
    use crate::geometry::PointCloud;
    use crate::linalg::{kernel_basis, primitive};
    use proptest::prelude::*;

    type Q = BigRational;

    fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal(3, 1, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn tetra_boundary() -> SimplicialComplex {
        SimplicialComplex::from_maximal(
            4,
            2,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap()
    }

    fn hollow_square() -> SimplicialComplex {
        SimplicialComplex::from_lists(
            4,
            &[
                vec![vec![0], vec![1], vec![2], vec![3]],
                vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3]],
                vec![],
            ],
        )
        .unwrap()
    }

    fn filled_square() -> SimplicialComplex {
        SimplicialComplex::from_lists(
            4,
            &[
                vec![vec![0], vec![1], vec![2], vec![3]],
                vec![vec![0, 1], vec![0, 3], vec![1, 2], vec![2, 3], vec![0, 2]],
                vec![vec![0, 1, 2], vec![0, 2, 3]],
            ],
        )
        .unwrap()
    }

    fn int(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn boundary_examples() {
        let edge = SimplicialComplex::from_maximal(2, 1, &[vec![0, 1]]).unwrap();
        let d1 = boundary_matrix::<Q>(&edge, 1);
        assert_eq!(d1.to_dense(), vec![vec![int(-1)], vec![int(1)]]);

        let tri = SimplicialComplex::from_maximal(3, 2, &[vec![0, 1, 2]]).unwrap();
        // edges in tuple order: [0,1], [0,2], [1,2]
        let d2 = boundary_matrix::<Q>(&tri, 2);
        assert_eq!(
            d2.to_dense(),
            vec![vec![int(1)], vec![int(-1)], vec![int(1)]]
        );

        let d0 = boundary_matrix::<Q>(&tri, 0);
        assert_eq!((d0.rows(), d0.cols()), (0, 3));
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let c = tetra_boundary();
        for k in 1..=2 {
            let prod = boundary_matrix::<Q>(&c, k)
                .mul(&boundary_matrix(&c, k + 1))
                .unwrap();
            assert!(prod.is_zero());
        }
    }

    #[test]
    fn rank_of_square_boundary() {
        assert_eq!(rank(&boundary_matrix::<Q>(&hollow_square(), 1)), 3);
    }

    #[test]
    fn laplacian_examples() {
        let point = SimplicialComplex::from_maximal(1, 0, &[vec![0]]).unwrap();
        assert_eq!(laplacian::<Q>(&point, 0).to_dense(), vec![vec![int(0)]]);

        let edge = SimplicialComplex::from_maximal(2, 1, &[vec![0, 1]]).unwrap();
        assert_eq!(
            laplacian::<Q>(&edge, 0).to_dense(),
            vec![vec![int(1), int(-1)], vec![int(-1), int(1)]]
        );

        let l1 = laplacian::<Q>(&hollow_triangle(), 1);
        assert_eq!(l1, l1.transpose());
        let ker = kernel_basis(&l1).unwrap();
        assert_eq!(ker.len(), 1);
        // edges [0,1], [0,2], [1,2]: the cycle 0→1→2→0 is e01 − e02 + e12
        let p = primitive(&ker[0]);
        let signs: Vec<i64> = p
            .iter()
            .map(|(_, x)| i64::try_from(x.clone()).unwrap())
            .collect();
        assert_eq!(signs, vec![1, -1, 1]);
    }

    #[test]
    fn betti_examples() {
        for arith in [Arithmetic::Rational, Arithmetic::Prime] {
            let t = hollow_triangle();
            assert_eq!((betti(&t, 0, arith), betti(&t, 1, arith)), (1, 1));
            let s = tetra_boundary();
            assert_eq!(
                (
                    betti(&s, 0, arith),
                    betti(&s, 1, arith),
                    betti(&s, 2, arith)
                ),
                (1, 0, 1)
            );
            let two = SimplicialComplex::from_maximal(2, 0, &[vec![0], vec![1]]).unwrap();
            assert_eq!(betti(&two, 0, arith), 2);
        }
        let s = tetra_boundary();
        for k in 0..=2 {
            assert_eq!(betti_laplacian(&s, k), betti(&s, k, Arithmetic::Rational));
        }
    }

    #[test]
    fn image_rank_examples() {
        for arith in [Arithmetic::Rational, Arithmetic::Prime] {
            let s = tetra_boundary();
            for k in 0..=2 {
                assert_eq!(image_rank(&s, &s, k, arith).unwrap(), betti(&s, k, arith));
            }
            assert_eq!(
                image_rank(&hollow_square(), &filled_square(), 1, arith).unwrap(),
                0
            );
            assert_eq!(
                image_rank(&hollow_square(), &filled_square(), 0, arith).unwrap(),
                1
            );

            let two = SimplicialComplex::from_lists(2, &[vec![vec![0], vec![1]], vec![]]).unwrap();
            let joined =
                SimplicialComplex::from_lists(2, &[vec![vec![0], vec![1]], vec![vec![0, 1]]])
                    .unwrap();
            assert_eq!(image_rank(&two, &joined, 0, arith).unwrap(), 1);
            assert!(image_rank(&joined, &two, 0, arith).is_err());
        }
    }

    fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec(0.0f64..1.0, 6..40).prop_map(|mut v| {
            v.truncate(v.len() / 2 * 2);
            PointCloud::new(2, v).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rips_boundaries_compose_to_zero(pts in cloud_strategy(), r in 0.05f64..0.3) {
            let c = build_rips(&pts, r, 3, DEFAULT_BUDGET).unwrap();
            for k in 1..=2 {
                let prod = boundary_matrix::<Fp>(&c, k).mul(&boundary_matrix(&c, k + 1)).unwrap();
                prop_assert!(prod.is_zero());
            }
        }

        #[test]
        fn rank_nullity_matches_laplacian(pts in cloud_strategy(), r in 0.05f64..0.3) {
            let c = build_rips(&pts, r, 2, DEFAULT_BUDGET).unwrap();
            prop_assume!(c.total() < 400);
            for k in 0..=1 {
                let b = betti(&c, k, Arithmetic::Rational);
                prop_assert_eq!(b, betti_laplacian(&c, k));
                prop_assert_eq!(b, betti(&c, k, Arithmetic::Prime));
            }
        }

        #[test]
        fn image_ranks_are_bounded_and_functorial(
            pts in cloud_strategy(),
            vals in prop::collection::vec(0.0f64..1.0, 20),
            r in 0.08f64..0.25,
        ) {
            let values: Vec<Option<f64>> = (0..pts.len()).map(|i| Some(vals[i % vals.len()])).collect();
            let fc = build_filtered_rips(&pts, &values, &[0.7, 0.4, 0.0], r, 2, DEFAULT_BUDGET).unwrap();
            prop_assume!(fc.complex().total() < 300);
            let cs: Vec<SimplicialComplex> = (0..3).map(|i| fc.sublevel(i)).collect();
            for k in 0..=1 {
                let rk = |a: usize, b: usize| image_rank(&cs[a], &cs[b], k, Arithmetic::Rational).unwrap();
                for a in 0..3 {
                    for b in a..3 {
                        let v = rk(a, b);
                        let bound = betti(&cs[a], k, Arithmetic::Rational).min(betti(&cs[b], k, Arithmetic::Rational));
                        prop_assert!(v <= bound);
                        prop_assert_eq!(v, image_rank(&cs[a], &cs[b], k, Arithmetic::Prime).unwrap());
                    }
                }
                prop_assert!(rk(0, 2) <= rk(0, 1).min(rk(1, 2)));
            }
        }
    }
}
