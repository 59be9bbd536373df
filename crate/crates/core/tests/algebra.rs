use graphqec::channel::{decoder, encoder, QChannel};
use graphqec::ffield::{FMat, FVec, Field};
use graphqec::graph::{check_admissible, check_t_error_correcting, search_graph, SearchParams};
use graphqec::phase::{chi, epsilon, tau, PhaseVec, C64};
use graphqec::qspace::{embed, weyl, CMatrix};
use graphqec::scheme::{verify_kl, Scheme};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn field(d: u32) -> Field {
    Field::new(d).unwrap()
}

fn random_vec(f: Field, n: usize, rng: &mut ChaCha8Rng) -> FVec {
    FVec::new(f, (0..n).map(|_| rng.gen_range(0..f.order())).collect())
}

fn random_phase(f: Field, n: usize, rng: &mut ChaCha8Rng) -> PhaseVec {
    PhaseVec::new(random_vec(f, n, rng), random_vec(f, n, rng)).unwrap()
}

fn random_graph(f: Field, n: usize, rng: &mut ChaCha8Rng) -> FMat {
    let mut m = FMat::zeros(f, n, n);
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(0..f.order());
            m.set(i, j, w);
            m.set(j, i, w);
        }
    }
    m
}

fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// `w(ξ1) w(ξ2) = conj χ(p2, q1) w(ξ1 + ξ2)`.
fn ccr_deviation(a: &PhaseVec, b: &PhaseVec) -> f64 {
    let lhs = weyl(a).mul(&weyl(b));
    let phase = chi(&b.p, &a.q).unwrap().conj();
    lhs.distance(&weyl(&a.add(b).unwrap()).scale(phase))
}

#[test]
fn ccr_exhaustive_d2() {
    let f = field(2);
    for n in 1..=2 {
        for a in PhaseVec::all(f, n) {
            for b in PhaseVec::all(f, n) {
                assert!(ccr_deviation(&a, &b) < TOL);
                let comm = weyl(&a).mul(&weyl(&b)).mul(&weyl(&a).adjoint());
                let e = epsilon(f, a.commutation_exponent(&b).unwrap());
                assert!(comm.distance(&weyl(&b).scale(e)) < TOL);
            }
        }
    }
}

#[test]
fn ccr_random_d3_d5() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [3, 5] {
        let f = field(d);
        for _ in 0..500 {
            let n = rng.gen_range(1..=2);
            let (a, b) = (random_phase(f, n, &mut rng), random_phase(f, n, &mut rng));
            assert!(ccr_deviation(&a, &b) < TOL);
        }
    }
}

#[test]
fn weyl_operators_are_trace_orthogonal() {
    for (d, n) in [(2, 2), (3, 1), (3, 2), (5, 1)] {
        let f = field(d);
        let dim = f.space_size(n) as f64;
        let all: Vec<PhaseVec> = PhaseVec::all(f, n).collect();
        for a in &all {
            for b in &all {
                let ip = weyl(a).inner(&weyl(b));
                let expected = if a == b { dim } else { 0.0 };
                assert!((ip - C64::new(expected, 0.0)).norm() < TOL);
            }
        }
    }
}

#[test]
fn tau_cocycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in [2, 3, 5] {
        let f = field(d);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=5);
            let lambda = random_graph(f, n, &mut rng);
            let (q, r) = (random_vec(f, n, &mut rng), random_vec(f, n, &mut rng));
            let lhs = tau(&lambda, &q.add(&r).unwrap()).unwrap();
            let cross = chi(&lambda.mul_vec(&q).unwrap(), &r).unwrap();
            let rhs = tau(&lambda, &q).unwrap() * tau(&lambda, &r).unwrap() * cross;
            assert!((lhs - rhs).norm() < TOL);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(seed in any::<u64>(), d in prop::sample::select(vec![2u32, 3, 5, 7]), rows in 1usize..6, cols in 1usize..6) {
        let f = field(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows_data: Vec<Vec<u32>> = (0..rows).map(|_| random_vec(f, cols, &mut rng).entries().to_vec()).collect();
        let m = FMat::from_rows(f, &rows_data).unwrap();
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for k in &kernel {
            prop_assert!(m.mul_vec(k).unwrap().is_zero());
        }
        if rows == cols {
            if let Ok(inv) = m.inverse() {
                prop_assert_eq!(inv.mul(&m).unwrap(), FMat::identity(f, rows));
            } else {
                prop_assert!(m.rank() < rows);
            }
        }
        let x = random_vec(f, cols, &mut rng);
        let b = m.mul_vec(&x).unwrap();
        let y = m.solve(&b).unwrap().expect("consistent");
        prop_assert_eq!(m.mul_vec(&y).unwrap(), b);
    }

    #[test]
    fn embed_preserves_products(seed in any::<u64>()) {
        let f = field(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ambient = [0usize, 2, 5];
        let skip = rng.gen_range(0..3);
        let sites: Vec<usize> = (0..3).filter(|&k| k != skip).map(|k| ambient[k]).collect();
        let a = random_matrix(9, &mut rng);
        let b = random_matrix(9, &mut rng);
        let lhs = embed(f, &a, &sites, &ambient).unwrap().mul(&embed(f, &b, &sites, &ambient).unwrap());
        let rhs = embed(f, &a.mul(&b), &sites, &ambient).unwrap();
        prop_assert!(lhs.distance(&rhs) < TOL);
    }

    #[test]
    fn heisenberg_is_adjoint(seed in any::<u64>()) {
        let f = field(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kraus: Vec<CMatrix> = (0..3).map(|_| random_matrix(4, &mut rng)).collect();
        let ch = QChannel::new(f, 2, 2, kraus).unwrap();
        let (a, rho) = (random_matrix(4, &mut rng), random_matrix(4, &mut rng));
        let lhs = a.inner(&ch.apply(&rho));
        let rhs = ch.apply_heisenberg(&a).inner(&rho);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let f = field(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ch = || QChannel::new(f, 1, 1, (0..2).map(|_| random_matrix(3, &mut rng)).collect()).unwrap();
        let (a, b, c) = (ch(), ch(), ch());
        let rho = random_matrix(3, &mut rng);
        let left = a.then(&b).unwrap().then(&c).unwrap().apply(&rho);
        let right = a.then(&b.then(&c).unwrap()).unwrap().apply(&rho);
        prop_assert!(left.distance(&right) < 1e-9 * (1.0 + left.frobenius_norm()));
    }
}

fn scheme(d: u32) -> Scheme {
    let out = search_graph(&SearchParams {
        field: field(d),
        n_inputs: 1,
        n_outputs: 5,
        t: 1,
        seed: 7,
        budget: 200_000,
    });
    Scheme::build(out.graph.unwrap(), 1).unwrap()
}

#[test]
fn decoder_is_a_heisenberg_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in [2, 3] {
        let s = scheme(d);
        let (e, dec) = (encoder(&s), decoder(&s));
        let dim = s.dim_inputs();
        for _ in 0..5 {
            let (a, b) = (random_matrix(dim, &mut rng), random_matrix(dim, &mut rng));
            let lhs = dec.apply_heisenberg(&a).mul(&dec.apply_heisenberg(&b));
            let rhs = dec.apply_heisenberg(&a.mul(&b));
            assert!(lhs.distance(&rhs) < TOL);
            let roundtrip = e.then(&dec).unwrap().apply(&a);
            assert!(roundtrip.distance(&a) < TOL);
        }
    }
}

#[test]
fn relabelling_preserves_certification() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for d in [2, 3] {
        let g = scheme(d).graph().clone();
        for _ in 0..4 {
            let mut perm_j: Vec<usize> = (0..g.n_outputs()).collect();
            perm_j.shuffle(&mut rng);
            let mut perm_l: Vec<usize> = (0..g.n_syndromes()).collect();
            perm_l.shuffle(&mut rng);
            let h = g.permuted(&[0], &perm_j, &perm_l);
            assert!(check_admissible(&h).ok);
            assert!(check_t_error_correcting(&h, 1).ok);
            assert!(verify_kl(&h, 1).unwrap() < TOL);
        }
    }
}

#[test]
fn channel_distance_agrees_with_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let f = field(3);
    let mut ch = |k: usize| {
        QChannel::new(
            f,
            2,
            1,
            (0..k)
                .map(|_| {
                    CMatrix::from_fn(3, 9, |_, _| {
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                })
                .collect(),
        )
        .unwrap()
    };
    let (a, b) = (ch(2), ch(3));
    let direct = PhaseVec::all(f, 2)
        .map(|xi| {
            let w = weyl(&xi);
            a.apply(&w).distance(&b.apply(&w)) / 3.0
        })
        .fold(0.0, f64::max);
    let fast = graphqec::channel::channel_distance(&a, &b)
        .unwrap()
        .weyl_max;
    assert!((direct - fast).abs() < 1e-9 * (1.0 + direct));
}
