//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Reference values are computed by the
//! dense oracles below, which share no code with the library beyond its
//! number types.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use graphqec::channel::{
    channel_distance, decoder, noise_from_matrix, random_noise, verify_theorem1,
    weyl_diagonal_noise, QChannel,
};
use graphqec::ffield::{FMat, FVec, Field};
use graphqec::graph::{check_t_error_correcting, search_graph, CodingGraph, SearchParams};
use graphqec::memory::{semigroup_channel, simulate_memory, DecoherenceModel};
use graphqec::oneway::{
    ablation_deviations, verify_cor_decode, verify_cor_encode, verify_thm_measure,
    verify_thm_syndrome,
};
use graphqec::phase::{chi, tau, PhaseVec, C64};
use graphqec::qspace::{weyl, CMatrix};
use graphqec::scheme::{
    id1_deviation, id2_deviation, id3_deviation, stabilizer_eigen_check, verify_kl, Scheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Clone)]
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Dense {
    fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n, n);
        for k in 0..n {
            m.data[k * n + k] = C64::new(1.0, 0.0);
        }
        m
    }

    fn at(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    fn from_lib(m: &CMatrix) -> Self {
        let mut out = Dense::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.data[r * m.cols() + c] = m[(r, c)];
            }
        }
        out
    }

    fn mul(&self, o: &Dense) -> Dense {
        assert_eq!(self.cols, o.rows);
        let mut out = Dense::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..o.cols {
                    out.data[r * o.cols + c] += a * o.at(k, c);
                }
            }
        }
        out
    }

    fn adjoint(&self) -> Dense {
        let mut out = Dense::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.at(r, c).conj();
            }
        }
        out
    }

    fn scale(&self, s: C64) -> Dense {
        Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    fn add(&self, o: &Dense) -> Dense {
        Dense {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    fn dist(&self, o: &Dense) -> f64 {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn trace(&self) -> C64 {
        (0..self.rows).map(|k| self.at(k, k)).sum()
    }
}

fn eps(d: u32, x: u64) -> C64 {
    let x = x % d as u64;
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * x as f64 / d as f64)
}

fn digits(d: u32, n: usize, mut index: usize) -> Vec<u32> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = (index % d as usize) as u32;
        index /= d as usize;
    }
    out
}

fn index_of(d: u32, v: &[u32]) -> usize {
    v.iter().fold(0, |acc, &x| acc * d as usize + x as usize)
}

fn all_vectors(d: u32, n: usize) -> Vec<Vec<u32>> {
    (0..(d as usize).pow(n as u32))
        .map(|k| digits(d, n, k))
        .collect()
}

fn dot(d: u32, a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x as u64 * y as u64)
        .sum::<u64>()
        % d as u64
}

/// `w(p, q)` with row `a` holding `χ(p, a)` in column `a − q`.
fn o_weyl(d: u32, p: &[u32], q: &[u32]) -> Dense {
    let n = p.len();
    let dim = (d as usize).pow(n as u32);
    let mut m = Dense::zeros(dim, dim);
    for a in 0..dim {
        let av = digits(d, n, a);
        let b: Vec<u32> = av.iter().zip(q).map(|(&x, &y)| (x + d - y) % d).collect();
        m.data[a * dim + index_of(d, &b)] = eps(d, dot(d, p, &av));
    }
    m
}

fn o_z(d: u32, p: &[u32]) -> Dense {
    o_weyl(d, p, &vec![0; p.len()])
}

/// `Σ_{k<l} Λ_kl q_k q_l`.
fn o_tau(d: u32, lambda: &[Vec<u32>], q: &[u32]) -> u64 {
    let mut acc = 0u64;
    for k in 0..q.len() {
        for l in k + 1..q.len() {
            acc += lambda[k][l] as u64 * q[k] as u64 * q[l] as u64;
        }
    }
    acc % d as u64
}

fn mat_vec(d: u32, lambda: &[Vec<u32>], rows: &[usize], cols: &[usize], v: &[u32]) -> Vec<u32> {
    rows.iter()
        .map(|&r| {
            (cols
                .iter()
                .zip(v)
                .map(|(&c, &x)| lambda[r][c] as u64 * x as u64)
                .sum::<u64>()
                % d as u64) as u32
        })
        .collect()
}

fn neg(d: u32, v: &[u32]) -> Vec<u32> {
    v.iter().map(|&x| (d - x) % d).collect()
}

fn sub(d: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(&x, &y)| (x + d - y) % d).collect()
}

/// Graph with `I, J, L` vertex order held as a plain weight table.
struct OGraph {
    d: u32,
    ni: usize,
    nj: usize,
    nl: usize,
    lambda: Vec<Vec<u32>>,
}

impl OGraph {
    fn from_lib(g: &CodingGraph) -> Self {
        let n = g.n_vertices();
        let lambda = (0..n)
            .map(|r| (0..n).map(|c| g.lambda().get(r, c)).collect())
            .collect();
        OGraph {
            d: g.field().order(),
            ni: g.n_inputs(),
            nj: g.n_outputs(),
            nl: g.n_syndromes(),
            lambda,
        }
    }

    fn i(&self) -> Vec<usize> {
        (0..self.ni).collect()
    }

    fn j(&self) -> Vec<usize> {
        (self.ni..self.ni + self.nj).collect()
    }

    fn l(&self) -> Vec<usize> {
        (self.ni + self.nj..self.ni + self.nj + self.nl).collect()
    }

    fn join(&self, qi: &[u32], qj: &[u32], ql: &[u32]) -> Vec<u32> {
        qi.iter().chain(qj).chain(ql).copied().collect()
    }

    /// `v[q^J, q^I] = d^{-|J|/2} ε(τ(q^I, q^J, q^L))`.
    fn iso(&self, ql: &[u32]) -> Dense {
        let d = self.d;
        let ins = all_vectors(d, self.ni);
        let outs = all_vectors(d, self.nj);
        let norm = (d as f64).powi(self.nj as i32).sqrt().recip();
        let mut m = Dense::zeros(outs.len(), ins.len());
        for (r, qj) in outs.iter().enumerate() {
            for (c, qi) in ins.iter().enumerate() {
                let t = o_tau(d, &self.lambda, &self.join(qi, qj, ql));
                m.data[r * ins.len() + c] = eps(d, t) * norm;
            }
        }
        m
    }
}

fn lib_phase(f: Field, p: &[u32], q: &[u32]) -> PhaseVec {
    PhaseVec::new(FVec::new(f, p.to_vec()), FVec::new(f, q.to_vec())).unwrap()
}

struct Tally {
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            worst: 0.0,
            cases: 0,
        }
    }

    fn add(&mut self, dev: f64) {
        self.cases += 1;
        if dev.is_nan() {
            self.worst = f64::INFINITY;
        } else {
            self.worst = self.worst.max(dev);
        }
    }
}

fn ccr_case(t: &mut Tally, f: Field, a: (&[u32], &[u32]), b: (&[u32], &[u32])) {
    let d = f.order();
    let (wa, wb) = (o_weyl(d, a.0, a.1), o_weyl(d, b.0, b.1));
    let sum_p: Vec<u32> = a.0.iter().zip(b.0).map(|(x, y)| (x + y) % d).collect();
    let sum_q: Vec<u32> = a.1.iter().zip(b.1).map(|(x, y)| (x + y) % d).collect();
    let phase = eps(d, dot(d, b.0, a.1)).conj();
    t.add(wa.mul(&wb).dist(&o_weyl(d, &sum_p, &sum_q).scale(phase)));
    let (la, lb) = (lib_phase(f, a.0, a.1), lib_phase(f, b.0, b.1));
    t.add(Dense::from_lib(&weyl(&la)).dist(&wa));
    let lhs = Dense::from_lib(&weyl(&la).mul(&weyl(&lb)));
    let lib_phase_ab = chi(&lb.p, &la.q).unwrap().conj();
    t.add(lhs.dist(&Dense::from_lib(&weyl(&la.add(&lb).unwrap())).scale(lib_phase_ab)));
}

fn cocycle_case(t: &mut Tally, f: Field, lambda: &[Vec<u32>], q: &[u32], r: &[u32]) {
    let d = f.order();
    let n = q.len();
    let all: Vec<usize> = (0..n).collect();
    let sum: Vec<u32> = q.iter().zip(r).map(|(x, y)| (x + y) % d).collect();
    let lq = mat_vec(d, lambda, &all, &all, q);
    let expect = eps(
        d,
        o_tau(d, lambda, q) + o_tau(d, lambda, r) + dot(d, &lq, r),
    );
    t.add((eps(d, o_tau(d, lambda, &sum)) - expect).norm());
    let lm = FMat::from_rows(f, lambda).unwrap();
    let lib = tau(&lm, &FVec::new(f, sum)).unwrap();
    t.add((lib - expect).norm());
}

/// Isometry, completeness, stabilizer eigenvectors and the three
/// identities for one graph; exhaustive when `rng` is `None`, otherwise
/// `samples` random points.
fn graph_case(t: &mut Tally, g: &CodingGraph, rng: Option<(&mut ChaCha8Rng, usize)>) {
    let f = g.field();
    let d = f.order();
    let o = OGraph::from_lib(g);
    let s = Scheme::build(g.clone(), 0).expect("admissible");
    let (i, j, l) = (o.i(), o.j(), o.l());
    let syndromes = all_vectors(d, o.nl);
    let dj = (d as usize).pow(o.nj as u32);
    let di = (d as usize).pow(o.ni as u32);
    let mut completeness = Dense::zeros(dj, dj);
    for ql in &syndromes {
        let v = o.iso(ql);
        t.add(v.dist(&Dense::from_lib(s.isometry(&FVec::new(f, ql.clone())))));
        t.add(v.adjoint().mul(&v).dist(&Dense::identity(di)));
        completeness = completeness.add(&v.mul(&v.adjoint()));
    }
    t.add(completeness.dist(&Dense::identity(dj)));

    for qj in all_vectors(d, o.nj) {
        if mat_vec(d, &o.lambda, &i, &j, &qj).iter().any(|&x| x != 0) {
            continue;
        }
        for ql in &syndromes {
            let v = o.iso(ql);
            let stab = o_weyl(d, &mat_vec(d, &o.lambda, &j, &j, &qj), &qj);
            let phase = eps(
                d,
                o_tau(d, &o.lambda, &o.join(&vec![0; o.ni], &qj, &neg(d, ql))),
            );
            t.add(stab.mul(&v).dist(&v.scale(phase)));
            t.add(
                stabilizer_eigen_check(g, &FVec::new(f, qj.clone()), &FVec::new(f, ql.clone()))
                    .unwrap(),
            );
        }
    }

    let id1 = |t: &mut Tally, pi: &[u32], qi: &[u32], ql: &[u32]| {
        let v = o.iso(ql);
        let lhs = v.mul(&o_weyl(d, pi, qi));
        let shift = mat_vec(d, &o.lambda, &j, &i, qi);
        let rhs = o_z(d, &shift)
            .mul(&v)
            .mul(&o_z(d, pi))
            .scale(eps(d, dot(d, pi, qi)));
        t.add(lhs.dist(&rhs));
        t.add(id1_deviation(
            &s,
            &lib_phase(f, pi, qi),
            &FVec::new(f, ql.to_vec()),
        ));
    };
    let id2 = |t: &mut Tally, pj: &[u32], qj: &[u32], ql: &[u32]| {
        let v = o.iso(ql);
        let lhs = o_weyl(d, pj, qj).mul(&v);
        let phase = eps(
            d,
            o_tau(d, &o.lambda, &o.join(&vec![0; o.ni], qj, &neg(d, ql))),
        );
        let left = sub(d, pj, &mat_vec(d, &o.lambda, &j, &j, qj));
        let right = neg(d, &mat_vec(d, &o.lambda, &i, &j, qj));
        let rhs = o_z(d, &left).mul(&v).mul(&o_z(d, &right)).scale(phase);
        t.add(lhs.dist(&rhs));
        t.add(id2_deviation(
            &s,
            &lib_phase(f, pj, qj),
            &FVec::new(f, ql.to_vec()),
        ));
    };
    let id3 = |t: &mut Tally, ql: &[u32]| {
        let shift = mat_vec(d, &o.lambda, &j, &l, ql);
        let v0 = o.iso(&vec![0; o.nl]);
        t.add(o.iso(ql).dist(&o_z(d, &shift).mul(&v0)));
        t.add(id3_deviation(&s, &FVec::new(f, ql.to_vec())));
    };

    match rng {
        None => {
            for ql in &syndromes {
                id3(t, ql);
                for xi in all_vectors(d, 2 * o.ni) {
                    id1(t, &xi[..o.ni], &xi[o.ni..], ql);
                }
                for xi in all_vectors(d, 2 * o.nj) {
                    id2(t, &xi[..o.nj], &xi[o.nj..], ql);
                }
            }
        }
        Some((rng, samples)) => {
            let mut draw = |n: usize| -> Vec<u32> { (0..n).map(|_| rng.gen_range(0..d)).collect() };
            for _ in 0..samples {
                let ql = draw(o.nl);
                let xi = draw(2 * o.ni);
                let xj = draw(2 * o.nj);
                id3(t, &ql);
                id1(t, &xi[..o.ni], &xi[o.ni..], &ql);
                id2(t, &xj[..o.nj], &xj[o.nj..], &ql);
            }
        }
    }
}

fn symmetric(d: u32, n: usize, upper: &[u32]) -> Vec<Vec<u32>> {
    let mut m = vec![vec![0; n]; n];
    let pairs = (0..n).flat_map(|r| (r + 1..n).map(move |c| (r, c)));
    for ((r, c), w) in pairs.zip(upper) {
        m[r][c] = w % d;
        m[c][r] = w % d;
    }
    m
}

fn admissible(
    f: Field,
    ni: usize,
    nj: usize,
    nl: usize,
    lambda: &[Vec<u32>],
) -> Option<CodingGraph> {
    let no_il = (0..ni).all(|a| (ni + nj..ni + nj + nl).all(|b| lambda[a][b] == 0));
    if !no_il {
        return None;
    }
    let g = CodingGraph::from_matrix(ni, nj, nl, FMat::from_rows(f, lambda).ok()?).ok()?;
    graphqec::graph::check_admissible(&g).ok.then_some(g)
}

const SHAPES_D2: [(usize, usize, usize); 3] = [(1, 1, 0), (1, 2, 1), (2, 2, 0)];

fn criterion_1() -> (bool, String) {
    let mut t = Tally::new();
    let f2 = Field::new(2).unwrap();
    for n in 1..=2 {
        let all = all_vectors(2, 2 * n);
        for a in &all {
            for b in &all {
                ccr_case(&mut t, f2, (&a[..n], &a[n..]), (&b[..n], &b[n..]));
            }
        }
        for upper in all_vectors(2, n * (n - 1) / 2) {
            let lambda = symmetric(2, n, &upper);
            for q in all_vectors(2, n) {
                for r in all_vectors(2, n) {
                    cocycle_case(&mut t, f2, &lambda, &q, &r);
                }
            }
        }
    }
    let mut graphs = 0;
    for (ni, nj, nl) in SHAPES_D2 {
        let n = ni + nj + nl;
        for upper in all_vectors(2, n * (n - 1) / 2) {
            if let Some(g) = admissible(f2, ni, nj, nl, &symmetric(2, n, &upper)) {
                graphs += 1;
                graph_case(&mut t, &g, None);
            }
        }
    }
    let exhaustive = t.cases;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (d, shapes) in [
        (
            3u32,
            &[(1usize, 1usize, 0usize), (1, 2, 1), (2, 2, 0), (1, 3, 2)][..],
        ),
        (5, &[(1, 1, 0), (1, 2, 1), (2, 2, 0)][..]),
    ] {
        let f = Field::new(d).unwrap();
        for case in 0..500 {
            let n = rng.gen_range(1..=2);
            let mut draw = |m: usize| -> Vec<u32> { (0..m).map(|_| rng.gen_range(0..d)).collect() };
            let (a, b) = (draw(2 * n), draw(2 * n));
            ccr_case(&mut t, f, (&a[..n], &a[n..]), (&b[..n], &b[n..]));
            let m = 1 + case % 4;
            let lambda = symmetric(d, m, &draw(m * (m - 1) / 2));
            cocycle_case(&mut t, f, &lambda, &draw(m), &draw(m));
            let (ni, nj, nl) = shapes[case % shapes.len()];
            let total = ni + nj + nl;
            let g = loop {
                let upper: Vec<u32> = (0..total * (total - 1) / 2)
                    .map(|_| rng.gen_range(0..d))
                    .collect();
                if let Some(g) = admissible(f, ni, nj, nl, &symmetric(d, total, &upper)) {
                    break g;
                }
            };
            graph_case(&mut t, &g, Some((&mut rng, 1)));
        }
    }
    let ok = t.worst <= TOL;
    (
        ok,
        format!(
            "max deviation {:.3e} (tolerance 1e-9), {} exhaustive checks over {} admissible d=2 graphs, {} randomized checks at d=3,5",
            t.worst,
            exhaustive,
            graphs,
            t.cases - exhaustive
        ),
    )
}

fn certified(d: u32) -> Option<Scheme> {
    let out = search_graph(&SearchParams {
        field: Field::new(d).unwrap(),
        n_inputs: 1,
        n_outputs: 5,
        t: 1,
        seed: 7,
        budget: 200_000,
    });
    Scheme::build(out.graph?, 1).ok()
}

/// Largest off-identity part of `v† w_a† w_b v` over all pairs of
/// weight-≤1 errors on `J`.
fn o_kl(g: &CodingGraph) -> (f64, usize) {
    let o = OGraph::from_lib(g);
    let d = o.d;
    let v = o.iso(&vec![0; o.nl]);
    let mut errors: Vec<(Vec<u32>, Vec<u32>)> = vec![(vec![0; o.nj], vec![0; o.nj])];
    for site in 0..o.nj {
        for p in 0..d {
            for q in 0..d {
                if p == 0 && q == 0 {
                    continue;
                }
                let (mut pv, mut qv) = (vec![0; o.nj], vec![0; o.nj]);
                pv[site] = p;
                qv[site] = q;
                errors.push((pv, qv));
            }
        }
    }
    let images: Vec<Dense> = errors
        .iter()
        .map(|(p, q)| o_weyl(d, p, q).mul(&v))
        .collect();
    let di = v.cols;
    let mut worst: f64 = 0.0;
    for a in &images {
        let aa = a.adjoint();
        for b in &images {
            let m = aa.mul(b);
            let c = m.trace() / di as f64;
            worst = worst.max(m.dist(&Dense::identity(di).scale(c)));
        }
    }
    (worst, errors.len())
}

fn criterion_2() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, pairs) in [(2u32, 16usize), (3, 41)] {
        let Some(s) = certified(d) else {
            return (false, format!("no certified graph found at d={d}"));
        };
        let g = s.graph();
        let subset = check_t_error_correcting(g, 1).ok;
        let lib = verify_kl(g, 1).unwrap();
        let (oracle, n) = o_kl(g);
        ok &= subset && n == pairs && s.errors().len() == pairs && lib <= TOL && oracle <= TOL;
        parts.push(format!(
            "d={d}: 2t-subset {subset}, {n}x{n} KL off-identity {:.3e} (library {:.3e})",
            oracle, lib
        ));
    }
    (ok, parts.join("; "))
}

fn apply_kraus(kraus: &[Dense], x: &Dense) -> Dense {
    let mut out = Dense::zeros(kraus[0].rows, kraus[0].rows);
    for k in kraus {
        out = out.add(&k.mul(x).mul(&k.adjoint()));
    }
    out
}

/// `D ∘ T ∘ E` on the Weyl basis of `H_I`, with `E` from the oracle
/// isometry and `T`, `D` given by their Kraus operators.
fn o_theorem1(s: &Scheme, noise: &QChannel, dec: &[Dense]) -> f64 {
    let o = OGraph::from_lib(s.graph());
    let d = o.d;
    let v0 = o.iso(&vec![0; o.nl]);
    let t: Vec<Dense> = noise.kraus().iter().map(Dense::from_lib).collect();
    let norm = ((d as usize).pow(o.ni as u32) as f64).sqrt();
    let mut worst: f64 = 0.0;
    for xi in all_vectors(d, 2 * o.ni) {
        let w = o_weyl(d, &xi[..o.ni], &xi[o.ni..]);
        let encoded = v0.mul(&w).mul(&v0.adjoint());
        let out = apply_kraus(dec, &apply_kraus(&t, &encoded));
        worst = worst.max(out.dist(&w) / norm);
    }
    worst
}

fn criterion_3() -> (bool, String) {
    let Some(s) = certified(2) else {
        return (false, "no certified graph found at d=2".into());
    };
    let f = s.field();
    let nj = s.graph().n_outputs();
    let dec: Vec<Dense> = decoder(&s).kraus().iter().map(Dense::from_lib).collect();
    let mut single = Tally::new();
    for xi in s.errors().elements() {
        let ch = weyl_diagonal_noise(f, nj, &[(xi.clone(), 1.0)]).unwrap();
        single.add(verify_theorem1(&s, &ch).unwrap());
        single.add(o_theorem1(&s, &ch, &dec));
    }
    let mut mixed = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let ch = noise_from_matrix(&s, &random_noise(&s, &mut rng), 1e-9).unwrap();
        mixed.add(verify_theorem1(&s, &ch).unwrap());
        mixed.add(o_theorem1(&s, &ch, &dec));
    }
    let ok = single.worst <= TOL && mixed.worst <= TOL && single.cases == 32 && mixed.cases == 200;
    (
        ok,
        format!(
            "{} single Weyl errors max {:.3e}, {} random mixtures max {:.3e} (tolerance 1e-9)",
            single.cases / 2,
            single.worst,
            mixed.cases / 2,
            mixed.worst
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let Some(s) = certified(2) else {
        return (false, "no certified graph found at d=2".into());
    };
    let encode = verify_cor_encode(s.graph()).unwrap();
    let syndrome = verify_thm_syndrome(&s).unwrap();
    let measure = verify_thm_measure(&s).unwrap();
    let (four, five) = verify_cor_decode(&s).unwrap();
    let a = ablation_deviations(&s).unwrap();
    let identities = [encode, syndrome, measure.exact, four, five];
    let ablations = [a.encoder, a.syndrome, a.decoder, a.decoder_five];
    let ok = identities.iter().all(|&x| x <= TOL)
        && ablations.iter().all(|&x| x > 0.1)
        && measure.outcomes == 512;
    (
        ok,
        format!(
            "encode {encode:.3e}, syndrome {syndrome:.3e}, measure {:.3e} over {} outcomes, decode {four:.3e}/{five:.3e}; ablations {:.3}/{:.3}/{:.3}/{:.3} (> 0.1)",
            measure.exact, measure.outcomes, a.encoder, a.syndrome, a.decoder, a.decoder_five
        ),
    )
}

/// `2(1 − p_0^n)` with `p_0 = (1 + (d² − 1) e^{−λt}) / d²` for the
/// per-site uniform Weyl semigroup.
fn o_free_decay(d: u32, n: usize, lambda_t: f64) -> f64 {
    let d2 = (d * d) as f64;
    let p0 = (1.0 + (d2 - 1.0) * (-lambda_t).exp()) / d2;
    2.0 * (1.0 - p0.powi(n as i32))
}

fn criterion_5() -> (bool, String) {
    let Some(s) = certified(2) else {
        return (false, "no certified graph found at d=2".into());
    };
    let f = s.field();
    let nj = s.graph().n_outputs();
    let truncated = DecoherenceModel::new(f, nj, 0.05).unwrap().truncated();
    let run = simulate_memory(&s, &truncated, 1.0, 5, 1e-8).unwrap();
    let worst = run
        .residuals
        .iter()
        .map(|r| r.weyl_max.max(r.proxy()))
        .fold(0.0, f64::max);

    let rate = 0.01;
    let model = DecoherenceModel::new(f, nj, rate).unwrap();
    let run = simulate_memory(&s, &model, 1.0, 5, 1e-2).unwrap();
    let residual = run.final_residual();
    let free = o_free_decay(2, nj, rate * 5.0);
    let small = DecoherenceModel::new(f, 2, rate).unwrap();
    let direct = channel_distance(
        &semigroup_channel(&small, 5.0).unwrap(),
        &QChannel::identity(f, 2),
    )
    .unwrap()
    .proxy();
    let agree = (free - run.free_decay[4]).abs() <= 1e-9
        && (direct - o_free_decay(2, 2, rate * 5.0)).abs() <= 1e-9;
    let ok = worst <= 1e-8 && residual < free && agree;
    (
        ok,
        format!(
            "truncated k=5 max residual {worst:.3e} (<= 1e-8); untruncated λt_c=0.01 k=5 residual {residual:.4e} < free decay {free:.4e}"
        ),
    )
}

fn cli(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_graphqec"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn cli");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_6() -> (bool, String) {
    let root = tempfile::TempDir::new().unwrap();
    let noise = r#"{"kind": "weyl_diagonal", "t": 1, "probs": [
        {"xi": {"p": [0,0,0,0,0], "q": [0,0,0,0,0]}, "p": 0.8},
        {"xi": {"p": [0,1,0,0,0], "q": [0,0,0,0,0]}, "p": 0.2}]}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "find-graph",
            "--d",
            "2",
            "--outputs",
            "5",
            "--seed",
            "7",
            "--out",
            "g.json",
        ],
        vec![
            "find-graph",
            "--d",
            "3",
            "--outputs",
            "5",
            "--seed",
            "7",
            "--json",
        ],
        vec!["check-graph", "g.json", "--json"],
        vec!["build-scheme", "g.json"],
        vec!["build-scheme", "g.json", "--out", "scheme.json"],
        vec![
            "verify", "g.json", "--suite", "all", "--seed", "5", "--json",
        ],
        vec![
            "verify",
            "g.json",
            "--suite",
            "thm1",
            "--noise",
            "noise.json",
        ],
        vec!["emit-program", "g.json", "--role", "encoder"],
        vec!["emit-program", "g.json", "--role", "syndrome"],
        vec!["emit-program", "g.json", "--role", "decoder"],
        vec![
            "emit-program",
            "g.json",
            "--role",
            "decoder5",
            "--out",
            "d5.json",
        ],
        vec![
            "simulate-memory",
            "g.json",
            "--lambda",
            "0.01",
            "--scan",
            "0.5,1,2",
            "--json",
        ],
        vec![
            "simulate-memory",
            "g.json",
            "--lambda",
            "0.05",
            "--truncated",
        ],
    ];
    let files = ["g.json", "scheme.json", "d5.json"];
    let mut runs: Vec<Vec<(i32, Vec<u8>)>> = Vec::new();
    let mut written: Vec<Vec<Vec<u8>>> = Vec::new();
    for pass in 0..2 {
        let dir = root.path().join(format!("run{pass}"));
        std::fs::create_dir(&dir).unwrap();
        std::fs::write(dir.join("noise.json"), noise).unwrap();
        runs.push(commands.iter().map(|c| cli(&dir, c)).collect());
        written.push(
            files
                .iter()
                .map(|f| std::fs::read(dir.join(f)).unwrap_or_default())
                .collect(),
        );
    }
    let mismatched: Vec<String> = commands
        .iter()
        .zip(runs[0].iter().zip(&runs[1]))
        .filter(|(_, (a, b))| a != b)
        .map(|(c, _)| c.join(" "))
        .collect();
    let failed: Vec<String> = commands
        .iter()
        .zip(&runs[0])
        .filter(|(_, (code, _))| *code != 0)
        .map(|(c, (code, _))| format!("{} (exit {code})", c.join(" ")))
        .collect();
    let files_same = written[0] == written[1] && written[0].iter().all(|f| !f.is_empty());
    let ok = mismatched.is_empty() && failed.is_empty() && files_same;
    let mut msg = format!(
        "{} commands run twice, {} differing outputs, output files identical: {files_same}",
        commands.len(),
        mismatched.len()
    );
    for m in mismatched.iter().chain(&failed) {
        msg.push_str(&format!("; {m}"));
    }
    (ok, msg)
}

type Criterion = (&'static str, Option<Duration>, fn() -> (bool, String));

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        (
            "algebraic kernel",
            Some(Duration::from_secs(10)),
            criterion_1,
        ),
        (
            "code certification",
            Some(Duration::from_secs(60)),
            criterion_2,
        ),
        (
            "error correction",
            Some(Duration::from_secs(60)),
            criterion_3,
        ),
        (
            "one-way identities",
            Some(Duration::from_secs(300)),
            criterion_4,
        ),
        ("memory", Some(Duration::from_secs(120)), criterion_5),
        ("determinism", None, criterion_6),
    ];
    let mut all = true;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = ok && in_time;
        all &= pass;
        println!(
            "{} criterion {} ({name}): {detail}; {:.2}s{}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()))
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
