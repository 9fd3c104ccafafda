//! Independent reference implementations shared by the test targets.
#![allow(dead_code)]

use crad::cluster::Adjacency;
use crad::dataset::{DataMatrix, Labels};
use crad::metrics::{mutual_information, ContingencyTable, NoiseMode};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_labels(r: &mut ChaCha8Rng, n: usize, k: i64) -> Labels {
    Labels::new((0..n).map(|_| r.random_range(1..=k)).collect())
}

/// Average MI over every reordering of `v` against a fixed `u`.
pub fn brute_force_emi(u: &[i64], v: &[i64]) -> f64 {
    let n = u.len();
    let mut total = 0.0;
    let mut count = 0u64;
    for perm in (0..n).permutations(n) {
        let pv: Vec<i64> = perm.iter().map(|&i| v[i]).collect();
        let t = ContingencyTable::new(
            &Labels::new(u.to_vec()),
            &Labels::new(pv),
            NoiseMode::OneCluster,
        )
        .unwrap();
        total += mutual_information(&t);
        count += 1;
    }
    total / count as f64
}

pub fn pair_enumeration_ri(u: &[i64], v: &[i64]) -> f64 {
    let n = u.len();
    let mut agree = 0u64;
    let mut total = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if (u[i] == u[j]) == (v[i] == v[j]) {
                agree += 1;
            }
            total += 1;
        }
    }
    agree as f64 / total as f64
}

pub fn min_det_by_enumeration(x: &DataMatrix, h: usize) -> f64 {
    let p = x.n_cols();
    let mut best = f64::INFINITY;
    for subset in (0..x.n_rows()).combinations(h) {
        let mut mean = vec![0.0; p];
        for &i in &subset {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v / h as f64;
            }
        }
        let mut cov = nalgebra::DMatrix::<f64>::zeros(p, p);
        for &i in &subset {
            let d =
                nalgebra::DVector::from_iterator(p, x.row(i).iter().zip(&mean).map(|(a, b)| a - b));
            cov += &d * d.transpose() / h as f64;
        }
        best = best.min(cov.determinant());
    }
    best
}

pub fn mcd_fixture(r: &mut ChaCha8Rng, n: usize, p: usize) -> DataMatrix {
    let values = (0..n * p)
        .map(|k| {
            let z: f64 = r.sample(rand_distr::StandardNormal);
            if k / p < n / 4 {
                8.0 + 3.0 * z
            } else {
                z
            }
        })
        .collect();
    DataMatrix::new(n, p, values).unwrap()
}

/// Scans every admissible bin and keeps the highest strict local minimum.
pub fn hopt_oracle(counts: &[usize], step: usize) -> f64 {
    let nb = counts.len();
    let mut best = None;
    for j in 1..=nb {
        if j <= step || j + step > nb {
            continue;
        }
        let c = counts[j - 1];
        let is_min = (1..=step).all(|z| c < counts[j - 1 + z] && c < counts[j - 1 - z]);
        if is_min {
            best = Some(j);
        }
    }
    best.map_or(0.0, |j| (j - 1) as f64 / nb as f64)
}

/// Union-find DBSCAN: cores are points with more than `m` neighbors within `eps`;
/// clusters are connected components of cores, numbered by their smallest core;
/// a border point joins the lowest-numbered cluster among its core neighbors.
pub fn dbscan_oracle(x: &DataMatrix, eps: f64, m: usize) -> Vec<i64> {
    let n = x.n_rows();
    let dist = |i: usize, j: usize| {
        x.row(i)
            .iter()
            .zip(x.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| dist(i, j) <= eps).collect())
        .collect();
    let core: Vec<bool> = nbrs.iter().map(|v| v.len() > m).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..n {
        for &j in &nbrs[i] {
            if core[i] && core[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut id = vec![0i64; n];
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        if core[i] {
            let root = find(&mut parent, i);
            let k = match roots.iter().position(|&r| r == root) {
                Some(k) => k,
                None => {
                    roots.push(root);
                    roots.len() - 1
                }
            };
            id[i] = k as i64 + 1;
        }
    }
    let core_ids = id.clone();
    for i in 0..n {
        if !core[i] {
            id[i] = nbrs[i]
                .iter()
                .filter(|&&j| core[j])
                .map(|&j| core_ids[j])
                .min()
                .unwrap_or(0);
        }
    }
    id
}

/// Recursive flood fill with the same seed order as the breadth-first expansion.
/// For symmetric adjacency the two agree exactly.
pub fn components_oracle(a: &Adjacency) -> Vec<i64> {
    let n = a.n();
    let mut labels = vec![-1i64; n];
    let mut next = 0;
    fn visit(a: &Adjacency, labels: &mut [i64], i: usize, l: i64) {
        for &j in a.row(i) {
            if labels[j] == -1 {
                labels[j] = l;
                if a.row(j).len() > 1 {
                    visit(a, labels, j, l);
                }
            }
        }
    }
    for i in 0..n {
        if labels[i] != -1 {
            continue;
        }
        if a.row(i).len() <= 1 {
            labels[i] = 0;
            continue;
        }
        next += 1;
        labels[i] = next;
        visit(a, &mut labels, i, next);
    }
    labels
}

// Checks shared by the unit-level test targets and the acceptance run.
// Each returns a short summary on success and the first discrepancy otherwise.

use crad::cluster::{crad, crad_dbscan, dbca, dbscan_eu};
use crad::depth::depth_matrix;
use crad::metrics::{ami, expected_mi, rand_index};
use crad::neighbor::{find_hopt, DepthHistogram};
use crad::robust_scatter::{default_h, exact_mcd, fast_mcd, reweight};
use crad::synthgen::gen_gaussians;
use crad::NeighborParams;
use rand::seq::SliceRandom;

pub type Check = Result<String, String>;

pub fn check_expected_mi() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut fixtures: Vec<(Vec<i64>, Vec<i64>)> = vec![
        (vec![1, 1, 2, 2], vec![1, 2, 1, 2]),
        (vec![1, 1, 1, 2, 2, 3], vec![1, 2, 2, 2, 3, 3]),
        (vec![1, 2, 3, 4, 5, 6, 7, 8], vec![1, 1, 1, 1, 2, 2, 2, 2]),
        (vec![1; 8], vec![1, 2, 3, 1, 2, 3, 1, 2]),
        (vec![1, 1], vec![1, 2]),
    ];
    for n in 3..=8 {
        for _ in 0..3 {
            let u = random_labels(&mut r, n, 3).into_vec();
            let v = random_labels(&mut r, n, 4).into_vec();
            fixtures.push((u, v));
        }
    }
    let count = fixtures.len();
    for (u, v) in fixtures {
        let t = ContingencyTable::new(
            &Labels::new(u.clone()),
            &Labels::new(v.clone()),
            NoiseMode::OneCluster,
        )
        .map_err(|e| e.to_string())?;
        let got = expected_mi(&t);
        let want = brute_force_emi(&u, &v);
        if (got - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(format!("u={u:?} v={v:?}: {got} vs {want}"));
        }
    }
    Ok(format!("{count} fixtures"))
}

pub fn check_rand_index() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let n = r.random_range(2..60);
        let (ku, kv) = (r.random_range(1..6), r.random_range(1..6));
        let u = random_labels(&mut r, n, ku);
        let v = random_labels(&mut r, n, kv);
        let got = rand_index(&u, &v).map_err(|e| e.to_string())?;
        let want = pair_enumeration_ri(u.as_slice(), v.as_slice());
        if got != want {
            return Err(format!("case {case}: {got} vs {want}"));
        }
    }
    Ok("100 fixtures".into())
}

pub fn check_ami_extremes() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..20 {
        let u = random_labels(&mut r, 50, 4);
        let a = ami(&u, &u).map_err(|e| e.to_string())?;
        if (a - 1.0).abs() > 1e-12 {
            return Err(format!("AMI(U,U) = {a}"));
        }
    }
    let u = random_labels(&mut r, 200, 5);
    let v = random_labels(&mut r, 200, 5);
    let a = ami(&u, &v).map_err(|e| e.to_string())?;
    if a.abs() >= 0.05 {
        return Err(format!("independent AMI {a}"));
    }
    Ok(format!("independent AMI {a:.4}"))
}

/// Relabeling either partition leaves RI and AMI unchanged.
pub fn check_metric_relabeling() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(31);
    for case in 0..50 {
        let n = r.random_range(2..80);
        let u = random_labels(&mut r, n, 5);
        let v = random_labels(&mut r, n, 4);
        let mut names: Vec<i64> = (1..=5).collect();
        names.shuffle(&mut r);
        let w = Labels::new(
            u.as_slice()
                .iter()
                .map(|&l| 10 * names[l as usize - 1])
                .collect(),
        );
        let (ri, ri_w) = (rand_index(&u, &v), rand_index(&w, &v));
        let (am, am_w) = (ami(&u, &v), ami(&w, &v));
        match (ri, ri_w, am, am_w) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) if a == b && (c - d).abs() <= 1e-12 => {}
            other => return Err(format!("case {case}: {other:?}")),
        }
    }
    Ok("50 fixtures".into())
}

pub fn check_mcd_equivalence() -> Check {
    let start = std::time::Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for case in 0..25 {
        let p = 1 + case % 3;
        let n = r.random_range(p + 5..=12);
        let x = mcd_fixture(&mut r, n, p);
        let h = default_h(n, p);
        let exact = exact_mcd(&x, h).map_err(|e| e.to_string())?;
        let fast = fast_mcd(&x, h, case as u64, 500).map_err(|e| e.to_string())?;
        let rel = (fast.raw_determinant - exact.raw_determinant).abs() / exact.raw_determinant;
        worst = worst.max(rel);
        if rel > 1e-9 {
            return Err(format!(
                "case {case}: fast {} exact {}",
                fast.raw_determinant, exact.raw_determinant
            ));
        }
        let brute = min_det_by_enumeration(&x, h);
        if (exact.raw_determinant - brute).abs() > 1e-9 * brute {
            return Err(format!(
                "case {case}: exact {} enumeration {brute}",
                exact.raw_determinant
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("25 fixtures, worst rel {worst:.1e}, {secs:.2} s"))
}

/// The three hand-traced histograms.
pub fn check_hopt_traces() -> Check {
    let cases: [(&[usize], f64); 3] = [
        (&[3, 1, 4, 2, 5], 0.6),
        (&[1, 2, 3, 4, 5], 0.0),
        (&[5, 1, 5, 1, 5], 0.6),
    ];
    for (counts, want) in cases {
        let got = find_hopt(&DepthHistogram::from_counts(counts.to_vec()), 1);
        if got != want {
            return Err(format!("{counts:?}: {got} vs {want}"));
        }
    }
    Ok("3 traces".into())
}

pub fn exact_depth(x: &DataMatrix) -> crad::DepthMatrix {
    let raw = exact_mcd(x, default_h(x.n_rows(), x.n_cols())).unwrap();
    depth_matrix(x, &reweight(x, &raw).unwrap()).unwrap()
}

pub fn check_affine_invariance() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for case in 0..10 {
        let p = 1 + case % 3;
        let n = 9 + case % 3;
        let values: Vec<f64> = (0..n * p).map(|_| r.random_range(-3.0..3.0)).collect();
        let x = DataMatrix::new(n, p, values).unwrap();
        let a: Vec<f64> = loop {
            let a: Vec<f64> = (0..p * p).map(|_| r.random_range(-2.0..2.0)).collect();
            if nalgebra::DMatrix::from_row_slice(p, p, &a)
                .determinant()
                .abs()
                > 0.2
            {
                break a;
            }
        };
        let b: Vec<f64> = (0..p).map(|_| r.random_range(-10.0..10.0)).collect();
        let y = x.affine(&a, &b);
        let (dx, dy) = (exact_depth(&x), exact_depth(&y));
        for (u, v) in dx.as_slice().iter().zip(dy.as_slice()) {
            worst = worst.max((u - v).abs());
            if (u - v).abs() > 1e-6 {
                return Err(format!("case {case}: {u} vs {v}"));
            }
        }
    }
    Ok(format!("10 fixtures, worst {worst:.1e}"))
}

pub fn same_partition(a: &Labels, b: &Labels) -> bool {
    ContingencyTable::new(a, b, NoiseMode::Singletons)
        .unwrap()
        .is_matching()
}

/// Three blobs and a fixed shuffle of their rows.
pub fn permuted_blobs() -> (DataMatrix, DataMatrix, Vec<usize>) {
    let (x, _) = gen_gaussians(
        &[vec![0.0, 0.0], vec![12.0, 0.0], vec![6.0, 11.0]],
        &[0.7, 0.7, 0.7],
        &[40, 40, 40],
        21,
    )
    .unwrap();
    let mut perm: Vec<usize> = (0..x.n_rows()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let y = x.select_rows(&perm);
    (x, y, perm)
}

/// Whether each algorithm returns the same partition on shuffled rows.
pub fn row_permutation_outcomes() -> Vec<(&'static str, bool)> {
    let (x, y, perm) = permuted_blobs();
    let p = NeighborParams::new(30, 1).unwrap();
    type Run = fn(&DataMatrix, NeighborParams) -> Labels;
    let runs: [(&str, Run); 4] = [
        ("crad", |x, p| crad(x, p, 5).unwrap()),
        ("crad-dbscan", |x, p| crad_dbscan(x, p, 3, 5).unwrap()),
        ("dbca", |x, _| dbca(x, 0.9, 5).unwrap()),
        ("dbscan", |x, _| dbscan_eu(x, 1.5, 3)),
    ];
    runs.iter()
        .map(|(name, run)| {
            let lx = run(&x, p);
            let ly = run(&y, p);
            (
                *name,
                lx.n_clusters() >= 2 && same_partition(&lx.select(&perm), &ly),
            )
        })
        .collect()
}
