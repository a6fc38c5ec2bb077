//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use microsage::data::{CocultureRecord, ConditionId, Dataset, SignLabel, SpeciesId};
use microsage::graph::Adjacency;
use microsage::nn::{model_backward, model_forward_cached, softmax_cross_entropy, GraphSageModel};
use microsage::Matrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-scale..scale)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

pub fn random_adjacency(rng: &mut SplitMix64, n: usize, p: f64) -> Adjacency {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Adjacency::from_edges(n, &edges)
}

/// Random dataset with ≤ 12 (species, condition) nodes over 2–3 conditions.
pub fn random_small_dataset(rng: &mut SplitMix64) -> Dataset {
    let (s, c) = if rng.gen_bool(0.5) {
        (rng.gen_range(3..=6), 2)
    } else {
        (rng.gen_range(3..=4), 3)
    };
    let mono: Vec<Vec<f64>> = (0..s)
        .map(|_| (0..c).map(|_| rng.gen_range(0.1..2.0)).collect())
        .collect();
    let mut records = Vec::new();
    for cond in 0..c {
        for x in 0..s {
            for y in (x + 1)..s {
                if records.is_empty() || rng.gen_bool(0.45) {
                    let sign = |b: bool| if b { SignLabel::Positive } else { SignLabel::Negative };
                    records.push(CocultureRecord {
                        species_x: SpeciesId(x),
                        species_y: SpeciesId(y),
                        condition: ConditionId(cond),
                        mono_grow_x: mono[x][cond],
                        mono_grow_y: mono[y][cond],
                        mono_grow24_x: 0.5 * mono[x][cond],
                        mono_grow24_y: 0.5 * mono[y][cond],
                        co_yield_x: None,
                        co_yield_y: None,
                        label_xy: sign(rng.gen_bool(0.3)),
                        label_yx: sign(rng.gen_bool(0.3)),
                    });
                }
            }
        }
    }
    records.shuffle(rng);
    let mut phylo = Matrix::zeros(s, s);
    for a in 0..s {
        for b in (a + 1)..s {
            let d = rng.gen_range(0.5..3.0);
            phylo[(a, b)] = d;
            phylo[(b, a)] = d;
        }
    }
    Dataset::new(
        (0..s).map(|i| format!("s{i}")).collect(),
        (0..c).map(|i| format!("c{i}")).collect(),
        records,
        phylo,
    )
    .unwrap()
}

/// Pairwise O(|E|²) line graph straight from the records: two records are
/// adjacent iff they share the condition and at least one species. In
/// directed mode record `k` owns nodes `2k` and `2k+1`, which are also
/// adjacent to each other.
pub fn brute_force_line_graph(records: &[CocultureRecord], directed: bool) -> Vec<BTreeSet<usize>> {
    let m = records.len();
    let shares = |a: &CocultureRecord, b: &CocultureRecord| {
        a.condition == b.condition
            && [a.species_x, a.species_y]
                .iter()
                .any(|s| *s == b.species_x || *s == b.species_y)
    };
    if !directed {
        return (0..m)
            .map(|k| (0..m).filter(|&l| l != k && shares(&records[k], &records[l])).collect())
            .collect();
    }
    (0..2 * m)
        .map(|u| {
            (0..2 * m)
                .filter(|&v| {
                    let (k, l) = (u / 2, v / 2);
                    u != v && (k == l || shares(&records[k], &records[l]))
                })
                .collect()
        })
        .collect()
}

pub fn adjacency_sets(adj: &Adjacency) -> Vec<BTreeSet<usize>> {
    (0..adj.node_count())
        .map(|i| adj.neighbors(i).iter().copied().collect())
        .collect()
}

pub fn masked_loss(model: &GraphSageModel, x: &Matrix, adj: &Adjacency, labels: &[usize], mask: &[bool]) -> f64 {
    let cache = model_forward_cached(model, x, adj).unwrap();
    softmax_cross_entropy(&cache.logits, labels, mask).unwrap().0
}

/// Worst `|analytic − fd| / max(1, |fd|)` over every weight of a random
/// 13→8→2 model on a random graph with ≤ 10 nodes.
pub fn gradient_check_trial(seed: u64, h: f64) -> f64 {
    let mut r = rng(seed);
    let n = r.gen_range(1..=10);
    let adj = random_adjacency(&mut r, n, 0.35);
    let x = random_matrix(&mut r, n, 13, 1.0);
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..2)).collect();
    let mut mask: Vec<bool> = (0..n).map(|_| r.gen_bool(0.7)).collect();
    mask[r.gen_range(0..n)] = true;
    let mut model = GraphSageModel::init(13, 8, 2, seed);
    for w in model.params_mut() {
        for v in w.as_mut_slice() {
            *v *= 2.0;
        }
    }

    let cache = model_forward_cached(&model, &x, &adj).unwrap();
    let (_, dlogits) = softmax_cross_entropy(&cache.logits, &labels, &mask).unwrap();
    let grads = model_backward(&model, &adj, &dlogits, &cache).unwrap();
    let analytic: Vec<Matrix> = grads.as_array().iter().map(|g| (*g).clone()).collect();

    let mut worst = 0.0f64;
    for p in 0..4 {
        for e in 0..analytic[p].as_slice().len() {
            let mut plus = model.clone();
            plus.params_mut()[p].as_mut_slice()[e] += h;
            let mut minus = model.clone();
            minus.params_mut()[p].as_mut_slice()[e] -= h;
            let fd = (masked_loss(&plus, &x, &adj, &labels, &mask) - masked_loss(&minus, &x, &adj, &labels, &mask))
                / (2.0 * h);
            let a = analytic[p].as_slice()[e];
            worst = worst.max((a - fd).abs() / fd.abs().max(1.0));
        }
    }
    worst
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn shifted(c: &Matrix, lambda: f64) -> Vec<Vec<f64>> {
    (0..c.rows())
        .map(|i| (0..c.cols()).map(|j| c[(i, j)] - if i == j { lambda } else { 0.0 }).collect())
        .collect()
}

/// Eigenpairs of a symmetric d×d matrix (d ≤ 4) from the roots of
/// det(C − λI) and the adjugate of C − λI, descending by eigenvalue.
/// Returns `None` if fewer than d distinct roots could be bracketed.
pub fn brute_force_eigen(c: &Matrix) -> Option<Vec<(f64, Vec<f64>)>> {
    let d = c.rows();
    assert!(d <= 4 && c.cols() == d);
    let radius = (0..d)
        .map(|i| (0..d).map(|j| c[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let (lo, hi) = (-radius - 1e-9, radius + 1e-9);
    let p = |l: f64| det(&shifted(c, l));
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut prev = (lo, p(lo));
    for s in 1..=steps {
        let l = lo + (hi - lo) * s as f64 / steps as f64;
        let v = p(l);
        if v == 0.0 {
            roots.push(l);
        } else if prev.1 != 0.0 && (v > 0.0) != (prev.1 > 0.0) {
            let (mut a, mut b, fa) = (prev.0, l, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = p(mid);
                if fm == 0.0 || mid == a || mid == b {
                    a = mid;
                    b = mid;
                    break;
                }
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (l, v);
    }
    if roots.len() != d {
        return None;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Some(
        roots
            .into_iter()
            .map(|l| {
                let m = shifted(c, l);
                // Column j of adj(M) = cofactors C_{j,i} over i.
                let cof = |i: usize, j: usize| {
                    let minor: Vec<Vec<f64>> = (0..d)
                        .filter(|&r| r != i)
                        .map(|r| (0..d).filter(|&k| k != j).map(|k| m[r][k]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    if d == 1 {
                        1.0
                    } else {
                        sign * det(&minor)
                    }
                };
                let cols: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|i| cof(j, i)).collect()).collect();
                let best = cols
                    .iter()
                    .max_by(|a, b| {
                        let na: f64 = a.iter().map(|v| v * v).sum();
                        let nb: f64 = b.iter().map(|v| v * v).sum();
                        na.total_cmp(&nb)
                    })
                    .unwrap();
                let norm = best.iter().map(|v| v * v).sum::<f64>().sqrt();
                (l, best.iter().map(|v| v / norm).collect())
            })
            .collect(),
    )
}

/// Sample covariance (n − 1) by explicit loops.
pub fn covariance(data: &Matrix) -> Matrix {
    let (n, d) = data.shape();
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|i| data[(i, j)]).sum::<f64>() / n as f64).collect();
    let mut c = Matrix::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            c[(p, q)] = (0..n)
                .map(|i| (data[(i, p)] - mean[p]) * (data[(i, q)] - mean[q]))
                .sum::<f64>()
                / (n - 1) as f64;
        }
    }
    c
}

/// Largest entry-wise difference between `a` and `b` or `-b`.
pub fn sign_agnostic_diff(a: &[f64], b: &[f64]) -> f64 {
    let plus = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let minus = a.iter().zip(b).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
    plus.min(minus)
}
