//! Global direction search over the unit sphere.
//!
//! The rank-correlation objective is piecewise constant in the direction, so
//! gradient methods are useless. A small differential-evolution population
//! explores the sphere, then a Nelder–Mead polish settles the best point
//! inside its plateau. Both stages are deterministic given the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Differential-evolution scale factor.
const DE_F: f64 = 0.8;
/// Crossover probability.
const DE_CR: f64 = 0.9;
/// Nelder–Mead iterations spent polishing the best direction.
const POLISH_ITERS: usize = 120;
/// Initial simplex edge length for the polish.
const POLISH_STEP: f64 = 0.05;

/// Maximizes `objective` over unit vectors of dimension `dim`.
/// Returns the best direction (unit norm) and its objective value.
pub(crate) fn maximize_direction<F>(
    dim: usize,
    population: usize,
    generations: usize,
    seed: u64,
    mut objective: F,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let pop = population.max(5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut members: Vec<Vec<f64>> = (0..pop)
        .map(|_| random_unit(dim, &mut rng))
        .collect();
    let mut values: Vec<f64> = members.iter().map(|k| objective(k)).collect();

    let mut best = 0;
    for i in 1..pop {
        if values[i] > values[best] {
            best = i;
        }
    }
    let mut best_k = members[best].clone();
    let mut best_val = values[best];

    let mut trial = vec![0.0; dim];
    for _ in 0..generations {
        for i in 0..pop {
            let (a, b, c) = three_distinct(pop, i, &mut rng);
            let j_rand = rng.random_range(0..dim);
            for j in 0..dim {
                trial[j] = if j == j_rand || rng.random::<f64>() < DE_CR {
                    members[a][j] + DE_F * (members[b][j] - members[c][j])
                } else {
                    members[i][j]
                };
            }
            normalize(&mut trial);
            let val = objective(&trial);
            if val > values[i] {
                members[i].copy_from_slice(&trial);
                values[i] = val;
                if val > best_val {
                    best_val = val;
                    best_k.copy_from_slice(&trial);
                }
            }
        }
    }

    let (polished, polished_val) = nelder_mead_max(&best_k, &mut objective);
    if polished_val > best_val {
        (polished, polished_val)
    } else {
        (best_k, best_val)
    }
}

/// Nelder–Mead ascent from `start`; the objective handles normalization of
/// off-sphere points, so the simplex can live in the ambient space.
fn nelder_mead_max<F>(start: &[f64], objective: &mut F) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for j in 0..dim {
        let mut v = start.to_vec();
        v[j] += POLISH_STEP;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| objective(v)).collect();

    for _ in 0..POLISH_ITERS {
        // Order descending: index 0 best, index dim worst.
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).expect("finite objective"));
        let reordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let revals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
        simplex = reordered;
        vals = revals;

        if (vals[0] - vals[dim]).abs() < 1e-12 {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|j| centroid[j] + (centroid[j] - worst[j]))
            .collect();
        let f_r = objective(&reflect);

        if f_r > vals[0] {
            let expand: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 2.0 * (centroid[j] - worst[j]))
                .collect();
            let f_e = objective(&expand);
            if f_e > f_r {
                simplex[dim] = expand;
                vals[dim] = f_e;
            } else {
                simplex[dim] = reflect;
                vals[dim] = f_r;
            }
        } else if f_r > vals[dim - 1] {
            simplex[dim] = reflect;
            vals[dim] = f_r;
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + 0.5 * (worst[j] - centroid[j]))
                .collect();
            let f_c = objective(&contract);
            if f_c > vals[dim] {
                simplex[dim] = contract;
                vals[dim] = f_c;
            } else {
                let anchor = simplex[0].clone();
                for v in simplex.iter_mut().skip(1) {
                    for j in 0..dim {
                        v[j] = anchor[j] + 0.5 * (v[j] - anchor[j]);
                    }
                }
                // Shrink moved every non-best vertex; re-evaluate them.
                for i in 1..=dim {
                    vals[i] = objective(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    let mut out = simplex[best].clone();
    normalize(&mut out);
    (out, vals[best])
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn three_distinct(pop: usize, skip: usize, rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
    let mut draw = |taken: &[usize]| loop {
        let c = rng.random_range(0..pop);
        if c != skip && !taken.contains(&c) {
            return c;
        }
    };
    let a = draw(&[]);
    let b = draw(&[a]);
    let c = draw(&[a, b]);
    (a, b, c)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1e-12 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
