//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's cost or projection code.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teamflow::scenario::Scenario;
use teamflow::PathSpec;

/// Plain nested-vector form of an instance: `paths[i][k]` lists 0-based edges.
#[derive(Debug, Clone)]
pub struct Raw {
    pub paths: Vec<Vec<Vec<usize>>>,
    pub demands: Vec<f64>,
    pub rho: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub type Profile = Vec<Vec<f64>>;

impl Raw {
    pub fn from_scenario(sc: &Scenario) -> Raw {
        let edge_of = |from: usize, to: usize| {
            sc.edges
                .iter()
                .position(|e| e[0] == from && e[1] == to)
                .expect("walk uses an existing edge")
        };
        let paths = sc
            .paths
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|p| match p {
                        PathSpec::Nodes(walk) => {
                            walk.windows(2).map(|w| edge_of(w[0], w[1])).collect()
                        }
                        PathSpec::Edges { edges } => edges.iter().map(|e| e - 1).collect(),
                    })
                    .collect()
            })
            .collect();
        let l = sc.rho.len();
        Raw {
            paths,
            demands: sc.sources.iter().map(|s| s.demand).collect(),
            rho: sc.rho.clone(),
            a: sc.a.clone().unwrap_or(vec![0.0; l]),
            b: sc.b.clone().unwrap_or(vec![1.0; l]),
        }
    }

    pub fn num_edges(&self) -> usize {
        self.rho.len()
    }

    /// Flow DM `i` alone puts on each edge.
    pub fn own_flows(&self, i: usize, u: &Profile) -> Vec<f64> {
        let mut x = vec![0.0; self.num_edges()];
        for (k, path) in self.paths[i].iter().enumerate() {
            for &l in path {
                x[l] += u[i][k];
            }
        }
        x
    }

    pub fn edge_flows(&self, u: &Profile) -> Vec<f64> {
        let mut z = vec![0.0; self.num_edges()];
        for i in 0..self.paths.len() {
            for (zl, xl) in z.iter_mut().zip(self.own_flows(i, u)) {
                *zl += xl;
            }
        }
        z
    }

    pub fn uses(&self, i: usize, l: usize) -> bool {
        self.paths[i].iter().any(|p| p.contains(&l))
    }

    pub fn team_cost(&self, u: &Profile) -> f64 {
        let z = self.edge_flows(u);
        (0..self.num_edges())
            .map(|l| self.rho[l] * z[l] * z[l])
            .sum()
    }

    pub fn individual_cost(&self, i: usize, u: &Profile) -> f64 {
        let z = self.edge_flows(u);
        let x = self.own_flows(i, u);
        (0..self.num_edges())
            .filter(|&l| self.uses(i, l))
            .map(|l| self.rho[l] * x[l] * (self.a[l] + self.b[l] * z[l]))
            .sum()
    }

    pub fn potential_payoff(&self, i: usize, u: &Profile) -> f64 {
        let z = self.edge_flows(u);
        (0..self.num_edges())
            .filter(|&l| self.uses(i, l))
            .map(|l| self.rho[l] * z[l] * z[l])
            .sum()
    }

    pub fn random_profile(&self, rng: &mut impl Rng) -> Profile {
        self.paths
            .iter()
            .zip(&self.demands)
            .map(|(ps, &r)| random_simplex_point(ps.len(), r, rng))
            .collect()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of `{x >= 0, sum x = r}` via sorted uniforms.
pub fn random_simplex_point(n: usize, r: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>()).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| r * (w[1] - w[0])).collect()
}

/// Central differences of `f(i, u)` with respect to every `u[i][k]`, `f`
/// being the scalar whose gradient block `i` should match.
pub fn fd_gradient(u: &Profile, h: f64, f: impl Fn(usize, &Profile) -> f64) -> Profile {
    let mut g = u.clone();
    for i in 0..u.len() {
        for k in 0..u[i].len() {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i][k] += h;
            dn[i][k] -= h;
            g[i][k] = (f(i, &up) - f(i, &dn)) / (2.0 * h);
        }
    }
    g
}

pub fn flatten(u: &Profile) -> Vec<f64> {
    u.iter().flatten().copied().collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Projection onto `{x >= 0, sum x = r}` by enumerating supports: on a
/// support `S` the equality-constrained minimizer is `v_S - t` with
/// `t = (sum v_S - r) / |S|`; the closest feasible candidate wins.
pub fn projection_oracle(v: &[f64], r: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n <= 16, "support enumeration is exponential");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let t = (support.iter().map(|&j| v[j]).sum::<f64>() - r) / support.len() as f64;
        let mut x = vec![0.0; n];
        let mut feasible = true;
        for &j in &support {
            x[j] = v[j] - t;
            if x[j] < -1e-12 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        for xj in x.iter_mut() {
            *xj = xj.max(0.0);
        }
        let d = dist(&x, v);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, x));
        }
    }
    best.expect("some support is feasible").1
}

/// Vertices of the product of simplices.
pub fn vertices(raw: &Raw) -> Vec<Profile> {
    let mut out: Vec<Profile> = vec![vec![]];
    for (ps, &r) in raw.paths.iter().zip(&raw.demands) {
        let mut next = Vec::new();
        for partial in &out {
            for k in 0..ps.len() {
                let mut block = vec![0.0; ps.len()];
                block[k] = r;
                let mut p = partial.clone();
                p.push(block);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Exhaustive grid search for instances where every DM has two paths. Grid
/// step `r_i / steps` on the first coordinate of each block. Returns the
/// best value and the worst-case distance of any feasible point to the grid.
pub fn grid_minimum(raw: &Raw, steps: usize) -> (f64, Profile, f64) {
    assert!(raw.paths.iter().all(|p| p.len() == 2));
    let n = raw.paths.len();
    let mut idx = vec![0usize; n];
    let mut best = (f64::INFINITY, vec![]);
    loop {
        let u: Profile = (0..n)
            .map(|i| {
                let x = raw.demands[i] * idx[i] as f64 / steps as f64;
                vec![x, raw.demands[i] - x]
            })
            .collect();
        let c = raw.team_cost(&u);
        if c < best.0 {
            best = (c, u);
        }
        let mut d = 0;
        loop {
            if d == n {
                // moving half a step in u_i^1 moves the block by sqrt(2) / 2 steps
                let cover = raw
                    .demands
                    .iter()
                    .map(|r| {
                        let h = r / steps as f64 / 2.0;
                        2.0 * h * h
                    })
                    .sum::<f64>()
                    .sqrt();
                return (best.0, best.1, cover);
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Upper bound on `|grad C|` over the strategy set: the gradient is affine,
/// so its norm peaks at a vertex.
pub fn team_gradient_bound(raw: &Raw) -> f64 {
    vertices(raw)
        .iter()
        .map(|v| {
            let g = fd_gradient(v, 1e-4, |_, u| raw.team_cost(u));
            flatten(&g).iter().map(|x| x * x).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}
