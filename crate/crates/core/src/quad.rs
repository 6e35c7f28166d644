//! Quadrature building blocks: double-exponential rules, nested integration over
//! ordered point configurations, and stratified Monte Carlo.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest number of integration points handled by the nested rule.
pub const MAX_POINTS: usize = 8;
/// Largest number of simultaneously integrated outputs.
pub const MAX_OUT: usize = 8;

const T_MAX: f64 = 5.5;
const TINY: f64 = 1e-300;

#[derive(Clone, Copy, Debug)]
struct Node {
    // fraction of the interval from the left end, fraction to the right end, weight per unit length
    left: f64,
    right: f64,
    weight: f64,
    even: bool,
}

/// Tanh-sinh nodes on [0, 1] with both endpoint distances kept separately.
#[derive(Clone, Debug)]
pub struct DeRule {
    nodes: Vec<Node>,
    pub h: f64,
}

impl DeRule {
    pub fn new(h: f64) -> Self {
        let k_max = (T_MAX / h).ceil() as i64;
        let mut nodes = Vec::with_capacity((2 * k_max + 1) as usize);
        for k in -k_max..=k_max {
            let t = k as f64 * h;
            let y = PI * t.sinh();
            let left = logistic(y);
            let right = logistic(-y);
            // d/dt logistic(pi sinh t) = pi cosh t * left * right
            let weight = h * PI * t.cosh() * left * right;
            nodes.push(Node {
                left,
                right,
                weight,
                even: k % 2 == 0,
            });
        }
        DeRule { nodes, h }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Pick the finest step in {1/2, ..., 1/32} whose full tensor size fits the budget.
    pub fn for_budget(dim: usize, budget: u64) -> (Self, bool) {
        let mut best = None;
        for j in 1..=5 {
            let h = 0.5f64.powi(j);
            let n = 2 * (T_MAX / h).ceil() as u64 + 1;
            let cost = n.saturating_pow(dim as u32);
            if cost <= budget {
                best = Some(h);
            }
        }
        match best {
            Some(h) => (DeRule::new(h), false),
            None => (DeRule::new(0.5), true),
        }
    }
}

fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// Adaptive tanh-sinh on [a, b]. `f(x, x - a, b - x)` gets both endpoint distances.
///
/// Returns the value and the difference between the last two refinements.
pub fn de_integrate<F>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64, f64, f64) -> f64,
{
    let len = b - a;
    let eval = |t: f64| -> f64 {
        let y = PI * t.sinh();
        let l = logistic(y);
        let r = logistic(-y);
        let xa = len * l;
        let xb = len * r;
        if xa <= TINY || xb <= TINY {
            return 0.0;
        }
        let v = f(a + xa, xa, xb);
        if v.is_finite() {
            v * len * PI * t.cosh() * l * r
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let k_max = (T_MAX / h).ceil() as i64;
    let mut sum: f64 = (-k_max..=k_max).map(|k| eval(k as f64 * h)).sum();
    let mut est = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..8 {
        h *= 0.5;
        let k_max = (T_MAX / h).ceil() as i64;
        let odd: f64 = (-k_max..=k_max).filter(|k| k % 2 != 0).map(|k| eval(k as f64 * h)).sum();
        sum += odd;
        let next = sum * h;
        err = (next - est).abs();
        est = next;
        if err <= tol * est.abs().max(1e-300) {
            break;
        }
    }
    (est, err)
}

/// Exp-sinh rule on [a, infinity) for integrands decaying at infinity.
pub fn de_integrate_inf<F>(f: F, a: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        if s > 700.0 {
            return 0.0;
        }
        let e = s.exp();
        let v = f(a + e);
        if v.is_finite() {
            v * 0.5 * PI * t.cosh() * e
        } else {
            0.0
        }
    };
    let t_lo = -4.5;
    let t_hi = 4.5;
    let mut h = 0.5;
    let nodes = |h: f64| -> (i64, i64) { ((t_lo / h).floor() as i64, (t_hi / h).ceil() as i64) };
    let (lo, hi) = nodes(h);
    let mut sum: f64 = (lo..=hi).map(|k| eval(k as f64 * h)).sum();
    let mut est = sum * h;
    let mut err = f64::INFINITY;
    for _ in 0..8 {
        h *= 0.5;
        let (lo, hi) = nodes(h);
        let odd: f64 = (lo..=hi).filter(|k| k % 2 != 0).map(|k| eval(k as f64 * h)).sum();
        sum += odd;
        let next = sum * h;
        err = (next - est).abs();
        est = next;
        if err <= tol * est.abs().max(1e-300) {
            break;
        }
    }
    (est, err)
}

/// A sub-interval of [0, 1] holding `count` integration points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// Integrand over configurations of points in [0, 1] built from a pair term and a point weight.
///
/// The full integrand is `finish(sum over pairs of pair(d, 1-d), product of point(x, 1-x))`.
pub trait ConfigIntegrand: Sync {
    fn outputs(&self) -> usize;
    fn pair(&self, d: f64, dc: f64) -> f64;
    fn point(&self, x: f64, xc: f64) -> f64;
    fn finish(&self, pair_sum: f64, weight: f64, out: &mut [f64; MAX_OUT]);
}

/// Result of a nested or Monte Carlo integration with one entry per output.
#[derive(Clone, Debug)]
pub struct VecEstimate {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub evaluations: u64,
    pub budget_exceeded: bool,
}

#[derive(Clone, Copy)]
struct Level {
    seg: usize,
    first_in_seg: bool,
}

#[derive(Clone, Copy)]
struct State {
    off: [f64; MAX_POINTS],
    pos: [f64; MAX_POINTS],
    to_end1: [f64; MAX_POINTS],
    to_segend: [f64; MAX_POINTS],
    gap: [f64; MAX_POINTS],
    pair_sum: f64,
    weight: f64,
    // product of the node weights so far, and the coarse-rule factor (2^m, or 0 once an odd node is used)
    qw: f64,
    coarse: f64,
}

struct Nested<'a, I: ConfigIntegrand> {
    f: &'a I,
    rule: &'a DeRule,
    segs: &'a [Segment],
    levels: Vec<Level>,
}

type Acc = ([f64; MAX_OUT], [f64; MAX_OUT], u64);

impl<'a, I: ConfigIntegrand> Nested<'a, I> {
    fn place(&self, m: usize, st: &State, u: f64, rem: f64) -> State {
        let lv = self.levels[m];
        let seg = self.segs[lv.seg];
        let mut s = *st;
        let off = if lv.first_in_seg { u } else { st.off[m - 1] + u };
        s.off[m] = off;
        s.pos[m] = seg.start + off;
        s.to_segend[m] = rem;
        s.to_end1[m] = (1.0 - seg.end) + rem;
        s.gap[m] = u;
        let mut add = 0.0;
        let mut run = 0.0;
        for p in (0..m).rev() {
            let d = if self.levels[p].seg == lv.seg {
                run += s.gap[p + 1];
                run
            } else {
                let ps = self.segs[self.levels[p].seg];
                s.to_segend[p] + (seg.start - ps.end) + off
            };
            let dc = s.pos[p] + s.to_end1[m];
            add += self.f.pair(d, dc);
        }
        s.pair_sum += add;
        s.weight *= self.f.point(s.pos[m], s.to_end1[m]);
        s
    }

    fn remaining(&self, m: usize, st: &State) -> f64 {
        let lv = self.levels[m];
        if lv.first_in_seg {
            let seg = self.segs[lv.seg];
            seg.end - seg.start
        } else {
            st.to_segend[m - 1]
        }
    }

    fn node_value(&self, m: usize, st: &State, node: &Node, r: f64) -> Option<Acc> {
        let u = r * node.left;
        let rem = r * node.right;
        if u <= TINY || rem <= TINY {
            return None;
        }
        let mut next = self.place(m, st, u, rem);
        next.qw *= r * node.weight;
        next.coarse = if node.even { 2.0 * st.coarse } else { 0.0 };
        if m + 1 == self.levels.len() {
            // the node weights enter before finish so huge integrand values meet tiny weights first
            let mut out = [0.0; MAX_OUT];
            self.f.finish(next.pair_sum, next.weight * next.qw, &mut out);
            let mut coarse = [0.0; MAX_OUT];
            if next.coarse != 0.0 {
                for (c, o) in coarse.iter_mut().zip(&out) {
                    *c = next.coarse * o;
                }
            }
            Some((out, coarse, 1))
        } else {
            Some(self.level(m + 1, &next))
        }
    }

    fn level(&self, m: usize, st: &State) -> Acc {
        let r = self.remaining(m, st);
        let mut full = [0.0; MAX_OUT];
        let mut coarse = [0.0; MAX_OUT];
        let mut evals = 0;
        for node in &self.rule.nodes {
            if let Some((a, b, e)) = self.node_value(m, st, node, r) {
                evals += e;
                accumulate(&mut full, &mut coarse, &a, &b, self.f.outputs());
            }
        }
        (full, coarse, evals)
    }

    fn run(&self) -> Acc {
        let st = State {
            off: [0.0; MAX_POINTS],
            pos: [0.0; MAX_POINTS],
            to_end1: [0.0; MAX_POINTS],
            to_segend: [0.0; MAX_POINTS],
            gap: [0.0; MAX_POINTS],
            pair_sum: 0.0,
            weight: 1.0,
            qw: 1.0,
            coarse: 1.0,
        };
        let r = self.remaining(0, &st);
        let parts: Vec<Option<Acc>> = self
            .rule
            .nodes
            .par_iter()
            .map(|node| self.node_value(0, &st, node, r))
            .collect();
        let mut full = [0.0; MAX_OUT];
        let mut coarse = [0.0; MAX_OUT];
        let mut evals = 0;
        for (a, b, e) in parts.into_iter().flatten() {
            evals += e;
            accumulate(&mut full, &mut coarse, &a, &b, self.f.outputs());
        }
        (full, coarse, evals)
    }
}

fn accumulate(
    full: &mut [f64; MAX_OUT],
    coarse: &mut [f64; MAX_OUT],
    a: &[f64; MAX_OUT],
    b: &[f64; MAX_OUT],
    n: usize,
) {
    for i in 0..n {
        full[i] += a[i];
        coarse[i] += b[i];
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Integrate a symmetric configuration integrand with nested tanh-sinh rules.
///
/// Points within a segment are ordered (the factorial is restored at the end) so
/// that every coincidence singularity sits at an endpoint of some nested interval.
/// The error is the gap to the same rule at twice the step.
pub fn nested_integrate<I: ConfigIntegrand>(f: &I, segs: &[Segment], budget: u64) -> VecEstimate {
    let total: usize = segs.iter().map(|s| s.count).sum();
    assert!(total <= MAX_POINTS, "at most {MAX_POINTS} points");
    let outs = f.outputs();
    assert!(outs <= MAX_OUT);
    if total == 0 {
        let mut out = [0.0; MAX_OUT];
        f.finish(0.0, 1.0, &mut out);
        return VecEstimate {
            value: out[..outs].to_vec(),
            error: vec![0.0; outs],
            evaluations: 1,
            budget_exceeded: false,
        };
    }
    let (rule, exceeded) = DeRule::for_budget(total, budget);
    let mut levels = Vec::with_capacity(total);
    for (j, s) in segs.iter().enumerate() {
        for i in 0..s.count {
            levels.push(Level {
                seg: j,
                first_in_seg: i == 0,
            });
        }
    }
    let nested = Nested {
        f,
        rule: &rule,
        segs,
        levels,
    };
    let (full, coarse, evals) = nested.run();
    let sym: f64 = segs.iter().map(|s| factorial(s.count)).product();
    let value: Vec<f64> = (0..outs).map(|i| full[i] * sym).collect();
    let error = (0..outs)
        .map(|i| ((full[i] - coarse[i]).abs() * sym).max(4.0 * f64::EPSILON * value[i].abs()))
        .collect();
    VecEstimate {
        value,
        error,
        evaluations: evals,
        budget_exceeded: exceeded,
    }
}

/// Stratified Monte Carlo over independent uniform points in the segments.
///
/// The first coordinate is split into equal strata; each stratum has its own
/// ChaCha stream so the result does not depend on the thread count. The error is
/// three pooled standard errors.
pub fn monte_carlo<I: ConfigIntegrand>(f: &I, segs: &[Segment], samples: u64, seed: u64) -> VecEstimate {
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for s in segs {
        for _ in 0..s.count {
            spans.push((s.start, s.end));
        }
    }
    let dim = spans.len();
    let outs = f.outputs();
    let strata: u64 = 64.min(samples.max(1));
    let per = (samples / strata).max(2);
    let volume: f64 = spans.iter().map(|(a, b)| b - a).product();
    let results: Vec<(Vec<f64>, Vec<f64>)> = (0..strata)
        .into_par_iter()
        .map(|st| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(st);
            let mut sum = vec![0.0; outs];
            let mut sum2 = vec![0.0; outs];
            let mut x = vec![0.0; dim];
            let mut out = [0.0; MAX_OUT];
            for _ in 0..per {
                for (i, (a, b)) in spans.iter().enumerate() {
                    let u: f64 = rng.gen();
                    let frac = if i == 0 { (st as f64 + u) / strata as f64 } else { u };
                    x[i] = a + (b - a) * frac;
                }
                let mut pair_sum = 0.0;
                let mut weight = 1.0;
                for i in 0..dim {
                    weight *= f.point(x[i], 1.0 - x[i]);
                    for j in 0..i {
                        let d = (x[i] - x[j]).abs();
                        pair_sum += f.pair(d, 1.0 - d);
                    }
                }
                f.finish(pair_sum, weight, &mut out);
                for k in 0..outs {
                    let v = if out[k].is_finite() { out[k] } else { 0.0 };
                    sum[k] += v;
                    sum2[k] += v * v;
                }
            }
            let n = per as f64;
            let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
            let var: Vec<f64> = (0..outs)
                .map(|k| ((sum2[k] / n - mean[k] * mean[k]) * n / (n - 1.0)).max(0.0))
                .collect();
            (mean, var)
        })
        .collect();
    let s = strata as f64;
    let mut value = vec![0.0; outs];
    let mut var = vec![0.0; outs];
    for (mean, v) in &results {
        for k in 0..outs {
            value[k] += mean[k] / s;
            var[k] += v[k] / (s * s * per as f64);
        }
    }
    VecEstimate {
        value: value.iter().map(|v| v * volume).collect(),
        error: var.iter().map(|v| 3.0 * v.sqrt() * volume).collect(),
        evaluations: strata * per,
        budget_exceeded: false,
    }
}
