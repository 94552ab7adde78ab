//! Brute-force oracles for the exact integrals: every process value is
//! recomputed from the raw increments, without the library's prefix sums,
//! ladder decomposition or floor snapping.

use vervaat::distributions::{catalog, DistributionKind, DistributionSpec, ValidatedSpec};
use vervaat::vervaat::VervaatEvaluator;
use vervaat::walk::{build_walk, WalkPath};

struct Brute<'a> {
    x: &'a [f64],
    n: f64,
    mu: f64,
}

impl<'a> Brute<'a> {
    fn new(p: &'a WalkPath) -> Self {
        Self {
            x: p.increments(),
            n: p.n() as f64,
            mu: p.mu(),
        }
    }

    fn partial(&self, k: usize) -> f64 {
        self.x[..k].iter().sum()
    }

    fn bar_s(&self, s: f64) -> f64 {
        let k = (self.n * s).floor() as usize;
        self.partial(k) / (self.n * self.mu) - s
    }

    fn passage(&self, level: f64) -> usize {
        let mut acc = 0.0;
        for (k, &x) in self.x.iter().enumerate() {
            acc += x;
            if acc > level {
                return k + 1;
            }
        }
        panic!("walk too short for level {level}");
    }

    fn bar_n(&self, s: f64) -> f64 {
        self.passage(self.n * self.mu * s) as f64 / self.n - s
    }

    /// Points where either step function can jump, inside `(lo, hi)`.
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        let mut acc = 0.0;
        for (k, &x) in self.x.iter().enumerate() {
            acc += x;
            pts.push((k + 1) as f64 / self.n);
            pts.push(acc / (self.n * self.mu));
        }
        pts.retain(|&p| p >= lo && p <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫_lo^hi f` for `f` affine between breakpoints.
    fn integrate(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let (a, b, sign) = if lo <= hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
        let pts = self.breakpoints(a, b);
        let mut total = 0.0;
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            total += f(mid) * (w[1] - w[0]);
        }
        sign * total
    }

    fn v(&self, t: f64) -> f64 {
        self.integrate(|s| self.bar_s(s) + self.bar_n(s), 0.0, t)
    }

    fn a(&self, t: f64) -> f64 {
        let lower = self.passage(self.n * self.mu * t) as f64 / self.n;
        let end = self.bar_s(t);
        self.integrate(|s| self.bar_s(s) - end, lower, t)
    }

    /// Sum over steps before the first passage of `S_k - max_{j<=k} S_j`.
    fn b(&self, t: f64) -> f64 {
        let stop = self.passage(self.n * self.mu * t);
        let (mut acc, mut best, mut total) = (0.0f64, 0.0f64, 0.0);
        for &x in &self.x[..stop - 1] {
            acc += x;
            best = best.max(acc);
            total += acc - best;
        }
        total / (self.n * self.n * self.mu)
    }

    fn midpoint_v(&self, t: f64, h: f64) -> f64 {
        let steps = (t / h).round() as usize;
        let h = t / steps as f64;
        // Monotone pointers instead of repeated scans.
        let (mut k_n, mut acc_n) = (0usize, 0.0f64);
        let (mut k_s, mut acc_s) = (0usize, 0.0f64);
        let mut total = 0.0;
        for i in 0..steps {
            let s = (i as f64 + 0.5) * h;
            let floor = (self.n * s).floor() as usize;
            while k_s < floor {
                acc_s += self.x[k_s];
                k_s += 1;
            }
            let level = self.n * self.mu * s;
            while !(acc_n > level && k_n > 0) {
                acc_n += self.x[k_n];
                k_n += 1;
            }
            total += acc_s / (self.n * self.mu) - s + k_n as f64 / self.n - s;
        }
        total * h
    }

    /// Bound on the midpoint error: half a mesh per unit of jump size.
    fn midpoint_bound(&self, h: f64) -> f64 {
        let variation: f64 = self.x.iter().map(|x| x.abs()).sum::<f64>() / (self.n * self.mu) + self.x.len() as f64 / self.n;
        h * variation
    }
}

fn two_point() -> ValidatedSpec {
    DistributionSpec::new(DistributionKind::TwoPoint { a: -1.0, b: 1.0, p: 0.7 })
        .validate()
        .unwrap()
}

#[test]
fn piecewise_oracle_small_walk() {
    let path = build_walk(&two_point(), 50, 17).unwrap();
    let e = VervaatEvaluator::new(&path);
    let b = Brute::new(&path);
    let t = 0.73;
    let v = e.integrate_v(t).unwrap().v;
    assert!((v - b.v(t)).abs() < 1e-12, "{v} vs {}", b.v(t));
    assert!((e.compute_a(t).unwrap() - b.a(t)).abs() < 1e-12);
    assert!((e.compute_b(t).unwrap() - b.b(t)).abs() < 1e-12);
}

#[test]
fn midpoint_quadrature_small_walk() {
    let path = build_walk(&two_point(), 50, 17).unwrap();
    let e = VervaatEvaluator::new(&path);
    let b = Brute::new(&path);
    let h = 1e-6;
    let q = b.midpoint_v(0.73, h);
    let v = e.integrate_v(0.73).unwrap().v;
    assert!((v - q).abs() <= b.midpoint_bound(h), "{v} vs {q}");
}

#[test]
fn oracle_representation_from_brute_parts() {
    for (i, spec) in catalog().into_iter().enumerate() {
        for seed in 0..10 {
            let path = build_walk(&spec, 1000, 100 * i as u64 + seed).unwrap();
            let e = VervaatEvaluator::new(&path);
            let b = Brute::new(&path);
            for t in [0.137, 0.5, 0.91] {
                let m = b.bar_s(t) + b.bar_n(t);
                let s = b.bar_s(t);
                let repr = b.a(t) + b.b(t) - 0.5 * m * m + 0.5 * s * s;
                let v = e.integrate_v(t).unwrap().v;
                assert!((v - b.v(t)).abs() < 1e-10, "{:?} seed {seed} t {t}", spec.spec);
                assert!((v - repr).abs() < 1e-10, "{:?} seed {seed} t {t}", spec.spec);
            }
        }
    }
}

#[test]
fn midpoint_quadrature_random_walks() {
    for seed in 0..10 {
        let path = build_walk(&catalog()[3], 1000, seed).unwrap();
        let e = VervaatEvaluator::new(&path);
        let b = Brute::new(&path);
        let h = 1e-6;
        let q = b.midpoint_v(1.0, h);
        let v = e.integrate_v(1.0).unwrap().v;
        assert!((v - q).abs() <= b.midpoint_bound(h), "seed {seed}: {v} vs {q}");
    }
}
