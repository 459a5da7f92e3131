//! Reference computations that avoid the library's quadrature routes.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on P_m.
pub fn legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let eval = |z: f64| {
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=m {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        (p1, m as f64 * (z * p1 - p0) / (z * z - 1.0))
    };
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = eval(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = eval(z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

pub struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
    levels: usize,
}

impl Rule {
    pub fn new(m: usize, levels: usize) -> Rule {
        let (x, w) = legendre(m);
        Rule { x, w, levels }
    }

    pub fn panel<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: &mut F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.x.iter().zip(&self.w).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
    }

    /// Panels halving toward both endpoints.
    pub fn graded<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: &mut F) -> f64 {
        let m = 0.5 * (a + b);
        let (mut lo, mut hi) = (m, m);
        let mut acc = 0.0;
        for _ in 0..self.levels {
            let nlo = a + 0.5 * (lo - a);
            let nhi = b - 0.5 * (b - hi);
            acc += self.panel(nlo, lo, f) + self.panel(hi, nhi, f);
            lo = nlo;
            hi = nhi;
        }
        acc + self.panel(a, lo, f) + self.panel(hi, b, f)
    }

    /// ∫₀^len t^{-s} g(t) dt for g smooth at 0: halving panels, then g(0)ℓ^{1-s}/(1-s) on the last one.
    pub fn weakly_singular<G: FnMut(f64) -> f64>(&self, len: f64, s: f64, g: &mut G) -> f64 {
        let mut f = |t: f64| t.powf(-s) * g(t);
        let mut acc = self.graded(0.5 * len, len, &mut f);
        let mut hi = 0.5 * len;
        for _ in 0..2 * self.levels {
            let lo = 0.5 * hi;
            acc += self.panel(lo, hi, &mut f);
            hi = lo;
        }
        acc + g(0.0) * hi.powf(1.0 - s) / (1.0 - s)
    }
}

/// [u₁]²_{H^{(1+s)/2}((-tan Θ, tan Θ))} with x = tan θ, where
/// |u₁(x) - u₁(y)|²/|x-y|^{2+s} dx dy = (cos θ cos ψ)^s (2 sin(δ/2))^{-s} cos(δ/2)^{-2-s} dθ dψ.
pub fn line_energy_angle(rule: &Rule, s: f64, big_theta: f64) -> f64 {
    let mut outer = |t: f64| {
        let ct = t.cos();
        let mut g = |d: f64| {
            let ratio = if d == 0.0 { 1.0 } else { d / (2.0 * (0.5 * d).sin()) };
            (ct * (t - d).cos()).powf(s) * ratio.powf(s) * (0.5 * d).cos().powf(-2.0 - s)
        };
        rule.weakly_singular(t + big_theta, s, &mut g)
    };
    2.0 * rule.graded(-big_theta, big_theta, &mut outer)
}

/// (1-s)²[u_⋆]²_{H^{(1+s)/2}(D₁)} = 2π(1-s)² ∫₀¹ r^{-s} F(arccos r) dr, integrated in r directly.
pub fn vortex_limit_oracle(s: f64) -> f64 {
    let rule = Rule::new(6, 10);
    let e = 1.0 - s;
    let mut g = |r: f64| line_energy_angle(&rule, s, r.acos());
    2.0 * PI * e * e * rule.weakly_singular(1.0, s, &mut g)
}

/// (1-s)[u₁]²_{H^{(1+s)/2}((-a,a))}.
pub fn line_oracle(s: f64, a: f64) -> f64 {
    let rule = Rule::new(8, 14);
    (1.0 - s) * line_energy_angle(&rule, s, a.atan())
}

/// Discrete energy of the planar vortex on the lattice (k + ½)ε ∩ (-1,1)², summed row by row.
pub fn lattice_vortex_oracle(eps: f64) -> f64 {
    let kmax = (1.0 / eps).ceil() as i64 + 1;
    let coord = |k: i64| (k as f64 + 0.5) * eps;
    let inside = |k: i64| coord(k).abs() < 1.0;
    let angle = |i: i64, j: i64| coord(j).atan2(coord(i));
    let mut sum = 0.0;
    for i in -kmax..=kmax {
        for j in -kmax..=kmax {
            if !(inside(i) && inside(j)) {
                continue;
            }
            if inside(i + 1) {
                sum += 2.0 - 2.0 * (angle(i + 1, j) - angle(i, j)).cos();
            }
            if inside(j + 1) {
                sum += 2.0 - 2.0 * (angle(i, j + 1) - angle(i, j)).cos();
            }
        }
    }
    sum / (2.0 * eps.ln().abs())
}
