use crate::special::gamma_fn;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// β^{k,q}_{k+q-n,n} = Γ((k+1)/2)Γ((q+1)/2) / (Γ((k+q-n+1)/2)Γ((n+1)/2)).
pub fn crofton_beta(n: usize, k: usize, q: usize) -> f64 {
    let i = (k + q - n) as f64;
    gamma_fn(0.5 * (k as f64 + 1.0)) * gamma_fn(0.5 * (q as f64 + 1.0))
        / (gamma_fn(0.5 * (i + 1.0)) * gamma_fn(0.5 * (n as f64 + 1.0)))
}

/// Planar rectifiable curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CroftonCurve {
    Circle { center: [f64; 2], radius: f64 },
    Polyline { points: Vec<[f64; 2]>, closed: bool },
    Empty,
}

impl CroftonCurve {
    pub fn length(&self) -> f64 {
        match self {
            CroftonCurve::Circle { radius, .. } => 2.0 * PI * radius,
            CroftonCurve::Polyline { points, closed } => {
                let mut l: f64 = points.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
                if *closed && points.len() > 2 {
                    let (a, b) = (points[0], points[points.len() - 1]);
                    l += (a[0] - b[0]).hypot(a[1] - b[1]);
                }
                l
            }
            CroftonCurve::Empty => 0.0,
        }
    }

    fn bounding_circle(&self) -> Option<([f64; 2], f64)> {
        match self {
            CroftonCurve::Circle { center, radius } => Some((*center, *radius)),
            CroftonCurve::Polyline { points, .. } if !points.is_empty() => {
                let k = points.len() as f64;
                let c = [
                    points.iter().map(|p| p[0]).sum::<f64>() / k,
                    points.iter().map(|p| p[1]).sum::<f64>() / k,
                ];
                let r = points.iter().map(|p| (p[0] - c[0]).hypot(p[1] - c[1])).fold(0.0, f64::max);
                Some((c, r))
            }
            _ => None,
        }
    }

    /// Intersections with {x : x·n = h}; second value counts tangential hits.
    fn crossings(&self, normal: [f64; 2], h: f64) -> (usize, usize) {
        match self {
            CroftonCurve::Circle { center, radius } => {
                let d = (center[0] * normal[0] + center[1] * normal[1] - h).abs();
                if d < *radius {
                    (2, 0)
                } else if d == *radius {
                    (1, 1)
                } else {
                    (0, 0)
                }
            }
            CroftonCurve::Polyline { points, closed } => {
                let m = points.len();
                if m < 2 {
                    return (0, 0);
                }
                let f = |p: &[f64; 2]| p[0] * normal[0] + p[1] * normal[1] - h;
                let segs = if *closed { m } else { m - 1 };
                let (mut c, mut t) = (0, 0);
                for i in 0..segs {
                    let (a, b) = (f(&points[i]), f(&points[(i + 1) % m]));
                    if a == 0.0 || b == 0.0 {
                        t += 1;
                        // half-open convention keeps shared vertices from double counting
                        if (a == 0.0) != (b == 0.0) && (a > 0.0 || b > 0.0) {
                            c += 1;
                        }
                    } else if (a < 0.0) != (b < 0.0) {
                        c += 1;
                    }
                }
                (c, t)
            }
            CroftonCurve::Empty => (0, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CroftonResult {
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub beta: f64,
    pub length: f64,
    pub samples: usize,
    pub tangential: usize,
    pub warning: bool,
}

/// Monte Carlo of ∫dL ∫ H⁰(M ∩ (L+h)) dh over lines against β·length.
pub fn crofton_check<R: Rng + ?Sized>(curve: &CroftonCurve, samples: usize, rng: &mut R) -> CroftonResult {
    let beta = crofton_beta(2, 1, 1);
    let length = curve.length();
    let Some((c, r)) = curve.bounding_circle() else {
        return CroftonResult {
            lhs: 0.0,
            lhs_error: 0.0,
            rhs: 0.0,
            beta,
            length: 0.0,
            samples,
            tangential: 0,
            warning: false,
        };
    };
    let half = 1.25 * r.max(1e-300);
    let (mut s1, mut s2, mut tang) = (0.0, 0.0, 0usize);
    for _ in 0..samples {
        let phi = PI * rng.random::<f64>();
        let normal = [phi.cos(), phi.sin()];
        let h = c[0] * normal[0] + c[1] * normal[1] + half * (2.0 * rng.random::<f64>() - 1.0);
        let (k, t) = curve.crossings(normal, h);
        tang += t;
        let v = 2.0 * half * k as f64;
        s1 += v;
        s2 += v * v;
    }
    let m = s1 / samples as f64;
    let var = (s2 / samples as f64 - m * m).max(0.0);
    CroftonResult {
        lhs: m,
        lhs_error: (var / samples as f64).sqrt(),
        rhs: beta * length,
        beta,
        length,
        samples,
        tangential: tang,
        warning: tang as f64 > 1e-3 * samples as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_line_constant() {
        assert!((crofton_beta(2, 1, 1) - 2.0 / PI).abs() < 1e-14);
        // lines against surfaces in R³: β^{1,2}_{0,3} = Γ(1)Γ(3/2)/(Γ(1/2)Γ(2)) = ½
        assert!((crofton_beta(3, 1, 2) - 0.5).abs() < 1e-14);
    }
}
