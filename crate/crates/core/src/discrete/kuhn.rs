use super::Lattice;
use crate::fields::LatticeField;
use num_complex::Complex64;

/// Piecewise-affine interpolation of site values over the Kuhn simplices of every cube.
#[derive(Debug, Clone)]
pub struct KuhnInterpolant<'a> {
    pub lattice: &'a Lattice,
    pub values: Vec<Complex64>,
}

pub fn kuhn_interpolate<'a>(w: &LatticeField, lattice: &'a Lattice) -> KuhnInterpolant<'a> {
    KuhnInterpolant { lattice, values: (0..w.phases.len()).map(|i| w.value(i)).collect() }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

impl<'a> KuhnInterpolant<'a> {
    /// Value at x, or `None` outside the union of cubes.
    pub fn eval(&self, x: &[f64]) -> Option<Complex64> {
        let (c, t) = self.lattice.locate(x)?;
        Some(self.eval_local(c, &t))
    }

    /// Value in cube c at local coordinates t ∈ [0,1]ⁿ.
    pub fn eval_local(&self, c: usize, t: &[f64]) -> Complex64 {
        let cube = &self.lattice.cubes()[c];
        let mut order: Vec<usize> = (0..t.len()).collect();
        order.sort_by(|&a, &b| t[b].total_cmp(&t[a]));
        let mut mask = 0usize;
        let mut v = self.values[cube[0]];
        for &d in &order {
            let next = mask | 1 << d;
            v += (self.values[cube[next]] - self.values[cube[mask]]) * t[d];
            mask = next;
        }
        v
    }

    /// Simplices of cube c as vertex bitmask chains, one per permutation.
    fn chains(n: usize) -> Vec<Vec<usize>> {
        permutations(n)
            .into_iter()
            .map(|p| {
                let mut chain = vec![0usize];
                let mut mask = 0;
                for d in p {
                    mask |= 1 << d;
                    chain.push(mask);
                }
                chain
            })
            .collect()
    }

    /// ∫ |∇v|² over the union of cubes, from the constant gradient of each simplex.
    pub fn dirichlet_integral(&self) -> f64 {
        let lat = self.lattice;
        let n = lat.n();
        let eps = lat.eps;
        let vol = eps.powi(n as i32) / factorial(n);
        let chains = Self::chains(n);
        lat.cubes()
            .iter()
            .map(|cube| {
                chains
                    .iter()
                    .map(|ch| {
                        let g2: f64 = ch
                            .windows(2)
                            .map(|w| ((self.values[cube[w[1]]] - self.values[cube[w[0]]]) / eps).norm_sqr())
                            .sum();
                        g2 * vol
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    /// ∫ (1 - |v|²)² over the union of cubes, exact for affine v on each simplex.
    pub fn potential_integral(&self) -> f64 {
        let lat = self.lattice;
        let n = lat.n();
        let vol = lat.eps.powi(n as i32) / factorial(n);
        let chains = Self::chains(n);
        let m = n + 1;
        let denom = factorial(n + 4);
        let nf = factorial(n);
        lat.cubes()
            .iter()
            .map(|cube| {
                chains
                    .iter()
                    .map(|ch| {
                        let w: Vec<Complex64> = ch.iter().map(|&b| self.values[cube[b]]).collect();
                        let h: Vec<f64> = (0..m * m)
                            .map(|ij| {
                                let (i, j) = (ij / m, ij % m);
                                1.0 - (w[i] * w[j].conj()).re
                            })
                            .collect();
                        let mut acc = 0.0;
                        let mut mult = vec![0usize; m];
                        for i in 0..m {
                            for j in 0..m {
                                for k in 0..m {
                                    for l in 0..m {
                                        mult.iter_mut().for_each(|v| *v = 0);
                                        for q in [i, j, k, l] {
                                            mult[q] += 1;
                                        }
                                        let mono: f64 = mult.iter().map(|&a| factorial(a)).product();
                                        acc += h[i * m + j] * h[k * m + l] * mono;
                                    }
                                }
                            }
                        }
                        acc * nf / denom * vol
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

/// (1-β)/(2|log ε|) ∫|∇v|² + βc₀/(ε²|log ε|) ∫(1-|v|²)².
pub fn gl_energy(v: &KuhnInterpolant, eps: f64, beta: f64, c0: f64) -> f64 {
    let l = eps.ln().abs();
    (1.0 - beta) / (2.0 * l) * v.dirichlet_integral() + beta * c0 / (eps * eps * l) * v.potential_integral()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EGlCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// E_{ε,ν,z}(w) against (1/(2|log ε|)) ∫ |∇v|² on the union of cubes.
pub fn check_e_ge_gl_grad(w: &LatticeField, lattice: &Lattice) -> crate::error::Result<EGlCheck> {
    let lhs = super::discrete_energy(w, lattice)?;
    let v = kuhn_interpolate(w, lattice);
    let rhs = v.dirichlet_integral() / (2.0 * lattice.eps.ln().abs());
    Ok(EGlCheck { lhs, rhs, pass: lhs >= rhs * (1.0 - 1e-12) - 1e-300 })
}
