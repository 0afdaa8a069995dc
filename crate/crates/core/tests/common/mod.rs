//! Closed-form reference states for the tensor-core checks.
//!
//! A `GaussMix` is `sum_k exp(c_k + b_k . x - x^T A x / 2)` with one complex
//! symmetric `A` shared by every term. That family is closed under harmonic
//! evolution (real time = phase rotation, imaginary time = photon damping),
//! orthogonal coordinate maps, displacements and position collapse, and all
//! of those act on it analytically.

#![allow(dead_code)]

use num_complex::Complex64 as Z;
use qrlsim_core::grid::GridSpec;

#[derive(Clone, Debug)]
pub struct GaussMix {
    pub dim: usize,
    pub a: Vec<Z>,
    pub terms: Vec<(Z, Vec<Z>)>,
}

/// One tooth `w exp(-a (x - mu)^2 / 2 + i p x)`.
#[derive(Clone, Copy, Debug)]
pub struct Tooth {
    pub w: Z,
    pub mu: f64,
    pub p: f64,
}

pub fn tooth(w: f64, mu: f64) -> Tooth {
    Tooth { w: Z::new(w, 0.0), mu, p: 0.0 }
}

impl GaussMix {
    pub fn single(a: f64, teeth: &[Tooth]) -> Self {
        let terms = teeth
            .iter()
            .map(|t| (t.w.ln() - a * t.mu * t.mu / 2.0, vec![Z::new(a * t.mu, t.p)]))
            .collect();
        Self { dim: 1, a: vec![Z::new(a, 0.0)], terms }
    }

    /// Ideal-looking comb: narrow teeth at `offset + k period` for |position| < reach.
    pub fn comb(a: f64, period: f64, offset: f64, reach: f64) -> Self {
        let kmax = (reach / period).ceil() as i64 + 1;
        let teeth: Vec<Tooth> = (-kmax..=kmax)
            .map(|k| offset + k as f64 * period)
            .filter(|y| y.abs() < reach)
            .map(|y| tooth(1.0, y))
            .collect();
        Self::single(a, &teeth)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let dim = self.dim + other.dim;
        let mut a = vec![Z::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                a[i * dim + j] = self.a[i * self.dim + j];
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                a[(self.dim + i) * dim + self.dim + j] = other.a[i * other.dim + j];
            }
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, b1) in &self.terms {
            for (c2, b2) in &other.terms {
                let mut b = b1.clone();
                b.extend_from_slice(b2);
                terms.push((c1 + c2, b));
            }
        }
        Self { dim, a, terms }
    }

    fn at(&self, i: usize, j: usize) -> Z {
        self.a[i * self.dim + j]
    }

    /// `exp(-i t (n + 1/2))` on mode `j` up to a global factor; `t = -i eps` damps.
    pub fn evolve(&mut self, j: usize, t: Z) {
        if t.norm() == 0.0 {
            return;
        }
        let d = self.dim;
        let s = t.sin();
        let cot = t.cos() / s;
        let i = Z::new(0.0, 1.0);
        let alpha = self.at(j, j) - i * cot;
        let u: Vec<Z> = (0..d).map(|k| if k == j { i / s } else { self.at(j, k) }).collect();
        let mut a = self.a.clone();
        for k in 0..d {
            a[j * d + k] = Z::new(0.0, 0.0);
            a[k * d + j] = Z::new(0.0, 0.0);
        }
        a[j * d + j] = -i * cot;
        for k in 0..d {
            for l in 0..d {
                a[k * d + l] -= u[k] * u[l] / alpha;
            }
        }
        self.a = a;
        for (c, b) in &mut self.terms {
            let bj = b[j];
            *c += bj * bj / (2.0 * alpha);
            for k in 0..d {
                let base = if k == j { Z::new(0.0, 0.0) } else { b[k] };
                b[k] = base - bj * u[k] / alpha;
            }
        }
    }

    /// Simulator rotation `exp(+i theta n)`.
    pub fn rotate(&mut self, j: usize, theta: f64) {
        self.evolve(j, Z::new(-theta, 0.0));
    }

    pub fn damp(&mut self, j: usize, eps: f64) {
        self.evolve(j, Z::new(0.0, -eps));
    }

    /// `psi'(x) = psi(M x)` with `M` acting on coordinates (i, i+1).
    fn coord_map(&mut self, i: usize, m: [[f64; 2]; 2]) {
        let d = self.dim;
        let mut full = vec![0.0; d * d];
        for k in 0..d {
            full[k * d + k] = 1.0;
        }
        for r in 0..2 {
            for c in 0..2 {
                full[(i + r) * d + i + c] = m[r][c];
            }
        }
        let mut a = vec![Z::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Z::new(0.0, 0.0);
                for k in 0..d {
                    for l in 0..d {
                        acc += full[k * d + r] * self.at(k, l) * full[l * d + c];
                    }
                }
                a[r * d + c] = acc;
            }
        }
        self.a = a;
        for (_, b) in &mut self.terms {
            let old = b.clone();
            for r in 0..d {
                b[r] = (0..d).map(|k| old[k] * full[k * d + r]).sum();
            }
        }
    }

    /// 50:50 beam splitter; `conv > 0` sends means (m_i, m_j) to ((m_i+m_j)/sqrt2, (m_j-m_i)/sqrt2).
    pub fn beamsplitter(&mut self, i: usize, conv: i32) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        if conv > 0 {
            self.coord_map(i, [[h, -h], [h, h]]);
        } else {
            self.coord_map(i, [[h, h], [-h, h]]);
        }
    }

    /// `D(alpha)` with `alpha = (q0 + i p0)/sqrt2` on mode `j`.
    pub fn displace(&mut self, j: usize, q0: f64, p0: f64) {
        let d = self.dim;
        let ajj = self.at(j, j);
        let col: Vec<Z> = (0..d).map(|k| self.at(k, j)).collect();
        for (c, b) in &mut self.terms {
            *c += -q0 * b[j] - 0.5 * q0 * q0 * ajj + Z::new(0.0, -q0 * p0 / 2.0);
            for k in 0..d {
                b[k] += q0 * col[k];
            }
            b[j] += Z::new(0.0, p0);
        }
    }

    /// Condition on `x_j = m` and drop the coordinate.
    pub fn collapse(&mut self, j: usize, m: f64) {
        let d = self.dim;
        let ajj = self.at(j, j);
        let col: Vec<Z> = (0..d).map(|k| self.at(k, j)).collect();
        for (c, b) in &mut self.terms {
            *c += b[j] * m - 0.5 * ajj * m * m;
            for k in 0..d {
                b[k] -= col[k] * m;
            }
            b.remove(j);
        }
        let mut a = Vec::with_capacity((d - 1) * (d - 1));
        for r in (0..d).filter(|&r| r != j) {
            for c in (0..d).filter(|&c| c != j) {
                a.push(self.at(r, c));
            }
        }
        self.a = a;
        self.dim = d - 1;
    }

    /// Grid samples, mode 0 slowest.
    pub fn eval(&self, grid: GridSpec) -> Vec<Z> {
        let n = grid.n_points;
        let d = self.dim;
        let xs = grid.positions();
        let total = n.pow(d as u32);
        let mut out = vec![Z::new(0.0, 0.0); total];
        let mut x = vec![0.0; d];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            for k in (0..d).rev() {
                x[k] = xs[rem % n];
                rem /= n;
            }
            let mut quad = Z::new(0.0, 0.0);
            for r in 0..d {
                for c in 0..d {
                    quad += self.a[r * d + c] * x[r] * x[c];
                }
            }
            let mut acc = Z::new(0.0, 0.0);
            for (c, b) in &self.terms {
                let mut e = c - 0.5 * quad;
                for k in 0..d {
                    e += b[k] * x[k];
                }
                if e.re > -700.0 {
                    acc += e.exp();
                }
            }
            *slot = acc;
        }
        out
    }
}

pub fn fidelity(u: &[Z], v: &[Z]) -> f64 {
    assert_eq!(u.len(), v.len());
    let mut ip = Z::new(0.0, 0.0);
    let (mut nu, mut nv) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        ip += a.conj() * b;
        nu += a.norm_sqr();
        nv += b.norm_sqr();
    }
    ip.norm_sqr() / (nu * nv)
}

pub fn normalized(v: Vec<Z>) -> Vec<Z> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}
