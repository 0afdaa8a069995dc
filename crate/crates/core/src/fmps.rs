//! Functional matrix product state on a shared quadrature grid.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QrlError, Result};
use crate::grid::GridSpec;
use crate::kernels::GridKernels;
use crate::linalg::{thin_qr, CMat};
use crate::scalar::{cis, cz, Real, C};
use crate::svd::{truncated_rsvd, SvdPolicy};

/// Rank-3 tensor with layout (left bond, grid point, right bond), row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Site<T> {
    pub left: usize,
    pub right: usize,
    pub data: Vec<C<T>>,
}

impl<T: Real> Site<T> {
    pub fn new(left: usize, n: usize, right: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), left * n * right, "site buffer size");
        Self { left, right, data }
    }

    /// Bond-1 site holding a single-mode wavefunction.
    pub fn product(psi: Vec<C<T>>) -> Self {
        Self { left: 1, right: 1, data: psi }
    }

    fn n(&self) -> usize {
        self.data.len() / (self.left * self.right)
    }

    fn as_left_matrix(&self) -> CMat<T> {
        CMat::from_vec(self.left * self.n(), self.right, self.data.clone())
    }

    fn as_right_matrix(&self) -> CMat<T> {
        CMat::from_vec(self.left, self.n() * self.right, self.data.clone())
    }
}

/// Outcome of a fused beam-splitter plus double homodyne step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairOutcome {
    pub m_a: f64,
    pub m_b: f64,
    pub theta_b: f64,
}

#[derive(Clone)]
pub struct FmpsState<T: Real> {
    kern: Arc<GridKernels<T>>,
    sites: Vec<Site<T>>,
    center: Option<usize>,
    pub policy: SvdPolicy,
    /// Accumulated truncation weight discarded by SVD splits.
    pub discarded_weight: f64,
    /// Largest marginal mass seen within 10% of the domain edge.
    pub domain_leak: f64,
    rng: ChaCha8Rng,
    rng_seed: u64,
}

impl<T: Real> std::fmt::Debug for FmpsState<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FmpsState")
            .field("n_points", &self.kern.n())
            .field("bonds", &self.bond_dims())
            .field("discarded_weight", &self.discarded_weight)
            .finish()
    }
}

impl<T: Real> FmpsState<T> {
    pub fn empty(grid: GridSpec, policy: SvdPolicy, rng_seed: u64) -> Self {
        Self {
            kern: GridKernels::get(grid),
            sites: Vec::new(),
            center: None,
            policy,
            discarded_weight: 0.0,
            domain_leak: 0.0,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            rng_seed,
        }
    }

    /// Product state of single-mode wavefunctions (each of length n_points).
    pub fn product(grid: GridSpec, modes: Vec<Vec<C<T>>>, policy: SvdPolicy, rng_seed: u64) -> Result<Self> {
        let sites = modes
            .into_iter()
            .map(|psi| {
                if psi.len() != grid.n_points {
                    return Err(QrlError::GridMismatch(psi.len(), grid.n_points));
                }
                Ok(Site::product(psi))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_sites(grid, sites, policy, rng_seed)
    }

    pub fn from_sites(grid: GridSpec, sites: Vec<Site<T>>, policy: SvdPolicy, rng_seed: u64) -> Result<Self> {
        policy.validate()?;
        let n = grid.n_points;
        for (i, s) in sites.iter().enumerate() {
            if s.data.len() != s.left * n * s.right {
                return Err(QrlError::GridMismatch(s.data.len() / (s.left * s.right).max(1), n));
            }
            if i == 0 && s.left != 1 {
                return Err(QrlError::DimensionMismatch("left boundary bond must be 1".into()));
            }
            if i + 1 == sites.len() && s.right != 1 {
                return Err(QrlError::DimensionMismatch("right boundary bond must be 1".into()));
            }
            if i > 0 && sites[i - 1].right != s.left {
                return Err(QrlError::DimensionMismatch(format!("bond {} mismatch", i)));
            }
        }
        let mut st = Self::empty(grid, policy, rng_seed);
        st.sites = sites;
        Ok(st)
    }

    pub fn grid(&self) -> GridSpec {
        self.kern.grid
    }

    pub fn kernels(&self) -> &Arc<GridKernels<T>> {
        &self.kern
    }

    pub fn n_modes(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site<T>] {
        &self.sites
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// Internal bond dimensions, left to right.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.iter().skip(1).map(|s| s.left).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.sites.len() {
            return Err(QrlError::ModeOutOfRange { index: mode, len: self.sites.len() });
        }
        Ok(())
    }

    // -------------------------------------------------------- canonical form

    fn left_orth(&mut self, i: usize) {
        let (q, r) = thin_qr(&self.sites[i].as_left_matrix());
        let n = self.kern.n();
        let left = self.sites[i].left;
        self.sites[i] = Site::new(left, n, q.cols, q.data);
        let next = &self.sites[i + 1];
        let merged = r.matmul(&next.as_right_matrix());
        let right = next.right;
        self.sites[i + 1] = Site::new(r.rows, n, right, merged.data);
    }

    fn right_orth(&mut self, i: usize) {
        let (q, r) = thin_qr(&self.sites[i].as_right_matrix().adjoint());
        let n = self.kern.n();
        let right = self.sites[i].right;
        let qh = q.adjoint();
        self.sites[i] = Site::new(qh.rows, n, right, qh.data);
        let prev = &self.sites[i - 1];
        let merged = prev.as_left_matrix().matmul(&r.adjoint());
        let left = prev.left;
        self.sites[i - 1] = Site::new(left, n, r.rows, merged.data);
    }

    /// Bring the orthogonality center to `target`.
    pub fn canonicalize(&mut self, target: usize) {
        let len = self.sites.len();
        if len == 0 {
            return;
        }
        match self.center {
            Some(c) if c == target => {}
            Some(c) if c < target => (c..target).for_each(|i| self.left_orth(i)),
            Some(c) => (target + 1..=c).rev().for_each(|i| self.right_orth(i)),
            None => {
                (0..target).for_each(|i| self.left_orth(i));
                (target + 1..len).rev().for_each(|i| self.right_orth(i));
            }
        }
        self.center = Some(target);
    }

    pub fn norm_sqr(&self) -> f64 {
        self.overlap(self).re
    }

    /// Rescale to unit norm.
    pub fn normalize(&mut self) {
        if self.sites.is_empty() {
            return;
        }
        let nrm = self.norm_sqr().sqrt();
        if nrm > 0.0 {
            let c = self.center.unwrap_or(0);
            let s = T::lit(1.0 / nrm);
            self.sites[c].data.iter_mut().for_each(|z| *z = *z * s);
        }
    }

    // ------------------------------------------------------------- overlaps

    /// `<self|other>` for states with identical mode count.
    pub fn overlap(&self, other: &Self) -> C<f64> {
        self.overlap_sites(&other.sites)
    }

    fn overlap_sites(&self, other: &[Site<T>]) -> C<f64> {
        assert_eq!(self.sites.len(), other.len(), "overlap mode count");
        if other.is_empty() {
            return C::new(1.0, 0.0);
        }
        let mut env = CMat::<T>::identity(1);
        for (a, b) in self.sites.iter().zip(other) {
            let t = env.matmul(&b.as_right_matrix());
            let t = CMat::from_vec(a.left * self.kern.n(), b.right, t.data);
            env = a.as_left_matrix().adjoint().matmul(&t);
        }
        let z = env.at(0, 0);
        C::new(z.re.as_f64(), z.im.as_f64())
    }

    /// `<psi| (x)_i O_i |psi>` with `O_i` given by replacement sites.
    pub fn expectation_with(&self, replaced: &[Option<Site<T>>]) -> C<f64> {
        let sites: Vec<Site<T>> = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, s)| replaced.get(i).and_then(|r| r.clone()).unwrap_or_else(|| s.clone()))
            .collect();
        self.overlap_sites(&sites)
    }

    /// Copy of site `mode` with `f` applied to every physical line.
    pub fn mapped_site(&self, mode: usize, f: impl FnMut(&mut [C<T>])) -> Site<T> {
        let mut s = self.sites[mode].clone();
        self.kern.for_each_line(&mut s.data, s.left, s.right, f);
        s
    }

    /// Dense amplitude tensor over all modes (mode 0 slowest). Test helper.
    pub fn to_dense(&self) -> Vec<C<T>> {
        let n = self.kern.n();
        let mut acc = CMat::<T>::identity(1);
        for s in &self.sites {
            let next = acc.matmul(&s.as_right_matrix());
            acc = CMat::from_vec(acc.rows * n, s.right, next.data);
        }
        acc.data
    }

    // --------------------------------------------------------- local kernels

    /// Apply `exp(+i theta n)` to one mode.
    pub fn apply_rotation(&mut self, mode: usize, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(QrlError::NonFinite("rotation angle"));
        }
        self.check_mode(mode)?;
        if theta == 0.0 {
            return Ok(());
        }
        let kern = Arc::clone(&self.kern);
        let s = &mut self.sites[mode];
        kern.for_each_line(&mut s.data, s.left, s.right, |line| kern.rotate(line, -theta));
        Ok(())
    }

    /// Apply an arbitrary line map to one mode (must be unitary to keep canonical form).
    pub fn apply_line_map(&mut self, mode: usize, f: impl FnMut(&mut [C<T>])) -> Result<()> {
        self.check_mode(mode)?;
        let kern = Arc::clone(&self.kern);
        let s = &mut self.sites[mode];
        kern.for_each_line(&mut s.data, s.left, s.right, f);
        Ok(())
    }

    /// Displacement `D(alpha)` with `alpha = (q0 + i p0)/sqrt(2)` on one mode.
    pub fn apply_displacement(&mut self, mode: usize, alpha: C<f64>) -> Result<()> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(QrlError::NonFinite("displacement"));
        }
        self.check_mode(mode)?;
        let kern = Arc::clone(&self.kern);
        let s = &mut self.sites[mode];
        let op = displacement_op(&kern, alpha);
        kern.for_each_line(&mut s.data, s.left, s.right, op);
        Ok(())
    }

    /// `<psi| (x)_i D(alpha_i) |psi>`.
    pub fn expect_displacement(&self, alphas: &[C<f64>]) -> Result<C<f64>> {
        if alphas.len() != self.sites.len() {
            return Err(QrlError::DimensionMismatch(format!(
                "{} displacements for {} modes",
                alphas.len(),
                self.sites.len()
            )));
        }
        if alphas.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(QrlError::NonFinite("displacement"));
        }
        let replaced: Vec<Option<Site<T>>> = alphas
            .iter()
            .enumerate()
            .map(|(i, &a)| (a != C::new(0.0, 0.0)).then(|| self.mapped_site(i, displacement_op(&self.kern, a))))
            .collect();
        Ok(self.expectation_with(&replaced))
    }

    // ------------------------------------------------------- two-mode kernels

    fn contract_pair(&self, i: usize) -> (usize, usize, Vec<C<T>>) {
        let a = &self.sites[i];
        let b = &self.sites[i + 1];
        let theta = a.as_left_matrix().matmul(&b.as_right_matrix());
        (a.left, b.right, theta.data)
    }

    fn split_pair(&mut self, i: usize, left: usize, right: usize, theta: Vec<C<T>>) -> Result<()> {
        let n = self.kern.n();
        let m = CMat::from_vec(left * n, n * right, theta);
        let policy = self.policy;
        let res = truncated_rsvd(&m, &policy, &mut self.rng)?;
        self.discarded_weight += res.discarded_weight;
        let k = res.rank();
        let mut vh = res.vh;
        for r in 0..k {
            let s = res.s[r];
            vh.data[r * n * right..(r + 1) * n * right].iter_mut().for_each(|z| *z = *z * s);
        }
        let kept: f64 = res.s.iter().map(|s| s.as_f64().powi(2)).sum();
        if kept > 0.0 {
            let s = T::lit(1.0 / kept.sqrt());
            vh.data.iter_mut().for_each(|z| *z = *z * s);
        }
        self.sites[i] = Site::new(left, n, k, res.u.data);
        self.sites[i + 1] = Site::new(k, n, right, vh.data);
        self.center = Some(i + 1);
        Ok(())
    }

    /// 50:50 beam splitter on modes (i, i+1).
    ///
    /// `convention > 0` maps (q_i, q_{i+1}) to ((q_i+q_{i+1})/sqrt2, (q_{i+1}-q_i)/sqrt2),
    /// `convention < 0` is its inverse.
    pub fn apply_beamsplitter(&mut self, i: usize, convention: i32) -> Result<()> {
        if i + 1 >= self.sites.len() {
            return Err(QrlError::NotAdjacent(i, i + 1));
        }
        self.canonicalize(i);
        let (l, r, mut theta) = self.contract_pair(i);
        self.kern.rotate_plane(&mut theta, l, r, convention);
        self.split_pair(i, l, r, theta)
    }

    /// Beam splitter between arbitrary modes; rejects non-neighbours.
    pub fn apply_beamsplitter_between(&mut self, i: usize, j: usize, convention: i32) -> Result<()> {
        if j != i + 1 {
            return Err(QrlError::NotAdjacent(i, j));
        }
        self.apply_beamsplitter(i, convention)
    }

    // ----------------------------------------------------------- measurement

    fn sample_line_density(&mut self, density: &[T], rng: &mut (impl Rng + ?Sized)) -> Result<f64> {
        let total: f64 = density.iter().map(|d| d.as_f64()).sum();
        if !(total > 1e-12) {
            return Err(QrlError::StateLostDomain(total));
        }
        let g = self.kern.grid;
        let fine = density.len();
        let h = g.spacing / 2.0;
        let edge: f64 = density
            .iter()
            .enumerate()
            .filter(|(k, _)| (g.x(0) + *k as f64 * h).abs() > 0.9 * g.half_width)
            .map(|(_, d)| d.as_f64())
            .sum();
        self.domain_leak = self.domain_leak.max(edge / total);
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        for k in 0..fine {
            let a = density[k].as_f64();
            let b = density[(k + 1) % fine].as_f64();
            let mass = 0.5 * (a + b);
            if acc + mass >= target || k + 1 == fine {
                let rem = (target - acc).clamp(0.0, mass);
                // solve a t + (b - a) t^2 / 2 = rem on [0, 1]
                let t = if (b - a).abs() < 1e-14 * (a + b).max(1e-300) {
                    if a > 0.0 { rem / a } else { 0.5 }
                } else {
                    let disc = (a * a + 2.0 * (b - a) * rem).max(0.0);
                    (disc.sqrt() - a) / (b - a)
                };
                let x = g.x(0) + (k as f64 + t.clamp(0.0, 1.0)) * h;
                let wrapped = if x >= g.half_width { x - 2.0 * g.half_width } else { x };
                return Ok(wrapped);
            }
            acc += mass;
        }
        unreachable!("cdf walk always returns")
    }

    /// Marginal of the physical axis of an (outer, n, inner) block on the half grid.
    fn block_density(&self, data: &[C<T>], outer: usize, inner: usize) -> Vec<T> {
        let n = self.kern.n();
        let mut dens = vec![T::zero(); 2 * n];
        let mut line = vec![cz::<T>(); n];
        let mut scratch = Vec::with_capacity(2 * n);
        for o in 0..outer {
            for b in 0..inner {
                let start = o * n * inner + b;
                for (t, z) in line.iter_mut().enumerate() {
                    *z = data[start + t * inner];
                }
                if line.iter().all(|z| z.norm_sqr() == T::zero()) {
                    continue;
                }
                self.kern.upsampled_density(&line, &mut dens, &mut scratch);
            }
        }
        dens
    }

    /// Contract the physical axis of an (outer, n, inner) block with band-limited
    /// interpolation weights at `x`, giving an outer x inner matrix.
    fn collapse_block(&self, data: &[C<T>], outer: usize, inner: usize, x: f64) -> Vec<C<T>> {
        let n = self.kern.n();
        let w = self.kern.interp_weights(x);
        let mut out = vec![cz::<T>(); outer * inner];
        for o in 0..outer {
            for (t, &wt) in w.iter().enumerate() {
                let row = &data[(o * n + t) * inner..(o * n + t + 1) * inner];
                let dst = &mut out[o * inner..(o + 1) * inner];
                for (d, z) in dst.iter_mut().zip(row) {
                    *d = *d + *z * wt;
                }
            }
        }
        out
    }

    /// Absorb an l x r matrix left by a measured site at position `i`
    /// (already removed from the chain) into a neighbour.
    fn absorb(&mut self, i: usize, l: usize, r: usize, mat: Vec<C<T>>) {
        let n = self.kern.n();
        let m = CMat::from_vec(l, r, mat);
        if self.sites.is_empty() {
            return;
        }
        if i < self.sites.len() {
            let next = &self.sites[i];
            let merged = m.matmul(&next.as_right_matrix());
            let right = next.right;
            self.sites[i] = Site::new(l, n, right, merged.data);
            self.center = Some(i);
        } else {
            let prev = &self.sites[i - 1];
            let merged = prev.as_left_matrix().matmul(&m);
            let left = prev.left;
            self.sites[i - 1] = Site::new(left, n, r, merged.data);
            self.center = Some(i - 1);
        }
        self.renormalize_center();
    }

    fn renormalize_center(&mut self) {
        if let Some(c) = self.center {
            let s = &mut self.sites[c];
            let nrm: f64 = s.data.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                let f = T::lit(1.0 / nrm);
                s.data.iter_mut().for_each(|z| *z = *z * f);
            }
        }
    }

    /// Homodyne detection of `q cos(theta) + p sin(theta)`; removes the mode.
    pub fn measure_homodyne(&mut self, mode: usize, theta: f64, rng: &mut (impl Rng + ?Sized)) -> Result<f64> {
        if !theta.is_finite() {
            return Err(QrlError::NonFinite("homodyne angle"));
        }
        self.check_mode(mode)?;
        self.apply_rotation(mode, -theta)?;
        self.canonicalize(mode);
        let s = &self.sites[mode];
        let dens = self.block_density(&s.data, s.left, s.right);
        let m = self.sample_line_density(&dens, rng)?;
        self.project_q(mode, m)?;
        Ok(m)
    }

    /// Marginal density of q for one mode on the half grid (mass per point).
    pub fn marginal(&mut self, mode: usize) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        self.canonicalize(mode);
        let s = &self.sites[mode];
        Ok(self.block_density(&s.data, s.left, s.right).into_iter().map(|d| d.as_f64()).collect())
    }

    /// Project mode onto the q eigenvalue `m` and remove it, renormalizing.
    pub fn project_q(&mut self, mode: usize, m: f64) -> Result<()> {
        self.check_mode(mode)?;
        self.canonicalize(mode);
        let s = self.sites.remove(mode);
        let mat = self.collapse_block(&s.data, s.left, s.right, m);
        if self.sites.is_empty() {
            self.center = None;
            return Ok(());
        }
        self.absorb(mode, s.left, s.right, mat);
        Ok(())
    }

    /// Beam splitter on (i, i+1) followed by homodyne detection of mode i at
    /// `theta_a` and then of mode i+1 at the angle returned by `choose_b(m_a)`.
    /// Both modes are removed; no SVD is performed.
    pub fn beamsplit_measure_pair(
        &mut self,
        i: usize,
        convention: i32,
        theta_a: f64,
        choose_b: impl FnOnce(f64) -> f64,
        rng: &mut (impl Rng + ?Sized),
    ) -> Result<PairOutcome> {
        if i + 1 >= self.sites.len() {
            return Err(QrlError::NotAdjacent(i, i + 1));
        }
        // equal rotations on both modes commute with the beam splitter
        self.apply_rotation(i, -theta_a)?;
        self.apply_rotation(i + 1, -theta_a)?;
        self.canonicalize(i);
        let n = self.kern.n();
        let (l, r, mut theta) = self.contract_pair(i);
        self.kern.rotate_plane(&mut theta, l, r, convention);
        let dens = self.block_density(&theta, l, n * r);
        let m_a = self.sample_line_density(&dens, rng)?;
        let mut phi = self.collapse_block(&theta, l, n * r, m_a);
        let nrm: f64 = phi.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>().sqrt();
        if !(nrm > 0.0) {
            return Err(QrlError::StateLostDomain(0.0));
        }
        let f = T::lit(1.0 / nrm);
        phi.iter_mut().for_each(|z| *z = *z * f);
        let theta_b = choose_b(m_a);
        if !theta_b.is_finite() {
            return Err(QrlError::NonFinite("homodyne angle"));
        }
        let kern = Arc::clone(&self.kern);
        kern.for_each_line(&mut phi, l, r, |line| kern.rotate(line, theta_b - theta_a));
        let dens = self.block_density(&phi, l, r);
        let m_b = self.sample_line_density(&dens, rng)?;
        let mat = self.collapse_block(&phi, l, r, m_b);
        self.sites.drain(i..i + 2);
        if self.sites.is_empty() {
            self.center = None;
        } else {
            self.absorb(i, l, r, mat);
        }
        Ok(PairOutcome { m_a, m_b, theta_b })
    }

    // ------------------------------------------------------------- injection

    /// Insert a two-mode state at bond position `pos` (0 = before the first mode).
    pub fn insert_two_mode(&mut self, pos: usize, pair: &FmpsState<T>) -> Result<()> {
        if pair.grid().n_points != self.grid().n_points {
            return Err(QrlError::GridMismatch(pair.grid().n_points, self.grid().n_points));
        }
        if pair.n_modes() != 2 {
            return Err(QrlError::DimensionMismatch(format!("pair has {} modes", pair.n_modes())));
        }
        if pos > self.sites.len() {
            return Err(QrlError::ModeOutOfRange { index: pos, len: self.sites.len() });
        }
        let n = self.kern.n();
        let chi = if pos == 0 { 1 } else { self.sites[pos - 1].right };
        let (p1, p2) = (&pair.sites[0], &pair.sites[1]);
        let b = p1.right;
        let mut s1 = vec![cz::<T>(); chi * n * chi * b];
        let mut s2 = vec![cz::<T>(); chi * b * n * chi];
        for a in 0..chi {
            for x in 0..n {
                for mu in 0..b {
                    s1[(a * n + x) * chi * b + a * b + mu] = p1.data[x * b + mu];
                    s2[((a * b + mu) * n + x) * chi + a] = p2.data[mu * n + x];
                }
            }
        }
        self.sites.insert(pos, Site::new(chi * b, n, chi, s2));
        self.sites.insert(pos, Site::new(chi, n, chi * b, s1));
        self.center = None;
        self.discarded_weight += pair.discarded_weight;
        if chi * b > self.policy.chi_max {
            self.canonicalize(pos);
            let (l, r, theta) = self.contract_pair(pos);
            self.split_pair(pos, l, r, theta)?;
        }
        Ok(())
    }
}

/// Line map applying `D(alpha)`: shift by q0, momentum kick p0, phase -q0 p0 / 2.
pub fn displacement_op<T: Real>(kern: &Arc<GridKernels<T>>, alpha: C<f64>) -> impl FnMut(&mut [C<T>]) {
    let q0 = std::f64::consts::SQRT_2 * alpha.re;
    let p0 = std::f64::consts::SQRT_2 * alpha.im;
    let kern = Arc::clone(kern);
    let ramp: Vec<C<T>> = kern
        .x
        .iter()
        .map(|&x| cis(T::lit(p0 * x.as_f64() - q0 * p0 / 2.0)))
        .collect();
    move |line: &mut [C<T>]| {
        if q0 != 0.0 {
            kern.shift(line, q0);
        }
        for (z, r) in line.iter_mut().zip(&ramp) {
            *z = *z * *r;
        }
    }
}
