//! Dense primal-dual interior-point method for small linear matrix
//! inequality problems
//!
//! ```text
//!   minimize    cᵀy
//!   subject to  a_iᵀy − b_i ≥ 0                 (orthant rows)
//!               Σ_k y_k F_k − F_0 ⪰ 0           (one or more PSD blocks)
//! ```
//!
//! paired with its Lagrangian dual
//!
//! ```text
//!   maximize    bᵀx + Σ ⟨F_0, X⟩
//!   subject to  Σ_i a_ik x_i + Σ ⟨F_k, X⟩ = c_k,  x ≥ 0,  X ⪰ 0.
//! ```
//!
//! Search directions use the HKM scaling with a Mehrotra predictor-corrector
//! step. Both the primal and dual iterates may start infeasible; residuals
//! shrink geometrically with the step length.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Symmetric sparse matrix, stored as the full list of non-zero entries
/// (both triangles for off-diagonal positions).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` at `(r, c)` and, when off-diagonal, at `(c, r)`.
    pub fn add_sym(&mut self, r: usize, c: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        self.entries.push((r, c, v));
        if r != c {
            self.entries.push((c, r, v));
        }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn scaled(&self, f: f64) -> SparseSym {
        SparseSym {
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, v * f))
                .collect(),
        }
    }

    fn inner(&self, m: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(r, c, v)| v * m[(r, c)]).sum()
    }

    fn accumulate(&self, scale: f64, out: &mut DMatrix<f64>) {
        for &(r, c, v) in &self.entries {
            out[(r, c)] += scale * v;
        }
    }
}

/// One orthant row `Σ_k coeff_k y_k − rhs ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// One PSD constraint `Σ_k y_k F_k − F_0 ⪰ 0` of size `n × n`.
#[derive(Clone, Debug)]
pub struct PsdBlock {
    pub n: usize,
    pub constant: DMatrix<f64>,
    /// `(k, F_k)` for the variables that touch this block.
    pub terms: Vec<(usize, SparseSym)>,
}

#[derive(Clone, Debug)]
pub struct ConicProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub blocks: Vec<PsdBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Degenerate,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Relative gap at which iteration stops early.
    pub target_gap: f64,
    /// Largest relative gap still reported as `Optimal`.
    pub gap_tol: f64,
    /// Relative primal and dual residual bound.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            target_gap: 1e-10,
            gap_tol: 1e-7,
            feas_tol: 1e-9,
            max_iter: 200,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub y: Vec<f64>,
    /// Orthant slacks `a_iᵀy − b_i`.
    pub slack: Vec<f64>,
    /// Orthant multipliers.
    pub x: Vec<f64>,
    pub block_slack: Vec<DMatrix<f64>>,
    pub block_dual: Vec<DMatrix<f64>>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

impl ConicSolution {
    pub fn relative_gap(&self) -> f64 {
        (self.primal_value - self.dual_value).abs() / (1.0 + self.primal_value.abs())
    }
}

struct Direction {
    dy: DVector<f64>,
    dz: Vec<f64>,
    dx: Vec<f64>,
    ds: Vec<DMatrix<f64>>,
    dxb: Vec<DMatrix<f64>>,
}

/// Iterate state.
#[derive(Clone)]
struct State {
    y: DVector<f64>,
    z: Vec<f64>,
    x: Vec<f64>,
    s: Vec<DMatrix<f64>>,
    xb: Vec<DMatrix<f64>>,
}

impl ConicProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn apply_rows(&self, y: &DVector<f64>) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.coeffs.iter().map(|&(k, v)| v * y[k]).sum())
            .collect()
    }

    fn apply_block(&self, b: usize, y: &DVector<f64>) -> DMatrix<f64> {
        let blk = &self.blocks[b];
        let mut out = DMatrix::zeros(blk.n, blk.n);
        for (k, f) in &blk.terms {
            f.accumulate(y[*k], &mut out);
        }
        out
    }

    /// `A*(x, X)`: the adjoint of the constraint map.
    fn adjoint(&self, x: &[f64], xb: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.num_vars());
        for (row, &xi) in self.rows.iter().zip(x) {
            for &(k, v) in &row.coeffs {
                out[k] += v * xi;
            }
        }
        for (blk, xm) in self.blocks.iter().zip(xb) {
            for (k, f) in &blk.terms {
                out[*k] += f.inner(xm);
            }
        }
        out
    }

    fn barrier_size(&self) -> f64 {
        (self.rows.len() + self.blocks.iter().map(|b| b.n).sum::<usize>()) as f64
    }

    /// Solves from the primal start `y0`. When `y0` is strictly feasible the
    /// primal residual stays at zero throughout.
    pub fn solve(&self, y0: &[f64], opts: &SolverOptions) -> ConicSolution {
        let m = self.num_vars();
        assert_eq!(y0.len(), m, "start point has wrong length");
        let y = DVector::from_column_slice(y0);

        let mut z = self.apply_rows(&y);
        for (zi, r) in z.iter_mut().zip(&self.rows) {
            *zi -= r.rhs;
        }
        let mut s: Vec<DMatrix<f64>> = (0..self.blocks.len())
            .map(|b| self.apply_block(b, &y) - &self.blocks[b].constant)
            .collect();
        let interior =
            z.iter().all(|&v| v > 0.0) && s.iter().all(|m| Cholesky::new(m.clone()).is_some());
        if !interior {
            let scale = 1.0 + z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            z.iter_mut().for_each(|v| *v = scale);
            for (b, sm) in s.iter_mut().enumerate() {
                *sm = DMatrix::identity(self.blocks[b].n, self.blocks[b].n) * scale;
            }
        }
        let state = State {
            y,
            x: vec![1.0; self.rows.len()],
            xb: self
                .blocks
                .iter()
                .map(|b| DMatrix::identity(b.n, b.n))
                .collect(),
            z,
            s,
        };
        self.iterate(state, opts)
    }

    fn residuals(&self, st: &State) -> (Vec<f64>, Vec<DMatrix<f64>>, DVector<f64>) {
        // r_p = B − A(y) + S
        let ay = self.apply_rows(&st.y);
        let rp: Vec<f64> = self
            .rows
            .iter()
            .zip(&ay)
            .zip(&st.z)
            .map(|((r, a), z)| r.rhs - a + z)
            .collect();
        let rpb: Vec<DMatrix<f64>> = (0..self.blocks.len())
            .map(|b| &self.blocks[b].constant - self.apply_block(b, &st.y) + &st.s[b])
            .collect();
        let c = DVector::from_column_slice(&self.objective);
        let rd = c - self.adjoint(&st.x, &st.xb);
        (rp, rpb, rd)
    }

    fn objectives(&self, st: &State) -> (f64, f64) {
        let p: f64 = self
            .objective
            .iter()
            .zip(st.y.iter())
            .map(|(c, y)| c * y)
            .sum();
        let d: f64 = self
            .rows
            .iter()
            .zip(&st.x)
            .map(|(r, x)| r.rhs * x)
            .sum::<f64>()
            + self
                .blocks
                .iter()
                .zip(&st.xb)
                .map(|(b, x)| b.constant.dot(x))
                .sum::<f64>();
        (p, d)
    }

    fn iterate(&self, mut st: State, opts: &SolverOptions) -> ConicSolution {
        let nu = self.barrier_size();
        let c_norm = 1.0 + self.objective.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let b_norm = 1.0
            + self
                .rows
                .iter()
                .fold(0.0f64, |a, r| a.max(r.rhs.abs()))
                .max(
                    self.blocks
                        .iter()
                        .fold(0.0f64, |a, b| a.max(b.constant.amax())),
                );

        let mut status = SolveStatus::MaxIter;
        let mut iterations = 0;
        let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        // Late iterations can lose accuracy in the Newton system; remember the
        // best iterate that already meets the acceptance tolerances.
        let mut best: Option<(State, (f64, f64, f64), usize)> = None;

        for iter in 0..=opts.max_iter {
            let (rp, rpb, rd) = self.residuals(&st);
            let pinf = rp
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()))
                .max(rpb.iter().fold(0.0f64, |a, m| a.max(m.amax())))
                / b_norm;
            let dinf = rd.amax() / c_norm;
            let (pobj, dobj) = self.objectives(&st);
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
            last = (gap, pinf, dinf);
            iterations = iter;

            if gap <= opts.target_gap && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
                status = SolveStatus::Optimal;
                break;
            }
            if gap <= opts.gap_tol
                && pinf <= opts.feas_tol
                && dinf <= opts.feas_tol
                && best.as_ref().is_none_or(|(_, (g, _, _), _)| gap < *g)
            {
                best = Some((st.clone(), last, iter));
            }
            if iter == opts.max_iter {
                break;
            }

            let compl: f64 = st.x.iter().zip(&st.z).map(|(a, b)| a * b).sum::<f64>()
                + st.xb.iter().zip(&st.s).map(|(a, b)| a.dot(b)).sum::<f64>();
            let mu = compl / nu;

            let Some(s_inv) =
                st.s.iter()
                    .map(|m| Cholesky::new(m.clone()).map(|c| c.inverse()))
                    .collect::<Option<Vec<_>>>()
            else {
                status = SolveStatus::Degenerate;
                break;
            };
            let ratio: Vec<f64> = st.x.iter().zip(&st.z).map(|(x, z)| x / z).collect();
            let schur = self.schur(&st, &s_inv, &ratio);
            let Some(factor) = factorize(schur) else {
                status = SolveStatus::Degenerate;
                break;
            };

            let affine = self.direction(&st, &s_inv, &ratio, &factor, &rp, &rpb, &rd, 0.0, None);
            let ap = opts.step_fraction * self.primal_step(&st, &affine);
            let ad = opts.step_fraction * self.dual_step(&st, &affine);
            let ap_aff = ap.min(1.0);
            let ad_aff = ad.min(1.0);
            let mut compl_aff = 0.0;
            for i in 0..st.x.len() {
                compl_aff += (st.x[i] + ad_aff * affine.dx[i]) * (st.z[i] + ap_aff * affine.dz[i]);
            }
            for b in 0..st.s.len() {
                let xa = &st.xb[b] + &affine.dxb[b] * ad_aff;
                let sa = &st.s[b] + &affine.ds[b] * ap_aff;
                compl_aff += xa.dot(&sa);
            }
            let sigma = (compl_aff / compl).clamp(0.0, 1.0).powi(3);

            let dir = self.direction(
                &st,
                &s_inv,
                &ratio,
                &factor,
                &rp,
                &rpb,
                &rd,
                sigma * mu,
                Some(&affine),
            );
            let ap = (opts.step_fraction * self.primal_step(&st, &dir)).min(1.0);
            let ad = (opts.step_fraction * self.dual_step(&st, &dir)).min(1.0);
            if ap < 1e-12 && ad < 1e-12 {
                status = SolveStatus::Degenerate;
                break;
            }

            st.y += &dir.dy * ap;
            for i in 0..st.z.len() {
                st.z[i] += ap * dir.dz[i];
                st.x[i] += ad * dir.dx[i];
            }
            for b in 0..st.s.len() {
                st.s[b] += &dir.ds[b] * ap;
                st.xb[b] += &dir.dxb[b] * ad;
                symmetrize(&mut st.s[b]);
                symmetrize(&mut st.xb[b]);
            }
        }

        if status != SolveStatus::Optimal {
            if let Some((kept, metrics, iter)) = best {
                st = kept;
                last = metrics;
                iterations = iter;
                status = SolveStatus::Optimal;
            }
        }
        let (_, pinf, dinf) = last;
        let (pobj, dobj) = self.objectives(&st);
        ConicSolution {
            y: st.y.iter().copied().collect(),
            slack: st.z,
            x: st.x,
            block_slack: st.s,
            block_dual: st.xb,
            primal_value: pobj,
            dual_value: dobj,
            primal_residual: pinf,
            dual_residual: dinf,
            iterations,
            status,
        }
    }

    /// `H_kl = Σ_i a_ik (x_i/z_i) a_il + Σ_blocks Tr(F_k X F_l S⁻¹)`.
    fn schur(&self, st: &State, s_inv: &[DMatrix<f64>], ratio: &[f64]) -> DMatrix<f64> {
        let m = self.num_vars();
        let mut h = DMatrix::zeros(m, m);
        for (row, &r) in self.rows.iter().zip(ratio) {
            for &(k, vk) in &row.coeffs {
                for &(l, vl) in &row.coeffs {
                    h[(k, l)] += vk * r * vl;
                }
            }
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            let x = &st.xb[b];
            let si = &s_inv[b];
            for (p, (k, fk)) in blk.terms.iter().enumerate() {
                for (l, fl) in &blk.terms[p..] {
                    let mut acc = 0.0;
                    for &(a, bb, v) in fk.entries() {
                        for &(c, e, w) in fl.entries() {
                            acc += v * w * x[(bb, c)] * si[(e, a)];
                        }
                    }
                    h[(*k, *l)] += acc;
                    if k != l {
                        h[(*l, *k)] += acc;
                    }
                }
            }
        }
        h
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        st: &State,
        s_inv: &[DMatrix<f64>],
        ratio: &[f64],
        factor: &Factor,
        rp: &[f64],
        rpb: &[DMatrix<f64>],
        rd: &DVector<f64>,
        sigma_mu: f64,
        corrector: Option<&Direction>,
    ) -> Direction {
        let m = self.num_vars();
        // orthant complementarity target
        let rc: Vec<f64> = (0..st.x.len())
            .map(|i| {
                let second = corrector.map_or(0.0, |d| d.dx[i] * d.dz[i]);
                (sigma_mu - second) / st.z[i] - st.x[i]
            })
            .collect();
        // block complementarity target (unsymmetrized)
        let rcb: Vec<DMatrix<f64>> = (0..st.s.len())
            .map(|b| {
                let n = self.blocks[b].n;
                let mut t = DMatrix::identity(n, n) * sigma_mu;
                if let Some(d) = corrector {
                    t -= &d.dxb[b] * &d.ds[b];
                }
                t * &s_inv[b] - &st.xb[b]
            })
            .collect();

        let mut rhs = -rd.clone();
        for (i, row) in self.rows.iter().enumerate() {
            let v = rc[i] + ratio[i] * rp[i];
            for &(k, a) in &row.coeffs {
                rhs[k] += a * v;
            }
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            let g = &rcb[b] + &st.xb[b] * &rpb[b] * &s_inv[b];
            for (k, f) in &blk.terms {
                rhs[*k] += f.inner(&g);
            }
        }
        let dy = factor.solve(&rhs);
        debug_assert_eq!(dy.len(), m);

        let ady = self.apply_rows(&dy);
        let dz: Vec<f64> = ady.iter().zip(rp).map(|(a, r)| a - r).collect();
        let dx: Vec<f64> = (0..dz.len()).map(|i| rc[i] - ratio[i] * dz[i]).collect();
        let ds: Vec<DMatrix<f64>> = (0..self.blocks.len())
            .map(|b| self.apply_block(b, &dy) - &rpb[b])
            .collect();
        let dxb: Vec<DMatrix<f64>> = (0..self.blocks.len())
            .map(|b| {
                let mut t = &rcb[b] - &st.xb[b] * &ds[b] * &s_inv[b];
                symmetrize(&mut t);
                t
            })
            .collect();
        Direction {
            dy,
            dz,
            dx,
            ds,
            dxb,
        }
    }

    fn primal_step(&self, st: &State, d: &Direction) -> f64 {
        let mut a = orthant_step(&st.z, &d.dz);
        for (s, ds) in st.s.iter().zip(&d.ds) {
            a = a.min(psd_step(s, ds));
        }
        a
    }

    fn dual_step(&self, st: &State, d: &Direction) -> f64 {
        let mut a = orthant_step(&st.x, &d.dx);
        for (x, dx) in st.xb.iter().zip(&d.dxb) {
            a = a.min(psd_step(x, dx));
        }
        a
    }
}

enum Factor {
    Chol(Cholesky<f64, Dyn>),
    Lu(nalgebra::LU<f64, Dyn, Dyn>),
}

impl Factor {
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match self {
            Factor::Chol(c) => c.solve(rhs),
            Factor::Lu(lu) => lu.solve(rhs).unwrap_or_else(|| DVector::zeros(rhs.len())),
        }
    }
}

fn factorize(h: DMatrix<f64>) -> Option<Factor> {
    if let Some(c) = Cholesky::new(h.clone()) {
        return Some(Factor::Chol(c));
    }
    let lu = h.lu();
    if lu.is_invertible() {
        Some(Factor::Lu(lu))
    } else {
        None
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn orthant_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

/// Largest `α` with `M + α·dM ⪰ 0`, for positive definite `M`.
fn psd_step(m: &DMatrix<f64>, dm: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(m.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(l_inv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let mut w = &l_inv * dm * l_inv.transpose();
    symmetrize(&mut w);
    let lmin = SymmetricEigen::new(w).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}
