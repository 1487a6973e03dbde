use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::tables::{OrderTables, MAX_ROOTS};
use super::Branch;
use crate::linalg::{Lu, Matrix, Pivoting};
use crate::math::{abs, cis_turns, powi, round};
use crate::special::{bernoulli, binomial, factorial};
use crate::{Error, Result, MAX_ORDER};

/// Distance of `ωh` from a nonzero integer below which the resonant
/// formula is used.
pub const RESONANCE_TOLERANCE: f64 = 1e-6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The few numbers that determine a whole coefficient vector.
///
/// Every weight has the form
/// `C_β = h (K e^{2πiωx_β} + Σ_k a_k P_k(β) + b_k R_k(β))` in the interior,
/// with `first`/`last` replacing the `K` term at `β = 0` and `β = N`.
/// `P_k(β) = q_k^β` and `R_k(β) = q_k^{N-β}` inside; at the ends
/// `P_k(0) = R_k(N) = q_k/(q_k-1)` and `P_k(N) = R_k(0) = q_k^N/(1-q_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Structure {
    pub branch: Branch,
    /// Frequency used in the phases (snapped to the exact resonance on the
    /// resonant branch).
    pub omega: f64,
    pub k_factor: f64,
    pub first: Complex64,
    pub last: Complex64,
    pub a: [Complex64; MAX_ROOTS],
    pub b: [Complex64; MAX_ROOTS],
    pub n_roots: usize,
}

impl Structure {
    pub fn boundary_a(&self) -> &[Complex64] {
        &self.a[..self.n_roots]
    }
    pub fn boundary_b(&self) -> &[Complex64] {
        &self.b[..self.n_roots]
    }
}

/// Precomputed data for one `(m, [a, b], N)`: everything except the
/// frequency. Building structures for many frequencies on the same grid
/// costs one small triangular solve each.
#[derive(Debug, Clone)]
pub struct CoefficientEngine {
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
    pub(crate) tables: OrderTables,
    /// `q_k^β` for `β = 0..=N`, root-major.
    pow: Vec<f64>,
    system: Matrix,
    /// Power-of-two row and column scales that equilibrate `system`.
    row_scale: [f64; 2 * MAX_ROOTS],
    col_scale: [f64; 2 * MAX_ROOTS],
    lu: Option<Lu>,
    zero_d: [f64; MAX_ROOTS],
    condition: f64,
}

impl CoefficientEngine {
    pub fn new(m: usize, a: f64, b: f64, n: usize) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::UnsupportedOrder(m));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter(alloc::format!(
                "interval needs finite a < b, got [{a}, {b}]"
            )));
        }
        if n == 0 || n + 1 < m {
            return Err(Error::TooFewNodes { m, nodes: n + 1 });
        }
        let tables = OrderTables::new(m)?;
        let nr = tables.n_roots;
        let mut pow = vec![0.0; nr * (n + 1)];
        for k in 0..nr {
            let q = tables.roots[k];
            let row = &mut pow[k * (n + 1)..(k + 1) * (n + 1)];
            row[0] = 1.0;
            for beta in 1..=n {
                row[beta] = row[beta - 1] * q;
            }
        }
        let mut eng = CoefficientEngine {
            m,
            a,
            b,
            n,
            h: (b - a) / n as f64,
            tables,
            pow,
            system: Matrix::zeros(2 * nr),
            row_scale: [1.0; 2 * MAX_ROOTS],
            col_scale: [1.0; 2 * MAX_ROOTS],
            lu: None,
            zero_d: [0.0; MAX_ROOTS],
            condition: 1.0,
        };
        if nr > 0 {
            let (system, row_scale, col_scale) = equilibrate(eng.boundary_matrix());
            eng.system = system;
            eng.row_scale = row_scale;
            eng.col_scale = col_scale;
            let lu = Lu::factor(&eng.system, Pivoting::Full)?;
            eng.condition = lu.condition_number(&eng.system);
            eng.lu = Some(lu);
            eng.zero_d = eng.solve_zero_branch()?;
        }
        Ok(eng)
    }

    pub fn roots(&self) -> &[f64] {
        self.tables.roots()
    }

    /// 1-norm condition number of the boundary-layer system.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    /// Boundary-layer coefficients `d_k` of the `ω = 0` formula.
    pub fn zero_branch_d(&self) -> &[f64] {
        &self.zero_d[..self.tables.n_roots]
    }

    #[inline]
    fn qpow(&self, k: usize, e: usize) -> f64 {
        self.pow[k * (self.n + 1) + e]
    }

    fn delta(&self, t: usize, j: usize) -> f64 {
        self.tables.delta[t][j]
    }

    /// Shared `2(m-1)` system of the oscillatory and resonant branches.
    fn boundary_matrix(&self) -> Matrix {
        let nr = self.tables.n_roots;
        let n = self.n;
        let nf = n as f64;
        let mut mat = Matrix::zeros(2 * nr);
        for j in 1..self.m {
            for k in 0..nr {
                let q = self.tables.roots[k];
                let qn = self.qpow(k, n);
                // Σ_t coefficients with x = q/(q-1) and y = q/(1-q) style powers
                let s_pos = |al: usize, num_pow: &dyn Fn(usize) -> f64| -> f64 {
                    (1..=al)
                        .map(|t| num_pow(t) * self.delta(t, al) / powi(1.0 - q, t as u32 + 1))
                        .sum()
                };
                let s_neg = |al: usize, num_pow: &dyn Fn(usize) -> f64| -> f64 {
                    (1..=al)
                        .map(|t| num_pow(t) * self.delta(t, al) / powi(q - 1.0, t as u32 + 1))
                        .sum()
                };
                let row1 = j - 1;
                mat.set(row1, k, Complex64::new(s_neg(j, &|_| q), 0.0));
                mat.set(
                    row1,
                    nr + k,
                    Complex64::new(s_pos(j, &|t| qn * powi(q, t as u32)), 0.0),
                );
                let row2 = nr + j - 1;
                let mut ma = s_pos(j, &|t| powi(q, t as u32));
                let mut mb = s_neg(j, &|_| qn * q);
                for al in 1..=j {
                    let w = powi(nf, (j - al) as u32) * binomial(j, al);
                    ma -= w * s_pos(al, &|t| qn * powi(q, t as u32));
                    mb -= w * s_neg(al, &|_| q);
                }
                mat.set(row2, k, Complex64::new(ma, 0.0));
                mat.set(row2, nr + k, Complex64::new(mb, 0.0));
            }
        }
        mat
    }

    fn solve_zero_branch(&self) -> Result<[f64; MAX_ROOTS]> {
        let nr = self.tables.n_roots;
        let mut mat = Matrix::zeros(nr);
        let mut rhs = vec![ZERO; nr];
        for j in 1..self.m {
            for k in 0..nr {
                let q = self.tables.roots[k];
                let qn = self.qpow(k, self.n);
                let mut s = 0.0;
                for i in 1..=j {
                    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                    s += (q + sign * qn * powi(q, i as u32)) / powi(q - 1.0, i as u32 + 1)
                        * self.delta(i, j);
                }
                mat.set(j - 1, k, Complex64::new(s, 0.0));
            }
            rhs[j - 1] = Complex64::new(bernoulli(j + 1) / (j + 1) as f64, 0.0);
        }
        let sol = crate::linalg::solve_refined(&mat, &rhs, Pivoting::Full, 1, false)?;
        let mut d = [0.0; MAX_ROOTS];
        for k in 0..nr {
            d[k] = sol.x[k].re;
        }
        Ok(d)
    }

    /// Which branch `ω` falls on.
    pub fn classify(&self, omega: f64) -> Branch {
        if omega == 0.0 {
            return Branch::ZeroOmega;
        }
        let wh = omega * self.h;
        let k = round(wh);
        if k != 0.0 && abs(wh - k) < RESONANCE_TOLERANCE {
            Branch::ResonantInteger
        } else {
            Branch::Generic
        }
    }

    /// Structure for `ω`, dispatching on the branch.
    pub fn structure(&self, omega: f64) -> Structure {
        match self.classify(omega) {
            Branch::ZeroOmega => self.zero_structure(),
            Branch::ResonantInteger => self.resonant_structure(round(omega * self.h)),
            Branch::Generic => self.generic_structure(omega),
        }
    }

    pub(crate) fn zero_structure(&self) -> Structure {
        let nr = self.tables.n_roots;
        let mut s = Structure {
            branch: Branch::ZeroOmega,
            omega: 0.0,
            k_factor: 1.0,
            first: Complex64::new(0.5, 0.0),
            last: Complex64::new(0.5, 0.0),
            a: [ZERO; MAX_ROOTS],
            b: [ZERO; MAX_ROOTS],
            n_roots: nr,
        };
        for k in 0..nr {
            s.a[k] = Complex64::new(self.zero_d[k], 0.0);
            s.b[k] = s.a[k];
        }
        s
    }

    /// Resonant structure at `ωh = k` exactly.
    pub(crate) fn resonant_structure(&self, k: f64) -> Structure {
        let inputs = self.resonant_inputs(k);
        self.solve_structure(&inputs)
    }

    pub(crate) fn generic_structure(&self, omega: f64) -> Structure {
        let inputs = self.generic_inputs(omega);
        self.solve_structure(&inputs)
    }

    fn resonant_inputs(&self, k: f64) -> RhsInputs {
        RhsInputs {
            branch: Branch::ResonantInteger,
            omega: k / self.h,
            wh: k,
            kf: 0.0,
            kappa: 1.0,
            lp: [ZERO; MAX_ORDER],
        }
    }

    fn generic_inputs(&self, omega: f64) -> RhsInputs {
        let wh = omega * self.h;
        let mut lp = [ZERO; MAX_ORDER];
        for (j, v) in lp.iter_mut().enumerate().take(self.m) {
            *v = self.tables.polylog_plus(j, wh);
        }
        RhsInputs {
            branch: Branch::Generic,
            omega,
            wh,
            kf: self.tables.k_factor(wh),
            kappa: self.tables.kappa(wh),
            lp,
        }
    }

    /// Right-hand side of the boundary system and the two end terms.
    /// `K = 0, κ = 1` turns the oscillatory formula into the resonant one.
    fn rhs(&self, inp: &RhsInputs) -> ([Complex64; 2 * MAX_ROOTS], Complex64, Complex64) {
        let nr = self.tables.n_roots;
        let (kf, lp) = (inp.kf, &inp.lp);
        let ea = cis_turns(inp.omega * self.a);
        let eb = cis_turns(inp.omega * self.b);
        let inv_u = Complex64::new(0.0, 2.0 * core::f64::consts::PI * inp.wh).inv();
        // κ α! / u^{α+1}
        let mut ku = [ZERO; MAX_ORDER];
        let mut p = inv_u;
        for (al, v) in ku.iter_mut().enumerate().take(self.m) {
            *v = p * (inp.kappa * factorial(al));
            p *= inv_u;
        }
        let nf = self.n as f64;
        let mut rhs = [ZERO; 2 * MAX_ROOTS];
        for j in 1..self.m {
            rhs[j - 1] = ea * (ku[j] - lp[j].conj() * kf);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let mut tail = ZERO;
            for al in 1..=j {
                let w = powi(nf, (j - al) as u32) * binomial(j, al);
                let s = if al % 2 == 1 { -1.0 } else { 1.0 };
                tail += (ku[al] * s + lp[al] * kf) * w;
            }
            rhs[nr + j - 1] = ea * (ku[j] * sign - lp[j] * kf) + eb * tail;
        }
        for (r, sc) in rhs.iter_mut().zip(&self.row_scale) {
            *r *= *sc;
        }
        let first = ea * (lp[0].conj() * kf - ku[0]);
        let last = eb * (ku[0] + lp[0] * kf);
        (rhs, first, last)
    }

    fn solve_structure(&self, inp: &RhsInputs) -> Structure {
        let nr = self.tables.n_roots;
        let (mut rhs, first, last) = self.rhs(inp);
        let mut s = Structure {
            branch: inp.branch,
            omega: inp.omega,
            k_factor: inp.kf,
            first,
            last,
            a: [ZERO; MAX_ROOTS],
            b: [ZERO; MAX_ROOTS],
            n_roots: nr,
        };
        if let Some(lu) = &self.lu {
            let orig = rhs;
            let sys = &mut rhs[..2 * nr];
            lu.solve_in_place(sys);
            if self.condition > 1e6 {
                let mut r = [ZERO; 2 * MAX_ROOTS];
                let r = &mut r[..2 * nr];
                crate::linalg::residual_compensated_into(&self.system, sys, &orig[..2 * nr], r);
                lu.solve_in_place(r);
                for (x, d) in sys.iter_mut().zip(r.iter()) {
                    *x += d;
                }
            }
            for k in 0..nr {
                s.a[k] = sys[k] * self.col_scale[k];
                s.b[k] = sys[nr + k] * self.col_scale[nr + k];
            }
        }
        s
    }

    /// Relative residual `‖M x - r‖∞ / ‖r‖∞` of the boundary system for a
    /// computed structure, with the right-hand side rebuilt from scratch.
    pub fn structure_residual(&self, s: &Structure) -> f64 {
        let nr = self.tables.n_roots;
        if nr == 0 || s.branch == Branch::ZeroOmega {
            return 0.0;
        }
        let inputs = match s.branch {
            Branch::ResonantInteger => self.resonant_inputs(s.omega * self.h),
            _ => self.generic_inputs(s.omega),
        };
        let (rhs, _, _) = self.rhs(&inputs);
        let rhs = &rhs[..2 * nr];
        let mut x = vec![ZERO; 2 * nr];
        for k in 0..nr {
            x[k] = s.a[k] / self.col_scale[k];
            x[nr + k] = s.b[k] / self.col_scale[nr + k];
        }
        let r = crate::linalg::residual_compensated(&self.system, &x, rhs);
        let bn = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rn = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if bn > 0.0 {
            rn / bn
        } else {
            rn
        }
    }

    /// `P_k(β)` and `R_k(β)` as defined on [`Structure`].
    #[inline]
    pub fn boundary_basis(&self, k: usize, beta: usize) -> (f64, f64) {
        let q = self.tables.roots[k];
        let n = self.n;
        let end_near = q / (q - 1.0);
        let end_far = self.qpow(k, n) / (1.0 - q);
        if beta == 0 {
            (end_near, end_far)
        } else if beta == n {
            (end_far, end_near)
        } else {
            (self.qpow(k, beta), self.qpow(k, n - beta))
        }
    }

    /// Weight `C_β` for a structure.
    pub fn weight(&self, s: &Structure, beta: usize) -> Complex64 {
        let mut v = if beta == 0 {
            s.first
        } else if beta == self.n {
            s.last
        } else if s.k_factor == 0.0 {
            ZERO
        } else {
            let x = self.a + self.h * beta as f64;
            cis_turns(s.omega * x) * s.k_factor
        };
        for k in 0..s.n_roots {
            let (p, r) = self.boundary_basis(k, beta);
            v += s.a[k] * p + s.b[k] * r;
        }
        v * self.h
    }

    pub fn weights(&self, s: &Structure) -> Vec<Complex64> {
        (0..=self.n).map(|beta| self.weight(s, beta)).collect()
    }

    /// Sums `Σ_β P_k(β) f_β` and `Σ_β R_k(β) f_β` for every root. With these
    /// the boundary-layer part of `Σ C_β f_β` costs `O(m)` per frequency.
    pub fn boundary_moments(
        &self,
        f: &[Complex64],
    ) -> ([Complex64; MAX_ROOTS], [Complex64; MAX_ROOTS]) {
        let mut pm = [ZERO; MAX_ROOTS];
        let mut rm = [ZERO; MAX_ROOTS];
        for k in 0..self.tables.n_roots {
            for (beta, fv) in f.iter().enumerate() {
                let (p, r) = self.boundary_basis(k, beta);
                pm[k] += fv * p;
                rm[k] += fv * r;
            }
        }
        (pm, rm)
    }
}

fn pow2_near_inverse(v: f64) -> f64 {
    if v > 0.0 {
        libm::exp2(-libm::round(libm::log2(v)))
    } else {
        1.0
    }
}

/// Scales rows, then columns, by powers of two near the inverse of their
/// largest entries. Exact in floating point; removes most of the `N^{j-α}`
/// growth from the condition number.
fn equilibrate(mut mat: Matrix) -> (Matrix, [f64; 2 * MAX_ROOTS], [f64; 2 * MAX_ROOTS]) {
    let n = mat.n;
    let mut rows = [1.0; 2 * MAX_ROOTS];
    let mut cols = [1.0; 2 * MAX_ROOTS];
    for (i, sc) in rows.iter_mut().enumerate().take(n) {
        *sc = pow2_near_inverse(mat.row(i).iter().map(|v| v.norm()).fold(0.0, f64::max));
        for j in 0..n {
            let v = mat.get(i, j) * *sc;
            mat.set(i, j, v);
        }
    }
    for (j, sc) in cols.iter_mut().enumerate().take(n) {
        *sc = pow2_near_inverse((0..n).map(|i| mat.get(i, j).norm()).fold(0.0, f64::max));
        for i in 0..n {
            let v = mat.get(i, j) * *sc;
            mat.set(i, j, v);
        }
    }
    (mat, rows, cols)
}

struct RhsInputs {
    branch: Branch,
    omega: f64,
    wh: f64,
    kf: f64,
    kappa: f64,
    lp: [Complex64; MAX_ORDER],
}
