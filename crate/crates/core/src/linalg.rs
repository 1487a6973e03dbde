//! Dense complex LU factorisation with partial or full pivoting, iterative
//! refinement against a compensated residual, and a 1-norm condition number.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dd::two_prod;
use crate::dd::Dd;
use crate::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    Partial,
    Full,
}

/// `P A Q = L U`, with the swaps recorded LAPACK style.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    row_swaps: Vec<usize>,
    col_swaps: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix, pivoting: Pivoting) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut row_swaps = vec![0; n];
        let mut col_swaps: Vec<usize> = (0..n).collect();
        let scale = a.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let (pr, pc) = match pivoting {
                Pivoting::Partial => {
                    let mut best = k;
                    let mut bv = -1.0;
                    for i in k..n {
                        let v = lu[i * n + k].norm();
                        if v > bv {
                            bv = v;
                            best = i;
                        }
                    }
                    (best, k)
                }
                Pivoting::Full => {
                    let (mut bi, mut bj, mut bv) = (k, k, -1.0);
                    for i in k..n {
                        for j in k..n {
                            let v = lu[i * n + j].norm();
                            if v > bv {
                                bv = v;
                                bi = i;
                                bj = j;
                            }
                        }
                    }
                    (bi, bj)
                }
            };
            row_swaps[k] = pr;
            col_swaps[k] = pc;
            if pr != k {
                for j in 0..n {
                    lu.swap(k * n + j, pr * n + j);
                }
            }
            if pc != k {
                for i in 0..n {
                    lu.swap(i * n + k, i * n + pc);
                }
            }
            let piv = lu[k * n + k];
            if piv.norm() <= scale * 1e-300 || piv.norm() == 0.0 {
                return Err(Error::Singular("LU factorisation"));
            }
            let inv = piv.inv();
            for i in k + 1..n {
                let f = lu[i * n + k] * inv;
                lu[i * n + k] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Lu {
            n,
            lu,
            row_swaps,
            col_swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.row_swaps[k];
            if p != k {
                b.swap(k, p);
            }
        }
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
        for k in (0..n).rev() {
            let p = self.col_swaps[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// 1-norm condition number, from the explicit inverse.
    pub fn condition_number(&self, a: &Matrix) -> f64 {
        let n = self.n;
        let mut inv_norm: f64 = 0.0;
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            self.solve_in_place(&mut e);
            inv_norm = inv_norm.max(e.iter().map(|v| v.norm()).sum());
        }
        a.norm_1() * inv_norm
    }
}

/// `b - A x` with every row accumulated in double-double.
pub fn residual_compensated(a: &Matrix, x: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.n];
    residual_compensated_into(a, x, b, &mut out);
    out
}

/// [`residual_compensated`] writing into `out`.
pub fn residual_compensated_into(
    a: &Matrix,
    x: &[Complex64],
    b: &[Complex64],
    out: &mut [Complex64],
) {
    residual_split_into(a, None, x, b, None, out);
}

/// Residual of the system `(a + a_lo) x = b + b_lo`, where the low parts
/// carry what rounding `a` and `b` to doubles lost.
pub fn residual_split_into(
    a: &Matrix,
    a_lo: Option<&Matrix>,
    x: &[Complex64],
    b: &[Complex64],
    b_lo: Option<&[Complex64]>,
    out: &mut [Complex64],
) {
    let sub_row = |re: &mut Dd, im: &mut Dd, row: &[Complex64]| {
        for (aij, xj) in row.iter().zip(x) {
            for (p, e) in [two_prod(aij.re, xj.re), two_prod(-aij.im, xj.im)] {
                *re = *re - Dd { hi: p, lo: e };
            }
            for (p, e) in [two_prod(aij.re, xj.im), two_prod(aij.im, xj.re)] {
                *im = *im - Dd { hi: p, lo: e };
            }
        }
    };
    for (i, o) in out.iter_mut().enumerate().take(a.n) {
        let mut re = Dd::new(b[i].re);
        let mut im = Dd::new(b[i].im);
        if let Some(bl) = b_lo {
            re = re + Dd::new(bl[i].re);
            im = im + Dd::new(bl[i].im);
        }
        sub_row(&mut re, &mut im, a.row(i));
        if let Some(al) = a_lo {
            sub_row(&mut re, &mut im, al.row(i));
        }
        *o = Complex64::new(re.to_f64(), im.to_f64());
    }
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solution of a dense system together with its diagnostics.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: Vec<Complex64>,
    /// `‖b - A x‖∞ / ‖b‖∞` from a compensated residual.
    pub relative_residual: f64,
    /// 1-norm condition number, when requested.
    pub condition_number: Option<f64>,
}

/// LU solve followed by `refinement_steps` rounds of iterative refinement.
pub fn solve_refined(
    a: &Matrix,
    b: &[Complex64],
    pivoting: Pivoting,
    refinement_steps: usize,
    want_condition: bool,
) -> Result<Solved> {
    solve_refined_split(a, None, b, None, pivoting, refinement_steps, want_condition)
}

/// [`solve_refined`] for a system known to double-double precision as
/// `(a + a_lo) x = b + b_lo`. Only `a` is factored; the residuals see the
/// low parts, so refinement converges to the solution of the unrounded
/// system as long as `cond(a) · 2^-53` is well below one.
pub fn solve_refined_split(
    a: &Matrix,
    a_lo: Option<&Matrix>,
    b: &[Complex64],
    b_lo: Option<&[Complex64]>,
    pivoting: Pivoting,
    refinement_steps: usize,
    want_condition: bool,
) -> Result<Solved> {
    let lo_len_ok = a_lo.is_none_or(|m| m.n == a.n) && b_lo.is_none_or(|v| v.len() == a.n);
    if b.len() != a.n || !lo_len_ok {
        return Err(Error::LengthMismatch {
            expected: a.n,
            actual: b.len(),
        });
    }
    let lu = Lu::factor(a, pivoting)?;
    let mut x = lu.solve(b);
    let mut r = vec![Complex64::new(0.0, 0.0); a.n];
    for _ in 0..refinement_steps {
        residual_split_into(a, a_lo, &x, b, b_lo, &mut r);
        lu.solve_in_place(&mut r);
        for (xi, di) in x.iter_mut().zip(&r) {
            *xi += di;
        }
    }
    let bn = inf_norm(b);
    residual_split_into(a, a_lo, &x, b, b_lo, &mut r);
    let relative_residual = if bn > 0.0 {
        inf_norm(&r) / bn
    } else {
        inf_norm(&r)
    };
    let condition_number = want_condition.then(|| lu.condition_number(a));
    Ok(Solved {
        x,
        relative_residual,
        condition_number,
    })
}
