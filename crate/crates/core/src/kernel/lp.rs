use crate::scalar::Real;

/// Dense linear program `min cᵀx  s.t.  A x = b,  lower ≤ x ≤ upper`.
///
/// Lower bounds must be finite; upper bounds may be `+∞`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub cost: Vec<T>,
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
}

struct Tableau<T> {
    m: usize,
    width: usize,
    t: Vec<T>,
    beta: Vec<T>,
    basis: Vec<usize>,
    basic: Vec<bool>,
    at_upper: Vec<bool>,
    width_bound: Vec<T>,
    enterable: Vec<bool>,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Solves the program with a bounded-variable two-phase primal simplex.
pub fn solve_lp<T: Real>(lp: &LinearProgram<T>) -> LpSolution<T> {
    let n = lp.cost.len();
    let m = lp.b.len();
    assert!(lp.a.iter().all(|r| r.len() == n) && lp.a.len() == m, "solve_lp: dimensions");
    assert!(lp.lower.len() == n && lp.upper.len() == n, "solve_lp: bound lengths");
    let fail = |status| LpSolution { status, x: lp.lower.clone(), objective: T::nan() };
    if lp.lower.iter().zip(&lp.upper).any(|(l, u)| l > u) {
        return fail(LpStatus::Infeasible);
    }

    let width = n + m;
    let mut t = vec![T::zero(); m * width];
    let mut beta = vec![T::zero(); m];
    for i in 0..m {
        let mut bi = lp.b[i];
        for j in 0..n {
            bi -= lp.a[i][j] * lp.lower[j];
        }
        let s = if bi < T::zero() { -T::one() } else { T::one() };
        for j in 0..n {
            t[i * width + j] = s * lp.a[i][j];
        }
        t[i * width + n + i] = T::one();
        beta[i] = s * bi;
    }
    let mut width_bound: Vec<T> = (0..n).map(|j| lp.upper[j] - lp.lower[j]).collect();
    width_bound.extend(std::iter::repeat_n(T::infinity(), m));
    let mut tab = Tableau {
        m,
        width,
        t,
        beta,
        basis: (n..n + m).collect(),
        basic: (0..width).map(|j| j >= n).collect(),
        at_upper: vec![false; width],
        width_bound,
        enterable: vec![true; width],
    };
    for i in 0..m {
        tab.enterable[n + i] = false;
    }
    let max_iter = 200 * (n + m) + 1000;

    let mut c1 = vec![T::zero(); width];
    for c in c1.iter_mut().skip(n) {
        *c = T::one();
    }
    let bscale = tab.beta.iter().fold(T::one(), |a, b| a.max(b.abs()));
    if let Outcome::IterationLimit = tab.run(&c1, max_iter) {
        return fail(LpStatus::IterationLimit);
    }
    let infeas: T = tab.basis.iter().zip(&tab.beta).filter(|(&v, _)| v >= n).map(|(_, &b)| b).sum();
    if infeas > T::lit(1e-9) * bscale {
        return fail(LpStatus::Infeasible);
    }
    for j in n..width {
        tab.width_bound[j] = T::zero();
    }

    let mut c2 = vec![T::zero(); width];
    c2[..n].copy_from_slice(&lp.cost);
    let status = match tab.run(&c2, max_iter) {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => return fail(LpStatus::Unbounded),
        Outcome::IterationLimit => return fail(LpStatus::IterationLimit),
    };
    let mut y: Vec<T> = (0..n).map(|j| if tab.at_upper[j] { tab.width_bound[j] } else { T::zero() }).collect();
    for (i, &v) in tab.basis.iter().enumerate() {
        if v < n {
            y[v] = tab.beta[i];
        }
    }
    let x: Vec<T> = (0..n).map(|j| (y[j] + lp.lower[j]).max(lp.lower[j]).min(lp.upper[j])).collect();
    let objective = x.iter().zip(&lp.cost).map(|(&a, &c)| a * c).sum();
    LpSolution { status, x, objective }
}

impl<T: Real> Tableau<T> {
    fn run(&mut self, cost: &[T], max_iter: usize) -> Outcome {
        let piv_tol = T::lit(1e-9);
        let opt_tol = T::lit(1e-10) * cost.iter().fold(T::one(), |a, c| a.max(c.abs()));
        let mut degenerate_streak = 0usize;
        let mut d = vec![T::zero(); self.width];
        for _ in 0..max_iter {
            // reduced costs
            d.copy_from_slice(cost);
            for i in 0..self.m {
                let cb = cost[self.basis[i]];
                if cb != T::zero() {
                    let row = &self.t[i * self.width..(i + 1) * self.width];
                    for (dj, &tij) in d.iter_mut().zip(row) {
                        *dj -= cb * tij;
                    }
                }
            }
            let bland = degenerate_streak > 50;
            let mut enter: Option<(usize, T)> = None;
            for j in 0..self.width {
                if !self.enterable[j] || self.is_basic(j) {
                    continue;
                }
                let gain = if self.at_upper[j] {
                    d[j]
                } else if self.width_bound[j] > T::zero() {
                    -d[j]
                } else {
                    T::zero()
                };
                if gain > opt_tol {
                    match enter {
                        Some((_, g)) if bland || g >= gain => {}
                        _ => enter = Some((j, gain)),
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = enter else {
                return Outcome::Optimal;
            };
            let dir = if self.at_upper[j] { -T::one() } else { T::one() };

            let mut theta = self.width_bound[j];
            let mut leave: Option<(usize, bool, T)> = None;
            for i in 0..self.m {
                let alpha = dir * self.t[i * self.width + j];
                let (limit, to_upper) = if alpha > piv_tol {
                    (self.beta[i].max(T::zero()) / alpha, false)
                } else if alpha < -piv_tol && self.width_bound[self.basis[i]].is_finite() {
                    ((self.width_bound[self.basis[i]] - self.beta[i]).max(T::zero()) / -alpha, true)
                } else {
                    continue;
                };
                let better = match leave {
                    None => limit < theta,
                    Some((li, _, la)) => {
                        let tie = (limit - theta).abs() <= T::lit(1e-12) * (T::one() + theta.abs());
                        if tie {
                            if bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                alpha.abs() > la.abs()
                            }
                        } else {
                            limit < theta
                        }
                    }
                };
                if better {
                    theta = theta.min(limit);
                    leave = Some((i, to_upper, alpha));
                }
            }
            if theta.is_infinite() {
                return Outcome::Unbounded;
            }
            if theta <= T::lit(1e-12) {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            for i in 0..self.m {
                let a = self.t[i * self.width + j];
                if a != T::zero() {
                    self.beta[i] -= theta * dir * a;
                }
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper, _)) => {
                    let entering_value = if self.at_upper[j] { self.width_bound[j] - theta } else { theta };
                    let old = self.basis[r];
                    self.at_upper[old] = to_upper;
                    self.at_upper[j] = false;
                    self.basis[r] = j;
                    self.basic[old] = false;
                    self.basic[j] = true;
                    self.beta[r] = entering_value;
                    self.pivot(r, j);
                }
            }
        }
        Outcome::IterationLimit
    }

    fn is_basic(&self, j: usize) -> bool {
        self.basic[j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width;
        let p = self.t[r * w + j];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[j];
            if f != T::zero() {
                for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pv;
                }
                row[j] = T::zero();
            }
        }
    }
}
