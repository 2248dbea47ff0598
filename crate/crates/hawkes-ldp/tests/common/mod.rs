//! Independent numerical oracles shared by the integration and acceptance
//! suites: fixed-step RK4 re-implementations of the MGF flows, adaptive
//! Simpson quadrature, bisection, golden-section maximization, and
//! dense-grid Legendre transforms. Nothing here calls back into the library
//! solvers; this code is the reference the implementation is checked
//! against.

#![allow(dead_code)]

use rayon::prelude::*;

/// Fixed-step RK4 for a scalar autonomous field; `None` once the state
/// passes `cap` (treated as blow-up by the oracles).
pub fn rk4_scalar<F: Fn(f64) -> f64>(f: F, y0: f64, t_end: f64, steps: usize, cap: f64) -> Option<f64> {
    let h = t_end / steps as f64;
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f(y + 0.5 * h * k1);
        let k3 = f(y + 0.5 * h * k2);
        let k4 = f(y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !y.is_finite() || y > cap {
            return None;
        }
    }
    Some(y)
}

/// Fixed-step RK4 for a scalar field with a quadrature companion
/// `q' = g(y)`; returns `(y(T), q(T))`.
pub fn rk4_with_quadrature<F, G>(
    f: F,
    g: G,
    y0: f64,
    t_end: f64,
    steps: usize,
    cap: f64,
) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let h = t_end / steps as f64;
    let mut y = y0;
    let mut q = 0.0;
    for _ in 0..steps {
        let (ky1, kq1) = (f(y), g(y));
        let y2 = y + 0.5 * h * ky1;
        let (ky2, kq2) = (f(y2), g(y2));
        let y3 = y + 0.5 * h * ky2;
        let (ky3, kq3) = (f(y3), g(y3));
        let y4 = y + h * ky3;
        let (ky4, kq4) = (f(y4), g(y4));
        y += h / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
        q += h / 6.0 * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4);
        if !y.is_finite() || y > cap {
            return None;
        }
    }
    Some((y, q))
}

/// The `A` field `-βA + e^{αA} - 1`.
pub fn a_field(alpha: f64, beta: f64) -> impl Fn(f64) -> f64 {
    move |a: f64| -beta * a + (alpha * a).exp() - 1.0
}

/// The `C` field `-βC + e^{αC} - 1 + βθ/α`.
pub fn c_field(alpha: f64, beta: f64, theta: f64) -> impl Fn(f64) -> f64 {
    let shift = beta * theta / alpha;
    move |c: f64| -beta * c + (alpha * c).exp() - 1.0 + shift
}

/// `A(T;θ)` by fine RK4; `None` past blow-up.
pub fn rk4_a(alpha: f64, beta: f64, theta: f64, t_end: f64, steps: usize) -> Option<f64> {
    rk4_scalar(a_field(alpha, beta), theta, t_end, steps, 80.0 / alpha)
}

/// `B(T;θ)` by fine RK4 alongside `A`.
pub fn rk4_b(alpha: f64, beta: f64, mu: f64, theta: f64, t_end: f64, steps: usize) -> Option<f64> {
    rk4_with_quadrature(
        a_field(alpha, beta),
        move |a: f64| mu * ((alpha * a).exp() - 1.0),
        theta,
        t_end,
        steps,
        80.0 / alpha,
    )
    .map(|(_, b)| b)
}

/// `C(T;θ/α)` by fine RK4.
pub fn rk4_c(alpha: f64, beta: f64, theta: f64, t_end: f64, steps: usize) -> Option<f64> {
    rk4_scalar(
        c_field(alpha, beta, theta),
        theta / alpha,
        t_end,
        steps,
        80.0 / alpha,
    )
}

/// `w(T;θ) = C(T;θ/α) - θ/α`, the transformed count log-MGF.
pub fn rk4_w(alpha: f64, beta: f64, theta: f64, t_end: f64, steps: usize) -> Option<f64> {
    rk4_c(alpha, beta, theta, t_end, steps).map(|c| c - theta / alpha)
}

/// `D(T;θ/α)` by fine RK4 alongside `C`.
pub fn rk4_d(alpha: f64, beta: f64, mu: f64, theta: f64, t_end: f64, steps: usize) -> Option<f64> {
    rk4_with_quadrature(
        c_field(alpha, beta, theta),
        move |c: f64| mu * ((alpha * c).exp() - 1.0),
        theta / alpha,
        t_end,
        steps,
        80.0 / alpha,
    )
    .map(|(_, d)| d)
}

/// Dense θ-grid Legendre transform `sup_θ {θx - m(θ)}` where `m` is computed
/// per grid point (infinite `m` simply drops out). Parallel over the grid.
pub fn grid_legendre<M>(x: f64, theta_lo: f64, theta_hi: f64, step: f64, m: M) -> f64
where
    M: Fn(f64) -> Option<f64> + Sync,
{
    let n = ((theta_hi - theta_lo) / step).floor() as usize;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let theta = theta_lo + i as f64 * step;
            match m(theta) {
                Some(v) => theta * x - v,
                None => f64::NEG_INFINITY,
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Adaptive Simpson quadrature. The per-interval tolerance never drops below
/// float resolution of the running value, so steep integrands terminate.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let err = left + right - whole;
        let floor = 1e-15 * whole.abs().max(1.0);
        if depth == 0 || err.abs() <= 15.0 * tol.max(floor) {
            left + right + err / 15.0
        } else {
            let half = (0.5 * tol).max(floor);
            recurse(f, a, m, left, half, depth - 1) + recurse(f, m, b, right, half, depth - 1)
        }
    }
    recurse(&f, a, b, simpson(&f, a, b), tol, 30)
}

/// Bisection for a root of a monotone predicate-style function: requires
/// `f(lo)` and `f(hi)` of opposite signs.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let f_lo = f(lo);
    assert!(
        f_lo * f(hi) <= 0.0,
        "bisect needs a sign change on [{lo}, {hi}]"
    );
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if f(mid) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximum on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= xtol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// Composite Simpson on a fixed grid, for quadrature oracles over sampled
/// functions.
pub fn simpson_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// A tabulated convex transform: pairs `(θ, m(θ))` on an ascending grid,
/// supporting `sup_θ {θx - m(θ)}` queries with a monotone argmax pointer.
pub struct LegendreTable {
    thetas: Vec<f64>,
    values: Vec<f64>,
}

impl LegendreTable {
    /// Builds the table from `m(θ)` evaluated in parallel on
    /// `[theta_lo, theta_hi]` with the given step; `None` entries (blow-up)
    /// truncate the grid at the first failure above `θ = 0`.
    pub fn build<M>(theta_lo: f64, theta_hi: f64, step: f64, m: M) -> Self
    where
        M: Fn(f64) -> Option<f64> + Sync,
    {
        let n = ((theta_hi - theta_lo) / step).floor() as usize;
        let raw: Vec<(f64, Option<f64>)> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let theta = theta_lo + i as f64 * step;
                (theta, m(theta))
            })
            .collect();
        let mut thetas = Vec::with_capacity(raw.len());
        let mut values = Vec::with_capacity(raw.len());
        for (theta, v) in raw {
            match v {
                Some(v) => {
                    thetas.push(theta);
                    values.push(v);
                }
                None if theta > 0.0 => break,
                None => {}
            }
        }
        assert!(thetas.len() > 2, "legendre table came out empty");
        LegendreTable { thetas, values }
    }

    /// `sup_θ {θx - m(θ)}` over the grid.
    pub fn transform(&self, x: f64) -> f64 {
        self.thetas
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| t * x - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Transforms an ascending slice of `x` values in one pass using the
    /// monotonicity of the argmax.
    pub fn transform_ascending(&self, xs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(xs.len());
        let mut j = 0usize;
        for &x in xs {
            let value = |k: usize| self.thetas[k] * x - self.values[k];
            while j + 1 < self.thetas.len() && value(j + 1) >= value(j) {
                j += 1;
            }
            out.push(value(j));
        }
        out
    }
}

/// Brute-force ruin exponent for Poisson(1) claims: dense `y` grid
/// (1e-3-spaced over `(0, 20x]`) against an RK4-tabulated `H(·;T)`.
pub fn ruin_brute_force(alpha: f64, beta: f64, x: f64, t_end: f64) -> f64 {
    let steps = ((t_end * 4000.0) as usize).max(400);
    let table = LegendreTable::build(-12.0, 8.0, 1e-3, |theta| {
        rk4_w(alpha, beta, theta, t_end, steps)
    });
    let n = (20.0 * x / 1e-3) as usize;
    let ys: Vec<f64> = (1..=n).map(|i| i as f64 * 1e-3).collect();
    let hs = table.transform_ascending(&ys);
    let conjugate = |v: f64| v * v.ln() - v + 1.0; // Poisson(1)
    ys.iter()
        .zip(&hs)
        .map(|(&y, &h)| h.max(0.0) + y * conjugate(x / y))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force queue loss exponent on an `(s, y)` grid (`s` step 1e-2,
/// `y` step 1e-3) with RK4-tabulated `A(t;θ)` and `w(c;θ)` surfaces.
pub fn queue_brute_force(alpha: f64, beta: f64, x: f64, t_end: f64, c: f64) -> f64 {
    let s_step = 1e-2;
    let y_step = 1e-3;
    let theta_step = 1e-3;
    let y_max = 4.0 * x;

    // H(v; c) table
    let w_steps = ((c * 4000.0) as usize).max(400);
    let w_table = LegendreTable::build(-12.0, 8.0, theta_step, |theta| {
        rk4_w(alpha, beta, theta, c, w_steps)
    });

    // first branch: inf over s <= c of H(x; s); one RK4 pass per θ records
    // w(s; θ) at every s-grid time
    let s_in: Vec<f64> = (1..=((c / s_step).round() as usize))
        .map(|i| i as f64 * s_step)
        .collect();
    let n_theta_w = ((8.0 - (-12.0)) / theta_step) as usize;
    let w_rows: Vec<(f64, Vec<f64>)> = (0..=n_theta_w)
        .into_par_iter()
        .map(|j| {
            let theta = -12.0 + j as f64 * theta_step;
            let f = c_field(alpha, beta, theta);
            let steps = ((c * 1000.0) as usize).max(100);
            let h = c / steps as f64;
            let mut cval = theta / alpha;
            let mut row = Vec::with_capacity(s_in.len());
            let mut next = 0usize;
            let mut t = 0.0;
            for _ in 0..=steps {
                while next < s_in.len() && s_in[next] <= t + 0.5 * h {
                    row.push(cval - theta / alpha);
                    next += 1;
                }
                let k1 = f(cval);
                let k2 = f(cval + 0.5 * h * k1);
                let k3 = f(cval + 0.5 * h * k2);
                let k4 = f(cval + h * k3);
                cval += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
                if !cval.is_finite() || cval > 80.0 / alpha {
                    break;
                }
            }
            (theta, row)
        })
        .collect();
    let h_first: f64 = (0..s_in.len())
        .map(|k| {
            w_rows
                .iter()
                .filter_map(|(theta, row)| row.get(k).map(|&w| theta * x - w))
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0)
        })
        .fold(f64::INFINITY, f64::min);

    if t_end <= c {
        return h_first;
    }

    // A(t; θ) recorded at every lead time on the s-grid, one RK4 pass per θ
    let leads: Vec<f64> = (0..=(((t_end - c) / s_step).round() as usize))
        .map(|i| i as f64 * s_step)
        .collect();
    let n_theta = ((3.0 - (-12.0)) / theta_step) as usize;
    let a_rows: Vec<(f64, Vec<f64>)> = (0..=n_theta)
        .into_par_iter()
        .map(|j| {
            let theta = -12.0 + j as f64 * theta_step;
            let f = a_field(alpha, beta);
            let lead_max = *leads.last().unwrap();
            let steps = ((lead_max * 1000.0) as usize).max(100);
            let h = lead_max / steps as f64;
            let mut a = theta;
            let mut row = Vec::with_capacity(leads.len());
            let mut next = 0usize;
            let mut t = 0.0;
            for _ in 0..=steps {
                while next < leads.len() && leads[next] <= t + 0.5 * h {
                    row.push(a);
                    next += 1;
                }
                let k1 = f(a);
                let k2 = f(a + 0.5 * h * k1);
                let k3 = f(a + 0.5 * h * k2);
                let k4 = f(a + h * k3);
                a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
                if !a.is_finite() || a > 80.0 / alpha {
                    break;
                }
            }
            (theta, row)
        })
        .collect();

    // per lead time, assemble the J table from surviving rows and scan y
    let best_second = leads
        .par_iter()
        .enumerate()
        .map(|(k, &lead)| {
            if lead == 0.0 {
                return f64::INFINITY; // the s = c end is covered by branch 1
            }
            let edge = (-beta * lead).exp();
            let mut thetas = Vec::new();
            let mut a_vals = Vec::new();
            for (theta, row) in &a_rows {
                if let Some(&a) = row.get(k) {
                    thetas.push(*theta);
                    a_vals.push(a);
                } else if *theta > 0.0 {
                    break;
                }
            }
            let j_of = |y: f64, ptr: &mut usize| -> f64 {
                let value = |q: usize| thetas[q] * y - a_vals[q];
                while *ptr + 1 < thetas.len() && value(*ptr + 1) >= value(*ptr) {
                    *ptr += 1;
                }
                value(*ptr)
            };
            let mut h_ptr = w_table.thetas.len() - 1;
            let h_of = |v: f64, ptr: &mut usize| -> f64 {
                // v descends while y ascends, so this pointer walks left
                let value = |q: usize| w_table.thetas[q] * v - w_table.values[q];
                while *ptr > 0 && value(*ptr - 1) >= value(*ptr) {
                    *ptr -= 1;
                }
                value(*ptr)
            };
            let mut j_ptr = 0usize;
            let mut best = f64::INFINITY;
            let mut y = (edge * (1.0 + 1e-9)).max(y_step);
            while y <= y_max {
                let j = j_of(y, &mut j_ptr).max(0.0);
                let h = h_of(x / y, &mut h_ptr).max(0.0);
                best = best.min(y * h + j);
                y += y_step;
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);

    h_first.min(best_second)
}
