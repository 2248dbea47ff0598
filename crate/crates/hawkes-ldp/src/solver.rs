//! Embedded Dormand-Prince 5(4) integrator with cubic-Hermite dense output
//! and first-crossing blow-up capture.
//!
//! The MGF flows integrated by this crate are smooth and non-stiff below the
//! blow-up cap, so a classic explicit 4/5 pair with absolute-plus-relative
//! error control is the right tool. Component 0 of the state is watched
//! against a caller-supplied cap; once it crosses, integration stops and the
//! crossing time is located on the last Hermite segment.

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
const MAX_STEPS: usize = 4_000_000;

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b - b_hat, used for the embedded error estimate.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Accepted-step trajectory of an initial value problem on `[0, t_end]`,
/// or on `[0, blowup_time]` when the watched component crossed the cap.
#[derive(Debug, Clone)]
pub(crate) struct OdeSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub blown_up: bool,
    pub blowup_time: Option<f64>,
}

impl<const N: usize> OdeSolution<N> {
    pub fn end_state(&self) -> &[f64; N] {
        self.y.last().expect("solution has at least one node")
    }

    /// Cubic Hermite evaluation on the accepted-step grid. `t` is clamped to
    /// the covered range.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 || t <= self.t[0] {
            return self.y[0];
        }
        if t >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let seg = match self.t.partition_point(|&tk| tk <= t) {
            0 => 0,
            k => k - 1,
        };
        let (t0, t1) = (self.t[seg], self.t[seg + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = h00 * self.y[seg][i]
                + h10 * h * self.dy[seg][i]
                + h01 * self.y[seg + 1][i]
                + h11 * h * self.dy[seg + 1][i];
        }
        out
    }

    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        self.eval(t)[i]
    }
}

fn rms_error<const N: usize>(err: &[f64; N], y: &[f64; N], y_new: &[f64; N], tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let scale = tol + tol * y[i].abs().max(y_new[i].abs());
        let r = err[i] / scale;
        acc += r * r;
    }
    (acc / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end` with local error
/// controlled by `tol` (used as both absolute and relative tolerance).
///
/// `cap` bounds component 0 from above: the first time it exceeds `cap`
/// the run is cut there and flagged as blown up.
pub(crate) fn integrate<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    cap: f64,
) -> OdeSolution<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    integrate_capped(f, y0, t_end, tol, cap, f64::INFINITY)
}

/// `integrate` with an additional ceiling on the step size. The cubic
/// Hermite dense output is one order below the integrator, so callers that
/// quadrature against the stored curve cap the steps to keep interpolation
/// error at the same level as the solve.
pub(crate) fn integrate_capped<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    cap: f64,
    h_max: f64,
) -> OdeSolution<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut sol = OdeSolution {
        t: Vec::with_capacity(256),
        y: Vec::with_capacity(256),
        dy: Vec::with_capacity(256),
        blown_up: false,
        blowup_time: None,
    };
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    sol.t.push(t);
    sol.y.push(y);
    sol.dy.push(k1);

    if y0[0] > cap {
        sol.blown_up = true;
        sol.blowup_time = Some(0.0);
        return sol;
    }
    if t_end <= 0.0 {
        return sol;
    }

    // Crude but serviceable first step; the controller takes over immediately.
    let d0: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let d1: f64 = k1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut h = (0.01 * (1.0 + d0) / (1.0 + d1))
        .min(t_end / 10.0)
        .min(h_max)
        .max(1e-12);

    let h_floor = (t_end * 1e-14).max(1e-300);
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS || h < h_floor {
            // Only reachable when the field is exploding faster than the cap
            // watch can resolve; report the blow-up at the current time.
            sol.blown_up = true;
            sol.blowup_time = Some(t);
            return sol;
        }
        if t + h > t_end {
            h = t_end - t;
        }

        let stage = |coeffs: &[f64], ks: &[[f64; N]]| {
            let mut ys = y;
            for (a, k) in coeffs.iter().zip(ks.iter()) {
                for i in 0..N {
                    ys[i] += h * a * k[i];
                }
            }
            ys
        };

        let k2 = f(t + C[1] * h, &stage(&A2, &[k1]));
        let k3 = f(t + C[2] * h, &stage(&A3, &[k1, k2]));
        let k4 = f(t + C[3] * h, &stage(&A4, &[k1, k2, k3]));
        let k5 = f(t + C[4] * h, &stage(&A5, &[k1, k2, k3, k4]));
        let k6 = f(t + C[5] * h, &stage(&A6, &[k1, k2, k3, k4, k5]));

        let mut y_new = y;
        for i in 0..N {
            y_new[i] += h
                * (B[0] * k1[i] + B[2] * k3[i] + B[3] * k4[i] + B[4] * k5[i] + B[5] * k6[i]);
        }
        let k7 = f(t + h, &y_new);

        let finite = y_new.iter().all(|v| v.is_finite()) && k7.iter().all(|v| v.is_finite());
        if !finite {
            h *= 0.5;
            continue;
        }

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E[0] * k1[i]
                    + E[2] * k3[i]
                    + E[3] * k4[i]
                    + E[4] * k5[i]
                    + E[5] * k6[i]
                    + E[6] * k7[i]);
        }
        let err_norm = rms_error(&err, &y, &y_new, tol);

        if err_norm <= 1.0 {
            let t_new = t + h;
            sol.t.push(t_new);
            sol.y.push(y_new);
            sol.dy.push(k7);
            if y_new[0] > cap {
                truncate_at_cap(&mut sol, cap);
                return sol;
            }
            t = t_new;
            y = y_new;
            k1 = k7; // FSAL
            let scale = (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE);
            h = (h * scale).min(h_max);
        } else {
            let scale = (SAFETY * err_norm.powf(-0.2)).clamp(MIN_SCALE, 1.0);
            h *= scale;
        }
    }
    sol
}

/// Replaces the final node with the cap-crossing point, located by bisection
/// on the last Hermite segment.
fn truncate_at_cap<const N: usize>(sol: &mut OdeSolution<N>, cap: f64) {
    let n = sol.t.len();
    debug_assert!(n >= 2);
    let (mut lo, mut hi) = (sol.t[n - 2], sol.t[n - 1]);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sol.eval_component(mid, 0) > cap {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    let t_cross = hi;
    let y_cross = sol.eval(t_cross);
    let dy_cross = sol.dy[n - 1]; // close enough for a truncated terminal node
    sol.t[n - 1] = t_cross;
    sol.y[n - 1] = y_cross;
    sol.dy[n - 1] = dy_cross;
    sol.blown_up = true;
    sol.blowup_time = Some(t_cross);
}
