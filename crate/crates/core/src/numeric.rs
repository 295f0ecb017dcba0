//! Scalar numeric kernels: bracketed root refinement, golden-section
//! maximization, and small least-squares helpers used by the fit routines.

/// Outcome of a bracketed root solve.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

/// Brent's method on `[a, b]`. Requires `f(a)` and `f(b)` of opposite sign
/// (either may be zero). Falls back to bisection whenever the interpolation
/// step misbehaves, so convergence is guaranteed.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Option<RootResult>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(RootResult {
            x: a,
            f: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Some(RootResult {
            x: b,
            f: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for iter in 1..=max_iter {
        let tol = xtol * (1.0 + b.abs());
        if fb == 0.0 || (b - a).abs() < tol {
            return Some(RootResult {
                x: b,
                f: fb,
                iterations: iter,
            });
        }
        let mut s;
        if fa != fc && fb != fc {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            // secant
            s = b - fb * (b - a) / (fb - fa);
        }
        let lo = (3.0 * a + b) / 4.0;
        let cond_range = !((lo < s && s < b) || (b < s && s < lo));
        let cond_step = if mflag {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        let cond_small = if mflag {
            (b - c).abs() < tol
        } else {
            (c - d).abs() < tol
        };
        if cond_range || cond_step || cond_small || !s.is_finite() {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Some(RootResult {
        x: b,
        f: fb,
        iterations: max_iter,
    })
}

/// Outcome of a golden-section maximization.
#[derive(Debug, Clone, Copy)]
pub struct GoldenResult {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section search for a maximum of `f` on `[a, b]`. Non-finite
/// evaluations are treated as negative infinity, so the search stays on
/// the feasible part of the interval.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> GoldenResult
where
    F: FnMut(f64) -> f64,
{
    let guard = |v: f64| if v.is_finite() { v } else { f64::NEG_INFINITY };
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = guard(f(x1));
    let mut f2 = guard(f(x2));
    let mut iterations = 0;
    while (hi - lo).abs() > xtol * (1.0 + lo.abs().max(hi.abs())) && iterations < max_iter {
        iterations += 1;
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = guard(f(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = guard(f(x2));
        }
    }
    let (x, fx) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    GoldenResult {
        x,
        f: fx,
        iterations,
    }
}

/// Ordinary least squares for `y = intercept + slope * x`.
/// Returns `None` when fewer than two distinct x values are supplied.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Polynomial least squares of the given degree, low-order coefficients
/// first. The abscissa is rescaled to [0, 1]-ish internally so the normal
/// equations stay well conditioned on narrow grids.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Option<Vec<f64>> {
    let n = xs.len();
    let m = degree + 1;
    if n < m || ys.len() != n {
        return None;
    }
    let scale = xs.iter().fold(0.0_f64, |s, &x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let t: Vec<f64> = xs.iter().map(|&x| x / scale).collect();
    // normal equations A^T A c = A^T y with A_ij = t_i^j
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for (ti, &yi) in t.iter().zip(ys) {
        let mut powers = vec![1.0; m];
        for j in 1..m {
            powers[j] = powers[j - 1] * ti;
        }
        for j in 0..m {
            aty[j] += powers[j] * yi;
            for k in 0..m {
                ata[j][k] += powers[j] * powers[k];
            }
        }
    }
    let mut c = solve_dense(&mut ata, &mut aty)?;
    let mut s = 1.0;
    for coeff in c.iter_mut() {
        *coeff /= s;
        s *= scale;
    }
    Some(c)
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite")
        })?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (pivot_rows, rest) = a.split_at_mut(row);
            let pivot_row = &pivot_rows[col];
            for (target, &pivot) in rest[0][col..].iter_mut().zip(&pivot_row[col..]) {
                *target -= f * pivot;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Slope of ln|y| against ln(x); used for order-of-convergence checks.
/// Pairs with y = 0 (or non-finite) are dropped.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(ys.len());
    for (&x, &y) in xs.iter().zip(ys) {
        if x > 0.0 && y != 0.0 && y.is_finite() {
            lx.push(x.ln());
            ly.push(y.abs().ln());
        }
    }
    linear_fit(&lx, &ly).map(|(_, slope)| slope)
}
