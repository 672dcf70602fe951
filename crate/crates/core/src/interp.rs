//! Shape-preserving cubic Hermite interpolation of nodal radial data.
//!
//! Slopes come from fourth-order centred differences (with the even
//! reflection `f(-r) = f(r)` near the origin and `f'(0) = 0`). Wherever the
//! data are strictly monotone through a node the slope is clipped with the
//! Fritsch–Carlson bound, so monotone data give a monotone interpolant; at
//! local extrema the high-order slope is kept.

/// A monotone piece of the interpolant: on `[s0, s1]` of interval `k` the
/// cubic is monotone, running from `va` to `vb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonePiece {
    pub k: usize,
    pub s0: f64,
    pub s1: f64,
    pub va: f64,
    pub vb: f64,
}

impl MonotonePiece {
    pub fn lo(&self) -> f64 {
        self.va.min(self.vb)
    }

    pub fn hi(&self) -> f64 {
        self.va.max(self.vb)
    }
}

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Interpolant of `values` on the uniform mesh `r_i = i h`.
    pub fn new(h: f64, values: &[f64]) -> Self {
        let slopes = limited_slopes(h, values);
        Self {
            h,
            values: values.to_vec(),
            slopes,
        }
    }

    pub fn r_max(&self) -> f64 {
        self.h * (self.values.len() - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn num_intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Power-basis coefficients `(a, b, c, e)` of `p(s) = a + b s + c s² + e s³`
    /// on interval `k`, `s = (r - r_k)/h ∈ [0, 1]`.
    pub fn coeffs(&self, k: usize) -> [f64; 4] {
        let (f0, f1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.h * self.slopes[k], self.h * self.slopes[k + 1]);
        [
            f0,
            d0,
            3.0 * (f1 - f0) - 2.0 * d0 - d1,
            2.0 * (f0 - f1) + d0 + d1,
        ]
    }

    pub fn eval_local(&self, k: usize, s: f64) -> f64 {
        let [a, b, c, e] = self.coeffs(k);
        a + s * (b + s * (c + s * e))
    }

    /// Value at radius `r`; `None` outside `[0, r_max]`.
    pub fn eval(&self, r: f64) -> Option<f64> {
        if !(0.0..=self.r_max()).contains(&r) {
            return None;
        }
        let x = r / self.h;
        let k = (x.floor() as usize).min(self.num_intervals() - 1);
        Some(self.eval_local(k, x - k as f64))
    }

    /// Splits every interval at the interior critical points of its cubic.
    pub fn monotone_pieces(&self) -> Vec<MonotonePiece> {
        let mut pieces = Vec::with_capacity(self.num_intervals() + 8);
        for k in 0..self.num_intervals() {
            let [_, b, c, e] = self.coeffs(k);
            let mut cuts = vec![0.0];
            cuts.extend(quadratic_roots_in_unit(3.0 * e, 2.0 * c, b));
            cuts.push(1.0);
            for w in cuts.windows(2) {
                if w[1] > w[0] {
                    pieces.push(MonotonePiece {
                        k,
                        s0: w[0],
                        s1: w[1],
                        va: self.eval_local(k, w[0]),
                        vb: self.eval_local(k, w[1]),
                    });
                }
            }
        }
        pieces
    }

    /// The local coordinate in `[piece.s0, piece.s1]` where the piece takes
    /// the value `t`, which must lie between `piece.lo()` and `piece.hi()`.
    pub fn solve_in_piece(&self, piece: &MonotonePiece, t: f64) -> f64 {
        let k = piece.k;
        bracketed_root(|s| self.eval_local(k, s) - t, piece.s0, piece.s1, piece.va - t, piece.vb - t)
    }
}

/// Root of a continuous `f` on `[a, b]` given `f(a) = fa`, `f(b) = fb` of
/// opposite sign (or zero). Illinois-modified regula falsi, with a bisection
/// step whenever the bracket fails to halve; runs to full double precision.
pub(crate) fn bracketed_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    // Which end was retained on the previous step: -1 for a, 1 for b.
    let mut side = 0;
    let mut width = (b - a).abs();
    for _ in 0..200 {
        let mut m = (a * fb - b * fa) / (fb - fa);
        if !(m > a.min(b) && m < a.max(b)) {
            m = 0.5 * (a + b);
        }
        let mid = 0.5 * (a + b);
        if m == a || m == b || mid == a || mid == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            fb = fm;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        let w = (b - a).abs();
        if w > 0.5 * width {
            // Slow progress: bisect.
            let mid = 0.5 * (a + b);
            let fmid = f(mid);
            if fmid == 0.0 {
                return mid;
            }
            if (fmid > 0.0) == (fa > 0.0) {
                a = mid;
                fa = fmid;
            } else {
                b = mid;
                fb = fmid;
            }
            side = 0;
        }
        width = (b - a).abs();
    }
    0.5 * (a + b)
}

/// Sorted roots of `a s² + b s + c` strictly inside `(0, 1)`.
fn quadratic_roots_in_unit(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc > 0.0 {
            let sq = disc.sqrt();
            // Numerically stable pair.
            let qq = -0.5 * (b + b.signum() * sq);
            roots.push(qq / a);
            if qq != 0.0 {
                roots.push(c / qq);
            }
        }
    }
    roots.retain(|s| *s > 0.0 && *s < 1.0);
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

fn limited_slopes(h: f64, f: &[f64]) -> Vec<f64> {
    let len = f.len();
    assert!(len >= 2, "interpolation needs at least two nodes");
    let at = |i: isize| -> f64 { f[i.unsigned_abs().min(len - 1)] };
    let mut d = vec![0.0; len];
    for (i, di) in d.iter_mut().enumerate().take(len - 1).skip(1) {
        let i = i as isize;
        *di = if (i as usize) + 2 < len {
            (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h)
        } else {
            (at(i + 1) - at(i - 1)) / (2.0 * h)
        };
    }
    if len >= 3 {
        d[len - 1] = (3.0 * f[len - 1] - 4.0 * f[len - 2] + f[len - 3]) / (2.0 * h);
    } else {
        d[len - 1] = (f[1] - f[0]) / h;
    }

    let secant = |k: usize| (f[k + 1] - f[k]) / h;
    // Direction of the data entering and leaving each node, skipping flat
    // stretches; zero means "no change on that side".
    let mut enter = vec![0.0; len];
    for i in 1..len {
        let s = secant(i - 1).signum() * (secant(i - 1) != 0.0) as u8 as f64;
        enter[i] = if s != 0.0 { s } else { enter[i - 1] };
    }
    let mut leave = vec![0.0; len];
    for i in (0..len - 1).rev() {
        let s = secant(i).signum() * (secant(i) != 0.0) as u8 as f64;
        leave[i] = if s != 0.0 { s } else { leave[i + 1] };
    }
    // A node is extremal when the data change direction through it; the
    // origin is one by reflection symmetry, the outer node never is.
    let extremal = |i: usize| i == 0 || enter[i] * leave[i] < 0.0;
    // Intervals between two non-extremal nodes (or starting at the origin)
    // must carry a monotone cubic.
    let constrained = |k: usize| (k == 0 || !extremal(k)) && !extremal(k + 1);
    for i in 1..len {
        if extremal(i) {
            continue;
        }
        let left = secant(i - 1);
        let right = if i + 1 < len { secant(i) } else { left };
        if left == 0.0 || right == 0.0 {
            d[i] = 0.0;
            continue;
        }
        let mut bound = f64::INFINITY;
        if constrained(i - 1) {
            bound = bound.min(left.abs());
        }
        if i + 1 < len && constrained(i) {
            bound = bound.min(right.abs());
        }
        if bound.is_finite() {
            d[i] = clip(d[i], bound, left.signum());
        }
    }
    d
}

/// Restricts `d` to have sign `sign` and magnitude at most `3 m`.
fn clip(d: f64, m: f64, sign: f64) -> f64 {
    let mag = (d * sign).clamp(0.0, 3.0 * m);
    sign * mag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(h: f64, len: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..len).map(|i| f(i as f64 * h)).collect()
    }

    #[test]
    fn reproduces_nodes() {
        let h = 0.1;
        let v = sample(h, 50, |r| (-r).exp() * (3.0 * r).cos());
        let p = MonotoneCubic::new(h, &v);
        for (i, &x) in v.iter().enumerate() {
            assert!((p.eval(i as f64 * h).unwrap() - x).abs() < 1e-14);
        }
        assert!(p.eval(-0.1).is_none());
        assert!(p.eval(5.0).is_none());
    }

    #[test]
    fn smooth_decreasing_data_is_accurate() {
        let h = 0.01;
        let v = sample(h, 2001, |r| 1.0 / r.cosh());
        let p = MonotoneCubic::new(h, &v);
        let mut err: f64 = 0.0;
        for j in 0..20000 {
            let r = j as f64 * 0.000999 + 0.0001;
            err = err.max((p.eval(r).unwrap() - 1.0 / r.cosh()).abs());
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn monotone_data_stay_monotone() {
        // Steep step: a plain cubic spline would overshoot.
        let h = 1.0;
        let v = [1.0, 1.0, 1.0, 0.9, 0.1, 0.0, 0.0, 0.0];
        let p = MonotoneCubic::new(h, &v);
        let mut prev = f64::INFINITY;
        for j in 0..=700 {
            let x = p.eval(j as f64 * 0.01).unwrap();
            assert!(x <= prev + 1e-15);
            assert!((-1e-15..=1.0 + 1e-15).contains(&x));
            prev = x;
        }
        assert_eq!(p.monotone_pieces().len(), 7);
    }

    #[test]
    fn pieces_split_at_extrema() {
        let h = 0.05;
        let v = sample(h, 201, |r| (-(r - 5.0) * (r - 5.0)).exp());
        let p = MonotoneCubic::new(h, &v);
        let pieces = p.monotone_pieces();
        for pc in &pieces {
            let mut prev = p.eval_local(pc.k, pc.s0);
            let up = pc.vb >= pc.va;
            for j in 1..=20 {
                let s = pc.s0 + (pc.s1 - pc.s0) * j as f64 / 20.0;
                let x = p.eval_local(pc.k, s);
                assert!(if up { x >= prev - 1e-15 } else { x <= prev + 1e-15 });
                prev = x;
            }
        }
        let t = 0.5;
        let pc = pieces.iter().find(|pc| pc.lo() < t && t < pc.hi()).unwrap();
        let s = p.solve_in_piece(pc, t);
        assert!((p.eval_local(pc.k, s) - t).abs() < 1e-13);
    }

    #[test]
    fn quadratic_roots() {
        let r = quadratic_roots_in_unit(1.0, -1.0, 0.21);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.3).abs() < 1e-14 && (r[1] - 0.7).abs() < 1e-14);
        assert!(quadratic_roots_in_unit(0.0, 0.0, 1.0).is_empty());
        assert_eq!(quadratic_roots_in_unit(0.0, 2.0, -1.0), vec![0.5]);
    }
}
