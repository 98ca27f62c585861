//! Quadrature rules shared by the geometry and trajectory modules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Settings for adaptive line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-14, max_evals: 1 << 20 }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
    priority: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod<const K: usize, F>(f: &mut F, a: f64, b: f64) -> Result<([f64; K], [f64; K])>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut rk = [0.0; K];
    let mut rg = [0.0; K];
    let fc = f(c)?;
    for k in 0..K {
        rk[k] = WGK[7] * fc[k];
        rg[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let f1 = f(c - h * XGK[j])?;
        let f2 = f(c + h * XGK[j])?;
        for k in 0..K {
            let s = f1[k] + f2[k];
            rk[k] += WGK[j] * s;
            if j % 2 == 1 {
                rg[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; K];
    for k in 0..K {
        rk[k] *= h;
        err[k] = (rk[k] - rg[k] * h).abs();
    }
    Ok((rk, err))
}

/// Adaptive Gauss–Kronrod (7/15) integration of a vector-valued integrand
/// over a union of intervals. The largest-error panel is bisected until every
/// component meets `rel_tol·|I| + abs_tol`.
pub fn integrate<const K: usize, F>(
    intervals: &[(f64, f64)],
    settings: &QuadSettings,
    mut f: F,
) -> Result<[f64; K]>
where
    F: FnMut(f64) -> Result<[f64; K]>,
{
    let splits = if intervals.len() < 64 { 4 } else { 1 };
    let mut evals = 0usize;
    let mut panels: Vec<Panel<K>> = Vec::new();
    for &(a, b) in intervals {
        if !(b > a) {
            continue;
        }
        for s in 0..splits {
            let lo = a + (b - a) * s as f64 / splits as f64;
            let hi = a + (b - a) * (s + 1) as f64 / splits as f64;
            let (value, error) = kronrod(&mut f, lo, hi)?;
            evals += 15;
            panels.push(Panel { a: lo, b: hi, value, error, priority: 0.0 });
        }
    }
    let mut total = [0.0; K];
    let mut total_err = [0.0; K];
    for p in &panels {
        for k in 0..K {
            total[k] += p.value[k];
            total_err[k] += p.error[k];
        }
    }
    let scale = |total: &[f64; K]| -> [f64; K] {
        let mut s = [0.0; K];
        for k in 0..K {
            s[k] = settings.rel_tol * total[k].abs() + settings.abs_tol;
        }
        s
    };
    let weight = |err: &[f64; K], s: &[f64; K]| -> f64 {
        (0..K).map(|k| err[k] / s[k]).fold(0.0, f64::max)
    };
    let mut s = scale(&total);
    let mut heap = BinaryHeap::with_capacity(panels.len() * 4);
    for mut p in panels {
        p.priority = weight(&p.error, &s);
        heap.push(p);
    }
    loop {
        if (0..K).all(|k| total_err[k] <= s[k]) {
            return Ok(total);
        }
        if evals >= settings.max_evals {
            return Err(Error::NonConvergence { evals });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return Ok(total),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::NonConvergence { evals });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod(&mut f, mid, worst.b)?;
        evals += 30;
        for k in 0..K {
            total[k] += v1[k] + v2[k] - worst.value[k];
            total_err[k] += e1[k] + e2[k] - worst.error[k];
        }
        s = scale(&total);
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, priority: weight(&e1, &s) });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, priority: weight(&e2, &s) });
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        if n > 1 {
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
