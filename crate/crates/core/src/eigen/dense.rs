//! Dense nonsymmetric eigen-solver: diagonal balancing, Householder
//! reduction to Hessenberg form, then Francis double-shift QR with
//! deflation. Eigenvectors come from back-substitution in the real Schur
//! form. The iteration follows the EISPACK/JAMA `orthes` + `hqr2` scheme.

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by [`full_spectrum`].
pub const DEFAULT_ORDER_CAP: usize = 4096;

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 200;

/// Row-major square work array.
struct Square {
    n: usize,
    a: Vec<f64>,
}

impl Square {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Self { n, a }
    }
}

impl Index<(usize, usize)> for Square {
    type Output = f64;
    #[inline(always)]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Square {
    #[inline(always)]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Real eigen-decomposition `A V = V D` in real block form: a real
/// eigenvalue owns one column of `V`; a complex pair `re +- i im` (with
/// `im > 0` first) owns two consecutive columns `[v_r, v_i]` such that
/// `v_r + i v_i` is the eigenvector of `re + i im`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues in Schur order, matching the columns of `vectors`.
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Eigenvalues sorted by descending real part, ties by ascending
    /// imaginary part.
    pub fn sorted_values(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        sort_spectrum(&mut v);
        v
    }
}

pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}

/// All eigenvalues, sorted by descending real part then ascending
/// imaginary part.
pub fn full_spectrum(mat: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    full_spectrum_capped(mat, DEFAULT_ORDER_CAP)
}

pub fn full_spectrum_capped(mat: &DMatrix<f64>, cap: usize) -> Result<Vec<Complex64>> {
    if mat.nrows() > cap {
        return Err(Error::InvalidArgument(format!(
            "matrix order {} exceeds the dense eigen-solve cap {cap}",
            mat.nrows()
        )));
    }
    let mut values = Solver::run(mat, false)?.values;
    sort_spectrum(&mut values);
    Ok(values)
}

pub fn eigen_decomposition(mat: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let s = Solver::run(mat, true)?;
    let n = s.n;
    let mut vectors = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            vectors[(i, j)] = s.v[(i, j)] * s.scale[i];
        }
    }
    Ok(EigenDecomposition {
        values: s.values,
        vectors,
    })
}

struct Solver {
    n: usize,
    h: Square,
    v: Square,
    scale: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
    values: Vec<Complex64>,
    vectors: bool,
}

impl Solver {
    fn run(mat: &DMatrix<f64>, vectors: bool) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let n = mat.nrows();
        let mut s = Self {
            n,
            h: Square::from_matrix(mat),
            v: Square::identity(n),
            scale: vec![1.0; n],
            d: vec![0.0; n],
            e: vec![0.0; n],
            values: Vec::new(),
            vectors,
        };
        if n == 0 {
            return Ok(s);
        }
        s.balance();
        s.orthes();
        s.hqr2()?;
        s.values = s
            .d
            .iter()
            .zip(&s.e)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(s)
    }

    /// Diagonal similarity `D^{-1} A D` with power-of-two entries that
    /// equalizes row and column norms.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let n = self.n;
        let h = &mut self.h;
        loop {
            let mut done = true;
            for i in 0..n {
                let mut c = 0.0;
                let mut r = 0.0;
                for j in 0..n {
                    if j != i {
                        c += h[(j, i)].abs();
                        r += h[(i, j)].abs();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= RADIX * RADIX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= RADIX * RADIX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    self.scale[i] *= f;
                    let g = 1.0 / f;
                    for j in 0..n {
                        h[(i, j)] *= g;
                    }
                    for j in 0..n {
                        h[(j, i)] *= f;
                    }
                }
            }
            if done {
                break;
            }
        }
    }

    /// Householder reduction to upper Hessenberg form, accumulating the
    /// orthogonal factor into `v` when eigenvectors are requested.
    fn orthes(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let high = n - 1;
        let mut ort = vec![0.0; n];
        let h = &mut self.h;

        for m in 1..high {
            let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
            if scale == 0.0 {
                continue;
            }
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[(i, m - 1)] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[(i, j)];
                }
                f /= hh;
                for i in m..=high {
                    h[(i, j)] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[(i, j)];
                }
                f /= hh;
                for j in m..=high {
                    h[(i, j)] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[(m, m - 1)] = scale * g;
        }

        if self.vectors {
            let v = &mut self.v;
            for m in (1..high).rev() {
                if h[(m, m - 1)] == 0.0 {
                    continue;
                }
                for i in m + 1..=high {
                    ort[i] = h[(i, m - 1)];
                }
                for j in m..=high {
                    let mut g = 0.0;
                    for i in m..=high {
                        g += ort[i] * v[(i, j)];
                    }
                    // double division avoids possible underflow
                    g = (g / ort[m]) / h[(m, m - 1)];
                    for i in m..=high {
                        v[(i, j)] += g * ort[i];
                    }
                }
            }
        }

        for i in 2..n {
            for j in 0..i - 1 {
                h[(i, j)] = 0.0;
            }
        }
    }

    fn hqr2(&mut self) -> Result<()> {
        let nn = self.n;
        let eps = f64::EPSILON;
        let vectors = self.vectors;
        let h = &mut self.h;
        let v = &mut self.v;
        let d = &mut self.d;
        let e = &mut self.e;

        let mut norm = 0.0;
        for i in 0..nn {
            for j in i.saturating_sub(1)..nn {
                norm += h[(i, j)].abs();
            }
        }

        let mut exshift = 0.0;
        let (mut p, mut q, mut r, mut s, mut z): (f64, f64, f64, f64, f64);
        let (mut w, mut x, mut y): (f64, f64, f64);
        let mut iter = 0usize;
        // `n` is the index of the trailing unconverged row, signed so the
        // loop can run past zero.
        let mut n = nn as isize - 1;

        while n >= 0 {
            let nu = n as usize;
            // look for a single small subdiagonal element
            let mut l = nu;
            while l > 0 {
                s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
                if s == 0.0 {
                    s = norm;
                }
                if h[(l, l - 1)].abs() < eps * s {
                    break;
                }
                l -= 1;
            }

            if l == nu {
                // one root
                h[(nu, nu)] += exshift;
                d[nu] = h[(nu, nu)];
                e[nu] = 0.0;
                n -= 1;
                iter = 0;
            } else if l + 1 == nu {
                // two roots
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
                p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
                q = p * p + w;
                z = q.abs().sqrt();
                h[(nu, nu)] += exshift;
                h[(nu - 1, nu - 1)] += exshift;
                x = h[(nu, nu)];

                if q >= 0.0 {
                    z = if p >= 0.0 { p + z } else { p - z };
                    d[nu - 1] = x + z;
                    d[nu] = d[nu - 1];
                    if z != 0.0 {
                        d[nu] = x - w / z;
                    }
                    e[nu - 1] = 0.0;
                    e[nu] = 0.0;
                    x = h[(nu, nu - 1)];
                    s = x.abs() + z.abs();
                    p = x / s;
                    q = z / s;
                    r = (p * p + q * q).sqrt();
                    p /= r;
                    q /= r;

                    for j in nu - 1..nn {
                        z = h[(nu - 1, j)];
                        h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                        h[(nu, j)] = q * h[(nu, j)] - p * z;
                    }
                    for i in 0..=nu {
                        z = h[(i, nu - 1)];
                        h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                        h[(i, nu)] = q * h[(i, nu)] - p * z;
                    }
                    if vectors {
                        for i in 0..nn {
                            z = v[(i, nu - 1)];
                            v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                            v[(i, nu)] = q * v[(i, nu)] - p * z;
                        }
                    }
                } else {
                    d[nu - 1] = x + p;
                    d[nu] = x + p;
                    e[nu - 1] = z;
                    e[nu] = -z;
                }
                n -= 2;
                iter = 0;
            } else {
                // no convergence yet: form the shift
                x = h[(nu, nu)];
                y = 0.0;
                w = 0.0;
                if l < nu {
                    y = h[(nu - 1, nu - 1)];
                    w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
                }

                // Wilkinson's ad hoc shift
                if iter == 10 {
                    exshift += x;
                    for i in 0..=nu {
                        h[(i, i)] -= x;
                    }
                    s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }

                // MATLAB's ad hoc shift
                if iter == 30 {
                    s = (y - x) / 2.0;
                    s = s * s + w;
                    if s > 0.0 {
                        s = s.sqrt();
                        if y < x {
                            s = -s;
                        }
                        s = x - w / ((y - x) / 2.0 + s);
                        for i in 0..=nu {
                            h[(i, i)] -= s;
                        }
                        exshift += s;
                        x = 0.964;
                        y = x;
                        w = x;
                    }
                }

                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::QrNotConverged {
                        index: nu,
                        iterations: iter,
                    });
                }

                // look for two consecutive small subdiagonal elements
                let mut m = nu - 2;
                loop {
                    z = h[(m, m)];
                    r = x - z;
                    s = y - z;
                    p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                    q = h[(m + 1, m + 1)] - z - r - s;
                    r = h[(m + 2, m + 1)];
                    s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                        < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                    {
                        break;
                    }
                    m -= 1;
                }

                for i in m + 2..=nu {
                    h[(i, i - 2)] = 0.0;
                    if i > m + 2 {
                        h[(i, i - 3)] = 0.0;
                    }
                }

                // double QR step on rows l..=n and columns m..=n
                for k in m..nu {
                    let notlast = k != nu - 1;
                    if k != m {
                        p = h[(k, k - 1)];
                        q = h[(k + 1, k - 1)];
                        r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                        x = p.abs() + q.abs() + r.abs();
                        if x == 0.0 {
                            continue;
                        }
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                    s = (p * p + q * q + r * r).sqrt();
                    if p < 0.0 {
                        s = -s;
                    }
                    if s == 0.0 {
                        continue;
                    }
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                    if vectors {
                        for i in 0..nn {
                            p = x * v[(i, k)] + y * v[(i, k + 1)];
                            if notlast {
                                p += z * v[(i, k + 2)];
                                v[(i, k + 2)] -= p * r;
                            }
                            v[(i, k)] -= p;
                            v[(i, k + 1)] -= p * q;
                        }
                    }
                }
            }
        }

        if !vectors || norm == 0.0 {
            return Ok(());
        }

        // Back-substitute in the quasi-triangular Schur form. Diagonal
        // entries that coincide with the current eigenvalue (to `sep`)
        // belong to the same eigenspace; their coupling is treated as
        // zero, so semisimple clusters get independent Schur-basis vectors.
        let sep = 1e-10 * norm;
        for nu in (0..nn).rev() {
            let p = d[nu];
            let q = e[nu];

            if q == 0.0 {
                let mut l = nu;
                h[(nu, nu)] = 1.0;
                let (mut zz, mut ss) = (0.0, 0.0);
                for i in (0..nu).rev() {
                    let w = h[(i, i)] - p;
                    let mut r = 0.0;
                    for j in l..=nu {
                        r += h[(i, j)] * h[(j, nu)];
                    }
                    if e[i] < 0.0 {
                        zz = w;
                        ss = r;
                        continue;
                    }
                    l = i;
                    if e[i] == 0.0 {
                        h[(i, nu)] = if w.abs() > sep { -r / w } else { 0.0 };
                    } else {
                        let x = h[(i, i + 1)];
                        let y = h[(i + 1, i)];
                        let qq = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        let t = (x * ss - zz * r) / qq;
                        h[(i, nu)] = t;
                        h[(i + 1, nu)] = if x.abs() > zz.abs() {
                            (-r - w * t) / x
                        } else {
                            (-ss - y * t) / zz
                        };
                    }
                    let t = h[(i, nu)].abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[(j, nu)] /= t;
                        }
                    }
                }
            } else if q < 0.0 {
                let mut l = nu - 1;
                if h[(nu, nu - 1)].abs() > h[(nu - 1, nu)].abs() {
                    h[(nu - 1, nu - 1)] = q / h[(nu, nu - 1)];
                    h[(nu - 1, nu)] = -(h[(nu, nu)] - p) / h[(nu, nu - 1)];
                } else {
                    let c = cdiv(0.0, -h[(nu - 1, nu)], h[(nu - 1, nu - 1)] - p, q);
                    h[(nu - 1, nu - 1)] = c.re;
                    h[(nu - 1, nu)] = c.im;
                }
                h[(nu, nu - 1)] = 0.0;
                h[(nu, nu)] = 1.0;
                let (mut zz, mut rr, mut ss) = (0.0, 0.0, 0.0);
                for i in (0..nu - 1).rev() {
                    let mut ra = 0.0;
                    let mut sa = 0.0;
                    for j in l..=nu {
                        ra += h[(i, j)] * h[(j, nu - 1)];
                        sa += h[(i, j)] * h[(j, nu)];
                    }
                    let w = h[(i, i)] - p;
                    if e[i] < 0.0 {
                        zz = w;
                        rr = ra;
                        ss = sa;
                        continue;
                    }
                    l = i;
                    if e[i] == 0.0 {
                        let c = cdiv(-ra, -sa, w, q);
                        h[(i, nu - 1)] = c.re;
                        h[(i, nu)] = c.im;
                    } else if (d[i] - p).hypot(e[i].abs() - q.abs()) <= sep {
                        // another copy of the same complex pair
                        h[(i, nu - 1)] = 0.0;
                        h[(i, nu)] = 0.0;
                        h[(i + 1, nu - 1)] = 0.0;
                        h[(i + 1, nu)] = 0.0;
                    } else {
                        let x = h[(i, i + 1)];
                        let y = h[(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + zz.abs());
                        }
                        let c = cdiv(x * rr - zz * ra + q * sa, x * ss - zz * sa - q * ra, vr, vi);
                        h[(i, nu - 1)] = c.re;
                        h[(i, nu)] = c.im;
                        if x.abs() > zz.abs() + q.abs() {
                            h[(i + 1, nu - 1)] = (-ra - w * h[(i, nu - 1)] + q * h[(i, nu)]) / x;
                            h[(i + 1, nu)] = (-sa - w * h[(i, nu)] - q * h[(i, nu - 1)]) / x;
                        } else {
                            let c = cdiv(-rr - y * h[(i, nu - 1)], -ss - y * h[(i, nu)], zz, q);
                            h[(i + 1, nu - 1)] = c.re;
                            h[(i + 1, nu)] = c.im;
                        }
                    }
                    let t = h[(i, nu - 1)].abs().max(h[(i, nu)].abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=nu {
                            h[(j, nu - 1)] /= t;
                            h[(j, nu)] /= t;
                        }
                    }
                }
            }
        }

        // back-transform: V <- V * X with X upper (quasi-)triangular
        let mut col = vec![0.0; nn];
        for j in (0..nn).rev() {
            for (i, c) in col.iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in 0..=j {
                    acc += v[(i, k)] * h[(k, j)];
                }
                *c = acc;
            }
            for (i, &c) in col.iter().enumerate() {
                v[(i, j)] = c;
            }
        }
        Ok(())
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> Complex64 {
    Complex64::new(xr, xi) / Complex64::new(yr, yi)
}
