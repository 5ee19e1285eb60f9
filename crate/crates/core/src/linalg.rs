//! Dense vector helpers and small least squares routines.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn zeros(d: usize) -> Vec<f64> {
    vec![0.0; d]
}

pub fn sum_vectors(vs: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut s = zeros(d);
    for v in vs {
        for (acc, x) in s.iter_mut().zip(v) {
            *acc += x;
        }
    }
    s
}

pub fn mean(vs: &[Vec<f64>], d: usize) -> Vec<f64> {
    let n = vs.len().max(1) as f64;
    scale(&sum_vectors(vs, d), 1.0 / n)
}

pub fn unit(d: usize, j: usize) -> Vec<f64> {
    let mut e = zeros(d);
    e[j] = 1.0;
    e
}

/// Solve a square system by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale_ref = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale_ref {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Orthonormal basis of the span of `vs` (modified Gram-Schmidt, rank revealing).
pub fn orthonormal_basis(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w = axpy(&w, -c, q);
            }
        }
        let nv = norm2(v).max(1.0);
        let nw = norm2(&w);
        if nw > 1e-10 * nv {
            basis.push(scale(&w, 1.0 / nw));
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(vs)` in R^d.
pub fn orthogonal_complement(vs: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let basis = orthonormal_basis(vs);
    let mut all = basis.clone();
    let mut comp = Vec::new();
    for j in 0..d {
        let before = all.len();
        let e = unit(d, j);
        all = orthonormal_basis(&[all.clone(), vec![e]].concat());
        if all.len() > before {
            comp.push(all[all.len() - 1].clone());
        }
    }
    comp
}

/// Affine constraint system `E x = f` reduced to orthonormal rows.
#[derive(Debug, Clone)]
pub struct AffineSystem {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl AffineSystem {
    /// Returns `None` when the equations are inconsistent.
    pub fn new(eqs: &[Vec<f64>], f: &[f64]) -> Option<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for (e, &fk) in eqs.iter().zip(f) {
            let mut w = e.clone();
            let mut g = fk;
            for _ in 0..2 {
                for (q, &gq) in rows.iter().zip(&rhs) {
                    let c = dot(&w, q);
                    w = axpy(&w, -c, q);
                    g -= c * gq;
                }
            }
            let scale_ref = norm2(e).max(1.0);
            let nw = norm2(&w);
            if nw <= 1e-10 * scale_ref {
                if g.abs() > 1e-9 * scale_ref.max(fk.abs()) {
                    return None;
                }
                continue;
            }
            rows.push(scale(&w, 1.0 / nw));
            rhs.push(g / nw);
        }
        Some(AffineSystem { rows, rhs })
    }

    /// Euclidean projection onto the solution set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut p = x.to_vec();
        for (q, &g) in self.rows.iter().zip(&self.rhs) {
            let r = dot(q, &p) - g;
            p = axpy(&p, -r, q);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Nonnegative least squares `min ||G c - z||_2, c >= 0` (Lawson-Hanson).
/// `gens` are the columns of G.
pub fn nnls(gens: &[Vec<f64>], z: &[f64]) -> Vec<f64> {
    let m = gens.len();
    let mut c = vec![0.0; m];
    if m == 0 {
        return c;
    }
    let mut passive = vec![false; m];
    let residual = |c: &[f64]| {
        let mut r = z.to_vec();
        for (g, &ci) in gens.iter().zip(c) {
            if ci != 0.0 {
                r = axpy(&r, -ci, g);
            }
        }
        r
    };
    let zn = norm2(z).max(1.0);
    for _outer in 0..(3 * m + 10) {
        let r = residual(&c);
        let w: Vec<f64> = gens.iter().map(|g| dot(g, &r)).collect();
        let cand = (0..m)
            .filter(|&j| !passive[j] && w[j] > 1e-12 * zn)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]).then(b.cmp(&a)));
        let Some(j) = cand else { break };
        passive[j] = true;
        for _inner in 0..(3 * m + 10) {
            let idx: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let s = ls_subset(gens, &idx, z);
            let mut full = vec![0.0; m];
            for (k, &i) in idx.iter().enumerate() {
                full[i] = s[k];
            }
            if idx.iter().all(|&i| full[i] > 0.0) {
                c = full;
                break;
            }
            let mut alpha = 1.0_f64;
            for &i in &idx {
                if full[i] <= 0.0 {
                    let denom = c[i] - full[i];
                    if denom > 0.0 {
                        alpha = alpha.min(c[i] / denom);
                    }
                }
            }
            for &i in &idx {
                c[i] += alpha * (full[i] - c[i]);
                if c[i] <= 1e-15 {
                    c[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    c
}

fn ls_subset(gens: &[Vec<f64>], idx: &[usize], z: &[f64]) -> Vec<f64> {
    let k = idx.len();
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for (a, &i) in idx.iter().enumerate() {
        atb[a] = dot(&gens[i], z);
        for (b, &j) in idx.iter().enumerate() {
            ata[a][b] = dot(&gens[i], &gens[j]);
        }
    }
    if let Some(s) = solve(ata.clone(), atb.clone()) {
        return s;
    }
    let ridge = 1e-12 * (0..k).map(|a| ata[a][a]).fold(1.0, f64::max);
    for (a, row) in ata.iter_mut().enumerate() {
        row[a] += ridge;
    }
    solve(ata, atb).unwrap_or_else(|| vec![0.0; k])
}
