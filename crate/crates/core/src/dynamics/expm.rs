//! Dense complex matrix exponential by scaling and squaring with a
//! degree-13 Padé approximant (Higham 2005).

use ndarray::{Array2, Zip};
use num_complex::Complex64;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `c0*a0 + c1*a1 + c2*a2 + c3 * I`
fn lin4(c: [f64; 4], a0: &Array2<Complex64>, a1: &Array2<Complex64>, a2: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = Array2::zeros(a0.raw_dim());
    Zip::from(&mut out)
        .and(a0)
        .and(a1)
        .and(a2)
        .for_each(|o, &x, &y, &z| *o = x * c[0] + y * c[1] + z * c[2]);
    for i in 0..out.nrows() {
        out[[i, i]] += c[3];
    }
    out
}

/// Solves `q * x = p` in place (`p` becomes `x`) by LU with partial pivoting.
fn solve_in_place(mut q: Array2<Complex64>, p: &mut Array2<Complex64>) {
    let n = q.nrows();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| q[[i, k]].norm().total_cmp(&q[[j, k]].norm()))
            .unwrap_or(k);
        if pivot != k {
            for j in 0..n {
                q.swap([k, j], [pivot, j]);
            }
            for j in 0..p.ncols() {
                p.swap([k, j], [pivot, j]);
            }
        }
        let d = q[[k, k]];
        for i in k + 1..n {
            let factor = q[[i, k]] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = q[[k, j]];
                q[[i, j]] -= factor * v;
            }
            for j in 0..p.ncols() {
                let v = p[[k, j]];
                p[[i, j]] -= factor * v;
            }
        }
    }
    for k in (0..n).rev() {
        let d = q[[k, k]];
        for j in 0..p.ncols() {
            let mut v = p[[k, j]];
            for i in k + 1..n {
                v -= q[[k, i]] * p[[i, j]];
            }
            p[[k, j]] = v / d;
        }
    }
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(0.5f64.powi(squarings), 0.0);

    let b = PADE_13;
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let u_inner = lin4([b[13], b[11], b[9], 0.0], &a6, &a4, &a2);
    let u_tail = lin4([b[7], b[5], b[3], b[1]], &a6, &a4, &a2);
    let u = a.dot(&(a6.dot(&u_inner) + u_tail));

    let v_inner = lin4([b[12], b[10], b[8], 0.0], &a6, &a4, &a2);
    let v_tail = lin4([b[6], b[4], b[2], b[0]], &a6, &a4, &a2);
    let v = a6.dot(&v_inner) + v_tail;

    let mut x = &v + &u;
    solve_in_place(&v - &u, &mut x);

    for _ in 0..squarings {
        x = x.dot(&x);
    }
    x
}
