//! Reference computations that share no code path with the library's
//! simulator or solver.
#![allow(dead_code)]

use num_complex::Complex64;
use qgame_core::bayesian::{BayesianPayoffTensor, StrategyProfile};
use qgame_core::game::{PayoffTable, Strategy};

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(s: Strategy) -> Matrix {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    match s {
        Strategy::I => vec![vec![o, z], vec![z, o]],
        Strategy::X => vec![vec![z, o], vec![o, z]],
        Strategy::Y => vec![vec![z, c(0.0, -1.0)], vec![c(0.0, 1.0), z]],
        Strategy::Z => vec![vec![o, z], vec![z, -o]],
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `cos χ · 1 + i sin χ · X⊗X` assembled from Pauli products.
pub fn j_matrix(chi: f64) -> Matrix {
    let xx = kron(&pauli(Strategy::X), &pauli(Strategy::X));
    let mut out = kron(&pauli(Strategy::I), &pauli(Strategy::I));
    for i in 0..4 {
        for j in 0..4 {
            // Sign matches the anti-diagonal -i sin χ of the written matrix.
            out[i][j] = out[i][j] * chi.cos() - c(0.0, 1.0) * chi.sin() * xx[i][j];
        }
    }
    out
}

pub fn dagger(m: &Matrix) -> Matrix {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].conj()).collect()).collect()
}

/// Outcome probabilities of the two-player game by dense 4×4 products.
pub fn dense_game_probabilities(chi: f64, a: Strategy, b: Strategy) -> [f64; 4] {
    let j = j_matrix(chi);
    let u = kron(&pauli(a), &pauli(b));
    let full = matmul(&dagger(&j), &matmul(&u, &j));
    let mut zero = vec![c(0.0, 0.0); 4];
    zero[0] = c(1.0, 0.0);
    let psi = matvec(&full, &zero);
    [0, 1, 2, 3].map(|i| psi[i].norm_sqr())
}

/// Closed form: a Pauli pair either commutes with X⊗X, giving a basis
/// outcome, or anticommutes, splitting `cos²2χ / sin²2χ` with the
/// doubly flipped outcome.
pub fn closed_form_probabilities(chi: f64, a: Strategy, b: Strategy) -> [f64; 4] {
    let flips = |s: Strategy| matches!(s, Strategy::X | Strategy::Y) as usize;
    let anti = |s: Strategy| matches!(s, Strategy::Y | Strategy::Z);
    let outcome = flips(a) << 1 | flips(b);
    let mut p = [0.0; 4];
    if anti(a) != anti(b) {
        p[outcome] = (2.0 * chi).cos().powi(2);
        p[outcome ^ 3] = (2.0 * chi).sin().powi(2);
    } else {
        p[outcome] = 1.0;
    }
    p
}

pub fn closed_form_payoffs(chi: f64, table: &PayoffTable, a: Strategy, b: Strategy) -> (f64, f64) {
    let p = closed_form_probabilities(chi, a, b);
    let rows = table.rows();
    let mut out = (0.0, 0.0);
    for o in 0..4 {
        out.0 += p[o] * rows[o >> 1][o & 1][0];
        out.1 += p[o] * rows[o >> 1][o & 1][1];
    }
    out
}

/// Bayesian tensor from the closed form, `[payoff_A, payoff_B1, payoff_B2]`
/// indexed as `[a][b1][b2]`.
pub fn closed_form_bayesian(chi: f64, p: f64, vs_b1: &PayoffTable, vs_b2: &PayoffTable) -> [[[[f64; 3]; 4]; 4]; 4] {
    let mut out = [[[[0.0; 3]; 4]; 4]; 4];
    for (i, a) in Strategy::ALL.into_iter().enumerate() {
        for (j, b1) in Strategy::ALL.into_iter().enumerate() {
            for (k, b2) in Strategy::ALL.into_iter().enumerate() {
                let (a1, pb1) = closed_form_payoffs(chi, vs_b1, a, b1);
                let (a2, pb2) = closed_form_payoffs(chi, vs_b2, a, b2);
                out[i][j][k] = [p * a1 + (1.0 - p) * a2, pb1, pb2];
            }
        }
    }
    out
}

pub fn as_nested(t: &BayesianPayoffTensor) -> [[[[f64; 3]; 4]; 4]; 4] {
    let mut out = [[[[0.0; 3]; 4]; 4]; 4];
    for profile in StrategyProfile::all() {
        out[profile.a.index()][profile.b1.index()][profile.b2.index()] = t.get(profile);
    }
    out
}

/// Triple loop over all 64 profiles: a profile is an equilibrium when no
/// player gains more than `delta` (plus 1e-9) by deviating alone.
pub fn brute_force_equilibria(t: &[[[[f64; 3]; 4]; 4]; 4], delta: f64) -> Vec<(usize, usize, usize)> {
    let tol = delta + 1e-9;
    let mut out = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let here = t[i][j][k];
                let a_ok = (0..4).all(|d| t[d][j][k][0] <= here[0] + tol);
                let b1_ok = (0..4).all(|d| t[i][d][k][1] <= here[1] + tol);
                let b2_ok = (0..4).all(|d| t[i][j][d][2] <= here[2] + tol);
                if a_ok && b1_ok && b2_ok {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}
