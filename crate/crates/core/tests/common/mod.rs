//! Independent second discretization: sinc (Colbert–Miller) DVR on a
//! uniform grid with a dense symmetric eigensolver.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;

pub struct DvrSolution {
    pub energies: Vec<f64>,
    pub theta: Vec<f64>,
    /// Columns are eigenvectors scaled so that `Σ ψ² h = 1`.
    pub states: Vec<Vec<f64>>,
    pub h: f64,
}

pub fn sinc_dvr(
    e_c: f64,
    e_j: f64,
    e_l: f64,
    phi: f64,
    half_width: f64,
    h: f64,
    levels: usize,
) -> DvrSolution {
    let k = (half_width / h).ceil() as i64;
    let theta: Vec<f64> = (-k..=k).map(|i| i as f64 * h).collect();
    let n = theta.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let kinetic = if i == j {
                PI * PI / 3.0
            } else {
                let d = i as f64 - j as f64;
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * sign / (d * d)
            };
            m[(i, j)] = 4.0 * e_c * kinetic / (h * h);
        }
        let t = theta[i];
        m[(i, i)] += e_j * (1.0 - (t - phi).cos()) + 0.5 * e_l * t * t;
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let scale = 1.0 / h.sqrt();
    DvrSolution {
        energies: order[..levels]
            .iter()
            .map(|&c| eig.eigenvalues[c])
            .collect(),
        states: order[..levels]
            .iter()
            .map(|&c| {
                eig.eigenvectors
                    .column(c)
                    .iter()
                    .map(|v| v * scale)
                    .collect()
            })
            .collect(),
        theta,
        h,
    }
}
