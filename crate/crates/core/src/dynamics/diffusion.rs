use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::laplacian::SupraLaplacian;
use crate::error::{Error, Result};

/// Sampled states of `dx/dt = -L x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Wide form: `t,bank@layer,...`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("t,{}\n", self.labels.join(","));
        for (t, x) in self.times.iter().zip(&self.states) {
            let cells: Vec<String> = x.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{t},{}", cells.join(","));
        }
        out
    }
}

/// Fixed-step classical RK4 from `t = 0` to `t_end`. The state is recorded
/// at `t = 0`, after every `sample_every` steps and at `t_end`; the final
/// step is shortened to land exactly on `t_end`.
pub fn diffuse(lap: &SupraLaplacian, x0: &[f64], t_end: f64, dt: f64, sample_every: usize) -> Result<Trajectory> {
    let dim = lap.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch(format!("initial state of length {} for dimension {dim}", x0.len())));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0) || sample_every == 0 {
        return Err(Error::InvalidParameter(format!("dt must be positive and sample_every >= 1, got {dt}, {sample_every}")));
    }
    let max_diag = lap.max_diagonal();
    if max_diag > 0.0 {
        let bound = 0.5 / max_diag;
        if dt > bound {
            return Err(Error::UnstableStep { dt, bound });
        }
    }
    let m = lap.matrix();
    let deriv = |x: &[f64], out: &mut [f64]| {
        m.mul_vec_into(x, out);
        out.iter_mut().for_each(|v| *v = -*v);
    };
    let steps = (t_end / dt).ceil() as usize;
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    for step in 1..=steps {
        let t0 = (step - 1) as f64 * dt;
        let h = if step == steps { t_end - t0 } else { dt };
        deriv(&x, &mut k1);
        axpy_into(&x, 0.5 * h, &k1, &mut tmp);
        deriv(&tmp, &mut k2);
        axpy_into(&x, 0.5 * h, &k2, &mut tmp);
        deriv(&tmp, &mut k3);
        axpy_into(&x, h, &k3, &mut tmp);
        deriv(&tmp, &mut k4);
        for i in 0..dim {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % sample_every == 0 || step == steps {
            times.push(if step == steps { t_end } else { step as f64 * dt });
            states.push(x.clone());
        }
    }
    Ok(Trajectory { labels: lap.labels().to_vec(), times, states })
}

fn axpy_into(x: &[f64], a: f64, y: &[f64], out: &mut [f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}
