use super::grid::{seminorm_grid_with, GridOptions};
use crate::error::Result;
use crate::fields::Field;
use crate::geom::Region;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationRow {
    pub a: f64,
    pub b: f64,
    pub s: f64,
    /// osc(u, (a,b))².
    pub osc2: f64,
    /// (b-a)^s (1-s) [u]²_{H^{(1+s)/2}((a,b))}.
    pub scaled_seminorm: f64,
    /// osc² over the scaled seminorm, 0 when the oscillation vanishes.
    pub ratio: f64,
}

fn oscillation(field: &dyn Field, a: f64, b: f64, samples: usize) -> f64 {
    let vals: Vec<_> = (0..samples)
        .filter_map(|k| field.eval(&[a + (b - a) * (k as f64 + 0.5) / samples as f64]))
        .collect();
    let mut best: f64 = 0.0;
    for (i, u) in vals.iter().enumerate() {
        for v in &vals[i + 1..] {
            best = best.max((u - v).norm());
        }
    }
    best
}

/// Oscillation against the rescaled seminorm on each interval of a 1D field.
pub fn oscillation_diagnostic(field: &dyn Field, intervals: &[(f64, f64)], s: f64) -> Result<Vec<OscillationRow>> {
    let alpha = 0.5 * (1.0 + s);
    let opts = GridOptions { richardson: false, ..GridOptions::default() };
    intervals
        .iter()
        .map(|&(a, b)| {
            let osc = oscillation(field, a, b, 512);
            let semi = seminorm_grid_with(field, &Region::Box { lo: vec![a], hi: vec![b] }, alpha, (b - a) / 256.0, &opts)?
                .estimate
                .value;
            let scaled = (b - a).powf(s) * (1.0 - s) * semi;
            let osc2 = osc * osc;
            Ok(OscillationRow {
                a,
                b,
                s,
                osc2,
                scaled_seminorm: scaled,
                ratio: if osc2 == 0.0 { 0.0 } else { osc2 / scaled },
            })
        })
        .collect()
}
