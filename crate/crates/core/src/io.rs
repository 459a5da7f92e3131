//! CSV and binary persistence for loops and lattice phases.

use crate::discrete::Lattice;
use crate::error::{Error, Result};
use crate::fields::LatticeField;
use crate::linkdeg::LoopSample;
use num_complex::Complex64;
use std::io::{Read, Write};

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Columns x,y[,z][,u1,u2].
pub fn write_loop_csv<W: Write>(out: W, lp: &LoopSample) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let axes = ["x", "y", "z"];
    let mut header: Vec<String> = (0..lp.dim).map(|k| axes.get(k).map(|s| s.to_string()).unwrap_or(format!("x{k}"))).collect();
    if lp.values.is_some() {
        header.extend(["u1".to_string(), "u2".to_string()]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..lp.len() {
        let mut rec: Vec<String> = lp.point(i).iter().map(|v| format!("{v:.17e}")).collect();
        if let Some(vals) = &lp.values {
            rec.push(format!("{:.17e}", vals[i].re));
            rec.push(format!("{:.17e}", vals[i].im));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_loop_csv<R: Read>(input: R) -> Result<LoopSample> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let has_values = header.iter().any(|h| h == "u1");
    let dim = header.len() - if has_values { 2 } else { 0 };
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}"))))
            .collect::<Result<_>>()?;
        if nums.len() != header.len() {
            return Err(Error::Parse("ragged loop row".into()));
        }
        coords.extend_from_slice(&nums[..dim]);
        if has_values {
            values.push(Complex64::new(nums[dim], nums[dim + 1]));
        }
    }
    let lp = LoopSample::from_flat(dim, coords);
    Ok(if has_values { lp.with_values(values) } else { lp })
}

/// Columns index, x0..x{n-1}, phase.
pub fn write_lattice_csv<W: Write>(out: W, lattice: &Lattice, field: &LatticeField) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string()];
    header.extend((0..lattice.n()).map(|k| format!("x{k}")));
    header.push("phase".into());
    w.write_record(&header).map_err(csv_err)?;
    for (i, x) in lattice.sites().iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(x.iter().map(|v| format!("{v:.17e}")));
        rec.push(format!("{:.17e}", field.phases[i]));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_lattice_csv<R: Read>(input: R) -> Result<LatticeField> {
    let mut r = csv::Reader::from_reader(input);
    let mut phases = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let idx: usize = rec.get(0).unwrap_or("").parse().map_err(|_| Error::Parse("bad site index".into()))?;
        if idx != k {
            return Err(Error::Parse(format!("site index {idx} out of order")));
        }
        let last = rec.get(rec.len() - 1).unwrap_or("");
        phases.push(last.parse::<f64>().map_err(|e| Error::Parse(format!("{last}: {e}")))?);
    }
    Ok(LatticeField { phases })
}

const MAGIC: &[u8; 4] = b"FMLF";

/// Little-endian: "FMLF", u32 n, f64 ε, u64 count, then count f64 phases.
pub fn write_binary<W: Write>(mut out: W, n: usize, eps: f64, field: &LatticeField) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(n as u32).to_le_bytes())?;
    out.write_all(&eps.to_le_bytes())?;
    out.write_all(&(field.phases.len() as u64).to_le_bytes())?;
    for p in &field.phases {
        out.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<(usize, f64, LatticeField)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a lattice field dump".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b8)?;
    let eps = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    let mut phases = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut b8)?;
        phases.push(f64::from_le_bytes(b8));
    }
    Ok((n, eps, LatticeField { phases }))
}
