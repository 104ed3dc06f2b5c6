//! Cartesian parameter grids for `wfai sweep`.

use crate::CliError;

/// Upper bound on the number of grid points in one sweep.
pub const MAX_POINTS: u64 = 1_000_000;

/// One sweep axis: a flag name and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Parses `NAME=v1,v2,...` or `NAME=start:stop:step` (stop inclusive).
pub fn parse_axis(spec: &str) -> Result<Axis, CliError> {
    let bad = |why: &str| CliError::Validation(format!("bad axis `{spec}`: {why}"));
    let (name, body) = spec.split_once('=').ok_or_else(|| bad("expected NAME=VALUES"))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")));
    let values = if body.contains(':') {
        let parts: Vec<&str> = body.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(bad("range must be start:stop:step"));
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(step > 0.0) || stop < start {
            return Err(bad("range needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
        if count > MAX_POINTS {
            return Err(bad("too many points"));
        }
        (0..count).map(|k| start + k as f64 * step).collect()
    } else {
        body.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(Axis {
        name: name.trim().to_owned(),
        values,
    })
}

/// Grid points in row-major order over the axes as declared (the last axis
/// varies fastest).
pub fn grid(axes: &[Axis]) -> Result<Vec<Vec<f64>>, CliError> {
    if axes.is_empty() {
        return Err(CliError::Validation("sweep needs at least one --axis".into()));
    }
    let total = axes
        .iter()
        .try_fold(1u64, |acc, a| acc.checked_mul(a.values.len() as u64))
        .filter(|&t| t <= MAX_POINTS)
        .ok_or_else(|| CliError::Validation(format!("sweep grid exceeds {MAX_POINTS} points")))?;
    let mut points = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        points.push(idx.iter().zip(axes).map(|(&k, a)| a.values[k]).collect());
        for d in (0..axes.len()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].values.len() {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(points)
}
