use std::fs;
use std::path::Path;

use warpgeo::base_manifold::{BaseKind, BaseManifold, BasePoint, BaseTangent};
use warpgeo::models::WarpedPoint;
use warpgeo::{Error, Result};

use crate::report;

/// Sphere inputs further than this from unit norm are reported when normalised.
const SPHERE_WARN_TOL: f64 = 1e-6;

pub fn parse_numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Domain(format!("'{t}' is not a finite number")))
        })
        .collect()
}

/// Parses `min:max:count:log|lin` into grid values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Domain(format!("grid '{spec}' is not min:max:count:log|lin"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [min, max, count, scale] = parts.as_slice() else {
        return Err(bad());
    };
    let (min, max) = (min.parse::<f64>().map_err(|_| bad())?, max.parse::<f64>().map_err(|_| bad())?);
    let count: usize = count.parse().map_err(|_| bad())?;
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::Domain(format!("grid bounds must satisfy 0 < min <= max, got {min}:{max}")));
    }
    if count == 0 {
        return Err(Error::Domain("grid count must be at least 1".into()));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let frac = |k: usize| k as f64 / (count - 1) as f64;
    match *scale {
        "log" => Ok((0..count).map(|k| (min.ln() + (max.ln() - min.ln()) * frac(k)).exp()).collect()),
        "lin" => Ok((0..count).map(|k| min + (max - min) * frac(k)).collect()),
        _ => Err(bad()),
    }
}

/// Base point from chart coordinates; sphere inputs are normalised.
pub fn point_from_coords(kind: BaseKind, c: &[f64]) -> Result<BasePoint> {
    if kind == BaseKind::Sphere2 && c.len() == 3 {
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > SPHERE_WARN_TOL {
            report::warning(&format!("sphere point {c:?} has norm {norm}; normalised"));
        }
        return BasePoint::sphere_normalized([c[0], c[1], c[2]].into());
    }
    BasePoint::from_coords(kind, c)
}

pub fn parse_point(kind: BaseKind, s: &str) -> Result<BasePoint> {
    point_from_coords(kind, &parse_numbers(s)?)
}

pub fn parse_warped(kind: BaseKind, s: &str, sigma: f64) -> Result<WarpedPoint> {
    WarpedPoint::new(parse_point(kind, s)?, sigma)
}

/// Tangent at `x` from chart components; sphere inputs are projected.
pub fn parse_tangent(base: &BaseManifold, x: &BasePoint, s: &str) -> Result<BaseTangent> {
    let v = BaseTangent::from_components(base.kind(), &parse_numbers(s)?)?;
    let projected = base.project_tangent(x, &v);
    let off = v.components().iter().zip(projected.components()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if off > SPHERE_WARN_TOL {
        report::warning(&format!("velocity had a normal component of size {off}; projected"));
    }
    Ok(projected)
}

/// Numeric rows of a text file, skipping blank lines and `#` comments.
fn numeric_rows(path: &Path) -> Result<Vec<(usize, Vec<f64>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            parse_numbers(l)
                .map(|v| (i + 1, v))
                .map_err(|e| Error::Domain(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

/// Warped points with optional weights: base coordinates, σ, then an optional weight.
pub fn read_weighted_points(kind: BaseKind, path: &Path) -> Result<(Vec<WarpedPoint>, Option<Vec<f64>>)> {
    let d = kind.coordinate_count();
    let rows = numeric_rows(path)?;
    if rows.is_empty() {
        return Err(Error::Domain(format!("{} holds no points", path.display())));
    }
    let weighted = rows[0].1.len() == d + 2;
    let mut points = Vec::with_capacity(rows.len());
    let mut weights = Vec::new();
    for (line, row) in rows {
        if row.len() != d + 1 + weighted as usize {
            return Err(Error::Domain(format!(
                "{}:{line}: expected {} values, got {}",
                path.display(),
                d + 1 + weighted as usize,
                row.len()
            )));
        }
        points.push(WarpedPoint::new(point_from_coords(kind, &row[..d])?, row[d])?);
        if weighted {
            weights.push(row[d + 1]);
        }
    }
    Ok((points, weighted.then_some(weights)))
}

pub fn read_base_points(kind: BaseKind, path: &Path) -> Result<Vec<BasePoint>> {
    numeric_rows(path)?
        .into_iter()
        .map(|(_, row)| point_from_coords(kind, &row))
        .collect()
}
