use std::sync::Arc;

use warpgeo::base_manifold::{BaseKind, BasePoint};
use warpgeo::curvature::{curvature_report, extrinsic_distance};
use warpgeo::geodesics::{energy, geodesic_closed_form, moments, rao_distance};
use warpgeo::models::{completeness_check, sample, warp_coefficients, LocationScaleModel, ModelRegistry, WarpedPoint, WarpedTangent};
use warpgeo::statistics::{frechet_mean, mc_fisher, natural_gradient_estimate, GainSchedule};
use warpgeo::{Error, Result};

use crate::args::{Command, SigmaSpec};
use crate::input::{parse_grid, parse_point, parse_tangent, parse_warped, read_base_points, read_weighted_points};
use crate::table::{Cell, Table};

fn sigmas(spec: &SigmaSpec) -> Result<Vec<f64>> {
    match (spec.sigma, &spec.grid) {
        (Some(s), _) => Ok(vec![s]),
        (None, Some(g)) => parse_grid(g),
        (None, None) => Err(Error::Domain("one of --sigma or --grid is required".into())),
    }
}

/// Coordinate column names for a base point.
fn coord_names(kind: BaseKind) -> &'static [&'static str] {
    match kind {
        BaseKind::RealLine => &["x"],
        BaseKind::Sphere2 => &["x", "y", "z"],
        BaseKind::Hyperbolic2 => &["u", "w"],
    }
}

fn coord_cells(p: &BasePoint) -> impl Iterator<Item = Cell> {
    p.coords().into_iter().map(Cell::Num)
}

fn point_columns(kind: BaseKind) -> Vec<String> {
    std::iter::once("sigma").chain(coord_names(kind).iter().copied()).map(String::from).collect()
}

fn point_cells(z: &WarpedPoint) -> Vec<Cell> {
    std::iter::once(Cell::Num(z.sigma)).chain(coord_cells(&z.location)).collect()
}

fn require(model: Option<Arc<dyn LocationScaleModel>>) -> Result<Arc<dyn LocationScaleModel>> {
    model.ok_or_else(|| Error::Domain("--model is required for this command".into()))
}

/// Powers of two up to `last`, plus `last`.
fn dyadic_steps(last: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2)).take_while(|&k| k < last).collect();
    steps.insert(0, 0);
    if last > 0 {
        steps.push(last);
    }
    steps
}

pub fn run(command: &Command, model: Option<Arc<dyn LocationScaleModel>>, seed: u64, registry: &ModelRegistry) -> Result<Table> {
    if let Command::Completeness = command {
        let models: Vec<_> = match model {
            Some(m) => vec![m],
            None => registry.iter().cloned().collect(),
        };
        let mut t = Table::new(["model", "at_zero", "at_infinity", "exponent_at_zero", "exponent_at_infinity", "complete"]);
        for m in models {
            let c = completeness_check(m.as_ref());
            t.push(vec![
                m.name().into(),
                c.at_zero.name().into(),
                c.at_infinity.name().into(),
                c.exponent_at_zero.into(),
                c.exponent_at_infinity.into(),
                c.is_complete().into(),
            ]);
        }
        return Ok(t);
    }

    let model = require(model)?;
    let m = model.as_ref();
    let base = m.base();
    let kind = base.kind();

    match command {
        Command::Coeffs(spec) => {
            let mut t = Table::new(["sigma", "i0", "i1", "di0_dsigma", "di1_dsigma", "d2i1_dsigma2"]);
            for s in sigmas(spec)? {
                let c = warp_coefficients(m, s)?;
                t.push(vec![
                    c.sigma.into(),
                    c.i0.into(),
                    c.i1.into(),
                    c.di0_dsigma.into(),
                    c.di1_dsigma.into(),
                    c.d2i1_dsigma2.into(),
                ]);
            }
            Ok(t)
        }

        Command::Curvature(spec) => {
            let has_tangential = m.dimension() > 1;
            let mut columns = vec!["sigma"];
            if has_tangential {
                columns.push("tangential");
            }
            columns.extend(["mixed", "shape"]);
            let mut t = Table::new(columns);
            for s in sigmas(spec)? {
                let r = curvature_report(m, s)?;
                let mut row = vec![r.sigma.into()];
                if let Some(k) = r.tangential {
                    row.push(k.into());
                }
                row.extend([r.mixed.into(), r.shape.into()]);
                t.push(row);
            }
            Ok(t)
        }

        Command::Geodesic {
            point,
            sigma,
            velocity,
            sigma_rate,
            t_max,
            steps,
        } => {
            if !(t_max.is_finite() && *t_max >= 0.0) || *steps == 0 {
                return Err(Error::Domain("--t-max must be >= 0 and --steps >= 1".into()));
            }
            let z0 = parse_warped(kind, point, *sigma)?;
            let v0 = WarpedTangent::new(parse_tangent(&base, &z0.location, velocity)?, *sigma_rate);
            let path = geodesic_closed_form(m, &z0, &v0)?;
            let (e0, j0) = (energy(m, &z0, &v0)?, moments(m, &z0, &v0)?);
            let mut columns = vec!["t".to_string()];
            columns.extend(point_columns(kind));
            columns.extend(["turns", "energy", "energy_drift", "moment_drift"].map(String::from));
            let mut t = Table::new(columns);
            for k in 0..=*steps {
                let time = t_max * k as f64 / *steps as f64;
                let state = path.at(time)?;
                let e = energy(m, &state.point, &state.velocity)?;
                let j = moments(m, &state.point, &state.velocity)?;
                let drift = j.iter().zip(&j0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let mut row = vec![Cell::Num(time)];
                row.extend(point_cells(&state.point));
                row.extend([state.turns.into(), e.into(), (e - e0).abs().into(), drift.into()]);
                t.push(row);
            }
            Ok(t)
        }

        Command::Distance { point, sigma, to, to_sigma } => {
            let a = parse_warped(kind, point, *sigma)?;
            let b = parse_warped(kind, to, *to_sigma)?;
            let mut t = Table::new(["distance"]);
            t.push(vec![rao_distance(m, &a, &b)?.into()]);
            Ok(t)
        }

        Command::ExtrinsicDistance { point, to, sigma } => {
            let (x, y) = (parse_point(kind, point)?, parse_point(kind, to)?);
            let mut t = Table::new(["sigma", "extrinsic_distance"]);
            t.push(vec![(*sigma).into(), extrinsic_distance(m, &x, &y, *sigma)?.into()]);
            Ok(t)
        }

        Command::Mean { input } => {
            let (points, weights) = read_weighted_points(kind, input)?;
            let mean = frechet_mean(m, &points, weights.as_deref())?;
            let mut columns = point_columns(kind);
            columns.push("n".into());
            let mut t = Table::new(columns);
            let mut row = point_cells(&mean);
            row.push(points.len().into());
            t.push(row);
            Ok(t)
        }

        Command::Estimate {
            input,
            truth,
            truth_sigma,
            point,
            sigma,
            n,
            gain,
            clip,
            every,
        } => {
            let init = parse_warped(kind, point, *sigma)?;
            let truth = match (truth, truth_sigma) {
                (Some(p), Some(s)) => Some(parse_warped(kind, p, *s)?),
                _ => None,
            };
            let stream = match (input, &truth) {
                (Some(path), _) => read_base_points(kind, path)?,
                (None, Some(z)) => sample(m, z, *n, seed)?,
                (None, None) => return Err(Error::Domain("estimate needs --input or --truth with --truth-sigma".into())),
            };
            let path = natural_gradient_estimate(m, &stream, GainSchedule { a: *gain, clip: *clip }, &init)?;
            let last = path.len() - 1;
            let steps = match every {
                Some(0) => return Err(Error::Domain("--every must be at least 1".into())),
                Some(k) => {
                    let mut s: Vec<usize> = (0..=last).step_by(*k).collect();
                    if s.last() != Some(&last) {
                        s.push(last);
                    }
                    s
                }
                None => dyadic_steps(last),
            };
            let mut columns = vec!["step".to_string(), "gain".to_string()];
            columns.extend(point_columns(kind));
            if truth.is_some() {
                columns.push("distance_to_truth".into());
            }
            let mut t = Table::new(columns);
            for k in steps {
                let s = &path[k];
                let mut row = vec![s.step.into(), s.gain.into()];
                row.extend(point_cells(&s.estimate));
                if let Some(z) = &truth {
                    row.push(rao_distance(m, &s.estimate, z)?.into());
                }
                t.push(row);
            }
            Ok(t)
        }

        Command::Sample { point, sigma, n } => {
            let z = parse_warped(kind, point, *sigma)?;
            let mut t = Table::new(coord_names(kind).iter().copied());
            for x in sample(m, &z, *n, seed)? {
                t.push(coord_cells(&x).collect());
            }
            Ok(t)
        }

        Command::ValidateFisher { sigma, point, n } => {
            let location = match point {
                Some(p) => parse_point(kind, p)?,
                None => base.origin(),
            };
            let mut t = Table::new([
                "sigma", "n", "i0_hat", "i0_stderr", "i0", "i0_ratio", "i1_hat", "i1_stderr", "i1", "i1_ratio",
            ]);
            for s in sigmas(sigma)? {
                let z = WarpedPoint::new(location, s)?;
                let est = mc_fisher(m, &z, *n, seed)?;
                let c = warp_coefficients(m, s)?;
                t.push(vec![
                    s.into(),
                    est.n.into(),
                    est.i0_hat.into(),
                    est.i0_stderr.into(),
                    c.i0.into(),
                    (est.i0_hat / c.i0).into(),
                    est.i1_hat.into(),
                    est.i1_stderr.into(),
                    c.i1.into(),
                    (est.i1_hat / c.i1).into(),
                ]);
            }
            Ok(t)
        }

        Command::Completeness => unreachable!("handled above"),
    }
}
