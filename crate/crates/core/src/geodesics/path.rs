//! Geodesics from the conservation laws.
//!
//! With energy E = I₀σ̇² + I₁‖ẋ‖² and base moment m = I₁(σ₀)‖ẋ₀‖, the vertical
//! motion is a particle in the potential V(σ) = m²/I₁(σ): σ̇² = (E − V)/I₀.
//! The base point runs along the fixed base geodesic through x̄₀ with speed
//! m/I₁(σ). The path is walked in chunks of σ; each chunk contributes an
//! increment of time t and of base arc length ℓ computed by quadrature. Chunks
//! that end at a turning point use a quadratic map in the chunk variable that
//! cancels the inverse-square-root singularity of 1/√(E − V).

use std::sync::OnceLock;

use crate::base_manifold::{BaseManifold, BaseTangent};
use crate::error::{Error, Result};
use crate::models::{check_point, completeness_check, BoundaryClass, LocationScaleModel, WarpedPoint, WarpedTangent};
use crate::numerics::quad::{integrate, integrate_vec, QuadConfig};
use crate::numerics::roots::brent;

/// ln(σ_end/σ_start) of a regular chunk.
const STEP: f64 = 1.0;
/// Turning points closer than this many steps are reached in one chunk.
const TURN_REACH: f64 = 2.0 * STEP;
const SIGMA_MIN: f64 = 1e-300;
const SIGMA_MAX: f64 = 1e300;
/// Relative distance to a turning point below which E − V is taken from its
/// quadratic Taylor model instead of the cancelling difference.
const TAYLOR_BAND: f64 = 1e-6;
const MAX_CHUNKS: usize = 100_000;
/// Consecutive negligible arc increments after which an arc target is unreachable.
const STALL_CHUNKS: usize = 3;
/// Integrands carry up to ~1e-11 relative noise just outside the Taylor band,
/// so the targets sit above the defaults.
const PATH_QUAD: QuadConfig = QuadConfig {
    abs_tol: 1e-13,
    rel_tol: 1e-11,
    max_intervals: 4000,
};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Turning {
    sigma: f64,
    /// V′(σ*) and V″(σ*).
    dv: f64,
    d2v: f64,
}

impl Turning {
    fn taylor_gap(&self, d: f64) -> f64 {
        -self.dv * d - 0.5 * self.d2v * d * d
    }
}

#[derive(Debug, Clone, Copy)]
enum Chunk {
    /// σ = a (b/a)^v.
    Regular { a: f64, b: f64 },
    /// σ = σ* + span·(1 − v)², ending at the turning point σ*. The span is
    /// kept apart from σ* so that offsets below the spacing of σ* survive.
    Approach { star: f64, span: f64 },
    /// σ = σ* + span·v², leaving the turning point σ*.
    Departure { star: f64, span: f64 },
    /// σ = c − h cos(πv) between two turning points a and b.
    Bridge { a: f64, b: f64 },
}

impl Chunk {
    fn sigma(&self, v: f64) -> f64 {
        match *self {
            Chunk::Regular { a, b } => a * (b / a).powf(v),
            Chunk::Approach { star, span } => star + span * (1.0 - v) * (1.0 - v),
            Chunk::Departure { star, span } => star + span * v * v,
            Chunk::Bridge { a, b } => 0.5 * (a + b) - 0.5 * (b - a) * (std::f64::consts::PI * v).cos(),
        }
    }

    fn dsigma(&self, v: f64) -> f64 {
        match *self {
            Chunk::Regular { a, b } => self.sigma(v) * (b / a).ln(),
            Chunk::Approach { span, .. } => -2.0 * span * (1.0 - v),
            Chunk::Departure { span, .. } => 2.0 * span * v,
            Chunk::Bridge { a, b } => 0.5 * (b - a) * std::f64::consts::PI * (std::f64::consts::PI * v).sin(),
        }
    }

    fn start(&self) -> f64 {
        match *self {
            Chunk::Regular { a, .. } | Chunk::Bridge { a, .. } => a,
            Chunk::Approach { star, span } => star + span,
            Chunk::Departure { star, .. } => star,
        }
    }

    fn end(&self) -> f64 {
        match *self {
            Chunk::Regular { b, .. } | Chunk::Bridge { b, .. } => b,
            Chunk::Departure { star, span } => star + span,
            Chunk::Approach { star, .. } => star,
        }
    }

    /// The nearest turning point of the chunk and σ − σ* at v, computed from
    /// the parameterisation so that it does not round to zero near σ*.
    fn turning_offset(&self, v: f64) -> Option<(f64, f64)> {
        use std::f64::consts::FRAC_PI_2;
        match *self {
            Chunk::Regular { .. } => None,
            Chunk::Approach { star, span } => Some((star, span * (1.0 - v) * (1.0 - v))),
            Chunk::Departure { star, span } => Some((star, span * v * v)),
            Chunk::Bridge { a, b } if v < 0.5 => Some((a, (b - a) * (FRAC_PI_2 * v).sin().powi(2))),
            Chunk::Bridge { a, b } => Some((b, -(b - a) * (FRAC_PI_2 * v).cos().powi(2))),
        }
    }

    fn direction(&self) -> f64 {
        (self.end() - self.start()).signum()
    }

    fn ends_at_turning(&self) -> bool {
        matches!(self, Chunk::Approach { .. } | Chunk::Bridge { .. })
    }
}

/// Point and velocity of a geodesic at affine time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub point: WarpedPoint,
    pub velocity: WarpedTangent,
    /// Turning points of V passed on the way from t = 0.
    pub turns: usize,
}

#[derive(Debug, Clone, Copy)]
struct Cursor {
    sigma: f64,
    dir: f64,
    at_turning: bool,
    t: f64,
    ell: f64,
    turns: usize,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Time(f64),
    Arc(f64),
}

/// Where a walk along the path ended.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Walk {
    Reached { sigma: f64, dir: f64, t: f64, ell: f64, turns: usize },
    /// The base arc length never reaches the target; `dir` is the final
    /// vertical direction (+1 up, −1 down).
    Unreached { dir: f64 },
}

/// An affinely parameterised geodesic of the warped manifold.
#[derive(Debug, Clone)]
pub struct GeodesicPath<'a> {
    model: &'a dyn LocationScaleModel,
    base: BaseManifold,
    z0: WarpedPoint,
    v0: WarpedTangent,
    energy: f64,
    moment: f64,
    /// Unit base direction ẋ₀/‖ẋ₀‖, absent for vertical paths.
    heading: Option<BaseTangent>,
    dir0: f64,
    /// Where walks begin. A start just past a turning point begins at the
    /// turning point with negative time and arc length.
    start: Cursor,
    /// First chunk of a start just short of a turning point.
    prelude: Option<Chunk>,
    lower: Option<Turning>,
    upper: Option<Turning>,
    /// Whether the σ = 0 boundary is at finite distance; decided on first use.
    boundary_reachable: OnceLock<bool>,
}

impl<'a> GeodesicPath<'a> {
    pub fn new(model: &'a dyn LocationScaleModel, z0: WarpedPoint, v0: WarpedTangent) -> Result<Self> {
        check_point(model, &z0)?;
        let base = model.base();
        base.check_tangent(&z0.location, &v0.base)?;
        if !v0.sigma_rate.is_finite() || !v0.base.max_abs().is_finite() {
            return Err(Error::domain("non-finite initial velocity"));
        }
        let c = model.coefficients(z0.sigma)?;
        let speed = base.norm(&z0.location, &v0.base)?;
        let moment = c.i1 * speed;
        let energy = c.i0 * v0.sigma_rate * v0.sigma_rate + c.i1 * speed * speed;
        // Dividing by a small speed would magnify any normal component of v0.
        let heading = (speed > 0.0).then(|| base.project_tangent(&z0.location, &(v0.base * (1.0 / speed))));

        let mut path = Self {
            model,
            base,
            z0,
            v0,
            energy,
            moment,
            heading,
            dir0: v0.sigma_rate.signum(),
            start: Cursor {
                sigma: z0.sigma,
                dir: v0.sigma_rate.signum(),
                at_turning: false,
                t: 0.0,
                ell: 0.0,
                turns: 0,
            },
            prelude: None,
            lower: None,
            upper: None,
            boundary_reachable: OnceLock::new(),
        };
        if energy == 0.0 || moment == 0.0 {
            return Ok(path);
        }
        let Some(delta) = path.nearby_turning(c.i0 * v0.sigma_rate * v0.sigma_rate)? else {
            if v0.sigma_rate == 0.0 {
                // Horizontal equilibrium of V.
                path.dir0 = 0.0;
                path.start.dir = 0.0;
                return Ok(path);
            }
            path.lower = path.find_turning(z0.sigma, -1.0)?;
            path.upper = path.find_turning(z0.sigma, 1.0)?;
            return Ok(path);
        };
        let star = z0.sigma + delta;
        let here = path.turning_at(star)?;
        // The side of σ* where V is lower.
        let away = -here.dv.signum();
        let beyond = path.find_turning(star * (1.0 + away * TAYLOR_BAND), away)?;
        if away > 0.0 {
            (path.lower, path.upper) = (Some(here), beyond);
        } else {
            (path.lower, path.upper) = (beyond, Some(here));
        }
        if delta == 0.0 {
            path.dir0 = away;
            path.start.dir = away;
            path.start.at_turning = true;
        } else if path.dir0 != away {
            path.prelude = Some(Chunk::Approach { star, span: -delta });
        } else {
            let [t, ell] = path.increments(&Chunk::Departure { star, span: -delta }, 0.0, 1.0)?;
            path.start = Cursor {
                sigma: star,
                dir: away,
                at_turning: true,
                t: -t,
                ell: -ell,
                turns: 0,
            };
        }
        Ok(path)
    }

    pub fn model(&self) -> &'a dyn LocationScaleModel {
        self.model
    }

    pub fn start(&self) -> WarpedPoint {
        self.z0
    }

    pub fn initial_velocity(&self) -> WarpedTangent {
        self.v0
    }

    /// E = I₀σ̇² + I₁‖ẋ‖², constant along the path.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// J₀ = I₁(σ₀)‖ẋ₀‖².
    pub fn base_moment(&self) -> f64 {
        match self.heading {
            Some(_) => self.moment * self.moment / self.model.coefficients(self.z0.sigma).map(|c| c.i1).unwrap_or(f64::NAN),
            None => 0.0,
        }
    }

    /// V(σ) = J₀ I₁(σ₀)/I₁(σ).
    pub fn potential(&self, sigma: f64) -> Result<f64> {
        Ok(self.moment * self.moment / self.model.coefficients(sigma)?.i1)
    }

    /// σ values where E = V(σ), in increasing order.
    pub fn turning_points(&self) -> Vec<f64> {
        self.lower.iter().chain(self.upper.iter()).map(|tp| tp.sigma).collect()
    }

    /// The same geodesic traversed backwards.
    pub fn reversed(&self) -> Result<GeodesicPath<'a>> {
        GeodesicPath::new(self.model, self.z0, -self.v0)
    }

    /// State at affine time `t` (negative times walk the reversed path).
    pub fn at(&self, t: f64) -> Result<GeodesicState> {
        if !t.is_finite() {
            return Err(Error::domain(format!("non-finite time {t}")));
        }
        if t < 0.0 {
            let back = self.reversed()?.at(-t).map_err(|e| match e {
                Error::BoundaryEscape { escape_time } => Error::BoundaryEscape { escape_time: -escape_time },
                Error::BoundaryProximity { t, sigma } => Error::BoundaryProximity { t: -t, sigma },
                other => other,
            })?;
            return Ok(GeodesicState {
                t,
                point: back.point,
                velocity: -back.velocity,
                turns: back.turns,
            });
        }
        if self.energy == 0.0 || t == 0.0 {
            return Ok(GeodesicState {
                t,
                point: self.z0,
                velocity: self.v0,
                turns: 0,
            });
        }
        match self.walk(Target::Time(t))? {
            Walk::Reached { sigma, dir, ell, turns, .. } => self.state(t, sigma, dir, ell, turns),
            Walk::Unreached { .. } => unreachable!("time targets are always reached or fail"),
        }
    }

    /// Walks until the base arc length reaches `ell`.
    pub(crate) fn walk_arc(&self, ell: f64) -> Result<Walk> {
        if self.heading.is_none() {
            return Ok(Walk::Unreached { dir: self.dir0 });
        }
        self.walk(Target::Arc(ell))
    }

    fn state(&self, t: f64, sigma: f64, dir: f64, ell: f64, turns: usize) -> Result<GeodesicState> {
        let c = self.model.coefficients(sigma)?;
        let sigma_rate = dir * (self.gap(sigma)?.max(0.0) / c.i0).sqrt();
        let (location, base_velocity) = match self.heading {
            Some(h) => {
                let (x, u) = self.base.geodesic(&self.z0.location, &h, ell)?;
                (x, u * (self.moment / c.i1))
            }
            None => (self.z0.location, BaseTangent::zero(self.base.kind())),
        };
        Ok(GeodesicState {
            t,
            point: WarpedPoint { location, sigma },
            velocity: WarpedTangent::new(base_velocity, sigma_rate),
            turns,
        })
    }

    fn raw_gap(&self, sigma: f64) -> Result<f64> {
        Ok(self.energy - self.potential(sigma)?)
    }

    /// E − V(σ), from the Taylor model of V inside the band around a turning point.
    fn gap(&self, sigma: f64) -> Result<f64> {
        for tp in self.lower.iter().chain(self.upper.iter()) {
            let d = sigma - tp.sigma;
            if d.abs() < TAYLOR_BAND * tp.sigma {
                return Ok(tp.taylor_gap(d));
            }
        }
        self.raw_gap(sigma)
    }

    /// E − V at σ* + d for the turning point σ*.
    fn gap_near(&self, star: f64, d: f64) -> Result<f64> {
        match self.lower.iter().chain(self.upper.iter()).find(|tp| tp.sigma == star) {
            Some(tp) if d.abs() < TAYLOR_BAND * star => Ok(tp.taylor_gap(d)),
            _ => self.raw_gap(star + d),
        }
    }

    fn turning_at(&self, sigma: f64) -> Result<Turning> {
        let c = self.model.coefficients(sigma)?;
        let m2 = self.moment * self.moment;
        let r = c.di1_dsigma / c.i1;
        Ok(Turning {
            sigma,
            dv: -m2 * r / c.i1,
            d2v: m2 * (2.0 * r * r - c.d2i1_dsigma2 / c.i1) / c.i1,
        })
    }

    /// A turning point within the Taylor band of σ₀, located from the exact
    /// kinetic gap g₀ = I₀σ̇₀² and the quadratic model of V at σ₀, since E − V
    /// cancels there.
    /// Returns the offset δ = σ* − σ₀.
    fn nearby_turning(&self, g0: f64) -> Result<Option<f64>> {
        let s0 = self.z0.sigma;
        let at = self.turning_at(s0)?;
        let disc = at.dv * at.dv + 2.0 * at.d2v * g0;
        if at.dv == 0.0 || disc < 0.0 {
            return Ok(None);
        }
        // Small root of g₀ − V′δ − ½V″δ² = 0.
        let delta = 2.0 * g0 / (at.dv + at.dv.signum() * disc.sqrt());
        Ok((delta.abs() < TAYLOR_BAND * s0).then_some(delta))
    }

    /// First σ beyond `from` in direction `dir` with E = V(σ).
    fn find_turning(&self, from: f64, dir: f64) -> Result<Option<Turning>> {
        let mut a = from;
        loop {
            let mut b = a * (dir * STEP).exp();
            if !(SIGMA_MIN..=SIGMA_MAX).contains(&b) {
                return Ok(None);
            }
            let mut gb = self.model.coefficients(b).map(|c| self.energy - self.moment * self.moment / c.i1);
            // V overflows to +∞ where I₁ underflows; pull b back until finite.
            while matches!(gb, Ok(g) if g == f64::NEG_INFINITY) {
                b = (a * b).sqrt();
                gb = self.raw_gap(b);
            }
            match gb {
                Ok(g) if g.is_nan() => return Ok(None),
                Ok(g) if g <= 0.0 => {
                    let star = brent(|s| self.raw_gap(s).unwrap_or(f64::NAN), a, b, 1e-15 * a.max(b), 200)?;
                    return self.turning_at(star).map(Some);
                }
                Ok(_) => a = b,
                Err(_) => return Ok(None),
            }
        }
    }

    fn next_chunk(&self, cur: &Cursor) -> Chunk {
        let ahead = if cur.dir > 0.0 { self.upper } else { self.lower };
        let near = ahead.filter(|tp| (tp.sigma / cur.sigma).ln().abs() <= TURN_REACH);
        match (cur.at_turning, near) {
            (true, Some(tp)) => Chunk::Bridge { a: cur.sigma, b: tp.sigma },
            (true, None) => Chunk::Departure {
                star: cur.sigma,
                span: cur.sigma * (cur.dir * STEP).exp() - cur.sigma,
            },
            (false, Some(tp)) => Chunk::Approach {
                star: tp.sigma,
                span: cur.sigma - tp.sigma,
            },
            (false, None) => Chunk::Regular {
                a: cur.sigma,
                b: cur.sigma * (cur.dir * STEP).exp(),
            },
        }
    }

    /// (dt/dv, dℓ/dv) along a chunk.
    fn rates(&self, chunk: &Chunk, v: f64) -> [f64; 2] {
        let sigma = chunk.sigma(v);
        let ds = chunk.dsigma(v).abs();
        if ds == 0.0 {
            return [0.0, 0.0];
        }
        let gap = match chunk.turning_offset(v) {
            Some((star, d)) => self.gap_near(star, d),
            None => self.gap(sigma),
        };
        let (c, g) = match (self.model.coefficients(sigma), gap) {
            (Ok(c), Ok(g)) => (c, g),
            _ => return [f64::NAN; 2],
        };
        let dt = c.i0.sqrt() * ds / g.sqrt();
        [dt, dt * self.moment / c.i1]
    }

    fn increments(&self, chunk: &Chunk, from: f64, to: f64) -> Result<[f64; 2]> {
        Ok(integrate_vec(|v| self.rates(chunk, v), from, to, PATH_QUAD)?.value)
    }

    /// Time from σ down to the boundary σ = 0 when no turning point intervenes.
    fn time_to_boundary(&self, sigma: f64) -> Result<f64> {
        integrate(
            |s| match (self.model.coefficients(s), self.gap(s)) {
                (Ok(c), Ok(g)) => (c.i0 / g).sqrt(),
                _ => f64::NAN,
            },
            0.0,
            sigma,
            PATH_QUAD,
        )
    }

    /// The chunk parameter v at which component `k` of the accumulated
    /// increment equals `want`, with the increments at that v.
    fn invert(&self, chunk: &Chunk, k: usize, want: f64, total: [f64; 2]) -> Result<(f64, [f64; 2])> {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut v = (want / total[k]).clamp(0.0, 1.0);
        let mut acc = self.increments(chunk, 0.0, v)?;
        let tol = 1e-15 * total[k].max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let res = acc[k] - want;
            if res.abs() <= tol || hi - lo <= 1e-16 {
                return Ok((v, acc));
            }
            if res > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let d = self.rates(chunk, v)[k];
            let mut next = v - res / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = self.increments(chunk, v, next)?;
            acc = [acc[0] + step[0], acc[1] + step[1]];
            v = next;
        }
        Err(Error::no_convergence("geodesic chunk inversion", acc[k] - want))
    }

    fn walk(&self, target: Target) -> Result<Walk> {
        let mut cur = self.start;
        let (k, goal) = match target {
            Target::Time(t) => (0, t),
            Target::Arc(l) => (1, l),
        };
        if goal == 0.0 {
            return Ok(Walk::Reached {
                sigma: self.z0.sigma,
                dir: if cur.at_turning && cur.t == 0.0 { 0.0 } else { self.dir0 },
                t: 0.0,
                ell: 0.0,
                turns: 0,
            });
        }
        if cur.dir == 0.0 {
            // Horizontal equilibrium: σ stays put, ℓ grows linearly.
            let rate = self.moment / self.model.coefficients(cur.sigma)?.i1;
            let (t, ell) = match target {
                Target::Time(t) => (t, rate * t),
                Target::Arc(l) => (l / rate, l),
            };
            return Ok(Walk::Reached { sigma: cur.sigma, dir: 0.0, t, ell, turns: 0 });
        }
        let mut prelude = self.prelude;
        let mut escape_checked = false;
        let mut stalled = 0;
        for _ in 0..MAX_CHUNKS {
            if cur.dir < 0.0 && self.lower.is_none() && !escape_checked && self.boundary_reachable() {
                let rest = self.time_to_boundary(cur.sigma)?;
                match target {
                    Target::Time(t) if t > cur.t + rest => {
                        return Err(Error::BoundaryEscape { escape_time: cur.t + rest });
                    }
                    Target::Arc(_) if self.moment == 0.0 => return Ok(Walk::Unreached { dir: -1.0 }),
                    _ => {}
                }
                escape_checked = true;
            }
            let chunk = prelude.take().unwrap_or_else(|| self.next_chunk(&cur));
            if !(SIGMA_MIN..=SIGMA_MAX).contains(&chunk.end()) {
                return match target {
                    Target::Time(_) => Err(Error::BoundaryProximity { t: cur.t, sigma: cur.sigma }),
                    Target::Arc(_) => Ok(Walk::Unreached { dir: cur.dir }),
                };
            }
            let inc = self.increments(&chunk, 0.0, 1.0)?;
            if !(inc[0].is_finite() && inc[1].is_finite()) {
                return Err(Error::NonFinite("geodesic chunk increment".into()));
            }
            let want = goal - [cur.t, cur.ell][k];
            if inc[k] >= want {
                let (v, part) = self.invert(&chunk, k, want, inc)?;
                let at_end = v >= 1.0 && chunk.ends_at_turning();
                return Ok(Walk::Reached {
                    sigma: chunk.sigma(v),
                    dir: if at_end { 0.0 } else { chunk.direction() },
                    t: cur.t + part[0],
                    ell: cur.ell + part[1],
                    turns: cur.turns,
                });
            }
            cur.t += inc[0];
            cur.ell += inc[1];
            cur.sigma = chunk.end();
            if chunk.ends_at_turning() {
                cur.dir = -cur.dir;
                cur.at_turning = true;
                cur.turns += 1;
            } else {
                cur.at_turning = false;
            }
            if matches!(target, Target::Arc(_)) && matches!(chunk, Chunk::Regular { .. }) {
                if inc[1] < 1e-16 * goal {
                    stalled += 1;
                    if stalled >= STALL_CHUNKS {
                        return Ok(Walk::Unreached { dir: cur.dir });
                    }
                } else {
                    stalled = 0;
                }
            }
        }
        Err(Error::no_convergence("geodesic walk (chunk budget)", goal - [cur.t, cur.ell][k]))
    }

    fn boundary_reachable(&self) -> bool {
        *self
            .boundary_reachable
            .get_or_init(|| completeness_check(self.model).at_zero == BoundaryClass::Convergent)
    }
}
