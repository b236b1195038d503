//! Deterministic synthetic rotations.
//!
//! A scene is a list of primitives around a sensor at the origin; each
//! `(laser, step)` ray reports the distance to the nearest surface it hits,
//! or 0. Randomised placements are drawn from an xorshift64* generator
//! (Vigna's constants: shifts 12, 25, 27, multiplier `0x2545F4914F6CDD1D`;
//! doubles from the top 53 bits), so a seed reproduces the same frame on
//! any platform.
//!
//! Scene files are line oriented. Header lines are `key=value`: either the
//! sensor keys of [`crate::io`] or `sensor=hdl64` (optionally with
//! `ground_z_m`), plus `seed`. Every other line is a primitive:
//!
//! ```text
//! box cx cy cz ex ey ez          axis-aligned box, center and full edge lengths
//! cyl cx cy r h [zmin]           vertical cylinder; base defaults to the ground
//!                                plane, or -h/2 without one
//! ground z                       horizontal plane
//! scatter box count rmin rmax ex ey ez
//! scatter cyl count rmin rmax r h
//! ```
//!
//! `scatter` places `count` objects at uniform azimuth and radius in
//! `[rmin, rmax]`, standing on the ground plane when there is one.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{config_from_keys, content_lines, key_values};
use crate::scalar::Scalar;
use crate::sensor::{RotationFrame, SensorConfig};

/// xorshift64* pseudo-random generator.
#[derive(Clone, Debug)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    pub const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;
    /// Replacement for the all-zero seed, which would stay zero forever.
    pub const ZERO_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        Xorshift64Star {
            state: if seed == 0 { Self::ZERO_SEED } else { seed },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(Self::MULTIPLIER)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi)`.
    pub fn below(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo) as u64) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive<T> {
    Box {
        center: [T; 3],
        extents: [T; 3],
    },
    Cylinder {
        center: [T; 2],
        radius: T,
        height: T,
        base: T,
    },
    Ground {
        z: T,
    },
}

impl<T: Scalar> Primitive<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: T| v.is_finite();
        let pos = |v: T| v.is_finite() && v > T::zero();
        let fine = match self {
            Primitive::Box { center, extents } => {
                center.iter().all(|&v| ok(v)) && extents.iter().all(|&v| pos(v))
            }
            Primitive::Cylinder {
                center,
                radius,
                height,
                base,
            } => center.iter().all(|&v| ok(v)) && pos(*radius) && pos(*height) && ok(*base),
            Primitive::Ground { z } => ok(*z),
        };
        if fine {
            Ok(())
        } else {
            Err(Error::Scene(format!("degenerate primitive {self:?}")))
        }
    }

    /// Smallest positive distance along the unit ray `dir` from the origin.
    pub fn intersect(&self, dir: &[T; 3]) -> Option<T> {
        match self {
            Primitive::Box { center, extents } => {
                let two = T::lit(2.0);
                let mut t_near = T::neg_infinity();
                let mut t_far = T::infinity();
                for k in 0..3 {
                    let lo = center[k] - extents[k] / two;
                    let hi = center[k] + extents[k] / two;
                    if dir[k] == T::zero() {
                        if lo > T::zero() || hi < T::zero() {
                            return None;
                        }
                        continue;
                    }
                    let (a, b) = (lo / dir[k], hi / dir[k]);
                    t_near = t_near.max(a.min(b));
                    t_far = t_far.min(a.max(b));
                }
                nearest_positive(t_near, t_far)
            }
            Primitive::Cylinder {
                center,
                radius,
                height,
                base,
            } => {
                let top = *base + *height;
                let in_span = |t: T| {
                    let z = t * dir[2];
                    z >= *base && z <= top
                };
                let mut best: Option<T> = None;
                let mut take = |t: T| {
                    if t > T::zero() && best.is_none_or(|b| t < b) {
                        best = Some(t);
                    }
                };
                let a = dir[0] * dir[0] + dir[1] * dir[1];
                let c = center[0] * center[0] + center[1] * center[1] - *radius * *radius;
                if a > T::zero() {
                    let b = -T::lit(2.0) * (center[0] * dir[0] + center[1] * dir[1]);
                    let disc = b * b - T::lit(4.0) * a * c;
                    if disc >= T::zero() {
                        let root = disc.sqrt();
                        for t in [
                            (-b - root) / (T::lit(2.0) * a),
                            (-b + root) / (T::lit(2.0) * a),
                        ] {
                            if in_span(t) {
                                take(t);
                            }
                        }
                    }
                }
                if dir[2] != T::zero() {
                    for plane in [*base, top] {
                        let t = plane / dir[2];
                        let (x, y) = (t * dir[0] - center[0], t * dir[1] - center[1]);
                        if x * x + y * y <= *radius * *radius {
                            take(t);
                        }
                    }
                }
                best
            }
            Primitive::Ground { z } => {
                if dir[2] == T::zero() {
                    return None;
                }
                let t = *z / dir[2];
                (t > T::zero()).then_some(t)
            }
        }
    }
}

fn nearest_positive<T: Scalar>(t_near: T, t_far: T) -> Option<T> {
    if t_far < t_near || t_far <= T::zero() {
        None
    } else if t_near > T::zero() {
        Some(t_near)
    } else {
        Some(t_far)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScatterShape<T> {
    Box { extents: [T; 3] },
    Cylinder { radius: T, height: T },
}

/// Randomly placed copies of one shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Scatter<T> {
    pub shape: ScatterShape<T>,
    pub count: usize,
    pub r_min: T,
    pub r_max: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec<T> {
    pub seed: u64,
    pub sensor: SensorConfig<T>,
    pub objects: Vec<Primitive<T>>,
    pub scatter: Vec<Scatter<T>>,
}

impl<T: Scalar> SceneSpec<T> {
    pub fn new(sensor: SensorConfig<T>, seed: u64) -> Self {
        SceneSpec {
            seed,
            sensor,
            objects: Vec::new(),
            scatter: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn push(&mut self, p: Primitive<T>) -> &mut Self {
        self.objects.push(p);
        self
    }

    fn ground_level(&self) -> Option<T> {
        self.objects.iter().find_map(|p| match p {
            Primitive::Ground { z } => Some(*z),
            _ => None,
        })
    }

    /// Explicit primitives followed by the scattered ones drawn from the seed.
    pub fn resolve(&self) -> Result<Vec<Primitive<T>>> {
        let mut out = self.objects.clone();
        let mut rng = Xorshift64Star::new(self.seed);
        let ground = self.ground_level();
        for sc in &self.scatter {
            if !(sc.r_min >= T::zero()) || !(sc.r_max >= sc.r_min) {
                return Err(Error::Scene(format!(
                    "bad scatter radii {} .. {}",
                    sc.r_min, sc.r_max
                )));
            }
            for _ in 0..sc.count {
                let r = T::lit(rng.range(sc.r_min.to_f64_lossy(), sc.r_max.to_f64_lossy()));
                let az = T::lit(rng.range(0.0, std::f64::consts::TAU));
                let (cx, cy) = (r * az.cos(), r * az.sin());
                out.push(match sc.shape {
                    ScatterShape::Box { extents } => {
                        let cz = ground.map_or(T::zero(), |g| g + extents[2] / T::lit(2.0));
                        Primitive::Box {
                            center: [cx, cy, cz],
                            extents,
                        }
                    }
                    ScatterShape::Cylinder { radius, height } => Primitive::Cylinder {
                        center: [cx, cy],
                        radius,
                        height,
                        base: ground.unwrap_or(-height / T::lit(2.0)),
                    },
                });
            }
        }
        for p in &out {
            p.validate()?;
        }
        Ok(out)
    }

    /// Casts every ray of one rotation against the scene.
    pub fn generate(&self) -> Result<RotationFrame<T>> {
        let prims = self.resolve()?;
        let cfg = &self.sensor;
        let (lasers, steps) = (cfg.lasers(), cfg.steps());
        let mut ranges = vec![T::zero(); cfg.cells()];
        for l in 0..lasers {
            for s in 0..steps {
                let dir = cfg.direction(l, s);
                let hit = prims
                    .iter()
                    .filter_map(|p| p.intersect(&dir))
                    .fold(None, |acc: Option<T>, t| Some(acc.map_or(t, |a| a.min(t))));
                if let Some(t) = hit {
                    ranges[l * steps + s] = t;
                }
            }
        }
        RotationFrame::new(cfg.clone(), ranges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = Vec::new();
        let mut body = Vec::new();
        for (no, line) in content_lines(text) {
            if line.contains('=') {
                header.push((no, line));
            } else {
                body.push((no, line));
            }
        }
        let mut kv = key_values(header.into_iter())?;
        let end = text.lines().count();
        let seed = match kv.remove("seed") {
            Some((ln, v)) => v
                .parse::<u64>()
                .map_err(|_| Error::parse(ln, format!("bad seed '{v}'")))?,
            None => 0,
        };
        let sensor = match kv.remove("sensor") {
            Some((ln, preset)) => {
                if preset != "hdl64" {
                    return Err(Error::parse(
                        ln,
                        format!("unknown sensor preset '{preset}'"),
                    ));
                }
                let ground = match kv.remove("ground_z_m") {
                    Some((gl, v)) => Some(
                        v.parse::<T>()
                            .map_err(|_| Error::parse(gl, "bad ground_z_m"))?,
                    ),
                    None => None,
                };
                if let Some((k, (kl, _))) = kv.iter().next() {
                    return Err(Error::parse(
                        *kl,
                        format!("'{k}' not allowed with a sensor preset"),
                    ));
                }
                SensorConfig::hdl64().with_ground_z(ground)
            }
            None => {
                let known = [
                    "lasers",
                    "steps",
                    "rotation_rate",
                    "azimuth_step_rad",
                    "elevations_rad",
                    "ground_z_m",
                ];
                if let Some((k, (kl, _))) = kv.iter().find(|(k, _)| !known.contains(&k.as_str())) {
                    return Err(Error::parse(*kl, format!("unknown key '{k}'")));
                }
                config_from_keys(&kv, end)?
            }
        };

        let mut spec = SceneSpec::new(sensor, seed);
        for (no, line) in body {
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let nums = |from: usize| -> Result<Vec<T>> {
                rest[from..]
                    .iter()
                    .map(|w| {
                        T::from_str(w).map_err(|_| Error::parse(no, format!("bad number '{w}'")))
                    })
                    .collect()
            };
            let arity = |want: &[usize]| -> Result<()> {
                if want.contains(&rest.len()) {
                    Ok(())
                } else {
                    Err(Error::parse(
                        no,
                        format!("'{kind}' takes {want:?} values, got {}", rest.len()),
                    ))
                }
            };
            match kind {
                "box" => {
                    arity(&[6])?;
                    let v = nums(0)?;
                    spec.objects.push(Primitive::Box {
                        center: [v[0], v[1], v[2]],
                        extents: [v[3], v[4], v[5]],
                    });
                }
                "cyl" => {
                    arity(&[4, 5])?;
                    let v = nums(0)?;
                    let base = match v.get(4) {
                        Some(&z) => z,
                        None => spec.ground_level().unwrap_or(-v[3] / T::lit(2.0)),
                    };
                    spec.objects.push(Primitive::Cylinder {
                        center: [v[0], v[1]],
                        radius: v[2],
                        height: v[3],
                        base,
                    });
                }
                "ground" => {
                    arity(&[1])?;
                    spec.objects.push(Primitive::Ground { z: nums(0)?[0] });
                }
                "scatter" => {
                    let shape = rest.first().copied().unwrap_or_default();
                    let count: usize = rest
                        .get(1)
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| Error::parse(no, "scatter needs a count"))?;
                    let (shape, want) = match shape {
                        "box" => (0, 7),
                        "cyl" => (1, 6),
                        other => return Err(Error::parse(no, format!("cannot scatter '{other}'"))),
                    };
                    arity(&[want])?;
                    let v = nums(2)?;
                    let shape = if shape == 0 {
                        ScatterShape::Box {
                            extents: [v[2], v[3], v[4]],
                        }
                    } else {
                        ScatterShape::Cylinder {
                            radius: v[2],
                            height: v[3],
                        }
                    };
                    spec.scatter.push(Scatter {
                        shape,
                        count,
                        r_min: v[0],
                        r_max: v[1],
                    });
                }
                other => return Err(Error::parse(no, format!("unknown primitive '{other}'"))),
            }
        }
        for p in &spec.objects {
            p.validate()?;
        }
        Ok(spec)
    }

    /// Scene file text; parsing it back yields an equal spec.
    pub fn to_text(&self) -> String {
        let mut s = crate::io::format_config(&self.sensor);
        let _ = writeln!(s, "seed={}", self.seed);
        for p in &self.objects {
            let _ = match p {
                Primitive::Box {
                    center: c,
                    extents: e,
                } => {
                    writeln!(
                        s,
                        "box {} {} {} {} {} {}",
                        c[0], c[1], c[2], e[0], e[1], e[2]
                    )
                }
                Primitive::Cylinder {
                    center,
                    radius,
                    height,
                    base,
                } => writeln!(
                    s,
                    "cyl {} {} {} {} {}",
                    center[0], center[1], radius, height, base
                ),
                Primitive::Ground { z } => writeln!(s, "ground {z}"),
            };
        }
        for sc in &self.scatter {
            let _ = match sc.shape {
                ScatterShape::Box { extents: e } => writeln!(
                    s,
                    "scatter box {} {} {} {} {} {}",
                    sc.count, sc.r_min, sc.r_max, e[0], e[1], e[2]
                ),
                ScatterShape::Cylinder { radius, height } => writeln!(
                    s,
                    "scatter cyl {} {} {} {} {}",
                    sc.count, sc.r_min, sc.r_max, radius, height
                ),
            };
        }
        s
    }
}

/// Height of the ground plane below the sensor in the built-in scenarios.
pub const SENSOR_HEIGHT: f64 = 1.73;

/// Built-in scene families on the HDL-64-like sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Few car-sized boxes close to the sensor.
    SparseNear,
    /// The same boxes moved far away.
    SparseFar,
    DenseNear,
    DenseFar,
    /// Enclosed room with furniture; almost every ray returns.
    Room,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::SparseNear,
        Scenario::SparseFar,
        Scenario::DenseNear,
        Scenario::DenseFar,
        Scenario::Room,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SparseNear => "sparse-near",
            Scenario::SparseFar => "sparse-far",
            Scenario::DenseNear => "dense-near",
            Scenario::DenseFar => "dense-far",
            Scenario::Room => "room",
        }
    }

    pub fn spec<T: Scalar>(self, seed: u64) -> SceneSpec<T> {
        let mut spec = SceneSpec::new(SensorConfig::hdl64(), seed);
        let g = T::lit(-SENSOR_HEIGHT);
        spec.push(Primitive::Ground { z: g });
        let car = ScatterShape::Box {
            extents: [T::lit(4.5), T::lit(1.8), T::lit(1.5)],
        };
        let person = ScatterShape::Cylinder {
            radius: T::lit(0.3),
            height: T::lit(1.8),
        };
        let (cars, people, r_min, r_max) = match self {
            Scenario::SparseNear => (6, 2, 4.0, 9.0),
            Scenario::SparseFar => (6, 2, 14.0, 24.0),
            Scenario::DenseNear => (16, 8, 4.0, 11.0),
            Scenario::DenseFar => (16, 8, 14.0, 28.0),
            Scenario::Room => {
                room(&mut spec, g);
                return spec;
            }
        };
        for (shape, count) in [(car, cars), (person, people)] {
            spec.scatter.push(Scatter {
                shape,
                count,
                r_min: T::lit(r_min),
                r_max: T::lit(r_max),
            });
        }
        spec
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Scene(format!("unknown scenario '{s}'")))
    }
}

fn room<T: Scalar>(spec: &mut SceneSpec<T>, floor: T) {
    let t = T::lit;
    let (half_x, half_y, height, wall) = (6.0, 4.5, 4.0, 0.2);
    let zc = floor + t(height / 2.0);
    for (cx, cy, ex, ey) in [
        (half_x, 0.0, wall, 2.0 * half_y),
        (-half_x, 0.0, wall, 2.0 * half_y),
        (0.0, half_y, 2.0 * half_x, wall),
        (0.0, -half_y, 2.0 * half_x, wall),
    ] {
        spec.push(Primitive::Box {
            center: [t(cx), t(cy), zc],
            extents: [t(ex), t(ey), t(height)],
        });
    }
    for (cx, cy, ex, ey, ez) in [
        (3.0, 2.5, 1.6, 0.8, 0.75),
        (-3.5, -2.0, 1.2, 1.2, 0.75),
        (-2.0, 3.0, 0.5, 0.5, 1.0),
        (4.5, -3.2, 1.0, 1.5, 1.9),
    ] {
        spec.push(Primitive::Box {
            center: [t(cx), t(cy), floor + t(ez / 2.0)],
            extents: [t(ex), t(ey), t(ez)],
        });
    }
    for (cx, cy, r) in [(1.5, -1.5, 0.25), (-1.0, 1.8, 0.3), (2.5, 0.5, 0.2)] {
        spec.push(Primitive::Cylinder {
            center: [t(cx), t(cy)],
            radius: t(r),
            height: t(height),
            base: floor,
        });
    }
}

/// Ring of identical tall pillars around the sensor, no ground. Each pillar
/// returns roughly 2700 points on the HDL-64-like sensor, so the pillar
/// count scales the reflected-point count while keeping the geometry fixed.
pub fn pillar_ring<T: Scalar>(pillars: usize, seed: u64) -> Result<RotationFrame<T>> {
    const SLOTS: usize = 24;
    if pillars == 0 || pillars > SLOTS {
        return Err(Error::Scene(format!("pillar count must be in 1..={SLOTS}")));
    }
    let mut rng = Xorshift64Star::new(seed);
    let mut spec = SceneSpec::new(SensorConfig::hdl64(), seed);
    for i in 0..pillars {
        let az = (i as f64 + 0.5) * std::f64::consts::TAU / SLOTS as f64 + rng.range(-0.02, 0.02);
        let r = 7.5 + rng.range(-0.3, 0.3);
        spec.push(Primitive::Cylinder {
            center: [T::lit(r * az.cos()), T::lit(r * az.sin())],
            radius: T::lit(0.9),
            height: T::lit(8.0),
            base: T::lit(-4.5),
        });
    }
    spec.generate()
}

/// Largest point count accepted by [`worst_case_snake`].
pub const SNAKE_MAX_POINTS: usize = 1 << 22;

/// Frame whose returns form one ε-connected component built by merging
/// equal halves over and over.
///
/// Lasers sit on a grid of angular pitch δ at distance `d = ε / (1.5 δ)`, so
/// grid neighbors (including diagonals) are within ε and readings two lasers
/// or two steps apart are not. With `W = 2^m` slots, slot `p` (laser `p-1`)
/// has level `j = trailing_zeros(p)`. Odd slots are leaves: rows that fire
/// at every step up to `T+m-2`, growing into separate strips. A level-`j`
/// slot fires once, at step `T+j-1`, bridging the two blocks of `2^(j-1)`
/// strips on either side of it. Every merge therefore joins two equal,
/// almost complete blocks, and each level rewrites about half of the points.
/// `m` and `T` are chosen to maximise the rewrites for `n`; leftover points
/// fill whole columns after the last merge.
pub fn worst_case_snake<T: Scalar>(n: usize, epsilon: T) -> Result<RotationFrame<T>> {
    if n == 0 || n > SNAKE_MAX_POINTS {
        return Err(Error::TooLarge(format!(
            "snake frames hold 1..={SNAKE_MAX_POINTS} points, asked for {n}"
        )));
    }
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let pitch = |w: usize| (1.2 / w as f64).min(0.01);
    let mut best: Option<(usize, usize, usize)> = None; // (rewrites, m, t)
    for m in 1..=22usize {
        let half = 1usize << (m - 1);
        // leaves fire for t + m - 1 steps, plus half - 1 bridges
        if half * m + (half - 1) > n {
            break;
        }
        let t = (n - (half - 1)) / half + 1 - m;
        let tree = half * (t + m - 1) + half - 1;
        let lasers = 2 * half - 1;
        let steps = t + m - 1 + (n - tree).div_ceil(lasers);
        if steps as f64 * pitch(2 * half) > std::f64::consts::TAU {
            continue;
        }
        let rewrites: usize = (1..m).map(|j| (half / 2) * (t + j)).sum();
        if best.is_none_or(|(r, _, _)| rewrites >= r) {
            best = Some((rewrites, m, t));
        }
    }
    let (_, m, t_leaf) =
        best.ok_or_else(|| Error::TooLarge(format!("no snake layout for {n} points")))?;
    let w = 1usize << m;
    let lasers = w - 1;
    let last_merge = t_leaf + m - 2;
    let fires = |p: usize, t: usize| {
        let j = p.trailing_zeros() as usize;
        t > last_merge || j == 0 || t == t_leaf + j - 1
    };

    let mut cells = Vec::with_capacity(n);
    let mut t = 0;
    'fill: loop {
        for p in 1..w {
            if fires(p, t) {
                cells.push((p - 1, t));
                if cells.len() == n {
                    break 'fill;
                }
            }
        }
        t += 1;
    }
    let steps = (t + 1).max(2);

    let delta = pitch(w);
    let dist = epsilon / T::lit(1.5 * delta);
    let mid = (lasers as f64 - 1.0) / 2.0;
    let elev = (0..lasers)
        .map(|l| T::lit((l as f64 - mid) * delta))
        .collect();
    let config = SensorConfig::new(elev, steps, T::lit(delta), T::lit(10.0))?;
    let mut frame = RotationFrame::zeros(config);
    for (l, s) in cells {
        frame.set(l, s, dist)?;
    }
    Ok(frame)
}

/// Random sensor, random objects, random extra returns, optionally jittered
/// ranges and thinned to at most `max_points` returns. Used to fuzz the
/// clusterers against each other.
pub fn random_frame<T: Scalar>(seed: u64, max_points: usize) -> Result<RotationFrame<T>> {
    let mut rng = Xorshift64Star::new(seed);
    let lasers = rng.below(4, 33);
    let steps = rng.below(90, 721);
    let mut elev = Vec::with_capacity(lasers);
    let mut e = rng.range(-0.5, -0.35);
    for _ in 0..lasers {
        elev.push(T::lit(e));
        e += rng.range(0.004, 0.03);
    }
    let sensor = SensorConfig::uniform(elev, steps)?;
    let mut spec = SceneSpec::new(sensor, rng.next_u64());
    let ground = rng.range(1.0, 2.2);
    if rng.next_f64() < 0.5 {
        spec.push(Primitive::Ground { z: T::lit(-ground) });
    }
    for _ in 0..rng.below(1, 9) {
        let r = rng.range(1.2, 18.0);
        let az = rng.range(0.0, std::f64::consts::TAU);
        let (cx, cy) = (r * az.cos(), r * az.sin());
        if rng.next_f64() < 0.6 {
            let ext = [
                rng.range(0.2, 4.0),
                rng.range(0.2, 4.0),
                rng.range(0.3, 3.0),
            ];
            spec.push(Primitive::Box {
                center: [T::lit(cx), T::lit(cy), T::lit(rng.range(-ground, 0.5))],
                extents: ext.map(T::lit),
            });
        } else {
            spec.push(Primitive::Cylinder {
                center: [T::lit(cx), T::lit(cy)],
                radius: T::lit(rng.range(0.1, 1.2)),
                height: T::lit(rng.range(0.5, 3.0)),
                base: T::lit(-rng.range(0.0, ground)),
            });
        }
    }
    let mut frame = spec.generate()?;
    let config = frame.config().clone();
    let mut ranges = frame.ranges().to_vec();

    if rng.next_f64() < 0.5 {
        for d in ranges.iter_mut().filter(|d| **d > T::zero()) {
            *d = *d * T::lit(1.0 + rng.range(-0.01, 0.01));
        }
    }
    let extra = rng.below(0, 60);
    for _ in 0..extra {
        let c = rng.below(0, ranges.len());
        if ranges[c] == T::zero() {
            ranges[c] = T::lit(rng.range(0.5, 25.0));
        }
    }
    // thin to at most max_points by dropping random returns
    let mut live: Vec<usize> = (0..ranges.len())
        .filter(|&c| ranges[c] > T::zero())
        .collect();
    while live.len() > max_points {
        let i = rng.below(0, live.len());
        ranges[live.swap_remove(i)] = T::zero();
    }
    while live.len() < 2 {
        let c = rng.below(0, ranges.len());
        if ranges[c] == T::zero() {
            ranges[c] = T::lit(rng.range(0.5, 25.0));
            live.push(c);
        }
    }
    frame = RotationFrame::new(config, ranges)?;
    Ok(frame)
}

/// Full-turn scene with an object straddling azimuth 0, so that clusters
/// must be joined across the step `S-1` / step `0` seam.
pub fn wrap_frame<T: Scalar>(seed: u64) -> Result<RotationFrame<T>> {
    let mut rng = Xorshift64Star::new(seed);
    let lasers = rng.below(4, 17);
    let steps = rng.below(180, 721);
    let sensor = SensorConfig::evenly_spaced(
        lasers,
        T::lit(rng.range(-0.45, -0.3)),
        T::lit(rng.range(0.0, 0.1)),
        steps,
    )?;
    let mut spec = SceneSpec::new(sensor, rng.next_u64());
    let r = rng.range(2.0, 7.0);
    let half_width = rng.range(0.3, 1.5);
    if rng.next_f64() < 0.5 {
        spec.push(Primitive::Box {
            center: [
                T::lit(r),
                T::lit(rng.range(-0.1, 0.1)),
                T::lit(rng.range(-0.5, 0.5)),
            ],
            extents: [
                T::lit(rng.range(0.2, 1.0)),
                T::lit(2.0 * half_width),
                T::lit(rng.range(1.0, 3.0)),
            ],
        });
    } else {
        spec.push(Primitive::Cylinder {
            center: [T::lit(r), T::lit(rng.range(-0.1, 0.1))],
            radius: T::lit(half_width),
            height: T::lit(rng.range(1.0, 3.0)),
            base: T::lit(-rng.range(0.5, 1.5)),
        });
    }
    for _ in 0..rng.below(0, 4) {
        let rr = rng.range(2.0, 12.0);
        let az = rng.range(0.5, std::f64::consts::TAU - 0.5);
        spec.push(Primitive::Box {
            center: [T::lit(rr * az.cos()), T::lit(rr * az.sin()), T::zero()],
            extents: [T::lit(0.8), T::lit(0.8), T::lit(1.5)],
        });
    }
    spec.generate()
}
