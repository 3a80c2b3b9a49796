//! Node trajectories and the displacement geometry the steering vectors consume.
//!
//! Trajectories are sampled at a fixed rate and emitted as [`Pose`] streams with
//! timestamps in integer nanoseconds from scenario start. Odometry is exact unless
//! [`add_position_noise`] is applied on top.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NANOS_PER_SECOND: f64 = 1e9;

/// Timestamped position and heading of a node in the world frame.
///
/// The field names double as the odometry CSV header (`t_ns,x,y,z,yaw`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    #[serde(default)]
    pub t_ns: u64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
    #[serde(default)]
    pub yaw: f64,
}

impl Pose {
    pub fn new(t_ns: u64, x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self { t_ns, x, y, z, yaw }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        let [dx, dy, dz] = sub(other.position(), self.position());
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn t_seconds(&self) -> f64 {
        self.t_ns as f64 / NANOS_PER_SECOND
    }
}

/// Displacement between two poses in spherical coordinates.
///
/// `polar` is measured from +z, so the horizontal plane sits at pi/2. A zero
/// displacement has both angles set to 0.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SphericalDisplacement {
    pub magnitude: f64,
    pub azimuth: f64,
    pub polar: f64,
}

impl SphericalDisplacement {
    pub fn to_cartesian(&self) -> [f64; 3] {
        let (sp, cp) = self.polar.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        [
            self.magnitude * sp * ca,
            self.magnitude * sp * sa,
            self.magnitude * cp,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathShape {
    Stationary,
    /// Counter-clockwise circle whose center sits `radius_m` to the left of the
    /// initial heading.
    Circular { radius_m: f64 },
    /// Straight line along the initial heading.
    Linear { length_m: f64 },
    /// Constant-speed polyline from the start pose through each point in turn.
    Waypoints { points: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub path: PathShape,
    pub start: Pose,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
}

impl TrajectorySpec {
    pub fn stationary(start: Pose, duration_s: f64, sample_rate_hz: f64) -> Self {
        Self {
            path: PathShape::Stationary,
            start,
            duration_s,
            sample_rate_hz,
        }
    }

    pub fn circular(start: Pose, radius_m: f64, duration_s: f64, sample_rate_hz: f64) -> Self {
        Self {
            path: PathShape::Circular { radius_m },
            start,
            duration_s,
            sample_rate_hz,
        }
    }

    pub fn linear(start: Pose, length_m: f64, duration_s: f64, sample_rate_hz: f64) -> Self {
        Self {
            path: PathShape::Linear { length_m },
            start,
            duration_s,
            sample_rate_hz,
        }
    }

    pub fn sample_count(&self) -> usize {
        // The epsilon keeps products like 10.0 * 100.0 from landing a hair under
        // an integer.
        (self.duration_s * self.sample_rate_hz + 1e-9).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        positive("trajectory.duration_s", self.duration_s)?;
        positive("trajectory.sample_rate_hz", self.sample_rate_hz)?;
        for (name, v) in [
            ("trajectory.start.x", self.start.x),
            ("trajectory.start.y", self.start.y),
            ("trajectory.start.z", self.start.z),
            ("trajectory.start.yaw", self.start.yaw),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        match &self.path {
            PathShape::Stationary => {}
            PathShape::Circular { radius_m } => positive("trajectory.path.radius_m", *radius_m)?,
            PathShape::Linear { length_m } => positive("trajectory.path.length_m", *length_m)?,
            PathShape::Waypoints { points } => {
                if points.is_empty() {
                    return Err(Error::invalid(
                        "trajectory.path.points",
                        "need at least one waypoint",
                    ));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("trajectory.path.points", "must be finite"));
                }
                let polyline = waypoint_polyline(&self.start, points);
                if polyline_length(&polyline) <= 0.0 {
                    return Err(Error::invalid(
                        "trajectory.path.points",
                        "waypoints do not leave the start position",
                    ));
                }
            }
        }
        Ok(())
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

/// Samples `spec` at its nominal rate: `floor(duration * rate) + 1` poses, the
/// first at t = 0 and the last at t = duration.
pub fn generate_trajectory(spec: &TrajectorySpec) -> Result<Vec<Pose>> {
    spec.validate()?;
    let n = spec.sample_count();
    let start = spec.start;
    let polyline = match &spec.path {
        PathShape::Waypoints { points } => waypoint_polyline(&start, points),
        _ => Vec::new(),
    };

    let poses = (0..n)
        .map(|k| {
            let t = k as f64 / spec.sample_rate_hz;
            let t_ns = (t * NANOS_PER_SECOND).round() as u64;
            let s = (t / spec.duration_s).min(1.0);
            let (x, y, z, yaw) = match &spec.path {
                PathShape::Stationary => (start.x, start.y, start.z, start.yaw),
                PathShape::Circular { radius_m } => {
                    let (sy, cy) = start.yaw.sin_cos();
                    let cx = start.x - radius_m * sy;
                    let ccy = start.y + radius_m * cy;
                    let angle = start.yaw - PI / 2.0 + TAU * s;
                    let (sa, ca) = angle.sin_cos();
                    (
                        cx + radius_m * ca,
                        ccy + radius_m * sa,
                        start.z,
                        wrap_angle(angle + PI / 2.0),
                    )
                }
                PathShape::Linear { length_m } => {
                    let (sy, cy) = start.yaw.sin_cos();
                    let along = length_m * s;
                    (start.x + along * cy, start.y + along * sy, start.z, wrap_angle(start.yaw))
                }
                PathShape::Waypoints { .. } => {
                    let (p, heading) = point_along(&polyline, s, start.yaw);
                    (p[0], p[1], p[2], heading)
                }
            };
            Pose { t_ns, x, y, z, yaw }
        })
        .collect();
    Ok(poses)
}

fn waypoint_polyline(start: &Pose, points: &[[f64; 3]]) -> Vec<[f64; 3]> {
    std::iter::once(start.position())
        .chain(points.iter().copied())
        .collect()
}

fn polyline_length(points: &[[f64; 3]]) -> f64 {
    points.windows(2).map(|w| norm(sub(w[1], w[0]))).sum()
}

/// Point at arc-length fraction `s` of the polyline plus the heading of the
/// segment it lies on.
fn point_along(points: &[[f64; 3]], s: f64, initial_yaw: f64) -> ([f64; 3], f64) {
    let total = polyline_length(points);
    let mut remaining = s * total;
    let mut heading = wrap_angle(initial_yaw);
    for w in points.windows(2) {
        let seg = sub(w[1], w[0]);
        let len = norm(seg);
        if len == 0.0 {
            continue;
        }
        heading = wrap_angle(seg[1].atan2(seg[0]));
        if remaining <= len {
            let f = remaining / len;
            return (
                [w[0][0] + f * seg[0], w[0][1] + f * seg[1], w[0][2] + f * seg[2]],
                heading,
            );
        }
        remaining -= len;
    }
    (*points.last().expect("polyline has a start point"), heading)
}

/// Adds independent zero-mean Gaussian noise to every position coordinate.
/// Timestamps and headings are left untouched.
pub fn add_position_noise<R: Rng + ?Sized>(
    poses: &mut [Pose],
    std_m: f64,
    rng: &mut R,
) -> Result<()> {
    if !(std_m.is_finite() && std_m >= 0.0) {
        return Err(Error::invalid("odometry_noise_std_m", "must be >= 0"));
    }
    if std_m == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, std_m).map_err(|e| Error::invalid("odometry_noise_std_m", e.to_string()))?;
    for p in poses {
        p.x += normal.sample(rng);
        p.y += normal.sample(rng);
        p.z += normal.sample(rng);
    }
    Ok(())
}

pub fn displacement_spherical(p0: &Pose, p: &Pose) -> SphericalDisplacement {
    let delta = sub(p.position(), p0.position());
    let d = norm(delta);
    if d == 0.0 {
        return SphericalDisplacement::default();
    }
    SphericalDisplacement {
        magnitude: d,
        azimuth: wrap_angle(delta[1].atan2(delta[0])),
        polar: (delta[2] / d).clamp(-1.0, 1.0).acos(),
    }
}

/// Azimuth of `tx` seen from `rx`, in the frame translated to `rx` and rotated
/// by `-rx.yaw`. Result lies in [-pi, pi).
pub fn ground_truth_bearing(rx: &Pose, tx: &Pose) -> Result<f64> {
    let dx = tx.x - rx.x;
    let dy = tx.y - rx.y;
    if dx.hypot(dy) == 0.0 {
        return Err(Error::invalid(
            "ground_truth_bearing",
            "receiver and transmitter are co-located in the horizontal plane",
        ));
    }
    let (s, c) = rx.yaw.sin_cos();
    let local_x = c * dx + s * dy;
    let local_y = -s * dx + c * dy;
    Ok(wrap_angle(local_y.atan2(local_x)))
}

/// Wraps an angle in radians into [-pi, pi).
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Sum of consecutive sample spacings.
pub fn path_length(poses: &[Pose]) -> f64 {
    poses.windows(2).map(|w| w[0].distance_to(&w[1])).sum()
}

/// Largest spacing between consecutive samples (0 for fewer than two poses).
pub fn max_step(poses: &[Pose]) -> f64 {
    poses
        .windows(2)
        .map(|w| w[0].distance_to(&w[1]))
        .fold(0.0, f64::max)
}

/// Re-expresses `poses` in the frame of the first pose: origin at its
/// position, x along its heading. Timestamps are kept.
pub fn to_start_frame(poses: &[Pose]) -> Vec<Pose> {
    let Some(first) = poses.first() else {
        return Vec::new();
    };
    let (s, c) = first.yaw.sin_cos();
    poses
        .iter()
        .map(|p| {
            let (dx, dy) = (p.x - first.x, p.y - first.y);
            Pose {
                t_ns: p.t_ns,
                x: c * dx + s * dy,
                y: -s * dx + c * dy,
                z: p.z - first.z,
                yaw: wrap_angle(p.yaw - first.yaw),
            }
        })
        .collect()
}

/// Mean position of the stream, carrying the first pose's timestamp and yaw.
pub fn centroid(poses: &[Pose]) -> Option<Pose> {
    let first = poses.first()?;
    let n = poses.len() as f64;
    let (sx, sy, sz) = poses
        .iter()
        .fold((0.0, 0.0, 0.0), |(x, y, z), p| (x + p.x, y + p.y, z + p.z));
    Some(Pose {
        t_ns: first.t_ns,
        x: sx / n,
        y: sy / n,
        z: sz / n,
        yaw: first.yaw,
    })
}

/// Pose at `t_ns` by linear interpolation of position between the bracketing
/// samples; clamps outside the stream. Yaw is taken from the earlier sample.
pub fn interpolate_pose(poses: &[Pose], t_ns: u64) -> Option<Pose> {
    let first = poses.first()?;
    let last = poses.last()?;
    if t_ns <= first.t_ns {
        return Some(Pose { t_ns, ..*first });
    }
    if t_ns >= last.t_ns {
        return Some(Pose { t_ns, ..*last });
    }
    let hi = poses.partition_point(|p| p.t_ns <= t_ns);
    let (a, b) = (&poses[hi - 1], &poses[hi]);
    let f = (t_ns - a.t_ns) as f64 / (b.t_ns - a.t_ns) as f64;
    Some(Pose {
        t_ns,
        x: a.x + f * (b.x - a.x),
        y: a.y + f * (b.y - a.y),
        z: a.z + f * (b.z - a.z),
        yaw: a.yaw,
    })
}

/// Index of the sample whose timestamp is closest to `t_ns` (earlier wins ties).
pub fn nearest_index(poses: &[Pose], t_ns: u64) -> Option<usize> {
    if poses.is_empty() {
        return None;
    }
    let hi = poses.partition_point(|p| p.t_ns < t_ns);
    if hi == 0 {
        return Some(0);
    }
    if hi == poses.len() {
        return Some(poses.len() - 1);
    }
    let before = t_ns - poses[hi - 1].t_ns;
    let after = poses[hi].t_ns - t_ns;
    Some(if before <= after { hi - 1 } else { hi })
}

/// Checks the stream invariants: strictly increasing timestamps, finite
/// coordinates, yaw in [-pi, pi). Returns the offending index on failure.
pub fn check_pose_stream(poses: &[Pose]) -> std::result::Result<(), (usize, String)> {
    for (i, p) in poses.iter().enumerate() {
        if ![p.x, p.y, p.z, p.yaw].iter().all(|v| v.is_finite()) {
            return Err((i, "non-finite coordinate".into()));
        }
        if !(-PI..PI).contains(&p.yaw) {
            return Err((i, format!("yaw {} outside [-pi, pi)", p.yaw)));
        }
        if i > 0 && p.t_ns <= poses[i - 1].t_ns {
            return Err((i, format!("timestamp {} not after {}", p.t_ns, poses[i - 1].t_ns)));
        }
    }
    Ok(())
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;
    use proptest::prelude::*;

    fn origin() -> Pose {
        Pose::default()
    }

    #[test]
    fn start_frame_puts_first_pose_at_origin_facing_x() {
        let poses = [
            Pose::new(0, 1.0, 2.0, 0.5, FRAC_PI_2),
            Pose::new(10, 1.0, 3.0, 0.5, PI - 0.1),
        ];
        let local = to_start_frame(&poses);
        assert_eq!((local[0].x, local[0].y, local[0].z, local[0].yaw), (0.0, 0.0, 0.0, 0.0));
        assert!((local[1].x - 1.0).abs() < 1e-12 && local[1].y.abs() < 1e-12);
        assert!((local[1].yaw - (FRAC_PI_2 - 0.1)).abs() < 1e-12);
        assert_eq!(local[1].t_ns, 10);
        assert!(to_start_frame(&[]).is_empty());
    }

    #[test]
    fn stationary_repeats_start() {
        let start = Pose::new(0, 1.0, 2.0, 0.5, 0.3);
        let poses = generate_trajectory(&TrajectorySpec::stationary(start, 10.0, 100.0)).unwrap();
        assert_eq!(poses.len(), 1001);
        for (k, p) in poses.iter().enumerate() {
            assert_eq!(p.t_ns, k as u64 * 10_000_000);
            assert_eq!(p.position(), start.position());
            assert_eq!(p.yaw, start.yaw);
        }
    }

    #[test]
    fn circular_spacing_matches_paper_density() {
        let poses =
            generate_trajectory(&TrajectorySpec::circular(origin(), 0.3, 10.0, 100.0)).unwrap();
        assert_eq!(poses.len(), 1001);
        let len = path_length(&poses);
        assert!((len - TAU * 0.3).abs() / (TAU * 0.3) < 1e-3, "len {len}");
        for w in poses.windows(2) {
            let step = w[0].distance_to(&w[1]);
            assert!((step - 0.0019).abs() <= 0.0001, "step {step}");
        }
    }

    #[test]
    fn circular_half_period_is_diametrically_opposite() {
        // Closed form: center = start + r * (-sin yaw, cos yaw); the point half a
        // revolution later is 2 * center - start.
        let start = Pose::new(0, 0.4, -1.2, 0.0, 0.7);
        let r = 0.3;
        let poses = generate_trajectory(&TrajectorySpec::circular(start, r, 10.0, 100.0)).unwrap();
        let mid = poses[500];
        let cx = start.x - r * start.yaw.sin();
        let cy = start.y + r * start.yaw.cos();
        assert_abs_diff_eq!(mid.x, 2.0 * cx - start.x, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.y, 2.0 * cy - start.y, epsilon = 1e-12);
        for p in &poses {
            assert_abs_diff_eq!((p.x - cx).hypot(p.y - cy), r, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(poses[1000].x, start.x, epsilon = 1e-12);
        assert_abs_diff_eq!(poses[1000].y, start.y, epsilon = 1e-12);
    }

    #[test]
    fn circular_initial_heading_is_tangent() {
        let poses =
            generate_trajectory(&TrajectorySpec::circular(origin(), 0.3, 10.0, 100.0)).unwrap();
        assert_abs_diff_eq!(poses[0].yaw, 0.0, epsilon = 1e-12);
        // moving along +x first, turning left
        assert!(poses[1].x > 0.0 && poses[1].y > 0.0);
    }

    #[test]
    fn linear_moves_along_heading() {
        let start = Pose::new(0, 1.0, 1.0, 0.0, PI / 2.0);
        let poses = generate_trajectory(&TrajectorySpec::linear(start, 2.0, 4.0, 10.0)).unwrap();
        assert_eq!(poses.len(), 41);
        let end = poses.last().unwrap();
        assert_abs_diff_eq!(end.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(end.y, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn waypoints_constant_speed() {
        let spec = TrajectorySpec {
            path: PathShape::Waypoints {
                points: vec![[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]],
            },
            start: origin(),
            duration_s: 2.0,
            sample_rate_hz: 10.0,
        };
        let poses = generate_trajectory(&spec).unwrap();
        assert_eq!(poses.len(), 21);
        assert_abs_diff_eq!(poses[10].x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(poses[10].y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(poses[20].y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(poses[15].yaw, PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_trajectory(&TrajectorySpec::stationary(origin(), 0.0, 100.0)).is_err());
        assert!(generate_trajectory(&TrajectorySpec::stationary(origin(), 1.0, -1.0)).is_err());
        assert!(generate_trajectory(&TrajectorySpec::circular(origin(), 0.0, 1.0, 1.0)).is_err());
        assert!(generate_trajectory(&TrajectorySpec::linear(origin(), -1.0, 1.0, 1.0)).is_err());
        let empty = TrajectorySpec {
            path: PathShape::Waypoints { points: vec![] },
            start: origin(),
            duration_s: 1.0,
            sample_rate_hz: 1.0,
        };
        assert!(generate_trajectory(&empty).is_err());
    }

    #[test]
    fn spherical_examples() {
        let p0 = origin();
        assert_eq!(displacement_spherical(&p0, &p0), SphericalDisplacement::default());
        let x = displacement_spherical(&p0, &Pose::new(0, 1.0, 0.0, 0.0, 0.0));
        assert_abs_diff_eq!(x.magnitude, 1.0);
        assert_abs_diff_eq!(x.azimuth, 0.0);
        assert_abs_diff_eq!(x.polar, PI / 2.0);
        let z = displacement_spherical(&p0, &Pose::new(0, 0.0, 0.0, 1.0, 0.0));
        assert_abs_diff_eq!(z.magnitude, 1.0);
        assert_abs_diff_eq!(z.azimuth, 0.0);
        assert_abs_diff_eq!(z.polar, 0.0);
    }

    #[test]
    fn bearing_examples() {
        let rx = origin();
        let b = ground_truth_bearing(&rx, &Pose::new(0, 1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b, PI / 4.0, epsilon = 1e-15);
        let b = ground_truth_bearing(&rx, &Pose::new(0, 3.858, 0.929, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b, 0.929f64.atan2(3.858), epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.236, epsilon = 5e-4);
        let b = ground_truth_bearing(&rx, &Pose::new(0, -1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b.abs(), PI, epsilon = 1e-15);
        assert!(b < PI);
        assert!(ground_truth_bearing(&rx, &Pose::new(0, 0.0, 0.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn bearing_is_in_receiver_frame() {
        let rx = Pose::new(0, 1.0, 1.0, 0.0, PI / 2.0);
        // straight ahead of a robot facing +y
        let b = ground_truth_bearing(&rx, &Pose::new(0, 1.0, 5.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-3.0 * PI / 2.0), PI / 2.0, epsilon = 1e-12);
        assert!(wrap_angle(-1e-300) < PI);
    }

    #[test]
    fn nearest_and_interpolate() {
        let poses: Vec<Pose> = (0..4)
            .map(|k| Pose::new(k * 10, k as f64, 0.0, 0.0, 0.0))
            .collect();
        assert_eq!(nearest_index(&poses, 14), Some(1));
        assert_eq!(nearest_index(&poses, 15), Some(1));
        assert_eq!(nearest_index(&poses, 16), Some(2));
        assert_eq!(nearest_index(&poses, 100), Some(3));
        let p = interpolate_pose(&poses, 25).unwrap();
        assert_abs_diff_eq!(p.x, 2.5);
        assert_eq!(interpolate_pose(&poses, 99).unwrap().x, 3.0);
    }

    proptest! {
        #[test]
        fn spherical_round_trip(dx in -50.0f64..50.0, dy in -50.0f64..50.0, dz in -50.0f64..50.0) {
            let p0 = Pose::new(0, 0.3, -0.2, 0.1, 0.0);
            let p = Pose::new(1, p0.x + dx, p0.y + dy, p0.z + dz, 0.0);
            let s = displacement_spherical(&p0, &p);
            prop_assert!(s.magnitude >= 0.0);
            prop_assert!((0.0..=PI).contains(&s.polar));
            prop_assert!((-PI..PI).contains(&s.azimuth));
            let c = s.to_cartesian();
            prop_assert!((c[0] - (p.x - p0.x)).abs() < 1e-9);
            prop_assert!((c[1] - (p.y - p0.y)).abs() < 1e-9);
            prop_assert!((c[2] - (p.z - p0.z)).abs() < 1e-9);
        }

        #[test]
        fn circle_radius_held(radius in 0.05f64..3.0, yaw in -3.1f64..3.1, x in -5.0f64..5.0) {
            let start = Pose::new(0, x, 1.0, 0.0, yaw);
            let poses = generate_trajectory(&TrajectorySpec::circular(start, radius, 2.0, 50.0)).unwrap();
            let cx = start.x - radius * yaw.sin();
            let cy = start.y + radius * yaw.cos();
            for p in &poses {
                prop_assert!(((p.x - cx).hypot(p.y - cy) - radius).abs() < 1e-9);
                prop_assert!((-PI..PI).contains(&p.yaw));
            }
            prop_assert!(check_pose_stream(&poses).is_ok());
        }
    }
}
