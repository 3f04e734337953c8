//! Trajectories, episodes and the trajectory file format.
//!
//! A [`Trajectory`] is the universal currency of the crate: targets,
//! recordings, rollouts and evaluation all speak it. Trajectory files are
//! plain text with a `step,x,y` header, 0-based strictly increasing step
//! indices and at least 9 significant digits per coordinate.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::geom::Point2;
use crate::{Error, Result};

/// Which actor produced the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Target,
    Teacher,
    Learner,
    Expert,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Target => "target",
            Role::Teacher => "teacher",
            Role::Learner => "learner",
            Role::Expert => "expert",
        };
        f.write_str(s)
    }
}

/// The two motor tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Follow a continuously moving cursor.
    Fc,
    /// Write English script letters.
    Wesl,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Fc => "fc",
            Task::Wesl => "wesl",
        })
    }
}

impl std::str::FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fc" => Ok(Task::Fc),
            "wesl" => Ok(Task::Wesl),
            other => Err(Error::Config(format!("unknown task '{other}'"))),
        }
    }
}

/// An ordered sequence of board points with a role tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<Point2>,
    role: Role,
}

impl Trajectory {
    /// Build a trajectory, enforcing non-emptiness and finiteness.
    pub fn new(points: Vec<Point2>, role: Role) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument(
                "trajectory must contain at least one point".into(),
            ));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "trajectory contains non-finite point ({}, {})",
                p.x, p.y
            )));
        }
        Ok(Trajectory { points, role })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Point2 {
        self.points[0]
    }

    pub fn last(&self) -> Point2 {
        *self.points.last().expect("trajectory is non-empty")
    }

    /// True when every point coincides with the first one.
    pub fn is_degenerate(&self) -> bool {
        let p0 = self.first();
        self.points.iter().all(|p| *p == p0)
    }

    /// Write in the trajectory file format (`step,x,y` header, one row per
    /// point).
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut out = String::from("step,x,y\n");
        for (i, p) in self.points.iter().enumerate() {
            // {:.9e} carries 10 significant digits.
            out.push_str(&format!("{i},{:.9e},{:.9e}\n", p.x, p.y));
        }
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Read a trajectory file, validating the header and step indices.
    pub fn read_file(path: &Path, role: Role) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "step,x,y" => {}
            _ => {
                return Err(Error::Parse {
                    path: path.into(),
                    line: 1,
                    msg: "expected header 'step,x,y'".into(),
                })
            }
        }
        let mut points = Vec::new();
        let mut last_step: Option<u64> = None;
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |msg: &str| Error::Parse {
                path: path.into(),
                line: idx + 1,
                msg: msg.into(),
            };
            let mut fields = line.split(',');
            let step: u64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| parse("bad step index"))?;
            let x: f64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| parse("bad x coordinate"))?;
            let y: f64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| parse("bad y coordinate"))?;
            match last_step {
                None if step != 0 => return Err(parse("step indices must start at 0")),
                Some(prev) if step <= prev => {
                    return Err(parse("step indices must be strictly increasing"))
                }
                _ => {}
            }
            last_step = Some(step);
            points.push(Point2::new(x, y));
        }
        Trajectory::new(points, role)
    }
}

/// A target sequence for one episode of a task.
#[derive(Debug, Clone)]
pub struct Episode {
    pub task: Task,
    pub target: Trajectory,
}

/// Number of target updates in a follow-the-cursor episode.
pub const FC_EPISODE_LEN: usize = 250;

impl Episode {
    /// A follow-the-cursor episode with the given phase offset.
    pub fn fc(alpha: f64) -> Self {
        let points = (0..FC_EPISODE_LEN)
            .map(|s| crate::env::fc_target(s, alpha))
            .collect();
        Episode {
            task: Task::Fc,
            target: Trajectory::new(points, Role::Target).expect("fc target is finite"),
        }
    }

    /// A letter-writing episode from a letter target trajectory.
    pub fn wesl(target: Trajectory) -> Result<Self> {
        if target.len() < 2 {
            return Err(Error::InvalidArgument(
                "letter episodes need at least 2 points".into(),
            ));
        }
        Ok(Episode {
            task: Task::Wesl,
            target,
        })
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Resample a trajectory to exactly `n` points, evenly spaced along its
/// cumulative arc length. Endpoints are preserved exactly; a degenerate
/// input (all points identical) yields `n` copies of that point.
pub fn resample(t: &Trajectory, n: usize) -> Result<Trajectory> {
    if t.len() < 2 {
        return Err(Error::InvalidArgument(
            "resample needs a trajectory with at least 2 points".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(
            "resample target length must be at least 2".into(),
        ));
    }
    let pts = t.points();
    let mut cumlen = Vec::with_capacity(pts.len());
    cumlen.push(0.0);
    for w in pts.windows(2) {
        let last = *cumlen.last().expect("non-empty");
        cumlen.push(last + w[0].distance(w[1]));
    }
    let total = *cumlen.last().expect("non-empty");
    if total == 0.0 {
        let points = vec![pts[0]; n];
        return Trajectory::new(points, t.role());
    }

    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    for k in 1..n - 1 {
        let target_len = total * k as f64 / (n - 1) as f64;
        while seg + 2 < cumlen.len() && cumlen[seg + 1] < target_len {
            seg += 1;
        }
        let seg_len = cumlen[seg + 1] - cumlen[seg];
        let frac = if seg_len == 0.0 {
            0.0
        } else {
            (target_len - cumlen[seg]) / seg_len
        };
        let a = pts[seg];
        let b = pts[seg + 1];
        out.push(a + (b - a) * frac);
    }
    out.push(pts[pts.len() - 1]);
    Trajectory::new(out, t.role())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn traj(points: &[(f64, f64)]) -> Trajectory {
        let pts = points.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        Trajectory::new(pts, Role::Target).unwrap()
    }

    fn arc_length(points: &[Point2]) -> f64 {
        points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    #[test]
    fn resample_midpoint_of_segment() {
        let t = traj(&[(0.0, 0.0), (1.0, 0.0)]);
        let r = resample(&t, 3).unwrap();
        assert_eq!(
            r.points(),
            &[
                Point2::new(0.0, 0.0),
                Point2::new(0.5, 0.0),
                Point2::new(1.0, 0.0)
            ]
        );
    }

    #[test]
    fn resample_identity_on_uniform_input() {
        let t = traj(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let r = resample(&t, 4).unwrap();
        for (a, b) in t.points().iter().zip(r.points()) {
            assert!(a.distance(*b) < 1e-12);
        }
    }

    #[test]
    fn resample_arc_length_walk() {
        // Arc lengths 0..4 along an L-shaped path of total length 4.
        let t = traj(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)]);
        let r = resample(&t, 5).unwrap();
        let expected = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (2.0, 2.0)];
        for (p, &(x, y)) in r.points().iter().zip(&expected) {
            assert!(p.distance(Point2::new(x, y)) < 1e-12, "{p:?} != ({x},{y})");
        }
    }

    #[test]
    fn resample_degenerate_input() {
        let t = traj(&[(1.5, -2.0), (1.5, -2.0)]);
        let r = resample(&t, 4).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.points().iter().all(|p| *p == Point2::new(1.5, -2.0)));
    }

    #[test]
    fn resample_rejects_short_inputs() {
        let t = traj(&[(0.0, 0.0)]);
        assert!(resample(&t, 4).is_err());
        let t2 = traj(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(resample(&t2, 1).is_err());
    }

    #[test]
    fn fc_episode_has_fixed_length() {
        assert_eq!(Episode::fc(3.0).len(), 250);
    }

    #[test]
    fn file_roundtrip_preserves_points() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = traj(&[(0.123456789012, -3.0), (1.0, 2.5), (-27.0, 27.0)]);
        t.write_file(&path).unwrap();
        let r = Trajectory::read_file(&path, Role::Target).unwrap();
        assert_eq!(r.len(), t.len());
        for (a, b) in t.points().iter().zip(r.points()) {
            assert!(a.distance(*b) < 1e-8);
        }
    }

    #[test]
    fn file_reader_rejects_bad_steps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "step,x,y\n0,0.0,0.0\n0,1.0,1.0\n").unwrap();
        assert!(Trajectory::read_file(&path, Role::Target).is_err());
        std::fs::write(&path, "x,y\n0,0.0,0.0\n").unwrap();
        assert!(Trajectory::read_file(&path, Role::Target).is_err());
    }

    proptest! {
        #[test]
        fn resample_preserves_endpoints(
            xs in proptest::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 2..40),
            n in 2usize..60,
        ) {
            let t = traj(&xs);
            let r = resample(&t, n).unwrap();
            prop_assert_eq!(r.len(), n);
            if !t.is_degenerate() {
                prop_assert_eq!(r.first(), t.first());
                prop_assert_eq!(r.last(), t.last());
            }
        }

        #[test]
        fn resample_fixes_uniformly_spaced_polylines(
            headings in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 2..30),
        ) {
            // Equal-chord polylines are fixed points of resampling at their
            // own length, so a second pass cannot move them.
            let mut p = Point2::ZERO;
            let mut pts = vec![(0.0, 0.0)];
            for h in &headings {
                p += Point2::new(h.cos(), h.sin());
                pts.push((p.x, p.y));
            }
            let t = traj(&pts);
            let n = t.len();
            let once = resample(&t, n).unwrap();
            let twice = resample(&once, n).unwrap();
            for ((a, b), c) in once.points().iter().zip(twice.points()).zip(t.points()) {
                prop_assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
                prop_assert!((a.x - c.x).abs() < 1e-9 && (a.y - c.y).abs() < 1e-9);
            }
        }

        #[test]
        fn double_resampling_is_stable(
            xs in proptest::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 2..30),
            n in 2usize..50,
        ) {
            // Generic polylines lose a little arc length to chord cutting,
            // so a second pass may shift interior points slightly; it must
            // keep endpoints, length and stay within the chord scale.
            let t = traj(&xs);
            let once = resample(&t, n).unwrap();
            let twice = resample(&once, n).unwrap();
            prop_assert_eq!(twice.len(), once.len());
            prop_assert_eq!(once.first(), twice.first());
            prop_assert_eq!(once.last(), twice.last());
            let chord = 2.0 * arc_length(once.points()) / (n - 1).max(1) as f64;
            for (a, b) in once.points().iter().zip(twice.points()) {
                prop_assert!(a.distance(*b) <= chord + 1e-9);
            }
        }
    }
}
