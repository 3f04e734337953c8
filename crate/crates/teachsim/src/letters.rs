//! The bundled letter-writing dataset: 26 single-stroke letter trajectories
//! on the board grid, one episode per letter.
//!
//! Each letter is drawn as one continuous polyline (the pen never lifts;
//! some strokes retrace) in a design box, then centered on the board and
//! resampled along arc length. Point budgets are allocated proportionally
//! to stroke length so the dataset totals [`LETTER_TOTAL_POINTS`] points,
//! an average of just below 72 per letter.
//!
//! On disk a dataset is one trajectory file per letter plus a manifest
//! listing `letter,file` pairs, exactly 26 entries.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::geom::Point2;
use crate::trajectory::{resample, Role, Trajectory};
use crate::{Error, Result};

/// Total number of points across the 26 letters.
pub const LETTER_TOTAL_POINTS: usize = 1871;

const DESIGN_CENTER: (f64, f64) = (5.0, 7.0);
const DESIGN_SCALE: f64 = 1.4;

struct Path2 {
    pts: Vec<Point2>,
}

impl Path2 {
    fn start(x: f64, y: f64) -> Self {
        Path2 {
            pts: vec![Point2::new(x, y)],
        }
    }

    fn line(mut self, x: f64, y: f64) -> Self {
        self.pts.push(Point2::new(x, y));
        self
    }

    /// Append a circular arc from `deg0` to `deg1` (degrees, positive sweep
    /// counterclockwise). The arc's first point is skipped; callers chain
    /// arcs onto a path already standing at the arc start.
    fn arc(mut self, cx: f64, cy: f64, r: f64, deg0: f64, deg1: f64) -> Self {
        let steps = ((deg1 - deg0).abs() / 6.0).ceil().max(2.0) as usize;
        for k in 1..=steps {
            let a = (deg0 + (deg1 - deg0) * k as f64 / steps as f64).to_radians();
            self.pts.push(Point2::new(cx + r * a.cos(), cy + r * a.sin()));
        }
        self
    }

    fn build(self) -> Vec<Point2> {
        self.pts
    }
}

fn letter_path(letter: char) -> Vec<Point2> {
    match letter {
        'a' => Path2::start(0.0, 0.0)
            .line(5.0, 14.0)
            .line(10.0, 0.0)
            .line(7.86, 6.0)
            .line(2.14, 6.0)
            .build(),
        'b' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .arc(0.0, 10.5, 3.5, 90.0, -90.0)
            .arc(0.0, 3.5, 3.5, 90.0, -90.0)
            .build(),
        'c' => Path2::start(
            5.0 + 6.0 * 55f64.to_radians().cos(),
            7.0 + 6.0 * 55f64.to_radians().sin(),
        )
        .arc(5.0, 7.0, 6.0, 55.0, 305.0)
        .build(),
        'd' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .arc(0.0, 7.0, 7.0, 90.0, -90.0)
            .build(),
        'e' => Path2::start(9.0, 14.0)
            .line(0.0, 14.0)
            .line(0.0, 7.0)
            .line(7.0, 7.0)
            .line(0.0, 7.0)
            .line(0.0, 0.0)
            .line(9.0, 0.0)
            .build(),
        'f' => Path2::start(9.0, 14.0)
            .line(0.0, 14.0)
            .line(0.0, 7.0)
            .line(7.0, 7.0)
            .line(0.0, 7.0)
            .line(0.0, 0.0)
            .build(),
        'g' => {
            let r = 5.8;
            let start = 55f64.to_radians();
            let end = 315f64.to_radians();
            Path2::start(5.0 + r * start.cos(), 7.0 + r * start.sin())
                .arc(5.0, 7.0, r, 55.0, 315.0)
                .line(5.0 + r * end.cos(), 7.0)
                .line(5.2, 7.0)
                .build()
        }
        'h' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .line(0.0, 7.0)
            .line(10.0, 7.0)
            .line(10.0, 14.0)
            .line(10.0, 0.0)
            .build(),
        'i' => Path2::start(3.0, 14.0)
            .line(7.0, 14.0)
            .line(5.0, 14.0)
            .line(5.0, 0.0)
            .line(3.0, 0.0)
            .line(7.0, 0.0)
            .build(),
        'j' => Path2::start(2.0, 14.0)
            .line(8.0, 14.0)
            .line(6.0, 14.0)
            .line(6.0, 3.0)
            .arc(3.5, 3.0, 2.5, 0.0, -180.0)
            .build(),
        'k' => Path2::start(0.0, 14.0)
            .line(0.0, 0.0)
            .line(0.0, 6.0)
            .line(9.0, 14.0)
            .line(0.0, 6.0)
            .line(9.0, 0.0)
            .build(),
        'l' => Path2::start(0.0, 14.0).line(0.0, 0.0).line(9.0, 0.0).build(),
        'm' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .line(5.0, 6.0)
            .line(10.0, 14.0)
            .line(10.0, 0.0)
            .build(),
        'n' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .line(10.0, 0.0)
            .line(10.0, 14.0)
            .build(),
        'o' => Path2::start(5.0, 12.8).arc(5.0, 7.0, 5.8, 90.0, 450.0).build(),
        'p' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .arc(0.0, 10.5, 3.5, 90.0, -90.0)
            .build(),
        'q' => {
            let r = 5.5;
            let a = (-45f64).to_radians();
            let sx = 5.0 + r * a.cos();
            let sy = 7.5 + r * a.sin();
            Path2::start(sx, sy)
                .arc(5.0, 7.5, r, -45.0, 315.0)
                .line(sx + 2.0 * a.cos(), sy + 2.0 * a.sin())
                .build()
        }
        'r' => Path2::start(0.0, 0.0)
            .line(0.0, 14.0)
            .arc(0.0, 10.5, 3.5, 90.0, -90.0)
            .line(9.0, 0.0)
            .build(),
        's' => Path2::start(
            5.0 + 3.6 * 30f64.to_radians().cos(),
            10.4 + 3.6 * 30f64.to_radians().sin(),
        )
        .arc(5.0, 10.4, 3.6, 30.0, 270.0)
        .arc(5.0, 3.2, 3.6, 90.0, -150.0)
        .build(),
        't' => Path2::start(0.0, 14.0)
            .line(10.0, 14.0)
            .line(5.0, 14.0)
            .line(5.0, 0.0)
            .build(),
        'u' => Path2::start(0.0, 14.0)
            .line(0.0, 5.0)
            .arc(5.0, 5.0, 5.0, 180.0, 360.0)
            .line(10.0, 14.0)
            .build(),
        'v' => Path2::start(0.0, 14.0).line(5.0, 0.0).line(10.0, 14.0).build(),
        'w' => Path2::start(0.0, 14.0)
            .line(2.5, 0.0)
            .line(5.0, 9.0)
            .line(7.5, 0.0)
            .line(10.0, 14.0)
            .build(),
        'x' => Path2::start(0.0, 14.0)
            .line(10.0, 0.0)
            .line(5.0, 7.0)
            .line(0.0, 0.0)
            .line(5.0, 7.0)
            .line(10.0, 14.0)
            .build(),
        'y' => Path2::start(0.0, 14.0)
            .line(5.0, 7.0)
            .line(10.0, 14.0)
            .line(5.0, 7.0)
            .line(5.0, 0.0)
            .build(),
        'z' => Path2::start(0.0, 14.0)
            .line(10.0, 14.0)
            .line(0.0, 0.0)
            .line(10.0, 0.0)
            .build(),
        other => unreachable!("no letter path for '{other}'"),
    }
}

fn arc_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

fn to_board(points: Vec<Point2>) -> Vec<Point2> {
    points
        .into_iter()
        .map(|p| {
            Point2::new(
                (p.x - DESIGN_CENTER.0) * DESIGN_SCALE,
                (p.y - DESIGN_CENTER.1) * DESIGN_SCALE,
            )
        })
        .collect()
}

/// All 26 letters, lowercase a through z.
pub fn letter_names() -> impl Iterator<Item = char> {
    'a'..='z'
}

/// Generate the full letter dataset, deterministically.
pub fn generate_letters() -> Vec<(char, Trajectory)> {
    let raw: Vec<(char, Vec<Point2>)> = letter_names()
        .map(|c| (c, to_board(letter_path(c))))
        .collect();
    let lengths: Vec<f64> = raw.iter().map(|(_, pts)| arc_length(pts)).collect();
    let total_len: f64 = lengths.iter().sum();

    // Proportional allocation, remainder to the largest fractional parts.
    let ideal: Vec<f64> = lengths
        .iter()
        .map(|l| l / total_len * LETTER_TOTAL_POINTS as f64)
        .collect();
    let mut counts: Vec<usize> = ideal.iter().map(|v| v.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        (ideal[b] - ideal[b].floor())
            .partial_cmp(&(ideal[a] - ideal[a].floor()))
            .expect("finite")
            .then(a.cmp(&b))
    });
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(LETTER_TOTAL_POINTS - assigned) {
        counts[i] += 1;
    }

    raw.into_iter()
        .zip(counts)
        .map(|((c, pts), n)| {
            let base = Trajectory::new(pts, Role::Target).expect("letter paths are valid");
            let t = resample(&base, n.max(2)).expect("letter resampling");
            (c, t)
        })
        .collect()
}

/// Write the 26 letter files and the manifest into `dir`.
pub fn write_letter_dataset(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::new();
    for (c, t) in generate_letters() {
        let name = format!("letter_{c}.csv");
        t.write_file(&dir.join(&name))?;
        manifest.push_str(&format!("{c},{name}\n"));
    }
    let path = dir.join("manifest.txt");
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(manifest.as_bytes())
        .map_err(|e| Error::io(&path, e))
}

/// Load a letter dataset directory; the manifest must list exactly 26
/// letters.
pub fn read_letter_dataset(dir: &Path) -> Result<Vec<(char, Trajectory)>> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut letters = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (name, file) = line.split_once(',').ok_or_else(|| Error::Parse {
            path: manifest_path.clone(),
            line: idx + 1,
            msg: "expected 'letter,file'".into(),
        })?;
        let mut chars = name.trim().chars();
        let letter = chars.next().filter(|c| c.is_ascii_lowercase());
        let letter = match (letter, chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(Error::Parse {
                    path: manifest_path.clone(),
                    line: idx + 1,
                    msg: format!("bad letter name '{name}'"),
                })
            }
        };
        let t = Trajectory::read_file(&dir.join(file.trim()), Role::Target)?;
        letters.push((letter, t));
    }
    if letters.len() != 26 {
        return Err(Error::IncompleteData(format!(
            "letter manifest must list exactly 26 letters, found {}",
            letters.len()
        )));
    }
    Ok(letters)
}
