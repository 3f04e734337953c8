//! Points, vectors and the board geometry.
//!
//! Positions and displacements share one 2D type; everything is in board
//! units with the origin at the board center.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point (or displacement) on the board.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product (z component of the 3D cross product).
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the direction of `self`, or zero for the zero vector.
    pub fn unit(self) -> Point2 {
        let n = self.norm();
        if n == 0.0 {
            Point2::ZERO
        } else {
            Point2::new(self.x / n, self.y / n)
        }
    }

    /// Rescale so the norm does not exceed `max_norm`.
    pub fn clip_norm(self, max_norm: f64) -> Point2 {
        let n = self.norm();
        if n > max_norm {
            self * (max_norm / n)
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// The square board agents move on.
///
/// Agent positions are clamped to `[-half_extent + padding, half_extent - padding]`
/// on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Board {
    pub half_extent: f64,
    pub padding: f64,
}

impl Default for Board {
    fn default() -> Self {
        Board {
            half_extent: 30.0,
            padding: 3.0,
        }
    }
}

impl Board {
    /// Largest coordinate magnitude an agent may occupy.
    pub fn limit(&self) -> f64 {
        self.half_extent - self.padding
    }
}

/// Clamp a point into the playable area of the board.
pub fn clamp_to_board(p: Point2, board: &Board) -> Point2 {
    let l = board.limit();
    Point2::new(p.x.clamp(-l, l), p.y.clamp(-l, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clamp_interior_point_unchanged() {
        let b = Board::default();
        assert_eq!(clamp_to_board(Point2::new(0.0, 0.0), &b), Point2::ZERO);
        assert_eq!(
            clamp_to_board(Point2::new(-26.99, 12.3), &b),
            Point2::new(-26.99, 12.3)
        );
    }

    #[test]
    fn clamp_examples() {
        let b = Board::default();
        assert_eq!(
            clamp_to_board(Point2::new(100.0, 0.0), &b),
            Point2::new(27.0, 0.0)
        );
        assert_eq!(
            clamp_to_board(Point2::new(-30.0, 28.0), &b),
            Point2::new(-27.0, 27.0)
        );
    }

    #[test]
    fn unit_vector_of_zero_is_zero() {
        assert_eq!(Point2::ZERO.unit(), Point2::ZERO);
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent(x in -1e4f64..1e4, y in -1e4f64..1e4) {
            let b = Board::default();
            let once = clamp_to_board(Point2::new(x, y), &b);
            let twice = clamp_to_board(once, &b);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn clamp_stays_on_board(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let b = Board::default();
            let p = clamp_to_board(Point2::new(x, y), &b);
            prop_assert!(p.x.abs() <= b.limit() && p.y.abs() <= b.limit());
        }
    }
}
