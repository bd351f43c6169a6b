use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::problem::Side;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// Grid cell `(column, row)`; its centre is at `(column + 0.5, row + 0.5)`.
pub type Cell = (i32, i32);

pub fn cell_center((c, r): Cell) -> Point {
    Point::new(c as f64 + 0.5, r as f64 + 0.5)
}

/// A blob path. Positions along it are path parameters in `[0, 1]` by arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Lane {
    pub side: Side,
    pub waypoints: Vec<Point>,
    /// Path parameter of the scanner.
    pub scanner: f64,
}

impl Lane {
    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn point_at(&self, t: f64) -> Point {
        let mut left = t.clamp(0.0, 1.0) * self.length();
        for w in self.waypoints.windows(2) {
            let d = w[0].dist(w[1]);
            if left <= d && d > 0.0 {
                let f = left / d;
                return Point::new(w[0].x + (w[1].x - w[0].x) * f, w[0].y + (w[1].y - w[0].y) * f);
            }
            left -= d;
        }
        *self.waypoints.last().expect("lane has waypoints")
    }

    /// Whether the unit square of `cell` touches the path.
    fn covers(&self, cell: Cell) -> bool {
        let (lo_x, lo_y) = (cell.0 as f64, cell.1 as f64);
        self.waypoints.windows(2).any(|w| {
            let (a, b) = (w[0], w[1]);
            let (min_x, max_x) = (a.x.min(b.x), a.x.max(b.x));
            let (min_y, max_y) = (a.y.min(b.y), a.y.max(b.y));
            // Lanes are axis-aligned, so the bounding box is the segment.
            max_x >= lo_x && min_x <= lo_x + 1.0 && max_y >= lo_y && min_y <= lo_y + 1.0
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoardError {
    #[error("board needs one input lane followed by one output lane")]
    LaneCount,
    #[error("{0:?} lane needs at least two distinct consecutive waypoints")]
    Degenerate(Side),
    #[error("{0:?} lane segments must be horizontal or vertical")]
    Diagonal(Side),
    #[error("{0:?} lane intersects itself")]
    SelfIntersecting(Side),
    #[error("input lane must end where the output lane starts")]
    Disconnected,
    #[error("{0:?} scanner must lie strictly inside its lane")]
    Scanner(Side),
    #[error("buildable cell {0:?} overlaps a lane or lies off the board")]
    Buildable(Cell),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Board {
    pub width: i32,
    pub height: i32,
    /// Input lane (environment to CPU) first, output lane (CPU to environment) second.
    pub lanes: Vec<Lane>,
    pub buildable: BTreeSet<Cell>,
}

impl Board {
    pub fn lane(&self, side: Side) -> &Lane {
        &self.lanes[side as usize]
    }

    pub fn validate(&self) -> Result<(), BoardError> {
        if self.lanes.len() != 2 || self.lanes[0].side != Side::Input || self.lanes[1].side != Side::Output {
            return Err(BoardError::LaneCount);
        }
        for lane in &self.lanes {
            let s = lane.side;
            if lane.waypoints.len() < 2 || lane.waypoints.windows(2).any(|w| w[0] == w[1]) {
                return Err(BoardError::Degenerate(s));
            }
            if lane.waypoints.windows(2).any(|w| w[0].x != w[1].x && w[0].y != w[1].y) {
                return Err(BoardError::Diagonal(s));
            }
            let segs: Vec<(Point, Point)> = lane.waypoints.windows(2).map(|w| (w[0], w[1])).collect();
            for i in 0..segs.len() {
                for j in i + 2..segs.len() {
                    if segments_touch(segs[i], segs[j]) {
                        return Err(BoardError::SelfIntersecting(s));
                    }
                }
            }
            if !(lane.scanner > 0.0 && lane.scanner < 1.0) {
                return Err(BoardError::Scanner(s));
            }
        }
        if self.lanes[0].waypoints.last() != self.lanes[1].waypoints.first() {
            return Err(BoardError::Disconnected);
        }
        for &cell in &self.buildable {
            let off = cell.0 < 0 || cell.1 < 0 || cell.0 >= self.width || cell.1 >= self.height;
            if off || self.lanes.iter().any(|l| l.covers(cell)) {
                return Err(BoardError::Buildable(cell));
            }
        }
        Ok(())
    }

    /// 16 x 9 board with an S-shaped lane on each side of a central CPU; every cell not
    /// touched by a lane is buildable.
    pub fn standard() -> Board {
        let p = Point::new;
        let lanes = vec![
            Lane {
                side: Side::Input,
                waypoints: vec![p(0.5, 1.5), p(4.5, 1.5), p(4.5, 6.5), p(7.5, 6.5), p(7.5, 4.5)],
                scanner: 0.5,
            },
            Lane {
                side: Side::Output,
                waypoints: vec![p(7.5, 4.5), p(10.5, 4.5), p(10.5, 1.5), p(12.5, 1.5), p(12.5, 7.5), p(15.5, 7.5)],
                scanner: 0.5,
            },
        ];
        let mut board = Board { width: 16, height: 9, lanes, buildable: BTreeSet::new() };
        for c in 0..board.width {
            for r in 0..board.height {
                if !board.lanes.iter().any(|l| l.covers((c, r))) {
                    board.buildable.insert((c, r));
                }
            }
        }
        board
    }
}

impl Default for Board {
    fn default() -> Self {
        Board::standard()
    }
}

fn segments_touch((a, b): (Point, Point), (c, d): (Point, Point)) -> bool {
    let overlap = |p: f64, q: f64, r: f64, s: f64| p.min(q).max(r.min(s)) <= p.max(q).min(r.max(s));
    overlap(a.x, b.x, c.x, d.x) && overlap(a.y, b.y, c.y, d.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_board_is_valid() {
        let b = Board::standard();
        b.validate().unwrap();
        assert!(!b.buildable.contains(&(0, 1)));
        assert!(b.buildable.contains(&(0, 0)));
        assert_eq!(b.lane(Side::Input).length(), 4.0 + 5.0 + 3.0 + 2.0);
        let mid = b.lane(Side::Input).point_at(0.5);
        assert_eq!(mid, Point::new(4.5, 4.5));
        assert_eq!(b.lane(Side::Output).point_at(1.0), Point::new(15.5, 7.5));
    }

    #[test]
    fn invalid_boards() {
        let mut b = Board::standard();
        b.buildable.insert((0, 1));
        assert_eq!(b.validate(), Err(BoardError::Buildable((0, 1))));

        let mut b = Board::standard();
        b.lanes[1].waypoints[0] = Point::new(6.5, 4.5);
        assert_eq!(b.validate(), Err(BoardError::Disconnected));

        let mut b = Board::standard();
        b.lanes[0].scanner = 1.0;
        assert_eq!(b.validate(), Err(BoardError::Scanner(Side::Input)));

        let mut b = Board::standard();
        let p = Point::new;
        b.lanes[0].waypoints = vec![p(0.5, 1.5), p(4.5, 1.5), p(4.5, 3.5), p(2.5, 3.5), p(2.5, 0.5), p(7.5, 0.5), p(7.5, 4.5)];
        assert_eq!(b.validate(), Err(BoardError::SelfIntersecting(Side::Input)));

        let mut b = Board::standard();
        b.lanes.pop();
        assert_eq!(b.validate(), Err(BoardError::LaneCount));
    }
}
