use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// The default 21x21 double T-maze: corner starts, goal at the center.
pub const BUNDLED_DOUBLE_T: &str = include_str!("../../assets/double_t.map");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Wall,
    Floor,
    Start,
    Goal,
}

impl Cell {
    pub fn is_open(self) -> bool {
        self != Cell::Wall
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Cardinal moves; the index order matches the wall sensors of
/// [`WallSensorEncoder`](super::WallSensorEncoder). North is `y - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    North = 0,
    South = 1,
    East = 2,
    West = 3,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::North, Move::South, Move::East, Move::West];

    pub fn from_index(i: usize) -> Option<Move> {
        Self::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Grid offset `(dx, dy)`, with y growing southward.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Move::North => (0, -1),
            Move::South => (0, 1),
            Move::East => (1, 0),
            Move::West => (-1, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map is empty")]
    Empty,
    #[error("line {line}: row has {found} cells, expected {expected}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {column}: unknown cell character {ch:?}")]
    UnknownChar { line: usize, column: usize, ch: char },
    #[error("no goal cell")]
    NoGoal,
    #[error("no start cell")]
    NoStart,
    #[error("line {line}, column {column}: goal unreachable from this start cell")]
    Unreachable { line: usize, column: usize },
}

/// Rectangular grid of cells. Everything outside the grid counts as wall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    starts: Vec<Position>,
    goals: Vec<Position>,
}

impl MazeMap {
    /// Parses `#` wall, `.` floor, `S` start and `G` goal, one row per line.
    /// Lines and columns in errors are 1-based.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let rows: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.is_empty()).collect();
        let width = rows.first().ok_or(MapError::Empty)?.chars().count();
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut starts = Vec::new();
        let mut goals = Vec::new();
        for (y, row) in rows.iter().enumerate() {
            let found = row.chars().count();
            if found != width {
                return Err(MapError::RaggedRow { line: y + 1, expected: width, found });
            }
            for (x, ch) in row.chars().enumerate() {
                let cell = match ch {
                    '#' => Cell::Wall,
                    '.' => Cell::Floor,
                    'S' => Cell::Start,
                    'G' => Cell::Goal,
                    _ => return Err(MapError::UnknownChar { line: y + 1, column: x + 1, ch }),
                };
                match cell {
                    Cell::Start => starts.push(Position::new(x, y)),
                    Cell::Goal => goals.push(Position::new(x, y)),
                    _ => {}
                }
                cells.push(cell);
            }
        }
        if goals.is_empty() {
            return Err(MapError::NoGoal);
        }
        if starts.is_empty() {
            return Err(MapError::NoStart);
        }
        let map = Self { width, height, cells, starts, goals };
        let dist = map.goal_distances();
        if let Some(s) = map.starts.iter().find(|s| dist[map.offset(**s)].is_none()) {
            return Err(MapError::Unreachable { line: s.y + 1, column: s.x + 1 });
        }
        Ok(map)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_DOUBLE_T).expect("bundled map is valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn starts(&self) -> &[Position] {
        &self.starts
    }

    pub fn goals(&self) -> &[Position] {
        &self.goals
    }

    fn offset(&self, p: Position) -> usize {
        p.y * self.width + p.x
    }

    pub fn cell(&self, p: Position) -> Cell {
        if p.x < self.width && p.y < self.height {
            self.cells[self.offset(p)]
        } else {
            Cell::Wall
        }
    }

    pub fn is_goal(&self, p: Position) -> bool {
        self.cell(p) == Cell::Goal
    }

    /// Neighbouring cell in direction `m`, or `None` if it is a wall or off the grid.
    pub fn neighbour(&self, p: Position, m: Move) -> Option<Position> {
        let (dx, dy) = m.delta();
        let x = p.x.checked_add_signed(dx)?;
        let y = p.y.checked_add_signed(dy)?;
        let q = Position::new(x, y);
        self.cell(q).is_open().then_some(q)
    }

    /// Whether moving in direction `m` from `p` is blocked.
    pub fn blocked(&self, p: Position, m: Move) -> bool {
        self.neighbour(p, m).is_none()
    }

    /// Shortest step count from every cell to the nearest goal (`None` for
    /// walls and cut-off cells), by breadth-first search from the goals.
    pub fn goal_distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cells.len()];
        let mut queue = VecDeque::new();
        for &g in &self.goals {
            dist[self.offset(g)] = Some(0);
            queue.push_back(g);
        }
        while let Some(p) = queue.pop_front() {
            let d = dist[self.offset(p)].expect("queued cells have a distance");
            for m in Move::ALL {
                if let Some(q) = self.neighbour(p, m) {
                    let o = self.offset(q);
                    if dist[o].is_none() {
                        dist[o] = Some(d + 1);
                        queue.push_back(q);
                    }
                }
            }
        }
        dist
    }

    pub fn distance_to_goal(&self, from: Position) -> Option<usize> {
        self.goal_distances()[self.offset(from)]
    }

    /// One shortest move sequence from `from` to a goal.
    pub fn shortest_path(&self, from: Position) -> Option<Vec<Move>> {
        let dist = self.goal_distances();
        let mut d = dist[self.offset(from)]?;
        let mut p = from;
        let mut path = Vec::with_capacity(d);
        while d > 0 {
            let (m, q) = Move::ALL
                .iter()
                .filter_map(|&m| self.neighbour(p, m).map(|q| (m, q)))
                .find(|(_, q)| dist[self.offset(*q)] == Some(d - 1))
                .expect("a cell at distance d has a neighbour at d - 1");
            path.push(m);
            p = q;
            d -= 1;
        }
        Some(path)
    }
}

impl fmt::Display for MazeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.cells.chunks(self.width) {
            for c in row {
                let ch = match c {
                    Cell::Wall => '#',
                    Cell::Floor => '.',
                    Cell::Start => 'S',
                    Cell::Goal => 'G',
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
