use std::fmt::Debug;

use super::{MazeMap, Move, Position};

/// Maps an agent position to a feature vector in the unit box.
pub trait ObservationEncoder: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn encode(&self, map: &MazeMap, position: Position) -> Vec<f64>;
}

/// Normalized coordinates followed by four wall sensors
/// `(x, y, wall_n, wall_s, wall_e, wall_w)`. Carries no goal direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WallSensorEncoder;

fn normalized(v: usize, extent: usize) -> f64 {
    if extent > 1 {
        v as f64 / (extent - 1) as f64
    } else {
        0.0
    }
}

impl ObservationEncoder for WallSensorEncoder {
    fn dim(&self) -> usize {
        6
    }

    fn encode(&self, map: &MazeMap, p: Position) -> Vec<f64> {
        let wall = |m| if map.blocked(p, m) { 1.0 } else { 0.0 };
        vec![
            normalized(p.x, map.width()),
            normalized(p.y, map.height()),
            wall(Move::North),
            wall(Move::South),
            wall(Move::East),
            wall(Move::West),
        ]
    }
}
