//! Discrete double T-maze: ASCII maps, the episodic environment and the
//! observation encoders that turn positions into unit-box feature vectors.

mod encoder;
mod env;
mod map;

pub use encoder::{ObservationEncoder, WallSensorEncoder};
pub use env::{EnvConfig, EnvState, MazeEnv, StepResult};
pub use map::{Cell, MapError, MazeMap, Move, Position, BUNDLED_DOUBLE_T};
