//! Simulation and verification suite for root-based morphological computing.
//!
//! * [`field`] – diffusing attractant/repellent fields over terrain
//! * [`grower`] – root-apex agents and the networks they grow
//! * [`geomtasks`] – geometric problems solved by growth and front propagation
//! * [`oracle`] – exact classical algorithms the approximations are checked against
//! * [`channelgates`] – collision-based root logic in channel layouts
//! * [`analog`] – plant-electronics arithmetic, resistor networks, memristors
//! * [`miner`] – gate mining on a stimulated material model

pub mod analog;
pub mod channelgates;
pub mod error;
pub mod field;
pub mod geometry;
pub mod geomtasks;
pub mod grower;
pub mod miner;
pub mod oracle;

pub use error::{Error, Result};
pub use geometry::{Point, Vec2};
