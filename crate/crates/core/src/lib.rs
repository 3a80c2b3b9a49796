//! Hardware-free WiFi CSI simulation and relative bearing estimation.
//!
//! The pipeline mirrors a two-robot setup: a mobile node drives a trajectory
//! while exchanging forward/backward packets with a static node. The channel
//! model synthesizes per-subcarrier CSI with CFO, STO and WGN; reciprocity
//! products cancel the CFO; Bartlett's estimator projects the result onto the
//! steering vectors of the motion-generated array to recover the bearing.

pub mod channel;
pub mod datastore;
pub mod error;
pub mod estimator;
pub mod exchange;
pub mod scenario;
pub mod trajectory;

pub use error::{Error, ErrorKind, Result};

pub use datastore::{read_dataset, write_dataset, ExperimentRecord};
pub use estimator::{AngleGrid, AoaProfile, GridPeak, SteeringPower};
pub use scenario::{estimate, preset, simulate, RunSummary, ScenarioConfig};
pub use trajectory::{Pose, TrajectorySpec};
