//! Agent-based simulation of flood vigilance communication.
//!
//! A population of residents with heterogeneous trust, risk aversion, memory
//! and risk-evaluation strategy reacts to the daily vigilance colour chosen
//! by a communicator (a human player or a scripted [`engine::Policy`]).
//! Residents blend the official risk with their own experience, update
//! trust asymmetrically when surprised by the rain, and decide whether to
//! evacuate.

pub mod agent;
pub mod colour;
pub mod config;
pub mod engine;
pub mod error;
pub mod population;
pub mod scenario;

pub use agent::{Resident, RiskStrategy, TrustParams};
pub use colour::{PerColour, VigilanceColour};
pub use config::SimConfig;
pub use engine::{Classification, GameSession, Phase};
pub use population::PopulationConfig;
pub use scenario::{ColourScale, Scenario, ScenarioDay};
