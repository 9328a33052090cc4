//! Fair allocation of indivisible goods through the bidding game.
//!
//! Exact maximin and anyprice shares, the proportional bidding strategies,
//! the guess-refinement allocation wrapper, negative-instance generators and
//! the diagnostics used to check the guarantees on concrete runs. All
//! arithmetic is exact rational.

pub mod analysis;
pub mod engine;
pub mod items;
pub mod lp;
pub mod instance_gen;
pub mod io;
pub mod model;
pub mod poly;
pub mod rational;
pub mod shares;
pub mod strategies;
pub mod valuation;

pub use engine::{
    run_game, verify_transcript, AltruisticTrigger, GameConfig, GameMode, GameState, PublicView,
    Strategy, TieBreakPolicy, Transcript,
};
pub use items::{Item, ItemSet};
pub use model::{Agent, AgentId, Allocation, FractionalPartition, Instance};
pub use rational::Rational;
pub use valuation::{Oracle, Valuation, ValuationOracle};
