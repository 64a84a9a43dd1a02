//! Airdrop-game analysis library.
//!
//! Models a token launch where a designer airdrops a fraction `rho` of
//! the supply to `n` potential contributors whose costly participation
//! determines the system value through a monotone technology function.
//! The game is an exact potential game; the crate covers its exact
//! algebra, pure Nash and stochastic-stability analysis, logit-dynamics
//! simulation, closed-form birth-death stationary analytics with mixing
//! and hitting bounds, and the designer's profit optimization over the
//! airdrop fraction.
//!
//! ```
//! use airdrop_core::chain::success_probability;
//! use airdrop_core::designer::optimal_rho;
//! use airdrop_core::equilibria::{equilibrium_levels, threshold_critical_rho};
//! use airdrop_core::{GameConfig, TechnologySpec};
//!
//! // Ten players, unit cost, a threshold technology worth 100 once
//! // half of them contribute.
//! let game = GameConfig::uniform_binary(
//!     10,
//!     1.0,
//!     0.6,
//!     10.0,
//!     1.13,
//!     TechnologySpec::Threshold { tau: 5, v_low: 0.0, v_high: 100.0 },
//!     0.0,
//! )?;
//!
//! // The empty profile and the threshold level are the equilibria.
//! let levels: Vec<usize> = equilibrium_levels(&game)?.iter().map(|c| c.ell).collect();
//! assert_eq!(levels, vec![0, 5]);
//!
//! // Vanishing noise selects the high-value outcome above rho_c = 0.5.
//! assert_eq!(threshold_critical_rho(&game)?, 0.5);
//!
//! // Finite-noise success probability and the profit-optimal airdrop.
//! let p_high = success_probability(&game)?.p_high;
//! assert!(p_high > 0.0 && p_high < 1.0);
//! let optimum = optimal_rho(&game)?;
//! assert!(optimum.rho_star > 0.0);
//! # Ok::<(), airdrop_core::Error>(())
//! ```

pub mod chain;
pub mod designer;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod numeric;
pub mod technology;

pub use error::{Error, Result};
pub use model::{per_player_tokens, token_value, ContributionLevel, GameConfig, Metrics, Profile};
pub use technology::{Technology, TechnologySpec};
