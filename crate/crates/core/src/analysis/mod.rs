//! Convergence studies: ε-sweeps, scaling fits and brute-force checks of the
//! integral and geometric bounds behind the residual estimates.

pub mod fit;
pub mod lemmas;
pub mod rbounds;
pub mod sweep;

pub use fit::{fit_scaling, FitModel, ScalingFit};
pub use lemmas::{check_integral_lemma, check_scaling_lemmas, d_mn, lemma_grid, IntegralLemmaReport, LemmaCheckReport, LemmaId};
pub use rbounds::{check_r_bounds, RBoundsReport};
pub use sweep::{epsilon_sweep, EpsilonSummary, SweepConfig, SweepReport};
