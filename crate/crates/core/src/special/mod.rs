//! Special functions: Γ, the hypergeometric function behind Cardy's formula,
//! the rectangle cross-ratio and the equilateral-triangle conformal map.

mod conformal;
mod gamma;
mod hypergeometric;
pub mod quadrature;

pub use conformal::{
    rectangle_cross_ratio, rectangle_crossing_prediction, triangle_map, triangle_side_position,
    TRIANGLE_A, TRIANGLE_B, TRIANGLE_C,
};
pub use gamma::gamma_ln;
pub(crate) use gamma::gamma_q;
pub use hypergeometric::{cardy_f, hyp2f1_113, hyp2f1_113_reflected, hyp2f1_113_series};
