//! Stochastic convolution driven by a truncated cylindrical fBm.

mod convolution;
mod diagnostics;
mod ergodic;
mod lemma2;
mod noise;
mod ou;
mod variance;

pub use convolution::{
    convolution_field, convolution_series, convolution_trajectory, mode_convolution, phi1, phi2,
    scaled_convolution_trajectory, y_identity_check, y_identity_mode, ConvolutionSample, YIdentityReport,
};
pub use diagnostics::{i1_i2_diagnostics, I1I2Report, ModeTerms};
pub use ergodic::birkhoff_average;
pub use lemma2::{inner_integral, inner_integral_by_parts, lemma2_integral, lemma2_scan, ttv_divergence_witness};
pub use noise::NoiseRealization;
pub use ou::{fou_sample, fou_trajectory, FouSample};
pub use variance::{
    expected_h1_norm_sq, expected_norm_f_sq, mode_variance, stationary_mode_variance, stationary_unit_variance,
    unit_rate_variance,
};
