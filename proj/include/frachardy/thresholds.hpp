#pragma once

/// Verdict thresholds shared by the experiment runner and the acceptance suite.
namespace frachardy::thresholds {

// Single full pole: mu against 1 - lambda / gamma_H.
inline constexpr double kHardyRecoveryAbs = 0.05;
inline constexpr double kHardyRecoverySeconds = 120.0;

// Angular eigenvalue against alpha^2 - ((N - 2s) / 2)^2.
inline constexpr double kAngularRel = 1e-3;
inline constexpr double kAngularSeconds = 60.0;

// Extension energy over Gagliardo energy against kappa_s.
inline constexpr double kKappaRel = 1e-3;

// Lambda near the ends of (0, (N - 2s) / 2), relative to gamma_H.
inline constexpr double kLambdaLimitRel = 0.01;
inline constexpr double kLambdaLowFrac = 1e-4;
inline constexpr double kLambdaHighFrac = 0.9999;

// Random configurations below the Hardy threshold: mu >= 1 - sum / gamma_H - slack.
inline constexpr double kSufficiencySlack = 0.05;

// Scaled-family witness: value at the largest admissible scale against 1 - sum / gamma_H.
inline constexpr double kWitnessLimitAbs = 0.1;

// Binding sweep: tolerance of the monotonicity diagnostic.
inline constexpr double kBindingMonotoneTol = 1e-3;

// Invariances.
inline constexpr double kTranslationAbs = 1e-6;
inline constexpr double kKelvinAbs = 1e-10;
inline constexpr double kLipschitzSlack = 1e-3;

// rayleigh::mu against extension::mu_extended.
inline constexpr double kCrossModuleAbs = 2e-2;

// Certificate bound against the computed mu.
inline constexpr double kCertificateSlack = 2e-2;

// Minimizer localization in the attainment regime.
inline constexpr double kAttainmentMassFraction = 0.5;
inline constexpr double kAttainmentMargin = 0.05;

// Zero potential.
inline constexpr double kZeroPotentialAbs = 1e-6;

}  // namespace frachardy::thresholds
