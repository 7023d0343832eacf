#pragma once

#include <cstdint>
#include <vector>

#include "bnpcms/posterior.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

/// How an N-hash posterior combines the per-row single-hash posteriors.
/// kProportional multiplies them and renormalizes. kPriorCorrected divides
/// the product by the latent-frequency prior to the power N-1, the exact
/// Bayes combination when the rows are conditionally independent given the
/// frequency; the rows share one latent partition, so neither form is the
/// true joint posterior for N >= 2.
enum class MultiHashForm { kProportional, kPriorCorrected };

/// Log pmf (exact, already normalized) of the latent frequency given one
/// hashed count c under a Dirichlet-process prior:
///   p(l) = a/(a+c) * (c-l+1)_l / (a+c-l)_l,  a = theta/j,  l = 0..c.
std::vector<double> dp_posterior_log_pmf(double theta, std::uint32_t j, std::uint64_t c);

PosteriorPmf dp_posterior_single(double theta, std::uint32_t j, std::uint64_t c);

/// Product of the per-row posteriors over the shared support 0..min_n c_n.
/// kPriorCorrected requires the stream size m (>= every count).
PosteriorPmf dp_posterior_multi(double theta, std::uint32_t j, const HashedRow& row,
                                MultiHashForm form = MultiHashForm::kProportional,
                                std::uint64_t m = 0);

/// Empirical-Bayes concentration estimate: maximizes the row-wise
/// Dirichlet-multinomial likelihood over log theta in [log lo, log hi] by
/// golden-section search, tolerance 1e-6 in log theta.
double fit_theta_empirical_bayes(const SketchMatrix& sketch, double lo = 1e-3,
                                 double hi = 1e5);

}  // namespace bnpcms
