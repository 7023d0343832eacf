#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bnpcms/quadrature.hpp"

namespace bnpcms {

/// log density at x > 0 of the positive alpha-stable law with Laplace
/// transform E[e^{-t X}] = e^{-t^alpha}, for 0 < alpha < 1 (boundaries
/// excluded). alpha = 1/2 is the Levy distribution
/// g(x) = x^{-3/2} e^{-1/(4x)} / (2 sqrt(pi)).
double stable_logpdf(double alpha, double x);

/// Same density with the argument passed as log x, which stays finite where
/// x itself would overflow; required by the posterior integrals whose inner
/// variable spans ~e^(+-300).
double stable_logpdf_log_arg(double alpha, double log_x);

/// True where the power-series route converges without catastrophic
/// cancellation (the evaluation is then ~100x cheaper than the angular
/// integral). Exposed so bulk evaluators can budget their node sweeps.
bool stable_series_eligible(double alpha, double log_x);

/// Rigorous upper bound on log g_alpha(x); cheap (no quadrature). Loose by
/// a few units near the body of the density, tight in the left tail where
/// it is used to discard negligible quadrature nodes.
double stable_logpdf_upper_bound(double alpha, double log_x);

/// Shared table of log g_alpha at the exp-sinh nodes of a given level,
/// built once per (alpha, level) and safe for concurrent use.
class StableNodeCache {
  public:
    std::shared_ptr<const std::vector<double>> get(double alpha, int level);

    static StableNodeCache& instance();

  private:
    std::mutex mu_;
    std::map<std::pair<double, int>, std::shared_ptr<const std::vector<double>>> table_;
};

}  // namespace bnpcms
