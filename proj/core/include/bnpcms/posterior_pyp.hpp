#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bnpcms/posterior.hpp"
#include "bnpcms/posterior_dp.hpp"
#include "bnpcms/pyp_params.hpp"
#include "bnpcms/sketch.hpp"

namespace bnpcms {

/// Immutable evaluation context for the Pitman-Yor point-query posterior.
/// Owns the tabulated mixing functions and the per-count kernel cache, both
/// built lazily and safe for concurrent use; posterior evaluations for
/// distinct counts may run fully in parallel.
///
/// Two evaluation paths: an exact finite-sum path (extended-precision
/// arithmetic, m <= 60, where the alternating sums cancel ~12 digits at the
/// top of the range) and a double-integral path over the positive
/// alpha-stable mixing density (any m). The automatic route uses the exact
/// path below the cap. alpha = 0 always routes to the closed-form
/// Dirichlet-process posterior, reproducing it bit for bit.
class PypPosteriorContext {
  public:
    static constexpr std::uint64_t kExactCap = 60;

    /// quad_level 0 selects the level per count: max(9, ceil(5 + log2(5
    /// sqrt(S)))) with S = min(m-c, theta+alpha+c) + 2, capped at 16. The
    /// scaling keeps the node spacing of the outer rule below the width
    /// 1/sqrt(S) of the integrand's peak.
    PypPosteriorContext(PypParams params, std::uint32_t j, std::uint64_t m,
                        int quad_level = 0);
    ~PypPosteriorContext();
    PypPosteriorContext(const PypPosteriorContext&) = delete;
    PypPosteriorContext& operator=(const PypPosteriorContext&) = delete;

    const PypParams& params() const;
    std::uint32_t j() const;
    std::uint64_t m() const;

    /// Normalized log pmf over l = 0..c by the automatic route, cached per
    /// distinct c and shared.
    std::shared_ptr<const std::vector<double>> kernel(std::uint64_t c) const;

    struct Impl;

  private:
    friend PosteriorPmf pyp_posterior_exact(const PypPosteriorContext&, std::uint64_t);
    friend PosteriorPmf pyp_posterior_integral(const PypPosteriorContext&, std::uint64_t);
    friend PosteriorPmf pyp_posterior(const PypPosteriorContext&, std::uint64_t);
    friend PosteriorPmf pyp_posterior_multi(const PypPosteriorContext&, const HashedRow&,
                                            MultiHashForm);

    std::unique_ptr<Impl> impl_;
};

/// Finite-sum posterior (Theorem-form with alternating binomial sums over
/// the distinct-count pgf), exact up to extended-precision rounding.
/// Requires 0 <= alpha < 1, c <= m, m <= kExactCap (throws domain_error
/// pointing to the integral path above the cap); alpha = 0 routes to the
/// Dirichlet-process formula.
PosteriorPmf pyp_posterior_exact(const PypPosteriorContext& ctx, std::uint64_t c);

/// Double-integral posterior over the alpha-stable mixing density; any m,
/// requires 0 < alpha < 1 and j >= 2. Raw values are analytically
/// normalized; if the computed mass drifts from 1 by more than 1e-6 the
/// outer rule is refined one level and the evaluation repeated once.
PosteriorPmf pyp_posterior_integral(const PypPosteriorContext& ctx, std::uint64_t c);

/// Automatic route (exact below the cap, integral above, DP at alpha = 0).
PosteriorPmf pyp_posterior(const PypPosteriorContext& ctx, std::uint64_t c);

/// Product of per-row kernels over the shared support 0..min_n c_n, using
/// the context cache. Form semantics match dp_posterior_multi.
PosteriorPmf pyp_posterior_multi(const PypPosteriorContext& ctx, const HashedRow& row,
                                 MultiHashForm form = MultiHashForm::kProportional);

/// Posterior mean of pyp_posterior_multi; the point estimate reported by
/// the sketch query estimators.
double pyp_estimate(const PypPosteriorContext& ctx, const HashedRow& row);

}  // namespace bnpcms
