#pragma once

#include <stdexcept>

namespace bnpcms {

/// Pitman-Yor parameters: discount alpha in [0, 1), strength theta > -alpha.
/// alpha == 0 is the Dirichlet-process special case.
struct PypParams {
    double alpha = 0.0;
    double theta = 1.0;

    void validate() const {
        if (!(alpha >= 0.0) || !(alpha < 1.0))
            throw std::invalid_argument("PypParams: alpha must lie in [0, 1)");
        if (!(theta > -alpha)) throw std::invalid_argument("PypParams: theta must exceed -alpha");
    }

    bool is_dirichlet() const { return alpha == 0.0; }
};

}  // namespace bnpcms
