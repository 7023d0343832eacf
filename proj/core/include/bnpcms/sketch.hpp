#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bnpcms/hashing.hpp"

namespace bnpcms {

/// The n bucket counts a single token hashes to, one per hash.
struct HashedRow {
    std::vector<std::uint64_t> values;
};

/// Count-min sketch: an N x J counter matrix fed one token at a time.
/// Invariant: every row sums to the stream length m.
class SketchMatrix {
  public:
    explicit SketchMatrix(HashFamily family);

    void update(std::uint64_t token_id, std::uint64_t count = 1);

    /// Counts seen by `token_id`, one per hash.
    HashedRow hashed_row(std::uint64_t token_id) const;

    std::uint64_t at(std::uint32_t row, std::uint32_t bucket) const {
        return counts_[static_cast<std::size_t>(row) * family_.j + bucket];
    }
    std::uint64_t stream_length() const { return m_; }
    std::uint32_t depth() const { return family_.depth(); }
    std::uint32_t width() const { return family_.j; }
    const HashFamily& family() const { return family_; }

    /// Cellwise sum of two sketches built with the same family; equals the
    /// sketch of the concatenated streams.
    void merge(const SketchMatrix& other);

  private:
    friend SketchMatrix read_sketch(std::istream& in);

    HashFamily family_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t m_ = 0;
};

/// min_n row.values[n]; never underestimates the true count.
std::uint64_t cms_estimate(const HashedRow& row);

/// Count-mean-min: median over hashes of values[n] - (m - values[n])/(j - 1),
/// clamped to [0, cms_estimate]. Even hash counts use the midpoint of the two
/// central corrected values. Requires j >= 2.
double cmm_estimate(const HashedRow& row, std::uint64_t m, std::uint32_t j);

/// Snapshot form: header "N J m seed", then N lines of J counts. The hash
/// family is regenerated from the seed on load, so only seeded families can
/// be snapshotted.
void write_sketch(std::ostream& out, const SketchMatrix& sketch);
SketchMatrix read_sketch(std::istream& in);

}  // namespace bnpcms
