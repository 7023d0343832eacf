#include "bnpcms/sketch.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bnpcms {

SketchMatrix::SketchMatrix(HashFamily family) : family_(std::move(family)) {
    if (family_.depth() == 0) throw std::invalid_argument("SketchMatrix: empty family");
    counts_.assign(static_cast<std::size_t>(family_.depth()) * family_.j, 0);
}

void SketchMatrix::update(std::uint64_t token_id, std::uint64_t count) {
    if (count == 0) return;
    if (m_ > std::numeric_limits<std::uint64_t>::max() - count)
        throw std::overflow_error("SketchMatrix: counter overflow");
    for (std::uint32_t n = 0; n < family_.depth(); ++n) {
        const std::uint32_t bucket = hash_token(family_.specs[n], token_id);
        counts_[static_cast<std::size_t>(n) * family_.j + bucket] += count;
    }
    m_ += count;
}

HashedRow SketchMatrix::hashed_row(std::uint64_t token_id) const {
    HashedRow row;
    row.values.reserve(family_.depth());
    for (std::uint32_t n = 0; n < family_.depth(); ++n)
        row.values.push_back(at(n, hash_token(family_.specs[n], token_id)));
    return row;
}

void SketchMatrix::merge(const SketchMatrix& other) {
    if (other.family_.seed != family_.seed || other.family_.j != family_.j ||
        other.family_.depth() != family_.depth())
        throw std::invalid_argument("SketchMatrix::merge: family mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    m_ += other.m_;
}

std::uint64_t cms_estimate(const HashedRow& row) {
    if (row.values.empty()) throw std::invalid_argument("cms_estimate: empty row");
    return *std::min_element(row.values.begin(), row.values.end());
}

double cmm_estimate(const HashedRow& row, std::uint64_t m, std::uint32_t j) {
    if (row.values.empty()) throw std::invalid_argument("cmm_estimate: empty row");
    if (j < 2) throw std::invalid_argument("cmm_estimate: needs j >= 2");
    std::vector<double> corrected;
    corrected.reserve(row.values.size());
    for (std::uint64_t v : row.values) {
        const double noise = static_cast<double>(m - v) / (j - 1);
        corrected.push_back(static_cast<double>(v) - noise);
    }
    std::sort(corrected.begin(), corrected.end());
    const std::size_t n = corrected.size();
    const double median = n % 2 == 1 ? corrected[n / 2]
                                     : 0.5 * (corrected[n / 2 - 1] + corrected[n / 2]);
    const double hi = static_cast<double>(cms_estimate(row));
    return std::clamp(median, 0.0, hi);
}

void write_sketch(std::ostream& out, const SketchMatrix& sketch) {
    out << sketch.depth() << ' ' << sketch.width() << ' ' << sketch.stream_length() << ' '
        << sketch.family().seed << '\n';
    for (std::uint32_t n = 0; n < sketch.depth(); ++n) {
        for (std::uint32_t b = 0; b < sketch.width(); ++b) {
            if (b) out << ' ';
            out << sketch.at(n, b);
        }
        out << '\n';
    }
}

SketchMatrix read_sketch(std::istream& in) {
    std::uint32_t n = 0, j = 0;
    std::uint64_t m = 0, seed = 0;
    if (!(in >> n >> j >> m >> seed)) throw std::runtime_error("read_sketch: malformed header");
    SketchMatrix sketch(draw_family(n, j, seed));
    for (std::uint32_t r = 0; r < n; ++r) {
        std::uint64_t row_sum = 0;
        for (std::uint32_t b = 0; b < j; ++b) {
            std::uint64_t v = 0;
            if (!(in >> v)) throw std::runtime_error("read_sketch: truncated counts");
            sketch.counts_[static_cast<std::size_t>(r) * j + b] = v;
            row_sum += v;
        }
        if (row_sum != m) throw std::runtime_error("read_sketch: row sum disagrees with header");
    }
    sketch.m_ = m;
    return sketch;
}

}  // namespace bnpcms
