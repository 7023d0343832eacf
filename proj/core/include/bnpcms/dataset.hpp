#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnpcms {

/// Malformed or unreadable input; the message carries the line number.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads a token stream: tokens are whitespace-separated, ASCII-lowercased,
/// and mapped to ids via tokenize. One token per line is the canonical
/// format; multiple tokens on a line are accepted.
std::vector<std::uint64_t> read_token_stream(std::istream& in);

/// Reads the UCI bag-of-words format: three header lines (document count,
/// vocabulary size, number of triples), then one `docID wordID count`
/// triple per line, each expanded into `count` occurrences of the word.
/// Word ids are tokenized from their decimal spelling, so querying the
/// sketch with the literal text "42" matches word 42.
std::vector<std::uint64_t> read_uci_bow(std::istream& in);

/// pmf over ranks 1..vocab with weights proportional to rank^-c.
std::vector<double> zipf_pmf(double c, std::uint64_t vocab);

/// m i.i.d. Zipf(c) ranks in 1..vocab by inverse-CDF sampling; requires
/// c > 1 and vocab >= 1; deterministic in the seed.
std::vector<std::uint64_t> generate_zipf(double c, std::uint64_t m, std::uint64_t vocab,
                                         std::uint64_t seed);

/// One value per line in decimal.
void write_lines(std::ostream& out, std::span<const std::uint64_t> values);

}  // namespace bnpcms
