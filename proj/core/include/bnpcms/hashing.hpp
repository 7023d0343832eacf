#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bnpcms {

/// Modulus shared by every hash: the Mersenne prime 2^61 - 1.
inline constexpr std::uint64_t kHashPrime = (std::uint64_t{1} << 61) - 1;

/// FNV-1a on the raw bytes of a token. Empty input returns the offset basis
/// 14695981039346656037.
std::uint64_t tokenize(std::string_view bytes);

/// One 2-universal hash h(x) = ((a*x + b) mod p) mod j with a in [1, p),
/// b in [0, p).
struct HashSpec {
    std::uint64_t a = 1;
    std::uint64_t b = 0;
    std::uint64_t p = kHashPrime;
    std::uint32_t j = 1;
};

std::uint32_t hash_token(const HashSpec& spec, std::uint64_t token_id);

/// n independent hashes into j buckets, regenerable bit-exactly from the
/// 64-bit seed (mt19937_64 with rejection sampling, so the draw is identical
/// on every conforming platform).
struct HashFamily {
    std::vector<HashSpec> specs;
    std::uint32_t j = 1;
    std::uint64_t seed = 0;

    std::uint32_t depth() const { return static_cast<std::uint32_t>(specs.size()); }
};

HashFamily draw_family(std::uint32_t n, std::uint32_t j, std::uint64_t seed);

/// Text form: one header line "N J p seed", then N lines "a b".
void write_family(std::ostream& out, const HashFamily& family);
HashFamily read_family(std::istream& in);

/// Test-oriented hasher matching the analysis model exactly: every distinct
/// token id gets an i.i.d. uniform bucket on first appearance. Deterministic
/// given the seed and the order of first appearances. Not for production
/// sketches (memory grows with the support).
class PerfectHasher {
  public:
    PerfectHasher(std::uint32_t j, std::uint64_t seed) : j_(j), rng_(seed) {}

    std::uint32_t bucket(std::uint64_t token_id);

  private:
    std::uint32_t j_;
    std::mt19937_64 rng_;
    std::unordered_map<std::uint64_t, std::uint32_t> assigned_;
};

}  // namespace bnpcms
