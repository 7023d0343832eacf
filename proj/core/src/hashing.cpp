#include "bnpcms/hashing.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "bnpcms/rng.hpp"

namespace bnpcms {

namespace {

// Folds a product of two residues mod 2^61 - 1; valid for inputs < p.
std::uint64_t mul_mod_mersenne(std::uint64_t x, std::uint64_t y) {
    const unsigned __int128 z = static_cast<unsigned __int128>(x) * y;
    std::uint64_t s = static_cast<std::uint64_t>(z & kHashPrime) +
                      static_cast<std::uint64_t>(z >> 61);
    s = (s & kHashPrime) + (s >> 61);
    return s >= kHashPrime ? s - kHashPrime : s;
}

}  // namespace

std::uint64_t tokenize(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint32_t hash_token(const HashSpec& spec, std::uint64_t token_id) {
    if (spec.a == 0 || spec.a >= spec.p || spec.b >= spec.p || spec.j == 0)
        throw std::invalid_argument("hash_token: spec out of range");
    const std::uint64_t x = token_id % spec.p;
    std::uint64_t v = mul_mod_mersenne(spec.a, x) + spec.b;
    if (v >= spec.p) v -= spec.p;
    return static_cast<std::uint32_t>(v % spec.j);
}

HashFamily draw_family(std::uint32_t n, std::uint32_t j, std::uint64_t seed) {
    if (n == 0 || j == 0) throw std::invalid_argument("draw_family: n and j must be >= 1");
    HashFamily family;
    family.j = j;
    family.seed = seed;
    std::mt19937_64 rng(seed);
    family.specs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        HashSpec spec;
        spec.a = 1 + uniform_below(rng, kHashPrime - 1);
        spec.b = uniform_below(rng, kHashPrime);
        spec.j = j;
        family.specs.push_back(spec);
    }
    return family;
}

void write_family(std::ostream& out, const HashFamily& family) {
    out << family.depth() << ' ' << family.j << ' ' << kHashPrime << ' ' << family.seed
        << '\n';
    for (const auto& spec : family.specs) out << spec.a << ' ' << spec.b << '\n';
}

HashFamily read_family(std::istream& in) {
    std::uint32_t n = 0;
    HashFamily family;
    std::uint64_t p = 0;
    if (!(in >> n >> family.j >> p >> family.seed))
        throw std::runtime_error("read_family: malformed header");
    if (p != kHashPrime) throw std::runtime_error("read_family: unsupported modulus");
    family.specs.resize(n);
    for (auto& spec : family.specs) {
        if (!(in >> spec.a >> spec.b)) throw std::runtime_error("read_family: truncated specs");
        spec.p = p;
        spec.j = family.j;
        if (spec.a == 0 || spec.a >= p || spec.b >= p)
            throw std::runtime_error("read_family: spec out of range");
    }
    return family;
}

std::uint32_t PerfectHasher::bucket(std::uint64_t token_id) {
    auto it = assigned_.find(token_id);
    if (it != assigned_.end()) return it->second;
    const auto b = static_cast<std::uint32_t>(uniform_below(rng_, j_));
    assigned_.emplace(token_id, b);
    return b;
}

}  // namespace bnpcms
