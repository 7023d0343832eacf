#include "bnpcms/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "bnpcms/hashing.hpp"
#include "bnpcms/rng.hpp"

namespace bnpcms {

namespace {

void ascii_lowercase(std::string& word) {
    for (char& ch : word)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
}

[[noreturn]] void malformed(const char* what, std::uint64_t line) {
    throw IoError(std::string(what) + " at line " + std::to_string(line));
}

}  // namespace

std::vector<std::uint64_t> read_token_stream(std::istream& in) {
    std::vector<std::uint64_t> ids;
    std::string line, word;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream words(line);
        while (words >> word) {
            ascii_lowercase(word);
            ids.push_back(tokenize(word));
        }
    }
    if (in.bad()) throw IoError("token stream: read failure");
    return ids;
}

std::vector<std::uint64_t> read_uci_bow(std::istream& in) {
    std::uint64_t line_no = 0;
    auto next_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    std::string line;
    std::uint64_t header[3];  // documents, vocabulary, triples
    for (int i = 0; i < 3; ++i) {
        if (!next_line(line)) malformed("bag-of-words: missing header", line_no + 1);
        std::istringstream fields(line);
        if (!(fields >> header[i])) malformed("bag-of-words: bad header", line_no);
        std::string extra;
        if (fields >> extra) malformed("bag-of-words: bad header", line_no);
    }

    std::vector<std::uint64_t> ids;
    std::uint64_t triples = 0;
    while (next_line(line)) {
        std::istringstream fields(line);
        std::uint64_t doc = 0, word = 0, count = 0;
        if (!(fields >> doc >> word >> count) || count == 0)
            malformed("bag-of-words: bad triple", line_no);
        std::string extra;
        if (fields >> extra) malformed("bag-of-words: bad triple", line_no);
        ++triples;
        const std::uint64_t id = tokenize(std::to_string(word));
        ids.insert(ids.end(), count, id);
    }
    if (in.bad()) throw IoError("bag-of-words: read failure");
    if (triples != header[2])
        throw IoError("bag-of-words: header promises " + std::to_string(header[2]) +
                      " triples, found " + std::to_string(triples));
    return ids;
}

std::vector<double> zipf_pmf(double c, std::uint64_t vocab) {
    if (!(c > 1.0)) throw std::invalid_argument("zipf: needs exponent c > 1");
    if (vocab == 0) throw std::invalid_argument("zipf: needs vocab >= 1");
    std::vector<double> pmf(vocab);
    double total = 0.0;
    for (std::uint64_t r = 1; r <= vocab; ++r) {
        pmf[r - 1] = std::pow(static_cast<double>(r), -c);
        total += pmf[r - 1];
    }
    for (double& p : pmf) p /= total;
    return pmf;
}

std::vector<std::uint64_t> generate_zipf(double c, std::uint64_t m, std::uint64_t vocab,
                                         std::uint64_t seed) {
    const std::vector<double> pmf = zipf_pmf(c, vocab);
    std::vector<double> cdf(pmf.size());
    double run = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        run += pmf[i];
        cdf[i] = run;
    }
    cdf.back() = 1.0;

    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> ranks(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        const double u = uniform_unit(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        ranks[i] = static_cast<std::uint64_t>(it - cdf.begin()) + 1;
    }
    return ranks;
}

void write_lines(std::ostream& out, std::span<const std::uint64_t> values) {
    for (std::uint64_t v : values) out << v << '\n';
}

}  // namespace bnpcms
