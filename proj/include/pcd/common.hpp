#pragma once

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcd {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }
std::int64_t floor_of(const Rational& r);
std::int64_t ceil_of(const Rational& r);
// Accepts "p/q", integers, or finite decimals such as "0.25".
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);

constexpr int kRetryBudget = 20;

// A randomized construction or search ran out of budget. Carries the stage that failed.
class OperationalError : public std::runtime_error {
public:
    OperationalError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Seeded generator with platform-independent helpers (std distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    std::uint64_t below(std::uint64_t n);
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    double uniform() { return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0); }
    bool bernoulli(const Rational& p);
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }
    template <class T>
    std::vector<T> sample(const std::vector<T>& v, size_t count) {
        std::vector<T> c = v;
        for (size_t i = 0; i < count && i < c.size(); ++i) std::swap(c[i], c[i + below(c.size() - i)]);
        c.resize(std::min(count, c.size()));
        return c;
    }
    std::uint64_t split() { return eng_() ^ 0x9e3779b97f4a7c15ULL; }

private:
    std::mt19937_64 eng_;
};

}  // namespace pcd
