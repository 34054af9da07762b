#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace spamdet {

inline std::uint64_t hash_mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// Derives an independent stream seed from a base seed plus up to two tags.
/// Used to give every stochastic stage (and every walk/user/... within a
/// stage) its own reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = hash_mix64(base + 0x9e3779b97f4a7c15ULL);
    h = hash_mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = hash_mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
    return h;
}

/// Deterministic RNG: a fully-specified engine plus hand-rolled draws, so the
/// byte stream never depends on the standard library's distribution objects.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n), n >= 1. Lemire multiply-shift.
    std::size_t next_index(std::size_t n) {
        const unsigned __int128 m =
            static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
        return static_cast<std::size_t>(m >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    long long next_int(long long lo, long long hi) {
        return lo + static_cast<long long>(next_index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return next_double() < p; }

    /// Standard normal via Box-Muller (cached spare kept for determinism).
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Vose alias table: O(1) draws from a fixed categorical distribution.
class AliasTable {
public:
    AliasTable() = default;

    explicit AliasTable(const std::vector<double>& weights) { build(weights); }

    void build(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        if (n == 0) return;
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) {
            // all-zero weights: degenerate uniform over indices
            for (std::size_t i = 0; i < n; ++i) {
                prob_[i] = 1.0;
                alias_[i] = static_cast<std::uint32_t>(i);
            }
            return;
        }
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

        std::vector<std::uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            small.pop_back();
            const std::uint32_t l = large.back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        while (!large.empty()) {
            prob_[large.back()] = 1.0;
            alias_[large.back()] = large.back();
            large.pop_back();
        }
        while (!small.empty()) {  // numerical leftovers
            prob_[small.back()] = 1.0;
            alias_[small.back()] = small.back();
            small.pop_back();
        }
    }

    std::size_t sample(Rng& rng) const {
        const std::size_t k = rng.next_index(prob_.size());
        return rng.next_double() < prob_[k] ? k : alias_[k];
    }

    std::size_t size() const { return prob_.size(); }
    bool empty() const { return prob_.empty(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace spamdet
