#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace radact {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator wrapping mt19937_64 with hand-rolled distributions so
/// that streams are reproducible independent of the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Decorrelated child seed for a named stream.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
        return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(first[i - 1], first[index(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace radact
