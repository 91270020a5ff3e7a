#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gptwatch {

// Seeded generator with portable derived draws. The raw mt19937_64 stream is
// fully specified by the standard; std::uniform_int_distribution is not, so
// bounded draws and shuffles are derived here by rejection sampling to keep
// generated corpora byte-identical across compilers.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    bool chance(double p) {
        return static_cast<double>(below(1u << 24)) < p * static_cast<double>(1u << 24);
    }

    template <class T>
    const T& pick(const std::vector<T>& pool) {
        return pool[static_cast<std::size_t>(below(pool.size()))];
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

    std::string string_from(std::string_view alphabet, std::size_t length) {
        std::string out;
        out.reserve(length);
        for (std::size_t i = 0; i < length; ++i) {
            out.push_back(alphabet[static_cast<std::size_t>(below(alphabet.size()))]);
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gptwatch
