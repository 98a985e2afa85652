#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "intersim/prng.hpp"

namespace intersim {

enum class ArrivalKind { poisson, matern };

struct ArrivalProcessSpec {
    ArrivalKind kind = ArrivalKind::matern;
    double lambda = 1.0;      // underlying Poisson rate [1/s]
    double hard_core_b = 0.2; // Matérn hard-core distance [s]
    double horizon = 0.0;     // [s]
    std::uint64_t seed = 0;
};

// Homogeneous Poisson process on [0, horizon). Exponential gaps from the
// times substream of `seed`; identical (lambda, horizon, seed) give
// identical sequences.
inline std::vector<double> sample_poisson(double lambda, double horizon,
                                          std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_poisson: lambda must be > 0");
    std::vector<double> out;
    Prng rng(seed, /*tag=*/0x706f6973ULL);
    double t = rng.exponential(lambda);
    while (t < horizon) {
        out.push_back(t);
        t += rng.exponential(lambda);
    }
    return out;
}

// Matérn type-II hard-core process: a marked Poisson process where a point
// is deleted iff some point within distance b carries a larger mark.
// Sampled on the extended window [-b, horizon + b) and cropped so that
// points near the edges face full competition. Mark ties (probability
// zero) are broken in favor of the earlier point.
inline std::vector<double> sample_matern(double lambda, double b, double horizon,
                                         std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_matern: lambda must be > 0");
    if (!(b > 0.0)) throw std::invalid_argument("sample_matern: b must be > 0");
    Prng times_rng(seed, 0x6d74696dULL);
    Prng marks_rng(seed, 0x6d6d726bULL);

    std::vector<double> pts;
    std::vector<double> marks;
    double t = -b + times_rng.exponential(lambda);
    while (t < horizon + b) {
        pts.push_back(t);
        marks.push_back(marks_rng.uniform());
        t += times_rng.exponential(lambda);
    }

    std::vector<double> out;
    out.reserve(pts.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (pts[i] < 0.0 || pts[i] >= horizon) continue;
        bool deleted = false;
        for (std::ptrdiff_t j = i - 1; j >= 0 && pts[i] - pts[j] <= b; --j) {
            if (marks[j] > marks[i] || (marks[j] == marks[i] && pts[j] < pts[i])) {
                deleted = true;
                break;
            }
        }
        if (!deleted) {
            for (std::ptrdiff_t j = i + 1; j < n && pts[j] - pts[i] <= b; ++j) {
                if (marks[j] > marks[i]) {
                    deleted = true;
                    break;
                }
            }
        }
        if (!deleted) out.push_back(pts[i]);
    }
    return out;
}

// Intensity of the Matérn (type II) process obtained by thinning a Poisson
// process of rate lambda with hard-core distance b, in one dimension.
inline double matern_intensity(double lambda, double b) {
    if (lambda < 0.0) throw std::invalid_argument("matern_intensity: lambda must be >= 0");
    if (!(b > 0.0)) throw std::invalid_argument("matern_intensity: b must be > 0");
    if (lambda == 0.0) return 0.0;
    return (1.0 - std::exp(-2.0 * lambda * b)) / (2.0 * b);
}

// Inverse of matern_intensity in lambda. The intensity saturates at
// 1/(2b); targets at or above that are unreachable.
inline double matern_rate_for_intensity(double intensity, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("matern_rate_for_intensity: b must be > 0");
    if (intensity < 0.0) throw std::invalid_argument("matern_rate_for_intensity: intensity must be >= 0");
    if (intensity == 0.0) return 0.0;
    double cap = 1.0 / (2.0 * b);
    if (intensity >= cap)
        throw std::invalid_argument(
            "matern_rate_for_intensity: target intensity >= 1/(2b) is unreachable");
    return -std::log(1.0 - intensity / cap) / (2.0 * b);
}

inline std::vector<double> sample_arrivals(const ArrivalProcessSpec& spec) {
    if (spec.kind == ArrivalKind::poisson)
        return sample_poisson(spec.lambda, spec.horizon, spec.seed);
    return sample_matern(spec.lambda, spec.hard_core_b, spec.horizon, spec.seed);
}

} // namespace intersim
