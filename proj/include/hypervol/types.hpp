#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypervol {

using Real = double;
using Complex = std::complex<double>;

// Numeric failure that still carries the best value obtained so far.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what,
                          double best = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), best_estimate(best) {}

    double best_estimate;
};

// Constant-curvature model space. epsilon is the sectional curvature.
enum class Space { Sphere, Hyperbolic };

constexpr int epsilon_of(Space s) { return s == Space::Sphere ? 1 : -1; }

inline std::string to_string(Space s) { return s == Space::Sphere ? "sphere" : "hyperbolic"; }

inline Space space_from_string(const std::string& s) {
    if (s == "sphere") return Space::Sphere;
    if (s == "hyperbolic") return Space::Hyperbolic;
    throw std::invalid_argument("unknown space '" + s + "' (expected sphere|hyperbolic)");
}

// Index sets are strictly increasing subsets of {0..n}.
using IndexSet = std::vector<int>;

inline bool is_valid_index_set(const IndexSet& I, int size) {
    int prev = -1;
    for (int i : I) {
        if (i <= prev || i >= size) return false;
        prev = i;
    }
    return true;
}

inline std::uint32_t mask_of(const IndexSet& I) {
    std::uint32_t m = 0;
    for (int i : I) m |= (1u << i);
    return m;
}

inline IndexSet set_of(std::uint32_t mask) {
    IndexSet I;
    for (int i = 0; mask >> i; ++i)
        if ((mask >> i) & 1u) I.push_back(i);
    return I;
}

inline int set_size(std::uint32_t mask) { return std::popcount(mask); }

inline std::string index_set_label(const IndexSet& I) {
    std::string s = "{";
    for (size_t i = 0; i < I.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(I[i]);
    }
    return s + "}";
}

// One irreducible component of the vanishing locus of the principal minors:
// D_I = 0 for |I| >= 3, or 1 +/- c_jk = 0 for |I| = 2 (sign = +1 resolves the
// factor 1 + c, sign = -1 the factor 1 - c). sign == 0 means unsigned and is
// valid only for |I| >= 3.
struct HypersurfaceId {
    IndexSet indices;
    int sign = 0;

    bool operator==(const HypersurfaceId& o) const {
        return indices == o.indices && sign == o.sign;
    }
    bool operator<(const HypersurfaceId& o) const {
        if (indices != o.indices) return indices < o.indices;
        return sign < o.sign;
    }

    std::string label() const {
        std::string s = "D" + index_set_label(indices);
        if (sign > 0) s += "+";
        if (sign < 0) s += "-";
        return s;
    }
};

enum class ChamberKind { SphericalSimplex, HyperbolicSimplex, OnHypersurface, OtherReal, NonReal };

struct DomainClass {
    ChamberKind kind = ChamberKind::OtherReal;
    // Non-empty exactly when kind == OnHypersurface.
    std::vector<HypersurfaceId> components;
};

inline std::string to_string(ChamberKind k) {
    switch (k) {
        case ChamberKind::SphericalSimplex: return "spherical_simplex";
        case ChamberKind::HyperbolicSimplex: return "hyperbolic_simplex";
        case ChamberKind::OnHypersurface: return "on_hypersurface";
        case ChamberKind::OtherReal: return "other_real";
        case ChamberKind::NonReal: return "non_real";
    }
    return "?";
}

// Execution policy for the data-parallel kernels. Parallel and Serial produce
// bitwise-identical results; Parallel uses OpenMP when compiled in.
enum class Exec { Serial, Parallel };

inline Exec default_exec() {
#ifdef HYPERVOL_HAVE_OPENMP
    return Exec::Parallel;
#else
    return Exec::Serial;
#endif
}

// SplitMix64: deterministic generator used for reproducible sampling. Streams
// derived from (seed, index) are independent of thread schedule.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal() {
        // Box-Muller, one value per call.
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    g.next();
    g.next();
    return g;
}

}  // namespace hypervol
