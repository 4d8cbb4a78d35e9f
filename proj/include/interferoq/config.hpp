#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ifq {

using cdouble = std::complex<double>;

// All default tolerances live here so tests and docs agree on one set of numbers.
struct Tolerances {
    double norm = 1e-10;           // |norm^2 - 1| bound for normalized states
    double unitary = 1e-10;        // max-entry bound for U'U - I and A - A'
    double sym = 1e-10;            // residual norm outside the symmetric subspace / sector
    double eig = 1e-8;             // eigenvalue grouping width for degenerate observables
    double tail = 1e-12;           // admissible coherent-state mass beyond a mode cutoff
    double deriv_floor = 1e-8;     // minimum |d<signal>/dphi| for a sensitivity estimate
    double equiv_fock = 1e-9;      // equivalence tolerance, exact-arithmetic circuits
    double equiv_coherent = 1e-6;  // equivalence tolerance, truncation-limited circuits
    double dist_sum = 1e-10;       // |sum p - 1| bound on outcome distributions
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

// Hilbert-space size guard; INTERFEROQ_MAX_DIM overrides the default.
inline long max_dimension() {
    static const long limit = [] {
        if (const char* env = std::getenv("INTERFEROQ_MAX_DIM")) {
            long v = std::atol(env);
            if (v > 0) return v;
        }
        return 1L << 24;
    }();
    return limit;
}

class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

// Mode cutoff large enough that a coherent state of amplitude |alpha| keeps its
// Poisson tail below tol().tail, with room for the displaced intermediates the
// coherent-state protocols produce.
inline int cutoff_for_amplitude(double abs_alpha) {
    double a2 = abs_alpha * abs_alpha;
    return static_cast<int>(std::ceil(a2 + 8.0 * abs_alpha + 12.0));
}

// Fock levels near the cutoff where a truncated displacement is not trusted.
inline int displacement_margin(double abs_alpha) {
    return static_cast<int>(std::ceil(4.0 * abs_alpha));
}

}  // namespace ifq
