#pragma once

// Shared generators and assertions for the test suite. Random objects are
// seeded per test so failures reproduce.

#include <random>

#include "interferoq/hilbert.hpp"
#include "interferoq/measurement.hpp"

namespace ifq::testing {

inline std::mt19937& rng(unsigned seed = 0) {
    static thread_local std::mt19937 gen(12345);
    if (seed) gen.seed(seed);
    return gen;
}

inline cdouble random_amplitude(std::mt19937& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(g), n(g)};
}

inline StateVector random_state(const HilbertSpec& spec, std::mt19937& g) {
    Vec v(spec.total_dim());
    for (long i = 0; i < v.size(); ++i) v(i) = random_amplitude(g);
    v /= v.norm();
    return StateVector(spec, std::move(v));
}

// Haar-ish unitary from the QR of a Ginibre matrix.
inline Operator random_unitary(const HilbertSpec& spec, std::mt19937& g) {
    long d = spec.total_dim();
    Mat a(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) a(i, j) = random_amplitude(g);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long i = 0; i < d; ++i) {
        cdouble rii = r(i, i);
        q.col(i) *= rii / std::abs(rii);
    }
    return Operator(spec, std::move(q));
}

inline Operator random_hermitian(const HilbertSpec& spec, std::mt19937& g) {
    long d = spec.total_dim();
    Mat a(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) a(i, j) = random_amplitude(g);
    return Operator(spec, 0.5 * (a + a.adjoint()));
}

// Hermitian unitary with +1/-1 eigenspaces of dimensions dplus/dminus, and a
// partner P that swaps paired +/- eigenvectors (so P U P' = -U when balanced).
struct InvolutionPair {
    Operator u;
    Operator p;
};

inline InvolutionPair balanced_involution(const HilbertSpec& spec, std::mt19937& g) {
    long d = spec.total_dim();
    if (d % 2) throw Error("BadIndex", "balanced involution needs even dimension");
    Operator v = random_unitary(spec, g);
    Vec signs(d);
    for (long i = 0; i < d; ++i) signs(i) = (i < d / 2) ? 1.0 : -1.0;
    Mat u = v.m * signs.asDiagonal() * v.m.adjoint();
    Mat swap = Mat::Zero(d, d);
    for (long i = 0; i < d / 2; ++i) {
        swap(i, d / 2 + i) = 1.0;
        swap(d / 2 + i, i) = 1.0;
    }
    Mat p = v.m * swap * v.m.adjoint();
    return {Operator(spec, std::move(u)), Operator(spec, std::move(p))};
}

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// Total-variation distance pairing real-valued outcome keys within key_tol
// (eigenvalue representatives from two different decompositions differ in the
// last few bits).
inline double tv_matched(const OutcomeDistribution& a, const OutcomeDistribution& b,
                         double key_tol = 1e-7) {
    auto near = [&](const OutcomeKey& x, const OutcomeKey& y) {
        if (x.size() != y.size()) return false;
        for (size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > key_tol) return false;
        return true;
    };
    double l1 = 0;
    std::vector<bool> used(b.probs.size(), false);
    for (const auto& [ka, pa] : a.probs) {
        double pb = 0;
        size_t j = 0;
        for (const auto& [kb, q] : b.probs) {
            if (!used[j] && near(ka, kb)) {
                pb = q;
                used[j] = true;
                break;
            }
            ++j;
        }
        l1 += std::abs(pa - pb);
    }
    size_t j = 0;
    for (const auto& [kb, q] : b.probs) {
        if (!used[j]) l1 += std::abs(q);
        ++j;
    }
    return 0.5 * l1;
}

inline double lookup_near(const std::map<double, double>& table, double key, double key_tol = 1e-7) {
    for (const auto& [k, v] : table)
        if (std::abs(k - key) <= key_tol) return v;
    throw Error("LabelMissing", "no table entry near " + std::to_string(key));
}

inline double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

}  // namespace ifq::testing
