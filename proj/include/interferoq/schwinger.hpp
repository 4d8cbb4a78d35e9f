#pragma once

// Schwinger dictionary between symmetric N-qubit states and two-mode Fock
// states: Dicke states, angular-momentum operators in both representations,
// and the sector isometry that makes the circuit equivalences checkable.

#include <cmath>
#include <vector>

#include "interferoq/hilbert.hpp"

namespace ifq {

enum class Axis { X, Y, Z };

struct DickeIndex {
    int N;   // particle count >= 1
    int n1;  // qubits in |1>, 0 <= n1 <= N
    int n0() const { return N - n1; }
};

inline StateVector fock_state(int n, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 1 || mode_spec.at(0).kind != WireKind::Mode)
        throw Error("SpecMismatch", "fock_state needs a single mode spec");
    if (n < 0 || n >= mode_spec.at(0).dim) throw Error("CutoffExceeded", "Fock level beyond cutoff");
    return StateVector::basis(mode_spec, n);
}

inline StateVector fock_state(int n0, int n1, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 2 || mode_spec.at(0).kind != WireKind::Mode ||
        mode_spec.at(1).kind != WireKind::Mode)
        throw Error("SpecMismatch", "fock_state needs a two-mode spec");
    if (n0 < 0 || n0 >= mode_spec.at(0).dim || n1 < 0 || n1 >= mode_spec.at(1).dim)
        throw Error("CutoffExceeded", "Fock level beyond cutoff");
    return StateVector::basis(mode_spec, {n0, n1});
}

// Truncated coherent state, renormalized (the discarded tail is below
// tol().tail for cutoffs chosen by cutoff_for_amplitude).
inline StateVector coherent_state(cdouble alpha, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 1 || mode_spec.at(0).kind != WireKind::Mode)
        throw Error("SpecMismatch", "coherent_state needs a single mode spec");
    int d = mode_spec.at(0).dim;
    Vec v(d);
    cdouble term = std::exp(-0.5 * std::norm(alpha));
    v(0) = term;
    for (int n = 1; n < d; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = term;
    }
    v /= v.norm();
    return StateVector(mode_spec, std::move(v));
}

inline StateVector dicke_state(const DickeIndex& idx) {
    if (idx.N < 1 || idx.n1 < 0 || idx.n1 > idx.N) throw Error("BadIndex", "invalid Dicke index");
    HilbertSpec spec = HilbertSpec::qubits(idx.N);
    Vec v = Vec::Zero(spec.total_dim());
    double lognorm = 0.5 * (std::lgamma(idx.n0() + 1.0) + std::lgamma(idx.n1 + 1.0) - std::lgamma(idx.N + 1.0));
    double coeff = std::exp(lognorm);
    for (long s = 0; s < spec.total_dim(); ++s) {
        int ones = 0;
        for (int b = 0; b < idx.N; ++b) ones += (s >> b) & 1;
        if (ones == idx.n1) v(s) = coeff;
    }
    return StateVector(spec, std::move(v));
}

inline Operator j_qubits(Axis axis, int N) {
    HilbertSpec spec = HilbertSpec::qubits(N);
    Mat sigma(2, 2);
    switch (axis) {
        case Axis::X: sigma << 0, 1, 1, 0; break;
        case Axis::Y: sigma << 0, cdouble(0, -1), cdouble(0, 1), 0; break;
        case Axis::Z: sigma << 1, 0, 0, -1; break;
    }
    Mat total = Mat::Zero(spec.total_dim(), spec.total_dim());
    for (int q = 0; q < N; ++q) {
        Mat term = Mat::Identity(1, 1);
        for (int j = 0; j < N; ++j) term = kron(term, j == q ? sigma : Mat::Identity(2, 2));
        total += term;
    }
    return Operator(spec, 0.5 * total);
}

inline Operator j_modes(Axis axis, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 2) throw Error("SpecMismatch", "Schwinger operators need two modes");
    int d0 = mode_spec.at(0).dim, d1 = mode_spec.at(1).dim;
    long D = mode_spec.total_dim();
    auto idx = [&](int n0, int n1) { return static_cast<long>(n0) * d1 + n1; };
    Mat m = Mat::Zero(D, D);
    if (axis == Axis::Z) {
        for (int n0 = 0; n0 < d0; ++n0)
            for (int n1 = 0; n1 < d1; ++n1) m(idx(n0, n1), idx(n0, n1)) = 0.5 * (n0 - n1);
        return Operator(mode_spec, std::move(m));
    }
    // raising part a'b: |n0,n1> -> sqrt((n0+1) n1) |n0+1, n1-1>
    for (int n0 = 0; n0 + 1 < d0; ++n0)
        for (int n1 = 1; n1 < d1; ++n1) {
            double amp = std::sqrt(static_cast<double>(n0 + 1) * n1);
            if (axis == Axis::X) {
                m(idx(n0 + 1, n1 - 1), idx(n0, n1)) += 0.5 * amp;
                m(idx(n0, n1), idx(n0 + 1, n1 - 1)) += 0.5 * amp;
            } else {
                m(idx(n0 + 1, n1 - 1), idx(n0, n1)) += cdouble(0, -0.5) * amp;
                m(idx(n0, n1), idx(n0 + 1, n1 - 1)) += cdouble(0, 0.5) * amp;
            }
        }
    return Operator(mode_spec, std::move(m));
}

// Isometry between the symmetric subspace of N qubits and the N-photon sector
// of two modes; sector basis ordered by n1 ascending.
class SectorMap {
  public:
    SectorMap(int N, int cutoff0, int cutoff1)
        : N_(N), qubit_spec_(HilbertSpec::qubits(N)), mode_spec_(HilbertSpec::modes(cutoff0, cutoff1)) {
        if (cutoff0 < N || cutoff1 < N) throw Error("CutoffExceeded", "sector map needs cutoffs >= N");
        iso_ = Mat::Zero(N + 1, qubit_spec_.total_dim());
        for (int n1 = 0; n1 <= N; ++n1) iso_.row(n1) = dicke_state({N, n1}).amps.adjoint();
    }
    explicit SectorMap(int N) : SectorMap(N, N, N) {}

    int N() const { return N_; }
    const HilbertSpec& qubit_spec() const { return qubit_spec_; }
    const HilbertSpec& mode_spec() const { return mode_spec_; }
    const Mat& isometry() const { return iso_; }

    long sector_index(int n1) const {
        return static_cast<long>(N_ - n1) * mode_spec_.at(1).dim + n1;
    }

    StateVector symmetric_to_modes(const StateVector& psi) const {
        if (psi.spec != qubit_spec_) throw Error("SpecMismatch", "state is not on the N-qubit spec");
        Vec coeffs = iso_ * psi.amps;
        double residual2 = psi.amps.squaredNorm() - coeffs.squaredNorm();
        if (residual2 > tol().sym)
            throw Error("NonSymmetricInput", "residual norm^2 outside symmetric subspace: " +
                                                 std::to_string(residual2));
        Vec out = Vec::Zero(mode_spec_.total_dim());
        for (int n1 = 0; n1 <= N_; ++n1) out(sector_index(n1)) = coeffs(n1);
        StateVector sv = StateVector::raw(mode_spec_, std::move(out));
        sv.normalized = psi.normalized;
        return sv;
    }

    StateVector modes_to_symmetric(const StateVector& psi) const {
        if (psi.spec != mode_spec_) throw Error("SpecMismatch", "state is not on the two-mode spec");
        Vec coeffs(N_ + 1);
        for (int n1 = 0; n1 <= N_; ++n1) coeffs(n1) = psi.amps(sector_index(n1));
        double residual2 = psi.amps.squaredNorm() - coeffs.squaredNorm();
        if (residual2 > tol().sym)
            throw Error("NotInSector", "residual norm^2 outside the N-photon sector: " +
                                           std::to_string(residual2));
        Vec out = iso_.adjoint() * coeffs;
        StateVector sv = StateVector::raw(qubit_spec_, std::move(out));
        sv.normalized = psi.normalized;
        return sv;
    }

    // (N+1)x(N+1) restriction of a symmetric N-qubit operator to the sector basis.
    Mat restrict_qubit_operator(const Operator& op) const {
        if (op.spec != qubit_spec_) throw Error("SpecMismatch", "operator is not on the N-qubit spec");
        return iso_ * op.m * iso_.adjoint();
    }

    // (N+1)x(N+1) restriction of a two-mode operator to the N-photon sector.
    Mat restrict_mode_operator(const Operator& op) const {
        if (op.spec != mode_spec_) throw Error("SpecMismatch", "operator is not on the two-mode spec");
        Mat r(N_ + 1, N_ + 1);
        for (int i = 0; i <= N_; ++i)
            for (int j = 0; j <= N_; ++j) r(i, j) = op.m(sector_index(i), sector_index(j));
        return r;
    }

  private:
    int N_;
    HilbertSpec qubit_spec_;
    HilbertSpec mode_spec_;
    Mat iso_;
};

}  // namespace ifq
