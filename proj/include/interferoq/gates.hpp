#pragma once

// Constructors for the paper's gate set on qubit wires, mode wires, and mixed
// qubit-mode wires, plus the serializable GateSpec the circuit IR carries.

#include <memory>

#include "interferoq/hilbert.hpp"
#include "interferoq/schwinger.hpp"

namespace ifq {

// Angle that may depend on the circuit's phase parameter: value = c + k*phi.
struct Angle {
    double c = 0.0;
    double k = 0.0;
    double at(double phi) const { return c + k * phi; }
    bool symbolic() const { return k != 0.0; }
    bool operator==(const Angle&) const = default;
};

inline Angle phi_angle(double k = 1.0) { return Angle{0.0, k}; }

inline Operator pauli_x() { Mat m(2, 2); m << 0, 1, 1, 0; return Operator(HilbertSpec::qubit(), m); }
inline Operator pauli_y() { Mat m(2, 2); m << 0, cdouble(0, -1), cdouble(0, 1), 0; return Operator(HilbertSpec::qubit(), m); }
inline Operator pauli_z() { Mat m(2, 2); m << 1, 0, 0, -1; return Operator(HilbertSpec::qubit(), m); }
inline Operator hadamard() { Mat m(2, 2); m << 1, 1, 1, -1; return Operator(HilbertSpec::qubit(), m / std::sqrt(2.0)); }
inline Operator s_gate() { Mat m(2, 2); m << 1, 0, 0, cdouble(0, 1); return Operator(HilbertSpec::qubit(), m); }

// diag(1, e^{i theta}) = e^{i theta/2} e^{-iZ theta/2}; theta = pi/2 is the S gate.
inline Operator qubit_phase(double theta) {
    Mat m(2, 2);
    m << 1, 0, 0, std::exp(cdouble(0, theta));
    return Operator(HilbertSpec::qubit(), m);
}

// M = cos(theta/2) I - i sin(theta/2) n.sigma on a single qubit.
inline Operator rotation_qubit(double nx, double ny, double nz, double theta) {
    double n2 = nx * nx + ny * ny + nz * nz;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw Error("NonUnitAxis", "rotation axis must be unit length");
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat m(2, 2);
    m << cdouble(c, -nz * s), cdouble(-ny * s, -nx * s),
         cdouble(ny * s, -nx * s), cdouble(c, nz * s);
    return Operator(HilbertSpec::qubit(), m);
}

// e^{-i J.n theta} on two truncated modes, built block-by-block across
// photon-number sectors (the generator preserves total photon number).
inline Operator rotation_modes(double nx, double ny, double nz, double theta, const HilbertSpec& mode_spec) {
    double n2 = nx * nx + ny * ny + nz * nz;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) throw Error("NonUnitAxis", "rotation axis must be unit length");
    if (mode_spec.count() != 2 || mode_spec.at(0).kind != WireKind::Mode || mode_spec.at(1).kind != WireKind::Mode)
        throw Error("SpecMismatch", "rotation_modes needs a two-mode spec");
    int d0 = mode_spec.at(0).dim, d1 = mode_spec.at(1).dim;
    auto flat = [&](int n0, int n1) { return static_cast<long>(n0) * d1 + n1; };
    Mat out = Mat::Zero(mode_spec.total_dim(), mode_spec.total_dim());
    for (int s = 0; s <= (d0 - 1) + (d1 - 1); ++s) {
        int lo = std::max(0, s - (d1 - 1)), hi = std::min(s, d0 - 1);
        int dim = hi - lo + 1;
        Mat h = Mat::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
            int n0 = lo + i, n1 = s - n0;
            h(i, i) = nz * 0.5 * (n0 - n1);
            if (i + 1 < dim) {
                // a'b raising amplitude within the sector
                double amp = 0.5 * std::sqrt(static_cast<double>(n0 + 1) * n1);
                h(i + 1, i) += cdouble(nx, -ny) * amp;
                h(i, i + 1) += cdouble(nx, ny) * amp;
            }
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        Mat block = es.eigenvectors() *
                    (es.eigenvalues().array() * cdouble(0, -theta)).exp().matrix().asDiagonal() *
                    es.eigenvectors().adjoint();
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out(flat(lo + i, s - lo - i), flat(lo + j, s - lo - j)) = block(i, j);
    }
    return Operator(mode_spec, std::move(out));
}

// 50/50 beamsplitter: pi/2 rotation about the equatorial axis at angle phi_bs.
inline Operator beamsplitter(double phi_bs, const HilbertSpec& mode_spec) {
    return rotation_modes(std::cos(phi_bs), std::sin(phi_bs), 0.0, M_PI / 2, mode_spec);
}

inline Operator phase_shifter(double phi, int mode_dim) {
    Mat m = Mat::Zero(mode_dim, mode_dim);
    for (int n = 0; n < mode_dim; ++n) m(n, n) = std::exp(cdouble(0, -phi * n));
    return Operator(HilbertSpec::mode(mode_dim - 1), std::move(m));
}

inline Operator parity(int mode_dim) {
    Mat m = Mat::Zero(mode_dim, mode_dim);
    for (int n = 0; n < mode_dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return Operator(HilbertSpec::mode(mode_dim - 1), std::move(m));
}

inline double poisson_tail_beyond(double mean, int dim) {
    double term = std::exp(-mean), cum = term;
    for (int n = 1; n < dim; ++n) {
        term *= mean / n;
        cum += term;
    }
    return std::max(0.0, 1.0 - cum);
}

// exp(alpha a' - alpha* a) on the truncated space, via eigendecomposition of
// the Hermitian generator (exactly unitary; trusted below cutoff - margin).
inline Operator displacement(cdouble alpha, int mode_dim) {
    if (poisson_tail_beyond(std::norm(alpha), mode_dim) >= tol().tail)
        throw Error("CutoffTooSmall", "coherent tail mass beyond cutoff exceeds tail tolerance");
    Mat h = Mat::Zero(mode_dim, mode_dim);
    for (int n = 0; n + 1 < mode_dim; ++n) {
        double r = std::sqrt(static_cast<double>(n + 1));
        h(n + 1, n) = cdouble(0, -1) * alpha * r;        // -i alpha a'
        h(n, n + 1) = cdouble(0, 1) * std::conj(alpha) * r;  // +i alpha* a
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat d = es.eigenvectors() *
            (es.eigenvalues().array() * cdouble(0, 1)).exp().matrix().asDiagonal() *
            es.eigenvectors().adjoint();
    return Operator(HilbertSpec::mode(mode_dim - 1), std::move(d));
}

inline Operator self_kerr(double theta_k, int mode_dim) {
    Mat m = Mat::Zero(mode_dim, mode_dim);
    for (int n = 0; n < mode_dim; ++n) m(n, n) = std::exp(cdouble(0, -theta_k * n * n));
    return Operator(HilbertSpec::mode(mode_dim - 1), std::move(m));
}

inline Operator cross_kerr(double theta_k, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 2) throw Error("SpecMismatch", "cross_kerr needs a two-mode spec");
    int d0 = mode_spec.at(0).dim, d1 = mode_spec.at(1).dim;
    Mat m = Mat::Zero(mode_spec.total_dim(), mode_spec.total_dim());
    for (int n0 = 0; n0 < d0; ++n0)
        for (int n1 = 0; n1 < d1; ++n1) {
            long i = static_cast<long>(n0) * d1 + n1;
            m(i, i) = std::exp(cdouble(0, -theta_k * n0 * n1));
        }
    return Operator(mode_spec, std::move(m));
}

enum class SubspaceKind { X, Z, H };

// X_N / Z_N / H_N acting in the modal "qubit" subspace span{|0>, |N>},
// identity on every other Fock level.
inline Operator subspace_gate(SubspaceKind kind, int N, int mode_dim) {
    if (N < 1 || N >= mode_dim) throw Error("CutoffExceeded", "subspace level N exceeds cutoff");
    Mat m = Mat::Identity(mode_dim, mode_dim);
    switch (kind) {
        case SubspaceKind::X:
            m(0, 0) = 0; m(N, N) = 0; m(0, N) = 1; m(N, 0) = 1;
            break;
        case SubspaceKind::Z:
            m(N, N) = -1;
            break;
        case SubspaceKind::H: {
            double r = 1.0 / std::sqrt(2.0);
            m(0, 0) = r; m(0, N) = r; m(N, 0) = r; m(N, N) = -r;
            break;
        }
    }
    return Operator(HilbertSpec::mode(mode_dim - 1), std::move(m));
}

// Two-mode P_N: +1 on |N,0>, -1 on |0,N>, identity elsewhere (Fig. 14 form).
inline Operator subspace_p(int N, const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 2) throw Error("SpecMismatch", "subspace_p needs a two-mode spec");
    int d0 = mode_spec.at(0).dim, d1 = mode_spec.at(1).dim;
    if (N >= d0 || N >= d1) throw Error("CutoffExceeded", "subspace level N exceeds cutoff");
    Mat m = Mat::Identity(mode_spec.total_dim(), mode_spec.total_dim());
    m(static_cast<long>(0) * d1 + N, static_cast<long>(0) * d1 + N) = -1;
    return Operator(mode_spec, std::move(m));
}

// |n0,n1> -> |n1,n0>; equals i^N e^{-i J_x pi} on every complete sector.
inline Operator modal_swap(const HilbertSpec& mode_spec) {
    if (mode_spec.count() != 2) throw Error("SpecMismatch", "modal_swap needs a two-mode spec");
    int d0 = mode_spec.at(0).dim, d1 = mode_spec.at(1).dim;
    if (d0 != d1) throw Error("UnequalCutoffs", "modal swap needs equal mode cutoffs");
    Mat m = Mat::Zero(mode_spec.total_dim(), mode_spec.total_dim());
    for (int n0 = 0; n0 < d0; ++n0)
        for (int n1 = 0; n1 < d1; ++n1) m(static_cast<long>(n1) * d1 + n0, static_cast<long>(n0) * d1 + n1) = 1.0;
    return Operator(mode_spec, std::move(m));
}

// |c><c| (x) inner + |1-c><1-c| (x) I, control wire first.
inline Operator controlled(const Operator& inner, int control_value) {
    if (control_value != 0 && control_value != 1) throw Error("BadControl", "control value must be 0 or 1");
    HilbertSpec spec = HilbertSpec::qubit().concat(inner.spec);
    long d = inner.spec.total_dim();
    Mat m = Mat::Zero(2 * d, 2 * d);
    m.block(0, 0, d, d) = control_value == 0 ? inner.m : Mat::Identity(d, d);
    m.block(d, d, d, d) = control_value == 1 ? inner.m : Mat::Identity(d, d);
    return Operator(spec, std::move(m));
}

// ---------------------------------------------------------------------------
// Serializable gate description used by the circuit IR.

struct GateSpec {
    enum class Kind {
        PauliX, PauliY, PauliZ, Hadamard, SGate, QubitPhase, Rotation,
        RotationModes, Beamsplitter, PhaseShift, Displacement, Parity,
        SelfKerr, CrossKerr, SubspaceX, SubspaceZ, SubspaceH, SubspaceP,
        ModalSwap, Raw
    };
    Kind kind{};
    double nx = 0, ny = 0, nz = 0;
    Angle theta{};
    cdouble alpha{};
    int level = 0;
    std::shared_ptr<const Operator> raw;  // Kind::Raw only; not serializable

    static GateSpec simple(Kind k) { return GateSpec{k}; }
    static GateSpec rotation(double nx, double ny, double nz, Angle th) {
        GateSpec g{Kind::Rotation}; g.nx = nx; g.ny = ny; g.nz = nz; g.theta = th; return g;
    }
    static GateSpec rotation_modes(double nx, double ny, double nz, Angle th) {
        GateSpec g{Kind::RotationModes}; g.nx = nx; g.ny = ny; g.nz = nz; g.theta = th; return g;
    }
    static GateSpec beamsplitter(double phi_bs) { GateSpec g{Kind::Beamsplitter}; g.theta = Angle{phi_bs, 0}; return g; }
    static GateSpec phase_shift(Angle th) { GateSpec g{Kind::PhaseShift}; g.theta = th; return g; }
    static GateSpec displacement(cdouble a) { GateSpec g{Kind::Displacement}; g.alpha = a; return g; }
    static GateSpec self_kerr(double th) { GateSpec g{Kind::SelfKerr}; g.theta = Angle{th, 0}; return g; }
    static GateSpec cross_kerr(double th) { GateSpec g{Kind::CrossKerr}; g.theta = Angle{th, 0}; return g; }
    static GateSpec subspace(Kind k, int level) { GateSpec g{k}; g.level = level; return g; }
    static GateSpec qubit_phase(Angle th) { GateSpec g{Kind::QubitPhase}; g.theta = th; return g; }
    static GateSpec raw_gate(Operator op) {
        GateSpec g{Kind::Raw};
        g.raw = std::make_shared<Operator>(std::move(op));
        return g;
    }

    int arity() const {
        switch (kind) {
            case Kind::RotationModes: case Kind::Beamsplitter: case Kind::CrossKerr:
            case Kind::SubspaceP: case Kind::ModalSwap:
                return 2;
            case Kind::Raw:
                return raw->spec.count();
            default:
                return 1;
        }
    }

    bool operator==(const GateSpec& o) const {
        if (kind != o.kind || nx != o.nx || ny != o.ny || nz != o.nz || !(theta == o.theta) ||
            alpha != o.alpha || level != o.level)
            return false;
        if (!raw != !o.raw) return false;
        if (raw && (raw->spec != o.raw->spec || raw->m != o.raw->m)) return false;
        return true;
    }

    bool symbolic() const { return theta.symbolic(); }

    // Concrete operator on the given target spec with phi bound.
    Operator realize(const HilbertSpec& targets, double phi) const {
        double th = theta.at(phi);
        switch (kind) {
            case Kind::PauliX: require_qubit(targets); return pauli_x();
            case Kind::PauliY: require_qubit(targets); return pauli_y();
            case Kind::PauliZ: require_qubit(targets); return pauli_z();
            case Kind::Hadamard: require_qubit(targets); return hadamard();
            case Kind::SGate: require_qubit(targets); return s_gate();
            case Kind::QubitPhase: require_qubit(targets); return ifq::qubit_phase(th);
            case Kind::Rotation: require_qubit(targets); return rotation_qubit(nx, ny, nz, th);
            case Kind::RotationModes: return ifq::rotation_modes(nx, ny, nz, th, targets);
            case Kind::Beamsplitter: return ifq::beamsplitter(theta.c, targets);
            case Kind::PhaseShift: return phase_shifter(th, mode_dim(targets));
            case Kind::Displacement: return ifq::displacement(alpha, mode_dim(targets));
            case Kind::Parity: return ifq::parity(mode_dim(targets));
            case Kind::SelfKerr: return ifq::self_kerr(th, mode_dim(targets));
            case Kind::CrossKerr: return ifq::cross_kerr(th, targets);
            case Kind::SubspaceX: return subspace_gate(SubspaceKind::X, level, mode_dim(targets));
            case Kind::SubspaceZ: return subspace_gate(SubspaceKind::Z, level, mode_dim(targets));
            case Kind::SubspaceH: return subspace_gate(SubspaceKind::H, level, mode_dim(targets));
            case Kind::SubspaceP: return subspace_p(level, targets);
            case Kind::ModalSwap: return ifq::modal_swap(targets);
            case Kind::Raw:
                if (raw->spec != targets) throw Error("SpecMismatch", "raw gate spec does not match targets");
                return *raw;
        }
        throw Error("BadGate", "unknown gate kind");
    }

  private:
    static void require_qubit(const HilbertSpec& s) {
        if (s.count() != 1 || s.at(0).kind != WireKind::Qubit)
            throw Error("WireKindMismatch", "qubit gate applied to a non-qubit wire");
    }
    static int mode_dim(const HilbertSpec& s) {
        if (s.count() != 1 || s.at(0).kind != WireKind::Mode)
            throw Error("WireKindMismatch", "mode gate applied to a non-mode wire");
        return s.at(0).dim;
    }
};

}  // namespace ifq
