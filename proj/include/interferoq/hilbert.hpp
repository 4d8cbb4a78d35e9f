#pragma once

// Dense complex linear algebra over tensor products of qubits and truncated
// bosonic modes. Values are immutable after construction; every operation is a
// pure function.

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "interferoq/config.hpp"

namespace ifq {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

enum class WireKind { Qubit, Mode };

struct Subsystem {
    WireKind kind;
    int dim;  // 2 for qubits, cutoff+1 for modes
    bool operator==(const Subsystem&) const = default;
};

class HilbertSpec {
  public:
    HilbertSpec() = default;
    explicit HilbertSpec(std::vector<Subsystem> subs) : subs_(std::move(subs)) {
        long d = 1;
        for (const auto& s : subs_) {
            if (s.kind == WireKind::Qubit && s.dim != 2)
                throw Error("BadSubsystem", "qubit must have dim 2");
            if (s.kind == WireKind::Mode && s.dim < 2)
                throw Error("BadSubsystem", "mode dim must be >= 2 (cutoff >= 1)");
            if (s.dim < 1) throw Error("BadSubsystem", "dim must be positive");
            if (d > max_dimension() / s.dim)
                throw Error("DimensionLimit", "total dimension exceeds limit " +
                                                  std::to_string(max_dimension()));
            d *= s.dim;
        }
        total_ = d;
    }

    static HilbertSpec qubit() { return HilbertSpec({{WireKind::Qubit, 2}}); }
    static HilbertSpec qubits(int n) {
        return HilbertSpec(std::vector<Subsystem>(n, {WireKind::Qubit, 2}));
    }
    static HilbertSpec mode(int cutoff) { return HilbertSpec({{WireKind::Mode, cutoff + 1}}); }
    static HilbertSpec modes(int cutoff0, int cutoff1) {
        return HilbertSpec({{WireKind::Mode, cutoff0 + 1}, {WireKind::Mode, cutoff1 + 1}});
    }

    const std::vector<Subsystem>& subsystems() const { return subs_; }
    int count() const { return static_cast<int>(subs_.size()); }
    const Subsystem& at(int i) const { return subs_.at(i); }
    long total_dim() const { return total_; }

    // Stride of subsystem i with the first subsystem most significant:
    // index = ((i0*d1 + i1)*d2 + i2)*...
    long stride(int i) const {
        long s = 1;
        for (int j = i + 1; j < count(); ++j) s *= subs_[j].dim;
        return s;
    }

    HilbertSpec concat(const HilbertSpec& other) const {
        std::vector<Subsystem> subs = subs_;
        subs.insert(subs.end(), other.subs_.begin(), other.subs_.end());
        return HilbertSpec(std::move(subs));
    }

    HilbertSpec select(const std::vector<int>& targets) const {
        std::vector<Subsystem> subs;
        for (int t : targets) subs.push_back(at(t));
        return HilbertSpec(std::move(subs));
    }

    bool operator==(const HilbertSpec& o) const { return subs_ == o.subs_; }
    bool operator!=(const HilbertSpec& o) const { return !(*this == o); }

  private:
    std::vector<Subsystem> subs_;
    long total_ = 1;
};

struct StateVector {
    HilbertSpec spec;
    Vec amps;
    bool normalized = true;  // false marks explicitly unnormalized intermediates

    StateVector() = default;
    StateVector(HilbertSpec s, Vec a, bool check = true) : spec(std::move(s)), amps(std::move(a)) {
        if (amps.size() != spec.total_dim())
            throw Error("DimMismatch", "amplitude length does not match spec");
        if (check) {
            double n2 = amps.squaredNorm();
            if (std::abs(n2 - 1.0) > tol().norm)
                throw Error("NotNormalized", "norm^2 deviates from 1 by " +
                                                 std::to_string(std::abs(n2 - 1.0)));
        } else {
            normalized = false;
        }
    }

    static StateVector raw(HilbertSpec s, Vec a) { return StateVector(std::move(s), std::move(a), false); }

    static StateVector basis(const HilbertSpec& s, long index) {
        Vec v = Vec::Zero(s.total_dim());
        v(index) = 1.0;
        return StateVector(s, std::move(v));
    }

    // Basis state from per-subsystem digits.
    static StateVector basis(const HilbertSpec& s, const std::vector<int>& digits) {
        long idx = 0;
        for (int i = 0; i < s.count(); ++i) {
            if (digits[i] < 0 || digits[i] >= s.at(i).dim)
                throw Error("DimMismatch", "basis digit out of range");
            idx += digits[i] * s.stride(i);
        }
        return basis(s, idx);
    }

    double norm() const { return amps.norm(); }
};

struct Operator {
    HilbertSpec spec;  // domain = codomain
    Mat m;

    Operator() = default;
    Operator(HilbertSpec s, Mat mat) : spec(std::move(s)), m(std::move(mat)) {
        if (m.rows() != spec.total_dim() || m.cols() != spec.total_dim())
            throw Error("DimMismatch", "matrix shape does not match spec");
    }

    static Operator identity(const HilbertSpec& s) {
        return Operator(s, Mat::Identity(s.total_dim(), s.total_dim()));
    }

    bool is_unitary(double eps = tol().unitary) const {
        Mat d = m.adjoint() * m - Mat::Identity(m.rows(), m.cols());
        return d.cwiseAbs().maxCoeff() <= eps;
    }
    bool is_hermitian(double eps = tol().unitary) const {
        Mat d = m - m.adjoint();
        return d.cwiseAbs().maxCoeff() <= eps;
    }

    Operator dagger() const { return Operator(spec, m.adjoint()); }
};

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    HilbertSpec spec = a.spec.concat(b.spec);
    Vec out(spec.total_dim());
    for (long i = 0; i < a.amps.size(); ++i) out.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
    bool norm_ok = a.normalized && b.normalized;
    return norm_ok ? StateVector(spec, std::move(out)) : StateVector::raw(spec, std::move(out));
}

inline Operator tensor(const Operator& a, const Operator& b) {
    return Operator(a.spec.concat(b.spec), kron(a.m, b.m));
}

namespace detail {

// Index bookkeeping for applying an operator to a subset of subsystems.
struct TargetPlan {
    std::vector<long> target_strides;  // stride per target, operator digit order
    std::vector<int> target_dims;
    long block_dim = 1;             // product of target dims
    std::vector<long> rest_offsets; // base offsets enumerating non-target digits

    TargetPlan(const HilbertSpec& spec, const std::vector<int>& targets) {
        std::vector<bool> is_target(spec.count(), false);
        for (int t : targets) {
            if (t < 0 || t >= spec.count()) throw Error("BadWire", "target out of range");
            if (is_target[t]) throw Error("BadWire", "duplicate target wire");
            is_target[t] = true;
        }
        for (int t : targets) {
            target_strides.push_back(spec.stride(t));
            target_dims.push_back(spec.at(t).dim);
            block_dim *= spec.at(t).dim;
        }
        rest_offsets.assign(1, 0);
        for (int i = spec.count() - 1; i >= 0; --i) {
            if (is_target[i]) continue;
            long stride = spec.stride(i);
            std::vector<long> next;
            next.reserve(rest_offsets.size() * spec.at(i).dim);
            for (int d = 0; d < spec.at(i).dim; ++d)
                for (long off : rest_offsets) next.push_back(off + d * stride);
            rest_offsets.swap(next);
        }
        std::sort(rest_offsets.begin(), rest_offsets.end());
    }

    long gather_offset(long block_index) const {
        long off = 0;
        for (int k = static_cast<int>(target_dims.size()) - 1; k >= 0; --k) {
            off += (block_index % target_dims[k]) * target_strides[k];
            block_index /= target_dims[k];
        }
        return off;
    }
};

}  // namespace detail

// Apply `op` to the listed target subsystems (identity elsewhere). `op.spec`
// must match the targeted subsystems in order, kind and dim.
inline StateVector apply(const Operator& op, const std::vector<int>& targets, const StateVector& state) {
    if (static_cast<int>(targets.size()) != op.spec.count())
        throw Error("DimMismatch", "target count does not match operator arity");
    for (size_t k = 0; k < targets.size(); ++k) {
        const Subsystem& have = state.spec.at(targets[k]);
        const Subsystem& want = op.spec.at(static_cast<int>(k));
        if (have.kind != want.kind)
            throw Error("WireKindMismatch", "operator subsystem kind does not match wire");
        if (have.dim != want.dim) throw Error("DimMismatch", "operator dim does not match wire dim");
    }
    detail::TargetPlan plan(state.spec, targets);
    Vec out = state.amps;
    Vec block(plan.block_dim);
    std::vector<long> offs(plan.block_dim);
    for (long b = 0; b < plan.block_dim; ++b) offs[b] = plan.gather_offset(b);
    for (long base : plan.rest_offsets) {
        for (long b = 0; b < plan.block_dim; ++b) block(b) = state.amps(base + offs[b]);
        Vec res = op.m * block;
        for (long b = 0; b < plan.block_dim; ++b) out(base + offs[b]) = res(b);
    }
    StateVector sv = StateVector::raw(state.spec, std::move(out));
    sv.normalized = state.normalized && op.is_unitary(1e-8);
    return sv;
}

inline cdouble inner_product(const StateVector& a, const StateVector& b) {
    if (a.spec != b.spec) throw Error("SpecMismatch", "inner product of states over different specs");
    return a.amps.dot(b.amps);  // Eigen dot conjugates the left argument
}

struct PhaseComparison {
    bool equal = false;
    std::optional<cdouble> phase;  // unit-modulus c with A ~ c B
    double max_deviation = 0.0;
};

namespace detail {

inline PhaseComparison compare_up_to_phase(const Vec& a, const Vec& b, double eps) {
    PhaseComparison r;
    Eigen::Index imax = 0;
    double bmax = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i)
        if (std::abs(b(i)) > bmax) { bmax = std::abs(b(i)); imax = i; }
    if (bmax == 0.0) {
        r.max_deviation = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
        r.equal = r.max_deviation <= eps;
        return r;
    }
    cdouble c = a(imax) / b(imax);
    if (std::abs(c) == 0.0) c = 1.0; else c /= std::abs(c);
    r.max_deviation = (a - c * b).cwiseAbs().maxCoeff();
    r.equal = r.max_deviation <= eps;
    if (r.equal) r.phase = c;
    return r;
}

}  // namespace detail

inline PhaseComparison equal_up_to_global_phase(const StateVector& a, const StateVector& b, double eps) {
    if (a.spec != b.spec) throw Error("SpecMismatch", "phase comparison over different specs");
    return detail::compare_up_to_phase(a.amps, b.amps, eps);
}

inline PhaseComparison equal_up_to_global_phase(const Operator& a, const Operator& b, double eps) {
    if (a.spec != b.spec) throw Error("SpecMismatch", "phase comparison over different specs");
    Vec av = Eigen::Map<const Vec>(a.m.data(), a.m.size());
    Vec bv = Eigen::Map<const Vec>(b.m.data(), b.m.size());
    return detail::compare_up_to_phase(av, bv, eps);
}

}  // namespace ifq
