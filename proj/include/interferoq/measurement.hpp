#pragma once

// Measurement semantics: outcome distributions for observables and photon
// counting, classical post-processing gates, and the measurement-rewrite
// helpers (conjugated observables, outcome permutations, X_N and modal-SWAP
// measurements).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interferoq/gates.hpp"
#include "interferoq/hilbert.hpp"

namespace ifq {

using OutcomeKey = std::vector<double>;

struct OutcomeDistribution {
    std::vector<std::string> labels;
    std::map<OutcomeKey, double> probs;
    std::map<OutcomeKey, StateVector> conditional_states;
    double dropped_mass = 0.0;

    double total() const {
        double s = 0;
        for (const auto& [k, p] : probs) s += p;
        return s;
    }

    void check_normalization() const {
        for (const auto& [k, p] : probs)
            if (p < -1e-14) throw Error("NegativeProbability", "probability below -1e-14");
        if (std::abs(total() + dropped_mass - 1.0) > tol().dist_sum)
            throw Error("NotADistribution", "probabilities sum to " + std::to_string(total()));
    }

    int label_index(const std::string& label) const {
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<int>(i);
        throw Error("LabelMissing", "no classical wire labeled '" + label + "'");
    }

    OutcomeDistribution marginal(const std::vector<std::string>& keep) const {
        std::vector<int> idx;
        for (const auto& l : keep) idx.push_back(label_index(l));
        OutcomeDistribution out;
        out.labels = keep;
        out.dropped_mass = dropped_mass;
        for (const auto& [k, p] : probs) {
            OutcomeKey key;
            for (int i : idx) key.push_back(k[i]);
            out.probs[key] += p;
        }
        return out;
    }

    // Conditional distribution of `target` given fixed values on `given`.
    std::map<OutcomeKey, OutcomeDistribution> slices(const std::vector<std::string>& given,
                                                     const std::vector<std::string>& target) const {
        std::vector<int> gi, ti;
        for (const auto& l : given) gi.push_back(label_index(l));
        for (const auto& l : target) ti.push_back(label_index(l));
        std::map<OutcomeKey, OutcomeDistribution> out;
        std::map<OutcomeKey, double> mass;
        for (const auto& [k, p] : probs) {
            OutcomeKey g, t;
            for (int i : gi) g.push_back(k[i]);
            for (int i : ti) t.push_back(k[i]);
            auto& slice = out[g];
            slice.labels = target;
            slice.probs[t] += p;
            mass[g] += p;
        }
        for (auto& [g, d] : out) {
            if (mass[g] <= 0) continue;
            for (auto& [t, p] : d.probs) p /= mass[g];
        }
        return out;
    }

    double mean(const std::string& label) const {
        int i = label_index(label);
        double m = 0;
        for (const auto& [k, p] : probs) m += k[i] * p;
        return m;
    }

    double variance(const std::string& label) const {
        int i = label_index(label);
        double m = mean(label), v = 0;
        for (const auto& [k, p] : probs) v += (k[i] - m) * (k[i] - m) * p;
        return v;
    }

    double prob_of(const OutcomeKey& key) const {
        auto it = probs.find(key);
        return it == probs.end() ? 0.0 : it->second;
    }
};

// Total-variation distance between distributions over the same labels.
inline double tv_distance(const OutcomeDistribution& a, const OutcomeDistribution& b) {
    if (a.labels != b.labels) throw Error("LabelMismatch", "distributions have different classical labels");
    double l1 = 0;
    for (const auto& [k, p] : a.probs) l1 += std::abs(p - b.prob_of(k));
    for (const auto& [k, p] : b.probs)
        if (a.probs.find(k) == a.probs.end()) l1 += std::abs(p);
    return 0.5 * l1;
}

struct MeasurementSpec {
    enum class Kind { Observable, PhotonCount, QubitZ, Discard };
    Kind kind{};
    std::vector<int> wires;
    std::string label;  // classical wire produced; empty for Discard
    std::shared_ptr<const Operator> observable;  // Kind::Observable

    static MeasurementSpec qubit_z(int wire, std::string label) {
        return MeasurementSpec{Kind::QubitZ, {wire}, std::move(label), nullptr};
    }
    static MeasurementSpec photon_count(int wire, std::string label) {
        return MeasurementSpec{Kind::PhotonCount, {wire}, std::move(label), nullptr};
    }
    static MeasurementSpec observable_on(Operator op, std::vector<int> wires, std::string label) {
        return MeasurementSpec{Kind::Observable, std::move(wires), std::move(label),
                               std::make_shared<Operator>(std::move(op))};
    }
    static MeasurementSpec discard(std::vector<int> wires) {
        return MeasurementSpec{Kind::Discard, std::move(wires), "", nullptr};
    }
};

namespace detail {

// Projection of one subsystem onto a basis digit: probability and the raw
// (unnormalized) projected state.
inline std::pair<double, Vec> project_digit(const StateVector& psi, int wire, int digit) {
    long stride = psi.spec.stride(wire);
    int dim = psi.spec.at(wire).dim;
    long block = stride * dim;
    Vec out = Vec::Zero(psi.amps.size());
    double p = 0;
    for (long base = 0; base < psi.amps.size(); base += block)
        for (long off = digit * stride; off < (digit + 1) * stride; ++off) {
            cdouble a = psi.amps(base + off);
            p += std::norm(a);
            out(base + off) = a;
        }
    return {p, std::move(out)};
}

// Eigenvalue groups of a Hermitian operator, clustered within tol().eig.
struct EigenGroups {
    std::vector<double> values;          // representative per group
    std::vector<Mat> projectors;         // projector per group (on the operator's spec)
};

inline EigenGroups eigen_groups(const Operator& op) {
    if (!op.is_hermitian()) throw Error("NonHermitianObservable", "observable is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(op.m);
    EigenGroups g;
    long n = es.eigenvalues().size();
    long i = 0;
    while (i < n) {
        long j = i + 1;
        while (j < n && es.eigenvalues()(j) - es.eigenvalues()(j - 1) <= tol().eig) ++j;
        double rep = es.eigenvalues().segment(i, j - i).mean();
        Mat v = es.eigenvectors().middleCols(i, j - i);
        g.values.push_back(rep);
        g.projectors.push_back(v * v.adjoint());
        i = j;
    }
    return g;
}

}  // namespace detail

// Born-rule outcome distribution of a single measurement, with normalized
// post-measurement states retained per outcome.
inline OutcomeDistribution measure(const StateVector& state, const MeasurementSpec& spec) {
    OutcomeDistribution dist;
    if (!spec.label.empty()) dist.labels = {spec.label};
    auto push = [&](double value, double p, Vec raw) {
        if (p < -1e-14) throw Error("NegativeProbability", "projection produced negative probability");
        p = std::max(p, 0.0);
        if (p == 0.0) return;
        dist.probs[{value}] += p;
        StateVector post = StateVector::raw(state.spec, std::move(raw));
        post.amps /= std::sqrt(p);
        post.normalized = true;
        dist.conditional_states.insert({{value}, std::move(post)});
    };
    switch (spec.kind) {
        case MeasurementSpec::Kind::QubitZ: {
            int w = spec.wires.at(0);
            if (state.spec.at(w).kind != WireKind::Qubit)
                throw Error("WireKindMismatch", "QubitZ on a non-qubit wire");
            for (int a = 0; a < 2; ++a) {
                auto [p, raw] = detail::project_digit(state, w, a);
                push(a == 0 ? 1.0 : -1.0, p, std::move(raw));
            }
            break;
        }
        case MeasurementSpec::Kind::PhotonCount: {
            int w = spec.wires.at(0);
            if (state.spec.at(w).kind != WireKind::Mode)
                throw Error("WireKindMismatch", "photon counting on a non-mode wire");
            for (int n = 0; n < state.spec.at(w).dim; ++n) {
                auto [p, raw] = detail::project_digit(state, w, n);
                push(static_cast<double>(n), p, std::move(raw));
            }
            break;
        }
        case MeasurementSpec::Kind::Observable: {
            auto groups = detail::eigen_groups(*spec.observable);
            for (size_t gi = 0; gi < groups.values.size(); ++gi) {
                Operator proj(spec.observable->spec, groups.projectors[gi]);
                StateVector projected = apply(proj, spec.wires, state);
                double p = projected.amps.squaredNorm();
                push(groups.values[gi], p, std::move(projected.amps));
            }
            break;
        }
        case MeasurementSpec::Kind::Discard:
            // Averaging over discarded outcomes equals doing nothing for every
            // downstream distribution query, since the wire never interacts again.
            dist.probs[{}] = 1.0;
            dist.conditional_states.insert({{}, state});
            return dist;
    }
    dist.check_normalization();
    return dist;
}

struct ClassicalGate {
    enum class Kind { Sum, Difference, Product, ParityOfCount, MapCount, ControlledExchange, Custom };
    Kind kind{};
    int level = 0;  // N for MapCount / ControlledExchange
    std::map<OutcomeKey, double> table;  // Custom
    bool operator==(const ClassicalGate& o) const {
        return kind == o.kind && level == o.level && table == o.table;
    }

    int arity() const {
        switch (kind) {
            case Kind::Difference: return 2;
            case Kind::ParityOfCount: case Kind::MapCount: return 1;
            case Kind::ControlledExchange: return 2;  // (count, y)
            case Kind::Custom: return table.empty() ? 0 : static_cast<int>(table.begin()->first.size());
            default: return -1;  // variadic
        }
    }

    double eval(const std::vector<double>& in) const {
        switch (kind) {
            case Kind::Sum: {
                double s = 0;
                for (double v : in) s += v;
                return s;
            }
            case Kind::Difference: return in.at(0) - in.at(1);
            case Kind::Product: {
                double s = 1;
                for (double v : in) s *= v;
                return s;
            }
            case Kind::ParityOfCount: {
                long n = std::lround(in.at(0));
                if (n < 0) throw Error("OutsideAlphabet", "parity of a negative count");
                return (n % 2 == 0) ? 1.0 : -1.0;
            }
            case Kind::MapCount: {
                long n = std::lround(in.at(0));
                if (n == 0) return 1.0;
                if (n == level) return -1.0;
                throw Error("OutsideAlphabet", "count " + std::to_string(n) + " is neither 0 nor " +
                                                   std::to_string(level));
            }
            case Kind::ControlledExchange: {
                long n = std::lround(in.at(0));
                double y = in.at(1);
                if (y != 1.0 && y != -1.0) throw Error("OutsideAlphabet", "exchange control is not a sign");
                if (y == -1.0) {
                    if (n == 0) return static_cast<double>(level);
                    if (n == level) return 0.0;
                }
                return static_cast<double>(n);
            }
            case Kind::Custom: {
                auto it = table.find(in);
                if (it == table.end()) throw Error("OutsideAlphabet", "value outside gate alphabet");
                return it->second;
            }
        }
        throw Error("BadGate", "unknown classical gate");
    }
};

// Pushforward of a distribution through a classical gate; input labels stay,
// the derived value is appended under `output`.
inline OutcomeDistribution postprocess(const OutcomeDistribution& dist, const ClassicalGate& gate,
                                       const std::vector<std::string>& inputs, const std::string& output) {
    std::vector<int> idx;
    for (const auto& l : inputs) idx.push_back(dist.label_index(l));
    if (gate.arity() >= 0 && gate.arity() != static_cast<int>(inputs.size()))
        throw Error("ArityError", "classical gate arity mismatch");
    OutcomeDistribution out;
    out.labels = dist.labels;
    out.labels.push_back(output);
    out.dropped_mass = dist.dropped_mass;
    for (const auto& [k, p] : dist.probs) {
        std::vector<double> in;
        for (int i : idx) in.push_back(k[i]);
        OutcomeKey key = k;
        key.push_back(gate.eval(in));
        out.probs[key] += p;
        auto it = dist.conditional_states.find(k);
        if (it != dist.conditional_states.end()) out.conditional_states.insert({key, it->second});
    }
    return out;
}

// U'OU: measuring O after applying U equals measuring the conjugated observable.
inline Operator conjugate_observable(const Operator& u, const Operator& o) {
    if (u.spec != o.spec) throw Error("SpecMismatch", "conjugation over different specs");
    return Operator(o.spec, u.m.adjoint() * o.m * u.m);
}

struct OutcomePermutation {
    bool valid = false;
    std::map<double, double> table;  // outcome of O -> outcome of P'OP
};

// For P permuting the eigenspaces of O, measuring P'OP equals measuring O and
// permuting the outcome; returns that outcome table.
inline OutcomePermutation permute_outcomes(const Operator& p, const Operator& o) {
    if (p.spec != o.spec) throw Error("SpecMismatch", "permutation over different specs");
    auto groups = detail::eigen_groups(o);
    OutcomePermutation result;
    size_t ng = groups.values.size();
    std::vector<bool> hit(ng, false);
    for (size_t j = 0; j < ng; ++j) {
        Mat image = p.m * groups.projectors[j] * p.m.adjoint();
        double dim_j = groups.projectors[j].trace().real();
        bool found = false;
        for (size_t h = 0; h < ng; ++h) {
            double overlap = (groups.projectors[h] * image).trace().real();
            if (std::abs(overlap - dim_j) <= 1e-8 * std::max(1.0, dim_j)) {
                if (hit[h] || std::abs(groups.projectors[h].trace().real() - dim_j) > 0.5) return result;
                hit[h] = true;
                result.table[groups.values[j]] = groups.values[h];
                found = true;
                break;
            }
        }
        if (!found) return result;  // P does not permute the eigenspaces of O
    }
    result.valid = true;
    return result;
}

// Measurement of X_N via the effective Hadamard H_N followed by photon
// counting, valid for states supported on span{|0>, |N>}.
inline OutcomeDistribution measure_xn(const StateVector& state, int N, int wire) {
    int dim = state.spec.at(wire).dim;
    OutcomeDistribution counted;
    {
        StateVector rotated = apply(subspace_gate(SubspaceKind::H, N, dim), {wire}, state);
        counted = measure(rotated, MeasurementSpec::photon_count(wire, "n"));
    }
    double outside = 0;
    for (const auto& [k, p] : counted.probs) {
        long n = std::lround(k[0]);
        if (n != 0 && n != N) outside += p;
    }
    if (outside > tol().sym)
        throw Error("SupportOutsideSubspace",
                    "state has mass " + std::to_string(outside) + " outside span{|0>,|N>}");
    OutcomeDistribution dist;
    dist.labels = {"x"};
    dist.dropped_mass = outside;
    for (const auto& [k, p] : counted.probs) {
        long n = std::lround(k[0]);
        if (n != 0 && n != N) continue;
        OutcomeKey key{n == 0 ? 1.0 : -1.0};
        dist.probs[key] += p;
        auto it = counted.conditional_states.find(k);
        if (it != counted.conditional_states.end()) dist.conditional_states.insert({key, it->second});
    }
    return dist;
}

// Measurement of the modal SWAP observable i^N e^{-i J_x pi}: 50/50
// beamsplitter (equatorial axis -pi/2, i.e. e^{+i J_y pi/2}) followed by
// photon counting on mode 1 and classical extraction of parity.
inline OutcomeDistribution measure_modal_swap(const StateVector& state, int wire0, int wire1) {
    StateVector rotated = apply(beamsplitter(-M_PI / 2, state.spec.select({wire0, wire1})),
                                {wire0, wire1}, state);
    OutcomeDistribution counted = measure(rotated, MeasurementSpec::photon_count(wire1, "n1"));
    OutcomeDistribution dist;
    dist.labels = {"x"};
    for (const auto& [k, p] : counted.probs) {
        long n = std::lround(k[0]);
        OutcomeKey key{n % 2 == 0 ? 1.0 : -1.0};
        dist.probs[key] += p;
    }
    return dist;
}

}  // namespace ifq
