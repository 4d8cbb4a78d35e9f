#pragma once

// Circuit intermediate representation and its evaluator: exhaustive branch
// simulation of mixed quantum/classical circuits, the unitary extractor, the
// measurement-deferral rewrite, and the equivalence checker.

#include <optional>
#include <random>
#include <set>

#include "interferoq/measurement.hpp"

namespace ifq {

struct Wire {
    enum class Type { Qubit, Mode, ClassicalSign, ClassicalInt };
    Type type{};
    int cutoff = 0;  // modes only
    std::string name;
    bool operator==(const Wire&) const = default;

    bool quantum() const { return type == Type::Qubit || type == Type::Mode; }
    bool classical() const { return !quantum(); }
    int dim() const { return type == Type::Qubit ? 2 : cutoff + 1; }
};

struct WireInput {
    enum class Kind { Ground, One, Fock, Coherent };
    Kind kind = Kind::Ground;
    int n = 0;
    cdouble alpha{};
    bool operator==(const WireInput&) const = default;
};

struct JointInput {
    enum class Kind { Noon, Obbo };
    Kind kind{};
    int wire_a = 0, wire_b = 0;
    int n = 0;
    cdouble alpha{};
    bool operator==(const JointInput&) const = default;
};

struct QuantumControl {
    int wire = 0;
    int value = 1;  // control on |value>
    bool operator==(const QuantumControl&) const = default;
};

struct ClassicalCondition {
    std::string label;
    double value = 1.0;
    bool operator==(const ClassicalCondition&) const = default;
};

struct Instruction {
    enum class Kind { Unitary, Measure, ClassicalOp };
    enum class MeasureKind { QubitZ, PhotonCount, Observable, Discard };

    Kind kind{};
    // Unitary
    GateSpec gate{};
    std::vector<int> targets;
    std::optional<QuantumControl> qctrl;
    std::optional<ClassicalCondition> cctrl;
    // Measure
    MeasureKind mkind{};
    std::shared_ptr<const Operator> observable;
    // Measure/ClassicalOp output label
    std::string out;
    // ClassicalOp
    ClassicalGate cgate{};
    std::vector<std::string> ins;

    static Instruction unitary(GateSpec g, std::vector<int> targets,
                               std::optional<QuantumControl> qc = std::nullopt,
                               std::optional<ClassicalCondition> cc = std::nullopt) {
        Instruction i;
        i.kind = Kind::Unitary;
        i.gate = std::move(g);
        i.targets = std::move(targets);
        i.qctrl = qc;
        i.cctrl = cc;
        return i;
    }
    static Instruction measure_z(int wire, std::string label) {
        Instruction i;
        i.kind = Kind::Measure;
        i.mkind = MeasureKind::QubitZ;
        i.targets = {wire};
        i.out = std::move(label);
        return i;
    }
    static Instruction count(int wire, std::string label) {
        Instruction i;
        i.kind = Kind::Measure;
        i.mkind = MeasureKind::PhotonCount;
        i.targets = {wire};
        i.out = std::move(label);
        return i;
    }
    static Instruction observe(Operator op, std::vector<int> wires, std::string label) {
        Instruction i;
        i.kind = Kind::Measure;
        i.mkind = MeasureKind::Observable;
        i.targets = std::move(wires);
        i.observable = std::make_shared<Operator>(std::move(op));
        i.out = std::move(label);
        return i;
    }
    static Instruction discard(std::vector<int> wires) {
        Instruction i;
        i.kind = Kind::Measure;
        i.mkind = MeasureKind::Discard;
        i.targets = std::move(wires);
        return i;
    }
    static Instruction classical(ClassicalGate g, std::vector<std::string> ins, std::string out) {
        Instruction i;
        i.kind = Kind::ClassicalOp;
        i.cgate = std::move(g);
        i.ins = std::move(ins);
        i.out = std::move(out);
        return i;
    }

    bool operator==(const Instruction& o) const {
        if (kind != o.kind || !(gate == o.gate) || targets != o.targets || qctrl != o.qctrl ||
            cctrl != o.cctrl || mkind != o.mkind || out != o.out || !(cgate == o.cgate) || ins != o.ins)
            return false;
        if (!observable != !o.observable) return false;
        if (observable && (observable->spec != o.observable->spec || observable->m != o.observable->m))
            return false;
        return true;
    }
};

class CircuitIR {
  public:
    std::vector<Wire> wires;
    std::vector<WireInput> inputs;   // parallel to wires (ignored for classical)
    std::vector<JointInput> joints;
    std::vector<Instruction> instrs;
    std::vector<std::string> outputs;  // classical labels; empty = all
    int phase_marker = -1;  // first instruction of the phase-shift stage, if tagged

    int add_qubit(const std::string& name, WireInput in = {}) {
        wires.push_back({Wire::Type::Qubit, 0, name});
        inputs.push_back(in);
        return static_cast<int>(wires.size()) - 1;
    }
    int add_mode(const std::string& name, int cutoff, WireInput in = {}) {
        wires.push_back({Wire::Type::Mode, cutoff, name});
        inputs.push_back(in);
        return static_cast<int>(wires.size()) - 1;
    }
    int add_classical(const std::string& name, bool sign) {
        wires.push_back({sign ? Wire::Type::ClassicalSign : Wire::Type::ClassicalInt, 0, name});
        inputs.push_back({});
        return static_cast<int>(wires.size()) - 1;
    }

    int wire_index(const std::string& name) const {
        for (size_t i = 0; i < wires.size(); ++i)
            if (wires[i].name == name) return static_cast<int>(i);
        return -1;
    }

    // Position of wire w among the quantum wires (the simulator's subsystem index).
    int quantum_position(int w) const {
        int pos = 0;
        for (int i = 0; i < w; ++i)
            if (wires[i].quantum()) ++pos;
        return pos;
    }

    HilbertSpec quantum_spec() const {
        std::vector<Subsystem> subs;
        for (const auto& w : wires)
            if (w.quantum()) subs.push_back({w.type == Wire::Type::Qubit ? WireKind::Qubit : WireKind::Mode, w.dim()});
        return HilbertSpec(std::move(subs));
    }

    std::vector<std::string> classical_labels() const {
        std::vector<std::string> out;
        for (const auto& w : wires)
            if (w.classical()) out.push_back(w.name);
        return out;
    }

    std::vector<std::string> output_labels() const {
        return outputs.empty() ? classical_labels() : outputs;
    }

    bool symbolic() const {
        for (const auto& i : instrs)
            if (i.kind == Instruction::Kind::Unitary && i.gate.symbolic()) return true;
        return false;
    }

    // Structural well-formedness: single-assignment classical wires, reads
    // after writes, no quantum wire touched after a measurement consumed it.
    void validate() const {
        std::set<std::string> names;
        for (const auto& w : wires) {
            if (w.name.empty()) throw Error("MalformedIR", "unnamed wire");
            if (!names.insert(w.name).second) throw Error("MalformedIR", "duplicate wire name " + w.name);
        }
        std::set<std::string> written;
        std::vector<bool> consumed(wires.size(), false);
        auto check_quantum_use = [&](int w, bool arity_q) {
            if (w < 0 || w >= static_cast<int>(wires.size())) throw Error("MalformedIR", "wire index out of range");
            if (!wires[w].quantum()) throw Error("MalformedIR", "classical wire used as quantum operand");
            if (consumed[w]) throw Error("UseAfterMeasure", "quantum wire " + wires[w].name + " used after measurement");
            (void)arity_q;
        };
        auto check_read = [&](const std::string& label) {
            int w = wire_index(label);
            if (w < 0 || !wires[w].classical()) throw Error("MalformedIR", "unknown classical wire " + label);
            if (!written.count(label)) throw Error("ReadBeforeWrite", "classical wire " + label + " read before written");
        };
        auto check_write = [&](const std::string& label) {
            int w = wire_index(label);
            if (w < 0 || !wires[w].classical()) throw Error("MalformedIR", "unknown classical wire " + label);
            if (!written.insert(label).second)
                throw Error("SingleAssignment", "classical wire " + label + " written twice");
        };
        for (const auto& ins : instrs) {
            switch (ins.kind) {
                case Instruction::Kind::Unitary: {
                    if (static_cast<int>(ins.targets.size()) != ins.gate.arity())
                        throw Error("ArityError", "gate arity does not match target count");
                    std::set<int> seen;
                    for (int t : ins.targets) {
                        check_quantum_use(t, true);
                        if (!seen.insert(t).second) throw Error("MalformedIR", "duplicate target wire");
                    }
                    if (ins.qctrl) {
                        check_quantum_use(ins.qctrl->wire, false);
                        if (wires[ins.qctrl->wire].type != Wire::Type::Qubit)
                            throw Error("WireKindMismatch", "quantum control must be a qubit");
                        if (seen.count(ins.qctrl->wire)) throw Error("MalformedIR", "control wire is also a target");
                        if (ins.qctrl->value != 0 && ins.qctrl->value != 1)
                            throw Error("MalformedIR", "control value must be 0 or 1");
                    }
                    if (ins.cctrl) check_read(ins.cctrl->label);
                    break;
                }
                case Instruction::Kind::Measure: {
                    for (int t : ins.targets) check_quantum_use(t, false);
                    for (int t : ins.targets) consumed[t] = true;
                    if (ins.mkind == Instruction::MeasureKind::Discard) {
                        if (!ins.out.empty()) throw Error("MalformedIR", "discard produces no classical wire");
                        break;
                    }
                    check_write(ins.out);
                    int ow = wire_index(ins.out);
                    bool sign_wire = wires[ow].type == Wire::Type::ClassicalSign;
                    if (ins.mkind == Instruction::MeasureKind::QubitZ && !sign_wire)
                        throw Error("AlphabetMismatch", "QubitZ writes a sign wire");
                    if (ins.mkind == Instruction::MeasureKind::PhotonCount && sign_wire)
                        throw Error("AlphabetMismatch", "photon counting writes an int wire");
                    break;
                }
                case Instruction::Kind::ClassicalOp: {
                    for (const auto& l : ins.ins) check_read(l);
                    check_write(ins.out);
                    break;
                }
            }
        }
    }

    bool operator==(const CircuitIR& o) const {
        return wires == o.wires && inputs == o.inputs && joints == o.joints && instrs == o.instrs &&
               outputs == o.outputs;
    }
};

struct SimOptions {
    std::optional<StateVector> input_override;
    double branch_prune = 0.0;
    bool conditional_states = false;
};

namespace detail {

inline Vec wire_input_vector(const Wire& w, const WireInput& in) {
    int d = w.dim();
    Vec v = Vec::Zero(d);
    switch (in.kind) {
        case WireInput::Kind::Ground: v(0) = 1; break;
        case WireInput::Kind::One:
            if (w.type != Wire::Type::Qubit) throw Error("MalformedIR", "input 'one' is for qubits");
            v(1) = 1;
            break;
        case WireInput::Kind::Fock:
            if (in.n < 0 || in.n >= d) throw Error("CutoffExceeded", "Fock input beyond cutoff");
            v(in.n) = 1;
            break;
        case WireInput::Kind::Coherent: {
            HilbertSpec ms = HilbertSpec::mode(w.cutoff);
            return coherent_state(in.alpha, ms).amps;
        }
    }
    return v;
}

}  // namespace detail

inline StateVector initial_state(const CircuitIR& c) {
    HilbertSpec spec = c.quantum_spec();
    std::vector<Vec> parts;
    std::vector<int> part_of_wire;  // quantum position -> index into parts (or -1 for joint tail)
    std::vector<int> qwires;
    for (size_t i = 0; i < c.wires.size(); ++i)
        if (c.wires[i].quantum()) qwires.push_back(static_cast<int>(i));
    std::vector<bool> handled(qwires.size(), false);
    std::map<int, const JointInput*> joint_at;  // quantum position of first wire -> joint
    for (const auto& j : c.joints) {
        int pa = c.quantum_position(j.wire_a), pb = c.quantum_position(j.wire_b);
        if (pb != pa + 1) throw Error("MalformedIR", "joint input wires must be adjacent");
        joint_at[pa] = &j;
    }
    Vec acc = Vec::Ones(1);
    for (size_t p = 0; p < qwires.size(); ++p) {
        if (handled[p]) continue;
        Vec piece;
        auto it = joint_at.find(static_cast<int>(p));
        if (it != joint_at.end()) {
            const JointInput& j = *it->second;
            const Wire& wa = c.wires[qwires[p]];
            const Wire& wb = c.wires[qwires[p + 1]];
            if (wa.type != Wire::Type::Mode || wb.type != Wire::Type::Mode)
                throw Error("MalformedIR", "joint inputs live on mode wires");
            HilbertSpec pair = HilbertSpec::modes(wa.cutoff, wb.cutoff);
            if (j.kind == JointInput::Kind::Noon) {
                StateVector n0 = fock_state(j.n, 0, pair), on = fock_state(0, j.n, pair);
                piece = (n0.amps + on.amps) / std::sqrt(2.0);
            } else {
                StateVector a0 = tensor(coherent_state(j.alpha, HilbertSpec::mode(wa.cutoff)),
                                        fock_state(0, HilbertSpec::mode(wb.cutoff)));
                StateVector oa = tensor(fock_state(0, HilbertSpec::mode(wa.cutoff)),
                                        coherent_state(j.alpha, HilbertSpec::mode(wb.cutoff)));
                piece = (a0.amps + cdouble(0, 1) * oa.amps);
                piece /= piece.norm();
            }
            handled[p] = handled[p + 1] = true;
        } else {
            piece = detail::wire_input_vector(c.wires[qwires[p]], c.inputs[qwires[p]]);
            handled[p] = true;
        }
        Vec next(acc.size() * piece.size());
        for (long i = 0; i < acc.size(); ++i) next.segment(i * piece.size(), piece.size()) = acc(i) * piece;
        acc.swap(next);
    }
    return StateVector(spec, std::move(acc));
}

// Exhaustive branch evaluation: every Measure forks on its outcomes with Born
// weights; the result is the joint distribution over all classical wires.
inline OutcomeDistribution simulate(const CircuitIR& c, double phi = 0.0, const SimOptions& opts = {}) {
    c.validate();
    HilbertSpec spec = c.quantum_spec();

    struct Branch {
        StateVector state;
        double prob;
        std::map<std::string, double> env;
    };
    std::vector<Branch> branches;
    {
        StateVector init = opts.input_override ? *opts.input_override : initial_state(c);
        if (init.spec != spec) throw Error("SpecMismatch", "input override does not match circuit spec");
        branches.push_back({std::move(init), 1.0, {}});
    }
    double dropped = 0.0;

    for (const auto& ins : c.instrs) {
        switch (ins.kind) {
            case Instruction::Kind::Unitary: {
                HilbertSpec tspec = spec.select([&] {
                    std::vector<int> pos;
                    for (int t : ins.targets) pos.push_back(c.quantum_position(t));
                    return pos;
                }());
                Operator op = ins.gate.realize(tspec, phi);
                std::vector<int> positions;
                for (int t : ins.targets) positions.push_back(c.quantum_position(t));
                if (ins.qctrl) {
                    op = controlled(op, ins.qctrl->value);
                    positions.insert(positions.begin(), c.quantum_position(ins.qctrl->wire));
                }
                for (auto& b : branches) {
                    if (ins.cctrl) {
                        auto it = b.env.find(ins.cctrl->label);
                        if (it == b.env.end() || it->second != ins.cctrl->value) continue;
                    }
                    b.state = apply(op, positions, b.state);
                }
                break;
            }
            case Instruction::Kind::Measure: {
                if (ins.mkind == Instruction::MeasureKind::Discard) break;  // consume-only
                std::vector<Branch> next;
                for (auto& b : branches) {
                    OutcomeDistribution d;
                    std::vector<int> positions;
                    for (int t : ins.targets) positions.push_back(c.quantum_position(t));
                    switch (ins.mkind) {
                        case Instruction::MeasureKind::QubitZ:
                            d = measure(b.state, MeasurementSpec::qubit_z(positions[0], ins.out));
                            break;
                        case Instruction::MeasureKind::PhotonCount:
                            d = measure(b.state, MeasurementSpec::photon_count(positions[0], ins.out));
                            break;
                        case Instruction::MeasureKind::Observable: {
                            int ow = c.wire_index(ins.out);
                            d = measure(b.state, MeasurementSpec::observable_on(*ins.observable, positions, ins.out));
                            // observable outcomes must fit the declared wire alphabet
                            for (const auto& [k, p] : d.probs) {
                                double v = k[0];
                                bool sign_wire = c.wires[ow].type == Wire::Type::ClassicalSign;
                                double snapped = sign_wire ? (v >= 0 ? 1.0 : -1.0) : std::round(v);
                                if (std::abs(v - snapped) > tol().eig)
                                    throw Error("AlphabetMismatch",
                                                "observable outcome " + std::to_string(v) +
                                                    " does not fit wire " + ins.out);
                            }
                            break;
                        }
                        default: break;
                    }
                    for (const auto& [k, p] : d.probs) {
                        double joint = b.prob * p;
                        if (joint <= opts.branch_prune) {
                            dropped += joint;
                            continue;
                        }
                        Branch nb;
                        nb.prob = joint;
                        nb.env = b.env;
                        int ow = c.wire_index(ins.out);
                        double v = k[0];
                        if (ins.mkind == Instruction::MeasureKind::Observable)
                            v = c.wires[ow].type == Wire::Type::ClassicalSign ? (v >= 0 ? 1.0 : -1.0)
                                                                              : std::round(v);
                        nb.env[ins.out] = v;
                        nb.state = d.conditional_states.at(k);
                        next.push_back(std::move(nb));
                    }
                }
                branches.swap(next);
                break;
            }
            case Instruction::Kind::ClassicalOp: {
                for (auto& b : branches) {
                    std::vector<double> in;
                    for (const auto& l : ins.ins) in.push_back(b.env.at(l));
                    b.env[ins.out] = ins.cgate.eval(in);
                }
                break;
            }
        }
    }

    std::vector<std::string> labels = c.classical_labels();
    OutcomeDistribution dist;
    dist.labels = labels;
    dist.dropped_mass = dropped;
    for (auto& b : branches) {
        OutcomeKey key;
        key.reserve(labels.size());
        for (const auto& l : labels) {
            auto it = b.env.find(l);
            if (it == b.env.end()) throw Error("MalformedIR", "classical wire " + l + " never written");
            key.push_back(it->second);
        }
        dist.probs[key] += b.prob;
        if (opts.conditional_states) dist.conditional_states.insert({key, std::move(b.state)});
    }
    dist.check_normalization();
    return dist;
}

// Seeded sampler over the exact distribution (CLI convenience; acceptance
// rests on exact distributions).
inline std::map<OutcomeKey, long> sample(const CircuitIR& c, long shots, unsigned seed, double phi = 0.0) {
    OutcomeDistribution d = simulate(c, phi);
    OutcomeDistribution m = d.marginal(c.output_labels());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::map<OutcomeKey, long> counts;
    for (long s = 0; s < shots; ++s) {
        double r = u(rng), acc = 0;
        for (const auto& [k, p] : m.probs) {
            acc += p;
            if (r <= acc) {
                ++counts[k];
                break;
            }
        }
    }
    return counts;
}

// Product of the instruction unitaries of a measurement-free circuit.
inline Operator unitary_of(const CircuitIR& c, double phi = 0.0) {
    c.validate();
    for (const auto& ins : c.instrs)
        if (ins.kind != Instruction::Kind::Unitary || ins.cctrl)
            throw Error("CircuitNotUnitary", "circuit contains measurements or classical instructions");
    HilbertSpec spec = c.quantum_spec();
    long D = spec.total_dim();
    Mat u = Mat::Identity(D, D);
    for (const auto& ins : c.instrs) {
        std::vector<int> positions;
        for (int t : ins.targets) positions.push_back(c.quantum_position(t));
        Operator op = ins.gate.realize(spec.select(positions), phi);
        if (ins.qctrl) {
            op = controlled(op, ins.qctrl->value);
            positions.insert(positions.begin(), c.quantum_position(ins.qctrl->wire));
        }
        for (long col = 0; col < D; ++col) {
            StateVector sv = StateVector::raw(spec, u.col(col));
            u.col(col) = apply(op, positions, sv).amps;
        }
    }
    return Operator(spec, std::move(u));
}

// Principle of deferred measurement (Fig. 5(c) pattern): replace classical
// control on a QubitZ outcome by coherent controlled gates and move the
// measurement to the end.
inline CircuitIR defer_measurement(const CircuitIR& c, const std::string& label) {
    c.validate();
    int measure_at = -1;
    for (size_t i = 0; i < c.instrs.size(); ++i) {
        const auto& ins = c.instrs[i];
        if (ins.kind == Instruction::Kind::Measure && ins.out == label) {
            if (ins.mkind != Instruction::MeasureKind::QubitZ)
                throw Error("DeferPrecondition", "deferred wire must come from a QubitZ measurement");
            measure_at = static_cast<int>(i);
        }
        if (ins.kind == Instruction::Kind::ClassicalOp)
            for (const auto& l : ins.ins)
                if (l == label) throw Error("DeferPrecondition", "wire value is consumed by a classical gate");
    }
    if (measure_at < 0) return c;
    int qubit = c.instrs[measure_at].targets[0];
    CircuitIR out = c;
    out.instrs.clear();
    for (size_t i = 0; i < c.instrs.size(); ++i) {
        if (static_cast<int>(i) == measure_at) continue;
        Instruction ins = c.instrs[i];
        if (ins.kind == Instruction::Kind::Unitary && ins.cctrl && ins.cctrl->label == label) {
            if (ins.qctrl) throw Error("DeferPrecondition", "instruction already has a quantum control");
            // outcome z = +1 is bit value 0
            ins.qctrl = QuantumControl{qubit, ins.cctrl->value == 1.0 ? 0 : 1};
            ins.cctrl.reset();
        }
        out.instrs.push_back(std::move(ins));
    }
    out.instrs.push_back(Instruction::measure_z(qubit, label));
    out.validate();
    return out;
}

struct EquivalenceQuery {
    const CircuitIR* left = nullptr;
    const CircuitIR* right = nullptr;
    enum class Domain { Full, SymmetricSector, SubspaceSpan };
    Domain domain = Domain::Full;
    int sector_n = 0;                 // SymmetricSector
    std::vector<StateVector> span;    // SubspaceSpan basis (orthonormalized internally)
    enum class Compare { UnitaryUpToGlobalPhase, JointDistribution };
    Compare compare = Compare::JointDistribution;
    double tolerance = 1e-9;
    std::vector<double> phi_grid;     // empty: single point 0 or default grid when symbolic
};

struct EquivalenceResult {
    bool equal = true;
    double max_deviation = 0.0;
    std::string witness;  // input/outcome where violated, if any
};

inline std::vector<double> default_phi_grid(int points = 25) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(-M_PI + 2 * M_PI * i / (points - 1));
    return g;
}

namespace detail {

// Orthonormal columns spanning the comparison domain, or empty for Full.
inline Mat domain_basis(const EquivalenceQuery& q, const HilbertSpec& spec) {
    if (q.domain == EquivalenceQuery::Domain::Full) return Mat();
    if (q.domain == EquivalenceQuery::Domain::SymmetricSector) {
        bool all_qubits = true, all_modes = true;
        for (const auto& s : spec.subsystems()) {
            all_qubits &= s.kind == WireKind::Qubit;
            all_modes &= s.kind == WireKind::Mode;
        }
        if (all_qubits) {
            SectorMap sm(spec.count());
            return sm.isometry().adjoint();  // columns are Dicke states
        }
        if (all_modes && spec.count() == 2) {
            int N = q.sector_n;
            Mat v = Mat::Zero(spec.total_dim(), N + 1);
            for (int n1 = 0; n1 <= N; ++n1) {
                if (N - n1 >= spec.at(0).dim || n1 >= spec.at(1).dim)
                    throw Error("CutoffExceeded", "sector extends beyond cutoffs");
                v(static_cast<long>(N - n1) * spec.at(1).dim + n1, n1) = 1.0;
            }
            return v;
        }
        throw Error("IncompatibleQuery", "sector domain needs all-qubit or two-mode circuits");
    }
    // SubspaceSpan: Gram-Schmidt over the provided states
    Mat v(spec.total_dim(), static_cast<long>(q.span.size()));
    long col = 0;
    for (const auto& s : q.span) {
        if (s.spec != spec) throw Error("IncompatibleQuery", "span state on a different spec");
        Vec w = s.amps;
        for (long j = 0; j < col; ++j) w -= v.col(j).dot(w) * v.col(j);
        double n = w.norm();
        if (n < 1e-12) continue;  // dependent vector
        v.col(col++) = w / n;
    }
    return v.leftCols(col);
}

}  // namespace detail

inline EquivalenceResult check_equivalence(const EquivalenceQuery& q) {
    EquivalenceResult r;
    const CircuitIR& L = *q.left;
    const CircuitIR& R = *q.right;
    std::vector<double> grid = q.phi_grid;
    if (grid.empty()) grid = (L.symbolic() || R.symbolic()) ? default_phi_grid() : std::vector<double>{0.0};

    if (q.compare == EquivalenceQuery::Compare::JointDistribution) {
        if (L.output_labels() != R.output_labels())
            throw Error("IncompatibleQuery", "circuits declare different classical output labels");
        for (double phi : grid) {
            OutcomeDistribution dl = simulate(L, phi).marginal(L.output_labels());
            OutcomeDistribution dr = simulate(R, phi).marginal(R.output_labels());
            double tv = tv_distance(dl, dr);
            if (tv > r.max_deviation) {
                r.max_deviation = tv;
                r.witness = "phi=" + std::to_string(phi);
            }
        }
        r.equal = r.max_deviation <= q.tolerance;
        if (r.equal) r.witness.clear();
        return r;
    }

    if (L.quantum_spec() != R.quantum_spec())
        throw Error("IncompatibleQuery", "unitary comparison needs identical wire structure");
    for (double phi : grid) {
        Operator ul = unitary_of(L, phi), ur = unitary_of(R, phi);
        Mat basis = detail::domain_basis(q, ul.spec);
        double dev;
        if (basis.size() == 0) {
            dev = equal_up_to_global_phase(ul, ur, q.tolerance).max_deviation;
        } else {
            // compare the circuits as maps from the domain: U V ~ c U' V
            Mat ml = ul.m * basis;
            Mat mr = ur.m * basis;
            Vec a = Eigen::Map<const Vec>(ml.data(), ml.size());
            Vec b = Eigen::Map<const Vec>(mr.data(), mr.size());
            dev = detail::compare_up_to_phase(a, b, q.tolerance).max_deviation;
        }
        if (dev > r.max_deviation) {
            r.max_deviation = dev;
            r.witness = "phi=" + std::to_string(phi);
        }
    }
    r.equal = r.max_deviation <= q.tolerance;
    if (r.equal) r.witness.clear();
    return r;
}

}  // namespace ifq
