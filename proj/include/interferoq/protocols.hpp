#pragma once

// Builders for the phase-estimation protocol circuits, plus the fringe-sweep,
// conditional-fringe, sensitivity, and scaling harness that turns simulations
// into quantitative claims.

#include <functional>

#include "interferoq/circuit.hpp"

namespace ifq {

struct ProtocolId {
    enum class Kind {
        ConventionalQubit,        // qubit Ramsey interferometer
        ConventionalModal,        // two-mode Fock interferometer
        ConventionalCoherent,     // coherent-input interferometer
        FockSingleMode,           // single-mode |0>,|N> phase estimation
        FockSingleModeQubit,      // qubit-assisted single-mode
        Noon,                     // N00N interferometer
        NoonQubit,                // two-mode qubit-assisted
        CatState,                 // N-qubit cat-state interferometer
        FockPostselected,         // post-selected prep of (|0> +- |N>)/sqrt2
        FockCoherentPrep,         // coherent prep via controlled-Z_N
        NoonPostselected,         // post-selected N00N prep
        NoonCoherentPrep,         // coherent N00N prep via controlled-P_N
        CoherentSingleModeQubit,  // quantum-switch single-mode protocol
        ModalCatPostselected,     // post-selected modal cat prep
        ModalCatCoherent,         // coherent modal cat prep
        CoherentTwoModeQubit,     // two-switch two-mode protocol
        ObboPostselected,         // post-selected 0BB0 prep
        ObboCoherent,             // coherent 0BB0 prep
        ObboKerrPrep,             // Kerr-interferometer 0BB0 prep
        ObboKerrPrepQubits        // qubit translation of the Kerr prep
    };
    Kind kind{};
    int n = 0;        // particle/photon number for Fock-family protocols
    cdouble alpha{};  // coherent amplitude for coherent-family protocols

    static ProtocolId fock(Kind k, int n) { return {k, n, {}}; }
    static ProtocolId coherent(Kind k, cdouble a) { return {k, 0, a}; }

    bool uses_alpha() const {
        switch (kind) {
            case Kind::ConventionalCoherent: case Kind::CoherentSingleModeQubit:
            case Kind::ModalCatPostselected: case Kind::ModalCatCoherent:
            case Kind::CoherentTwoModeQubit: case Kind::ObboPostselected:
            case Kind::ObboCoherent: case Kind::ObboKerrPrep:
                return true;
            default:
                return false;
        }
    }

    std::string name() const {
        switch (kind) {
            case Kind::ConventionalQubit: return "conventional-qubit";
            case Kind::ConventionalModal: return "conventional-modal";
            case Kind::ConventionalCoherent: return "conventional-coherent";
            case Kind::FockSingleMode: return "fock-single-mode";
            case Kind::FockSingleModeQubit: return "fock-single-mode-qubit";
            case Kind::Noon: return "noon";
            case Kind::NoonQubit: return "noon-qubit";
            case Kind::CatState: return "cat-state";
            case Kind::FockPostselected: return "fock-postselected";
            case Kind::FockCoherentPrep: return "fock-coherent-prep";
            case Kind::NoonPostselected: return "noon-postselected";
            case Kind::NoonCoherentPrep: return "noon-coherent-prep";
            case Kind::CoherentSingleModeQubit: return "coherent-single-mode-qubit";
            case Kind::ModalCatPostselected: return "modal-cat-postselected";
            case Kind::ModalCatCoherent: return "modal-cat-coherent";
            case Kind::CoherentTwoModeQubit: return "coherent-two-mode-qubit";
            case Kind::ObboPostselected: return "obbo-postselected";
            case Kind::ObboCoherent: return "obbo-coherent";
            case Kind::ObboKerrPrep: return "obbo-kerr-prep";
            case Kind::ObboKerrPrepQubits: return "obbo-kerr-prep-qubits";
        }
        return "?";
    }

    static std::vector<Kind> all_kinds() {
        return {Kind::ConventionalQubit, Kind::ConventionalModal, Kind::ConventionalCoherent,
                Kind::FockSingleMode, Kind::FockSingleModeQubit, Kind::Noon, Kind::NoonQubit,
                Kind::CatState, Kind::FockPostselected, Kind::FockCoherentPrep,
                Kind::NoonPostselected, Kind::NoonCoherentPrep, Kind::CoherentSingleModeQubit,
                Kind::ModalCatPostselected, Kind::ModalCatCoherent, Kind::CoherentTwoModeQubit,
                Kind::ObboPostselected, Kind::ObboCoherent, Kind::ObboKerrPrep,
                Kind::ObboKerrPrepQubits};
    }

    static std::optional<Kind> kind_from_name(const std::string& s) {
        for (Kind k : all_kinds())
            if (ProtocolId{k}.name() == s) return k;
        return std::nullopt;
    }
};

namespace detail {

inline void require_fock_param(const ProtocolId& id) {
    if (id.n < 1) throw Error("BadParameter", "protocol needs N >= 1");
}
inline void require_alpha_param(const ProtocolId& id) {
    if (std::abs(id.alpha) == 0.0) throw Error("BadParameter", "protocol needs alpha != 0");
}

}  // namespace detail

// Circuit for each protocol, gate for gate. The phase_marker tags the first
// instruction of the phase-shift stage, so the state entering the phase
// shifter can be inspected.
inline CircuitIR build(const ProtocolId& id) {
    using K = ProtocolId::Kind;
    using GK = GateSpec::Kind;
    CircuitIR c;
    auto mark = [&] { c.phase_marker = static_cast<int>(c.instrs.size()); };
    const double ampl = std::abs(id.alpha);
    const int policy_cut = id.uses_alpha() ? cutoff_for_amplitude(ampl) : 0;

    switch (id.kind) {
        case K::ConventionalQubit: {
            detail::require_fock_param(id);
            std::vector<int> q, zc;
            std::vector<std::string> zl;
            for (int j = 1; j <= id.n; ++j) q.push_back(c.add_qubit("q" + std::to_string(j)));
            for (int j = 1; j <= id.n; ++j) {
                zl.push_back("z" + std::to_string(j));
                zc.push_back(c.add_classical(zl.back(), true));
            }
            c.add_classical("2m", false);
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::rotation(0, 1, 0, Angle{M_PI / 2, 0}), {q[j]}));
            mark();
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::rotation(0, 0, 1, phi_angle()), {q[j]}));
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::rotation(0, 1, 0, Angle{-M_PI / 2, 0}), {q[j]}));
            for (int j = 0; j < id.n; ++j) c.instrs.push_back(Instruction::measure_z(q[j], zl[j]));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Sum}, zl, "2m"));
            c.outputs = {"2m"};
            break;
        }
        case K::ConventionalModal:
        case K::ConventionalCoherent: {
            int cut;
            WireInput in0;
            if (id.kind == K::ConventionalModal) {
                detail::require_fock_param(id);
                cut = id.n;
                in0 = {WireInput::Kind::Fock, id.n, {}};
            } else {
                detail::require_alpha_param(id);
                cut = policy_cut;
                in0 = {WireInput::Kind::Coherent, 0, id.alpha};
            }
            int m0 = c.add_mode("m0", cut, in0);
            int m1 = c.add_mode("m1", cut);
            c.add_classical("k0", false);
            c.add_classical("k1", false);
            c.add_classical("2m", false);
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(M_PI / 2), {m0, m1}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(-M_PI / 2), {m0, m1}));
            c.instrs.push_back(Instruction::count(m0, "k0"));
            c.instrs.push_back(Instruction::count(m1, "k1"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Difference}, {"k0", "k1"}, "2m"));
            c.outputs = {"2m"};
            break;
        }
        case K::FockSingleMode: {
            detail::require_fock_param(id);
            int m0 = c.add_mode("m0", id.n);
            c.add_classical("k", false);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m0}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m0}));
            c.instrs.push_back(Instruction::count(m0, "k"));
            ClassicalGate map{ClassicalGate::Kind::MapCount};
            map.level = id.n;
            c.instrs.push_back(Instruction::classical(map, {"k"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::FockSingleModeQubit: {
            detail::require_fock_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", id.n);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceX, id.n), {m0},
                                                    QuantumControl{q0, 1}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceX, id.n), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::Noon: {
            detail::require_fock_param(id);
            int m0 = c.add_mode("m0", id.n);
            int m1 = c.add_mode("m1", id.n);
            c.add_classical("k0", false);
            c.add_classical("k1", false);
            c.add_classical("s0", true);
            c.add_classical("s1", true);
            c.add_classical("z", true);
            c.joints.push_back({JointInput::Kind::Noon, m0, m1, id.n, {}});
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m1}));
            c.instrs.push_back(Instruction::count(m0, "k0"));
            c.instrs.push_back(Instruction::count(m1, "k1"));
            ClassicalGate map{ClassicalGate::Kind::MapCount};
            map.level = id.n;
            c.instrs.push_back(Instruction::classical(map, {"k0"}, "s0"));
            c.instrs.push_back(Instruction::classical(map, {"k1"}, "s1"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Product}, {"s0", "s1"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::NoonQubit: {
            detail::require_fock_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", id.n, {WireInput::Kind::Fock, id.n, {}});
            int m1 = c.add_mode("m1", id.n);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::ModalSwap), {m0, m1},
                                                    QuantumControl{q0, 1}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::ModalSwap), {m0, m1},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::CatState: {
            detail::require_fock_param(id);
            int q0 = c.add_qubit("q0");
            std::vector<int> q;
            for (int j = 1; j <= id.n; ++j) q.push_back(c.add_qubit("q" + std::to_string(j)));
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliX), {q[j]},
                                                        QuantumControl{q0, 1}));
            mark();
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::rotation(0, 0, 1, phi_angle()), {q[j]}));
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliX), {q[j]},
                                                        QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::FockPostselected: {
            detail::require_fock_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", id.n);
            c.add_classical("y", true);
            c.add_classical("k", false);
            c.add_classical("k2", false);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceX, id.n), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "y"));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m0}));
            c.instrs.push_back(Instruction::count(m0, "k"));
            ClassicalGate cex{ClassicalGate::Kind::ControlledExchange};
            cex.level = id.n;
            c.instrs.push_back(Instruction::classical(cex, {"k", "y"}, "k2"));
            ClassicalGate map{ClassicalGate::Kind::MapCount};
            map.level = id.n;
            c.instrs.push_back(Instruction::classical(map, {"k2"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::FockCoherentPrep: {
            detail::require_fock_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", id.n);
            c.add_classical("k", false);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceX, id.n), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceZ, id.n), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceH, id.n), {m0}));
            c.instrs.push_back(Instruction::count(m0, "k"));
            ClassicalGate map{ClassicalGate::Kind::MapCount};
            map.level = id.n;
            c.instrs.push_back(Instruction::classical(map, {"k"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::NoonPostselected:
        case K::NoonCoherentPrep: {
            detail::require_fock_param(id);
            bool postselected = id.kind == K::NoonPostselected;
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", id.n, {WireInput::Kind::Fock, id.n, {}});
            int m1 = c.add_mode("m1", id.n);
            if (postselected) c.add_classical("y", true);
            c.add_classical("k", false);
            if (postselected) c.add_classical("x", true);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::ModalSwap), {m0, m1},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            if (postselected) {
                c.instrs.push_back(Instruction::measure_z(q0, "y"));
            } else {
                c.instrs.push_back(Instruction::unitary(GateSpec::subspace(GK::SubspaceP, id.n), {m0, m1},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            }
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(-M_PI / 2), {m0, m1}));
            c.instrs.push_back(Instruction::count(m1, "k"));
            if (postselected) {
                c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "x"));
                c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Product}, {"x", "y"}, "z"));
            } else {
                c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "z"));
            }
            c.outputs = {"z"};
            break;
        }
        case K::CoherentSingleModeQubit: {
            detail::require_alpha_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", policy_cut);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(-id.alpha), {m0},
                                                    QuantumControl{q0, 1}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::ModalCatPostselected: {
            detail::require_alpha_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", policy_cut);
            c.add_classical("y", true);
            c.add_classical("k", false);
            c.add_classical("x", true);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::measure_z(q0, "y"));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(-id.alpha / 2.0), {m0}));
            c.instrs.push_back(Instruction::count(m0, "k"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "x"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Product}, {"x", "y"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::ModalCatCoherent: {
            detail::require_alpha_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", policy_cut);
            c.add_classical("k", false);
            c.add_classical("z", true);
            auto sandwich = [&] {  // D(a/2) . controlled-Pi . D(-a/2)
                c.instrs.push_back(Instruction::unitary(GateSpec::displacement(-id.alpha / 2.0), {m0}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Parity), {m0},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha / 2.0), {m0}));
            };
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            sandwich();  // quantum switch per Fig. 17, leading controlled-Pi dropped on vacuum
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            sandwich();  // disentangling controlled-(D(a) Pi)
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(phi_angle()), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(-id.alpha / 2.0), {m0}));
            c.instrs.push_back(Instruction::count(m0, "k"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::CoherentTwoModeQubit:
        case K::ObboPostselected:
        case K::ObboCoherent: {
            detail::require_alpha_param(id);
            int q0 = c.add_qubit("q0");
            int m0 = c.add_mode("m0", policy_cut);
            int m1 = c.add_mode("m1", policy_cut);
            bool postselected = id.kind == K::ObboPostselected;
            if (postselected) c.add_classical("y", true);
            if (id.kind != K::CoherentTwoModeQubit) c.add_classical("k", false);
            if (postselected) c.add_classical("x", true);
            c.add_classical("z", true);
            // two quantum switches, the second effectively controlled on |0>
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m1},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliX), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m0},
                                                    QuantumControl{q0, 1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliX), {q0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
            if (postselected) {
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
                c.instrs.push_back(Instruction::measure_z(q0, "y"));
            } else if (id.kind == K::ObboCoherent) {
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
                // controlled-Pi then controlled-D(alpha) on both modes
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Parity), {m0},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Parity), {m1},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m0},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m1},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q0}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
            }
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            if (id.kind == K::CoherentTwoModeQubit) {
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::ModalSwap), {m0, m1},
                                                        QuantumControl{q0, 1}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q0}));
                c.instrs.push_back(Instruction::measure_z(q0, "z"));
            } else {
                c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(-M_PI / 2), {m0, m1}));
                c.instrs.push_back(Instruction::count(m1, "k"));
                if (postselected) {
                    c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "x"));
                    c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Product}, {"x", "y"}, "z"));
                } else {
                    c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "z"));
                }
            }
            c.outputs = {"z"};
            break;
        }
        case K::ObboKerrPrep: {
            detail::require_alpha_param(id);
            int m0 = c.add_mode("m0", policy_cut);
            int m1 = c.add_mode("m1", policy_cut);
            c.add_classical("k", false);
            c.add_classical("z", true);
            c.instrs.push_back(Instruction::unitary(GateSpec::displacement(id.alpha), {m0}));
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(M_PI / 2), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::self_kerr(M_PI / 2), {m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::phase_shift(Angle{M_PI, 0}), {m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(M_PI / 2), {m0, m1}));
            mark();
            c.instrs.push_back(Instruction::unitary(GateSpec::rotation_modes(0, 0, 1, phi_angle()), {m0, m1}));
            c.instrs.push_back(Instruction::unitary(GateSpec::beamsplitter(-M_PI / 2), {m0, m1}));
            c.instrs.push_back(Instruction::count(m1, "k"));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::ParityOfCount}, {"k"}, "z"));
            c.outputs = {"z"};
            break;
        }
        case K::ObboKerrPrepQubits: {
            detail::require_fock_param(id);
            std::vector<int> q;
            std::vector<std::string> sl;
            for (int j = 1; j <= id.n; ++j) q.push_back(c.add_qubit("q" + std::to_string(j)));
            for (int j = 1; j <= id.n; ++j) {
                sl.push_back("s" + std::to_string(j));
                c.add_classical(sl.back(), true);
            }
            c.add_classical("z", true);
            // first beamsplitter: e^{+iY pi/4} = ZH per qubit; Kerr block: S
            // per qubit plus controlled-SIGN between every pair; second
            // beamsplitter: e^{-iY pi/4} = XH per qubit
            for (int j = 0; j < id.n; ++j) {
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliZ), {q[j]}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q[j]}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::SGate), {q[j]}));
            }
            for (int j = 0; j < id.n; ++j)
                for (int k = j + 1; k < id.n; ++k)
                    c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliZ), {q[k]},
                                                            QuantumControl{q[j], 1}));
            for (int j = 0; j < id.n; ++j) {
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q[j]}));
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::PauliX), {q[j]}));
            }
            mark();
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::rotation(0, 0, 1, phi_angle()), {q[j]}));
            for (int j = 0; j < id.n; ++j)
                c.instrs.push_back(Instruction::unitary(GateSpec::simple(GK::Hadamard), {q[j]}));
            for (int j = 0; j < id.n; ++j) c.instrs.push_back(Instruction::measure_z(q[j], sl[j]));
            c.instrs.push_back(Instruction::classical({ClassicalGate::Kind::Product}, sl, "z"));
            c.outputs = {"z"};
            break;
        }
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Closed-form reference fringes (the paper's exact expressions).

namespace closed_form {

inline double coherent_signal(double a2, double phi) {
    return std::sin(a2 * std::sin(phi)) * std::exp(-2 * a2 * std::sin(phi / 2) * std::sin(phi / 2));
}

inline double binom_coeff(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace closed_form

// Reference probability for the protocol's output value at phase phi, where
// the paper provides one.
inline std::optional<double> reference_prob(const ProtocolId& id, double phi, double value) {
    using K = ProtocolId::Kind;
    double a2 = std::norm(id.alpha);
    double z = value;
    switch (id.kind) {
        case K::FockSingleMode: case K::FockSingleModeQubit: case K::Noon: case K::NoonQubit:
        case K::CatState: case K::FockPostselected: case K::FockCoherentPrep:
        case K::NoonPostselected: case K::NoonCoherentPrep:
            return 0.5 * (1 + z * std::cos(id.n * phi));
        case K::CoherentSingleModeQubit: case K::ModalCatPostselected:
            return 0.5 * (1 + z * closed_form::coherent_signal(a2, phi));
        case K::ModalCatCoherent:
            return 0.5 * (1 +
                          0.5 * z * std::exp(-a2 / 2) *
                              (1 + std::exp(-4 * a2 * std::sin(phi / 2) * std::sin(phi / 2))) +
                          z * closed_form::coherent_signal(a2, phi));
        case K::CoherentTwoModeQubit: case K::ObboPostselected:
            return 0.5 * (1 - z * closed_form::coherent_signal(a2, phi));
        case K::ObboCoherent: case K::ObboKerrPrep:
            return 0.5 * (1 + z * std::exp(-a2) - z * closed_form::coherent_signal(a2, phi));
        case K::ObboKerrPrepQubits:
            return 0.5 * (1 - z * std::sin(id.n * phi));
        case K::ConventionalQubit: case K::ConventionalModal: {
            // binomial photon partition: 2m = 2k - N
            double twom = value;
            double k = (twom + id.n) / 2;
            if (k < 0 || k > id.n || std::abs(k - std::round(k)) > 1e-9) return 0.0;
            double c2 = std::cos(phi / 2) * std::cos(phi / 2);
            int ki = static_cast<int>(std::round(k));
            return closed_form::binom_coeff(id.n, ki) * std::pow(c2, ki) * std::pow(1 - c2, id.n - ki);
        }
        case K::ConventionalCoherent: {
            // Poisson average of the binomial partition (paper's construction)
            double c2 = std::cos(phi / 2) * std::cos(phi / 2);
            int cut = 2 * cutoff_for_amplitude(std::abs(id.alpha));
            double total = 0, pois = std::exp(-a2);
            for (int n = 0; n <= cut; ++n) {
                double k = (value + n) / 2;
                if (k >= 0 && k <= n && std::abs(k - std::round(k)) < 1e-9) {
                    int ki = static_cast<int>(std::round(k));
                    total += pois * closed_form::binom_coeff(n, ki) * std::pow(c2, ki) *
                             std::pow(1 - c2, n - ki);
                }
                pois *= a2 / (n + 1);
            }
            return total;
        }
        default:
            return std::nullopt;
    }
}

inline std::string signal_label(const ProtocolId& id) {
    using K = ProtocolId::Kind;
    switch (id.kind) {
        case K::ConventionalQubit: case K::ConventionalModal: case K::ConventionalCoherent:
            return "2m";
        default:
            return "z";
    }
}

// Fringe-quadrature operating point for sensitivity estimates.
inline double operating_point(const ProtocolId& id) {
    using K = ProtocolId::Kind;
    switch (id.kind) {
        case K::ConventionalQubit: case K::ConventionalModal: case K::ConventionalCoherent:
            return M_PI / 2;
        case K::CoherentSingleModeQubit: case K::ModalCatPostselected: case K::ModalCatCoherent:
        case K::CoherentTwoModeQubit: case K::ObboPostselected: case K::ObboCoherent:
        case K::ObboKerrPrep:
            return 0.0;
        case K::ObboKerrPrepQubits:
            return 0.0;  // the S-shifted fringe sin(N phi) is steepest at 0
        default:
            return M_PI / (2 * id.n);
    }
}

struct FringePoint {
    double phi;
    OutcomeDistribution dist;  // marginal over the protocol's output wire
    double mean = 0;
    double variance = 0;
    double ref_err = 0;  // max |p - reference| over outcomes, when a reference exists
};

struct ProtocolReport {
    ProtocolId id;
    std::string signal;
    std::vector<FringePoint> points;
    double max_ref_err = 0;
    bool has_reference = false;
};

inline ProtocolReport fringe_sweep(const ProtocolId& id, const std::vector<double>& grid = default_phi_grid()) {
    CircuitIR c = build(id);
    ProtocolReport report;
    report.id = id;
    report.signal = signal_label(id);
    for (double phi : grid) {
        FringePoint pt;
        pt.phi = phi;
        pt.dist = simulate(c, phi).marginal({report.signal});
        pt.mean = pt.dist.mean(report.signal);
        pt.variance = pt.dist.variance(report.signal);
        for (const auto& [k, p] : pt.dist.probs) {
            auto ref = reference_prob(id, phi, k[0]);
            if (ref) {
                report.has_reference = true;
                pt.ref_err = std::max(pt.ref_err, std::abs(p - *ref));
            }
        }
        report.max_ref_err = std::max(report.max_ref_err, pt.ref_err);
        report.points.push_back(std::move(pt));
    }
    return report;
}

struct SensitivityRecord {
    double phi0 = 0;
    double delta_phi = 0;
    double derivative = 0;
    double stddev = 0;
};

// Error-propagation sensitivity at phi0: central finite difference with one
// Richardson refinement (steps h and h/2), delta_phi = stddev / |derivative|.
inline SensitivityRecord sensitivity(const ProtocolId& id, double phi0) {
    CircuitIR c = build(id);
    std::string signal = signal_label(id);
    auto mean_at = [&](double phi) { return simulate(c, phi).marginal({signal}).mean(signal); };
    const double h = 1e-5;
    double d_h = (mean_at(phi0 + h) - mean_at(phi0 - h)) / (2 * h);
    double d_h2 = (mean_at(phi0 + h / 2) - mean_at(phi0 - h / 2)) / h;
    double deriv = (4 * d_h2 - d_h) / 3;
    if (std::abs(deriv) <= tol().deriv_floor)
        throw Error("DegenerateOperatingPoint", "|d<signal>/dphi| below the derivative floor");
    OutcomeDistribution at0 = simulate(c, phi0).marginal({signal});
    SensitivityRecord r;
    r.phi0 = phi0;
    r.derivative = deriv;
    r.stddev = std::sqrt(at0.variance(signal));
    r.delta_phi = r.stddev / std::abs(deriv);
    return r;
}

struct ScalingPoint {
    double parameter = 0;  // N or |alpha|^2
    double resource = 0;
    double delta_phi = 0;
};

struct ScalingFit {
    std::vector<ScalingPoint> points;
    double exponent = 0;  // least-squares slope of log dphi vs log resource
};

// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<std::pair<double, double>>& xy) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [xv, yv] : xy) {
        double x = std::log(xv), y = std::log(yv);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double n = static_cast<double>(xy.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Resource accounting: N for Fock families, mean photon number |alpha|^2 for
// coherent families (parameters are interpreted as |alpha|^2 there).
inline ScalingFit scaling_fit(ProtocolId::Kind kind, const std::vector<double>& params) {
    ScalingFit fit;
    for (double p : params) {
        ProtocolId id;
        if (ProtocolId{kind}.uses_alpha()) {
            id = ProtocolId::coherent(kind, std::sqrt(p));
        } else {
            id = ProtocolId::fock(kind, static_cast<int>(std::lround(p)));
        }
        SensitivityRecord s = sensitivity(id, operating_point(id));
        fit.points.push_back({p, p, s.delta_phi});
    }
    std::vector<std::pair<double, double>> xy;
    for (const auto& pt : fit.points) xy.push_back({pt.resource, pt.delta_phi});
    fit.exponent = log_log_slope(xy);
    return fit;
}

// Distribution (and per-outcome conditional states) of the prefix preceding
// the phase shifter; the map key is empty for fully coherent preparations.
inline OutcomeDistribution prepared_state(const ProtocolId& id) {
    CircuitIR c = build(id);
    if (c.phase_marker < 0) throw Error("BadParameter", "protocol has no phase stage marker");
    CircuitIR prefix = c;
    prefix.instrs.assign(c.instrs.begin(), c.instrs.begin() + c.phase_marker);
    prefix.outputs.clear();
    // drop classical wires the prefix never writes
    std::set<std::string> written;
    for (const auto& ins : prefix.instrs)
        if (!ins.out.empty()) written.insert(ins.out);
    CircuitIR trimmed;
    trimmed.joints = prefix.joints;
    std::vector<int> remap(prefix.wires.size(), -1);
    for (size_t i = 0; i < prefix.wires.size(); ++i) {
        const Wire& w = prefix.wires[i];
        if (w.classical() && !written.count(w.name)) continue;
        remap[i] = static_cast<int>(trimmed.wires.size());
        trimmed.wires.push_back(w);
        trimmed.inputs.push_back(prefix.inputs[i]);
    }
    for (auto& j : trimmed.joints) {
        j.wire_a = remap[j.wire_a];
        j.wire_b = remap[j.wire_b];
    }
    for (Instruction ins : prefix.instrs) {
        for (int& t : ins.targets) t = remap[t];
        if (ins.qctrl) ins.qctrl->wire = remap[ins.qctrl->wire];
        trimmed.instrs.push_back(std::move(ins));
    }
    SimOptions opts;
    opts.conditional_states = true;
    return simulate(trimmed, 0.0, opts);
}

// Conditional fringes of the post-selected protocols: p(x|y), the y marginal,
// the phi-independent x marginal, and the z = x y fringe.
struct ConditionalPoint {
    double phi;
    double r_y_plus = 0;                       // P(y=+1)
    std::map<std::pair<int, int>, double> p_x_given_y;
    std::map<int, double> p_x;                 // unconditioned
    std::map<int, double> p_z;
};

inline std::vector<ConditionalPoint> conditional_fringes(const ProtocolId& id,
                                                         const std::vector<double>& grid = default_phi_grid()) {
    using K = ProtocolId::Kind;
    if (id.kind != K::FockPostselected && id.kind != K::NoonPostselected &&
        id.kind != K::ModalCatPostselected && id.kind != K::ObboPostselected)
        throw Error("BadParameter", "conditional fringes need a post-selected protocol");
    CircuitIR c = build(id);
    std::vector<ConditionalPoint> out;
    for (double phi : grid) {
        OutcomeDistribution joint = simulate(c, phi).marginal({"y", "z"});
        ConditionalPoint pt;
        pt.phi = phi;
        for (const auto& [k, p] : joint.probs) {
            int y = k[0] > 0 ? 1 : -1;
            int z = k[1] > 0 ? 1 : -1;
            int x = z * y;  // z = x y for every post-selected variant
            if (y == 1) pt.r_y_plus += p;
            pt.p_x_given_y[{x, y}] += p;
            pt.p_x[x] += p;
            pt.p_z[z] += p;
        }
        for (auto& [key, p] : pt.p_x_given_y) {
            double ry = key.second == 1 ? pt.r_y_plus : 1 - pt.r_y_plus;
            if (ry > 0) p /= ry;
        }
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace ifq
