#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "interferoq/gates.hpp"
#include "interferoq/schwinger.hpp"

using namespace ifq;
using namespace ifq::testing;

namespace {

Mat qubit_rotation_power(double nx, double ny, double nz, double theta, int n) {
    Mat m = rotation_qubit(nx, ny, nz, theta).m;
    Mat out = Mat::Identity(1, 1);
    for (int j = 0; j < n; ++j) out = kron(out, m);
    return out;
}

int popcount(long s) {
    int c = 0;
    while (s) { c += s & 1; s >>= 1; }
    return c;
}

}  // namespace

TEST_CASE("Dicke states: trivial, paper N=2, and enumerated N=3") {
    REQUIRE(max_abs_diff(dicke_state({1, 0}).amps, StateVector::basis(HilbertSpec::qubit(), 0).amps) == 0.0);

    StateVector d21 = dicke_state({2, 1});
    Vec expect = Vec::Zero(4);
    expect(1) = expect(2) = 1 / std::sqrt(2.0);
    REQUIRE(max_abs_diff(d21.amps, expect) < 1e-15);

    // independent oracle: enumerate the C(3,2) bit strings and normalize
    StateVector d32 = dicke_state({3, 2});
    Vec e3 = Vec::Zero(8);
    for (long s = 0; s < 8; ++s)
        if (popcount(s) == 2) e3(s) = 1.0;
    e3 /= e3.norm();
    REQUIRE(max_abs_diff(d32.amps, e3) < 1e-15);
}

TEST_CASE("fock_state basis vectors and cutoff guard") {
    HilbertSpec m2 = HilbertSpec::modes(3, 3);
    REQUIRE(std::abs(fock_state(0, 0, m2).amps(0) - 1.0) == 0.0);
    StateVector f30 = fock_state(3, 0, m2);
    REQUIRE(std::abs(f30.amps(3 * 4 + 0) - 1.0) == 0.0);
    StateVector f11 = fock_state(1, 1, m2);
    REQUIRE(std::abs(f11.amps(1 * 4 + 1) - 1.0) == 0.0);
    REQUIRE_THROWS_AS(fock_state(4, 0, m2), Error);
}

TEST_CASE("J_z eigenvalues and J_x on one qubit") {
    HilbertSpec m2 = HilbertSpec::modes(3, 3);
    Operator jz = j_modes(Axis::Z, m2);
    for (int n0 = 0; n0 <= 3; ++n0)
        for (int n1 = 0; n1 <= 3; ++n1)
            REQUIRE(std::abs(jz.m(n0 * 4 + n1, n0 * 4 + n1) - 0.5 * (n0 - n1)) < 1e-15);

    Operator jx = j_qubits(Axis::X, 1);
    REQUIRE(max_abs_diff(jx.m, 0.5 * pauli_x().m) == 0.0);
}

TEST_CASE("[Jx, Jy] = i Jz on qubit reps and on complete modal sectors") {
    for (int n = 1; n <= 4; ++n) {
        Operator jx = j_qubits(Axis::X, n), jy = j_qubits(Axis::Y, n), jz = j_qubits(Axis::Z, n);
        Mat comm = jx.m * jy.m - jy.m * jx.m;
        REQUIRE(max_abs_diff(comm, cdouble(0, 1) * jz.m) < 1e-12);
    }
    HilbertSpec m2 = HilbertSpec::modes(5, 5);
    Operator jx = j_modes(Axis::X, m2), jy = j_modes(Axis::Y, m2), jz = j_modes(Axis::Z, m2);
    Mat comm = jx.m * jy.m - jy.m * jx.m;
    Mat expect = cdouble(0, 1) * jz.m;
    // complete sectors only: total photon number <= min cutoff
    for (int s = 0; s <= 5; ++s)
        for (int n0 = 0; n0 <= s; ++n0)
            for (int m0 = 0; m0 <= s; ++m0)
                REQUIRE(std::abs(comm(n0 * 6 + (s - n0), m0 * 6 + (s - m0)) -
                                 expect(n0 * 6 + (s - n0), m0 * 6 + (s - m0))) < 1e-12);
}

TEST_CASE("sector map sends Dicke states to Fock states and back") {
    SectorMap sm(2, 3, 3);
    StateVector image = sm.symmetric_to_modes(dicke_state({2, 1}));
    REQUIRE(max_abs_diff(image.amps, fock_state(1, 1, sm.mode_spec()).amps) < 1e-14);

    StateVector all_zero = StateVector::basis(HilbertSpec::qubits(2), 0);
    REQUIRE(max_abs_diff(sm.symmetric_to_modes(all_zero).amps, fock_state(2, 0, sm.mode_spec()).amps) < 1e-14);

    // linearity over the N=2 dictionary
    Vec v = Vec::Zero(4);
    v(0) = 1 / std::sqrt(2.0);
    v(3) = -1 / std::sqrt(2.0);
    StateVector bell(HilbertSpec::qubits(2), v);
    StateVector img = sm.symmetric_to_modes(bell);
    Vec expect = (fock_state(2, 0, sm.mode_spec()).amps - fock_state(0, 2, sm.mode_spec()).amps) / std::sqrt(2.0);
    REQUIRE(max_abs_diff(img.amps, expect) < 1e-14);

    StateVector back = sm.modes_to_symmetric(img);
    REQUIRE(max_abs_diff(back.amps, bell.amps) < 1e-13);
}

TEST_CASE("sector map rejects non-symmetric and out-of-sector inputs") {
    SectorMap sm(2, 2, 2);
    StateVector antisym = StateVector::basis(HilbertSpec::qubits(2), 1);  // |01>
    REQUIRE_THROWS_AS(sm.symmetric_to_modes(antisym), Error);
    StateVector wrong_sector = fock_state(1, 0, sm.mode_spec());
    REQUIRE_THROWS_AS(sm.modes_to_symmetric(wrong_sector), Error);
    REQUIRE_THROWS_AS(SectorMap(3, 2, 3), Error);
}

TEST_CASE("isometry is an isometry onto the sector") {
    for (int n = 1; n <= 5; ++n) {
        SectorMap sm(n);
        Mat gram = sm.isometry() * sm.isometry().adjoint();
        REQUIRE(max_abs_diff(gram, Mat::Identity(n + 1, n + 1)) < 1e-12);
    }
}

TEST_CASE("J operators intertwine with the sector map on Dicke states") {
    for (int n = 1; n <= 6; ++n) {
        SectorMap sm(n);
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            Operator jq = j_qubits(ax, n);
            Operator jm = j_modes(ax, sm.mode_spec());
            for (int n1 = 0; n1 <= n; ++n1) {
                StateVector d = dicke_state({n, n1});
                StateVector lhs = sm.symmetric_to_modes(StateVector::raw(d.spec, jq.m * d.amps));
                Vec rhs = jm.m * sm.symmetric_to_modes(d).amps;
                REQUIRE(max_abs_diff(lhs.amps, rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("Fig. 1: linear-optics rotations match per-qubit rotations on the sector") {
    auto& g = rng(301);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n = 1; n <= 5; ++n) {
        SectorMap sm(n);
        for (int trial = 0; trial < 4; ++trial) {
            double x = u(g), y = u(g), z = u(g);
            double r = std::sqrt(x * x + y * y + z * z);
            if (r < 1e-3) continue;
            double theta = u(g) * M_PI * 2;
            Operator modal = rotation_modes(x / r, y / r, z / r, theta, sm.mode_spec());
            Mat qubit_side = qubit_rotation_power(x / r, y / r, z / r, theta, n);
            Mat lhs = sm.restrict_mode_operator(modal);
            Mat rhs = sm.restrict_qubit_operator(Operator(sm.qubit_spec(), qubit_side));
            REQUIRE(max_abs_diff(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("Fig. 2(a): all-pairs controlled-SIGN equals the mode-1 Kerr phase") {
    for (int n = 2; n <= 5; ++n) {
        SectorMap sm(n);
        long dq = sm.qubit_spec().total_dim();
        Mat cz = Mat::Zero(dq, dq);
        for (long s = 0; s < dq; ++s) {
            long pairs = static_cast<long>(popcount(s)) * (popcount(s) - 1) / 2;
            cz(s, s) = (pairs % 2 == 0) ? 1.0 : -1.0;  // e^{-i pi H}, H = #pairs both |1>
        }
        Mat modal = Mat::Zero(sm.mode_spec().total_dim(), sm.mode_spec().total_dim());
        int d1 = sm.mode_spec().at(1).dim;
        for (int n0 = 0; n0 < sm.mode_spec().at(0).dim; ++n0)
            for (int n1 = 0; n1 < d1; ++n1)
                modal(n0 * d1 + n1, n0 * d1 + n1) = std::exp(cdouble(0, -M_PI * n1 * (n1 - 1) / 2.0));
        Mat lhs = sm.restrict_qubit_operator(Operator(sm.qubit_spec(), cz));
        Mat rhs = sm.restrict_mode_operator(Operator(sm.mode_spec(), modal));
        REQUIRE(max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("Fig. 2(b): cross-Kerr equals the J_z^2 qubit phase") {
    double theta = 0.7;
    for (int n = 2; n <= 4; ++n) {
        SectorMap sm(n);
        long dq = sm.qubit_spec().total_dim();
        Mat qubit_side = Mat::Zero(dq, dq);
        for (long s = 0; s < dq; ++s) {
            double m = 0.5 * (n - 2 * popcount(s));
            qubit_side(s, s) = std::exp(cdouble(0, -theta * (n * n - 4 * m * m) / 4.0));
        }
        Operator xk = cross_kerr(theta, sm.mode_spec());
        REQUIRE(max_abs_diff(sm.restrict_qubit_operator(Operator(sm.qubit_spec(), qubit_side)),
                             sm.restrict_mode_operator(xk)) < 1e-12);
    }
}

TEST_CASE("Fig. 2(c): Z-rotation by N*theta equals the quadratic modal phase") {
    double theta = 0.37;
    for (int n = 1; n <= 5; ++n) {
        SectorMap sm(n);
        Mat per_qubit = rotation_qubit(0, 0, 1, n * theta).m;
        Mat qubit_side = Mat::Identity(1, 1);
        for (int j = 0; j < n; ++j) qubit_side = kron(qubit_side, per_qubit);
        Mat modal = Mat::Zero(sm.mode_spec().total_dim(), sm.mode_spec().total_dim());
        int d1 = sm.mode_spec().at(1).dim;
        for (int n0 = 0; n0 < sm.mode_spec().at(0).dim; ++n0)
            for (int n1 = 0; n1 < d1; ++n1)
                modal(n0 * d1 + n1, n0 * d1 + n1) =
                    std::exp(cdouble(0, -theta * (n0 * n0 - n1 * n1) / 2.0));
        REQUIRE(max_abs_diff(sm.restrict_qubit_operator(Operator(sm.qubit_spec(), qubit_side)),
                             sm.restrict_mode_operator(Operator(sm.mode_spec(), modal))) < 1e-12);
    }
}

TEST_CASE("parity identities: Z^N = I(x)Pi and (-Z)^N = Pi(x)I on the sector") {
    for (int n = 1; n <= 5; ++n) {
        SectorMap sm(n);
        Mat qubit_z = Mat::Identity(1, 1), qubit_mz = Mat::Identity(1, 1);
        for (int j = 0; j < n; ++j) {
            qubit_z = kron(qubit_z, pauli_z().m);
            qubit_mz = kron(qubit_mz, -pauli_z().m);
        }
        Operator pi1 = tensor(Operator::identity(sm.mode_spec().select({0})),
                              parity(sm.mode_spec().at(1).dim));
        Operator pi0 = tensor(parity(sm.mode_spec().at(0).dim),
                              Operator::identity(sm.mode_spec().select({1})));
        REQUIRE(max_abs_diff(sm.restrict_qubit_operator(Operator(sm.qubit_spec(), qubit_z)),
                             sm.restrict_mode_operator(pi1)) < 1e-12);
        REQUIRE(max_abs_diff(sm.restrict_qubit_operator(Operator(sm.qubit_spec(), qubit_mz)),
                             sm.restrict_mode_operator(pi0)) < 1e-12);
    }
}

TEST_CASE("coherent states have a Poisson number distribution") {
    double a = std::sqrt(2.0);
    StateVector alpha = coherent_state(a, HilbertSpec::mode(cutoff_for_amplitude(a)));
    // independent oracle: Poisson pmf
    double lambda = a * a;
    double term = std::exp(-lambda);
    for (int n = 0; n <= 10; ++n) {
        REQUIRE(std::norm(alpha.amps(n)) == Catch::Approx(term).margin(1e-12));
        term *= lambda / (n + 1);
    }
}
