#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "interferoq/gates.hpp"

using namespace ifq;
using namespace ifq::testing;

namespace {

// max |A-B| over columns of Fock levels below the guard
double guarded_diff(const Mat& a, const Mat& b, int guard_cols) {
    return (a.leftCols(guard_cols) - b.leftCols(guard_cols)).cwiseAbs().maxCoeff();
}

double binom(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

TEST_CASE("qubit rotations reproduce the explicit 2x2 matrix") {
    REQUIRE(max_abs_diff(rotation_qubit(0, 0, 1, 0).m, Mat::Identity(2, 2)) == 0.0);

    Mat bs(2, 2);
    bs << 1, cdouble(0, -1), cdouble(0, -1), 1;
    bs /= std::sqrt(2.0);
    REQUIRE(max_abs_diff(rotation_qubit(1, 0, 0, M_PI / 2).m, bs) < 1e-15);

    Mat flip(2, 2);
    flip << 0, cdouble(0, -1), cdouble(0, -1), 0;
    REQUIRE(max_abs_diff(rotation_qubit(1, 0, 0, M_PI).m, flip) < 1e-15);

    REQUIRE_THROWS_AS(rotation_qubit(1, 1, 0, 0.3), Error);
}

TEST_CASE("modal rotations: identity, single photon through a beamsplitter, binomial split") {
    HilbertSpec m2 = HilbertSpec::modes(4, 4);
    REQUIRE(max_abs_diff(rotation_modes(0, 0, 1, 0, m2).m, Mat::Identity(25, 25)) < 1e-15);

    // frozen from the creation-operator transform: a' -> (a' - i b')/sqrt2
    Operator bs = beamsplitter(0.0, m2);
    Vec out = bs.m * fock_state(1, 0, m2).amps;
    Vec expect = (fock_state(1, 0, m2).amps + cdouble(0, -1) * fock_state(0, 1, m2).amps) / std::sqrt(2.0);
    REQUIRE(max_abs_diff(out, expect) < 1e-14);

    int n = 4;
    Vec split = bs.m * fock_state(n, 0, m2).amps;
    for (int k = 0; k <= n; ++k) {
        double p = std::norm(split((n - k) * 5 + k));
        REQUIRE(p == Catch::Approx(binom(n, k) / std::pow(2.0, n)).margin(1e-12));
    }
}

TEST_CASE("phase shifter diagonal and the differential split of e^{-i J_z phi}") {
    REQUIRE(max_abs_diff(phase_shifter(0, 5).m, Mat::Identity(5, 5)) == 0.0);
    double phi = 1.1;
    Operator ps = phase_shifter(phi, 5);
    REQUIRE(std::abs(ps.m(4, 4) - std::exp(cdouble(0, -4 * phi))) < 1e-15);

    HilbertSpec m2 = HilbertSpec::modes(3, 3);
    Operator jz_rot = rotation_modes(0, 0, 1, phi, m2);
    Operator split = tensor(phase_shifter(phi / 2, 4), phase_shifter(-phi / 2, 4));
    REQUIRE(max_abs_diff(jz_rot.m, split.m) < 1e-12);
}

TEST_CASE("displacement acts as the coherent series and respects the tail guard") {
    REQUIRE(max_abs_diff(displacement(0.0, 8).m, Mat::Identity(8, 8)) < 1e-14);

    cdouble alpha(1.2, -0.4);
    int dim = cutoff_for_amplitude(std::abs(alpha)) + 1;
    Operator d = displacement(alpha, dim);
    REQUIRE(d.is_unitary());
    Vec column = d.m.col(0);
    // independent oracle: e^{-|a|^2/2} a^n / sqrt(n!)
    cdouble term = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < dim - displacement_margin(std::abs(alpha)); ++n) {
        REQUIRE(std::abs(column(n) - term) < 1e-10);
        term *= alpha / std::sqrt(n + 1.0);
    }

    REQUIRE_THROWS_AS(displacement(3.0, 4), Error);
}

TEST_CASE("truncation policy keeps the Poisson tail below tolerance") {
    for (double a : {1.0, std::sqrt(2.0), 2.0, 3.0}) {
        int cut = cutoff_for_amplitude(a);
        // direct series summation as the oracle
        double lambda = a * a, term = std::exp(-lambda), cum = term;
        for (int n = 1; n <= cut; ++n) {
            term *= lambda / n;
            cum += term;
        }
        REQUIRE(1.0 - cum < tol().tail);
    }
}

TEST_CASE("displacement composition law on protocol-relevant states") {
    cdouble a(0.7, 0.2), b(-0.3, 0.5);
    double biggest = std::abs(a) + std::abs(b);
    int dim = cutoff_for_amplitude(biggest) + 1;
    Mat lhs = displacement(a, dim).m * displacement(b, dim).m;
    cdouble phase = std::exp(cdouble(0, std::imag(a * std::conj(b))));
    Mat rhs = phase * displacement(a + b, dim).m;
    // low Fock levels: the policy cutoff concentrates its accuracy there
    REQUIRE(guarded_diff(lhs, rhs, 7) < 1e-9);
    // coherent inputs within the policy amplitude
    HilbertSpec mode = HilbertSpec::mode(dim - 1);
    for (cdouble gamma : {cdouble(0.4, 0.1), cdouble(-0.6, 0.3)}) {
        Vec in = coherent_state(gamma, mode).amps;
        REQUIRE((lhs * in - rhs * in).cwiseAbs().maxCoeff() < 1e-9);
    }
    // inverse displacements cancel exactly (anti-parallel truncated generators commute)
    Mat inv = displacement(a, dim).m * displacement(-a, dim).m;
    REQUIRE((inv - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quantum-switch identity D(a/2) Pi D(-a/2) = D(a) Pi on the guarded block") {
    cdouble alpha(1.0, 0.8);
    int dim = cutoff_for_amplitude(std::abs(alpha)) + 1;
    Mat lhs = displacement(alpha / 2.0, dim).m * parity(dim).m * displacement(-alpha / 2.0, dim).m;
    Mat rhs = displacement(alpha, dim).m * parity(dim).m;
    REQUIRE(guarded_diff(lhs, rhs, dim - displacement_margin(std::abs(alpha))) < 1e-9);
}

TEST_CASE("parity is the diagonal sign operator with Pi^2 = I") {
    Operator pi = parity(6);
    REQUIRE(pi.m(0, 0) == cdouble(1, 0));
    REQUIRE(pi.m(3, 3) == cdouble(-1, 0));
    REQUIRE(max_abs_diff(pi.m * pi.m, Mat::Identity(6, 6)) == 0.0);
}

TEST_CASE("self-Kerr at pi/2 makes the Yurke-Stoler cat") {
    double a = std::sqrt(2.0);
    int cutoff = cutoff_for_amplitude(a);
    HilbertSpec mode = HilbertSpec::mode(cutoff);
    StateVector in = coherent_state(a, mode);
    Vec out = self_kerr(M_PI / 2, cutoff + 1).m * in.amps;
    // target assembled independently from coherent amplitudes
    Vec cat = (coherent_state(a, mode).amps + cdouble(0, 1) * coherent_state(-a, mode).amps) *
              (std::exp(cdouble(0, -M_PI / 4)) / std::sqrt(2.0));
    cat /= cat.norm();
    double infidelity = 1.0 - std::norm(cat.dot(out));
    REQUIRE(infidelity < 1e-10);

    REQUIRE(max_abs_diff(self_kerr(0, 5).m, Mat::Identity(5, 5)) == 0.0);
    Operator xk = cross_kerr(0.9, HilbertSpec::modes(3, 3));
    REQUIRE(std::abs(xk.m(2 * 4 + 3, 2 * 4 + 3) - std::exp(cdouble(0, -0.9 * 6))) < 1e-15);
}

TEST_CASE("subspace gates act on span{|0>,|N>} and fix everything else") {
    int N = 3, dim = 6;
    Operator xn = subspace_gate(SubspaceKind::X, N, dim);
    REQUIRE(std::abs(xn.m(N, 0) - 1.0) == 0.0);
    REQUIRE(std::abs(xn.m(1, 1) - 1.0) == 0.0);

    Operator hn = subspace_gate(SubspaceKind::H, N, dim);
    Vec plus = Vec::Zero(dim);
    plus(0) = plus(N) = 1 / std::sqrt(2.0);
    Vec out = hn.m * plus;
    Vec expect = Vec::Zero(dim);
    expect(0) = 1.0;
    REQUIRE(max_abs_diff(out, expect) < 1e-15);

    Operator zn = subspace_gate(SubspaceKind::Z, N, dim);
    REQUIRE(zn.m(N, N) == cdouble(-1, 0));
    REQUIRE_THROWS_AS(subspace_gate(SubspaceKind::X, 6, 6), Error);

    Operator pn = subspace_p(2, HilbertSpec::modes(3, 3));
    REQUIRE(pn.m(2, 2) == cdouble(-1, 0));         // |0,2>
    REQUIRE(pn.m(2 * 4, 2 * 4) == cdouble(1, 0));  // |2,0>
}

TEST_CASE("controlled gates: CNOT and control-value conjugation") {
    Operator cnot = controlled(pauli_x(), 1);
    Mat expect(4, 4);
    expect << 1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 0, 1,
              0, 0, 1, 0;
    REQUIRE(max_abs_diff(cnot.m, expect) == 0.0);

    auto& g = rng(401);
    Operator u = random_unitary(HilbertSpec::mode(3), g);
    Operator c0 = controlled(u, 0);
    Mat xi = kron(pauli_x().m, Mat::Identity(4, 4));
    REQUIRE(max_abs_diff(c0.m, xi * controlled(u, 1).m * xi) < 1e-14);

    // quantum switch: qubit-controlled displacement is unitary
    Operator qs = controlled(displacement(cdouble(0.9, 0.1), 24), 1);
    REQUIRE(qs.is_unitary());
}

TEST_CASE("modal swap permutes Fock labels and matches i^N e^{-i J_x pi} per sector") {
    HilbertSpec m2 = HilbertSpec::modes(3, 3);
    Operator swap = modal_swap(m2);
    REQUIRE(std::abs(swap.m(0 * 4 + 1, 1 * 4 + 0) - 1.0) == 0.0);  // |1,0> -> |0,1>
    REQUIRE(std::abs(swap.m(2 * 4 + 2, 2 * 4 + 2) - 1.0) == 0.0);  // |2,2> fixed

    Operator rot = rotation_modes(1, 0, 0, M_PI, m2);
    for (int n = 1; n <= 3; ++n) {
        cdouble in = std::pow(cdouble(0, 1), n);
        SectorMap sm(n, 3, 3);
        Mat lhs = in * sm.restrict_mode_operator(rot);
        Mat rhs = sm.restrict_mode_operator(swap);
        REQUIRE(max_abs_diff(lhs, rhs) < 1e-12);
    }

    REQUIRE_THROWS_AS(modal_swap(HilbertSpec::modes(3, 4)), Error);
}

TEST_CASE("every constructor output is unitary") {
    HilbertSpec m2 = HilbertSpec::modes(5, 5);
    REQUIRE(rotation_qubit(0, 1, 0, 0.7).is_unitary());
    REQUIRE(rotation_modes(0.6, 0.0, 0.8, 1.3, m2).is_unitary());
    REQUIRE(beamsplitter(0.4, m2).is_unitary());
    REQUIRE(phase_shifter(0.3, 6).is_unitary());
    REQUIRE(parity(6).is_unitary());
    REQUIRE(self_kerr(0.2, 6).is_unitary());
    REQUIRE(cross_kerr(0.2, m2).is_unitary());
    REQUIRE(subspace_gate(SubspaceKind::H, 4, 6).is_unitary());
    REQUIRE(subspace_p(3, m2).is_unitary());
    REQUIRE(modal_swap(m2).is_unitary());
    REQUIRE(displacement(cdouble(0.5, 0.5), 24).is_unitary());
    REQUIRE(hadamard().is_unitary());
    REQUIRE(s_gate().is_unitary());
    REQUIRE(qubit_phase(0.9).is_unitary());
}

TEST_CASE("e^{-iY pi/4} = XH = HZ") {
    Mat rot = rotation_qubit(0, 1, 0, M_PI / 2).m;
    REQUIRE(max_abs_diff(rot, pauli_x().m * hadamard().m) < 1e-15);
    REQUIRE(max_abs_diff(rot, hadamard().m * pauli_z().m) < 1e-15);
}

TEST_CASE("2 pi rotation about any axis equals Pi (x) Pi on each sector") {
    HilbertSpec m2 = HilbertSpec::modes(4, 4);
    Operator pipi = tensor(parity(5), parity(5));
    for (auto axis : {std::array<double, 3>{1, 0, 0}, std::array<double, 3>{0, 0.6, 0.8}}) {
        Operator rot = rotation_modes(axis[0], axis[1], axis[2], 2 * M_PI, m2);
        for (int n = 1; n <= 4; ++n) {
            SectorMap sm(n, 4, 4);
            REQUIRE(max_abs_diff(sm.restrict_mode_operator(rot), sm.restrict_mode_operator(pipi)) < 1e-11);
        }
    }
}

TEST_CASE("beamsplitters map coherent pairs to coherent pairs") {
    cdouble a(0.9, 0.3), b(-0.4, 0.6);
    double mag = std::abs(a) + std::abs(b);
    int cut = cutoff_for_amplitude(mag);
    HilbertSpec m2 = HilbertSpec::modes(cut, cut);
    double phi_bs = 0.7, theta = M_PI / 2;
    Operator bs = rotation_modes(std::cos(phi_bs), std::sin(phi_bs), 0, theta, m2);
    Vec in = kron(Mat(coherent_state(a, HilbertSpec::mode(cut)).amps),
                  Mat(coherent_state(b, HilbertSpec::mode(cut)).amps));
    Vec out = bs.m * in;
    // (a',b')^T = M (a,b)^T with M from the qubit rotation matrix
    Mat m = rotation_qubit(std::cos(phi_bs), std::sin(phi_bs), 0, theta).m;
    cdouble ap = m(0, 0) * a + m(0, 1) * b;
    cdouble bp = m(1, 0) * a + m(1, 1) * b;
    Vec expect = kron(Mat(coherent_state(ap, HilbertSpec::mode(cut)).amps),
                      Mat(coherent_state(bp, HilbertSpec::mode(cut)).amps));
    double fid = std::norm(expect.dot(out));
    REQUIRE(fid >= 1.0 - 1e-8);
}
