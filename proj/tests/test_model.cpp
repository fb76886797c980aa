#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "dicke/errors.hpp"
#include "dicke/liouvillian.hpp"
#include "dicke/model.hpp"
#include "dicke/steady_state.hpp"

using namespace dicke;

namespace {

SystemSpec two_level(int n, double g, Index n_max) { return SystemSpec::uniform(n, g, 0.0, 0.0, 0.0, n_max); }

std::vector<double> eigenvalues(const Operator& h) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h.dense());
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return out;
}

}  // namespace

TEST_CASE("single qubit one-excitation doublet splits at +-g") {
    const double g = 1.3;
    const LindbladModel m = build_tavis_cummings(two_level(1, g, 4));
    const Dims& d = m.dims;
    // Restrict H to span{|1,g>, |0,e>}.
    const Vector a = kron(fock_state(1, 4), qubit_state(false)).amplitudes;
    const Vector b = kron(fock_state(0, 4), qubit_state(true)).amplitudes;
    DenseMatrix block(2, 2);
    const DenseMatrix h = m.hamiltonian.dense();
    block << a.dot(h * a), a.dot(h * b), b.dot(h * a), b.dot(h * b);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(block);
    CHECK(std::abs(es.eigenvalues()(0) + g) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1) - g) < 1e-12);
    CHECK(d == Dims{4, 2});
}

TEST_CASE("Tavis-Cummings conserves excitation number") {
    SystemSpec s = two_level(3, 1.0, 5);
    s.g = {0.9, 1.1, 1.0};
    s.delta_r = 0.3;
    s.delta_q = {0.1, -0.2, 0.0};
    const LindbladModel m = build_tavis_cummings(s);
    const Operator n = excitation_number(m.dims);
    CHECK(commutator(m.hamiltonian, n).dense().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.dims == Dims{5, 2, 2, 2});
    CHECK(m.dimension() == 40);
    CHECK_FALSE(m.permutation_symmetric);
}

TEST_CASE("one-excitation bright state couples at sqrt(N) g") {
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        const LindbladModel m = build_tavis_cummings(two_level(n, 1.0, 3));
        // Spectrum restricted to one excitation: +-sqrt(N) g plus N-1 dark zeros.
        const Operator ex = excitation_number(m.dims);
        DenseMatrix p = DenseMatrix::Zero(m.dimension(), m.dimension());
        for (Index k = 0; k < m.dimension(); ++k)
            if (std::abs(ex.dense()(k, k) - 1.0) < 1e-12) p(k, k) = 1.0;
        const DenseMatrix h1 = p * m.hamiltonian.dense() * p;
        const auto ev = eigenvalues(Operator(h1, m.dims));
        CHECK(std::abs(ev.front() + std::sqrt(double(n))) < 1e-12);
        CHECK(std::abs(ev.back() - std::sqrt(double(n))) < 1e-12);
    }
}

TEST_CASE("driven Hamiltonian is Hermitian in either frame") {
    SystemSpec s = SystemSpec::uniform(2, 1.0, 2.0, 0.1, 1.5, 6);
    CHECK(build_driven(s).hamiltonian.is_hermitian(1e-14));
    CHECK(build_driven(s, Complex(1.5, 0.2)).hamiltonian.is_hermitian(1e-14));
    CHECK(build_model(s).channels.size() == 3);
}

TEST_CASE("empty-cavity drive relaxes to the coherent state at 2E/kappa") {
    // g = 0: the field decouples and settles in |2E/kappa>.
    const double kappa = 2.0, e = 1.0;
    SystemSpec s = SystemSpec::uniform(1, 0.0, kappa, 0.5, e, 14);
    const auto ss = steady_state(liouvillian(build_driven(s)));
    const DensityState field = partial_trace_field(ss.state);
    CHECK(fidelity(field, coherent_state(2.0 * e / kappa, 14)) > 1.0 - 1e-9);
    // With beta = 2E/kappa the displaced state is the vacuum.
    const auto disp = steady_state(liouvillian(build_driven(s, 2.0 * e / kappa)));
    CHECK(build_driven(s, 2.0 * e / kappa).hamiltonian.dense().cwiseAbs().maxCoeff() == 0.0);
    CHECK(fidelity(partial_trace_field(disp.state), fock_state(0, 14)) > 1.0 - 1e-12);
}

TEST_CASE("three-level model") {
    SystemSpec s = SystemSpec::uniform(2, 1.0, 3.0, 0.1, 0.0, 4);
    s.three_level = ThreeLevelParams{50.0, {}, 2.0};
    const LindbladModel m = build_model(s);
    CHECK(m.dims == Dims{4, 3, 3});
    CHECK(m.dimension() == 4 * 9);
    const auto big = s.upper_couplings();
    CHECK(std::abs(big[0] - std::sqrt(2.0)) < 1e-15);
    CHECK(commutator(m.hamiltonian, excitation_number(m.dims)).dense().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.permutation_symmetric);

    SUBCASE("upper-level relaxation uses the factor") {
        const auto it = std::find_if(m.channels.begin(), m.channels.end(),
                                     [](const CollapseChannel& c) { return c.label == "relaxation f->e q0"; });
        REQUIRE(it != m.channels.end());
        CHECK(std::abs(it->rate - 2.0 * 0.1 / 2.0) < 1e-15);
    }
    SUBCASE("explicit G") {
        s.three_level->upper_coupling = {0.5, 0.7};
        CHECK(s.upper_couplings() == std::vector<double>{0.5, 0.7});
        CHECK_FALSE(s.qubits_identical());
    }
    SUBCASE("large anharmonicity recovers the qubit spectrum") {
        // Low-lying one-excitation eigenvalues approach the two-level ones.
        SystemSpec q = SystemSpec::uniform(1, 1.0, 0.0, 0.0, 0.0, 3);
        SystemSpec t = q;
        t.three_level = ThreeLevelParams{1e4, {}, 2.0};
        const auto e2 = eigenvalues(build_model(q).hamiltonian);
        const auto e3 = eigenvalues(build_model(t).hamiltonian);
        const auto near = [&](double v) {
            return std::any_of(e3.begin(), e3.end(), [&](double x) { return std::abs(x - v) < 1e-3; });
        };
        for (double v : e2) CHECK(near(v));
    }
}

TEST_CASE("spec validation") {
    SystemSpec s = SystemSpec::uniform(2, 1.0, 1.0, 0.1, 0.0, 4);
    CHECK_NOTHROW(s.validate());
    SUBCASE("length mismatch") {
        s.g = {1.0};
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SUBCASE("negative rate") {
        s.gamma_s[1] = -0.1;
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SUBCASE("truncation too small") {
        s.n_max = 1;
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SUBCASE("non-finite") {
        s.kappa = std::nan("");
        CHECK_THROWS_AS(s.validate(), ConfigError);
    }
    SUBCASE("builder preconditions") {
        CHECK_THROWS_AS(build_driven(s), DomainError);
        s.drive = 1.0;
        CHECK_THROWS_AS(build_tavis_cummings(s), DomainError);
        s.delta_r = 0.5;
        CHECK_THROWS_AS(build_driven(s), DomainError);
    }
}

TEST_CASE("observables") {
    const Dims d{3, 2, 2};
    CHECK(std::abs(expectation(DensityState::from_pure(fully_excited_state(d)), excited_population(d)) - 2.0) <
          1e-15);
    CHECK(upper_level_population(d).dense().cwiseAbs().maxCoeff() == 0.0);
    const Dims t{2, 3};
    const Vector f = kron(fock_state(0, 2), basis_state(2, 3)).amplitudes;
    CHECK(std::abs(f.dot(upper_level_population(t).apply(f)) - 1.0) < 1e-15);
    CHECK(std::abs(f.dot(excitation_number(t).apply(f)) - 2.0) < 1e-15);
}
