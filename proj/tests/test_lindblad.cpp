#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/errors.hpp"
#include "dicke/evolve.hpp"
#include "dicke/liouvillian.hpp"
#include "dicke/model.hpp"
#include "dicke/steady_state.hpp"
#include "dicke/symmetry.hpp"

using namespace dicke;

namespace {

double max_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Direct evaluation of -i[H, rho] + sum r D[A] rho, independent of the superoperator.
DenseMatrix generator(const LindbladModel& m, const DenseMatrix& rho) {
    const Complex i(0.0, 1.0);
    const DenseMatrix h = m.hamiltonian.dense();
    DenseMatrix out = -i * (h * rho - rho * h);
    for (const auto& c : m.channels) {
        const DenseMatrix a = c.op.dense();
        const DenseMatrix ada = a.adjoint() * a;
        out += c.rate * (2.0 * a * rho * a.adjoint() - ada * rho - rho * ada);
    }
    return out;
}

SystemSpec lossy_pair() {
    SystemSpec s = SystemSpec::uniform(2, 1.0, 0.8, 0.3, 0.0, 3);
    s.g = {1.0, 1.2};
    s.gamma_p = {0.05, 0.1};
    s.delta_q = {0.2, -0.1};
    return s;
}

}  // namespace

TEST_CASE("cavity decay acting on |1><1|") {
    const double kappa = 1.7;
    SystemSpec s = SystemSpec::uniform(1, 0.0, kappa, 0.0, 0.0, 3);
    const Liouvillian l = liouvillian(build_tavis_cummings(s));
    const Vector one = kron(fock_state(1, 3), qubit_state(false)).amplitudes;
    const Vector zero = kron(fock_state(0, 3), qubit_state(false)).amplitudes;
    const DenseMatrix out = l.apply(DenseMatrix(one * one.adjoint()));
    const DenseMatrix expect = kappa * (zero * zero.adjoint() - one * one.adjoint());
    CHECK(max_diff(out, expect) < 1e-14);
}

TEST_CASE("superoperator matches the direct generator") {
    const LindbladModel m = build_tavis_cummings(lossy_pair());
    const Liouvillian l = liouvillian(m);
    std::mt19937 rng(7);
    std::normal_distribution<double> dist;
    DenseMatrix r(m.dimension(), m.dimension());
    for (Index i = 0; i < r.rows(); ++i)
        for (Index j = 0; j < r.cols(); ++j) r(i, j) = Complex(dist(rng), dist(rng));
    CHECK(max_diff(l.apply(r), generator(m, r)) < 1e-12);
}

TEST_CASE("trace preservation: the trace functional annihilates every column") {
    const Liouvillian l = liouvillian(build_tavis_cummings(lossy_pair()));
    const Index d = l.hilbert_dim();
    Vector w = Vector::Zero(d * d);
    for (Index i = 0; i < d; ++i) w(i + d * i) = 1.0;
    const Vector row = l.matrix().adjoint() * w;
    CHECK(row.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Hamiltonian part is the commutator pattern") {
    SystemSpec s = lossy_pair();
    s.kappa = 0.0;
    s.gamma_s = {0.0, 0.0};
    s.gamma_p = {0.0, 0.0};
    const LindbladModel m = build_tavis_cummings(s);
    const Liouvillian l = liouvillian(m);
    const DenseMatrix h = m.hamiltonian.dense();
    const Index d = h.rows();
    const DenseMatrix id = DenseMatrix::Identity(d, d);
    const Complex i(0.0, 1.0);
    // vec(H rho - rho H) = (I (x) H - H^T (x) I) vec(rho)
    DenseMatrix expect(d * d, d * d);
    for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b)
            expect.block(a * d, b * d, d, d) = -i * (id(a, b) * h - h(b, a) * id);
    CHECK(max_diff(DenseMatrix(l.matrix()), expect) < 1e-14);
}

TEST_CASE("photon number decays as exp(-kappa t)") {
    const double kappa = 1.1;
    SystemSpec s = SystemSpec::uniform(1, 0.0, kappa, 0.0, 0.0, 6);
    const LindbladModel m = build_tavis_cummings(s);
    const Liouvillian l = liouvillian(m);
    const DensityState rho0 = DensityState::from_pure(kron(fock_state(4, 6), qubit_state(false)));
    const std::vector<double> ts{0.0, 0.5, 1.0, 2.0, 4.0};
    const Operator n = photon_number(m.dims);
    for (Integrator method : {Integrator::RungeKutta, Integrator::Krylov}) {
        EvolveOptions opt;
        opt.integrator = method;
        opt.rtol = 1e-10;
        opt.atol = 1e-12;
        const auto states = evolve(l, rho0, ts, opt);
        for (std::size_t k = 0; k < ts.size(); ++k)
            CHECK(std::abs(expectation(states[k], n).real() - 4.0 * std::exp(-kappa * ts[k])) < 1e-8);
    }
}

TEST_CASE("vacuum Rabi oscillation cos^2(g t)") {
    const double g = 2.0;
    SystemSpec s = SystemSpec::uniform(1, g, 0.0, 0.0, 0.0, 3);
    const LindbladModel m = build_tavis_cummings(s);
    const Liouvillian l = liouvillian(m);
    const DensityState rho0 = DensityState::from_pure(fully_excited_state(m.dims));
    std::vector<double> ts;
    for (int k = 0; k <= 40; ++k) ts.push_back(0.05 * k);
    EvolveOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const auto states = evolve(l, rho0, ts, opt);
    const Operator pe = excited_population(m.dims);
    double worst = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k)
        worst = std::max(worst, std::abs(expectation(states[k], pe).real() - std::pow(std::cos(g * ts[k]), 2)));
    CHECK(worst < 1e-8);
}

TEST_CASE("Krylov and Runge-Kutta agree on a dissipative pair") {
    const LindbladModel m = build_tavis_cummings(lossy_pair());
    const Liouvillian l = liouvillian(m);
    const DensityState rho0 = DensityState::from_pure(fully_excited_state(m.dims));
    const std::vector<double> ts{0.0, 0.7, 1.9, 3.0};
    EvolveOptions rk, kr;
    rk.rtol = kr.rtol = 1e-10;
    rk.atol = kr.atol = 1e-12;
    kr.integrator = Integrator::Krylov;
    const auto a = evolve(l, rho0, ts, rk);
    const auto b = evolve(l, rho0, ts, kr);
    for (std::size_t k = 0; k < ts.size(); ++k) CHECK(max_diff(a[k].matrix(), b[k].matrix()) < 1e-7);
}

TEST_CASE("evolution reports physicality diagnostics") {
    const Liouvillian l = liouvillian(build_tavis_cummings(lossy_pair()));
    const DensityState rho0 = DensityState::from_pure(fully_excited_state(l.dims()));
    const std::vector<double> ts{0.0, 1.0, 2.0};
    const EvolutionReport rep = evolve(l, rho0, ts, {}, [](std::size_t, double, const DensityState&) {});
    CHECK(rep.max_trace_defect < 1e-8);
    CHECK(rep.max_hermiticity_defect < 1e-8);
    CHECK(rep.min_eigenvalue > -1e-7);
    CHECK(rep.stats.accepted > 0);
}

TEST_CASE("undriven dissipative system relaxes to the ground state") {
    const Liouvillian l = liouvillian(build_tavis_cummings(lossy_pair()));
    const auto ss = steady_state(l);
    const Vector g0 = kron(kron(fock_state(0, 3), qubit_state(false)), qubit_state(false)).amplitudes;
    CHECK(fidelity(ss.state, {g0, l.dims()}) > 1.0 - 1e-10);
    CHECK(ss.report.uniqueness == Uniqueness::Verified);
    CHECK(ss.report.method == "sparse-lu");
}

TEST_CASE("driven steady state agrees with long-time evolution") {
    SystemSpec s = SystemSpec::uniform(1, 1.0, 2.0, 0.5, 0.8, 8);
    const Liouvillian l = liouvillian(build_driven(s));
    const auto ss = steady_state(l);
    CHECK(ss.report.relative_residual < 1e-9);
    const DensityState rho0 = DensityState::from_pure(kron(fock_state(0, 8), qubit_state(false)));
    EvolveOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-12;
    const std::vector<double> ts{0.0, 80.0};
    const auto states = evolve(l, rho0, ts, opt);
    CHECK(max_diff(states.back().matrix(), ss.state.matrix()) < 1e-6);
}

TEST_CASE("permutation reduction") {
    const Dims dims{3, 2, 2, 2};
    const PermutationReduction red(dims);
    // C(4 + 3 - 1, 3) = 20 emitter orbits.
    CHECK(red.orbit_count() == 20);
    CHECK(red.reduced_dim() == 9 * 20);
    const SparseMatrix v = red.isometry();
    const DenseMatrix vtv = DenseMatrix(SparseMatrix(v.adjoint() * v));
    CHECK(max_diff(vtv, DenseMatrix::Identity(vtv.rows(), vtv.cols())) < 1e-14);
    CHECK_THROWS_AS(PermutationReduction(Dims{3, 2, 3}), DimensionError);

    SUBCASE("reduced solve matches the full solve") {
        SystemSpec s = SystemSpec::uniform(3, 1.0, 2.0, 0.4, 1.0, 5);
        const Liouvillian l = liouvillian(build_driven(s));
        SteadyStateOptions full, reduced;
        full.use_symmetry = false;
        const auto a = steady_state(l, full);
        const auto b = steady_state(l, reduced);
        CHECK_FALSE(a.report.symmetry_reduced);
        CHECK(b.report.symmetry_reduced);
        CHECK(b.report.system_rows < a.report.system_rows);
        CHECK(max_diff(a.state.matrix(), b.state.matrix()) < 1e-10);
    }
    SUBCASE("non-identical qubits are not reduced") {
        SystemSpec s = SystemSpec::uniform(3, 1.0, 2.0, 0.4, 1.0, 4);
        s.g = {1.0, 1.1, 0.9};
        const auto r = steady_state(liouvillian(build_driven(s)));
        CHECK_FALSE(r.report.symmetry_reduced);
    }
}

TEST_CASE("iterative path agrees with the direct solve") {
    SystemSpec s = SystemSpec::uniform(2, 1.0, 2.0, 0.4, 1.0, 6);
    s.g = {1.0, 1.2};
    const Liouvillian l = liouvillian(build_driven(s));
    SteadyStateOptions it;
    it.direct_row_limit = 0;
    const auto a = steady_state(l);
    const auto b = steady_state(l, it);
    CHECK(b.report.method == "bicgstab");
    CHECK(b.report.iterations > 0);
    CHECK(max_diff(a.state.matrix(), b.state.matrix()) < 1e-8);
}

TEST_CASE("degenerate steady states are rejected") {
    // No dissipation at all: every diagonal state in the energy basis is stationary.
    SystemSpec s = SystemSpec::uniform(1, 1.0, 0.0, 0.0, 0.0, 3);
    CHECK_THROWS_AS(steady_state(liouvillian(build_tavis_cummings(s))), DomainError);
}

TEST_CASE("superoperator size cap") {
    SystemSpec s = SystemSpec::uniform(3, 1.0, 1.0, 0.1, 0.0, 10);
    LiouvillianOptions opt;
    opt.max_superoperator_dim = 1000;
    CHECK_THROWS_AS(liouvillian(build_tavis_cummings(s), opt), ResourceError);
}

TEST_CASE("unphysical initial state is refused") {
    const Liouvillian l = liouvillian(build_tavis_cummings(lossy_pair()));
    DenseMatrix bad = DenseMatrix::Zero(l.hilbert_dim(), l.hilbert_dim());
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    const std::vector<double> ts{0.0, 1.0};
    CHECK_THROWS_AS(evolve(l, DensityState(bad, l.dims()), ts), NumericalError);
}
