#include "dicke/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

constexpr Complex I{0.0, 1.0};

void require(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

bool all_equal(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

Dims model_dims(const SystemSpec& spec, Index emitter_dim) {
    Dims dims{spec.n_max};
    dims.insert(dims.end(), static_cast<std::size_t>(spec.n_qubits), emitter_dim);
    return dims;
}

Operator level_projector(Index dim, Index level) {
    DenseMatrix p = DenseMatrix::Zero(dim, dim);
    p(level, level) = 1.0;
    return {std::move(p), Dims{dim}};
}

Operator transition(Index dim, Index lower, Index upper) {
    DenseMatrix s = DenseMatrix::Zero(dim, dim);
    s(lower, upper) = 1.0;
    return {std::move(s), Dims{dim}};
}

/// sum_j g_j (s_j a^dag + a s_j^dag) for a local lowering operator s.
Operator exchange(const Dims& dims, const Operator& a, const Operator& local_lowering,
                  const std::vector<double>& couplings) {
    Operator h = zero(dims);
    const Operator ad = a.adjoint();
    for (std::size_t j = 0; j < couplings.size(); ++j) {
        if (couplings[j] == 0.0) continue;
        const Operator s = embed(local_lowering, j + 1, dims);
        h = h + Complex(couplings[j]) * (s * ad + a * s.adjoint());
    }
    return h;
}

void add_channel(LindbladModel& m, double rate, Operator op, std::string label) {
    if (rate == 0.0) return;
    m.channels.push_back({rate, std::move(op), std::move(label)});
}

LindbladModel finish(LindbladModel m) {
    m.hamiltonian = m.hamiltonian.compacted();
    for (auto& c : m.channels) c.op = c.op.compacted();
    m.validate();
    return m;
}

}  // namespace

void SystemSpec::validate() const {
    require(n_qubits >= 1, "n_qubits must be >= 1");
    const auto n = static_cast<std::size_t>(n_qubits);
    require(g.size() == n, "coupling list length must equal n_qubits");
    require(delta_q.size() == n, "qubit detuning list length must equal n_qubits");
    require(gamma_s.size() == n, "relaxation rate list length must equal n_qubits");
    require(gamma_p.size() == n, "dephasing rate list length must equal n_qubits");
    require(n_max >= 2, "Fock truncation n_max must be >= 2");
    require(kappa >= 0.0, "kappa must be >= 0");
    require(drive >= 0.0, "drive amplitude must be >= 0");
    for (double x : gamma_s) require(x >= 0.0, "relaxation rates must be >= 0");
    for (double x : gamma_p) require(x >= 0.0, "dephasing rates must be >= 0");
    auto finite = [](double x) { return std::isfinite(x); };
    require(std::all_of(g.begin(), g.end(), finite) && std::isfinite(delta_r) &&
                std::all_of(delta_q.begin(), delta_q.end(), finite) && std::isfinite(kappa) &&
                std::isfinite(drive),
            "all parameters must be finite");
    if (three_level) {
        require(std::isfinite(three_level->anharmonicity), "anharmonicity must be finite");
        require(three_level->upper_coupling.empty() || three_level->upper_coupling.size() == n,
                "second-transition coupling list length must equal n_qubits");
        require(three_level->upper_relaxation_factor >= 0.0,
                "upper relaxation factor must be >= 0");
    }
}

double SystemSpec::mean_coupling() const {
    if (g.empty()) return 0.0;
    return std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
}

std::vector<double> SystemSpec::upper_couplings() const {
    if (three_level && !three_level->upper_coupling.empty()) return three_level->upper_coupling;
    std::vector<double> out(g.size());
    std::transform(g.begin(), g.end(), out.begin(), [](double x) { return std::sqrt(2.0) * x; });
    return out;
}

bool SystemSpec::qubits_identical() const {
    return all_equal(g) && all_equal(delta_q) && all_equal(gamma_s) && all_equal(gamma_p) &&
           (!three_level || all_equal(upper_couplings()));
}

SystemSpec SystemSpec::uniform(int n_qubits, double g, double kappa, double gamma_s, double drive,
                               Index n_max) {
    const auto n = static_cast<std::size_t>(n_qubits);
    SystemSpec s;
    s.n_qubits = n_qubits;
    s.g.assign(n, g);
    s.delta_q.assign(n, 0.0);
    s.gamma_s.assign(n, gamma_s);
    s.gamma_p.assign(n, 0.0);
    s.kappa = kappa;
    s.drive = drive;
    s.n_max = n_max;
    return s;
}

void LindbladModel::validate() const {
    if (hamiltonian.dims() != dims) throw ConfigError("Hamiltonian dims do not match model dims");
    if (!hamiltonian.is_hermitian(1e-12)) throw ConfigError("Hamiltonian is not Hermitian");
    for (const auto& c : channels) {
        if (c.rate < 0.0) throw ConfigError("collapse rate must be >= 0 (" + c.label + ")");
        if (c.op.dims() != dims) throw ConfigError("collapse operator dims mismatch (" + c.label + ")");
    }
}

Operator field_annihilation(const Dims& dims) { return embed(annihilation(dims.front()), 0, dims); }

Operator photon_number(const Dims& dims) {
    const Operator a = annihilation(dims.front());
    return embed(a.adjoint() * a, 0, dims);
}

Operator excitation_number(const Dims& dims) {
    Operator n = photon_number(dims);
    for (std::size_t j = 1; j < dims.size(); ++j) {
        DenseMatrix level = DenseMatrix::Zero(dims[j], dims[j]);
        for (Index k = 0; k < dims[j]; ++k) level(k, k) = static_cast<double>(k);
        n = n + embed(Operator(level, Dims{dims[j]}), j, dims);
    }
    return n.compacted();
}

Operator upper_level_population(const Dims& dims) {
    Operator p = zero(dims);
    for (std::size_t j = 1; j < dims.size(); ++j)
        if (dims[j] >= 3) p = p + embed(level_projector(dims[j], 2), j, dims);
    return p.compacted();
}

Operator excited_population(const Dims& dims) {
    Operator p = zero(dims);
    for (std::size_t j = 1; j < dims.size(); ++j) p = p + embed(level_projector(dims[j], 1), j, dims);
    return p.compacted();
}

StateVector fully_excited_state(const Dims& dims) {
    StateVector psi = fock_state(0, dims.front());
    for (std::size_t j = 1; j < dims.size(); ++j) psi = kron(psi, basis_state(1, dims[j]));
    return psi;
}

LindbladModel build_tavis_cummings(const SystemSpec& spec) {
    spec.validate();
    if (spec.drive != 0.0) throw DomainError("Tavis-Cummings builder requires zero drive");
    if (spec.three_level) throw DomainError("Tavis-Cummings builder requires two-level qubits");

    LindbladModel m;
    m.dims = model_dims(spec, 2);
    const Operator a = field_annihilation(m.dims);
    Operator h = Complex(spec.delta_r) * (a.adjoint() * a);
    for (int j = 0; j < spec.n_qubits; ++j)
        if (spec.delta_q[j] != 0.0)
            h = h + Complex(spec.delta_q[j] / 2.0) * embed(sigma_z(), j + 1, m.dims);
    h = h + exchange(m.dims, a, sigma_minus(), spec.g);
    m.hamiltonian = h;

    add_channel(m, spec.kappa / 2.0, a, "cavity decay");
    for (int j = 0; j < spec.n_qubits; ++j) {
        add_channel(m, spec.gamma_s[j] / 2.0, embed(sigma_minus(), j + 1, m.dims),
                    "relaxation q" + std::to_string(j));
        add_channel(m, spec.gamma_p[j] / 2.0, embed(sigma_z(), j + 1, m.dims),
                    "dephasing q" + std::to_string(j));
    }
    m.permutation_symmetric = spec.qubits_identical();
    return finish(std::move(m));
}

LindbladModel build_driven(const SystemSpec& spec, Complex displacement) {
    spec.validate();
    if (spec.drive <= 0.0) throw DomainError("driven builder requires drive amplitude E > 0");
    if (spec.three_level) throw DomainError("driven builder requires two-level qubits");
    if (spec.delta_r != 0.0 ||
        std::any_of(spec.delta_q.begin(), spec.delta_q.end(), [](double d) { return d != 0.0; }))
        throw DomainError("driven builder requires resonance (all detunings zero)");
    if (std::any_of(spec.gamma_p.begin(), spec.gamma_p.end(), [](double d) { return d != 0.0; }))
        throw DomainError("driven builder requires zero dephasing");

    LindbladModel m;
    m.dims = model_dims(spec, 2);
    m.field_displacement = displacement;
    const Operator a = field_annihilation(m.dims);
    Operator h = exchange(m.dims, a, sigma_minus(), spec.g);

    const Complex eps = spec.drive - spec.kappa * displacement / 2.0;
    if (eps != 0.0) h = h + (I * eps) * a.adjoint() + (-I * std::conj(eps)) * a;
    if (displacement != 0.0)
        for (int j = 0; j < spec.n_qubits; ++j) {
            const Operator s = embed(sigma_minus(), j + 1, m.dims);
            h = h + Complex(spec.g[j]) * (std::conj(displacement) * s + displacement * s.adjoint());
        }
    m.hamiltonian = h;

    add_channel(m, spec.kappa / 2.0, a, "cavity decay");
    for (int j = 0; j < spec.n_qubits; ++j)
        add_channel(m, spec.gamma_s[j] / 2.0, embed(sigma_minus(), j + 1, m.dims),
                    "relaxation q" + std::to_string(j));
    m.permutation_symmetric = spec.qubits_identical();
    return finish(std::move(m));
}

LindbladModel build_three_level(const SystemSpec& spec) {
    spec.validate();
    if (!spec.three_level) throw ConfigError("three-level builder requires anharmonicity data");
    const ThreeLevelParams& tl = *spec.three_level;
    const std::vector<double> big_g = spec.upper_couplings();

    LindbladModel m;
    m.dims = model_dims(spec, 3);
    const Operator a = field_annihilation(m.dims);
    const Operator s_ge = transition(3, 0, 1);
    const Operator s_ef = transition(3, 1, 2);

    Operator h = Complex(spec.delta_r) * (a.adjoint() * a);
    for (int j = 0; j < spec.n_qubits; ++j) {
        // Resonant-frame energies (0, delta_q, 2 delta_q - alpha_r).
        DenseMatrix e = DenseMatrix::Zero(3, 3);
        e(1, 1) = spec.delta_q[j];
        e(2, 2) = 2.0 * spec.delta_q[j] - tl.anharmonicity;
        h = h + embed(Operator(e, Dims{3}), j + 1, m.dims);
    }
    h = h + exchange(m.dims, a, s_ge, spec.g) + exchange(m.dims, a, s_ef, big_g);
    if (spec.drive != 0.0) h = h + (I * spec.drive) * (a.adjoint() - a);
    m.hamiltonian = h;

    add_channel(m, spec.kappa / 2.0, a, "cavity decay");
    DenseMatrix zq = DenseMatrix::Zero(3, 3);  // sigma_z extended: 2 * level - 1
    zq.diagonal() << -1.0, 1.0, 3.0;
    for (int j = 0; j < spec.n_qubits; ++j) {
        const auto q = std::to_string(j);
        add_channel(m, spec.gamma_s[j] / 2.0, embed(s_ge, j + 1, m.dims), "relaxation e->g q" + q);
        add_channel(m, tl.upper_relaxation_factor * spec.gamma_s[j] / 2.0, embed(s_ef, j + 1, m.dims),
                    "relaxation f->e q" + q);
        add_channel(m, spec.gamma_p[j] / 2.0, embed(Operator(zq, Dims{3}), j + 1, m.dims),
                    "dephasing q" + q);
    }
    m.permutation_symmetric = spec.qubits_identical();
    return finish(std::move(m));
}

LindbladModel build_model(const SystemSpec& spec, Complex displacement) {
    if (spec.three_level) return build_three_level(spec);
    if (spec.drive > 0.0) return build_driven(spec, displacement);
    return build_tavis_cummings(spec);
}

}  // namespace dicke
