#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dicke/operators.hpp"

namespace dicke {

/// Second transmon transition (e <-> f). Rates in angular units.
struct ThreeLevelParams {
    double anharmonicity = 0.0;            // alpha_r; f sits at -alpha_r in the resonant frame
    std::vector<double> upper_coupling;    // G_j; empty means sqrt(2) * g_j
    double upper_relaxation_factor = 2.0;  // f -> e decays at factor * gamma_s_j
};

/// Physical parameters, all rates angular (rad per microsecond when the
/// inputs are MHz * 2 pi).
struct SystemSpec {
    int n_qubits = 1;
    std::vector<double> g;
    double delta_r = 0.0;
    std::vector<double> delta_q;
    double kappa = 0.0;
    std::vector<double> gamma_s;
    std::vector<double> gamma_p;
    double drive = 0.0;
    Index n_max = 2;
    std::optional<ThreeLevelParams> three_level;

    /// Throws ConfigError on any invariant violation.
    void validate() const;
    double mean_coupling() const;
    /// Second-transition couplings with the sqrt(2) g default applied.
    std::vector<double> upper_couplings() const;
    /// True when every qubit carries identical parameters.
    bool qubits_identical() const;

    /// N identical resonant qubits, no dephasing.
    static SystemSpec uniform(int n_qubits, double g, double kappa, double gamma_s,
                              double drive, Index n_max);
};

struct CollapseChannel {
    double rate = 0.0;  // prefactor r in r * D[A]
    Operator op;
    std::string label;
};

/// Generator rho' = -i[H, rho] + sum_k r_k D[A_k] rho with
/// D[A] rho = 2 A rho A^dagger - A^dagger A rho - rho A^dagger A.
struct LindbladModel {
    Operator hamiltonian;
    std::vector<CollapseChannel> channels;
    Dims dims;
    /// Cavity frame displacement beta; the model acts on D(beta)^dagger rho D(beta).
    Complex field_displacement = 0.0;
    /// Qubits are interchangeable (identical local parameters).
    bool permutation_symmetric = false;

    Index dimension() const { return product(dims); }
    Index field_dim() const { return dims.front(); }
    int n_emitters() const { return static_cast<int>(dims.size()) - 1; }
    Index emitter_dim() const { return dims.size() > 1 ? dims[1] : 1; }

    /// Throws ConfigError when H is not Hermitian or a rate is negative.
    void validate() const;
};

/// Undriven Tavis-Cummings model with relaxation and dephasing.
LindbladModel build_tavis_cummings(const SystemSpec& spec);

/// Resonantly driven model, H = sum_j g_j (s-_j a^dag + a s+_j) + i E (a^dag - a).
///
/// With a nonzero `displacement` beta the model is written for the displaced
/// state D(beta)^dagger rho D(beta): the drive becomes i(E - kappa beta / 2) a^dag + h.c.
/// and each qubit sees an extra g_j (beta* s-_j + beta s+_j). The choice
/// beta = 2E/kappa removes the drive term entirely.
LindbladModel build_driven(const SystemSpec& spec, Complex displacement = 0.0);

/// Qutrit transmons (g, e, f) with the e <-> f transition detuned by
/// -alpha_r and coupled at G_j.
LindbladModel build_three_level(const SystemSpec& spec);

/// Picks the builder matching the spec.
LindbladModel build_model(const SystemSpec& spec, Complex displacement = 0.0);

/// a on the full space of `dims` (cavity first).
Operator field_annihilation(const Dims& dims);
/// a^dag a on the full space.
Operator photon_number(const Dims& dims);
/// a^dag a + sum_j (level index of emitter j).
Operator excitation_number(const Dims& dims);
/// sum_j |f><f|_j; zero for two-level emitters.
Operator upper_level_population(const Dims& dims);
/// sum_j |e><e|_j (excited population of two-level emitters).
Operator excited_population(const Dims& dims);

/// |0> (x) |e, e, ..., e> for two- or three-level emitters.
StateVector fully_excited_state(const Dims& dims);

}  // namespace dicke
