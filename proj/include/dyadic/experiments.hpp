#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyadic/constants.hpp"
#include "dyadic/diagnostics.hpp"
#include "dyadic/integrator.hpp"
#include "dyadic/params.hpp"

namespace dyadic {

enum class experiment_kind { simulate, blowup, regularity, attractor, verify };

/// Fully resolved description of one study; everything needed to reproduce a
/// run lives here.
struct experiment_plan {
    experiment_kind kind = experiment_kind::simulate;
    model_params params;      ///< lambda, nu, alpha, base mode count, force
    double gamma = 0.1;
    std::vector<int> n_list;  ///< truncation levels; empty = {params.n_modes}
    double t_end = 1.0;
    stepper_config stepper;
    std::vector<event_spec> events;  ///< extra stop conditions
    std::vector<double> init;        ///< initial amplitudes; empty = default
    double sample_every = 0.0;       ///< 0 = record every accepted step
    double tail_tol = 1e-6;          ///< tail share that ends a blow-up run
    int tail_width = 5;
    std::uint64_t n_vectors = 10000;  ///< size of the identity sweep
    std::uint64_t seed = 0;
};

struct regularity_summary {
    std::vector<int> n_levels;
    std::vector<double> sup_enstrophy;  ///< per truncation level
    double max_drift = 0.0;  ///< relative sup change between adjacent levels
    bool ledger_ok = true;   ///< every integrated-bound interval held
    double max_ledger_excess = 0.0;
    std::optional<double> energy_equality;  ///< residual; alpha >= 1/2 only
    double sup_energy_sq = 0.0;             ///< deepest run
};

struct attractor_summary {
    double radius = 0.0;
    bool entered = false;
    double entry_time = -1.0;
    bool resided = false;  ///< stayed inside for the rest of the run
    double max_after_entry = 0.0;        ///< sup |u| past the entry time
    double post_entry_sup_third = 0.0;   ///< sup ||u||_{1/3+gamma} past entry
};

struct verify_failure {
    std::uint64_t vector_index = 0;
    check_result check;
    std::vector<double> vec;  ///< the offending input, for reproduction
};

struct verify_summary {
    std::uint64_t n_vectors = 0;
    std::uint64_t n_checks = 0;
    std::uint64_t n_failures = 0;
    std::uint64_t n_skipped = 0;
    std::vector<verify_failure> failures;  ///< first few counterexamples
    bool vacuous = false;                  ///< no vectors were checked
};

/// Result of one experiment: trajectories and per-sample records for every
/// truncation level, the kind-specific summary, and the list of asserted
/// invariants whose failure makes the run count as failed.
struct run_artifact {
    experiment_plan plan;
    constant_set consts;  ///< for plan.params at plan.gamma
    std::vector<int> n_levels;
    std::vector<trajectory> runs;
    std::vector<std::vector<diagnostics_record>> records;
    std::optional<blowup_report> blowup;
    std::optional<regularity_summary> regularity;
    std::optional<attractor_summary> attractor;
    std::optional<verify_summary> verify;
    std::vector<check_result> asserted;

    bool all_asserted_ok() const;
};

/// Initial amplitudes used when the plan does not supply any: the threshold
/// state 2 m_gamma lambda^(-gamma) e_1 for blow-up studies, a start outside
/// the absorbing ball for attractor probes, e_1 otherwise.
std::vector<double> default_initial_state(const experiment_plan& plan,
                                          const model_params& p,
                                          const constant_set& consts);

/// Identity and inequality sweep over deterministic pseudo-random vectors.
/// The constant set is a parameter so a caller can check that corrupted
/// constants are actually caught.
verify_summary verify_vectors(const model_params& p,
                              const constant_set& consts,
                              std::uint64_t n_vectors, std::uint64_t seed,
                              std::size_t max_failures = 3);

run_artifact run_experiment(const experiment_plan& plan);

}  // namespace dyadic
