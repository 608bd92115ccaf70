// abq -- run configuration: flat key=value files with [sections], JSON as an
// alternative, command-line flags on top. Unknown keys are rejected.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "abq/common.hpp"
#include "abq/fields.hpp"
#include "abq/forms.hpp"

namespace abq::cfg {

struct RunConfig {
    // sweep inputs
    std::vector<double> alphas{0.5};
    std::vector<int> ks{0, -1};
    std::vector<double> lambdas{1.0};

    // field spec
    std::string field_type = "none";  // none|homogeneous|homogeneous-capped|tabulated
    double field_b = 1.0;
    double field_cap = 5.0;
    std::string field_path;

    // cutoff
    double cutoff_a = 1.0;
    double cutoff_b = 2.0;

    // coupling
    double b00 = 0.0;
    double b11 = 0.0;
    double b01_re = 0.0;
    double b01_im = 0.0;

    // bound-state bracket
    double bracket_lo = 0.1;
    double bracket_hi = 10.0;

    // spectral grid
    double r_max = 20.0;
    int n_nodes = 800;
    double grading = 4.0;
    int count = 3;

    // assembly grid
    double form_r_max = 14.0;

    // trial function preset
    std::string phi_type = "none";  // none|gaussian
    double phi_amp_re = 1.0, phi_amp_im = 0.0;
    double phi_power = 1.0, phi_sigma = 0.5;
    int phi_mode = 0;
    double q0_re = 0.0, q0_im = 0.0;
    double qm1_re = 0.0, qm1_im = 0.0;

    // sweeps
    unsigned long seed = 20240;
    int trials = 10;

    // green dump
    double r_lo = 0.1, r_hi = 5.0;
    int nr = 100;
    double theta = 0.0;

    // tolerances
    double tol_norm_rel = 1e-8;

    std::string out;  // empty -> stdout
};

/// Parse "a,b,c" into doubles.
std::vector<double> parse_double_list(const std::string& s);
std::vector<int> parse_int_list(const std::string& s);

/// Flat section.key -> value pairs from an INI-style or JSON file (sniffed by
/// the first non-space byte).
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Apply file entries onto the config; throws domain_error on unknown keys or
/// malformed values.
void apply_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries);

/// Range validation shared by every subcommand (alpha ranges are checked
/// separately: the spectral sweeps admit alpha = 0).
void validate(const RunConfig& cfg);
void check_alphas(const RunConfig& cfg, bool allow_zero);

/// Build the perturbation field named by the config.
fields::PerturbationField make_field(const RunConfig& cfg);

/// Build the trial function preset (validates phi decay against alpha > 0).
forms::TrialFunction make_trial(const RunConfig& cfg, double alpha, double lambda);

forms::HermitianCoupling make_beta(const RunConfig& cfg);

}  // namespace abq::cfg
