#include "dyadic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "dyadic/constants.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/io.hpp"

namespace dyadic::cli {

namespace {

struct raw_options {
    double lambda = 2.0;
    double nu = 1.0;
    double alpha = 0.25;
    double gamma = 0.1;
    int modes = 32;
    std::vector<int> modes_list;
    double t_end = 1.0;
    double g1 = 0.0;
    std::string init_path;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string config_path;
};

void add_common(CLI::App* sub, raw_options& r) {
    sub->add_option("--lambda", r.lambda, "spectral spacing (> 1)")
        ->capture_default_str();
    sub->add_option("--nu", r.nu, "viscosity (>= 0)")->capture_default_str();
    sub->add_option("--alpha", r.alpha, "dissipation exponent (> 0)")
        ->capture_default_str();
    sub->add_option("--gamma", r.gamma,
                    "weight exponent (default depends on the command)");
    sub->add_option("--modes", r.modes, "truncation size")
        ->capture_default_str();
    sub->add_option("--modes-list", r.modes_list,
                    "comma-separated truncation levels for refinement studies")
        ->delimiter(',');
    sub->add_option("--t-end", r.t_end,
                    "integration horizon (default depends on the command)");
    sub->add_option("--g1", r.g1,
                    "first-mode force amplitude (default depends on the "
                    "command)");
    sub->add_option("--init", r.init_path,
                    "file with initial amplitudes, one per line");
    sub->add_option("--rel-tol", r.rel_tol, "step controller relative error")
        ->capture_default_str();
    sub->add_option("--abs-tol", r.abs_tol, "step controller absolute error")
        ->capture_default_str();
    sub->add_option("--seed", r.seed, "random seed for the identity sweep")
        ->capture_default_str();
    sub->add_option("--out", r.out_dir, "output directory");
    sub->add_option("--config", r.config_path,
                    "flat key = value file; explicit flags win");
}

struct app_state {
    CLI::App app{"truncated cascade model laboratory", "dyadic"};
    raw_options raw;
    CLI::App* subs[6] = {};
};

constexpr const char* k_sub_names[6] = {"simulate", "blowup",  "regularity",
                                        "attractor", "verify", "constants"};
constexpr const char* k_sub_help[6] = {
    "integrate the model and record per-sample observables",
    "refinement study of the supercritical cascade front",
    "dissipation-ledger study in the subcritical range",
    "decay into the absorbing ball under constant force",
    "identity and inequality sweep over random vectors",
    "print the derived constant set"};

void build_app(app_state& st) {
    st.app.require_subcommand(1);
    st.app.set_version_flag("--version", io::version_string);
    for (int i = 0; i < 6; ++i) {
        st.subs[i] = st.app.add_subcommand(k_sub_names[i], k_sub_help[i]);
        add_common(st.subs[i], st.raw);
    }
}

parsed resolve(int sub_index, CLI::App* sub, const raw_options& raw) {
    const bool is_constants = sub_index == 5;
    const experiment_kind kind =
        is_constants ? experiment_kind::simulate
                     : static_cast<experiment_kind>(sub_index);

    parsed ps;
    ps.constants_only = is_constants;
    ps.plan.kind = kind;
    ps.plan.params.lambda = raw.lambda;
    ps.plan.params.nu = raw.nu;
    ps.plan.params.alpha = raw.alpha;

    if (!raw.modes_list.empty()) {
        ps.plan.n_list = raw.modes_list;
        ps.plan.params.n_modes =
            *std::max_element(raw.modes_list.begin(), raw.modes_list.end());
    } else {
        ps.plan.params.n_modes = raw.modes;
    }

    if (sub->count("--gamma") > 0) {
        ps.plan.gamma = raw.gamma;
    } else if (kind == experiment_kind::blowup) {
        ps.plan.gamma = default_blowup_gamma(raw.alpha);
    } else {
        ps.plan.gamma = 0.1;
    }

    double g1 = raw.g1;
    if (sub->count("--g1") == 0) {
        g1 = (kind == experiment_kind::regularity ||
              kind == experiment_kind::attractor)
                 ? 1.0
                 : 0.0;
    }
    if (g1 != 0.0)
        ps.plan.params.force =
            model_params::single_mode_force(ps.plan.params.n_modes, g1);

    if (sub->count("--t-end") > 0) {
        ps.plan.t_end = raw.t_end;
    } else {
        switch (kind) {
            case experiment_kind::regularity: ps.plan.t_end = 100.0; break;
            case experiment_kind::attractor:
                ps.plan.t_end = raw.nu > 0.0 ? 10.0 / raw.nu : 10.0;
                break;
            default: ps.plan.t_end = 1.0; break;
        }
    }

    ps.plan.stepper.rel_tol = raw.rel_tol;
    ps.plan.stepper.abs_tol = raw.abs_tol;
    ps.plan.seed = raw.seed;

    if (!raw.init_path.empty()) {
        ps.init_path = raw.init_path;
        ps.plan.init = io::load_amplitudes(raw.init_path);
    }

    ps.out_given = sub->count("--out") > 0;
    ps.out_dir = ps.out_given
                     ? raw.out_dir
                     : std::string("out-") + k_sub_names[sub_index];
    return ps;
}

int triggered_index(const app_state& st) {
    for (int i = 0; i < 6; ++i)
        if (st.subs[i]->parsed()) return i;
    throw parse_error("a subcommand is required");
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Keys a config file may set; every one maps to the flag of the same name.
constexpr const char* k_config_keys[] = {
    "lambda", "nu",   "alpha",   "gamma",   "modes", "modes-list", "t-end",
    "g1",     "init", "rel-tol", "abs-tol", "seed",  "out"};

// Reads a flat key=value file and synthesizes flags for every key the
// command line did not already set, so explicit flags keep priority.
std::vector<std::string> config_flags(const std::string& path,
                                      const CLI::App* sub) {
    std::ifstream in(path);
    if (!in) throw parse_error("config: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config: expected key=value at " + where);
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw parse_error("config: empty key or value at " + where);
        if (std::find_if(std::begin(k_config_keys), std::end(k_config_keys),
                         [&](const char* k) { return key == k; }) ==
            std::end(k_config_keys))
            throw parse_error("config: unknown key '" + key + "' at " + where);
        const auto prior =
            std::find_if(pairs.begin(), pairs.end(),
                         [&](const auto& p) { return p.first == key; });
        if (prior != pairs.end())
            prior->second = value;  // last occurrence wins
        else
            pairs.emplace_back(key, value);
    }
    std::vector<std::string> flags;
    for (const auto& [key, value] : pairs) {
        if (sub->count("--" + key) > 0) continue;  // explicit flag wins
        flags.push_back("--" + key);
        flags.push_back(value);
    }
    return flags;
}

// Applies the config file, if one was given, by re-parsing the command
// line with the synthesized flags appended, then resolves the plan.
parsed resolve_with_config(app_state& st, const std::vector<std::string>& args) {
    const int idx = triggered_index(st);
    if (st.raw.config_path.empty()) return resolve(idx, st.subs[idx], st.raw);

    std::vector<std::string> merged(args);
    const auto extra = config_flags(st.raw.config_path, st.subs[idx]);
    merged.insert(merged.end(), extra.begin(), extra.end());

    app_state again;
    build_app(again);
    again.app.parse(std::vector<std::string>(merged.rbegin(), merged.rend()));
    const int j = triggered_index(again);
    return resolve(j, again.subs[j], again.raw);
}

void print_constants(std::ostream& os, const constant_set& c) {
    os << "lambda = " << io::format_double(c.lambda) << '\n'
       << "nu = " << io::format_double(c.nu) << '\n'
       << "alpha = " << io::format_double(c.alpha) << '\n'
       << "gamma = " << io::format_double(c.gamma) << '\n'
       << "c_b_nominal = " << io::format_double(c.c_b_nominal) << '\n'
       << "c_b_flux = " << io::format_double(c.c_b_flux) << '\n'
       << "epsilon = " << io::format_double(c.epsilon) << '\n'
       << "a_gamma = " << io::format_double(c.a_gamma) << '\n'
       << "c1 = " << io::format_double(c.c1) << '\n'
       << "c2 = " << io::format_double(c.c2) << '\n'
       << "c3 = " << io::format_double(c.c3) << '\n'
       << "m_gamma = " << io::format_double(c.m_gamma) << '\n'
       << "c_riccati = " << io::format_double(c.c_riccati) << '\n'
       << "gamma_range_valid = " << (c.gamma_range_valid ? "true" : "false")
       << '\n';
}

int execute(const parsed& ps) {
    namespace fs = std::filesystem;
    if (ps.constants_only) {
        ps.plan.params.validate();
        const constant_set c = constants(ps.plan.params, ps.plan.gamma);
        print_constants(std::cout, c);
        if (ps.out_given) {
            fs::create_directories(ps.out_dir);
            run_artifact art;
            art.plan = ps.plan;
            art.consts = c;
            io::write_summary_json(
                (fs::path(ps.out_dir) / "summary.json").string(), art);
        }
        return 0;
    }

    const run_artifact art = run_experiment(ps.plan);

    fs::create_directories(ps.out_dir);
    const fs::path dir(ps.out_dir);
    if (!art.records.empty()) {
        io::write_timeseries_csv((dir / "timeseries.csv").string(),
                                 art.records.back());
        if (art.records.size() > 1) {
            for (std::size_t i = 0; i < art.records.size(); ++i) {
                io::write_timeseries_csv(
                    (dir / ("timeseries_n" + std::to_string(art.n_levels[i]) +
                            ".csv"))
                        .string(),
                    art.records[i]);
            }
        }
    }
    io::write_summary_json((dir / "summary.json").string(), art);
    io::write_plan_json((dir / "plan.json").string(), art.plan);

    std::cout << io::version_string << " " << io::kind_name(art.plan.kind)
              << "\n";
    for (std::size_t i = 0; i < art.runs.size(); ++i) {
        const trajectory& tr = art.runs[i];
        std::cout << "  n=" << art.n_levels[i] << ": " << tr.samples.size()
                  << " samples, t_final="
                  << io::format_double(
                         tr.samples.empty() ? 0.0 : tr.samples.back().t)
                  << ", accepted=" << tr.n_accepted
                  << ", rejected=" << tr.n_rejected << "\n";
    }
    if (art.verify) {
        std::cout << "  vectors=" << art.verify->n_vectors
                  << " checks=" << art.verify->n_checks
                  << " failures=" << art.verify->n_failures
                  << " skipped=" << art.verify->n_skipped << "\n";
        if (art.verify->vacuous)
            std::cout << "  warning: no vectors were checked; the pass is "
                         "vacuous\n";
    }
    if (art.blowup && !art.blowup->valid)
        std::cout << "  note: study not in the certified range ("
                  << art.blowup->invalid_reason << ")\n";
    for (const check_result& c : art.asserted)
        std::cout << "  [" << (c.ok ? "ok" : "FAIL") << "] " << c.name << "\n";
    std::cout << "  wrote " << (dir / "summary.json").string() << "\n";

    return art.all_asserted_ok() ? 0 : 1;
}

}  // namespace

parsed parse_args(const std::vector<std::string>& args) {
    app_state st;
    build_app(st);
    try {
        // CLI11's vector overload consumes arguments like a stack, so it
        // expects them in reverse order.
        st.app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
        return resolve_with_config(st, args);
    } catch (const CLI::ParseError& e) {
        throw parse_error(std::string("usage: ") + e.what());
    }
}

std::string render_config(const parsed& ps) {
    std::ostringstream os;
    const experiment_plan& plan = ps.plan;
    os << "lambda=" << io::format_double(plan.params.lambda) << '\n';
    os << "nu=" << io::format_double(plan.params.nu) << '\n';
    os << "alpha=" << io::format_double(plan.params.alpha) << '\n';
    os << "gamma=" << io::format_double(plan.gamma) << '\n';
    os << "modes=" << plan.params.n_modes << '\n';
    if (!plan.n_list.empty()) {
        os << "modes-list=";
        for (std::size_t i = 0; i < plan.n_list.size(); ++i)
            os << (i ? "," : "") << plan.n_list[i];
        os << '\n';
    }
    os << "t-end=" << io::format_double(plan.t_end) << '\n';
    os << "g1=" << io::format_double(plan.params.force_at(1)) << '\n';
    if (!ps.init_path.empty()) os << "init=" << ps.init_path << '\n';
    os << "rel-tol=" << io::format_double(plan.stepper.rel_tol) << '\n';
    os << "abs-tol=" << io::format_double(plan.stepper.abs_tol) << '\n';
    os << "seed=" << plan.seed << '\n';
    os << "out=" << ps.out_dir << '\n';
    return os.str();
}

int run(int argc, const char* const* argv) {
    app_state st;
    build_app(st);
    try {
        st.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = st.app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::vector<std::string> args(
            argv + (argc > 0 ? 1 : 0), argv + (argc > 0 ? argc : 0));
        return execute(resolve_with_config(st, args));
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const range_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const dimension_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const unsupported_conversion_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        // Runtime failures (overflow, lost finiteness, rejected fits) mean
        // the run itself went bad, not the invocation.
        std::cerr << "run failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace dyadic::cli
