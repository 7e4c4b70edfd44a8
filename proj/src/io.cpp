#include "dyadic/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "dyadic/errors.hpp"

namespace dyadic::io {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* status_name(run_status s) {
    switch (s) {
        case run_status::reached_t_end: return "reached_t_end";
        case run_status::event_stop: return "event_stop";
        case run_status::step_floor: return "step_floor";
        case run_status::max_steps: return "max_steps";
    }
    return "unknown";
}

const char* mode_name(step_mode m) {
    switch (m) {
        case step_mode::auto_select: return "auto";
        case step_mode::explicit_embedded: return "explicit_embedded";
        case step_mode::integrating_factor: return "integrating_factor";
    }
    return "unknown";
}

const char* event_kind_name(event_spec::kind k) {
    switch (k) {
        case event_spec::kind::norm_threshold: return "norm_threshold";
        case event_spec::kind::dt_floor: return "dt_floor";
        case event_spec::kind::tail_fraction: return "tail_fraction";
    }
    return "unknown";
}

ordered_json json_of_plan(const experiment_plan& plan) {
    ordered_json j;
    j["kind"] = kind_name(plan.kind);
    j["lambda"] = plan.params.lambda;
    j["nu"] = plan.params.nu;
    j["alpha"] = plan.params.alpha;
    j["gamma"] = plan.gamma;
    j["modes"] = plan.params.n_modes;
    j["modes_list"] = plan.n_list;
    j["t_end"] = plan.t_end;
    j["force"] = plan.params.force;
    j["init"] = plan.init;
    j["rel_tol"] = plan.stepper.rel_tol;
    j["abs_tol"] = plan.stepper.abs_tol;
    j["dt_init"] = plan.stepper.dt_init;
    j["dt_min"] = plan.stepper.dt_min;
    j["dt_max"] = plan.stepper.dt_max;
    j["max_steps"] = plan.stepper.max_steps;
    j["step_mode"] = mode_name(plan.stepper.mode);
    j["disable_nonlinear"] = plan.stepper.disable_nonlinear;
    j["sample_every"] = plan.sample_every;
    j["tail_tol"] = plan.tail_tol;
    j["tail_width"] = plan.tail_width;
    j["n_vectors"] = plan.n_vectors;
    j["seed"] = plan.seed;
    ordered_json evs = ordered_json::array();
    for (const event_spec& e : plan.events) {
        evs.push_back({{"kind", event_kind_name(e.k)},
                       {"threshold", e.threshold},
                       {"gamma", e.gamma},
                       {"width", e.width}});
    }
    j["events"] = evs;
    return j;
}

ordered_json json_of_constants(const constant_set& c) {
    ordered_json j;
    j["lambda"] = c.lambda;
    j["nu"] = c.nu;
    j["alpha"] = c.alpha;
    j["gamma"] = c.gamma;
    j["c_b_nominal"] = c.c_b_nominal;
    j["c_b_flux"] = c.c_b_flux;
    j["epsilon"] = c.epsilon;
    j["a_gamma"] = c.a_gamma;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["c3"] = c.c3;
    j["m_gamma"] = c.m_gamma;
    j["c_riccati"] = c.c_riccati;
    j["gamma_range_valid"] = c.gamma_range_valid;
    return j;
}

ordered_json json_of_check(const check_result& c) {
    ordered_json j;
    j["name"] = c.name;
    j["ok"] = c.ok;
    j["skipped"] = c.skipped;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["detail"] = c.detail;
    return j;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw error("cannot open for writing: " + path);
    return f;
}

void hash_mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    h ^= static_cast<unsigned char>(';');
    h *= 1099511628211ull;
}

}  // namespace

const char* kind_name(experiment_kind k) {
    switch (k) {
        case experiment_kind::simulate: return "simulate";
        case experiment_kind::blowup: return "blowup";
        case experiment_kind::regularity: return "regularity";
        case experiment_kind::attractor: return "attractor";
        case experiment_kind::verify: return "verify";
    }
    return "unknown";
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_timeseries_csv(const std::string& path,
                          const std::vector<diagnostics_record>& records) {
    std::ofstream f = open_out(path);
    f << "t,energy,enstrophy,norm_gamma_sq,norm_third,h_value,riccati_value,"
         "min_mode,tail_fraction,energy_budget_residual\n";
    for (const diagnostics_record& r : records) {
        f << format_double(r.t) << ',' << format_double(r.energy) << ','
          << format_double(r.enstrophy) << ','
          << format_double(r.norm_gamma_sq) << ','
          << format_double(r.norm_third) << ',';
        if (r.h_value) f << format_double(*r.h_value);
        f << ',';
        if (r.riccati_value) f << format_double(*r.riccati_value);
        f << ',' << format_double(r.min_mode) << ','
          << format_double(r.tail_fraction) << ','
          << format_double(r.energy_budget_residual) << '\n';
    }
    if (!f) throw error("write failed: " + path);
}

void write_summary_json(const std::string& path, const run_artifact& art) {
    ordered_json j;
    j["version"] = version_string;
    j["command"] = kind_name(art.plan.kind);
    j["seed"] = art.plan.seed;
    j["param_hash"] = param_hash(art.plan);
    j["plan"] = json_of_plan(art.plan);
    j["constants"] = json_of_constants(art.consts);
    j["levels"] = art.n_levels;

    ordered_json runs = ordered_json::array();
    for (std::size_t i = 0; i < art.runs.size(); ++i) {
        const trajectory& tr = art.runs[i];
        ordered_json r;
        r["n_modes"] = art.n_levels[i];
        r["status"] = status_name(tr.status);
        r["step_mode"] = mode_name(tr.mode_used);
        r["accepted"] = tr.n_accepted;
        r["rejected"] = tr.n_rejected;
        r["samples"] = tr.samples.size();
        r["t_final"] = tr.samples.empty() ? 0.0 : tr.samples.back().t;
        ordered_json evs = ordered_json::array();
        for (const event_hit& e : tr.events) {
            evs.push_back({{"kind", event_kind_name(e.spec.k)},
                           {"t", e.t},
                           {"value", e.value}});
        }
        r["events"] = evs;
        runs.push_back(std::move(r));
    }
    j["runs"] = runs;

    if (art.blowup) {
        const blowup_report& b = *art.blowup;
        ordered_json jb;
        jb["valid"] = b.valid;
        jb["invalid_reason"] = b.invalid_reason;
        jb["initial_norm_gamma"] = b.initial_norm_gamma;
        jb["margin"] = b.margin;
        jb["h_monotone_ok"] = b.h_monotone_ok;
        jb["domination_ok"] = b.domination_ok;
        jb["horizon_monotone_ok"] = b.horizon_monotone_ok;
        jb["norm_growth_ratios"] = b.norm_growth_ratios;
        ordered_json per = ordered_json::array();
        for (const blowup_entry& e : b.per_n) {
            per.push_back({{"n_modes", e.n_modes},
                           {"status", status_name(e.status)},
                           {"horizon", e.horizon},
                           {"horizon_from_event", e.horizon_from_event},
                           {"max_norm_third", e.max_norm_third},
                           {"h_monotone_ok", e.h_monotone_ok},
                           {"domination_ok", e.domination_ok},
                           {"integral_ok", e.integral_ok},
                           {"min_h_over_y", e.min_h_over_y}});
        }
        jb["per_n"] = per;
        j["blowup"] = jb;
    }
    if (art.regularity) {
        const regularity_summary& s = *art.regularity;
        ordered_json js;
        js["n_levels"] = s.n_levels;
        js["sup_enstrophy"] = s.sup_enstrophy;
        js["max_drift"] = s.max_drift;
        js["ledger_ok"] = s.ledger_ok;
        js["max_ledger_excess"] = s.max_ledger_excess;
        if (s.energy_equality) js["energy_equality"] = *s.energy_equality;
        js["sup_energy_sq"] = s.sup_energy_sq;
        j["regularity"] = js;
    }
    if (art.attractor) {
        const attractor_summary& s = *art.attractor;
        j["attractor"] = {{"radius", s.radius},
                          {"entered", s.entered},
                          {"entry_time", s.entry_time},
                          {"resided", s.resided},
                          {"max_after_entry", s.max_after_entry},
                          {"post_entry_sup_third", s.post_entry_sup_third}};
    }
    if (art.verify) {
        const verify_summary& s = *art.verify;
        ordered_json js;
        js["n_vectors"] = s.n_vectors;
        js["n_checks"] = s.n_checks;
        js["n_failures"] = s.n_failures;
        js["n_skipped"] = s.n_skipped;
        js["vacuous"] = s.vacuous;
        ordered_json fails = ordered_json::array();
        for (const verify_failure& f : s.failures) {
            fails.push_back({{"vector_index", f.vector_index},
                             {"check", json_of_check(f.check)},
                             {"vector", f.vec}});
        }
        js["failures"] = fails;
        j["verify"] = js;
    }

    ordered_json checks = ordered_json::array();
    for (const check_result& c : art.asserted) checks.push_back(json_of_check(c));
    j["checks"] = checks;
    j["ok"] = art.all_asserted_ok();

    std::ofstream f = open_out(path);
    f << j.dump(2) << '\n';
    if (!f) throw error("write failed: " + path);
}

void write_plan_json(const std::string& path, const experiment_plan& plan) {
    std::ofstream f = open_out(path);
    f << json_of_plan(plan).dump(2) << '\n';
    if (!f) throw error("write failed: " + path);
}

std::vector<double> load_amplitudes(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open initial data file: " + path);
    std::vector<double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(begin, end - begin + 1);
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
            throw parse_error("bad amplitude at " + path + ":" +
                              std::to_string(lineno) + ": '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

std::string param_hash(const experiment_plan& plan) {
    std::uint64_t h = 14695981039346656037ull;
    hash_mix(h, kind_name(plan.kind));
    hash_mix(h, format_double(plan.params.lambda));
    hash_mix(h, format_double(plan.params.nu));
    hash_mix(h, format_double(plan.params.alpha));
    hash_mix(h, std::to_string(plan.params.n_modes));
    for (double g : plan.params.force) hash_mix(h, format_double(g));
    hash_mix(h, format_double(plan.gamma));
    for (int n : plan.n_list) hash_mix(h, std::to_string(n));
    hash_mix(h, format_double(plan.t_end));
    hash_mix(h, format_double(plan.stepper.rel_tol));
    hash_mix(h, format_double(plan.stepper.abs_tol));
    hash_mix(h, format_double(plan.stepper.dt_init));
    hash_mix(h, format_double(plan.stepper.dt_min));
    hash_mix(h, format_double(plan.stepper.dt_max));
    hash_mix(h, std::to_string(plan.stepper.max_steps));
    hash_mix(h, mode_name(plan.stepper.mode));
    hash_mix(h, plan.stepper.disable_nonlinear ? "1" : "0");
    for (double v : plan.init) hash_mix(h, format_double(v));
    hash_mix(h, format_double(plan.sample_every));
    hash_mix(h, format_double(plan.tail_tol));
    hash_mix(h, std::to_string(plan.tail_width));
    hash_mix(h, std::to_string(plan.n_vectors));
    hash_mix(h, std::to_string(plan.seed));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace dyadic::io
