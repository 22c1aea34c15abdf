#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "xps/csv.hpp"
#include "xps/deformed_algebra.hpp"
#include "xps/errors.hpp"
#include "xps/extended_system.hpp"
#include "xps/groundstate.hpp"
#include "xps/instanton.hpp"
#include "xps/potentials.hpp"
#include "xps/shape_invariance.hpp"
#include "xps/spectral_oracle.hpp"
#include "xps/svg.hpp"

namespace xps::cli {

using nlohmann::json;

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {
        "partner",   "dynamics",    "groundstate", "breaking",
        "instanton", "shape_check", "shape_spectrum", "algebra",
        "selfsimilar", "oracle"};
    return names;
}

struct RunOptions {
    std::string out_dir;
    bool svg = false;
    std::optional<std::uint64_t> seed;  // reserved, recorded only
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 config error, 3 numerical error
    std::string message;
    std::vector<std::string> outputs;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

inline void reject_unknown_keys(const json& j, const std::string& path,
                                const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw ConfigError("config: expected an object at " + path);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "' at " +
                              path);
}

inline double need_number(const json& j, const std::string& path,
                          const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config: missing key '" + key + "' at " + path);
    if (!j.at(key).is_number())
        throw ConfigError("config: key '" + key + "' at " + path +
                          " must be a number");
    return j.at(key).get<double>();
}

inline double number_or(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw ConfigError("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline int int_or(const json& j, const std::string& key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config: key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

inline Interval parse_domain(const json& j, const std::string& path,
                             Interval dflt) {
    if (!j.contains("domain")) return dflt;
    const json& d = j.at("domain");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() ||
        !d[1].is_number())
        throw ConfigError("config: key 'domain' at " + path +
                          " must be [lo, hi]");
    return Interval{d[0].get<double>(), d[1].get<double>()};
}

inline SuperPotential parse_potential(const json& j, const std::string& path) {
    if (!j.is_object())
        throw ConfigError("config: expected a potential object at " + path);
    if (!j.contains("family") || !j.at("family").is_string())
        throw ConfigError("config: missing key 'family' at " + path);
    const std::string fam = j.at("family").get<std::string>();
    try {
        if (fam == "linear") {
            reject_unknown_keys(j, path, {"family", "omega", "domain"});
            return SuperPotential::linear(need_number(j, path, "omega"),
                                          parse_domain(j, path, {-8.0, 8.0}));
        }
        if (fam == "double_well") {
            reject_unknown_keys(j, path, {"family", "lambda", "a", "domain"});
            return SuperPotential::double_well(
                need_number(j, path, "lambda"), need_number(j, path, "a"),
                parse_domain(j, path, {-8.0, 8.0}));
        }
        if (fam == "morse") {
            reject_unknown_keys(j, path, {"family", "A", "B", "domain"});
            return SuperPotential::morse(need_number(j, path, "A"),
                                         need_number(j, path, "B"),
                                         parse_domain(j, path, {-4.0, 24.0}));
        }
        if (fam == "poschl_teller") {
            reject_unknown_keys(j, path, {"family", "A", "B", "domain"});
            return SuperPotential::poschl_teller(
                need_number(j, path, "A"), need_number(j, path, "B"),
                parse_domain(j, path, {-20.0, 20.0}));
        }
        if (fam == "table") {
            reject_unknown_keys(j, path, {"family", "x", "w"});
            if (!j.contains("x") || !j.contains("w"))
                throw ConfigError("config: table potential needs 'x' and 'w' "
                                  "arrays at " + path);
            std::vector<double> x = j.at("x").get<std::vector<double>>();
            std::vector<double> w = j.at("w").get<std::vector<double>>();
            if (x.size() != w.size())
                throw ConfigError("config: 'x' and 'w' lengths differ at " +
                                  path);
            return SuperPotential::table(std::move(x), std::move(w));
        }
    } catch (const ParameterError& e) {
        throw ConfigError("config: invalid parameters at " + path + ": " +
                          e.what());
    }
    throw ConfigError("config: unknown potential family '" + fam + "' at " +
                      path);
}

inline Grid parse_grid(const json& j, const std::string& path, Grid dflt) {
    reject_unknown_keys(j, path, {"lo", "hi", "n"});
    try {
        return Grid(number_or(j, "lo", dflt.x_lo), number_or(j, "hi", dflt.x_hi),
                    int_or(j, "n", dflt.n));
    } catch (const ParameterError& e) {
        throw ConfigError("config: invalid grid at " + path + ": " + e.what());
    }
}

inline ExtendedSystem parse_system(const json& cfg) {
    if (!cfg.contains("system"))
        throw ConfigError("config: missing key 'system'");
    const json& sys = cfg.at("system");
    reject_unknown_keys(sys, "system", {"W", "V"});
    if (!sys.contains("W"))
        throw ConfigError("config: missing key 'W' at system");
    SuperPotential w = parse_potential(sys.at("W"), "system.W");
    std::optional<SuperPotential> v;
    if (sys.contains("V") && !sys.at("V").is_null())
        v = parse_potential(sys.at("V"), "system.V");
    return ExtendedSystem{std::move(w), std::move(v)};
}

inline std::string slashed(const std::string& dotted) {
    std::string out = "/";
    for (char c : dotted) out += (c == '.') ? '/' : c;
    return out;
}

struct TaskPlot {
    std::string filename;
    std::string title;
    std::vector<double> x;
    std::vector<std::vector<double>> series;
};

struct TaskFiles {
    // Filename -> CSV content (already rendered), plus optional SVG plots.
    std::vector<std::pair<std::string, CsvWriter>> csv;
    std::vector<TaskPlot> plots;  // written only when --svg is given
    json extra;  // manifest additions (tolerances, convergence, flags)
};

inline const std::set<std::string>& allowed_params(const std::string& task) {
    static const std::map<std::string, std::set<std::string>> allowed = {
        {"partner", {"grid"}},
        {"dynamics", {"initial", "t_end", "tol", "samples"}},
        {"groundstate", {"grid_q", "grid_p", "iterations"}},
        {"breaking", {}},
        {"instanton", {"tau_span", "n", "tau0"}},
        {"shape_check", {"family", "a0", "grid"}},
        {"shape_spectrum", {"family", "a0", "n_max", "grid"}},
        {"algebra", {"model", "r1", "Q", "k", "h_min", "dim"}},
        {"selfsimilar", {"r1", "Q", "h", "n_max", "q", "p"}},
        {"oracle", {"sign", "grid", "k", "richardson", "auto_extend"}},
    };
    auto it = allowed.find(task);
    if (it == allowed.end())
        throw ConfigError("config: unknown task '" + task + "'");
    return it->second;
}

// ---------------------------------------------------------------------
// per-task runners
// ---------------------------------------------------------------------

inline TaskFiles run_partner(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json params = cfg.value("params", json::object());
    Grid g = params.contains("grid")
                 ? parse_grid(params.at("grid"), "params.grid",
                              Grid(sys.w.domain().lo, sys.w.domain().hi, 801))
                 : Grid(sys.w.domain().lo, sys.w.domain().hi, 801);
    CsvWriter csv({"x", "w", "w_prime", "u_plus", "u_minus"});
    TaskPlot plot{"partner.svg", "partner potentials", {}, {{}, {}, {}}};
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        const double up = eval_partner(sys.w, x, PartnerSign::plus);
        const double um = eval_partner(sys.w, x, PartnerSign::minus);
        csv.add_row({x, sys.w.value(x), sys.w.derivative(x), up, um});
        plot.x.push_back(x);
        plot.series[0].push_back(sys.w.value(x));
        plot.series[1].push_back(up);
        plot.series[2].push_back(um);
    }
    TaskFiles out;
    out.csv.emplace_back("partner.csv", std::move(csv));
    out.plots.push_back(std::move(plot));
    return out;
}

inline TaskFiles run_dynamics(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json params = cfg.value("params", json::object());
    const json init = params.value("initial", json::object());
    reject_unknown_keys(init, "params.initial",
                        {"q", "q_soul", "p", "p_soul", "pi_q", "pi_q_soul",
                         "pi_p", "pi_p_soul"});
    PhaseState s0;
    s0.q = {number_or(init, "q", 0.0), number_or(init, "q_soul", 0.0)};
    s0.p = {number_or(init, "p", 0.0), number_or(init, "p_soul", 0.0)};
    s0.pi_q = {number_or(init, "pi_q", 0.0), number_or(init, "pi_q_soul", 0.0)};
    s0.pi_p = {number_or(init, "pi_p", 0.0), number_or(init, "pi_p_soul", 0.0)};
    const double t_end = number_or(params, "t_end", 10.0);
    const double tol = number_or(params, "tol", 1e-10);
    const int samples = int_or(params, "samples", 500);

    Trajectory traj = integrate_classical(sys, s0, t_end, tol, samples);
    TaskFiles out;
    out.csv.emplace_back("trajectory.csv", trajectory_csv(sys, traj));
    out.extra["tolerances"]["ode_tol"] = tol;
    if (traj.status == Trajectory::Status::domain_exit)
        out.extra["flags"].push_back("domain_exit: " + traj.note);
    TaskPlot plot{"trajectory.svg", "q(t), p(t)", {}, {{}, {}}};
    for (const auto& s : traj.samples) {
        plot.x.push_back(s.t);
        plot.series[0].push_back(s.q.body);
        plot.series[1].push_back(s.p.body);
    }
    out.plots.push_back(std::move(plot));
    return out;
}

inline TaskFiles run_groundstate(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json params = cfg.value("params", json::object());
    Grid gq = params.contains("grid_q")
                  ? parse_grid(params.at("grid_q"), "params.grid_q",
                               Grid(-8, 8, 2001))
                  : Grid(-8, 8, 2001);
    Grid gp = params.contains("grid_p")
                  ? parse_grid(params.at("grid_p"), "params.grid_p", gq)
                  : gq;
    const int iterations = int_or(params, "iterations", 2);
    ProductState st = iterate_groundstate(sys, gq, gp, iterations);

    TaskFiles out;
    out.csv.emplace_back("groundstate_psi.csv", groundstate_csv(st));
    TaskPlot plot{"groundstate_psi.svg", "psi1, psi2", {}, {{}, {}}};
    for (int i = 0; i < st.gq.n; ++i) {
        plot.x.push_back(st.gq.node(i));
        plot.series[0].push_back(st.psi1[static_cast<size_t>(i)]);
        plot.series[1].push_back(st.psi2[static_cast<size_t>(i)]);
    }
    out.plots.push_back(std::move(plot));
    if (st.has_p_sector()) {
        CsvWriter phi({"p", "phi1", "phi2"});
        for (int i = 0; i < st.gp.n; ++i)
            phi.add_row({st.gp.node(i), st.phi1[static_cast<size_t>(i)],
                         st.phi2[static_cast<size_t>(i)]});
        out.csv.emplace_back("groundstate_phi.csv", std::move(phi));
    }
    out.extra["norm_closed_form"] = st.norm_closed_form;
    if (st.separation_warning)
        out.extra["flags"].push_back(
            "separation: inter-vacuum action below 1; iteration accuracy "
            "degrades");
    return out;
}

inline std::vector<double> breaking_row(const ExtendedSystem& sys,
                                        const json& wcfg, const json& vcfg) {
    auto family_of = [](const json& j) {
        return j.is_object() && j.contains("family")
                   ? j.at("family").get<std::string>()
                   : std::string();
    };
    if (family_of(wcfg) != "double_well")
        throw ConfigError(
            "config: breaking task requires a double_well W potential");
    if (!vcfg.is_null() && family_of(vcfg) != "double_well")
        throw ConfigError(
            "config: breaking task requires V null or double_well");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const BreakingResult r = breaking_energy_semiclassical(sys);
    const FExpectation f = auxiliary_expectation(sys);
    const double f_col =
        f.phase == BreakingPhase::negative_eps ? nan : f.value.real();
    return {wcfg.at("lambda").get<double>(),
            wcfg.at("a").get<double>(),
            vcfg.is_null() ? nan : vcfg.at("lambda").get<double>(),
            vcfg.is_null() ? nan : vcfg.at("a").get<double>(),
            r.delta_w,
            r.delta_v,
            r.eps_q,
            r.eps_p,
            r.eps,
            f_col};
}

inline TaskFiles run_breaking(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json& wcfg = cfg.at("system").at("W");
    const json vcfg = cfg.at("system").contains("V") ? cfg.at("system").at("V")
                                                     : json(nullptr);
    CsvWriter csv(breaking_csv_columns());
    csv.add_row(breaking_row(sys, wcfg, vcfg));
    TaskFiles out;
    out.csv.emplace_back("breaking.csv", std::move(csv));
    const FExpectation f = auxiliary_expectation(sys);
    if (f.phase == BreakingPhase::symmetric)
        out.extra["flags"].push_back("f_expect: symmetric phase, value 0");
    else if (f.phase == BreakingPhase::negative_eps)
        out.extra["flags"].push_back(
            "f_expect: eps < 0, value is imaginary; CSV column holds nan");
    return out;
}

inline TaskFiles run_instanton(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json params = cfg.value("params", json::object());
    const double tau_span = number_or(params, "tau_span", 40.0);
    const int n = int_or(params, "n", 2001);
    const double tau0 = number_or(params, "tau0", 0.0);
    InstantonResult res = instanton_trajectory(sys.w, tau_span, n, tau0);

    CsvWriter traj({"tau", "q_c", "w_q_c"});
    for (size_t i = 0; i < res.tau_grid.size(); ++i)
        traj.add_row({res.tau_grid[i], res.q_c[i], res.w_on_traj[i]});
    CsvWriter summary({"delta_w", "w_prime_plus", "delta_q", "me_charge_im",
                       "me_fermion", "eps_instanton"});
    const double eps_inst = res.w_prime_plus / (2.0 * std::numbers::pi) *
                            std::exp(-2.0 * res.delta_w);
    summary.add_row({res.delta_w, res.w_prime_plus, res.delta_q,
                     res.me_charge.imag(), res.me_fermion, eps_inst});
    TaskFiles out;
    out.csv.emplace_back("instanton_trajectory.csv", std::move(traj));
    out.csv.emplace_back("instanton_summary.csv", std::move(summary));
    out.extra["convergence"]["action_identity_gap"] =
        std::fabs(res.action_tau_integral - res.delta_w);
    out.plots.push_back(
        TaskPlot{"instanton.svg", "q_c(tau)", res.tau_grid, {res.q_c}});
    return out;
}

inline const ShapeInvariantFamily& lookup_family(const json& params) {
    if (!params.contains("family") || !params.at("family").is_string())
        throw ConfigError("config: missing key 'family' at params");
    const std::string name = params.at("family").get<std::string>();
    const auto& reg = shape_family_registry();
    auto it = reg.find(name);
    if (it == reg.end())
        throw ConfigError("config: unknown shape-invariant family '" + name +
                          "'");
    return it->second;
}

inline ShapeParams parse_a0(const json& params) {
    if (!params.contains("a0") || !params.at("a0").is_array())
        throw ConfigError("config: missing array key 'a0' at params");
    return params.at("a0").get<std::vector<double>>();
}

inline TaskFiles run_shape_check(const json& cfg) {
    const json params = cfg.value("params", json::object());
    const ShapeInvariantFamily& fam = lookup_family(params);
    const ShapeParams a0 = parse_a0(params);
    Grid g = params.contains("grid")
                 ? parse_grid(params.at("grid"), "params.grid",
                              Grid(fam.default_domain.lo, fam.default_domain.hi,
                                   1201))
                 : Grid(fam.default_domain.lo, fam.default_domain.hi, 1201);
    const RemainderCheck rc = remainder_check(fam, a0, g);
    CsvWriter csv({"r_est", "residual", "shape_invariant"});
    csv.add_row({rc.r_est, rc.residual, rc.shape_invariant ? 1.0 : 0.0});
    TaskFiles out;
    out.csv.emplace_back("shape_check.csv", std::move(csv));
    return out;
}

inline std::string join_params(const ShapeParams& a) {
    std::string s;
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ';';
        s += csv_number(a[i]);
    }
    return s;
}

inline TaskFiles run_shape_spectrum(const json& cfg) {
    const json params = cfg.value("params", json::object());
    const ShapeInvariantFamily& fam = lookup_family(params);
    const ShapeParams a0 = parse_a0(params);
    const int n_max = int_or(params, "n_max", 5);
    ShapeSpectrum ss = spectrum_from_remainders(fam, a0, n_max);
    CsvWriter csv({"n", "energy", "convergence_estimate", "a_k", "remainder"});
    for (size_t i = 0; i < ss.spectrum.levels.size(); ++i) {
        csv.add_text_row(
            {std::to_string(ss.spectrum.levels[i].n),
             csv_number(ss.spectrum.levels[i].energy), csv_number(0.0),
             join_params(ss.chain[i]),
             i < ss.remainders.size() ? csv_number(ss.remainders[i])
                                      : std::string("nan")});
    }
    TaskFiles out;
    out.csv.emplace_back("shape_spectrum.csv", std::move(csv));
    if (ss.spectrum.truncated)
        for (const auto& note : ss.spectrum.notes)
            out.extra["flags"].push_back("truncated: " + note);
    return out;
}

inline TaskFiles run_algebra(const json& cfg) {
    const json params = cfg.value("params", json::object());
    const std::string model = params.value("model", "scaling");
    const int dim = int_or(params, "dim", 50);
    DeformedAlgebra alg;
    if (model == "scaling") {
        try {
            alg = make_scaling_algebra(need_number(params, "params", "r1"),
                                       need_number(params, "params", "Q"),
                                       number_or(params, "h_min", 1.0));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    } else if (model == "translational") {
        const double k = number_or(params, "k", 1.0);
        const double r1 = need_number(params, "params", "r1");
        alg = make_translational_algebra(
            k, [r1](double) { return -r1; },
            number_or(params, "h_min", 0.0));
    } else {
        throw ConfigError("config: unknown algebra model '" + model + "'");
    }
    LadderRep rep = ladder_coefficients(alg, dim - 1);
    AlgebraResiduals res = verify_algebra(rep, alg);
    CsvWriter csv({"n", "energy", "a_sq", "g_h"});
    for (int i = 0; i < rep.dim; ++i)
        csv.add_row({static_cast<double>(i), rep.a_sq[static_cast<size_t>(i)],
                     rep.a_sq[static_cast<size_t>(i)],
                     telescope_g(alg, rep.j3[static_cast<size_t>(i)])});
    TaskFiles out;
    out.csv.emplace_back("algebra.csv", std::move(csv));
    out.extra["convergence"]["res_comm"] = res.res_comm;
    out.extra["convergence"]["res_j3"] = res.res_j3;
    out.extra["convergence"]["res_casimir"] = res.res_casimir;
    out.extra["convergence"]["edge_comm"] = res.edge_comm;
    out.extra["convergence"]["edge_casimir"] = res.edge_casimir;
    return out;
}

inline TaskFiles run_selfsimilar(const json& cfg) {
    const json params = cfg.value("params", json::object());
    const int n_max = int_or(params, "n_max", 10);
    TaskFiles out;
    if (params.contains("q") || params.contains("p")) {
        if (!params.contains("q") || !params.contains("p"))
            throw ConfigError(
                "config: extended selfsimilar task needs both 'q' and 'p'");
        auto parse_alg = [](const json& j, const std::string& path) {
            reject_unknown_keys(j, path, {"r1", "Q", "h"});
            return std::pair<DeformedAlgebra, double>(
                make_scaling_algebra(need_number(j, path, "r1"),
                                     need_number(j, path, "Q")),
                need_number(j, path, "h"));
        };
        auto [aq, hq] = parse_alg(params.at("q"), "params.q");
        auto [ap, hp] = parse_alg(params.at("p"), "params.p");
        auto levels = extended_selfsimilar_spectrum(aq, ap, hq, hp, n_max);
        CsvWriter csv({"n1", "n2", "energy"});
        for (const auto& l : levels)
            csv.add_row({static_cast<double>(l.n1), static_cast<double>(l.n2),
                         l.energy});
        out.csv.emplace_back("selfsimilar_extended.csv", std::move(csv));
        return out;
    }
    DeformedAlgebra alg;
    try {
        alg = make_scaling_algebra(need_number(params, "params", "r1"),
                                   need_number(params, "params", "Q"));
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const double h = number_or(params, "h", 1.0);
    AlgebraSpectrum sp = selfsimilar_spectrum(alg, h, n_max);
    CsvWriter csv({"n", "energy", "a_sq", "g_h"});
    for (size_t i = 0; i < sp.n.size(); ++i)
        csv.add_row({static_cast<double>(sp.n[i]), sp.energy[i], sp.a_sq[i],
                     sp.g_h[i]});
    out.csv.emplace_back("selfsimilar.csv", std::move(csv));
    return out;
}

inline TaskFiles run_oracle(const json& cfg) {
    const ExtendedSystem sys = parse_system(cfg);
    const json params = cfg.value("params", json::object());
    const std::string sign_s = params.value("sign", "plus");
    if (sign_s != "plus" && sign_s != "minus")
        throw ConfigError("config: key 'sign' must be 'plus' or 'minus'");
    const PartnerSign sign =
        sign_s == "plus" ? PartnerSign::plus : PartnerSign::minus;
    Grid g = params.contains("grid")
                 ? parse_grid(params.at("grid"), "params.grid", Grid(-8, 8, 2001))
                 : Grid(-8, 8, 2001);
    OracleOptions opts;
    opts.k = int_or(params, "k", 4);
    opts.richardson = params.value("richardson", false);
    opts.auto_extend = params.value("auto_extend", false);
    SpectrumResult sp = oracle_spectrum(sys.w, g, sign, opts);
    CsvWriter csv({"n", "energy", "convergence_estimate"});
    for (size_t i = 0; i < sp.levels.size(); ++i)
        csv.add_row({static_cast<double>(sp.levels[i].n), sp.levels[i].energy,
                     i < sp.convergence.size()
                         ? sp.convergence[i]
                         : std::numeric_limits<double>::quiet_NaN()});
    TaskFiles out;
    out.csv.emplace_back("oracle.csv", std::move(csv));
    for (size_t i = 0; i < sp.convergence.size(); ++i)
        out.extra["convergence"]["level_" + std::to_string(i)] =
            sp.convergence[i];
    for (const auto& note : sp.notes) out.extra["flags"].push_back(note);
    return out;
}

inline TaskFiles run_task(const std::string& task, const json& cfg) {
    if (task == "partner") return run_partner(cfg);
    if (task == "dynamics") return run_dynamics(cfg);
    if (task == "groundstate") return run_groundstate(cfg);
    if (task == "breaking") return run_breaking(cfg);
    if (task == "instanton") return run_instanton(cfg);
    if (task == "shape_check") return run_shape_check(cfg);
    if (task == "shape_spectrum") return run_shape_spectrum(cfg);
    if (task == "algebra") return run_algebra(cfg);
    if (task == "selfsimilar") return run_selfsimilar(cfg);
    if (task == "oracle") return run_oracle(cfg);
    throw ConfigError("config: unknown task '" + task + "'");
}

// Per-point summary row for sweepable tasks.
inline std::pair<std::vector<std::string>, std::vector<std::string>>
sweep_row(const std::string& task, const json& cfg) {
    if (task == "breaking") {
        const ExtendedSystem sys = parse_system(cfg);
        const json& wcfg = cfg.at("system").at("W");
        const json vcfg = cfg.at("system").contains("V")
                              ? cfg.at("system").at("V")
                              : json(nullptr);
        auto row = breaking_row(sys, wcfg, vcfg);
        std::vector<std::string> cells;
        for (double v : row) cells.push_back(csv_number(v));
        return {breaking_csv_columns(), cells};
    }
    if (task == "selfsimilar") {
        const json params = cfg.value("params", json::object());
        const int n_max = int_or(params, "n_max", 10);
        DeformedAlgebra alg =
            make_scaling_algebra(need_number(params, "params", "r1"),
                                 need_number(params, "params", "Q"));
        AlgebraSpectrum sp =
            selfsimilar_spectrum(alg, number_or(params, "h", 1.0), n_max);
        std::vector<std::string> cols, cells;
        for (size_t i = 0; i < sp.energy.size(); ++i) {
            cols.push_back("energy_" + std::to_string(i));
            cells.push_back(csv_number(sp.energy[i]));
        }
        return {cols, cells};
    }
    if (task == "oracle") {
        const ExtendedSystem sys = parse_system(cfg);
        const json params = cfg.value("params", json::object());
        OracleOptions opts;
        opts.k = int_or(params, "k", 4);
        opts.richardson = params.value("richardson", false);
        opts.auto_extend = params.value("auto_extend", false);
        Grid g = params.contains("grid")
                     ? parse_grid(params.at("grid"), "params.grid",
                                  Grid(-8, 8, 2001))
                     : Grid(-8, 8, 2001);
        const PartnerSign sign = params.value("sign", "plus") == "plus"
                                     ? PartnerSign::plus
                                     : PartnerSign::minus;
        SpectrumResult sp = oracle_spectrum(sys.w, g, sign, opts);
        std::vector<std::string> cols, cells;
        for (size_t i = 0; i < sp.levels.size(); ++i) {
            cols.push_back("energy_" + std::to_string(i));
            cells.push_back(csv_number(sp.levels[i].energy));
        }
        return {cols, cells};
    }
    throw ConfigError("config: sweep is not supported for task '" + task + "'");
}

inline int sweep_threads() {
    if (const char* env = std::getenv("XPS_SUSY_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

}  // namespace detail

/// Validate top-level config structure for a task; throws ConfigError.
inline void validate_config(const json& cfg, const std::string& task) {
    detail::reject_unknown_keys(cfg, "(top level)",
                                {"task", "system", "params", "sweep"});
    if (cfg.contains("task")) {
        if (!cfg.at("task").is_string() ||
            cfg.at("task").get<std::string>() != task)
            throw ConfigError("config: key 'task' disagrees with the "
                              "command-line task '" + task + "'");
    }
    const auto& allowed = detail::allowed_params(task);
    if (cfg.contains("params"))
        detail::reject_unknown_keys(cfg.at("params"), "params", allowed);
    if (cfg.contains("sweep")) {
        detail::reject_unknown_keys(cfg.at("sweep"), "sweep",
                                    {"path", "values", "from", "to", "step"});
        const json& sw = cfg.at("sweep");
        if (!sw.contains("path") || !sw.at("path").is_string())
            throw ConfigError("config: sweep needs a string key 'path'");
        if (!sw.contains("values") &&
            !(sw.contains("from") && sw.contains("to") && sw.contains("step")))
            throw ConfigError(
                "config: sweep needs 'values' or 'from'/'to'/'step'");
    }
}

inline std::vector<double> sweep_values(const json& sw) {
    std::vector<double> vals;
    if (sw.contains("values")) {
        if (!sw.at("values").is_array())
            throw ConfigError("config: sweep 'values' must be an array");
        vals = sw.at("values").get<std::vector<double>>();
    } else {
        const double from = sw.at("from").get<double>();
        const double to = sw.at("to").get<double>();
        const double step = sw.at("step").get<double>();
        if (!(step > 0) || !std::isfinite(from) || !std::isfinite(to))
            throw ConfigError("config: sweep range must be finite with step > 0");
        for (double v = from; v <= to + 0.5 * step; v += step)
            vals.push_back(v);
    }
    for (double v : vals)
        if (!std::isfinite(v))
            throw ConfigError("config: sweep values must be finite");
    return vals;
}

/// Execute one experiment config. Artifacts land in opts.out_dir; a
/// manifest.json describing the run is always written except on
/// validation failure (exit 2), which writes nothing.
inline RunOutcome run_experiment(const json& cfg, const std::string& task,
                                 const RunOptions& opts) {
    RunOutcome outcome;
    json manifest;
    manifest["task"] = task;
    manifest["config_hash"] = detail::hex64(detail::fnv1a64(cfg.dump()));
    manifest["seed"] =
        opts.seed ? json(*opts.seed) : json(nullptr);
    manifest["status"] = "ok";
    manifest["flags"] = json::array();
    manifest["outputs"] = json::array();

    try {
        validate_config(cfg, task);
        // Parse-level validation before any computation or file output.
        if (cfg.contains("system")) detail::parse_system(cfg);
    } catch (const Error& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
        return outcome;
    }

    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    auto emit_manifest = [&]() {
        std::ofstream os(fs::path(opts.out_dir) / "manifest.json",
                         std::ios::binary);
        os << manifest.dump(2) << "\n";
    };

    try {
        if (cfg.contains("sweep")) {
            const json& sw = cfg.at("sweep");
            const std::string pointer = detail::slashed(
                sw.at("path").get<std::string>());
            const std::vector<double> vals = sweep_values(sw);

            // Column layout probed on the first point (or the base config
            // for an empty sweep).
            json base = cfg;
            base.erase("sweep");
            std::vector<std::string> task_cols;
            {
                json probe = base;
                if (!vals.empty())
                    probe[json::json_pointer(pointer)] = vals.front();
                task_cols = detail::sweep_row(task, probe).first;
            }
            std::vector<std::string> cols = {"sweep_index", "value", "status"};
            cols.insert(cols.end(), task_cols.begin(), task_cols.end());
            CsvWriter csv(cols);

            struct PointResult {
                std::vector<std::string> cells;
                bool failed = false;
                std::string error;
            };
            std::vector<PointResult> results(vals.size());
            std::atomic<size_t> next{0};
            const int nthreads =
                std::max(1, std::min<int>(detail::sweep_threads(),
                                          static_cast<int>(vals.size())));
            auto worker = [&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= vals.size()) break;
                    json point = base;
                    try {
                        point[json::json_pointer(pointer)] = vals[i];
                        results[i].cells = detail::sweep_row(task, point).second;
                    } catch (const std::exception& e) {
                        results[i].failed = true;
                        results[i].error = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
            worker();
            for (auto& th : pool) th.join();

            bool any_failed = false;
            for (size_t i = 0; i < vals.size(); ++i) {
                std::vector<std::string> row = {std::to_string(i),
                                                csv_number(vals[i])};
                if (results[i].failed) {
                    any_failed = true;
                    row.push_back("failed");
                    for (size_t c = 0; c < task_cols.size(); ++c)
                        row.push_back("nan");
                    manifest["flags"].push_back(
                        "sweep point " + std::to_string(i) + " failed: " +
                        results[i].error);
                } else {
                    row.push_back("ok");
                    row.insert(row.end(), results[i].cells.begin(),
                               results[i].cells.end());
                }
                csv.add_text_row(row);
            }
            const std::string fname = task + "_sweep.csv";
            csv.write((fs::path(opts.out_dir) / fname).string());
            manifest["outputs"].push_back(fname);
            outcome.outputs.push_back(fname);
            if (any_failed) {
                manifest["status"] = "partial";
                outcome.exit_code = 3;
                outcome.message = "one or more sweep points failed";
            }
            emit_manifest();
            return outcome;
        }

        detail::TaskFiles files = detail::run_task(task, cfg);
        for (auto& [name, csv] : files.csv) {
            csv.write((fs::path(opts.out_dir) / name).string());
            manifest["outputs"].push_back(name);
            outcome.outputs.push_back(name);
        }
        if (files.extra.is_object())
            for (auto it = files.extra.begin(); it != files.extra.end(); ++it)
                manifest[it.key()] = it.value();
        if (opts.svg)
            for (const auto& p : files.plots) {
                write_svg_lineplot((fs::path(opts.out_dir) / p.filename).string(),
                                   p.x, p.series, p.title);
                manifest["outputs"].push_back(p.filename);
                outcome.outputs.push_back(p.filename);
            }
        emit_manifest();
        return outcome;
    } catch (const ConfigError& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
        return outcome;
    } catch (const ParameterError& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
        return outcome;
    } catch (const Error& e) {
        manifest["status"] = "numerical_error";
        manifest["flags"].push_back(e.what());
        emit_manifest();
        outcome.exit_code = 3;
        outcome.message = e.what();
        return outcome;
    } catch (const std::exception& e) {
        // json type mismatches and the like: malformed configuration
        outcome.exit_code = 2;
        outcome.message = std::string("config: ") + e.what();
        return outcome;
    }
}

}  // namespace xps::cli
