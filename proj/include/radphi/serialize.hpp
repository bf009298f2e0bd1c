#pragma once

#include <radphi/bvp.hpp>
#include <radphi/energy.hpp>
#include <radphi/models.hpp>
#include <radphi/shooting.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace radphi {

using nlohmann::json;

// 17 significant digits: enough to round-trip any double through text.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void put_opt(json& j, const char* key, const std::optional<double>& v) {
    if (v)
        j[key] = *v;
    else
        j[key] = nullptr;
}

inline std::optional<double> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace detail

// --------------------------------------------------------------------------
// Model descriptors.  Only the defining fields are serialized; cached
// quantities (u0, U0, k, sandwich fits for tables) are recomputed on load so
// a file round-trip reproduces the exact same model bit for bit.
// --------------------------------------------------------------------------

inline json to_json(const PhiModel& m) {
    json j;
    switch (m.family) {
        case PhiFamily::p_laplacian:
            j["family"] = "p-laplacian";
            j["p"] = m.p;
            break;
        case PhiFamily::perturbed_p:
            j["family"] = "perturbed-p";
            j["p"] = m.p;
            break;
        case PhiFamily::tabulated:
            j["family"] = "tabulated";
            j["p"] = m.p;
            j["s"] = m.table.knots();
            j["values"] = m.table.values();
            break;
    }
    return j;
}

inline PhiModel phi_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    const double p = j.at("p").get<double>();
    if (family == "p-laplacian") return make_p_laplacian(p);
    if (family == "perturbed-p") return make_perturbed_p(p);
    if (family == "tabulated")
        return make_tabulated_phi(j.at("s").get<std::vector<double>>(),
                                  j.at("values").get<std::vector<double>>(), p);
    throw std::invalid_argument("phi_from_json: unknown family '" + family + "'");
}

inline json to_json(const ReactionModel& m) {
    json j;
    switch (m.family) {
        case ReactionFamily::power_shift:
            j["family"] = "power-shift";
            j["alpha"] = m.alpha;
            j["beta"] = m.beta;
            break;
        case ReactionFamily::linear_shift:
            j["family"] = "linear-shift";
            j["beta"] = m.beta;
            break;
        case ReactionFamily::tabulated:
            j["family"] = "tabulated";
            j["alpha"] = m.alpha;
            j["u"] = m.table.knots();
            j["values"] = m.table.values();
            break;
    }
    return j;
}

inline ReactionModel reaction_from_json(const json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "power-shift")
        return make_power_shift(j.at("alpha").get<double>(),
                                j.value("beta", 1.0));
    if (family == "linear-shift") return make_linear_shift(j.value("beta", 1.0));
    if (family == "tabulated")
        return make_tabulated_reaction(j.at("u").get<std::vector<double>>(),
                                       j.at("values").get<std::vector<double>>(),
                                       j.at("alpha").get<double>());
    throw std::invalid_argument("reaction_from_json: unknown family '" + family + "'");
}

inline json to_json(const ProblemInstance& prob) {
    json j;
    j["N"] = prob.N;
    j["lambda"] = prob.lambda;
    j["phi"] = to_json(prob.phi);
    j["reaction"] = to_json(prob.reaction);
    return j;
}

inline ProblemInstance instance_from_json(const json& j) {
    ProblemInstance prob;
    prob.N = j.at("N").get<int>();
    prob.lambda = j.at("lambda").get<double>();
    prob.phi = phi_from_json(j.at("phi"));
    prob.reaction = reaction_from_json(j.at("reaction"));
    if (prob.N < 1) throw std::invalid_argument("instance_from_json: need N >= 1");
    if (!(prob.lambda > 0.0))
        throw std::invalid_argument("instance_from_json: need lambda > 0");
    return prob;
}

inline ProblemInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open problem file '" + path + "'");
    json j = json::parse(in);  // parse errors surface with byte positions
    return instance_from_json(j);
}

// --------------------------------------------------------------------------
// Result payloads.
// --------------------------------------------------------------------------

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::zero_crossing: return "zero-crossing";
        case EventKind::reached_boundary: return "reached-boundary";
        case EventKind::window_exit: return "window-exit";
    }
    return "unknown";
}

inline EventKind event_kind_from_name(const std::string& s) {
    if (s == "zero-crossing") return EventKind::zero_crossing;
    if (s == "reached-boundary") return EventKind::reached_boundary;
    if (s == "window-exit") return EventKind::window_exit;
    throw std::invalid_argument("unknown trajectory event kind '" + s + "'");
}

inline json to_json(const Trajectory& t) {
    json j;
    j["r"] = t.r;
    j["u"] = t.u;
    j["du"] = t.du;
    j["I"] = t.I;
    json evs = json::array();
    for (const auto& e : t.events)
        evs.push_back({{"kind", event_kind_name(e.kind)}, {"r", e.r}});
    j["events"] = evs;
    return j;
}

inline Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    t.r = j.at("r").get<std::vector<double>>();
    t.u = j.at("u").get<std::vector<double>>();
    t.du = j.at("du").get<std::vector<double>>();
    t.I = j.at("I").get<std::vector<double>>();
    if (t.u.size() != t.r.size() || t.du.size() != t.r.size() ||
        t.I.size() != t.r.size())
        throw std::invalid_argument("trajectory_from_json: column lengths differ");
    for (const auto& e : j.at("events")) {
        t.events.push_back({event_kind_from_name(e.at("kind").get<std::string>()),
                            e.at("r").get<double>()});
    }
    return t;
}

inline json to_json(const EnergyReport& rep) {
    return json{{"monotone", rep.monotone},
                {"nonneg", rep.nonneg},
                {"e1_nonneg", rep.e1_nonneg},
                {"max_violation", rep.max_violation}};
}

inline json to_json(const LemmaReport& rep) {
    json j;
    j["c"] = rep.c;
    j["u0_bound_ok"] = rep.u0_bound_ok;
    j["u0_margin"] = rep.u0_margin;
    detail::put_opt(j, "r1", rep.r1);
    j["r1_in_half"] = rep.r1_in_half;
    detail::put_opt(j, "r2", rep.r2);
    j["r2_in_quarter"] = rep.r2_in_quarter;
    detail::put_opt(j, "r3", rep.r3);
    detail::put_opt(j, "slope", rep.slope);
    j["bounds_checked"] = rep.bounds_checked;
    j["slope_bound_ok"] = rep.slope_bound_ok;
    j["M"] = rep.M;
    j["energy_upper"] = rep.energy_upper;
    detail::put_opt(j, "e_r3", rep.e_r3);
    j["energy_bound_ok"] = rep.energy_bound_ok;
    j["monotone_decreasing"] = rep.monotone_decreasing;
    return j;
}

inline LemmaReport lemma_from_json(const json& j) {
    LemmaReport rep;
    rep.c = j.at("c").get<double>();
    rep.u0_bound_ok = j.at("u0_bound_ok").get<bool>();
    rep.u0_margin = j.at("u0_margin").get<double>();
    rep.r1 = detail::get_opt(j, "r1");
    rep.r1_in_half = j.at("r1_in_half").get<bool>();
    rep.r2 = detail::get_opt(j, "r2");
    rep.r2_in_quarter = j.at("r2_in_quarter").get<bool>();
    rep.r3 = detail::get_opt(j, "r3");
    rep.slope = detail::get_opt(j, "slope");
    rep.bounds_checked = j.at("bounds_checked").get<bool>();
    rep.slope_bound_ok = j.at("slope_bound_ok").get<bool>();
    rep.M = j.at("M").get<double>();
    rep.energy_upper = j.at("energy_upper").get<double>();
    rep.e_r3 = detail::get_opt(j, "e_r3");
    rep.energy_bound_ok = j.at("energy_bound_ok").get<bool>();
    rep.monotone_decreasing = j.at("monotone_decreasing").get<bool>();
    return rep;
}

inline json to_json(const SolutionRecord& rec) {
    json j;
    j["lambda"] = rec.lambda;
    j["a"] = rec.a;
    j["residual"] = rec.residual;
    j["positive"] = rec.positive;
    j["e_min"] = rec.e_min;
    j["traj"] = to_json(rec.traj);
    j["diagnostics"] = to_json(rec.diagnostics);
    return j;
}

inline SolutionRecord record_from_json(const json& j) {
    SolutionRecord rec;
    rec.lambda = j.at("lambda").get<double>();
    rec.a = j.at("a").get<double>();
    rec.residual = j.at("residual").get<double>();
    rec.positive = j.at("positive").get<bool>();
    rec.e_min = j.at("e_min").get<double>();
    rec.traj = trajectory_from_json(j.at("traj"));
    rec.diagnostics = lemma_from_json(j.at("diagnostics"));
    return rec;
}

inline json to_json(const SweepReport& rep) {
    json j;
    j["lambda_grid"] = rep.lambda_grid;
    json recs = json::array();
    for (const auto& per_lambda : rep.records) {
        json row = json::array();
        for (const auto& r : per_lambda) row.push_back(to_json(r));
        recs.push_back(row);
    }
    j["records"] = recs;
    detail::put_opt(j, "lambda0_estimate", rep.lambda0_estimate);
    if (rep.lambda0_bracket)
        j["lambda0_bracket"] = {rep.lambda0_bracket->first, rep.lambda0_bracket->second};
    else
        j["lambda0_bracket"] = nullptr;
    detail::put_opt(j, "lambda1_evidence", rep.lambda1_evidence);
    detail::put_opt(j, "lambda2_evidence", rep.lambda2_evidence);
    return j;
}

inline SweepReport sweep_from_json(const json& j) {
    SweepReport rep;
    rep.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    for (const auto& row : j.at("records")) {
        std::vector<SolutionRecord> per_lambda;
        for (const auto& r : row) per_lambda.push_back(record_from_json(r));
        rep.records.push_back(std::move(per_lambda));
    }
    rep.lambda0_estimate = detail::get_opt(j, "lambda0_estimate");
    if (j.contains("lambda0_bracket") && !j.at("lambda0_bracket").is_null()) {
        const auto& b = j.at("lambda0_bracket");
        rep.lambda0_bracket = std::make_pair(b.at(0).get<double>(), b.at(1).get<double>());
    }
    rep.lambda1_evidence = detail::get_opt(j, "lambda1_evidence");
    rep.lambda2_evidence = detail::get_opt(j, "lambda2_evidence");
    return rep;
}

// --------------------------------------------------------------------------
// CSV writers (%.17g everywhere, so files survive a parse round-trip).
// --------------------------------------------------------------------------

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 const std::vector<double>& E) {
    if (E.size() != traj.r.size())
        throw std::invalid_argument("write_trajectory_csv: energy column length differs");
    os << "r,u,du,I,E\n";
    for (size_t i = 0; i < traj.r.size(); ++i)
        os << fmt17(traj.r[i]) << ',' << fmt17(traj.u[i]) << ',' << fmt17(traj.du[i])
           << ',' << fmt17(traj.I[i]) << ',' << fmt17(E[i]) << '\n';
}

inline void write_branch_csv(std::ostream& os, const SweepReport& rep) {
    os << "lambda,a,residual,positive,r1,r2,E_min\n";
    for (const auto& per_lambda : rep.records) {
        for (const auto& rec : per_lambda) {
            os << fmt17(rec.lambda) << ',' << fmt17(rec.a) << ',' << fmt17(rec.residual)
               << ',' << (rec.positive ? 1 : 0) << ',';
            if (rec.diagnostics.r1) os << fmt17(*rec.diagnostics.r1);
            os << ',';
            if (rec.diagnostics.r2) os << fmt17(*rec.diagnostics.r2);
            os << ',' << fmt17(rec.e_min) << '\n';
        }
    }
}

}  // namespace radphi
