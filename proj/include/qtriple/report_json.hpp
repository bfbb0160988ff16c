#pragma once

#include "qtriple/series.hpp"
#include "qtriple/verifier.hpp"

#include <json.hpp>

namespace qtriple {

// Reports serialize with exact "p/r" coefficient strings; parse(emit(r))
// reproduces r field for field. The schema here is the CLI's compatibility
// surface.

inline void to_json(nlohmann::json& j, const Window& w) {
    j = {{"z_min", w.z_min}, {"z_max", w.z_max}};
}
inline void from_json(const nlohmann::json& j, Window& w) {
    j.at("z_min").get_to(w.z_min);
    j.at("z_max").get_to(w.z_max);
}

inline void to_json(nlohmann::json& j, const Discrepancy& d) {
    j = {{"z_exp", d.z_exp},
         {"q_exp", d.q_exp},
         {"lhs_coeff", to_string(d.lhs_coeff)},
         {"rhs_coeff", to_string(d.rhs_coeff)}};
}
inline void from_json(const nlohmann::json& j, Discrepancy& d) {
    j.at("z_exp").get_to(d.z_exp);
    j.at("q_exp").get_to(d.q_exp);
    d.lhs_coeff = rational_from_string(j.at("lhs_coeff").get<std::string>());
    d.rhs_coeff = rational_from_string(j.at("rhs_coeff").get<std::string>());
}

inline bool operator==(const Discrepancy& a, const Discrepancy& b) {
    return a.z_exp == b.z_exp && a.q_exp == b.q_exp && a.lhs_coeff == b.lhs_coeff &&
           a.rhs_coeff == b.rhs_coeff;
}

inline void to_json(nlohmann::json& j, const VerificationReport& r) {
    j = {{"lhs", r.lhs_label},
         {"rhs", r.rhs_label},
         {"verdict", r.equal ? "equal" : "discrepancy"},
         {"target_order", r.target_order},
         {"working_order_used", r.working_order_used},
         {"window", r.window},
         {"wall_seconds", r.wall_seconds}};
    if (r.first_discrepancy) j["first_discrepancy"] = *r.first_discrepancy;
    else j["first_discrepancy"] = nullptr;
}
inline void from_json(const nlohmann::json& j, VerificationReport& r) {
    j.at("lhs").get_to(r.lhs_label);
    j.at("rhs").get_to(r.rhs_label);
    r.equal = j.at("verdict").get<std::string>() == "equal";
    j.at("target_order").get_to(r.target_order);
    j.at("working_order_used").get_to(r.working_order_used);
    j.at("window").get_to(r.window);
    j.at("wall_seconds").get_to(r.wall_seconds);
    if (j.at("first_discrepancy").is_null()) r.first_discrepancy.reset();
    else r.first_discrepancy = j.at("first_discrepancy").get<Discrepancy>();
}

inline bool operator==(const VerificationReport& a, const VerificationReport& b) {
    return a.lhs_label == b.lhs_label && a.rhs_label == b.rhs_label && a.equal == b.equal &&
           a.first_discrepancy == b.first_discrepancy && a.target_order == b.target_order &&
           a.working_order_used == b.working_order_used && a.window == b.window &&
           a.wall_seconds == b.wall_seconds;
}

inline void to_json(nlohmann::json& j, const VanishingCheck& v) {
    j = {{"n", v.n}, {"zero", v.zero}};
}
inline void from_json(const nlohmann::json& j, VanishingCheck& v) {
    j.at("n").get_to(v.n);
    j.at("zero").get_to(v.zero);
}
inline bool operator==(const VanishingCheck& a, const VanishingCheck& b) {
    return a.n == b.n && a.zero == b.zero;
}

inline void to_json(nlohmann::json& j, const ChainReport& r) {
    j = {{"m", r.m},
         {"target_order", r.target_order},
         {"window", r.window},
         {"edges", r.edges},
         {"split_vs_s0", r.split_vs_s0},
         {"vanishing", r.vanishing},
         {"pass", r.pass},
         {"wall_seconds", r.wall_seconds}};
}
inline void from_json(const nlohmann::json& j, ChainReport& r) {
    j.at("m").get_to(r.m);
    j.at("target_order").get_to(r.target_order);
    j.at("window").get_to(r.window);
    j.at("edges").get_to(r.edges);
    j.at("split_vs_s0").get_to(r.split_vs_s0);
    j.at("vanishing").get_to(r.vanishing);
    j.at("pass").get_to(r.pass);
    j.at("wall_seconds").get_to(r.wall_seconds);
}

inline bool operator==(const ChainReport& a, const ChainReport& b) {
    return a.m == b.m && a.target_order == b.target_order && a.window == b.window &&
           a.edges == b.edges && a.split_vs_s0 == b.split_vs_s0 && a.vanishing == b.vanishing &&
           a.pass == b.pass && a.wall_seconds == b.wall_seconds;
}

/// Series terms in graded order; coefficients as exact strings.
inline nlohmann::json series_terms_json(const ZQSeries& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [key, c] : s.terms())
        terms.push_back({{"q", key.q_exp}, {"z", key.z_exp}, {"coeff", to_string(c)}});
    return terms;
}

} // namespace qtriple
