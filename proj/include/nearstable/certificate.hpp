#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "nearstable/cacq.hpp"
#include "nearstable/errors.hpp"
#include "nearstable/io.hpp"
#include "nearstable/shm.hpp"
#include "nearstable/smf.hpp"

namespace nearstable {

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return "sha256:" + out.str();
}

namespace detail {

inline Json revision_table(const CapacityRevision& rev) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < rev.keys.size(); ++i)
    rows.push_back({{"id", rev.keys[i]},
                    {"original", rational_to_json(rev.original[i])},
                    {"revised", rational_to_json(rev.revised[i])}});
  return rows;
}

inline Json names(const std::vector<int>& idx, const std::vector<std::string>& ids) {
  Json out = Json::array();
  for (int i : idx) out.push_back(ids[i]);
  return out;
}

inline Json shm_verifier(const HypergraphInstance& inst, const ShmReport& r) {
  return {{"blocking_edges", names(r.blocking_edges, inst.edge_ids)},
          {"over_capacity", names(r.over_capacity, inst.vertex_ids)}};
}

inline Json cacq_verifier(const CacqInstance& inst, const CacqReport& r) {
  Json blocking = Json::array();
  for (int e : r.blocking_edges)
    blocking.push_back({inst.students[inst.edges[e].student], inst.colleges[inst.edges[e].college].id});
  std::vector<std::string> set_ids;
  for (const auto& s : inst.sets) set_ids.push_back(s.id);
  return {{"blocking_edges", blocking},
          {"over_quota_sets", names(r.over_quota_sets, set_ids)},
          {"over_quota_students", names(r.over_quota_students, inst.students)}};
}

inline Json flow_verifier(const FlowInstance& inst, const FlowReport& r) {
  Json kirchhoff = Json::array(), capacity = Json::array();
  for (const auto& k : r.kirchhoff) kirchhoff.push_back({inst.commodities[k.commodity].id, inst.vertex_ids[k.vertex]});
  for (const auto& c : r.capacity)
    capacity.push_back({inst.arcs[c.arc].id, c.commodity < 0 ? std::string("total") : inst.commodities[c.commodity].id});
  Json walk = nullptr;
  if (r.walk) {
    walk = {{"commodity", inst.commodities[r.walk->commodity].id},
            {"vertices", names(r.walk->vertices, inst.vertex_ids)}};
    Json arcs = Json::array();
    for (int a : r.walk->arcs) arcs.push_back(inst.arcs[a].id);
    walk["arcs"] = arcs;
  }
  return {{"blocking_walk", walk}, {"capacity_violations", capacity}, {"kirchhoff_violations", kirchhoff}};
}

inline Json finish(Json cert, const Json& checks) {
  bool pass = true;
  for (const auto& [k, v] : checks.items()) pass = pass && v.get<bool>();
  cert["checks"] = checks;
  cert["verdict"] = pass ? "pass" : "fail";
  return cert;
}

inline std::string mode_name(RoundingMode m) { return m == RoundingMode::Default ? "default" : "balanced"; }

}  // namespace detail

inline bool passed(const Json& certificate) { return certificate.at("verdict") == "pass"; }

// ---------------------------------------------------------------------------
// Certificates for pipeline runs

inline Json shm_certificate(const HypergraphInstance& inst, const ShmSolution& sol, const std::string& digest) {
  const auto& c = sol.certificate;
  Json cert = {{"pipeline", "shm"}, {"input_digest", digest}};
  cert["bounds"] = {{"max_deviation", rational_to_json(c.max_deviation)},
                    {"max_deviation_bound", c.ell - 1},
                    {"sum_deviation", rational_to_json(c.sum_deviation)},
                    {"sum_deviation_bound", c.ell - 1},
                    {"matched_size_minus_capacity", rational_to_json(c.stripped_sum_deviation)},
                    {"max_edge_size", c.ell}};
  cert["revision"] = detail::revision_table(sol.revision);
  cert["verifier"] = detail::shm_verifier(inst, c.report);
  Json steps = Json::array();
  for (const auto& s : sol.trace)
    steps.push_back({{"deleted_row", s.deleted_row},
                     {"fractional_before", s.fractional},
                     {"objective_after", rational_to_json(s.objective)}});
  cert["trace"] = {{"scarf_pivots", sol.scarf_pivots}, {"rounding", steps}};
  cert["solution"] = to_json(inst, ShmAnswer{sol.revision.revised, sol.matching});
  return detail::finish(std::move(cert), {{"max_deviation_within_bound", c.max_bound_ok},
                                          {"sum_deviation_within_bound", c.sum_bound_ok},
                                          {"stable_with_saturation_gadget", c.gadget_stable},
                                          {"stable", c.report.stable()}});
}

inline Json cacq_certificate(const CacqSolution& sol, const std::string& digest) {
  const auto& c = sol.certificate;
  const auto& inst = sol.normalized;
  Json cert = {{"pipeline", "cacq"}, {"input_digest", digest}};
  cert["bounds"] = {{"max_deviation", rational_to_json(c.max_deviation)},
                    {"max_deviation_bound", 2 * c.ell - 1},
                    {"sum_deviation", rational_to_json(sol.revision.sum_deviation())},
                    {"max_sets_per_college", c.ell}};
  auto rows = detail::revision_table(sol.revision);
  for (std::size_t j = 0; j < rows.size(); ++j) rows[j]["tight_at_fractional_point"] = static_cast<bool>(c.tight_at_x_star[j]);
  cert["revision"] = rows;
  cert["verifier"] = detail::cacq_verifier(inst, c.report);
  Json steps = Json::array();
  for (const auto& s : sol.trace)
    steps.push_back({{"deleted_set", s.deleted_set},
                     {"tight", s.tight},
                     {"fractional_mass", s.fractional_mass},
                     {"fractional_before", s.fractional}});
  cert["trace"] = {{"scarf_pivots", sol.scarf_pivots}, {"rounding", steps}};
  cert["solution"] = to_json(inst, CacqAnswer{sol.revision.revised, sol.matching});
  return detail::finish(std::move(cert), {{"max_deviation_within_bound", c.bound_ok},
                                          {"fully_assigned_students_matched", c.pinned_matched},
                                          {"feasible", c.report.feasible()},
                                          {"stable", c.report.stable()}});
}

inline Json smf_certificate(const FlowInstance& inst, const FlowSolution& sol, const std::string& digest) {
  const auto& c = sol.certificate;
  Json cert = {{"pipeline", "smf"}, {"input_digest", digest}, {"mode", detail::mode_name(c.mode)}};
  cert["bounds"] = {{"max_deviation", rational_to_json(c.max_deviation)},
                    {"max_deviation_bound", c.commodities - 1},
                    {"aggregate_size_drift", rational_to_json(abs(c.f_total - c.g_total))},
                    {"commodities", c.commodities}};
  Json arcs = Json::array();
  for (int a = 0; a < inst.num_arcs(); ++a)
    arcs.push_back({{"id", inst.arcs[a].id},
                    {"capacity", rational_to_json(sol.capacities.aggregate.original[a])},
                    {"revised_capacity", rational_to_json(sol.capacities.aggregate.revised[a])}});
  cert["revision"] = arcs;
  Json sizes = Json::array();
  for (int j = 0; j < c.commodities; ++j)
    sizes.push_back({{"id", inst.commodities[j].id},
                     {"input_size", rational_to_json(c.f_sizes[j])},
                     {"rounded_size", rational_to_json(c.g_sizes[j])}});
  cert["commodity_sizes"] = sizes;
  cert["verifier"] = detail::flow_verifier(inst, c.report);
  Json steps = Json::array();
  for (const auto& s : sol.trace)
    steps.push_back({{"commodity", inst.commodities[s.commodity].id},
                     {"structure", s.cycle ? "cycle" : "path"},
                     {"step", rational_to_json(s.step)}});
  cert["trace"] = {{"rounding", steps}};
  FlowAnswer ans{sol.capacities.aggregate.revised, {}, sol.g};
  for (const auto& rev : sol.capacities.per_commodity) ans.commodity_capacity.push_back(rev.revised);
  auto solution = to_json(inst, ans);
  solution["mode"] = detail::mode_name(c.mode);
  cert["solution"] = solution;
  return detail::finish(std::move(cert), {{"commodity_capacities_unchanged", c.commodity_capacities_unchanged},
                                          {"max_deviation_within_bound", c.capacity_bound_ok},
                                          {"commodity_size_drift_within_bound", c.commodity_drift_ok},
                                          {"aggregate_size_drift_within_bound", c.aggregate_drift_ok},
                                          {"stable", c.report.stable()}});
}

// ---------------------------------------------------------------------------
// Checking a saved solution against an instance. Everything the solve
// certificate asserts that can be recomputed from (instance, solution) alone
// is rechecked here.

namespace detail {

/// A solution document may be given bare or inside a certificate.
inline const Json& solution_part(const Json& doc) {
  if (doc.is_object() && doc.contains("solution") && doc.contains("pipeline")) return doc.at("solution");
  return doc;
}

}  // namespace detail

inline Json check_shm_solution(const HypergraphInstance& inst, const Json& doc, const std::string& digest) {
  require_valid(validate(inst));
  const auto ans = shm_answer_from_json(inst, detail::solution_part(doc));
  CapacityRevision rev{inst.vertex_ids, inst.capacity, ans.capacity};
  const int ell = inst.max_edge_size();
  const auto report = verify_shm(inst, ans.capacity, ans.matching);
  Json cert = {{"pipeline", "verify-shm"}, {"input_digest", digest}};
  cert["bounds"] = {{"max_deviation", rational_to_json(rev.max_deviation())},
                    {"max_deviation_bound", ell - 1},
                    {"sum_deviation", rational_to_json(rev.sum_deviation())},
                    {"sum_deviation_bound", ell - 1}};
  cert["revision"] = detail::revision_table(rev);
  cert["verifier"] = detail::shm_verifier(inst, report);
  return detail::finish(std::move(cert),
                        {{"integral", all_integral(ans.matching) && all_integral(ans.capacity)},
                         {"max_deviation_within_bound", rev.max_deviation() <= ell - 1},
                         {"sum_deviation_within_bound",
                          sgn(rev.sum_deviation()) >= 0 && rev.sum_deviation() <= ell - 1},
                         {"stable", report.stable()}});
}

inline Json check_cacq_solution(const CacqInstance& raw, const Json& doc, const std::string& digest) {
  require_valid(validate(raw));
  const auto inst = normalize_cacq(raw);
  const auto ans = cacq_answer_from_json(inst, detail::solution_part(doc));
  CapacityRevision rev;
  for (const auto& s : inst.sets) {
    rev.keys.push_back(s.id);
    rev.original.push_back(s.quota);
  }
  rev.revised = ans.quotas;
  const int ell = inst.max_sets_per_college();
  const auto report = verify_cacq(inst, ans.quotas, ans.matching);
  Json cert = {{"pipeline", "verify-cacq"}, {"input_digest", digest}};
  cert["bounds"] = {{"max_deviation", rational_to_json(rev.max_deviation())}, {"max_deviation_bound", 2 * ell - 1}};
  cert["revision"] = detail::revision_table(rev);
  cert["verifier"] = detail::cacq_verifier(inst, report);
  return detail::finish(std::move(cert), {{"integral", all_integral(ans.matching) && all_integral(ans.quotas)},
                                          {"max_deviation_within_bound", rev.max_deviation() <= 2 * ell - 1},
                                          {"feasible", report.feasible()},
                                          {"stable", report.stable()}});
}

/// Size drift is checked against the input flow when the instance carries
/// one, with the bounds of the mode recorded in the solution (default if
/// absent).
inline Json check_smf_solution(const FlowDocument& input, const Json& doc, const std::string& digest) {
  const auto& inst = input.instance;
  require_valid(validate(inst));
  Json part = detail::solution_part(doc);
  RoundingMode mode = RoundingMode::Default;
  if (part.is_object() && part.contains("mode")) {
    const auto m = detail::as_string(part.at("mode"), "mode");
    if (m == "balanced") mode = RoundingMode::Balanced;
    else if (m != "default") throw InputError("mode: expected \"default\" or \"balanced\"");
    part.erase("mode");
  }
  const auto ans = flow_answer_from_json(inst, part);
  require_valid(validate_flow(inst, ans.flow));
  const int k = inst.num_commodities();
  CapacityRevision rev;
  bool commodity_unchanged = true;
  for (int a = 0; a < inst.num_arcs(); ++a) {
    rev.keys.push_back(inst.arcs[a].id);
    rev.original.push_back(inst.arcs[a].capacity);
    rev.revised.push_back(ans.capacity[a]);
    for (int j = 0; j < k; ++j)
      if (ans.commodity_capacity[j][a] != inst.arcs[a].commodity_capacity[j]) commodity_unchanged = false;
  }
  const auto report = verify_flow(with_capacities(inst, ans), ans.flow);
  bool integral = true;
  for (const auto& fj : ans.flow) integral = integral && all_integral(fj);
  Json cert = {{"pipeline", "verify-smf"}, {"input_digest", digest}, {"mode", detail::mode_name(mode)}};
  cert["bounds"] = {{"max_deviation", rational_to_json(rev.max_deviation())}, {"max_deviation_bound", k - 1}};
  cert["revision"] = detail::revision_table(rev);
  cert["verifier"] = detail::flow_verifier(inst, report);
  Json checks = {{"integral", integral},
                 {"commodity_capacities_unchanged", commodity_unchanged},
                 {"max_deviation_within_bound", rev.max_deviation() <= k - 1},
                 {"stable", report.stable()}};
  if (input.flow) {
    const Rational per_bound = mode == RoundingMode::Default ? 1 : 2;
    const Rational aggregate_bound = mode == RoundingMode::Default ? Rational(k) : Rational(1);
    bool per_ok = true;
    for (int j = 0; j < k; ++j)
      if (abs(flow_size(inst, *input.flow, j) - flow_size(inst, ans.flow, j)) >= per_bound) per_ok = false;
    const Rational drift = abs(total_flow_size(inst, *input.flow) - total_flow_size(inst, ans.flow));
    checks["commodity_size_drift_within_bound"] = per_ok;
    checks["aggregate_size_drift_within_bound"] = drift < aggregate_bound;
    cert["bounds"]["aggregate_size_drift"] = rational_to_json(drift);
  }
  return detail::finish(std::move(cert), checks);
}

}  // namespace nearstable
