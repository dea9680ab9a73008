#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/smf.hpp"

namespace nearstable {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Reading JSON without losing exactness: float literals are kept as their
// source text (and later parsed as exact rationals); duplicate keys are
// rejected.

namespace detail {

class ExactSax {
 public:
  using number_integer_t = Json::number_integer_t;
  using number_unsigned_t = Json::number_unsigned_t;
  using number_float_t = Json::number_float_t;
  using string_t = Json::string_t;
  using binary_t = Json::binary_t;

  Json root;

  bool null() { return put(Json(nullptr)); }
  bool boolean(bool v) { return put(Json(v)); }
  bool number_integer(number_integer_t v) { return put(Json(v)); }
  bool number_unsigned(number_unsigned_t v) { return put(Json(v)); }
  bool number_float(number_float_t, const string_t& text) { return put(Json(text)); }
  bool string(string_t& v) { return put(Json(v)); }
  bool binary(binary_t&) { throw InputError("binary values are not supported"); }
  bool start_object(std::size_t) {
    stack_.push_back(place(Json::object()));
    return true;
  }
  bool key(string_t& k) {
    if (stack_.back()->contains(k)) throw InputError("duplicate key \"" + k + "\"");
    key_ = k;
    return true;
  }
  bool end_object() {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    stack_.push_back(place(Json::array()));
    return true;
  }
  bool end_array() {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }

 private:
  Json* place(Json v) {
    if (stack_.empty()) {
      root = std::move(v);
      return &root;
    }
    Json& parent = *stack_.back();
    if (parent.is_array()) {
      parent.push_back(std::move(v));
      return &parent.back();
    }
    parent[key_] = std::move(v);
    return &parent[key_];
  }
  bool put(Json v) {
    place(std::move(v));
    return true;
  }

  std::vector<Json*> stack_;
  std::string key_;
};

}  // namespace detail

inline Json parse_json(const std::string& text) {
  detail::ExactSax sax;
  Json::sax_parse(text, &sax);
  return std::move(sax.root);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

/// Canonical text: sorted keys (the default object type is ordered), two-space
/// indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Field access helpers

namespace detail {

inline const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) throw InputError(where + ": missing field \"" + name + "\"");
  return *it;
}

inline void allow_fields(const Json& obj, std::initializer_list<const char*> names, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  std::set<std::string> allowed(names.begin(), names.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw InputError(where + ": unknown field \"" + k + "\"");
}

inline std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw InputError(where + ": expected a string");
  return v.get<std::string>();
}

inline const Json& as_array(const Json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected an array");
  return v;
}

inline const Json& as_object(const Json& v, const std::string& where) {
  if (!v.is_object()) throw InputError(where + ": expected an object");
  return v;
}

inline void check_header(const Json& doc, const std::string& kind) {
  const auto k = as_string(field(doc, "kind", "document"), "kind");
  if (k != kind) throw InputError("expected a \"" + kind + "\" document, found \"" + k + "\"");
  const auto& version = field(doc, "version", "document");
  if (!version.is_number_integer() || version.get<long>() != 1)
    throw InputError("unsupported version (expected 1)");
}

using IdIndex = std::map<std::string, int>;

inline IdIndex index_ids(const std::vector<std::string>& ids, const std::string& what) {
  IdIndex out;
  for (int i = 0; i < static_cast<int>(ids.size()); ++i)
    if (!out.emplace(ids[i], i).second) throw InputError("duplicate " + what + " id \"" + ids[i] + "\"");
  return out;
}

/// Unknown ids map to -1 so that validate() can report the dangling reference.
inline int lookup(const IdIndex& idx, const std::string& id) {
  auto it = idx.find(id);
  return it == idx.end() ? -1 : it->second;
}

/// Like lookup, for places where an unknown id cannot be represented.
inline int require_id(const IdIndex& idx, const std::string& id, const std::string& what) {
  auto it = idx.find(id);
  if (it == idx.end()) throw InputError("unknown " + what + " \"" + id + "\"");
  return it->second;
}

inline std::vector<std::string> id_list(const Json& v, const std::string& where) {
  std::vector<std::string> out;
  for (const auto& x : as_array(v, where)) out.push_back(as_string(x, where));
  return out;
}

template <class Resolve>
WeakOrder order_from_json(const Json& v, const std::string& where, Resolve resolve) {
  std::vector<std::vector<int>> groups;
  for (const auto& g : as_array(v, where)) {
    std::vector<int> group;
    for (const auto& x : as_array(g, where)) group.push_back(resolve(as_string(x, where)));
    groups.push_back(std::move(group));
  }
  return WeakOrder(std::move(groups));
}

template <class Name>
Json order_to_json(const WeakOrder& order, Name name) {
  Json out = Json::array();
  for (const auto& g : order.groups()) {
    Json group = Json::array();
    for (int x : g) group.push_back(name(x));
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace detail

inline Rational rational_from_json(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(mpz_class(v.dump()));
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  throw InputError(where + ": expected a number or a \"p/q\" string");
}

/// Integers as JSON integers, everything else as "p/q".
inline Json rational_to_json(const Rational& r) {
  if (is_integer(r) && r.get_num().fits_slong_p()) return Json(r.get_num().get_si());
  return Json(to_string(r));
}

// ---------------------------------------------------------------------------
// Hypergraph instances

inline HypergraphInstance shm_from_json(const Json& doc) {
  detail::check_header(doc, "shm");
  detail::allow_fields(doc, {"kind", "version", "vertices", "edges", "capacity", "preferences"}, "shm instance");
  HypergraphInstance inst;
  inst.vertex_ids = detail::id_list(detail::field(doc, "vertices", "shm instance"), "vertices");
  const auto vidx = detail::index_ids(inst.vertex_ids, "vertex");
  for (const auto& e : detail::as_array(detail::field(doc, "edges", "shm instance"), "edges")) {
    detail::allow_fields(e, {"id", "vertices"}, "edge");
    inst.edge_ids.push_back(detail::as_string(detail::field(e, "id", "edge"), "edge id"));
    std::vector<int> members;
    for (const auto& v : detail::id_list(detail::field(e, "vertices", "edge"), "edge vertices"))
      members.push_back(detail::lookup(vidx, v));
    inst.edges.push_back(std::move(members));
  }
  const auto eidx = detail::index_ids(inst.edge_ids, "edge");
  const auto& caps = detail::as_object(detail::field(doc, "capacity", "shm instance"), "capacity");
  const auto& prefs = detail::as_object(detail::field(doc, "preferences", "shm instance"), "preferences");
  for (const auto& [k, v] : caps.items()) detail::require_id(vidx, k, "vertex in capacity");
  for (const auto& [k, v] : prefs.items()) detail::require_id(vidx, k, "vertex in preferences");
  for (const auto& v : inst.vertex_ids) {
    if (!caps.contains(v)) throw InputError("capacity: vertex \"" + v + "\" has no capacity");
    inst.capacity.push_back(rational_from_json(caps.at(v), "capacity of " + v));
    if (prefs.contains(v))
      inst.prefs.push_back(detail::order_from_json(prefs.at(v), "preferences of " + v,
                                                   [&](const std::string& id) { return detail::lookup(eidx, id); }));
    else
      inst.prefs.emplace_back();
  }
  return inst;
}

inline Json to_json(const HypergraphInstance& inst) {
  Json doc = {{"kind", "shm"}, {"version", 1}};
  doc["vertices"] = inst.vertex_ids;
  Json edges = Json::array();
  for (int e = 0; e < inst.num_edges(); ++e) {
    Json members = Json::array();
    for (int v : inst.edges[e]) members.push_back(inst.vertex_ids[v]);
    edges.push_back({{"id", inst.edge_ids[e]}, {"vertices", members}});
  }
  doc["edges"] = edges;
  Json caps = Json::object(), prefs = Json::object();
  for (int v = 0; v < inst.num_vertices(); ++v) {
    caps[inst.vertex_ids[v]] = rational_to_json(inst.capacity[v]);
    prefs[inst.vertex_ids[v]] = detail::order_to_json(inst.prefs[v], [&](int e) { return inst.edge_ids[e]; });
  }
  doc["capacity"] = caps;
  doc["preferences"] = prefs;
  return doc;
}

// ---------------------------------------------------------------------------
// CA-CQ instances. Student preferences name colleges; they are stored over
// acceptability edges.

inline CacqInstance cacq_from_json(const Json& doc) {
  detail::check_header(doc, "cacq");
  detail::allow_fields(doc, {"kind", "version", "students", "colleges", "edges", "sets", "student_preferences"},
                       "cacq instance");
  CacqInstance inst;
  inst.students = detail::id_list(detail::field(doc, "students", "cacq instance"), "students");
  const auto sidx = detail::index_ids(inst.students, "student");
  auto resolve_student = [&](const std::string& id) { return detail::lookup(sidx, id); };
  std::vector<std::string> college_ids;
  for (const auto& c : detail::as_array(detail::field(doc, "colleges", "cacq instance"), "colleges")) {
    detail::allow_fields(c, {"id", "quota", "preferences"}, "college");
    College college;
    college.id = detail::as_string(detail::field(c, "id", "college"), "college id");
    college.quota = rational_from_json(detail::field(c, "quota", "college"), "quota of " + college.id);
    college.pref = detail::order_from_json(detail::field(c, "preferences", "college"), "preferences of " + college.id,
                                           resolve_student);
    college_ids.push_back(college.id);
    inst.colleges.push_back(std::move(college));
  }
  const auto cidx = detail::index_ids(college_ids, "college");
  for (const auto& e : detail::as_array(detail::field(doc, "edges", "cacq instance"), "edges")) {
    const auto pair = detail::id_list(e, "edge");
    if (pair.size() != 2) throw InputError("edges: expected [student, college] pairs");
    inst.edges.push_back({detail::lookup(sidx, pair[0]), detail::lookup(cidx, pair[1])});
  }
  if (doc.contains("sets")) {
    for (const auto& s : detail::as_array(doc.at("sets"), "sets")) {
      detail::allow_fields(s, {"id", "colleges", "quota", "master"}, "set");
      CollegeSet set;
      set.id = detail::as_string(detail::field(s, "id", "set"), "set id");
      for (const auto& c : detail::id_list(detail::field(s, "colleges", "set"), "set colleges"))
        set.colleges.push_back(detail::lookup(cidx, c));
      set.quota = rational_from_json(detail::field(s, "quota", "set"), "quota of " + set.id);
      set.master = detail::order_from_json(detail::field(s, "master", "set"), "master list of " + set.id, resolve_student);
      inst.sets.push_back(std::move(set));
    }
  }
  std::vector<std::string> set_ids;
  for (const auto& s : inst.sets) set_ids.push_back(s.id);
  detail::index_ids(set_ids, "set");
  const auto& prefs =
      detail::as_object(detail::field(doc, "student_preferences", "cacq instance"), "student_preferences");
  for (const auto& [k, v] : prefs.items()) detail::require_id(sidx, k, "student in student_preferences");
  for (int s = 0; s < inst.num_students(); ++s) {
    const auto& id = inst.students[s];
    if (!prefs.contains(id)) {
      inst.student_prefs.emplace_back();
      continue;
    }
    inst.student_prefs.push_back(detail::order_from_json(prefs.at(id), "preferences of " + id, [&](const std::string& c) {
      const int college = detail::lookup(cidx, c);
      return college < 0 ? -1 : inst.find_edge(s, college);
    }));
  }
  return inst;
}

inline Json to_json(const CacqInstance& inst) {
  Json doc = {{"kind", "cacq"}, {"version", 1}};
  doc["students"] = inst.students;
  Json colleges = Json::array();
  for (const auto& c : inst.colleges)
    colleges.push_back({{"id", c.id},
                        {"quota", rational_to_json(c.quota)},
                        {"preferences", detail::order_to_json(c.pref, [&](int s) { return inst.students[s]; })}});
  doc["colleges"] = colleges;
  Json edges = Json::array();
  for (const auto& e : inst.edges) edges.push_back({inst.students[e.student], inst.colleges[e.college].id});
  doc["edges"] = edges;
  Json sets = Json::array();
  for (const auto& s : inst.sets) {
    Json members = Json::array();
    for (int c : s.colleges) members.push_back(inst.colleges[c].id);
    sets.push_back({{"id", s.id},
                    {"colleges", members},
                    {"quota", rational_to_json(s.quota)},
                    {"master", detail::order_to_json(s.master, [&](int x) { return inst.students[x]; })}});
  }
  doc["sets"] = sets;
  Json prefs = Json::object();
  for (int s = 0; s < inst.num_students(); ++s)
    prefs[inst.students[s]] =
        detail::order_to_json(inst.student_prefs[s], [&](int e) { return inst.colleges[inst.edges[e].college].id; });
  doc["student_preferences"] = prefs;
  return doc;
}

// ---------------------------------------------------------------------------
// Flow instances, optionally carrying a flow.

namespace detail {

inline MultiFlow flow_from_json(const FlowInstance& inst, const Json& v, const IdIndex& kidx, const IdIndex& aidx) {
  MultiFlow f(inst.num_commodities(), RationalVector(inst.num_arcs()));
  for (const auto& [k, per_arc] : as_object(v, "flow").items()) {
    const int j = require_id(kidx, k, "commodity in flow");
    for (const auto& [a, value] : as_object(per_arc, "flow of " + k).items())
      f[j][require_id(aidx, a, "arc in flow")] = rational_from_json(value, "flow of " + k + " on " + a);
  }
  return f;
}

/// Nonzero entries only.
inline Json flow_to_json(const FlowInstance& inst, const MultiFlow& f) {
  Json out = Json::object();
  for (int j = 0; j < inst.num_commodities(); ++j) {
    Json per_arc = Json::object();
    for (int a = 0; a < inst.num_arcs(); ++a)
      if (sgn(f[j][a]) != 0) per_arc[inst.arcs[a].id] = rational_to_json(f[j][a]);
    out[inst.commodities[j].id] = per_arc;
  }
  return out;
}

}  // namespace detail

struct FlowDocument {
  FlowInstance instance;
  std::optional<MultiFlow> flow;
};

inline FlowDocument smf_from_json(const Json& doc) {
  detail::check_header(doc, "smf");
  detail::allow_fields(doc, {"kind", "version", "vertices", "commodities", "arcs", "vertex_preferences", "flow"},
                       "smf instance");
  FlowDocument out;
  auto& inst = out.instance;
  inst.vertex_ids = detail::id_list(detail::field(doc, "vertices", "smf instance"), "vertices");
  const auto vidx = detail::index_ids(inst.vertex_ids, "vertex");
  std::vector<std::string> commodity_ids;
  for (const auto& c : detail::as_array(detail::field(doc, "commodities", "smf instance"), "commodities")) {
    detail::allow_fields(c, {"id", "source", "sink"}, "commodity");
    Commodity com;
    com.id = detail::as_string(detail::field(c, "id", "commodity"), "commodity id");
    com.source = detail::lookup(vidx, detail::as_string(detail::field(c, "source", "commodity"), "source"));
    com.sink = detail::lookup(vidx, detail::as_string(detail::field(c, "sink", "commodity"), "sink"));
    commodity_ids.push_back(com.id);
    inst.commodities.push_back(std::move(com));
  }
  const auto kidx = detail::index_ids(commodity_ids, "commodity");
  auto resolve_commodity = [&](const std::string& id) { return detail::lookup(kidx, id); };
  std::vector<std::string> arc_ids;
  for (const auto& a : detail::as_array(detail::field(doc, "arcs", "smf instance"), "arcs")) {
    detail::allow_fields(a, {"id", "tail", "head", "capacity", "commodity_capacity", "preferences"}, "arc");
    Arc arc;
    arc.id = detail::as_string(detail::field(a, "id", "arc"), "arc id");
    arc.tail = detail::lookup(vidx, detail::as_string(detail::field(a, "tail", "arc"), "tail"));
    arc.head = detail::lookup(vidx, detail::as_string(detail::field(a, "head", "arc"), "head"));
    arc.capacity = rational_from_json(detail::field(a, "capacity", "arc"), "capacity of " + arc.id);
    const auto& per = detail::as_object(detail::field(a, "commodity_capacity", "arc"), "commodity_capacity");
    for (const auto& [k, v] : per.items()) detail::require_id(kidx, k, "commodity in commodity_capacity");
    for (const auto& k : commodity_ids) {
      if (!per.contains(k)) throw InputError("arc " + arc.id + ": no capacity for commodity " + k);
      arc.commodity_capacity.push_back(rational_from_json(per.at(k), "capacity of " + arc.id + " for " + k));
    }
    arc.pref = detail::order_from_json(detail::field(a, "preferences", "arc"), "preferences of " + arc.id,
                                       resolve_commodity);
    arc_ids.push_back(arc.id);
    inst.arcs.push_back(std::move(arc));
  }
  const auto aidx = detail::index_ids(arc_ids, "arc");
  const auto& vprefs =
      detail::as_object(detail::field(doc, "vertex_preferences", "smf instance"), "vertex_preferences");
  for (const auto& [k, v] : vprefs.items()) detail::require_id(vidx, k, "vertex in vertex_preferences");
  for (const auto& v : inst.vertex_ids) {
    std::vector<WeakOrder> per_commodity(inst.num_commodities());
    if (vprefs.contains(v)) {
      for (const auto& [k, order] : detail::as_object(vprefs.at(v), "vertex_preferences of " + v).items())
        per_commodity[detail::require_id(kidx, k, "commodity in vertex_preferences")] = detail::order_from_json(
            order, "preferences of " + v + " for " + k, [&](const std::string& id) { return detail::lookup(aidx, id); });
    }
    inst.vertex_prefs.push_back(std::move(per_commodity));
  }
  if (doc.contains("flow")) out.flow = detail::flow_from_json(inst, doc.at("flow"), kidx, aidx);
  return out;
}

inline Json to_json(const FlowInstance& inst, const std::optional<MultiFlow>& flow = std::nullopt) {
  Json doc = {{"kind", "smf"}, {"version", 1}};
  doc["vertices"] = inst.vertex_ids;
  Json commodities = Json::array();
  for (const auto& c : inst.commodities)
    commodities.push_back({{"id", c.id}, {"source", inst.vertex_ids[c.source]}, {"sink", inst.vertex_ids[c.sink]}});
  doc["commodities"] = commodities;
  auto commodity_name = [&](int j) { return inst.commodities[j].id; };
  Json arcs = Json::array();
  for (const auto& a : inst.arcs) {
    Json per = Json::object();
    for (int j = 0; j < inst.num_commodities(); ++j) per[inst.commodities[j].id] = rational_to_json(a.commodity_capacity[j]);
    arcs.push_back({{"id", a.id},
                    {"tail", inst.vertex_ids[a.tail]},
                    {"head", inst.vertex_ids[a.head]},
                    {"capacity", rational_to_json(a.capacity)},
                    {"commodity_capacity", per},
                    {"preferences", detail::order_to_json(a.pref, commodity_name)}});
  }
  doc["arcs"] = arcs;
  Json vprefs = Json::object();
  for (int v = 0; v < inst.num_vertices(); ++v) {
    Json per = Json::object();
    for (int j = 0; j < inst.num_commodities(); ++j)
      per[inst.commodities[j].id] =
          detail::order_to_json(inst.vertex_prefs[v][j], [&](int a) { return inst.arcs[a].id; });
    vprefs[inst.vertex_ids[v]] = per;
  }
  doc["vertex_preferences"] = vprefs;
  if (flow) doc["flow"] = detail::flow_to_json(inst, *flow);
  return doc;
}

// ---------------------------------------------------------------------------
// Solutions: a matching (or flow) together with the capacities it is meant
// to be stable under.

struct ShmAnswer {
  RationalVector capacity;  // per vertex
  RationalVector matching;  // per edge

  friend bool operator==(const ShmAnswer&, const ShmAnswer&) = default;
};

struct CacqAnswer {
  RationalVector quotas;    // per set of the normalized instance
  RationalVector matching;  // per edge

  friend bool operator==(const CacqAnswer&, const CacqAnswer&) = default;
};

struct FlowAnswer {
  RationalVector capacity;                   // per arc
  std::vector<RationalVector> commodity_capacity;  // [j][arc]
  MultiFlow flow;

  friend bool operator==(const FlowAnswer&, const FlowAnswer&) = default;
};

inline Json to_json(const HypergraphInstance& inst, const ShmAnswer& ans) {
  Json matching = Json::object(), caps = Json::object();
  for (int e = 0; e < inst.num_edges(); ++e)
    if (sgn(ans.matching[e]) != 0) matching[inst.edge_ids[e]] = rational_to_json(ans.matching[e]);
  for (int v = 0; v < inst.num_vertices(); ++v) caps[inst.vertex_ids[v]] = rational_to_json(ans.capacity[v]);
  return {{"kind", "shm-solution"}, {"version", 1}, {"matching", matching}, {"capacity", caps}};
}

/// Capacities default to the instance's own when omitted.
inline ShmAnswer shm_answer_from_json(const HypergraphInstance& inst, const Json& doc) {
  detail::check_header(doc, "shm-solution");
  detail::allow_fields(doc, {"kind", "version", "matching", "capacity"}, "shm solution");
  ShmAnswer ans{inst.capacity, RationalVector(inst.num_edges())};
  const auto vidx = detail::index_ids(inst.vertex_ids, "vertex");
  const auto eidx = detail::index_ids(inst.edge_ids, "edge");
  for (const auto& [e, v] : detail::as_object(detail::field(doc, "matching", "shm solution"), "matching").items())
    ans.matching[detail::require_id(eidx, e, "edge in matching")] = rational_from_json(v, "matching value of " + e);
  if (doc.contains("capacity"))
    for (const auto& [v, q] : detail::as_object(doc.at("capacity"), "capacity").items())
      ans.capacity[detail::require_id(vidx, v, "vertex in capacity")] = rational_from_json(q, "capacity of " + v);
  return ans;
}

/// The matching is a list of [student, college] pairs (value 1) or
/// [student, college, value] triples. `inst` must be normalized.
inline Json to_json(const CacqInstance& inst, const CacqAnswer& ans) {
  Json matching = Json::array(), quotas = Json::object();
  for (int e = 0; e < inst.num_edges(); ++e) {
    if (sgn(ans.matching[e]) == 0) continue;
    Json entry = {inst.students[inst.edges[e].student], inst.colleges[inst.edges[e].college].id};
    if (ans.matching[e] != 1) entry.push_back(rational_to_json(ans.matching[e]));
    matching.push_back(entry);
  }
  for (int j = 0; j < inst.num_sets(); ++j) quotas[inst.sets[j].id] = rational_to_json(ans.quotas[j]);
  return {{"kind", "cacq-solution"}, {"version", 1}, {"matching", matching}, {"quotas", quotas}};
}

inline CacqAnswer cacq_answer_from_json(const CacqInstance& inst, const Json& doc) {
  detail::check_header(doc, "cacq-solution");
  detail::allow_fields(doc, {"kind", "version", "matching", "quotas"}, "cacq solution");
  CacqAnswer ans{RationalVector(inst.num_sets()), RationalVector(inst.num_edges())};
  for (int j = 0; j < inst.num_sets(); ++j) ans.quotas[j] = inst.sets[j].quota;
  std::vector<std::string> college_ids, set_ids;
  for (const auto& c : inst.colleges) college_ids.push_back(c.id);
  for (const auto& s : inst.sets) set_ids.push_back(s.id);
  const auto sidx = detail::index_ids(inst.students, "student");
  const auto cidx = detail::index_ids(college_ids, "college");
  const auto setidx = detail::index_ids(set_ids, "set");
  for (const auto& entry : detail::as_array(detail::field(doc, "matching", "cacq solution"), "matching")) {
    detail::as_array(entry, "matching entry");
    if (entry.size() != 2 && entry.size() != 3)
      throw InputError("matching: expected [student, college] or [student, college, value]");
    const int s = detail::require_id(sidx, detail::as_string(entry[0], "matching"), "student in matching");
    const int c = detail::require_id(cidx, detail::as_string(entry[1], "matching"), "college in matching");
    const int e = inst.find_edge(s, c);
    if (e < 0) throw InputError("matching: " + inst.students[s] + " is not acceptable to " + inst.colleges[c].id);
    ans.matching[e] = entry.size() == 3 ? rational_from_json(entry[2], "matching value") : Rational(1);
  }
  if (doc.contains("quotas"))
    for (const auto& [j, q] : detail::as_object(doc.at("quotas"), "quotas").items())
      ans.quotas[detail::require_id(setidx, j, "set in quotas")] = rational_from_json(q, "quota of " + j);
  return ans;
}

inline Json to_json(const FlowInstance& inst, const FlowAnswer& ans) {
  Json caps = Json::object(), per = Json::object();
  for (int a = 0; a < inst.num_arcs(); ++a) {
    caps[inst.arcs[a].id] = rational_to_json(ans.capacity[a]);
    Json by_commodity = Json::object();
    for (int j = 0; j < inst.num_commodities(); ++j)
      by_commodity[inst.commodities[j].id] = rational_to_json(ans.commodity_capacity[j][a]);
    per[inst.arcs[a].id] = by_commodity;
  }
  return {{"kind", "smf-solution"},
          {"version", 1},
          {"flow", detail::flow_to_json(inst, ans.flow)},
          {"capacity", caps},
          {"commodity_capacity", per}};
}

inline FlowAnswer flow_answer_from_json(const FlowInstance& inst, const Json& doc) {
  detail::check_header(doc, "smf-solution");
  detail::allow_fields(doc, {"kind", "version", "flow", "capacity", "commodity_capacity"}, "smf solution");
  FlowAnswer ans;
  std::vector<std::string> arc_ids, commodity_ids;
  for (const auto& a : inst.arcs) {
    arc_ids.push_back(a.id);
    ans.capacity.push_back(a.capacity);
  }
  for (const auto& c : inst.commodities) commodity_ids.push_back(c.id);
  ans.commodity_capacity.assign(inst.num_commodities(), RationalVector(inst.num_arcs()));
  for (int a = 0; a < inst.num_arcs(); ++a)
    for (int j = 0; j < inst.num_commodities(); ++j) ans.commodity_capacity[j][a] = inst.arcs[a].commodity_capacity[j];
  const auto aidx = detail::index_ids(arc_ids, "arc");
  const auto kidx = detail::index_ids(commodity_ids, "commodity");
  ans.flow = detail::flow_from_json(inst, detail::field(doc, "flow", "smf solution"), kidx, aidx);
  if (doc.contains("capacity"))
    for (const auto& [a, c] : detail::as_object(doc.at("capacity"), "capacity").items())
      ans.capacity[detail::require_id(aidx, a, "arc in capacity")] = rational_from_json(c, "capacity of " + a);
  if (doc.contains("commodity_capacity"))
    for (const auto& [a, per] : detail::as_object(doc.at("commodity_capacity"), "commodity_capacity").items()) {
      const int arc = detail::require_id(aidx, a, "arc in commodity_capacity");
      for (const auto& [k, c] : detail::as_object(per, "commodity_capacity of " + a).items())
        ans.commodity_capacity[detail::require_id(kidx, k, "commodity in commodity_capacity")][arc] =
            rational_from_json(c, "capacity of " + a + " for " + k);
    }
  return ans;
}

/// Instance with the answer's capacities substituted.
inline FlowInstance with_capacities(const FlowInstance& inst, const FlowAnswer& ans) {
  FlowInstance out = inst;
  for (int a = 0; a < out.num_arcs(); ++a) {
    out.arcs[a].capacity = ans.capacity[a];
    for (int j = 0; j < out.num_commodities(); ++j) out.arcs[a].commodity_capacity[j] = ans.commodity_capacity[j][a];
  }
  return out;
}

}  // namespace nearstable
