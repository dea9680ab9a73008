// nearstable: solve, round, verify, generate and brute-force near-feasible
// stable matching instances. Exit codes: 0 pass, 2 verified failure,
// 3 input error, 4 resource limit, 1 internal error.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nearstable/nearstable.hpp"

namespace ns = nearstable;

namespace {

constexpr int kPass = 0;
constexpr int kInternal = 1;
constexpr int kFail = 2;
constexpr int kInput = 3;
constexpr int kLimit = 4;

struct OutputOptions {
  std::string out;
  std::string trace;
  std::string format = "json";
  bool timing = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& o, bool with_trace) {
  cmd->add_option("-o,--output", o.out, "Write the certificate to this file instead of stdout");
  if (with_trace) cmd->add_option("--trace", o.trace, "Write the pivot and rounding trace to this file");
  cmd->add_option("--format", o.format, "Certificate verbosity on stdout")
      ->check(CLI::IsMember({"json", "summary"}));
  cmd->add_flag("--timing", o.timing, "Record wall-clock time in the certificate (makes output nondeterministic)");
}

void print_summary(const ns::Json& cert) {
  std::cout << "pipeline: " << cert.at("pipeline").get<std::string>() << "\n";
  std::cout << "verdict: " << cert.at("verdict").get<std::string>() << "\n";
  if (cert.contains("bounds"))
    for (const auto& [k, v] : cert.at("bounds").items()) std::cout << k << ": " << v.dump() << "\n";
  for (const auto& [k, v] : cert.at("checks").items()) std::cout << "check " << k << ": " << (v.get<bool>() ? "ok" : "FAILED") << "\n";
}

int emit(ns::Json cert, const OutputOptions& o, std::optional<double> seconds = std::nullopt) {
  if (o.timing && seconds) cert["wall_clock_seconds"] = *seconds;
  const auto text = ns::dump(cert);
  if (!o.out.empty()) ns::write_file(o.out, text);
  if (o.format == "summary") print_summary(cert);
  else if (o.out.empty()) std::cout << text;
  return ns::passed(cert) ? kPass : kFail;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Collects trace lines in memory; written out once the run finishes.
struct TraceBuffer {
  std::string text;
  ns::TraceSink sink() {
    return [this](std::string_view line) {
      text += line;
      text += '\n';
    };
  }
};

ns::SolveOptions solve_options(const OutputOptions& o, TraceBuffer& buf) {
  ns::SolveOptions opts;
  opts.scarf.pivot_budget = ns::pivot_budget_from_env();
  if (!o.trace.empty()) {
    opts.scarf.trace = buf.sink();
    opts.lp_trace = buf.sink();
  }
  return opts;
}

int run_solve(const std::string& kind, const std::string& in, const OutputOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto text = ns::read_file(in);
  const auto digest = ns::sha256_hex(text);
  const auto doc = ns::parse_json(text);
  TraceBuffer buf;
  const auto opts = solve_options(o, buf);
  ns::Json cert;
  if (kind == "shm") {
    const auto inst = ns::shm_from_json(doc);
    const auto sol = ns::solve_shm(inst, opts);
    for (const auto& s : sol.trace)
      if (!o.trace.empty()) buf.text += "round delete=" + s.deleted_row + " fractional=" + std::to_string(s.fractional) + "\n";
    cert = ns::shm_certificate(inst, sol, digest);
  } else {
    const auto inst = ns::cacq_from_json(doc);
    const auto sol = ns::solve_cacq(inst, opts);
    for (const auto& s : sol.trace)
      if (!o.trace.empty())
        buf.text += "round delete=" + s.deleted_set + (s.tight ? " tight" : " slack") +
                    " mass=" + std::to_string(s.fractional_mass) + "\n";
    cert = ns::cacq_certificate(sol, digest);
  }
  if (!o.trace.empty()) ns::write_file(o.trace, buf.text);
  return emit(std::move(cert), o, since(t0));
}

int run_round(const std::string& in, const std::string& mode, const OutputOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto text = ns::read_file(in);
  const auto doc = ns::smf_from_json(ns::parse_json(text));
  if (!doc.flow) throw ns::InputError("the instance file carries no \"flow\" to round");
  const auto sol = ns::round_stable_flow(doc.instance, *doc.flow,
                                         mode == "balanced" ? ns::RoundingMode::Balanced : ns::RoundingMode::Default);
  if (!o.trace.empty()) {
    std::string trace;
    for (const auto& s : sol.trace)
      trace += "augment commodity=" + doc.instance.commodities[s.commodity].id + (s.cycle ? " cycle" : " path") +
               " step=" + ns::to_string(s.step) + "\n";
    ns::write_file(o.trace, trace);
  }
  return emit(ns::smf_certificate(doc.instance, sol, ns::sha256_hex(text)), o, since(t0));
}

int run_verify(std::string kind, const std::string& in, const std::string& solution, const OutputOptions& o) {
  const auto text = ns::read_file(in);
  const auto doc = ns::parse_json(text);
  const auto digest = ns::sha256_hex(text);
  const auto declared = doc.is_object() && doc.contains("kind") && doc.at("kind").is_string()
                            ? doc.at("kind").get<std::string>()
                            : std::string();
  if (kind.empty()) kind = declared;
  if (kind != declared) throw ns::InputError("instance kind is \"" + declared + "\", not \"" + kind + "\"");
  const auto sol = ns::parse_json(ns::read_file(solution));
  if (kind == "shm") return emit(ns::check_shm_solution(ns::shm_from_json(doc), sol, digest), o);
  if (kind == "cacq") return emit(ns::check_cacq_solution(ns::cacq_from_json(doc), sol, digest), o);
  if (kind == "smf") return emit(ns::check_smf_solution(ns::smf_from_json(doc), sol, digest), o);
  throw ns::InputError("unknown instance kind \"" + kind + "\"");
}

int run_gen(const std::string& family, const ns::GeneratorConfig& cfg, const std::string& out) {
  ns::Json doc;
  if (family == "shm") doc = ns::to_json(ns::generate_shm(cfg));
  else if (family == "fixtures") doc = ns::to_json(ns::generate_fixtures(cfg));
  else if (family == "cacq") doc = ns::to_json(ns::generate_cacq(cfg));
  else {
    const auto fc = ns::generate_smf(cfg);
    doc = ns::to_json(fc.instance, fc.flow);
  }
  const auto text = ns::dump(doc);
  if (out.empty()) std::cout << text;
  else ns::write_file(out, text);
  return kPass;
}

int run_oracle(const std::string& in, long bound, std::optional<long> sum_bound, int cap, const std::string& out) {
  const auto inst = ns::shm_from_json(ns::parse_json(ns::read_file(in)));
  ns::require_valid(ns::validate(inst));
  ns::Json solutions = ns::Json::array();
  for (const auto& nf : ns::enumerate_near_feasible(inst, bound, sum_bound, cap)) {
    ns::Json caps = ns::Json::object(), matching = ns::Json::array();
    for (int v = 0; v < inst.num_vertices(); ++v) caps[inst.vertex_ids[v]] = nf.capacity[v];
    for (int e = 0; e < inst.num_edges(); ++e)
      if (nf.matching[e] == 1) matching.push_back(inst.edge_ids[e]);
    solutions.push_back({{"capacity", caps}, {"matching", matching}});
  }
  ns::Json doc = {{"bound", bound}, {"sum_bound", sum_bound ? ns::Json(*sum_bound) : ns::Json(nullptr)},
                  {"count", solutions.size()}, {"solutions", solutions}};
  const auto text = ns::dump(doc);
  if (out.empty()) std::cout << text;
  else ns::write_file(out, text);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-feasible stable matchings and flows"};
  app.require_subcommand(1);

  OutputOptions solve_out;
  std::string solve_kind, solve_in;
  auto* solve = app.add_subcommand("solve", "Solve a hypergraph (shm) or common-quota admission (cacq) instance");
  solve->add_option("kind", solve_kind)->required()->check(CLI::IsMember({"shm", "cacq"}));
  solve->add_option("input", solve_in)->required();
  add_output_options(solve, solve_out, true);

  OutputOptions round_out;
  std::string round_kind, round_in, round_mode = "default";
  auto* round = app.add_subcommand("round", "Round a stable fractional multicommodity flow");
  round->add_option("kind", round_kind)->required()->check(CLI::IsMember({"smf"}));
  round->add_option("input", round_in)->required();
  round->add_option("--mode", round_mode)->check(CLI::IsMember({"default", "balanced"}));
  add_output_options(round, round_out, true);

  OutputOptions verify_out;
  std::vector<std::string> verify_args;
  auto* verify = app.add_subcommand("verify", "Check a solution (or certificate) against an instance");
  verify->add_option("args", verify_args, "[kind] instance solution")->required()->expected(2, 3);
  add_output_options(verify, verify_out, false);

  std::string gen_family, gen_out;
  ns::GeneratorConfig gen_cfg;
  auto* gen = app.add_subcommand("gen", "Generate a seeded random instance");
  gen->add_option("family", gen_family)->required()->check(CLI::IsMember({"shm", "fixtures", "cacq", "smf"}));
  gen->add_option("--seed", gen_cfg.seed)->required();
  gen->add_option("--ell", gen_cfg.ell, "shm: largest edge size; cacq: sets per college");
  gen->add_option("--commodities", gen_cfg.commodities);
  gen->add_option("--max-vertices", gen_cfg.max_vertices);
  gen->add_option("--max-edges", gen_cfg.max_edges, "edges (shm, fixtures) or arcs (smf)");
  gen->add_option("--max-students", gen_cfg.max_students);
  gen->add_option("--max-colleges", gen_cfg.max_colleges);
  gen->add_option("--tie-rate", gen_cfg.tie_rate);
  gen->add_option("--retry-cap", gen_cfg.retry_cap);
  gen->add_option("-o,--output", gen_out);

  std::string oracle_in, oracle_out;
  long oracle_bound = 0;
  std::optional<long> oracle_sum;
  int oracle_cap = ns::kDefaultEnumerationCap;
  auto* oracle = app.add_subcommand("oracle", "Enumerate near-feasible capacities of a small hypergraph instance");
  oracle->add_option("input", oracle_in)->required();
  oracle->add_option("--bound", oracle_bound)->required();
  oracle->add_option("--sum-bound", oracle_sum);
  oracle->add_option("--max-edges", oracle_cap, "Refuse instances with more edges");
  oracle->add_option("-o,--output", oracle_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInput;
  }

  try {
    if (*solve) return run_solve(solve_kind, solve_in, solve_out);
    if (*round) return run_round(round_in, round_mode, round_out);
    if (*verify) {
      if (verify_args.size() == 3) return run_verify(verify_args[0], verify_args[1], verify_args[2], verify_out);
      return run_verify("", verify_args[0], verify_args[1], verify_out);
    }
    if (*gen) return run_gen(gen_family, gen_cfg, gen_out);
    if (*oracle) return run_oracle(oracle_in, oracle_bound, oracle_sum, oracle_cap, oracle_out);
  } catch (const ns::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ns::PreconditionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ns::ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kLimit;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
