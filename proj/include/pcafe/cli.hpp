#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcafe/elicitation.hpp"
#include "pcafe/error.hpp"
#include "pcafe/hierarchy.hpp"
#include "pcafe/pipeline.hpp"
#include "pcafe/sensitivity.hpp"
#include "pcafe/service.hpp"
#include "pcafe/service_http.hpp"

namespace pcafe::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kMalformedInput = 2,
  kConsistencyFailure = 3,
  kIncompleteData = 4,
  kParameterError = 5,
};

inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Malformed:
    case Errc::SchemaViolation:
    case Errc::ScaleMismatch:
    case Errc::OutOfScale:
    case Errc::InvalidHierarchy:
    case Errc::InvalidEvaluationSet:
    case Errc::DuplicateExpert:
    case Errc::DuplicatePair:
    case Errc::UnknownNode:
    case Errc::UnknownExpert:
    case Errc::BadGrade:
    case Errc::Io:
      return kMalformedInput;
    case Errc::ConsistencyFailure:
      return kConsistencyFailure;
    case Errc::IncompleteJudgments:
    case Errc::MissingRating:
    case Errc::MissingPair:
    case Errc::MissingLeaf:
    case Errc::MissingWeights:
    case Errc::EmptyPanel:
    case Errc::CountMismatch:
      return kIncompleteData;
    case Errc::ThetaTooSmall:
    case Errc::InvalidArgument:
    case Errc::NoRIAvailable:
    case Errc::NoBanding:
    case Errc::TooSmall:
      return kParameterError;
    default:
      return kInternal;
  }
}

// Custom RI file: {"12": 1.54, "13": 1.56, ...}; only n > 11.
inline RiTable load_ri_table(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::Malformed, "RI table '" + path + "': " + e.what());
  }
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, "RI table must be an object mapping n to RI");
  std::map<std::size_t, double> ext;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t pos = 0;
    unsigned long n = 0;
    try {
      n = std::stoul(it.key(), &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    PCAFE_REQUIRE(pos == it.key().size() && pos > 0, Errc::SchemaViolation, "RI table key '" + it.key() + "' is not an integer");
    PCAFE_REQUIRE(it->is_number(), Errc::SchemaViolation, "RI table value for " + it.key() + " is not a number");
    ext[n] = it->get<double>();
  }
  return RiTable(std::move(ext));
}

inline RiTable ri_table_from_env() {
  const char* path = std::getenv("PCAFE_RI_TABLE");
  if (!path || !*path) return {};
  return load_ri_table(path);
}

namespace detail {

struct GlobalFlags {
  bool json = false;
  std::string out_path;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
  const GlobalFlags& flags;

  // JSON documents go to --out when given, else to stdout in --json mode.
  void emit_document(const std::string& text) const {
    if (!flags.out_path.empty()) {
      std::ofstream f(flags.out_path, std::ios::binary | std::ios::trunc);
      PCAFE_REQUIRE(f.good(), Errc::Io, "cannot write '" + flags.out_path + "'");
      f << text;
      PCAFE_REQUIRE(f.good(), Errc::Io, "failed writing '" + flags.out_path + "'");
    } else if (flags.json) {
      out << text;
    }
  }
  bool human() const { return !flags.json; }
};

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

inline std::string triad_text(const Triad& t, const IndicatorNode& node) {
  return "(" + std::to_string(t.i) + "," + std::to_string(t.j) + "," + std::to_string(t.k) + ") " +
         node.children[t.i - 1].label + " / " + node.children[t.j - 1].label + " / " + node.children[t.k - 1].label +
         ", deviation " + fixed(t.deviation);
}

inline std::string gap_text(const Gap& g) {
  switch (g.kind) {
    case Gap::Kind::missing_rating: return "expert '" + g.expert_id + "' has not rated leaf '" + g.node_id + "'";
    case Gap::Kind::missing_judgment:
      return "expert '" + g.expert_id + "' is missing pair (" + std::to_string(g.i) + "," + std::to_string(g.j) +
             ") at node '" + g.node_id + "'";
    case Gap::Kind::no_experts: return "session has no experts";
  }
  return "";
}

inline json weights_document(const Session& s, const SessionWeights& weights, const PipelineOptions& opt) {
  json nodes = json::object();
  for (const auto& [id, w] : weights) nodes[id] = to_json(w);
  json doc{{"engine", {{"name", std::string(kEngineName)}, {"version", std::string(kEngineVersion)}}},
           {"session_id", s.session_id},
           {"session_digest", session_digest(s)},
           {"scale", std::string(to_string(s.scale))},
           {"method", std::string(to_string(s.scale == Scale::crisp_1_9 ? WeightMethod::geometric : opt.method))},
           {"nodes", std::move(nodes)}};
  doc["theta"] = opt.theta ? json(*opt.theta) : json(nullptr);
  return doc;
}

inline void print_weights_table(std::ostream& out, const Session& s, const SessionWeights& weights) {
  for (const IndicatorNode* node : s.hierarchy.internal_nodes()) {
    const auto& w = weights.at(node->id);
    out << node->label << " [" << node->id << "]  method=" << to_string(w.method);
    if (w.theta) out << " theta=" << fixed(*w.theta, 3);
    out << "  lambda_max=" << fixed(w.aggregated.consistency.lambda_max) << " CI=" << fixed(w.aggregated.consistency.ci)
        << " CR=" << fixed(w.aggregated.consistency.cr);
    if (w.aggregated.additive_residual) out << " residual=" << fixed(*w.aggregated.additive_residual);
    out << (w.aggregated.consistency.consistent ? "  ok" : "  INCONSISTENT") << "\n";
    for (std::size_t c = 0; c < node->children.size(); ++c)
      out << "  " << std::left << std::setw(32) << node->children[c].label << std::right << " "
          << fixed(w.aggregated.weights[c], 6) << "\n";
  }
}

// ---- commands -----------------------------------------------------------------

inline int cmd_validate(const Io& io, const Session& s, const PipelineOptions& opt) {
  json doc{{"session_id", s.session_id}, {"gaps", json::array()}, {"consistency_failures", json::array()},
           {"environment_warnings", json::array()}};
  if (s.environment)
    for (const auto& w : validate_environment(*s.environment)) doc["environment_warnings"].push_back(to_json(w));

  int status = kOk;
  const auto gaps = find_gaps(s);
  if (!gaps.empty()) {
    status = kIncompleteData;
    for (const auto& g : gaps) doc["gaps"].push_back(to_json(g));
  } else {
    const auto weights = compute_weights(s, opt);
    const auto failures = consistency_failures(weights);
    if (!failures.empty()) status = kConsistencyFailure;
    for (const auto& f : failures) {
      json jf{{"node_id", f.node_id}, {"cr", f.cr}};
      jf["expert_id"] = f.expert_id.empty() ? json(nullptr) : json(f.expert_id);
      jf["worst_triad"] = f.worst_triad ? to_json(*f.worst_triad) : json(nullptr);
      doc["consistency_failures"].push_back(std::move(jf));
    }
  }
  doc["ok"] = status == kOk;
  doc["status"] = status;

  if (io.human()) {
    for (const auto& g : gaps) io.out << "incomplete: " << gap_text(g) << "\n";
    for (const auto& f : doc["consistency_failures"]) {
      const auto* node = s.hierarchy.find(f["node_id"].get<std::string>());
      io.out << "inconsistent: node '" << node->id << "' "
             << (f["expert_id"].is_null() ? std::string("aggregated matrix") : "expert '" + f["expert_id"].get<std::string>() + "'")
             << " CR=" << fixed(f["cr"].get<double>());
      if (!f["worst_triad"].is_null())
        io.out << " worst triad "
               << triad_text({f["worst_triad"]["i"], f["worst_triad"]["j"], f["worst_triad"]["k"], f["worst_triad"]["deviation"]},
                             *node);
      io.out << "\n";
    }
    for (const auto& w : doc["environment_warnings"]) io.out << "warning: " << w["message"].get<std::string>() << "\n";
    io.out << (status == kOk ? "session '" + s.session_id + "' is valid\n" : "session '" + s.session_id + "' failed validation\n");
  }
  io.emit_document(doc.dump(2) + "\n");
  return status;
}

inline int cmd_weights(const Io& io, const Session& s, const PipelineOptions& opt) {
  const auto weights = compute_weights(s, opt);
  if (io.human()) print_weights_table(io.out, s, weights);
  io.emit_document(weights_document(s, weights, opt).dump(2) + "\n");
  return kOk;
}

inline int cmd_evaluate(const Io& io, const Session& s, const PipelineOptions& opt) {
  const auto ev = evaluate_session(s, opt);
  const json report = build_report(s, ev, opt);
  if (io.human()) {
    print_weights_table(io.out, s, ev.weights);
    io.out << "\n";
    for (const IndicatorNode* node : s.hierarchy.nodes()) {
      const auto& r = ev.results.at(node->id);
      io.out << std::left << std::setw(34) << node->label << std::right << " S=" << fixed(r.score) << "  "
             << s.evaluation_set[r.verdict].label << "  B=[";
      for (std::size_t j = 0; j < r.b.size(); ++j) io.out << (j ? " " : "") << fixed(r.b[j]);
      io.out << "]\n";
    }
    const auto& root = ev.root(s);
    io.out << "\noverall score " << fixed(root.score) << ", verdict " << s.evaluation_set[root.verdict].label;
    if (root.verdict_ties.size() > 1) io.out << " (tied with " << root.verdict_ties.size() - 1 << " other grade(s))";
    io.out << "\n";
    for (const auto& w : ev.environment_warnings) io.out << "warning: " << w.message << "\n";
  }
  io.emit_document(report_text(report));
  return kOk;
}

inline int cmd_sensitivity(const Io& io, const Session& s, const PipelineOptions& opt, const PerturbationSpec& spec) {
  const auto r = perturb_and_evaluate(s, spec, opt);
  const json doc = to_json(r, s.evaluation_set, spec);
  if (io.human()) {
    io.out << "trials " << r.trials << ", epsilon " << spec.epsilon << ", seed " << spec.seed << "\n"
           << "baseline verdict " << s.evaluation_set[r.baseline_verdict].label << ", score " << fixed(r.baseline_score)
           << "\n"
           << "verdict stability " << fixed(r.top_rank_stability) << "\n"
           << "CR rejection rate " << fixed(r.cr_rejection_rate) << "\n"
           << "score min/mean/max " << fixed(r.score_min) << " / " << fixed(r.score_mean) << " / " << fixed(r.score_max)
           << "\n";
    for (const IndicatorNode* node : s.hierarchy.internal_nodes()) {
      io.out << node->label << "\n";
      const auto& spreads = r.weight_spread.at(node->id);
      for (std::size_t c = 0; c < spreads.size(); ++c)
        io.out << "  " << std::left << std::setw(32) << node->children[c].label << std::right << " "
               << fixed(spreads[c].min) << " " << fixed(spreads[c].mean) << " " << fixed(spreads[c].max) << "\n";
    }
  }
  io.emit_document(doc.dump(2) + "\n");
  return kOk;
}

inline void report_error(const Io& io, Errc code, const std::string& detail) {
  io.err << "error: " << to_string(code) << ": " << detail << "\n";
  if (io.flags.json)
    io.out << json{{"error", std::string(to_string(code))}, {"detail", detail}, {"status", exit_code_for(code)}}.dump(2)
           << "\n";
}

}  // namespace detail

// Entry point shared by the pcafe binary and in-process tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Hierarchical fuzzy multi-criteria evaluation engine", "pcafe"};
  app.require_subcommand(1);
  detail::GlobalFlags flags;
  app.add_flag("--json", flags.json, "Machine-readable JSON on standard output");
  app.add_option("--out", flags.out_path, "Write the JSON document to PATH");

  std::string session_path, ratings_csv, method = "geometric";
  std::optional<double> theta;
  PerturbationSpec spec;
  int port = kDefaultPort;
  std::string host = "127.0.0.1", data_dir = "pcafe-sessions";

  auto add_session = [&](CLI::App* cmd) {
    cmd->add_option("session", session_path, "Session file")->required();
    cmd->add_option("--ratings", ratings_csv, "CSV of votes (expert_id,leaf_id,grade_index) merged into the session");
  };
  auto add_method = [&](CLI::App* cmd) {
    cmd->add_option("--method", method, "Weight method for fuzzy sessions")->check(CLI::IsMember({"geometric", "linear"}));
    cmd->add_option("--theta", theta, "Linear-method coefficient, at least (n-1)/2 per node");
  };

  auto* validate = app.add_subcommand("validate", "Check completeness, scale and consistency of a session");
  add_session(validate);
  auto* weights = app.add_subcommand("weights", "Aggregated weights and consistency per node");
  add_session(weights);
  add_method(weights);
  auto* evaluate = app.add_subcommand("evaluate", "Full evaluation report");
  add_session(evaluate);
  add_method(evaluate);
  auto* sensitivity = app.add_subcommand("sensitivity", "Monte Carlo perturbation of judgments");
  add_session(sensitivity);
  add_method(sensitivity);
  sensitivity->add_option("--epsilon", spec.epsilon, "Perturbation magnitude")->required();
  sensitivity->add_option("--trials", spec.trials, "Number of trials");
  sensitivity->add_option("--seed", spec.seed, "Random seed");
  sensitivity->add_option("--threads", spec.threads, "Worker threads (0 = all cores)");
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--data-dir", data_dir, "Directory holding per-session event logs");
  auto* preset = app.add_subcommand("preset", "Emit a built-in hierarchy file");
  std::string preset_name;
  preset->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember({"pcafe"}));
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kParameterError;
  }

  const detail::Io io{out, err, flags};
  try {
    if (preset->parsed()) {
      const std::string text = to_json(build_pcafe_default()).dump(2) + "\n";
      if (flags.out_path.empty())
        out << text;
      else
        io.emit_document(text);
      return kOk;
    }
    if (serve->parsed()) {
      SessionStore store{std::filesystem::path(data_dir)};
      httplib::Server server;
      mount_routes(server, store, ri_table_from_env());
      err << "pcafe service listening on " << host << ":" << port << " (sessions in " << data_dir << ")\n";
      return server.listen(host, port) ? kOk : kInternal;
    }

    Session s = load_session(session_path);
    if (!ratings_csv.empty()) s = apply_ratings(std::move(s), parse_ratings_csv(read_text_file(ratings_csv)));
    PipelineOptions opt;
    opt.method = *parse_weight_method(method);
    opt.theta = theta;
    opt.ri_table = ri_table_from_env();
    check_options(s, opt);

    if (validate->parsed()) return detail::cmd_validate(io, s, opt);
    if (weights->parsed()) return detail::cmd_weights(io, s, opt);
    if (evaluate->parsed()) return detail::cmd_evaluate(io, s, opt);
    if (sensitivity->parsed()) return detail::cmd_sensitivity(io, s, opt, spec);
  } catch (const Error& e) {
    detail::report_error(io, e.code(), e.detail());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pcafe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pcafe::cli
