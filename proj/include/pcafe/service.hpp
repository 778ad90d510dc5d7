#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcafe/elicitation.hpp"
#include "pcafe/error.hpp"
#include "pcafe/pipeline.hpp"

namespace pcafe {

// Raised by get_results while judgments or ratings are still missing.
class IncompleteError : public Error {
 public:
  explicit IncompleteError(std::vector<Gap> gaps)
      : Error(Errc::IncompleteJudgments, std::to_string(gaps.size()) + " item(s) missing"), gaps_(std::move(gaps)) {}
  const std::vector<Gap>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<Gap> gaps_;
};

struct CreateSessionRequest {
  std::optional<std::string> session_id;
  json hierarchy;
  Scale scale = Scale::fuzzy_01_09;
  std::optional<json> evaluation_set;  // default grade set when absent
  std::vector<std::string> experts;
  std::optional<EnvironmentMetadata> environment;
};

inline CreateSessionRequest create_request_from_json(const json& j) {
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, "request: expected an object");
  detail::reject_unknown_fields(j, {"session_id", "hierarchy", "scale", "evaluation_set", "experts", "environment"},
                                "request");
  CreateSessionRequest r;
  if (j.contains("session_id"))
    r.session_id = detail::require_field(j, "session_id", json::value_t::string, "request").get<std::string>();
  PCAFE_REQUIRE(j.contains("hierarchy"), Errc::SchemaViolation, "request: missing field 'hierarchy'");
  r.hierarchy = j.at("hierarchy");
  const auto scale = detail::require_field(j, "scale", json::value_t::string, "request").get<std::string>();
  PCAFE_REQUIRE(parse_scale(scale).has_value(), Errc::SchemaViolation, "request: unknown scale '" + scale + "'");
  r.scale = *parse_scale(scale);
  if (j.contains("evaluation_set")) r.evaluation_set = j.at("evaluation_set");
  for (const auto& e : detail::require_field(j, "experts", json::value_t::array, "request")) {
    PCAFE_REQUIRE(e.is_string(), Errc::SchemaViolation, "request: experts must be a list of ids");
    r.experts.push_back(e.get<std::string>());
  }
  if (j.contains("environment") && !j.at("environment").is_null())
    r.environment = detail::environment_from_json(j.at("environment"));
  return r;
}

// Sessions under construction. Mutations to one session are serialized by a
// per-session mutex; distinct sessions proceed in parallel. With a data
// directory every mutation is appended to <dir>/<id>.events.jsonl before it is
// acknowledged, and the logs are replayed on construction.
class SessionStore {
 public:
  struct Snapshot {
    Session session;
    std::uint64_t revision = 0;
  };

  explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt)
      : data_dir_(std::move(data_dir)) {
    if (!data_dir_) return;
    std::filesystem::create_directories(*data_dir_);
    std::vector<std::filesystem::path> logs;
    for (const auto& entry : std::filesystem::directory_iterator(*data_dir_))
      if (entry.is_regular_file() && entry.path().filename().string().ends_with(".events.jsonl"))
        logs.push_back(entry.path());
    std::sort(logs.begin(), logs.end());
    for (const auto& p : logs) replay(p);
  }

  std::string create(const CreateSessionRequest& req) {
    Session s;
    s.scale = req.scale;
    s.hierarchy = hierarchy_from_json(req.hierarchy);
    s.evaluation_set = req.evaluation_set ? evaluation_set_from_json(*req.evaluation_set) : default_evaluation_set();
    s.environment = req.environment;
    for (const auto& id : req.experts) s.experts.push_back({id, {}, {}});

    std::unique_lock lock(map_mutex_);
    if (req.session_id) {
      PCAFE_REQUIRE(!req.session_id->empty() && req.session_id->find('/') == std::string::npos,
                    Errc::InvalidArgument, "session ids must be nonempty and contain no '/'");
      PCAFE_REQUIRE(!sessions_.contains(*req.session_id), Errc::InvalidArgument,
                    "session '" + *req.session_id + "' already exists");
      s.session_id = *req.session_id;
    } else {
      do s.session_id = fresh_id();
      while (sessions_.contains(s.session_id));
    }
    validate_session(s);

    auto entry = std::make_shared<Entry>();
    entry->session = std::move(s);
    open_log(*entry, true);
    append(*entry, json{{"type", "create"}, {"session", serialize_session(entry->session)}});
    const std::string id = entry->session.session_id;
    sessions_.emplace(id, std::move(entry));
    return id;
  }

  Snapshot snapshot(const std::string& id) const {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    return {e->session, e->revision};
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
  }

  // Upsert one (i, j) judgment. Returns the new revision and the live
  // consistency snapshot for that expert and node.
  std::pair<std::uint64_t, json> record_judgment(const std::string& id, const std::string& expert_id,
                                                 const std::string& node_id, std::size_t i, std::size_t j,
                                                 double value) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    apply_judgment(e->session, expert_id, node_id, i, j, value);
    append(*e, json{{"type", "judgment"}, {"expert", expert_id}, {"node", node_id}, {"i", i}, {"j", j}, {"value", value}});
    ++e->revision;
    return {e->revision, consistency_snapshot(e->session, expert_id, node_id)};
  }

  std::uint64_t record_rating(const std::string& id, const std::string& expert_id, const std::string& leaf_id,
                              std::size_t grade) {
    auto e = find(id);
    std::lock_guard lock(e->mutex);
    apply_rating(e->session, expert_id, leaf_id, grade);
    append(*e, json{{"type", "rating"}, {"expert", expert_id}, {"leaf", leaf_id}, {"grade", grade}});
    return ++e->revision;
  }

  json consistency(const std::string& id, const std::string& expert_id, const std::string& node_id) const {
    const auto snap = snapshot(id);
    return consistency_snapshot(snap.session, expert_id, node_id);
  }

  json results(const std::string& id, const PipelineOptions& opt) const {
    const auto snap = snapshot(id);
    auto gaps = find_gaps(snap.session);
    if (!gaps.empty()) throw IncompleteError(std::move(gaps));
    return build_report(snap.session, opt);
  }

  json export_session(const std::string& id) const { return serialize_session(snapshot(id).session); }

  // Summary with per-expert completion derived from the current state.
  json describe(const std::string& id) const {
    const auto snap = snapshot(id);
    const auto& s = snap.session;
    const auto gaps = find_gaps(s);
    json experts = json::array();
    for (const auto& e : s.experts) {
      std::size_t missing_judgments = 0, missing_ratings = 0;
      for (const auto& g : gaps) {
        if (g.expert_id != e.expert_id) continue;
        (g.kind == Gap::Kind::missing_rating ? missing_ratings : missing_judgments)++;
      }
      experts.push_back({{"expert_id", e.expert_id},
                         {"missing_judgments", missing_judgments},
                         {"missing_ratings", missing_ratings},
                         {"complete", missing_judgments + missing_ratings == 0}});
    }
    json gap_list = json::array();
    for (const auto& g : gaps) gap_list.push_back(to_json(g));
    return json{{"session_id", s.session_id},
                {"revision", snap.revision},
                {"scale", std::string(to_string(s.scale))},
                {"hierarchy", to_json(s.hierarchy)},
                {"evaluation_set", to_json(s.evaluation_set)},
                {"experts", std::move(experts)},
                {"complete", gaps.empty()},
                {"gaps", std::move(gap_list)}};
  }

  static json consistency_snapshot(const Session& s, const std::string& expert_id, const std::string& node_id) {
    const IndicatorNode& node = require_internal_node(s, node_id);
    const ExpertRecord* e = s.find_expert(expert_id);
    PCAFE_REQUIRE(e, Errc::UnknownExpert, "unknown expert '" + expert_id + "'");
    json out{{"expert_id", expert_id}, {"node_id", node_id}, {"n", node.children.size()}};
    const auto missing = missing_pairs(*e, node);
    if (!missing.empty()) {
      out["complete"] = false;
      out["missing"] = missing;
      return out;
    }
    const PipelineOptions opt;
    const MatrixDiagnostics d =
        s.scale == Scale::crisp_1_9
            ? detail::diagnose(assemble_expert_matrix<JudgmentMatrix>(*e, node), opt)
            : detail::diagnose(assemble_expert_matrix<FuzzyJudgmentMatrix>(*e, node), opt, default_theta(node.children.size()));
    out["complete"] = true;
    out["consistent"] = d.consistency.consistent;
    out["cr"] = d.consistency.cr;
    out["diagnostics"] = to_json(d);
    if (d.worst_triad) {
      json labels = json::array();
      for (auto idx : {d.worst_triad->i, d.worst_triad->j, d.worst_triad->k})
        labels.push_back(node.children[idx - 1].label);
      out["worst_triad_labels"] = std::move(labels);
    }
    return out;
  }

 private:
  struct Entry {
    mutable std::mutex mutex;
    Session session;
    std::uint64_t revision = 0;
    std::ofstream log;
  };

  static json missing_pairs(const ExpertRecord& e, const IndicatorNode& node) {
    json out = json::array();
    const auto it = e.judgments.find(node.id);
    const std::size_t n = node.children.size();
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) {
        bool have = false;
        if (it != e.judgments.end())
          for (const auto& p : it->second) have = have || (p.i == i && p.j == j);
        if (!have) out.push_back(json::array({i, j}));
      }
    return out;
  }

  static ExpertRecord& require_expert(Session& s, const std::string& expert_id) {
    for (auto& e : s.experts)
      if (e.expert_id == expert_id) return e;
    throw Error(Errc::UnknownExpert, "unknown expert '" + expert_id + "'");
  }

  static void apply_judgment(Session& s, const std::string& expert_id, const std::string& node_id, std::size_t i,
                             std::size_t j, double value) {
    ExpertRecord& e = require_expert(s, expert_id);
    const IndicatorNode& node = require_internal_node(s, node_id);
    PCAFE_REQUIRE(i >= 1 && i < j && j <= node.children.size(), Errc::InvalidArgument,
                  "pair (" + std::to_string(i) + "," + std::to_string(j) + ") is not a valid child pair of '" +
                      node_id + "'");
    PCAFE_REQUIRE(in_scale(s.scale, value), Errc::OutOfScale,
                  "value " + std::to_string(value) + " is outside the " + std::string(to_string(s.scale)) + " scale");
    auto& pairs = e.judgments[node_id];
    auto it = std::find_if(pairs.begin(), pairs.end(), [&](const PairJudgment& p) { return p.i == i && p.j == j; });
    if (it != pairs.end()) {
      it->value = value;
    } else {
      pairs.push_back({i, j, value});
      std::sort(pairs.begin(), pairs.end(),
                [](const PairJudgment& a, const PairJudgment& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    }
  }

  static void apply_rating(Session& s, const std::string& expert_id, const std::string& leaf_id, std::size_t grade) {
    ExpertRecord& e = require_expert(s, expert_id);
    require_leaf(s, leaf_id);
    PCAFE_REQUIRE(grade >= 1 && grade <= s.evaluation_set.size(), Errc::BadGrade,
                  "grade " + std::to_string(grade) + " is outside 1.." + std::to_string(s.evaluation_set.size()));
    e.ratings[leaf_id] = grade;
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(id);
    PCAFE_REQUIRE(it != sessions_.end(), Errc::UnknownSession, "unknown session '" + id + "'");
    return it->second;
  }

  std::string fresh_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t x = rng_();
    std::string id = "s-";
    for (int k = 0; k < 16; ++k, x >>= 4) id += kHex[x & 0xF];
    return id;
  }

  std::filesystem::path log_path(const std::string& id) const { return *data_dir_ / (id + ".events.jsonl"); }

  void open_log(Entry& e, bool truncate) {
    if (!data_dir_) return;
    e.log.open(log_path(e.session.session_id), truncate ? std::ios::trunc : std::ios::app);
    PCAFE_REQUIRE(e.log.good(), Errc::Io, "cannot open event log for '" + e.session.session_id + "'");
  }

  static void append(Entry& e, const json& event) {
    if (!e.log.is_open()) return;
    e.log << event.dump() << '\n';
    e.log.flush();
    PCAFE_REQUIRE(e.log.good(), Errc::Io, "failed to append to the event log");
  }

  void replay(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    auto entry = std::make_shared<Entry>();
    bool created = false;
    std::uintmax_t good_bytes = 0;
    bool torn = false;
    while (std::getline(in, line)) {
      if (line.empty() || in.eof()) {
        torn = !line.empty();  // a final line without '\n' was never acknowledged
        if (torn) break;
        good_bytes += line.size() + 1;
        continue;
      }
      json ev;
      try {
        ev = json::parse(line);
      } catch (const json::parse_error&) {
        torn = true;
        break;
      }
      good_bytes += line.size() + 1;
      const auto type = ev.value("type", "");
      if (type == "create") {
        entry->session = session_from_json(ev.at("session"));
        created = true;
      } else if (created && type == "judgment") {
        apply_judgment(entry->session, ev.at("expert"), ev.at("node"), ev.at("i"), ev.at("j"), ev.at("value"));
        ++entry->revision;
      } else if (created && type == "rating") {
        apply_rating(entry->session, ev.at("expert"), ev.at("leaf"), ev.at("grade"));
        ++entry->revision;
      }
    }
    in.close();
    if (torn) std::filesystem::resize_file(path, good_bytes);
    if (!created) return;
    open_log(*entry, false);
    const std::string id = entry->session.session_id;
    sessions_.emplace(id, std::move(entry));
  }

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace pcafe
