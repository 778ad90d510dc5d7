#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pcafe/ahp.hpp"
#include "pcafe/error.hpp"
#include "pcafe/fahp.hpp"
#include "pcafe/hierarchy.hpp"

namespace pcafe {

enum class Scale { crisp_1_9, fuzzy_01_09 };

constexpr std::string_view to_string(Scale s) noexcept {
  return s == Scale::crisp_1_9 ? "crisp_1_9" : "fuzzy_01_09";
}

inline std::optional<Scale> parse_scale(std::string_view s) {
  if (s == "crisp_1_9") return Scale::crisp_1_9;
  if (s == "fuzzy_01_09") return Scale::fuzzy_01_09;
  return std::nullopt;
}

// Admissible entered judgment; derived matrices only need the continuous range.
inline bool in_scale(Scale s, double v) {
  return s == Scale::crisp_1_9 ? on_crisp_grid(v) : in_fuzzy_scale(v);
}

struct ExpertRecord {
  std::string expert_id;
  std::map<std::string, std::vector<PairJudgment>> judgments;  // node id -> sorted by (i, j)
  std::map<std::string, std::size_t> ratings;                  // leaf id -> 1-based grade

  bool operator==(const ExpertRecord&) const = default;
};

struct EnvironmentMetadata {
  double ambient_noise_dba = 0.0;
  double snr_db = 0.0;
  std::optional<double> mic_distance_overhead_cm;
  std::optional<double> mic_distance_dashboard_cm;
  std::int64_t video_positions = 0;
  std::int64_t audio_points = 0;
  double capture_fps = 0.0;

  bool operator==(const EnvironmentMetadata&) const = default;
};

struct Session {
  std::string session_id;
  Hierarchy hierarchy;
  Scale scale = Scale::fuzzy_01_09;
  std::vector<ExpertRecord> experts;
  std::optional<EnvironmentMetadata> environment;
  EvaluationSet evaluation_set;

  const ExpertRecord* find_expert(std::string_view id) const {
    for (const auto& e : experts)
      if (e.expert_id == id) return &e;
    return nullptr;
  }

  bool operator==(const Session&) const = default;
};

// ---- Validation -------------------------------------------------------------

// Structural checks shared by the file parser and the live service. Missing
// judgments and ratings are allowed here; they are reported by find_gaps().
inline void validate_session(const Session& s) {
  PCAFE_REQUIRE(!s.session_id.empty(), Errc::SchemaViolation, "session_id is empty");
  std::set<std::string> ids;
  for (const auto& e : s.experts) {
    PCAFE_REQUIRE(!e.expert_id.empty(), Errc::SchemaViolation, "expert_id is empty");
    PCAFE_REQUIRE(ids.insert(e.expert_id).second, Errc::DuplicateExpert,
                  "expert id '" + e.expert_id + "' appears more than once");
    for (const auto& [node_id, pairs] : e.judgments) {
      const IndicatorNode* node = s.hierarchy.find(node_id);
      PCAFE_REQUIRE(node && !node->is_leaf(), Errc::SchemaViolation,
                    "expert '" + e.expert_id + "' judges '" + node_id + "', which is not a non-leaf node");
      const std::size_t n = node->children.size();
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (const auto& p : pairs) {
        PCAFE_REQUIRE(p.i >= 1 && p.i < p.j && p.j <= n, Errc::SchemaViolation,
                      "expert '" + e.expert_id + "', node '" + node_id + "': pair (" + std::to_string(p.i) +
                          "," + std::to_string(p.j) + ") is not a valid child pair");
        PCAFE_REQUIRE(seen.emplace(p.i, p.j).second, Errc::SchemaViolation,
                      "expert '" + e.expert_id + "', node '" + node_id + "': pair (" + std::to_string(p.i) +
                          "," + std::to_string(p.j) + ") given twice");
        PCAFE_REQUIRE(in_scale(s.scale, p.value), Errc::ScaleMismatch,
                      "expert '" + e.expert_id + "', node '" + node_id + "': value " +
                          std::to_string(p.value) + " is outside the " + std::string(to_string(s.scale)) +
                          " scale");
      }
    }
    for (const auto& [leaf_id, grade] : e.ratings) {
      const IndicatorNode* node = s.hierarchy.find(leaf_id);
      PCAFE_REQUIRE(node && node->is_leaf(), Errc::SchemaViolation,
                    "expert '" + e.expert_id + "' rates '" + leaf_id + "', which is not a leaf");
      PCAFE_REQUIRE(grade >= 1 && grade <= s.evaluation_set.size(), Errc::SchemaViolation,
                    "expert '" + e.expert_id + "', leaf '" + leaf_id + "': grade " + std::to_string(grade) +
                        " is outside 1.." + std::to_string(s.evaluation_set.size()));
    }
  }
  if (s.environment) {
    const auto& env = *s.environment;
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    PCAFE_REQUIRE(nonneg(env.ambient_noise_dba) && nonneg(env.snr_db) && nonneg(env.capture_fps) &&
                      env.video_positions >= 0 && env.audio_points >= 0 &&
                      (!env.mic_distance_overhead_cm || nonneg(*env.mic_distance_overhead_cm)) &&
                      (!env.mic_distance_dashboard_cm || nonneg(*env.mic_distance_dashboard_cm)),
                  Errc::SchemaViolation, "environment values must be nonnegative");
  }
}

// ---- Session file -----------------------------------------------------------

inline json to_json(const EnvironmentMetadata& env) {
  json j{{"ambient_noise_dba", env.ambient_noise_dba},
         {"snr_db", env.snr_db},
         {"video_positions", env.video_positions},
         {"audio_points", env.audio_points},
         {"capture_fps", env.capture_fps}};
  if (env.mic_distance_overhead_cm) j["mic_distance_overhead_cm"] = *env.mic_distance_overhead_cm;
  if (env.mic_distance_dashboard_cm) j["mic_distance_dashboard_cm"] = *env.mic_distance_dashboard_cm;
  return j;
}

inline json to_json(const ExpertRecord& e) {
  json judgments = json::object();
  for (const auto& [node, pairs] : e.judgments) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back(json::array({p.i, p.j, p.value}));
    judgments[node] = std::move(arr);
  }
  json ratings = json::object();
  for (const auto& [leaf, g] : e.ratings) ratings[leaf] = g;
  return json{{"expert_id", e.expert_id}, {"judgments", std::move(judgments)}, {"ratings", std::move(ratings)}};
}

// Canonical form: object keys sorted, judgments sorted by (i, j), experts in
// roster order. Equal sessions serialize to identical bytes.
inline json serialize_session(const Session& s) {
  json experts = json::array();
  for (const auto& e : s.experts) experts.push_back(to_json(e));
  json j{{"session_id", s.session_id},
         {"scale", std::string(to_string(s.scale))},
         {"hierarchy", to_json(s.hierarchy)},
         {"evaluation_set", to_json(s.evaluation_set)},
         {"experts", std::move(experts)}};
  if (s.environment) j["environment"] = to_json(*s.environment);
  return j;
}

namespace detail {

inline std::size_t require_index(const json& v, const std::string& where) {
  PCAFE_REQUIRE(v.is_number_integer() && v.get<std::int64_t>() >= 0, Errc::SchemaViolation,
                where + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

inline EnvironmentMetadata environment_from_json(const json& j) {
  const std::string where = "environment";
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, where + ": expected an object");
  reject_unknown_fields(j,
                        {"ambient_noise_dba", "snr_db", "mic_distance_overhead_cm", "mic_distance_dashboard_cm",
                         "video_positions", "audio_points", "capture_fps"},
                        where);
  EnvironmentMetadata env;
  env.ambient_noise_dba = require_field(j, "ambient_noise_dba", json::value_t::number_float, where).get<double>();
  env.snr_db = require_field(j, "snr_db", json::value_t::number_float, where).get<double>();
  if (j.contains("mic_distance_overhead_cm"))
    env.mic_distance_overhead_cm =
        require_field(j, "mic_distance_overhead_cm", json::value_t::number_float, where).get<double>();
  if (j.contains("mic_distance_dashboard_cm"))
    env.mic_distance_dashboard_cm =
        require_field(j, "mic_distance_dashboard_cm", json::value_t::number_float, where).get<double>();
  env.video_positions = require_field(j, "video_positions", json::value_t::number_integer, where).get<std::int64_t>();
  env.audio_points = require_field(j, "audio_points", json::value_t::number_integer, where).get<std::int64_t>();
  env.capture_fps = require_field(j, "capture_fps", json::value_t::number_float, where).get<double>();
  return env;
}

inline ExpertRecord expert_from_json(const json& j, std::size_t index) {
  std::string where = "experts[" + std::to_string(index) + "]";
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, where + ": expected an object");
  reject_unknown_fields(j, {"expert_id", "judgments", "ratings"}, where);
  ExpertRecord e;
  e.expert_id = require_field(j, "expert_id", json::value_t::string, where).get<std::string>();
  where += "(" + e.expert_id + ")";
  if (j.contains("judgments")) {
    const auto& jj = require_field(j, "judgments", json::value_t::object, where);
    for (auto it = jj.begin(); it != jj.end(); ++it) {
      const std::string w = where + ".judgments." + it.key();
      PCAFE_REQUIRE(it->is_array(), Errc::SchemaViolation, w + ": expected an array");
      auto& pairs = e.judgments[it.key()];
      for (const auto& t : *it) {
        PCAFE_REQUIRE(t.is_array() && t.size() == 3, Errc::SchemaViolation, w + ": expected [i, j, value]");
        PCAFE_REQUIRE(t[2].is_number(), Errc::SchemaViolation, w + ": value must be a number");
        pairs.push_back({require_index(t[0], w), require_index(t[1], w), t[2].get<double>()});
      }
      std::sort(pairs.begin(), pairs.end(),
                [](const PairJudgment& a, const PairJudgment& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    }
  }
  if (j.contains("ratings")) {
    const auto& jr = require_field(j, "ratings", json::value_t::object, where);
    for (auto it = jr.begin(); it != jr.end(); ++it)
      e.ratings[it.key()] = require_index(*it, where + ".ratings." + it.key());
  }
  return e;
}

}  // namespace detail

inline Session session_from_json(const json& j) {
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, "session: expected an object");
  detail::reject_unknown_fields(j, {"session_id", "scale", "hierarchy", "evaluation_set", "environment", "experts"},
                                "session");
  Session s;
  s.session_id = detail::require_field(j, "session_id", json::value_t::string, "session").get<std::string>();
  const auto scale_name = detail::require_field(j, "scale", json::value_t::string, "session").get<std::string>();
  auto scale = parse_scale(scale_name);
  PCAFE_REQUIRE(scale.has_value(), Errc::SchemaViolation, "session: unknown scale '" + scale_name + "'");
  s.scale = *scale;

  PCAFE_REQUIRE(j.contains("hierarchy"), Errc::SchemaViolation, "session: missing field 'hierarchy'");
  try {
    s.hierarchy = hierarchy_from_json(j.at("hierarchy"));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidHierarchy) throw Error(Errc::SchemaViolation, e.detail());
    throw;
  }
  PCAFE_REQUIRE(j.contains("evaluation_set"), Errc::SchemaViolation, "session: missing field 'evaluation_set'");
  try {
    s.evaluation_set = evaluation_set_from_json(j.at("evaluation_set"));
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidEvaluationSet) throw Error(Errc::SchemaViolation, e.detail());
    throw;
  }
  if (j.contains("environment") && !j.at("environment").is_null())
    s.environment = detail::environment_from_json(j.at("environment"));
  const auto& experts = detail::require_field(j, "experts", json::value_t::array, "session");
  for (std::size_t k = 0; k < experts.size(); ++k) s.experts.push_back(detail::expert_from_json(experts[k], k));

  try {
    validate_session(s);
  } catch (const Error& e) {
    if (e.code() == Errc::DuplicateExpert) throw Error(Errc::SchemaViolation, e.detail());
    throw;
  }
  return s;
}

inline Session parse_session(std::string_view document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Malformed, e.what());
  }
  return session_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  PCAFE_REQUIRE(in.good(), Errc::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Session load_session(const std::string& path) { return parse_session(read_text_file(path)); }

// ---- Assembly ---------------------------------------------------------------

using PanelMatrices = std::variant<std::vector<JudgmentMatrix>, std::vector<FuzzyJudgmentMatrix>>;

inline const IndicatorNode& require_internal_node(const Session& s, std::string_view node_id) {
  const IndicatorNode* node = s.hierarchy.find(node_id);
  PCAFE_REQUIRE(node && !node->is_leaf(), Errc::UnknownNode,
                "'" + std::string(node_id) + "' is not a non-leaf node of the hierarchy");
  return *node;
}

inline const IndicatorNode& require_leaf(const Session& s, std::string_view leaf_id) {
  const IndicatorNode* node = s.hierarchy.find(leaf_id);
  PCAFE_REQUIRE(node && node->is_leaf(), Errc::UnknownNode,
                "'" + std::string(leaf_id) + "' is not a leaf of the hierarchy");
  return *node;
}

// Builds one expert's matrix for a node; MissingPair becomes IncompleteJudgments.
template <typename Matrix>
Matrix assemble_expert_matrix(const ExpertRecord& e, const IndicatorNode& node) {
  static const std::vector<PairJudgment> none;
  auto it = e.judgments.find(node.id);
  const auto& pairs = it == e.judgments.end() ? none : it->second;
  try {
    if constexpr (std::is_same_v<Matrix, JudgmentMatrix>)
      return build_judgment_matrix(node.children.size(), pairs);
    else
      return build_fuzzy_matrix(node.children.size(), pairs);
  } catch (const Error& err) {
    if (err.code() == Errc::MissingPair)
      throw Error(Errc::IncompleteJudgments,
                  "expert '" + e.expert_id + "', node '" + node.id + "': " + err.detail());
    if (err.code() == Errc::OutOfScale) throw Error(Errc::ScaleMismatch, err.detail());
    throw;
  }
}

// One matrix per expert, in roster order, child ordering as in the hierarchy.
inline PanelMatrices assemble_matrices(const Session& s, std::string_view node_id) {
  const IndicatorNode& node = require_internal_node(s, node_id);
  if (s.scale == Scale::crisp_1_9) {
    std::vector<JudgmentMatrix> out;
    for (const auto& e : s.experts) out.push_back(assemble_expert_matrix<JudgmentMatrix>(e, node));
    return out;
  }
  std::vector<FuzzyJudgmentMatrix> out;
  for (const auto& e : s.experts) out.push_back(assemble_expert_matrix<FuzzyJudgmentMatrix>(e, node));
  return out;
}

inline std::vector<std::uint64_t> tally_ratings(const Session& s, std::string_view leaf_id) {
  const IndicatorNode& leaf = require_leaf(s, leaf_id);
  std::vector<std::uint64_t> counts(s.evaluation_set.size(), 0);
  for (const auto& e : s.experts) {
    auto it = e.ratings.find(leaf.id);
    PCAFE_REQUIRE(it != e.ratings.end(), Errc::MissingRating,
                  "expert '" + e.expert_id + "' has not rated leaf '" + leaf.id + "'");
    ++counts[it->second - 1];
  }
  return counts;
}

struct Gap {
  enum class Kind { missing_judgment, missing_rating, no_experts };
  Kind kind;
  std::string expert_id;
  std::string node_id;
  std::size_t i = 0;  // 1-based pair for missing judgments
  std::size_t j = 0;
};

// Every missing judgment pair and rating, experts in roster order, nodes in
// hierarchy preorder.
inline std::vector<Gap> find_gaps(const Session& s) {
  std::vector<Gap> gaps;
  for (const auto& e : s.experts) {
    for (const IndicatorNode* node : s.hierarchy.nodes()) {
      if (node->is_leaf()) {
        if (!e.ratings.contains(node->id)) gaps.push_back({Gap::Kind::missing_rating, e.expert_id, node->id});
        continue;
      }
      std::set<std::pair<std::size_t, std::size_t>> have;
      if (auto it = e.judgments.find(node->id); it != e.judgments.end())
        for (const auto& p : it->second) have.emplace(p.i, p.j);
      const std::size_t n = node->children.size();
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
          if (!have.contains({i, j})) gaps.push_back({Gap::Kind::missing_judgment, e.expert_id, node->id, i, j});
    }
  }
  if (s.experts.empty()) gaps.push_back({Gap::Kind::no_experts, "", s.hierarchy.root().id});
  return gaps;
}

inline json to_json(const Gap& g) {
  if (g.kind == Gap::Kind::no_experts) return json{{"kind", "no_experts"}};
  if (g.kind == Gap::Kind::missing_rating)
    return json{{"kind", "missing_rating"}, {"expert_id", g.expert_id}, {"leaf_id", g.node_id}};
  return json{{"kind", "missing_judgment"}, {"expert_id", g.expert_id}, {"node_id", g.node_id}, {"i", g.i}, {"j", g.j}};
}

// ---- Ratings CSV ------------------------------------------------------------

struct RatingRow {
  std::string expert_id;
  std::string leaf_id;
  std::size_t grade = 0;
};

// Header line "expert_id,leaf_id,grade_index" followed by one vote per line.
inline std::vector<RatingRow> parse_ratings_csv(std::string_view text) {
  std::vector<RatingRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    const std::string where = "ratings csv line " + std::to_string(lineno);
    PCAFE_REQUIRE(cells.size() == 3, Errc::Malformed, where + ": expected 3 columns");
    if (!header_seen) {
      PCAFE_REQUIRE(cells[0] == "expert_id" && cells[1] == "leaf_id" && cells[2] == "grade_index",
                    Errc::Malformed, where + ": expected header expert_id,leaf_id,grade_index");
      header_seen = true;
      continue;
    }
    std::size_t pos = 0;
    unsigned long grade = 0;
    try {
      grade = std::stoul(cells[2], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    PCAFE_REQUIRE(pos == cells[2].size() && pos > 0, Errc::Malformed, where + ": grade_index is not an integer");
    rows.push_back({cells[0], cells[1], static_cast<std::size_t>(grade)});
  }
  PCAFE_REQUIRE(header_seen, Errc::Malformed, "ratings csv: missing header");
  return rows;
}

// Returns a copy of the session with the votes applied (later rows win).
inline Session apply_ratings(Session s, const std::vector<RatingRow>& rows) {
  for (const auto& r : rows) {
    auto it = std::find_if(s.experts.begin(), s.experts.end(),
                           [&](const ExpertRecord& e) { return e.expert_id == r.expert_id; });
    PCAFE_REQUIRE(it != s.experts.end(), Errc::SchemaViolation,
                  "ratings csv names unknown expert '" + r.expert_id + "'");
    it->ratings[r.leaf_id] = r.grade;
  }
  validate_session(s);
  return s;
}

// ---- Measurement environment --------------------------------------------------

struct EnvironmentWarning {
  std::string field;
  std::string message;
};

// Recommended capture protocol; violations are warnings, never errors.
inline std::vector<EnvironmentWarning> validate_environment(const EnvironmentMetadata& env) {
  std::vector<EnvironmentWarning> out;
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
  };
  if (env.ambient_noise_dba < 45.0 || env.ambient_noise_dba > 65.0)
    out.push_back({"ambient_noise_dba", "ambient noise " + fmt(env.ambient_noise_dba) +
                                            " dB(A) is outside the 45-65 dB(A) range"});
  if (!(env.snr_db > 15.0))
    out.push_back({"snr_db", "signal-to-noise ratio " + fmt(env.snr_db) + " dB is not greater than 15 dB"});
  if (env.mic_distance_overhead_cm &&
      (*env.mic_distance_overhead_cm < 35.0 || *env.mic_distance_overhead_cm > 55.0))
    out.push_back({"mic_distance_overhead_cm", "overhead recording distance " + fmt(*env.mic_distance_overhead_cm) +
                                                   " cm is outside 35-55 cm"});
  if (env.mic_distance_dashboard_cm &&
      (*env.mic_distance_dashboard_cm < 65.0 || *env.mic_distance_dashboard_cm > 75.0))
    out.push_back({"mic_distance_dashboard_cm", "dashboard recording distance " +
                                                    fmt(*env.mic_distance_dashboard_cm) + " cm is outside 65-75 cm"});
  if (env.video_positions < 2)
    out.push_back({"video_positions", std::to_string(env.video_positions) +
                                          " video recording position(s); at least 2 are required"});
  if (env.audio_points < 1)
    out.push_back({"audio_points", std::to_string(env.audio_points) +
                                       " audio collection point(s); at least 1 is required"});
  if (env.capture_fps < 60.0)
    out.push_back({"capture_fps", "capture rate " + fmt(env.capture_fps) + " fps is below 60 fps"});
  return out;
}

// ---- Metric banding -----------------------------------------------------------

enum class BandDirection { higher_is_better, lower_is_better };

struct Band {
  std::optional<double> bound;  // nullopt: catch-all for everything past the previous bound
  std::size_t grade = 0;        // 1-based
};

// Bands are listed best first. For higher_is_better a value lands in the first
// band whose bound it reaches (value >= bound); for lower_is_better, the first
// whose bound it does not exceed (value <= bound). Boundary values therefore
// belong to the better band. The last band must be the catch-all.
struct BandTable {
  BandDirection direction = BandDirection::higher_is_better;
  std::vector<Band> bands;

  void validate() const {
    PCAFE_REQUIRE(!bands.empty(), Errc::InvalidArgument, "band table is empty");
    PCAFE_REQUIRE(!bands.back().bound.has_value(), Errc::InvalidArgument,
                  "the last band must be a catch-all without a bound");
    for (std::size_t k = 0; k + 1 < bands.size(); ++k) {
      PCAFE_REQUIRE(bands[k].bound.has_value(), Errc::InvalidArgument, "only the last band may omit its bound");
      PCAFE_REQUIRE(std::isfinite(*bands[k].bound), Errc::InvalidArgument, "band bounds must be finite");
      if (k > 0) {
        const bool ordered = direction == BandDirection::higher_is_better ? *bands[k].bound < *bands[k - 1].bound
                                                                          : *bands[k].bound > *bands[k - 1].bound;
        PCAFE_REQUIRE(ordered, Errc::InvalidArgument, "band bounds must be strictly ordered from best to worst");
      }
    }
    for (const auto& b : bands) PCAFE_REQUIRE(b.grade >= 1, Errc::InvalidArgument, "band grades are 1-based");
  }
};

using MetricBanding = std::map<MetricKind, BandTable>;

inline std::size_t band_metric(double value, MetricKind kind, const MetricBanding& banding) {
  auto it = banding.find(kind);
  PCAFE_REQUIRE(kind != MetricKind::none && it != banding.end(), Errc::NoBanding,
                "no banding defined for metric kind '" + std::string(to_string(kind)) + "'");
  PCAFE_REQUIRE(std::isfinite(value), Errc::InvalidArgument, "metric value is not finite");
  const BandTable& t = it->second;
  for (const auto& b : t.bands) {
    if (!b.bound) return b.grade;
    if (t.direction == BandDirection::higher_is_better ? value >= *b.bound : value <= *b.bound) return b.grade;
  }
  return t.bands.back().grade;
}

// {"accuracy": {"direction": "higher_is_better",
//               "bands": [{"bound": 0.95, "grade": 1}, ..., {"grade": 5}]}, ...}
inline MetricBanding banding_from_json(const json& j) {
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, "banding: expected an object");
  MetricBanding out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string where = "banding." + it.key();
    auto kind = parse_metric_kind(it.key());
    PCAFE_REQUIRE(kind && *kind != MetricKind::none, Errc::SchemaViolation, where + ": unknown metric kind");
    detail::reject_unknown_fields(*it, {"direction", "bands"}, where);
    BandTable t;
    const auto dir = detail::require_field(*it, "direction", json::value_t::string, where).get<std::string>();
    PCAFE_REQUIRE(dir == "higher_is_better" || dir == "lower_is_better", Errc::SchemaViolation,
                  where + ": direction must be higher_is_better or lower_is_better");
    t.direction = dir == "higher_is_better" ? BandDirection::higher_is_better : BandDirection::lower_is_better;
    for (const auto& b : detail::require_field(*it, "bands", json::value_t::array, where)) {
      detail::reject_unknown_fields(b, {"bound", "grade"}, where);
      Band band;
      if (b.contains("bound")) band.bound = detail::require_field(b, "bound", json::value_t::number_float, where).get<double>();
      band.grade = detail::require_index(detail::require_field(b, "grade", json::value_t::number_integer, where), where);
      t.bands.push_back(band);
    }
    try {
      t.validate();
    } catch (const Error& e) {
      throw Error(Errc::SchemaViolation, where + ": " + e.detail());
    }
    out[*kind] = std::move(t);
  }
  return out;
}

}  // namespace pcafe
