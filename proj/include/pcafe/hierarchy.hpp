#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "pcafe/error.hpp"

namespace pcafe {

using json = nlohmann::json;

enum class MetricKind { accuracy, efficiency, subjective, objective, none };

constexpr std::string_view to_string(MetricKind k) noexcept {
  switch (k) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::efficiency: return "efficiency";
    case MetricKind::subjective: return "subjective";
    case MetricKind::objective: return "objective";
    case MetricKind::none: return "none";
  }
  return "none";
}

inline std::optional<MetricKind> parse_metric_kind(std::string_view s) {
  for (auto k : {MetricKind::accuracy, MetricKind::efficiency, MetricKind::subjective,
                 MetricKind::objective, MetricKind::none})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct IndicatorNode {
  std::string id;
  std::string label;
  std::string description;
  MetricKind metric_kind = MetricKind::none;
  std::vector<IndicatorNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
  bool operator==(const IndicatorNode&) const = default;
};

struct HierarchyViolation {
  enum class Kind { duplicate_id, empty_id, arity, leaf_without_metric, too_shallow };
  Kind kind;
  std::string node_id;
  std::string message;
};

// Reports every broken tree invariant; an empty result means the tree is usable.
inline std::vector<HierarchyViolation> validate_hierarchy(const IndicatorNode& root) {
  using K = HierarchyViolation::Kind;
  std::vector<HierarchyViolation> out;
  std::set<std::string> seen;
  std::set<std::string> reported_dupes;

  std::function<void(const IndicatorNode&)> visit = [&](const IndicatorNode& node) {
    if (node.id.empty()) {
      out.push_back({K::empty_id, node.id, "node labeled '" + node.label + "' has an empty id"});
    } else if (!seen.insert(node.id).second && reported_dupes.insert(node.id).second) {
      out.push_back({K::duplicate_id, node.id, "id '" + node.id + "' is used by more than one node"});
    }
    if (node.children.size() == 1)
      out.push_back({K::arity, node.id,
                     "node '" + node.id + "' has a single child; pairwise comparison needs at least 2"});
    if (node.is_leaf() && node.metric_kind == MetricKind::none && &node != &root)
      out.push_back({K::leaf_without_metric, node.id,
                     "leaf '" + node.id + "' has metric_kind none"});
    for (const auto& c : node.children) visit(c);
  };
  visit(root);

  if (root.is_leaf())
    out.push_back({K::too_shallow, root.id, "hierarchy needs a goal plus at least one indicator level"});
  return out;
}

inline std::size_t tree_depth(const IndicatorNode& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, tree_depth(c));
  return d + 1;
}

// Validated, immutable indicator tree. Copies share the same nodes.
class Hierarchy {
 public:
  Hierarchy() = default;

  static Hierarchy from_root(IndicatorNode root) {
    auto violations = validate_hierarchy(root);
    if (!violations.empty()) {
      std::string msg;
      for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v.message;
      throw Error(Errc::InvalidHierarchy, msg);
    }
    Hierarchy h;
    h.root_ = std::make_shared<const IndicatorNode>(std::move(root));
    h.index(*h.root_, nullptr);
    return h;
  }

  const IndicatorNode& root() const { return *root_; }
  std::size_t depth() const { return tree_depth(*root_); }

  const IndicatorNode* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : it->second;
  }

  const IndicatorNode* parent_of(std::string_view id) const {
    auto it = parent_.find(std::string(id));
    return it == parent_.end() ? nullptr : it->second;
  }

  // Preorder; deterministic.
  const std::vector<const IndicatorNode*>& nodes() const { return order_; }

  std::vector<const IndicatorNode*> leaves() const {
    std::vector<const IndicatorNode*> out;
    for (auto* n : order_)
      if (n->is_leaf()) out.push_back(n);
    return out;
  }

  std::vector<const IndicatorNode*> internal_nodes() const {
    std::vector<const IndicatorNode*> out;
    for (auto* n : order_)
      if (!n->is_leaf()) out.push_back(n);
    return out;
  }

  bool operator==(const Hierarchy& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return *root_ == *other.root_;
  }

 private:
  void index(const IndicatorNode& node, const IndicatorNode* parent) {
    by_id_[node.id] = &node;
    if (parent) parent_[node.id] = parent;
    order_.push_back(&node);
    for (const auto& c : node.children) index(c, &node);
  }

  std::shared_ptr<const IndicatorNode> root_;
  std::unordered_map<std::string, const IndicatorNode*> by_id_;
  std::unordered_map<std::string, const IndicatorNode*> parent_;
  std::vector<const IndicatorNode*> order_;
};

struct Grade {
  std::string label;
  double score = 0.0;
  bool operator==(const Grade&) const = default;
};

// Ordered grade set, best grade first, scores strictly decreasing.
class EvaluationSet {
 public:
  EvaluationSet() = default;

  explicit EvaluationSet(std::vector<Grade> grades) : grades_(std::move(grades)) {
    PCAFE_REQUIRE(grades_.size() >= 2, Errc::InvalidEvaluationSet,
                  "an evaluation set needs at least 2 grades");
    for (std::size_t k = 0; k < grades_.size(); ++k) {
      PCAFE_REQUIRE(std::isfinite(grades_[k].score), Errc::InvalidEvaluationSet,
                    "grade '" + grades_[k].label + "' has a non-finite score");
      if (k > 0)
        PCAFE_REQUIRE(grades_[k].score < grades_[k - 1].score, Errc::InvalidEvaluationSet,
                      "grade scores must be strictly decreasing ('" + grades_[k - 1].label +
                          "' then '" + grades_[k].label + "')");
    }
  }

  std::size_t size() const noexcept { return grades_.size(); }
  const Grade& operator[](std::size_t k) const { return grades_[k]; }
  const std::vector<Grade>& grades() const noexcept { return grades_; }

  std::vector<double> scores() const {
    std::vector<double> s;
    for (const auto& g : grades_) s.push_back(g.score);
    return s;
  }
  double best_score() const { return grades_.front().score; }
  double worst_score() const { return grades_.back().score; }

  bool operator==(const EvaluationSet&) const = default;

 private:
  std::vector<Grade> grades_;
};

inline EvaluationSet default_evaluation_set() {
  return EvaluationSet({{"Excellent", 90.0},
                        {"Good", 75.0},
                        {"Fair", 60.0},
                        {"Poor", 45.0},
                        {"Very Poor", 30.0}});
}

// Five-dimension cockpit large-model indicator system: goal, five primary
// indicators, sixteen secondary indicators.
inline Hierarchy build_pcafe_default() {
  using MK = MetricKind;
  auto leaf = [](std::string id, std::string label, std::string description, MK kind) {
    return IndicatorNode{std::move(id), std::move(label), std::move(description), kind, {}};
  };
  auto group = [](std::string id, std::string label, std::string description,
                  std::vector<IndicatorNode> children) {
    return IndicatorNode{std::move(id), std::move(label), std::move(description), MK::none,
                         std::move(children)};
  };

  IndicatorNode root = group(
      "iclm_capability", "ICLM capability", "Overall capability of the in-cockpit large model",
      {
          group("perception", "Perception", "Intake of signals from the cabin and the outside world",
                {
                    leaf("auditory_perception", "Auditory Perception", "Perceiving sound", MK::accuracy),
                    leaf("visual_perception", "Visual Perception", "Perceiving visual stimuli", MK::accuracy),
                    leaf("ecological_connectivity", "Ecological Connectivity",
                         "Connecting to traffic, lifestyle, phone, smart-home and live web services",
                         MK::objective),
                    leaf("multimodal_input", "Multimodal Input", "Handling several input modes together",
                         MK::accuracy),
                }),
          group("cognition", "Cognition", "Understanding and reasoning over user input",
                {
                    leaf("natural_language_processing", "Natural Language Processing",
                         "Language recognition, input length, reasoning over everyday and informal speech",
                         MK::accuracy),
                    leaf("knowledge_reasoning", "Knowledge Reasoning",
                         "Answering manual, driving and cultural questions", MK::accuracy),
                    leaf("intent_recognition", "Intent Recognition",
                         "Recognizing commands per seat zone and filtering non-commands", MK::accuracy),
                }),
          group("action", "Action", "Planning and carrying out tasks",
                {
                    leaf("decision_making_planning", "Decision-Making Planning",
                         "Plan quality, number of plans and planning time", MK::efficiency),
                    leaf("execution", "Execution", "Execution success rate, speed and modes used",
                         MK::efficiency),
                }),
          group("feedback", "Feedback", "How the interaction is experienced by the user",
                {
                    leaf("usability", "Usability", "Effective, safe, efficient and satisfying task support",
                         MK::subjective),
                    leaf("trust", "Trust", "User confidence in reliability, safety and transparency",
                         MK::subjective),
                    leaf("load", "Load", "Cognitive and physical demand on the user", MK::objective),
                    leaf("emotion", "Emotion", "Conveying and regulating emotion", MK::subjective),
                }),
          group("evolution", "Evolution", "Adapting over time",
                {
                    leaf("memory", "Memory", "Retaining context within and across conversations",
                         MK::accuracy),
                    leaf("learning", "Learning", "Adjusting services from observed behaviour", MK::objective),
                    leaf("personality", "Personality", "Consistent behaviour and attitude", MK::subjective),
                }),
      });
  return Hierarchy::from_root(std::move(root));
}

// ---- JSON -------------------------------------------------------------------

namespace detail {

inline void reject_unknown_fields(const json& obj, std::initializer_list<std::string_view> allowed,
                                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    PCAFE_REQUIRE(ok, Errc::SchemaViolation, where + ": unknown field '" + it.key() + "'");
  }
}

inline const json& require_field(const json& obj, const char* key, json::value_t type,
                                 const std::string& where) {
  auto it = obj.find(key);
  PCAFE_REQUIRE(it != obj.end(), Errc::SchemaViolation,
                where + ": missing field '" + std::string(key) + "'");
  const bool numeric_ok = type == json::value_t::number_float && it->is_number();
  const bool unsigned_ok = type == json::value_t::number_integer && it->is_number_integer();
  PCAFE_REQUIRE(it->type() == type || numeric_ok || unsigned_ok, Errc::SchemaViolation,
                where + ": field '" + std::string(key) + "' has the wrong type");
  return *it;
}

inline IndicatorNode node_from_json(const json& j, const std::string& where) {
  PCAFE_REQUIRE(j.is_object(), Errc::SchemaViolation, where + ": expected an object");
  reject_unknown_fields(j, {"id", "label", "description", "metric_kind", "children"}, where);
  IndicatorNode n;
  n.id = require_field(j, "id", json::value_t::string, where).get<std::string>();
  const std::string here = where + "/" + n.id;
  n.label = require_field(j, "label", json::value_t::string, here).get<std::string>();
  if (j.contains("description"))
    n.description = require_field(j, "description", json::value_t::string, here).get<std::string>();
  if (j.contains("metric_kind")) {
    auto s = require_field(j, "metric_kind", json::value_t::string, here).get<std::string>();
    auto k = parse_metric_kind(s);
    PCAFE_REQUIRE(k.has_value(), Errc::SchemaViolation, here + ": unknown metric_kind '" + s + "'");
    n.metric_kind = *k;
  }
  if (j.contains("children")) {
    const auto& kids = require_field(j, "children", json::value_t::array, here);
    for (const auto& c : kids) n.children.push_back(node_from_json(c, here));
  }
  return n;
}

}  // namespace detail

inline json to_json(const IndicatorNode& n) {
  json kids = json::array();
  for (const auto& c : n.children) kids.push_back(to_json(c));
  return json{{"id", n.id},
              {"label", n.label},
              {"description", n.description},
              {"metric_kind", std::string(to_string(n.metric_kind))},
              {"children", std::move(kids)}};
}

inline json to_json(const Hierarchy& h) { return to_json(h.root()); }

// Parses and validates. Tree-invariant failures raise InvalidHierarchy.
inline Hierarchy hierarchy_from_json(const json& j) {
  return Hierarchy::from_root(detail::node_from_json(j, "hierarchy"));
}

inline json to_json(const EvaluationSet& v) {
  json out = json::array();
  for (const auto& g : v.grades()) out.push_back({{"label", g.label}, {"score", g.score}});
  return out;
}

inline EvaluationSet evaluation_set_from_json(const json& j) {
  PCAFE_REQUIRE(j.is_array(), Errc::SchemaViolation, "evaluation_set: expected an array");
  std::vector<Grade> grades;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "evaluation_set[" + std::to_string(k) + "]";
    PCAFE_REQUIRE(j[k].is_object(), Errc::SchemaViolation, where + ": expected an object");
    detail::reject_unknown_fields(j[k], {"label", "score"}, where);
    grades.push_back({detail::require_field(j[k], "label", json::value_t::string, where).get<std::string>(),
                      detail::require_field(j[k], "score", json::value_t::number_float, where).get<double>()});
  }
  return EvaluationSet(std::move(grades));
}

}  // namespace pcafe
