// One PASS/FAIL line per acceptance criterion; exit status is the failure count.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "pcafe/cli.hpp"
#include "pcafe/service_http.hpp"
#include "support.hpp"

using namespace pcafe;
using pcafe::testing::fixture;
using pcafe::testing::Gen;

namespace {

struct Check {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s  %-34s %7.3fs%s%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), secs, c.ok ? "" : "  ", c.why.c_str());
  failures += !c.ok;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main() {
  criterion("ri-table", [](Check& c) {
    const double table[] = {0, 0, 0.58, 0.9, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51};
    for (std::size_t n = 1; n <= 11; ++n)
      c.require(ri_lookup(n) == table[n - 1], "n=" + std::to_string(n) + " gives " + num(ri_lookup(n)));
  });

  criterion("preset-hierarchy", [](Check& c) {
    const auto h = build_pcafe_default();
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"Perception", {"Auditory Perception", "Visual Perception", "Ecological Connectivity", "Multimodal Input"}},
        {"Cognition", {"Natural Language Processing", "Knowledge Reasoning", "Intent Recognition"}},
        {"Action", {"Decision-Making Planning", "Execution"}},
        {"Feedback", {"Usability", "Trust", "Load", "Emotion"}},
        {"Evolution", {"Memory", "Learning", "Personality"}},
    };
    const auto& root = h.root();
    c.require(root.children.size() == 5, "root has " + std::to_string(root.children.size()) + " children");
    c.require(h.leaves().size() == 16, "leaf count " + std::to_string(h.leaves().size()));
    for (std::size_t p = 0; p < expected.size() && p < root.children.size(); ++p) {
      const auto& node = root.children[p];
      c.require(node.label == expected[p].first, "primary " + std::to_string(p) + " is " + node.label);
      c.require(node.children.size() == expected[p].second.size(), node.label + " child count");
      for (std::size_t k = 0; k < node.children.size() && k < expected[p].second.size(); ++k)
        c.require(node.children[k].label == expected[p].second[k] && node.children[k].is_leaf(),
                  node.label + " child " + node.children[k].label);
    }
  });

  criterion("consistent-matrix-recovery", [](Check& c) {
    Gen gen(0xACCE55);
    double worst_w = 0, worst_l = 0, worst_cr = 0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = gen.index(3, 9);
      const auto v = gen.scale_bounded_vector(n);
      const auto a = JudgmentMatrix::from_matrix(gen.consistent_crisp(v));
      const auto w = weights_geometric_mean(a);
      const double vs = std::accumulate(v.begin(), v.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) worst_w = std::max(worst_w, std::abs(w[i] - v[i] / vs));
      const auto r = consistency(a);
      worst_l = std::max(worst_l, std::abs(r.lambda_max - static_cast<double>(n)));
      worst_cr = std::max(worst_cr, std::abs(r.cr));
    }
    c.require(worst_w <= 1e-9, "weight error " + num(worst_w));
    c.require(worst_l <= 1e-9, "lambda error " + num(worst_l));
    c.require(worst_cr <= 1e-9, "cr " + num(worst_cr));
  });

  criterion("fuzzy-transform-theorem", [](Check& c) {
    Gen gen(0xF022);
    double worst_res = 0, worst_comp = 0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = gen.index(3, 9);
      const auto r = to_consistency_matrix(FuzzyJudgmentMatrix::from_matrix(gen.random_fuzzy(n)));
      worst_res = std::max(worst_res, additive_consistency_residual(r.matrix()));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) worst_comp = std::max(worst_comp, std::abs(r(i, j) + r(j, i) - 1.0));
    }
    c.require(worst_res <= 1e-12, "residual " + num(worst_res));
    c.require(worst_comp <= 1e-12, "complementarity " + num(worst_comp));
  });

  criterion("weight-normalization", [](Check& c) {
    Gen gen(0x5EED);
    auto check = [&](const WeightVector& w, const char* what) {
      double s = 0;
      for (double x : w) {
        c.require(x >= 0.0, std::string(what) + " negative component " + num(x));
        s += x;
      }
      c.require(std::abs(s - 1.0) <= 1e-12, std::string(what) + " sums to " + num(s));
    };
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = gen.index(3, 9);
      const double nd = static_cast<double>(n);
      check(weights_geometric_mean(JudgmentMatrix::from_matrix(gen.random_crisp(n))), "ahp");
      const auto r = to_consistency_matrix(FuzzyJudgmentMatrix::from_matrix(gen.random_fuzzy(n)));
      check(weights_geometric_mean_fuzzy(r), "fuzzy geometric");
      const auto base = weights_linear(r, (nd - 1) / 2);
      check(base, "fuzzy linear");
      const auto rank = pcafe::testing::argsort_desc(base.values());
      for (double theta : {nd, 10 * nd}) {
        const auto w = weights_linear(r, theta);
        check(w, "fuzzy linear");
        c.require(pcafe::testing::argsort_desc(w.values()) == rank, "ranking changed at theta " + num(theta));
      }
    }
  });

  criterion("cr-gate", [](Check& c) {
    const auto cyclic = JudgmentMatrix::from_matrix(
        SquareMatrix::from_rows({{1, 3, 1.0 / 5}, {1.0 / 3, 1, 3}, {5, 1.0 / 3, 1}}));
    const auto r = consistency(cyclic);
    c.require(r.cr > 0.1 && !r.consistent, "cyclic cr " + num(r.cr));
    // formula chain by hand
    const double g[3] = {std::cbrt(3.0 / 5), 1.0, std::cbrt(5.0 / 3)};
    const double gs = g[0] + g[1] + g[2];
    const double rows[3][3] = {{1, 3, 0.2}, {1.0 / 3, 1, 3}, {5, 1.0 / 3, 1}};
    double lam = 0;
    for (int i = 0; i < 3; ++i) {
      double aw = 0;
      for (int j = 0; j < 3; ++j) aw += rows[i][j] * g[j] / gs;
      lam += aw / (g[i] / gs) / 3;
    }
    c.require(std::abs(lam - r.lambda_max) <= 1e-12, "formula chain " + num(lam) + " vs " + num(r.lambda_max));
    const auto eig = pcafe::testing::power_iteration(cyclic.matrix());
    c.require((eig.lambda - 3) / 2 / 0.58 > 0.1, "power iteration cr " + num((eig.lambda - 3) / 2 / 0.58));
    Gen gen(0xC0);
    for (int t = 0; t < 500; ++t) {
      const auto a = JudgmentMatrix::from_matrix(gen.consistent_crisp(gen.scale_bounded_vector(gen.index(3, 9))));
      const auto rc = consistency(a);
      c.require(rc.consistent && std::abs(rc.cr) <= 1e-9, "consistent matrix cr " + num(rc.cr));
    }
  });

  criterion("fce-closure", [](Check& c) {
    Gen gen(0xFCE);
    const auto v = default_evaluation_set();
    auto random_case = [&](NodeWeights& w, LeafDistributions& l) {
      auto h = Hierarchy::from_root(pcafe::testing::random_tree(gen, gen.index(2, 4), 6));
      for (const auto* n : h.internal_nodes())
        w.insert_or_assign(n->id, WeightVector::normalized(gen.positive_vector(n->children.size())));
      for (const auto* x : h.leaves()) l.insert_or_assign(x->id, gen.distribution(v.size()));
      return h;
    };
    for (int t = 0; t < 500; ++t) {
      NodeWeights w;
      LeafDistributions l;
      const auto h = random_case(w, l);
      c.require(h.depth() <= 4, "depth");
      const auto before = evaluate_hierarchy(h, w, l, v);
      for (const auto& [id, r] : before) {
        double s = 0;
        for (double x : r.b.values()) s += x;
        c.require(std::abs(s - 1.0) <= 1e-12, id + " sums to " + num(s));
        c.require(r.score >= v.worst_score() && r.score <= v.best_score(), id + " score " + num(r.score));
      }
      const auto leaves = h.leaves();
      const auto* leaf = leaves[gen.index(0, leaves.size() - 1)];
      auto z = l.at(leaf->id).values();
      const std::size_t from = gen.index(1, z.size() - 1), to = gen.index(0, from - 1);
      const double amount = z[from] * gen.uniform(0.0, 1.0);
      z[from] -= amount;
      z[to] += amount;
      l.insert_or_assign(leaf->id, GradeDistribution(z));
      const auto after = evaluate_hierarchy(h, w, l, v);
      for (const auto* n = h.find(leaf->id); n; n = h.parent_of(n->id))
        c.require(after.at(n->id).score >= before.at(n->id).score - 1e-9, "monotonicity at " + n->id);
    }
  });

  criterion("end-to-end-oracle", [](Check& c) {
    const auto expected = json::parse(read_text_file(fixture("pcafe_fuzzy_10.expected.json")));
    std::ostringstream o1, o2, e;
    c.require(cli::run({"--json", "evaluate", fixture("pcafe_fuzzy_10.json")}, o1, e) == 0, e.str());
    c.require(cli::run({"--json", "evaluate", fixture("pcafe_fuzzy_10.json")}, o2, e) == 0, e.str());
    const double got = json::parse(o1.str())["root"]["score"].get<double>();
    const double want = expected["root_score"].get<double>();
    c.require(std::abs(got - want) <= 1e-9, "root " + num(got) + " vs oracle " + num(want));
    c.require(o1.str() == o2.str(), "report differs between runs");
  });

  criterion("cli-service-equivalence", [](Check& c) {
    const auto s = load_session(fixture("pcafe_fuzzy_10.json"));
    SessionStore store;
    json req{{"session_id", s.session_id}, {"hierarchy", to_json(s.hierarchy)}, {"scale", "fuzzy_01_09"},
             {"evaluation_set", to_json(s.evaluation_set)}, {"environment", to_json(*s.environment)},
             {"experts", json::array()}};
    for (const auto& e : s.experts) req["experts"].push_back(e.expert_id);
    httplib::Server server;
    mount_routes(server, store);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/sessions", req.dump(), "application/json");
    c.require(created && created->status == 201, "create failed");
    const std::string id = created ? json::parse(created->body).value("session_id", "") : "";
    for (const auto& e : s.experts) {
      for (const auto& [node, pairs] : e.judgments)
        for (const auto& p : pairs) {
          auto r = client.Put("/sessions/" + id + "/experts/" + e.expert_id + "/judgments/" + node,
                              json{{"i", p.i}, {"j", p.j}, {"value", p.value}}.dump(), "application/json");
          c.require(r && r->status == 200, "judgment upload failed");
        }
      for (const auto& [leaf, grade] : e.ratings) {
        auto r = client.Put("/sessions/" + id + "/experts/" + e.expert_id + "/ratings/" + leaf,
                            json{{"grade", grade}}.dump(), "application/json");
        c.require(r && r->status == 200, "rating upload failed");
      }
    }
    const auto live = client.Get("/sessions/" + id + "/results");
    const auto exported = client.Get("/sessions/" + id + "/export");
    server.stop();
    th.join();
    c.require(live && live->status == 200 && exported && exported->status == 200, "results/export failed");
    if (!c.ok) return;
    const auto path = std::filesystem::temp_directory_path() / ("pcafe_accept_" + std::to_string(::getpid()) + ".json");
    {
      std::ofstream f(path);
      f << exported->body;
    }
    std::ostringstream out, err;
    const int rc = cli::run({"--json", "evaluate", path.string()}, out, err);
    std::filesystem::remove(path);
    c.require(rc == 0, "cli evaluate failed: " + err.str());
    c.require(json::parse(out.str()) == json::parse(live->body), "reports differ");
  });

  criterion("environment-validator", [](Check& c) {
    const EnvironmentMetadata ok{55, 20, 45.0, 70.0, 2, 1, 60};
    c.require(validate_environment(ok).empty(), "compliant set warned");
    auto snr = ok;
    snr.snr_db = 12;
    const auto ws = validate_environment(snr);
    c.require(ws.size() == 1 && ws[0].field == "snr_db", "snr 12 did not give exactly one snr warning");
    auto mic = ok;
    mic.mic_distance_overhead_cm = 70;
    const auto wm = validate_environment(mic);
    c.require(wm.size() == 1 && wm[0].field == "mic_distance_overhead_cm",
              "overhead 70 cm did not give exactly one distance warning");
  });

  std::printf("%d failed\n", failures);
  return failures;
}
