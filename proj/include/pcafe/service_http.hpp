#pragma once

#include <charconv>
#include <functional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "pcafe/error.hpp"
#include "pcafe/pipeline.hpp"
#include "pcafe/service.hpp"

namespace pcafe {

inline constexpr int kDefaultPort = 8341;

inline int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::UnknownExpert:
    case Errc::UnknownNode:
      return 404;
    case Errc::IncompleteJudgments:
    case Errc::MissingRating:
    case Errc::MissingPair:
      return 409;
    case Errc::Io:
      return 500;
    default:
      return 400;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

inline void send_error(httplib::Response& res, Errc code, const std::string& detail, json extra = nullptr) {
  json body{{"error", std::string(to_string(code))}, {"detail", detail}};
  if (!extra.is_null()) body["gaps"] = std::move(extra);
  send_json(res, http_status(code), body);
}

// Runs a handler, translating engine errors into {"error","detail"} bodies.
inline httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const IncompleteError& e) {
      json gaps = json::array();
      for (const auto& g : e.gaps()) gaps.push_back(to_json(g));
      send_error(res, e.code(), e.detail(), std::move(gaps));
    } catch (const Error& e) {
      send_error(res, e.code(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, Errc::Malformed, e.what());
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", "Internal"}, {"detail", e.what()}}.dump(2) + "\n", "application/json");
    }
  };
}

inline json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Malformed, e.what());
  }
}

inline std::size_t body_index(const json& body, const char* key) {
  PCAFE_REQUIRE(body.is_object() && body.contains(key) && body.at(key).is_number_integer() &&
                    body.at(key).get<std::int64_t>() >= 0,
                Errc::SchemaViolation, std::string("body field '") + key + "' must be a nonnegative integer");
  return body.at(key).get<std::size_t>();
}

inline PipelineOptions options_from_query(const httplib::Request& req) {
  PipelineOptions opt;
  if (req.has_param("method") && !req.get_param_value("method").empty()) {
    auto m = parse_weight_method(req.get_param_value("method"));
    PCAFE_REQUIRE(m.has_value(), Errc::InvalidArgument, "method must be geometric or linear");
    opt.method = *m;
  }
  if (req.has_param("theta") && !req.get_param_value("theta").empty()) {
    const std::string t = req.get_param_value("theta");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    PCAFE_REQUIRE(ec == std::errc() && ptr == t.data() + t.size(), Errc::InvalidArgument, "theta is not a number");
    opt.theta = v;
  }
  return opt;
}

}  // namespace detail

// Registers the session API on `server`. The store must outlive the server.
inline void mount_routes(httplib::Server& server, SessionStore& store, RiTable ri_table = {}) {
  using detail::guarded;
  using detail::send_json;

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
                const auto id = store.create(create_request_from_json(detail::parse_body(req)));
                send_json(res, 201, json{{"session_id", id}, {"revision", 0}});
              }));

  server.Get(R"(/sessions/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, store.describe(req.matches[1]));
             }));

  server.Put(R"(/sessions/([^/]+)/experts/([^/]+)/judgments/([^/]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const json body = detail::parse_body(req);
               PCAFE_REQUIRE(body.is_object() && body.contains("value") && body.at("value").is_number(),
                             Errc::SchemaViolation, "body field 'value' must be a number");
               detail::reject_unknown_fields(body, {"i", "j", "value"}, "judgment");
               auto [rev, snap] = store.record_judgment(req.matches[1], req.matches[2], req.matches[3],
                                                        detail::body_index(body, "i"), detail::body_index(body, "j"),
                                                        body.at("value").get<double>());
               send_json(res, 200, json{{"revision", rev}, {"consistency", std::move(snap)}});
             }));

  server.Put(R"(/sessions/([^/]+)/experts/([^/]+)/ratings/([^/]+))",
             guarded([&store](const httplib::Request& req, httplib::Response& res) {
               const json body = detail::parse_body(req);
               detail::reject_unknown_fields(body, {"grade"}, "rating");
               const auto rev = store.record_rating(req.matches[1], req.matches[2], req.matches[3],
                                                    detail::body_index(body, "grade"));
               send_json(res, 200, json{{"revision", rev}});
             }));

  server.Get(R"(/sessions/([^/]+)/consistency)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               PCAFE_REQUIRE(req.has_param("expert") && req.has_param("node"), Errc::InvalidArgument,
                             "query parameters 'expert' and 'node' are required");
               send_json(res, 200,
                         store.consistency(req.matches[1], req.get_param_value("expert"), req.get_param_value("node")));
             }));

  server.Get(R"(/sessions/([^/]+)/results)",
             guarded([&store, ri_table](const httplib::Request& req, httplib::Response& res) {
               PipelineOptions opt = detail::options_from_query(req);
               opt.ri_table = ri_table;
               const json report = store.results(req.matches[1], opt);
               res.status = 200;
               res.set_content(report_text(report), "application/json");
             }));

  server.Get(R"(/sessions/([^/]+)/export)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
               res.status = 200;
               res.set_content(store.export_session(req.matches[1]).dump(2) + "\n", "application/json");
             }));
}

}  // namespace pcafe
