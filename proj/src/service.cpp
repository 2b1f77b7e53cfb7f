#include "ratbench/service.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include "httplib.h"
#include "ratbench/campaign.hpp"
#include "ratbench/policy.hpp"
#include "ratbench/record_io.hpp"

namespace ratbench {

namespace {

using Params = std::multimap<std::string, std::string>;

std::optional<std::string> param(const Params& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw Error(ErrorCode::ParseError, "query parameter '" + key + "' is not a number: " + text);
  return value;
}

// GCC 11 lacks floating-point from_chars.
double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw Error(ErrorCode::ParseError, "query parameter '" + key + "' is not a number: " + text);
  return v;
}

bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::ParseError, "query parameter '" + key + "' is not a boolean: " + text);
}

ApiResponse json_response(const nlohmann::json& j, int status = 200) {
  return {status, "application/json", j.dump()};
}

std::uint64_t seed_from_json(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) return parse_number<std::uint64_t>("seed", j.get<std::string>());
  throw Error(ErrorCode::ParseError, "seed must be a non-negative integer");
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ValidationError:
    case ErrorCode::NoFeasibleTechnology:
    case ErrorCode::Underdetermined: return 422;
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

ApiResponse error_response(const Error& e) {
  nlohmann::json j{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* r = dynamic_cast<const RecordRejected*>(&e))
    j["detail"] = std::string(to_string(r->detail()));
  return json_response(j, http_status(e.code()));
}

FilterExpr filter_from_params(const Params& p) {
  FilterExpr f;
  if (auto v = param(p, "tech")) f.technology = parse_technology(*v);
  if (auto v = param(p, "scenario")) f.scenario = parse_scenario(*v);
  if (auto v = param(p, "delivered")) f.delivered = parse_flag("delivered", *v);
  if (auto v = param(p, "from")) f.from_ms = parse_number<std::int64_t>("from", *v);
  if (auto v = param(p, "to")) f.to_ms = parse_number<std::int64_t>("to", *v);
  if (auto v = param(p, "min_payload")) f.min_payload = parse_number<int>("min_payload", *v);
  if (auto v = param(p, "max_payload")) f.max_payload = parse_number<int>("max_payload", *v);
  if (auto v = param(p, "min_speed")) f.min_speed = parse_double("min_speed", *v);
  if (auto v = param(p, "max_speed")) f.max_speed = parse_double("max_speed", *v);
  f.validate();
  return f;
}

ApiResponse Api::handle(const ApiRequest& req) const {
  try {
    const std::string& path = req.path;
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto route = [&](bool method_ok) -> std::optional<ApiResponse> {
      if (method_ok) return std::nullopt;
      return json_response({{"code", "MethodNotAllowed"},
                            {"message", req.method + " not allowed on " + path}},
                           405);
    };

    if (path == "/v1/health") {
      if (auto r = route(get)) return *r;
      return json_response({{"status", "ok"}, {"records", store_.size()}});
    }
    if (path == "/v1/records") {
      if (auto r = route(get || post)) return *r;
      return post ? post_records(req) : get_records(req);
    }
    constexpr std::string_view kRecordPrefix = "/v1/records/";
    if (path.size() > kRecordPrefix.size() && path.compare(0, kRecordPrefix.size(), kRecordPrefix) == 0) {
      if (auto r = route(get)) return *r;
      return get_record(path.substr(kRecordPrefix.size()));
    }
    if (path == "/v1/aggregate") {
      if (auto r = route(get)) return *r;
      return get_aggregate(req);
    }
    if (path == "/v1/series") {
      if (auto r = route(get)) return *r;
      return get_series(req);
    }
    if (path == "/v1/whatif") {
      if (auto r = route(post)) return *r;
      return post_whatif(req);
    }
    return json_response({{"code", "NotFound"}, {"message", "no route " + path}}, 404);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const nlohmann::json::exception& e) {
    return error_response(Error(ErrorCode::ParseError, e.what()));
  } catch (const std::exception& e) {
    return json_response({{"code", "Internal"}, {"message", e.what()}}, 500);
  }
}

ApiResponse Api::post_records(const ApiRequest& req) const {
  const auto results = store_.ingest_batch(req.body);
  nlohmann::json ids = nlohmann::json::array();
  int inserted = 0;
  for (const auto& r : results) {
    ids.push_back(r.record_id);
    if (r.inserted) ++inserted;
  }
  return json_response({{"ids", ids}, {"inserted", inserted}}, inserted > 0 ? 201 : 200);
}

ApiResponse Api::get_records(const ApiRequest& req) const {
  std::ostringstream out;
  write_jsonl(out, store_.query(filter_from_params(req.params)));
  return {200, "application/x-ndjson", out.str()};
}

ApiResponse Api::get_record(const std::string& id) const {
  const auto r = store_.find(id);
  if (!r) throw Error(ErrorCode::NotFound, "no record '" + id + "'");
  return json_response(to_json(*r));
}

ApiResponse Api::get_aggregate(const ApiRequest& req) const {
  const auto& p = req.params;
  const auto group = param(p, "group").value_or("table");
  auto filter = filter_from_params(p);
  if (group == "table") {
    AggregateOptions opts;
    if (auto v = param(p, "min_samples")) opts.min_samples = parse_number<int>("min_samples", *v);
    if (auto v = param(p, "delivered_only")) opts.delivered_only = parse_flag("delivered_only", *v);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : aggregate_table(store_, filter, opts)) cells.push_back(to_json(c));
    return json_response(cells);
  }
  if (group == "speed") {
    const auto bucket = parse_payload_bucket(param(p, "bucket").value_or("1-12"));
    std::vector<Technology> techs(kAllTechnologies.begin(), kAllTechnologies.end());
    if (filter.technology) techs = {*filter.technology};
    filter.technology.reset();
    const auto records = store_.query(filter);
    nlohmann::json out = nlohmann::json::object();
    for (auto t : techs) {
      nlohmann::json series = nlohmann::json::array();
      for (const auto& pt : speed_series(records, t, bucket)) series.push_back(to_json(pt));
      out[std::string(to_string(t))] = series;
    }
    return json_response(out);
  }
  throw Error(ErrorCode::UnknownField, "group must be table or speed, got '" + group + "'");
}

ApiResponse Api::get_series(const ApiRequest& req) const {
  const auto x = param(req.params, "x");
  const auto y = param(req.params, "y");
  if (!x || !y) throw Error(ErrorCode::ParseError, "series needs x and y");
  const auto filter = filter_from_params(req.params);
  return json_response(to_json(export_series(store_.query(filter), *x, *y)));
}

ApiResponse Api::post_whatif(const ApiRequest& req) const {
  const auto body = nlohmann::json::parse(req.body);
  for (const char* key : {"workload", "policy_a", "policy_b"})
    if (!body.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing '") + key + "'");
  const auto workload = workload_from_json(body.at("workload"));
  const auto a = policy_from_json(body.at("policy_a"));
  const auto b = policy_from_json(body.at("policy_b"));
  const std::uint64_t seed = body.contains("seed") ? seed_from_json(body.at("seed")) : 0;
  const auto c = compare_policies(workload, a, b, models_, seed);
  return json_response({{"summary_a", to_json(c.a)},
                        {"summary_b", to_json(c.b)},
                        {"savings_factor", c.savings_factor},
                        {"seed", seed}});
}

std::pair<std::string, int> parse_listen_address(std::string_view addr) {
  std::string host = "127.0.0.1";
  std::string port_text(addr);
  if (const auto colon = addr.rfind(':'); colon != std::string_view::npos) {
    host = std::string(addr.substr(0, colon));
    port_text = std::string(addr.substr(colon + 1));
  }
  int port = 0;
  const auto* end = port_text.data() + port_text.size();
  const auto [ptr, ec] = std::from_chars(port_text.data(), end, port);
  if (host.empty() || ec != std::errc{} || ptr != end || port < 0 || port > 65535)
    throw Error(ErrorCode::ConfigInvalid, "bad listen address '" + std::string(addr) + "'");
  return {host, port};
}

void serve(std::string_view addr, const std::string& data_dir, const Models& models) {
  const auto [host, port] = parse_listen_address(addr);
  std::filesystem::create_directories(data_dir);
  RecordStore store((std::filesystem::path(data_dir) / "records.jsonl").string());
  const Api api(store, models);

  httplib::Server server;
  auto dispatch = [&api](const httplib::Request& req, httplib::Response& res) {
    const auto out = api.handle({req.method, req.path, req.params, req.body});
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.Put(".*", dispatch);
  server.Delete(".*", dispatch);
  if (!server.listen(host, port))
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace ratbench
