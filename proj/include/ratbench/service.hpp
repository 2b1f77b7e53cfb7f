#pragma once

// HTTP surface of the record store. Routing lives in Api::handle, which works
// on plain request/response values so it can be exercised without sockets;
// serve() binds it to a listening server.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "ratbench/error.hpp"
#include "ratbench/ingest.hpp"
#include "ratbench/models.hpp"

namespace ratbench {

struct ApiRequest {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// HTTP status an error code maps to.
int http_status(ErrorCode code);

/// {"code", "message"} plus "detail" for rejected records.
ApiResponse error_response(const Error& e);

/// Routes:
///   POST /v1/records           one object, an array, or JSON Lines → {"ids", "inserted"}
///   GET  /v1/records           filters tech, scenario, delivered, from, to,
///                              min_payload, max_payload, min_speed, max_speed → JSON Lines
///   GET  /v1/records/{id}      one record
///   GET  /v1/aggregate         group=table (default) or speed, plus the record
///                              filters; min_samples, delivered_only; for speed
///                              tech (all when absent) and bucket (default 1-12)
///   GET  /v1/series            x, y plus the record filters
///   POST /v1/whatif            {workload, policy_a, policy_b, seed}
///   GET  /v1/health
class Api {
 public:
  Api(RecordStore& store, const Models& models) : store_(store), models_(models) {}

  /// Never throws; failures become error responses.
  ApiResponse handle(const ApiRequest& req) const;

 private:
  ApiResponse post_records(const ApiRequest& req) const;
  ApiResponse get_records(const ApiRequest& req) const;
  ApiResponse get_record(const std::string& id) const;
  ApiResponse get_aggregate(const ApiRequest& req) const;
  ApiResponse get_series(const ApiRequest& req) const;
  ApiResponse post_whatif(const ApiRequest& req) const;

  RecordStore& store_;
  const Models& models_;
};

/// Parses the record filters of a query string. Throws ParseError on
/// malformed numbers and OutOfRange on inverted ranges.
FilterExpr filter_from_params(const std::multimap<std::string, std::string>& params);

/// "host:port"; a bare port binds to 127.0.0.1. Throws ConfigInvalid.
std::pair<std::string, int> parse_listen_address(std::string_view addr);

/// Opens <data_dir>/records.jsonl and serves until the process is stopped.
/// Throws Io when the address cannot be bound.
void serve(std::string_view addr, const std::string& data_dir, const Models& models);

}  // namespace ratbench
