#include "balance/fetch.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "balance/error.hpp"
#include "balance/log_codec.hpp"

namespace balance {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme)
    throw Error(ErrorCode::NetworkError, std::string(url), "only http:// endpoints are supported");
  auto slash = url.find('/', kScheme.size());
  Endpoint ep;
  ep.origin = std::string(url.substr(0, slash));
  ep.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (ep.origin.size() == kScheme.size()) throw Error(ErrorCode::NetworkError, std::string(url), "missing host");
  return ep;
}

}  // namespace

FetchSummary fetch_paginated(std::string_view endpoint, const FetchOptions& options,
                             const std::function<void(CombatLog&&)>& sink) {
  if (options.page_size < 1 || options.page_size > 1000)
    throw Error(ErrorCode::OutOfRange, "page_size", "must be in [1, 1000]");
  if (options.max_attempts < 1) throw Error(ErrorCode::OutOfRange, "max_attempts", "must be >= 1");

  Endpoint ep = split_endpoint(endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  httplib::Headers headers;
  if (options.bearer_token) headers.emplace("Authorization", "Bearer " + *options.bearer_token);

  FetchSummary summary;
  for (std::size_t page = 1;; ++page) {
    std::string target = ep.path + (ep.path.find('?') == std::string::npos ? "?" : "&") +
                         "page=" + std::to_string(page) + "&page_size=" + std::to_string(options.page_size);
    std::string page_label = "page " + std::to_string(page);

    std::string body;
    auto backoff = options.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      ++summary.requests;
      auto res = client.Get(target, headers);
      std::string failure;
      if (!res) {
        failure = httplib::to_string(res.error());
      } else if (res->status == 401 || res->status == 403) {
        throw Error(ErrorCode::AuthError, page_label, "HTTP " + std::to_string(res->status));
      } else if (res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
      } else if (res->status != 200) {
        throw Error(ErrorCode::NetworkError, page_label, "HTTP " + std::to_string(res->status));
      } else {
        body = std::move(res->body);
        break;
      }
      if (attempt >= options.max_attempts)
        throw Error(ErrorCode::NetworkError, page_label,
                    failure + " after " + std::to_string(attempt) + " attempts");
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options.max_backoff);
    }

    auto items = nlohmann::json::parse(body, nullptr, false);
    if (items.is_discarded() || !items.is_array())
      throw Error(ErrorCode::MalformedRecord, page_label, "page body is not a JSON array");
    ++summary.pages;

    for (std::size_t i = 0; i < items.size(); ++i) {
      CombatLog log;
      try {
        log = parse_log_line(items[i].dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
      } catch (const Error& e) {
        summary.skipped.push_back({page_label, i, e.code(), e.what()});
        continue;
      }
      if (options.era_filter && log.patch_era != *options.era_filter) {
        ++summary.filtered;
        continue;
      }
      ++summary.yielded;
      sink(std::move(log));
    }
    if (items.size() < options.page_size) break;
  }
  return summary;
}

}  // namespace balance
