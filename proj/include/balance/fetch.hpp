#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "balance/core_model.hpp"
#include "balance/ingest.hpp"

namespace balance {

struct FetchOptions {
  std::optional<std::string> era_filter;  // era label; other eras are dropped client-side
  std::size_t page_size = 100;            // [1, 1000]
  std::optional<std::string> bearer_token;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds max_backoff{2000};
  std::chrono::seconds timeout{30};
};

struct FetchSummary {
  std::size_t pages = 0;     // pages successfully received
  std::size_t requests = 0;  // HTTP requests issued, retries included
  std::size_t yielded = 0;
  std::size_t filtered = 0;  // valid logs outside era_filter
  std::vector<Rejection> skipped;
};

// Pulls GET {endpoint}?page=N&page_size=K for N = 1, 2, ... and hands each
// valid log to `sink` in server order. Stops after the first page holding
// fewer than page_size items. Items failing validation are skipped and
// recorded in the summary.
//
// Transport failures and 5xx responses are retried with capped exponential
// backoff up to max_attempts, then NetworkError. 401/403 raise AuthError
// without retrying. Only plain http:// endpoints are supported.
FetchSummary fetch_paginated(std::string_view endpoint, const FetchOptions& options,
                             const std::function<void(CombatLog&&)>& sink);

}  // namespace balance
