// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "corerev/corpus/dataset.hpp"

namespace corerev::corpus {

struct FetchOptions {
  // Scheme + host of the REST API; tests point this at a local server.
  std::string base_url = "https://api.github.com";
  std::string token;  // optional bearer token
  int timeout_seconds = 30;
  int per_page = 100;
};

// Builds RawPairs from a pull-request payload and its review-comment payload
// (the JSON bodies of GET /repos/{repo}/pulls/{n} and
// GET /repos/{repo}/pulls/{n}/comments). Comments written by the
// pull-request author are dropped, as are comments without a diff hunk.
std::vector<RawPair> parse_pull_comments(const std::string& repo, int pr_number,
                                         const std::string& pull_json,
                                         const std::vector<std::string>& comment_pages);

// Fetches one pull request's review comments. Connection failures, HTTP 429
// and 5xx raise RetriableError; other non-200 statuses raise DataError.
std::vector<RawPair> fetch_pull_comments(const std::string& repo, int pr_number,
                                         const FetchOptions& options = {});

}  // namespace corerev::corpus
