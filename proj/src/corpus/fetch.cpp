// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "corerev/corpus/fetch.hpp"

#include <fmt/core.h>
#include <httplib.h>
#include <json.hpp>

#include "corerev/error.hpp"

namespace corerev::corpus {

namespace {

using nlohmann::json;

json parse_payload(const std::string& body, const char* what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("invalid {} payload: {}", what, e.what()));
  }
}

std::string login_of(const json& object) {
  auto user = object.find("user");
  if (user == object.end() || !user->is_object()) return {};
  auto login = user->find("login");
  return login != user->end() && login->is_string() ? login->get<std::string>()
                                                    : std::string{};
}

std::string get_body(httplib::Client& client, const std::string& path) {
  auto res = client.Get(path);
  if (!res) {
    throw RetriableError(
        fmt::format("GET {} failed: {}", path, httplib::to_string(res.error())));
  }
  if (res->status == 429 || res->status >= 500) {
    throw RetriableError(fmt::format("GET {} returned HTTP {}", path, res->status));
  }
  if (res->status != 200) {
    throw DataError(fmt::format("GET {} returned HTTP {}", path, res->status));
  }
  return res->body;
}

}  // namespace

std::vector<RawPair> parse_pull_comments(
    const std::string& repo, int pr_number, const std::string& pull_json,
    const std::vector<std::string>& comment_pages) {
  json pull = parse_payload(pull_json, "pull request");
  if (!pull.is_object()) throw DataError("pull request payload is not an object");
  std::string author = login_of(pull);

  std::vector<RawPair> pairs;
  for (const std::string& page : comment_pages) {
    json comments = parse_payload(page, "review comment");
    if (!comments.is_array()) {
      throw DataError("review comment payload is not an array");
    }
    for (const json& c : comments) {
      if (!c.is_object()) continue;
      if (!author.empty() && login_of(c) == author) continue;
      auto hunk = c.find("diff_hunk");
      auto body = c.find("body");
      if (hunk == c.end() || !hunk->is_string() || body == c.end() ||
          !body->is_string()) {
        continue;
      }
      RawPair pair;
      pair.id = fmt::format("{}#{}/{}", repo, pr_number, c.value("id", 0LL));
      pair.project = repo;
      pair.code_change = hunk->get<std::string>();
      pair.review = body->get<std::string>();
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::vector<RawPair> fetch_pull_comments(const std::string& repo, int pr_number,
                                         const FetchOptions& options) {
  httplib::Client client(options.base_url);
  client.set_connection_timeout(options.timeout_seconds);
  client.set_read_timeout(options.timeout_seconds);
  httplib::Headers headers = {{"Accept", "application/vnd.github+json"}};
  if (!options.token.empty()) {
    headers.emplace("Authorization", "Bearer " + options.token);
  }
  client.set_default_headers(headers);

  std::string base = fmt::format("/repos/{}/pulls/{}", repo, pr_number);
  std::string pull = get_body(client, base);
  std::vector<std::string> pages;
  for (int page = 1;; ++page) {
    std::string body = get_body(
        client, fmt::format("{}/comments?per_page={}&page={}", base,
                            options.per_page, page));
    json parsed = parse_payload(body, "review comment");
    std::size_t count = parsed.is_array() ? parsed.size() : 0;
    pages.push_back(std::move(body));
    if (count < static_cast<std::size_t>(options.per_page)) break;
  }
  return parse_pull_comments(repo, pr_number, pull, pages);
}

}  // namespace corerev::corpus
