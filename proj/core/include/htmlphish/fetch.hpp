#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htmlphish/error.hpp"

namespace htmlphish::corpus {

struct FetchLimits {
  std::chrono::milliseconds timeout{30'000};
  std::size_t max_bytes = 5 * 1024 * 1024;
  int max_redirects = 10;
};

struct FetchResult {
  std::string bytes;      // body exactly as received
  std::string final_url;
  int status = 0;
  int redirects = 0;

  // Body decoded as UTF-8 with replacement characters.
  std::string text() const;
};

class FetchError : public Error {
 public:
  enum class Kind { InvalidUrl, Timeout, TooManyRedirects, HttpStatus, TooLarge, Network };

  FetchError(Kind kind, const std::string& what, int status = 0)
      : Error(what), kind_(kind), status_(status) {}

  Kind kind() const { return kind_; }
  // HTTP status for Kind::HttpStatus, otherwise 0.
  int status() const { return status_; }

 private:
  Kind kind_;
  int status_;
};

// GETs `url`, following up to `limits.max_redirects` redirects. Proxies come
// from http_proxy / https_proxy (and upper-case forms) subject to no_proxy.
// The body is returned untouched: no script execution, no markup repair.
FetchResult fetch_html(const std::string& url, const FetchLimits& limits = {});

struct FetchOutcome {
  std::string url;
  std::optional<FetchResult> result;
  std::string error;  // set when result is empty
};

// Fetches every url with at most `concurrency` requests in flight. Output
// order matches input order.
std::vector<FetchOutcome> fetch_all(std::span<const std::string> urls,
                                    const FetchLimits& limits, std::size_t concurrency);

}  // namespace htmlphish::corpus
