#include "htmlphish/fetch.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "htmlphish/text.hpp"

namespace htmlphish::corpus {
namespace {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string target;  // path + query, always starts with '/'

  std::string origin() const {
    const bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
    return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
  }
  std::string str() const { return origin() + target; }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Url parse_url(const std::string& raw) {
  const auto fail = [&] { return FetchError(FetchError::Kind::InvalidUrl, "invalid url: " + raw); };
  const auto sep = raw.find("://");
  if (sep == std::string::npos) throw fail();
  Url u;
  u.scheme = lower(raw.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https") throw fail();
  const auto rest = raw.substr(sep + 3);
  const auto path_start = rest.find_first_of("/?#");
  std::string authority = rest.substr(0, path_start);
  u.target = path_start == std::string::npos ? "/" : rest.substr(path_start);
  if (auto hash = u.target.find('#'); hash != std::string::npos) u.target.erase(hash);
  if (u.target.empty() || u.target[0] != '/') u.target.insert(0, "/");
  if (auto at = authority.rfind('@'); at != std::string::npos) authority.erase(0, at + 1);
  u.port = u.scheme == "https" ? 443 : 80;
  if (!authority.empty() && authority[0] == '[') {
    const auto close = authority.find(']');
    if (close == std::string::npos) throw fail();
    u.host = authority.substr(1, close - 1);
    authority.erase(0, close + 1);
    if (!authority.empty()) {
      if (authority[0] != ':') throw fail();
      authority.erase(0, 1);
      if (!authority.empty()) u.port = std::atoi(authority.c_str());
    }
  } else if (auto colon = authority.rfind(':'); colon != std::string::npos) {
    u.host = authority.substr(0, colon);
    const auto port = authority.substr(colon + 1);
    if (!port.empty()) {
      if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw fail();
      }
      u.port = std::atoi(port.c_str());
    }
  } else {
    u.host = authority;
  }
  if (u.host.empty() || u.port <= 0 || u.port > 65535) throw fail();
  return u;
}

Url resolve(const Url& base, const std::string& location) {
  if (location.find("://") != std::string::npos) return parse_url(location);
  if (location.rfind("//", 0) == 0) return parse_url(base.scheme + ":" + location);
  Url out = base;
  if (!location.empty() && location[0] == '/') {
    out.target = location;
  } else {
    std::string dir = base.target.substr(0, base.target.find('?'));
    dir.erase(dir.rfind('/') + 1);
    out.target = dir + location;
  }
  return out;
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

bool bypass_proxy(const std::string& host) {
  const char* raw = env("no_proxy");
  if (!raw) raw = env("NO_PROXY");
  if (!raw) return false;
  const std::string h = lower(host);
  std::string list = raw;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    std::string entry = lower(list.substr(start, end - start));
    entry.erase(0, entry.find_first_not_of(' '));
    entry.erase(entry.find_last_not_of(' ') + 1);
    if (entry == "*") return true;
    if (!entry.empty() && entry[0] == '.') entry.erase(0, 1);
    if (!entry.empty() &&
        (h == entry || (h.size() > entry.size() && h.ends_with("." + entry)))) {
      return true;
    }
    start = end + 1;
  }
  return false;
}

std::optional<Url> proxy_for(const Url& u) {
  if (bypass_proxy(u.host)) return std::nullopt;
  const char* raw = u.scheme == "https" ? env("https_proxy") : env("http_proxy");
  if (!raw) raw = u.scheme == "https" ? env("HTTPS_PROXY") : env("HTTP_PROXY");
  if (!raw) return std::nullopt;
  std::string spec = raw;
  if (spec.find("://") == std::string::npos) spec = "http://" + spec;
  return parse_url(spec);
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace

std::string FetchResult::text() const { return text::sanitize_utf8(bytes); }

FetchResult fetch_html(const std::string& url, const FetchLimits& limits) {
  Url current = parse_url(url);
  FetchResult result;
  const auto timeout_us =
      std::chrono::duration_cast<std::chrono::microseconds>(limits.timeout).count();

  for (;;) {
    httplib::Client client(current.origin());
    const auto secs = static_cast<time_t>(timeout_us / 1'000'000);
    const auto usecs = static_cast<time_t>(timeout_us % 1'000'000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_follow_location(false);
    client.set_decompress(true);
    if (auto proxy = proxy_for(current)) client.set_proxy(proxy->host, proxy->port);

    std::string body;
    bool too_large = false;
    int status = 0;
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Get(
        current.target, httplib::Headers{},
        [&](const httplib::Response& r) {
          status = r.status;
          return true;
        },
        [&](const char* data, std::size_t len) {
          if (is_redirect(status)) return true;
          if (body.size() + len > limits.max_bytes) {
            too_large = true;
            return false;
          }
          body.append(data, len);
          return true;
        });

    if (too_large) {
      throw FetchError(FetchError::Kind::TooLarge,
                       current.str() + ": body exceeds " + std::to_string(limits.max_bytes) +
                           " bytes");
    }
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - started;
      const bool timed_out =
          err == httplib::Error::ConnectionTimeout ||
          (err == httplib::Error::Read && elapsed >= limits.timeout * 9 / 10);
      throw FetchError(timed_out ? FetchError::Kind::Timeout : FetchError::Kind::Network,
                       current.str() + ": " + httplib::to_string(err));
    }

    status = res->status;
    if (is_redirect(status)) {
      if (result.redirects >= limits.max_redirects) {
        throw FetchError(FetchError::Kind::TooManyRedirects,
                         url + ": more than " + std::to_string(limits.max_redirects) +
                             " redirects");
      }
      const auto location = res->get_header_value("Location");
      if (location.empty()) {
        throw FetchError(FetchError::Kind::HttpStatus,
                         current.str() + ": redirect without Location header", status);
      }
      current = resolve(current, location);
      ++result.redirects;
      continue;
    }
    if (status < 200 || status > 299) {
      throw FetchError(FetchError::Kind::HttpStatus,
                       current.str() + ": HTTP status " + std::to_string(status), status);
    }
    result.bytes = std::move(body);
    result.final_url = current.str();
    result.status = status;
    return result;
  }
}

std::vector<FetchOutcome> fetch_all(std::span<const std::string> urls, const FetchLimits& limits,
                                    std::size_t concurrency) {
  std::vector<FetchOutcome> out(urls.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < urls.size(); i = next++) {
      out[i].url = urls[i];
      try {
        out[i].result = fetch_html(urls[i], limits);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(urls.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  return out;
}

}  // namespace htmlphish::corpus
