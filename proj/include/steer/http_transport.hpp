#pragma once

#if defined(STEER_WITH_OPENSSL) && !defined(CPPHTTPLIB_OPENSSL_SUPPORT)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <cstdlib>
#include <string>

// Eigen before httplib: <resolv.h> defines a _res macro that breaks Eigen.
#include "steer/error.hpp"
#include "steer/llmrun.hpp"

#include "httplib.h"

namespace steer {

/// Chat-completions endpoint over HTTP(S). The URL may be a base such as
/// "http://host:8000/v1" or the full ".../chat/completions" path.
class HttpTransport : public ChatTransport {
 public:
  HttpTransport(const std::string& url, std::string api_key, int timeout_seconds = 600)
      : api_key_(std::move(api_key)) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::invalid_argument, "endpoint needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    constexpr std::string_view suffix = "/chat/completions";
    if (path_.size() < suffix.size() || path_.compare(path_.size() - suffix.size(), suffix.size(), suffix) != 0) {
      path_ += suffix;
    }
    timeout_seconds_ = timeout_seconds;
  }

  /// Endpoint whose key comes from an environment variable (empty if unset).
  static HttpTransport from_env(const std::string& url, const std::string& key_var = "OPENAI_API_KEY") {
    const char* key = std::getenv(key_var.c_str());
    return HttpTransport(url, key ? key : "");
  }

  HttpReply post_chat(const nlohmann::json& request) override {
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    // one client per call: httplib serializes requests on a shared client
    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(timeout_seconds_);
    client.set_write_timeout(60);
    auto res = client.Post(path_, headers, request.dump(), "application/json");
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
  }

  const std::string& path() const { return path_; }
  const std::string& origin() const { return origin_; }

 private:
  std::string api_key_;
  std::string origin_;
  std::string path_;
  int timeout_seconds_ = 600;
};

}  // namespace steer
