#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "dsqa/error.hpp"
#include "dsqa/http.hpp"

namespace dsqa {

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::Config, "not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string http_get(const std::string& url, std::chrono::seconds timeout) {
  auto [origin, path] = split_url(url);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  client.set_default_headers({{"User-Agent", "dsqa/0.1"}});
  auto res = client.Get(path);
  if (!res) throw Error(ErrorCode::Ingest, "GET " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorCode::Ingest, "GET " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

std::string http_post_json(const std::string& url, const std::string& body,
                           const std::map<std::string, std::string>& headers, std::chrono::seconds timeout) {
  auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) throw Error(ErrorCode::Provider, "POST " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(ErrorCode::Provider, "POST " + url + " returned HTTP " + std::to_string(res->status), res->body);
  return res->body;
}

}  // namespace dsqa
