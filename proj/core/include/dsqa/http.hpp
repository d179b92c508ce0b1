#pragma once

#include <chrono>
#include <map>
#include <string>

namespace dsqa {

/// Default transport (cpp-httplib with TLS). Non-2xx responses and transport
/// failures throw Error(Ingest).
std::string http_get(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(20));

/// JSON POST used by live model providers. Failures throw Error(Provider).
std::string http_post_json(const std::string& url, const std::string& body,
                           const std::map<std::string, std::string>& headers,
                           std::chrono::seconds timeout = std::chrono::seconds(60));

}  // namespace dsqa
