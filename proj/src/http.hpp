#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace adaptchunk::http {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

Url split_url(const std::string& url);

using Headers = std::vector<std::pair<std::string, std::string>>;

// Throws TransportError on connection failures, non-2xx statuses and
// non-JSON bodies.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const Headers& headers,
                         std::chrono::seconds timeout);
nlohmann::json get_json(const std::string& url, std::chrono::seconds timeout);

}  // namespace adaptchunk::http
