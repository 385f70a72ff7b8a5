#include "http.hpp"

#include <httplib.h>

#include "adaptchunk/error.hpp"

namespace adaptchunk::http {

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("URL must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

nlohmann::json finish(const httplib::Result& res, const std::string& url) {
  if (!res) throw TransportError(url + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError(url + ": HTTP " + std::to_string(res->status) + " " + res->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransportError(url + ": response is not JSON: " + e.what());
  }
}

httplib::Client make_client(const Url& u, std::chrono::seconds timeout) {
  httplib::Client cli(u.origin);
  cli.set_connection_timeout(std::chrono::seconds(10));
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body, const Headers& headers,
                         std::chrono::seconds timeout) {
  const Url u = split_url(url);
  auto cli = make_client(u, timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return finish(cli.Post(u.path, h, body.dump(), "application/json"), url);
}

nlohmann::json get_json(const std::string& url, std::chrono::seconds timeout) {
  const Url u = split_url(url);
  auto cli = make_client(u, timeout);
  return finish(cli.Get(u.path), url);
}

}  // namespace adaptchunk::http
