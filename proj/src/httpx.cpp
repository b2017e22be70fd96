#include "carol/httpx.hpp"

#include <httplib.h>

namespace carol {

EndpointParts split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint is not a URL: " + endpoint);
    }
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint scheme must be http or https: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

HttpResponse http_post_json(const std::string& endpoint,
                            const std::string& json_body,
                            const std::string& bearer_token,
                            int timeout_sec) {
    const EndpointParts parts = split_endpoint(endpoint);
    httplib::Client client(parts.base);
    client.set_connection_timeout(timeout_sec, 0);
    client.set_read_timeout(timeout_sec, 0);
    client.set_write_timeout(timeout_sec, 0);

    httplib::Headers headers;
    if (!bearer_token.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token);
    }

    auto result = client.Post(parts.path, headers, json_body, "application/json");
    if (!result) {
        throw ProviderError("provider unreachable at " + endpoint + " (" +
                            httplib::to_string(result.error()) + ")");
    }
    return {result->status, result->body};
}

}  // namespace carol
