// Minimal JSON-over-HTTP transport for the external providers (embeddings
// and chat completions). Wraps the vendored cpp-httplib client; all failures
// surface as ProviderError so the CLI can map them to one exit code.

#pragma once

#include "carol/types.hpp"

#include <string>

namespace carol {

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Splits "http://host:port/some/path" into {"http://host:port", "/some/path"}.
// Throws ConfigError on anything that is not an http(s) URL.
struct EndpointParts {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading '/', "/" when the URL has no path
};
EndpointParts split_endpoint(const std::string& endpoint);

// POSTs `json_body` (content type application/json) to `endpoint`, attaching
// "Authorization: Bearer <token>" when `bearer_token` is nonempty. Transport
// failures (refused connection, timeout) throw ProviderError with status 0;
// HTTP errors are returned to the caller, who decides whether the status is
// acceptable.
HttpResponse http_post_json(const std::string& endpoint,
                            const std::string& json_body,
                            const std::string& bearer_token = "",
                            int timeout_sec = 30);

}  // namespace carol
