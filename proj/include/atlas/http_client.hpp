#pragma once

#include <memory>
#include <string>

#include <httplib.h>

#include "atlas/eutils.hpp"

namespace atlas {

// HttpGetFn bound to a base URL ("http://host:port" or "https://host").
// httplib needs OpenSSL support compiled in for https targets.
inline HttpGetFn make_http_get(const std::string& base_url) {
    auto client = std::make_shared<httplib::Client>(base_url);
    client->set_connection_timeout(10, 0);
    client->set_read_timeout(30, 0);
    return [client](const std::string& path_and_query) {
        HttpResponse out;
        auto res = client->Get(path_and_query);
        if (!res) {
            out.transport_ok = false;
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.transport_ok = true;
        out.status = res->status;
        out.body = res->body;
        return out;
    };
}

}  // namespace atlas
