#pragma once

#include <httplib.h>

#include "yardtwin/service.hpp"

namespace yardtwin::service {

inline Request to_request(const httplib::Request& req) {
  Request out{req.method, req.path, {}, req.body};
  for (const auto& [key, value] : req.params) out.params.emplace(key, value);
  return out;
}

/// Routes every GET and POST on `server` through `svc`.
inline void mount(httplib::Server& server, const Service& svc) {
  auto handler = [&svc](const httplib::Request& req, httplib::Response& res) {
    const Response r = svc.handle(to_request(req));
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(R"(/.*)", handler);
  server.Post(R"(/.*)", handler);
}

}  // namespace yardtwin::service
