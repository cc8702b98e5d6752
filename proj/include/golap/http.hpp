#pragma once

#include "golap/service.hpp"

#include <httplib.h>

namespace golap {

/// Registers the service endpoints on `server`:
///   GET  /schema
///   POST /sessions
///   GET  /sessions/{id}
///   POST /sessions/{id}/ops        body {"text": "..."}
///   POST /sessions/{id}/undo
///   GET  /sessions/{id}/tm/{name}
///   GET  /sessions/{id}/transcript
void mount_routes(httplib::Server& server, Service& service);

} // namespace golap
