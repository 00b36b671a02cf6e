// Copyright 2026 The LexForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexforge/service.h"

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"
#include "lexforge/errors.h"
#include "lexforge/llm_bridge.h"

namespace lexforge {

namespace {

using Json = nlohmann::ordered_json;

ServiceResponse JsonError(int status, const std::string &message) {
  return {status, Json{{"error", message}}.dump()};
}

Json EntryJson(const DictEntry &entry) {
  return Json{{"standard_forms", entry.standard_forms},
              {"definition", entry.definition},
              {"examples", entry.examples},
              {"source", std::string(EntrySourceName(entry.source))}};
}

}  // namespace

NormalizerService::NormalizerService(std::shared_ptr<const ModelBundle> model,
                                     std::shared_ptr<Lookup> lookup,
                                     double nsw_threshold)
    : model_(std::move(model)),
      lookup_(std::move(lookup)),
      nsw_threshold_(nsw_threshold) {
  if (!(nsw_threshold >= 0.0 && nsw_threshold <= 1.0)) {
    throw ValidationError("nsw threshold must lie in [0, 1]");
  }
}

ServiceResponse NormalizerService::DictLookup(const std::string *word) {
  if (word == nullptr) return JsonError(400, "missing query parameter: word");
  try {
    std::optional<LookupResult> result = lookup_->LookupOrFallback(*word);
    Json j;
    j["word"] = NormalizeKey(*word);
    j["found"] = result.has_value();
    j["was_fallback"] = result.has_value() && result->was_fallback;
    j["entries"] = Json::array();
    if (result) j["entries"].push_back(EntryJson(result->entry));
    return {200, j.dump()};
  } catch (const ValidationError &e) {
    return JsonError(400, e.what());
  } catch (const LlmNetworkError &e) {
    return JsonError(502, e.what());
  } catch (const LlmParseError &e) {
    return JsonError(502, e.what());
  } catch (const Error &e) {
    return JsonError(500, e.what());
  }
}

ServiceResponse NormalizerService::NormalizeText(std::string_view body) const {
  Json request = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded() || !request.is_object()) {
    return JsonError(400, "request body must be a JSON object");
  }
  auto it = request.find("sentence");
  if (it == request.end() || !it->is_string()) {
    return JsonError(400, "field \"sentence\" must be a string");
  }
  if (model_ == nullptr) {
    return JsonError(503,
                     "no model checkpoint loaded; run `lexforge train` and "
                     "restart with --checkpoint");
  }
  try {
    NormalizationResult result =
        NormalizeSentence(model_.get(), it->get<std::string>(), nsw_threshold_);
    return {200, ToJson(result).dump()};
  } catch (const Error &e) {
    return JsonError(500, e.what());
  }
}

ServiceResponse NormalizerService::Health() const {
  return {200, Json{{"status", "ok"},
                    {"dictionary_version", lookup_->store().version()}}
                   .dump()};
}

ServiceResponse NormalizerService::NotFound(std::string_view path) {
  return JsonError(404, "no such endpoint: " + std::string(path));
}

struct HttpServer::Impl {
  std::shared_ptr<NormalizerService> service;
  httplib::Server server;
};

namespace {

void Reply(const ServiceResponse &r, httplib::Response &res) {
  res.status = r.status;
  res.set_content(r.body, "application/json; charset=utf-8");
}

}  // namespace

HttpServer::HttpServer(std::shared_ptr<NormalizerService> service)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  NormalizerService *svc = impl_->service.get();
  httplib::Server &server = impl_->server;
  // SO_REUSEADDR only, so a port held by another listener fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  server.Get("/dict_lookup",
             [svc](const httplib::Request &req, httplib::Response &res) {
               std::string word;
               const bool has_word = req.has_param("word");
               if (has_word) word = req.get_param_value("word");
               Reply(svc->DictLookup(has_word ? &word : nullptr), res);
             });
  server.Post("/normalize_text",
              [svc](const httplib::Request &req, httplib::Response &res) {
                Reply(svc->NormalizeText(req.body), res);
              });
  server.Get("/health", [svc](const httplib::Request &, httplib::Response &res) {
    Reply(svc->Health(), res);
  });
  // Unmatched routes and wrong methods land here with an empty body.
  server.set_error_handler(
      [](const httplib::Request &req, httplib::Response &res) {
        if (!res.body.empty()) return;
        if (res.status == 404) {
          Reply(NormalizerService::NotFound(req.path), res);
        } else {
          Reply(JsonError(res.status, httplib::status_message(res.status)),
                res);
        }
      });
  server.set_exception_handler([](const httplib::Request &,
                                  httplib::Response &res,
                                  std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception &e) {
      what = e.what();
    } catch (...) {
    }
    spdlog::error("request failed: {}", what);
    Reply(JsonError(500, what), res);
  });
  server.set_logger([](const httplib::Request &req,
                       const httplib::Response &res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string &host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) bound = 0;
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = 0;
  }
  if (bound <= 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port) +
                  " (port in use or address unavailable)");
  }
  return bound;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

void HttpServer::Stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace lexforge
