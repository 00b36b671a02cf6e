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

#ifndef LEXFORGE_SERVICE_H_
#define LEXFORGE_SERVICE_H_

#include <memory>
#include <string>
#include <string_view>

#include "lexforge/checkpoint.h"
#include "lexforge/pipeline.h"

namespace lexforge {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

// Request handling independent of the HTTP transport. The model and rule
// set are frozen at construction; only /dict_lookup mutates state.
class NormalizerService {
 public:
  // `model` may be null; /normalize_text then answers 503.
  NormalizerService(std::shared_ptr<const ModelBundle> model,
                    std::shared_ptr<Lookup> lookup, double nsw_threshold);

  ServiceResponse DictLookup(const std::string *word);
  ServiceResponse NormalizeText(std::string_view body) const;
  ServiceResponse Health() const;
  static ServiceResponse NotFound(std::string_view path);

 private:
  std::shared_ptr<const ModelBundle> model_;
  std::shared_ptr<Lookup> lookup_;
  double nsw_threshold_;
};

// HTTP front end: GET /dict_lookup?word=W, POST /normalize_text,
// GET /health. Unknown routes answer a JSON 404.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<NormalizerService> service);
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Binds without serving. Port 0 picks a free port. Returns the bound
  // port; throws IoError when the address is unavailable.
  int Bind(const std::string &host, int port);
  // Serves until Stop(); requires a prior Bind().
  void Serve();
  // Blocks until a concurrent Serve() is accepting connections.
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lexforge

#endif  // LEXFORGE_SERVICE_H_
