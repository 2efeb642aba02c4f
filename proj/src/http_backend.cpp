#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
//
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "json.hpp"
#include "pyfix/backend.hpp"
#include "pyfix/errors.hpp"
#include "pyfix/util.hpp"

namespace pyfix {

using nlohmann::json;

struct HttpBackend::Impl {
  HttpBackendConfig cfg;
  std::string api_key;
  std::atomic<uint64_t> requests{0};

  explicit Impl(HttpBackendConfig c) : cfg(std::move(c)) {
    if (const char* k = std::getenv(cfg.api_key_env.c_str())) api_key = k;
  }

  // One POST with the configured retry budget. 429 keeps retrying and ends
  // as RateLimited; network errors and 5xx retry and end as
  // BackendUnavailable; other 4xx fail immediately.
  json post(const std::string& path, const json& body) {
    if (cfg.base_url.empty()) throw BackendUnavailable("no base_url configured");
    int attempts = cfg.max_attempts < 1 ? 1 : cfg.max_attempts;
    std::string last_error = "request never attempted";
    bool rate_limited = false;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      if (attempt > 1) {
        int64_t wait = static_cast<int64_t>(cfg.backoff_ms) << (attempt - 2);
        std::this_thread::sleep_for(std::chrono::milliseconds(wait));
      }
      httplib::Client cli(cfg.base_url);
      cli.set_connection_timeout(std::chrono::milliseconds(cfg.timeout_ms));
      cli.set_read_timeout(std::chrono::milliseconds(cfg.timeout_ms));
      cli.set_write_timeout(std::chrono::milliseconds(cfg.timeout_ms));
      httplib::Headers headers;
      if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
      ++requests;
      httplib::Result res = cli.Post(path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "network error: " + httplib::to_string(res.error());
        rate_limited = false;
        continue;
      }
      if (res->status == 429) {
        last_error = "rate limited (429)";
        rate_limited = true;
        continue;
      }
      if (res->status >= 500) {
        last_error = "server error (" + std::to_string(res->status) + ")";
        rate_limited = false;
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw BackendUnavailable("request rejected (" + std::to_string(res->status) + "): " +
                                 res->body.substr(0, 200));
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("unparseable response: ") + e.what());
      }
    }
    if (rate_limited) throw RateLimited(last_error + " after " + std::to_string(attempts) + " attempts");
    throw BackendUnavailable(last_error + " after " + std::to_string(attempts) + " attempts");
  }

  // Extracts up to n sample texts from an OpenAI-style choices array,
  // honoring explicit indices when present.
  GenerationBatch to_batch(const json& response, int n, const std::string& fingerprint) {
    GenerationBatch batch;
    batch.request_fingerprint = fingerprint;
    batch.per_sample_error.assign(static_cast<size_t>(n), std::string("no sample returned"));
    std::vector<std::optional<std::string>> texts(static_cast<size_t>(n));
    size_t fallback = 0;
    for (const json& choice : response.value("choices", json::array())) {
      size_t slot = fallback;
      if (choice.is_object() && choice.contains("index") && choice["index"].is_number_integer()) {
        long long idx = choice["index"].get<long long>();
        if (idx < 0 || idx >= n) continue;
        slot = static_cast<size_t>(idx);
      }
      if (slot >= static_cast<size_t>(n)) break;
      if (choice.is_object() && choice.contains("text") && choice["text"].is_string()) {
        texts[slot] = choice["text"].get<std::string>();
        batch.per_sample_error[slot] = std::nullopt;
      } else {
        batch.per_sample_error[slot] = "choice without text";
      }
      fallback = slot + 1;
    }
    for (const auto& t : texts)
      if (t) batch.outputs.push_back(*t);
    return batch;
  }

  // Merges k single-sample batches into one n-sample batch, keeping request
  // issue order as slot order.
  GenerationBatch merge(std::vector<GenerationBatch>& parts, const std::string& fingerprint) {
    GenerationBatch batch;
    batch.request_fingerprint = fingerprint;
    for (GenerationBatch& part : parts) {
      if (!part.outputs.empty()) {
        batch.outputs.push_back(std::move(part.outputs.front()));
        batch.per_sample_error.push_back(std::nullopt);
      } else if (!part.per_sample_error.empty() && part.per_sample_error.front()) {
        batch.per_sample_error.push_back(part.per_sample_error.front());
      } else {
        batch.per_sample_error.push_back(std::string("no sample returned"));
      }
    }
    return batch;
  }
};

HttpBackend::HttpBackend(HttpBackendConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

HttpBackend::~HttpBackend() = default;

uint64_t HttpBackend::http_requests_issued() const { return impl_->requests.load(); }

GenerationBatch HttpBackend::edit_generate(const EditRequest& r) {
  std::string fp = request_fingerprint(r);
  auto body_for = [&](int n) {
    json body;
    body["model"] = impl_->cfg.edit_model;
    body["input"] = r.input;
    body["instruction"] = r.instruction;
    body["temperature"] = r.temperature;
    body["n"] = n;
    return body;
  };
  if (impl_->cfg.fan_out_samples && r.n > 1) {
    std::vector<GenerationBatch> parts(static_cast<size_t>(r.n));
    std::exception_ptr first_error;
    std::mutex emu;
    parallel_for(static_cast<size_t>(r.n), impl_->cfg.parallelism, [&](size_t i) {
      try {
        parts[i] = impl_->to_batch(impl_->post(impl_->cfg.edit_path, body_for(1)), 1, fp);
      } catch (...) {
        std::lock_guard<std::mutex> lock(emu);
        if (!first_error) first_error = std::current_exception();
        parts[i].per_sample_error.assign(1, std::string("request failed"));
      }
    });
    if (first_error) std::rethrow_exception(first_error);
    return impl_->merge(parts, fp);
  }
  return impl_->to_batch(impl_->post(impl_->cfg.edit_path, body_for(r.n)), r.n, fp);
}

GenerationBatch HttpBackend::complete_generate(const CompletionRequest& r) {
  std::string fp = request_fingerprint(r);
  auto body_for = [&](int n) {
    json body;
    body["model"] = impl_->cfg.completion_model;
    body["prompt"] = r.prompt;
    body["temperature"] = r.temperature;
    body["n"] = n;
    body["max_tokens"] = r.max_output_tokens;
    body["stop"] = r.stop_sequences;
    return body;
  };
  GenerationBatch batch;
  if (impl_->cfg.fan_out_samples && r.n > 1) {
    std::vector<GenerationBatch> parts(static_cast<size_t>(r.n));
    std::exception_ptr first_error;
    std::mutex emu;
    parallel_for(static_cast<size_t>(r.n), impl_->cfg.parallelism, [&](size_t i) {
      try {
        parts[i] = impl_->to_batch(impl_->post(impl_->cfg.completion_path, body_for(1)), 1, fp);
      } catch (...) {
        std::lock_guard<std::mutex> lock(emu);
        if (!first_error) first_error = std::current_exception();
        parts[i].per_sample_error.assign(1, std::string("request failed"));
      }
    });
    if (first_error) std::rethrow_exception(first_error);
    batch = impl_->merge(parts, fp);
  } else {
    batch = impl_->to_batch(impl_->post(impl_->cfg.completion_path, body_for(r.n)), r.n, fp);
  }
  apply_stop_sequences(batch, r.stop_sequences);
  return batch;
}

}  // namespace pyfix
