#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pyfix {

// Request for instruction-guided editing of a program.
struct EditRequest {
  std::string input;
  std::string instruction;
  double temperature = 0.0;  // in [0, 1]
  int n = 1;                 // >= 1
};

// Request for plain prompt completion.
struct CompletionRequest {
  std::string prompt;
  double temperature = 0.0;
  int n = 1;
  int max_output_tokens = 256;
  std::vector<std::string> stop_sequences;
};

// Result of one generation call. Slot i of per_sample_error explains why that
// sample is missing; successful outputs appear in `outputs` in slot order.
// Invariant: outputs.size() + (number of engaged error slots) == requested n.
struct GenerationBatch {
  std::vector<std::string> outputs;
  std::vector<std::optional<std::string>> per_sample_error;
  std::string request_fingerprint;

  int failed_slots() const;
};

// Stable content hash of the request fields (and nothing else); any field
// change yields a different fingerprint.
std::string request_fingerprint(const EditRequest& r);
std::string request_fingerprint(const CompletionRequest& r);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual GenerationBatch edit_generate(const EditRequest& r) = 0;
  virtual GenerationBatch complete_generate(const CompletionRequest& r) = 0;
  // Number of network round-trips issued so far. Offline backends stay at 0.
  virtual uint64_t http_requests_issued() const { return 0; }
};

// One canned step of a scripted backend.
struct ScriptEntry {
  enum class Kind { Edit, Complete } kind = Kind::Edit;
  std::vector<std::string> outputs;
};

// Deterministic backend that replays a fixed script in order. Every call
// consumes exactly one entry; a call whose kind does not match the next
// entry, or a call after the script ran out, raises FixtureMissing.
class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> script);
  static ScriptedBackend from_file(const std::string& path);
  static std::vector<ScriptEntry> read_script(const std::string& path);

  GenerationBatch edit_generate(const EditRequest& r) override;
  GenerationBatch complete_generate(const CompletionRequest& r) override;

  size_t entries_left() const;

 private:
  GenerationBatch next(ScriptEntry::Kind kind, int n, const std::string& fingerprint,
                       const std::vector<std::string>& stop);
  mutable std::mutex mu_;
  std::deque<ScriptEntry> script_;
};

// Serves recorded responses from a fixture directory keyed by request
// fingerprint. Without a delegate, an unknown request raises FixtureMissing
// (replay mode). With a delegate, the miss is forwarded and the response is
// recorded to the directory (record mode).
class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(std::string fixtures_dir, std::shared_ptr<LlmBackend> delegate = nullptr);

  GenerationBatch edit_generate(const EditRequest& r) override;
  GenerationBatch complete_generate(const CompletionRequest& r) override;
  uint64_t http_requests_issued() const override;

 private:
  template <typename Req>
  GenerationBatch serve(const Req& r);
  std::optional<GenerationBatch> lookup(const std::string& fingerprint);
  void store(const GenerationBatch& batch);

  std::string dir_;
  std::shared_ptr<LlmBackend> delegate_;
  std::mutex mu_;
  std::map<std::string, GenerationBatch> cache_;
};

// Writes a batch to / reads a batch from the on-disk fixture format used by
// ReplayBackend. Exposed so tests and tools can prepare fixture directories.
void write_fixture(const std::string& fixtures_dir, const GenerationBatch& batch);
std::optional<GenerationBatch> read_fixture(const std::string& fixtures_dir,
                                            const std::string& fingerprint);

struct HttpBackendConfig {
  std::string base_url;  // e.g. "https://api.example.com"
  std::string edit_path = "/v1/edits";
  std::string completion_path = "/v1/completions";
  std::string edit_model;
  std::string completion_model;
  std::string api_key_env = "LLM_API_KEY";
  int parallelism = 4;       // cap on concurrent fanned-out requests
  int max_attempts = 3;      // total tries per request
  int backoff_ms = 250;      // doubled after each failed attempt
  int timeout_ms = 30000;    // per-attempt connect/read/write timeout
  bool fan_out_samples = false;  // issue n single-sample requests instead of one n-sample request
};

// OpenAI-compatible JSON-over-HTTP backend.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);
  ~HttpBackend() override;

  GenerationBatch edit_generate(const EditRequest& r) override;
  GenerationBatch complete_generate(const CompletionRequest& r) override;
  uint64_t http_requests_issued() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Cuts each output at the first occurrence of any stop sequence. All
// backends apply this to completion outputs so the stop contract holds
// regardless of provider behavior.
void apply_stop_sequences(GenerationBatch& batch, const std::vector<std::string>& stop);

}  // namespace pyfix
