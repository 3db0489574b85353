#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace regrest {

enum class ProviderKind { Http, Replay, Record };

ProviderKind provider_kind_from_name(const std::string& name);
const char* provider_kind_name(ProviderKind kind);

struct LlmConfig {
  ProviderKind provider = ProviderKind::Replay;
  std::string model = "gpt-4o";
  double temperature = 0.5;
  int max_tokens = 4096;
  double request_timeout = 30.0;
  std::string endpoint;                      // Http/Record: chat-completions URL
  std::string api_key_env = "LLM_API_KEY";   // env var holding the bearer token
  std::string store_dir;                     // Replay source / Record sink
};

struct Candidate {
  std::vector<std::string> inputs;
  std::optional<std::string> cmd;
  std::string explanation;
  std::string raw;
};

// Stateless completion: every complete() is a fresh single-message request.
// begin_trial() resets the per-trial attempt ordinal used by the replay store.
class Provider {
public:
  virtual ~Provider() = default;
  virtual std::string complete(const std::string& prompt_text) = 0;
  virtual void begin_trial() {}
};

std::unique_ptr<Provider> make_provider(const LlmConfig& config);

// Extracts fenced blocks from a model response. The first `input_slots`
// unlabeled blocks become inputs; a block whose info string or first line is
// "cmd" (case-insensitive) becomes the command. With expect_cmd and no labeled
// block, a single leftover block is taken as the command.
Candidate parse_response(const std::string& raw, bool expect_cmd,
                         int input_slots);

} // namespace regrest
