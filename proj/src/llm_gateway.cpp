#include "regrest/llm_gateway.hpp"

#include <filesystem>
#include <map>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace regrest {

ProviderKind provider_kind_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "http") return ProviderKind::Http;
  if (n == "replay") return ProviderKind::Replay;
  if (n == "record") return ProviderKind::Record;
  throw ConfigError("unknown provider: " + name);
}

const char* provider_kind_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Http: return "http";
    case ProviderKind::Replay: return "replay";
    case ProviderKind::Record: return "record";
  }
  return "replay";
}

namespace {

class HttpProvider : public Provider {
public:
  explicit HttpProvider(LlmConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty())
      throw ConfigError("http provider requires an endpoint URL");
    auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw ConfigError("endpoint must be a URL: " + config_.endpoint);
    auto path_start = config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      base_ = config_.endpoint;
      path_ = "/v1/chat/completions";
    } else {
      base_ = config_.endpoint.substr(0, path_start);
      path_ = config_.endpoint.substr(path_start);
    }
  }

  std::string complete(const std::string& prompt_text) override {
    json body = {
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_tokens},
        // statelessness: exactly one user message, no conversation history
        {"messages", json::array({{{"role", "user"}, {"content", prompt_text}}})},
    };

    httplib::Client cli(base_);
    auto secs = time_t(config_.request_timeout);
    auto usecs = time_t((config_.request_timeout - double(secs)) * 1e6);
    cli.set_read_timeout(secs, usecs);
    cli.set_connection_timeout(secs, usecs);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout ||
          err == httplib::Error::Read)
        throw Timeout("LLM request timed out after " +
                      std::to_string(config_.request_timeout) + "s");
      throw ProviderError("HTTP request failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300)
      throw ProviderError("HTTP status " + std::to_string(res->status));
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception& e) {
      throw ProviderError(std::string("malformed completion body: ") + e.what());
    }
  }

private:
  LlmConfig config_;
  std::string base_;
  std::string path_;
};

class ReplayProvider : public Provider {
public:
  explicit ReplayProvider(const LlmConfig& config) {
    if (config.store_dir.empty())
      throw ConfigError("replay provider requires a store directory");
    if (!fs::is_directory(config.store_dir))
      throw ConfigError("replay store not found: " + config.store_dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(config.store_dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      json doc = json::parse(read_file(p.string()));
      Key key{doc.at("prompt_sha256").get<std::string>(),
              doc.at("ordinal").get<int>()};
      store_[key] = doc.at("response_text").get<std::string>();
    }
  }

  void begin_trial() override { ordinal_ = 0; }

  std::string complete(const std::string& prompt_text) override {
    ++ordinal_;
    auto hash = sha256_hex(prompt_text);
    if (auto it = store_.find({hash, ordinal_}); it != store_.end())
      return it->second;
    // "any" entries let hand-authored transcripts drive the loop without
    // precomputing the hash of every feedback-dependent prompt
    if (auto it = store_.find({"any", ordinal_}); it != store_.end())
      return it->second;
    throw ReplayMiss("no stored response for prompt " + hash.substr(0, 12) +
                     " ordinal " + std::to_string(ordinal_));
  }

private:
  using Key = std::pair<std::string, int>;
  std::map<Key, std::string> store_;
  int ordinal_ = 0;
};

class RecordProvider : public Provider {
public:
  RecordProvider(std::unique_ptr<Provider> inner, std::string store_dir)
      : inner_(std::move(inner)), store_dir_(std::move(store_dir)) {
    if (store_dir_.empty())
      throw ConfigError("record provider requires a store directory");
    fs::create_directories(store_dir_);
  }

  void begin_trial() override {
    ordinal_ = 0;
    inner_->begin_trial();
  }

  std::string complete(const std::string& prompt_text) override {
    ++ordinal_;
    std::string response = inner_->complete(prompt_text);
    std::string hash = sha256_hex(prompt_text);
    json doc = {{"prompt_sha256", hash},
                {"ordinal", ordinal_},
                {"response_text", response}};
    std::lock_guard lock(write_mutex_);
    fs::path file = fs::path(store_dir_) /
                    (hash.substr(0, 16) + "_" + std::to_string(ordinal_) + ".json");
    write_file(file.string(), doc.dump(2) + "\n");
    return response;
  }

private:
  std::unique_ptr<Provider> inner_;
  std::string store_dir_;
  int ordinal_ = 0;
  std::mutex write_mutex_;
};

} // namespace

std::unique_ptr<Provider> make_provider(const LlmConfig& config) {
  if (config.temperature < 0 || config.temperature > 2)
    throw ConfigError("temperature out of range [0,2]");
  switch (config.provider) {
    case ProviderKind::Http:
      return std::make_unique<HttpProvider>(config);
    case ProviderKind::Replay:
      return std::make_unique<ReplayProvider>(config);
    case ProviderKind::Record:
      return std::make_unique<RecordProvider>(
          std::make_unique<HttpProvider>(config), config.store_dir);
  }
  throw ConfigError("unsupported provider");
}

namespace {

struct FencedBlock {
  std::string info;
  std::string content;
};

// Line-anchored fence grammar: a block opens with ``` plus an optional info
// string and closes at the next line that is exactly ``` (trailing whitespace
// tolerated).
std::pair<std::vector<FencedBlock>, std::string> extract_blocks(
    const std::string& raw) {
  std::vector<FencedBlock> blocks;
  std::string prose;
  auto lines = split_lines(raw);
  size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    if (line.rfind("```", 0) == 0) {
      FencedBlock block;
      block.info = trim(line.substr(3));
      ++i;
      while (i < lines.size() && trim(lines[i]) != "```") {
        block.content += lines[i];
        block.content += '\n';
        ++i;
      }
      if (i < lines.size()) ++i; // closing fence
      blocks.push_back(std::move(block));
    } else {
      prose += line;
      prose += '\n';
      ++i;
    }
  }
  return {std::move(blocks), std::move(prose)};
}

bool is_cmd_block(FencedBlock& block) {
  if (to_lower(block.info) == "cmd") return true;
  auto first_nl = block.content.find('\n');
  std::string first_line = trim(block.content.substr(0, first_nl));
  if (to_lower(first_line) == "cmd") {
    block.content =
        first_nl == std::string::npos ? "" : block.content.substr(first_nl + 1);
    return true;
  }
  return false;
}

} // namespace

Candidate parse_response(const std::string& raw, bool expect_cmd,
                         int input_slots) {
  auto [blocks, prose] = extract_blocks(raw);
  if (blocks.empty()) throw NoFencedBlock("response contains no fenced block");

  Candidate cand;
  cand.raw = raw;
  cand.explanation = trim(prose);

  std::vector<FencedBlock> unlabeled;
  for (auto& block : blocks) {
    if (expect_cmd && !cand.cmd && is_cmd_block(block))
      cand.cmd = trim(block.content);
    else
      unlabeled.push_back(std::move(block));
  }

  if (expect_cmd && !cand.cmd) {
    // fallback: one extra unlabeled block beyond the input slots
    if (int(unlabeled.size()) > input_slots) {
      cand.cmd = trim(unlabeled.back().content);
      unlabeled.pop_back();
    } else {
      throw MissingCmd("expected a command block, none found");
    }
  }

  if (int(unlabeled.size()) < input_slots)
    throw MissingInputSlots("expected " + std::to_string(input_slots) +
                            " input blocks, found " +
                            std::to_string(unlabeled.size()));
  for (int i = 0; i < input_slots; ++i)
    cand.inputs.push_back(std::move(unlabeled[size_t(i)].content));
  return cand;
}

} // namespace regrest
