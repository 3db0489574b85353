#include "doctest.h"

#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "regrest/errors.hpp"
#include "regrest/llm_gateway.hpp"
#include "regrest/util.hpp"

#include "support/fixture_repo.hpp"

using namespace regrest;
using regrest::testing::make_temp_dir;
using regrest::testing::write_replay_store;

TEST_CASE("replay keyed by exact prompt hash, ordinal advances per trial") {
  std::string dir = make_temp_dir("replay");
  nlohmann::json exact = {{"prompt_sha256", sha256_hex("PROMPT-A")},
                          {"ordinal", 1},
                          {"response_text", "```\nexact\n```"}};
  write_file(dir + "/exact.json", exact.dump());
  write_replay_store(dir, {{2, "```\nwild-2\n```"}});

  LlmConfig cfg;
  cfg.provider = ProviderKind::Replay;
  cfg.store_dir = dir;
  auto provider = make_provider(cfg);
  provider->begin_trial();
  CHECK(provider->complete("PROMPT-A") == "```\nexact\n```");
  CHECK(provider->complete("anything else") == "```\nwild-2\n```");
  CHECK_THROWS_AS(provider->complete("third"), ReplayMiss);

  provider->begin_trial(); // a fresh trial replays from ordinal 1
  CHECK(provider->complete("PROMPT-A") == "```\nexact\n```");
}

TEST_CASE("exact hash wins over the wildcard at the same ordinal") {
  std::string dir = make_temp_dir("replay-prio");
  nlohmann::json exact = {{"prompt_sha256", sha256_hex("P")},
                          {"ordinal", 1},
                          {"response_text", "exact"}};
  write_file(dir + "/a.json", exact.dump());
  write_replay_store(dir, {{1, "wild"}});

  LlmConfig cfg;
  cfg.provider = ProviderKind::Replay;
  cfg.store_dir = dir;
  auto provider = make_provider(cfg);
  provider->begin_trial();
  CHECK(provider->complete("P") == "exact");
  provider->begin_trial();
  CHECK(provider->complete("Q") == "wild");
}

TEST_CASE("replay provider rejects a missing store") {
  LlmConfig cfg;
  cfg.provider = ProviderKind::Replay;
  cfg.store_dir = "/no/such/dir-regrest";
  CHECK_THROWS_AS(make_provider(cfg), ConfigError);
  cfg.store_dir.clear();
  CHECK_THROWS_AS(make_provider(cfg), ConfigError);
}

TEST_CASE("http provider sends a single stateless user message") {
  httplib::Server server;
  nlohmann::json seen;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen = nlohmann::json::parse(req.body);
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"content", "```\nreply\n```"}}}}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmConfig cfg;
  cfg.provider = ProviderKind::Http;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                 "/v1/chat/completions";
  cfg.model = "test-model";
  auto provider = make_provider(cfg);
  CHECK(provider->complete("first prompt") == "```\nreply\n```");
  CHECK(provider->complete("second prompt") == "```\nreply\n```");

  // the second call must not accumulate conversation history
  REQUIRE(seen.at("messages").size() == 1);
  CHECK(seen.at("messages").at(0).at("role") == "user");
  CHECK(seen.at("messages").at(0).at("content") == "second prompt");
  CHECK(seen.at("model") == "test-model");
  CHECK(seen.at("temperature").get<double>() == doctest::Approx(0.5));
  CHECK(seen.at("max_tokens") == 4096);

  server.stop();
  t.join();
}

TEST_CASE("http errors surface as ProviderError") {
  httplib::Server server;
  server.Post("/v1/chat/completions",
              [](const httplib::Request&, httplib::Response& res) {
                res.status = 500;
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmConfig cfg;
  cfg.provider = ProviderKind::Http;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                 "/v1/chat/completions";
  auto provider = make_provider(cfg);
  CHECK_THROWS_AS(provider->complete("p"), ProviderError);
  server.stop();
  t.join();
}

TEST_CASE("record wraps http and writes a usable replay store") {
  httplib::Server server;
  server.Post("/v1/chat/completions",
              [](const httplib::Request&, httplib::Response& res) {
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"content", "recorded answer"}}}}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::string store = make_temp_dir("record-store");
  LlmConfig cfg;
  cfg.provider = ProviderKind::Record;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                 "/v1/chat/completions";
  cfg.store_dir = store;
  auto recorder = make_provider(cfg);
  recorder->begin_trial();
  CHECK(recorder->complete("the prompt") == "recorded answer");
  server.stop();
  t.join();

  LlmConfig replay_cfg;
  replay_cfg.provider = ProviderKind::Replay;
  replay_cfg.store_dir = store;
  auto replayer = make_provider(replay_cfg);
  replayer->begin_trial();
  CHECK(replayer->complete("the prompt") == "recorded answer");
}

TEST_CASE("parse_response extracts inputs and labeled cmd blocks") {
  std::string raw =
      "Here is the test input.\n"
      "```\nfirst input\n```\n"
      "and the command:\n"
      "```cmd\nexpr {input1}\n```\n";
  Candidate c = parse_response(raw, true, 1);
  REQUIRE(c.inputs.size() == 1);
  CHECK(c.inputs[0] == "first input\n");
  REQUIRE(c.cmd.has_value());
  CHECK(*c.cmd == "expr {input1}");
  CHECK(c.raw == raw);
}

TEST_CASE("parse_response: cmd may be labeled by its first line") {
  std::string raw = "```\nin\n```\n```\ncmd\nrun {input1}\n```\n";
  Candidate c = parse_response(raw, true, 1);
  CHECK(c.inputs == std::vector<std::string>{"in\n"});
  REQUIRE(c.cmd.has_value());
  CHECK(*c.cmd == "run {input1}");
}

TEST_CASE("parse_response: single leftover block becomes the cmd") {
  std::string raw = "```\nin\n```\nthen\n```\n./prog {input1} --flag\n```\n";
  Candidate c = parse_response(raw, true, 1);
  REQUIRE(c.cmd.has_value());
  CHECK(*c.cmd == "./prog {input1} --flag");
}

TEST_CASE("parse_response multi-slot and error cases") {
  std::string two = "```\na\n```\n```\nb\n```\n";
  Candidate c = parse_response(two, false, 2);
  CHECK(c.inputs == std::vector<std::string>{"a\n", "b\n"});
  CHECK(!c.cmd.has_value());

  CHECK_THROWS_AS(parse_response("no fences at all", false, 1), NoFencedBlock);
  CHECK_THROWS_AS(parse_response("```\nonly one\n```\n", false, 2),
                  MissingInputSlots);
  CHECK_THROWS_AS(parse_response("```\nin\n```\n", true, 1), MissingCmd);
}

TEST_CASE("parse_response ignores inline backticks and keeps block bytes") {
  std::string raw =
      "inline ``` fence does not open\n"
      "```json\n{\"k\": \"v\"}\n```\n";
  Candidate c = parse_response(raw, false, 1);
  REQUIRE(c.inputs.size() == 1);
  CHECK(c.inputs[0] == "{\"k\": \"v\"}\n");
}
