#include <gtest/gtest.h>

#include <fstream>
#include <string>
#include <vector>

#include "synthsoc/harness/protocol.h"

using namespace synthsoc;
using json = nlohmann::json;

namespace {

std::vector<std::string> corpus() {
  std::ifstream in(std::string(SYNTHSOC_TEST_DATA) + "/protocol_corpus.jsonl");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

TEST(Protocol, TypeNames) {
  for (auto t : {MessageType::hello, MessageType::reset, MessageType::observation, MessageType::action,
                 MessageType::step_result, MessageType::episode_end, MessageType::error})
    EXPECT_EQ(parse_message_type(to_string(t)), t);
  EXPECT_FALSE(parse_message_type("bye").has_value());
}

TEST(Protocol, CorpusRoundTrips) {
  const auto lines = corpus();
  ASSERT_EQ(lines.size(), 12u);
  for (const auto& line : lines) {
    const auto m = decode_message(line);
    const auto text = encode_message(m);
    // same JSON content, and encoding is a fixed point
    EXPECT_EQ(json::parse(text), json::parse(line)) << line;
    EXPECT_EQ(encode_message(decode_message(text)), text);
    EXPECT_EQ(decode_message(text), m);
  }
}

TEST(Protocol, CorpusFieldsLandInTheRightPlace) {
  const auto lines = corpus();
  const auto act = decode_message(lines[5]);
  EXPECT_EQ(act.type, MessageType::action);
  EXPECT_EQ(act.episode, 2);
  EXPECT_EQ(act.step, 41);
  EXPECT_EQ(act.agent, "a3");
  EXPECT_EQ(act.payload, (json{{"action", "pick:wood"}}));

  const auto spect = decode_message(lines[8]);
  EXPECT_FALSE(spect.agent.has_value());
  EXPECT_EQ(spect.payload["raw"][1], "-1");

  const auto err = decode_message(lines[11]);
  EXPECT_EQ(err, make_error("protocol version mismatch: server speaks 1"));
}

TEST(Protocol, MissingFieldsRejected) {
  const char* bad[] = {
      R"({"type":"hello"})",
      R"({"type":"reset","seed":1})",
      R"({"type":"action","episode":0,"step":0,"action":"noop"})",
      R"({"type":"action","episode":0,"agent":"a0","action":"noop"})",
      R"({"type":"action","episode":0,"step":0,"agent":"a0"})",
      R"({"type":"action","episode":0,"step":0,"agent":"a0","action":7})",
      R"({"type":"observation","episode":0,"step":0,"agent":"a0"})",
      R"({"type":"step_result","episode":0,"step":0,"raw":"0","shared":0,"done":false})",
      R"({"type":"episode_end","episode":0,"summary":{}})",
      R"({"type":"error"})",
  };
  for (const char* line : bad) EXPECT_THROW(decode_message(line), ProtocolError) << line;
}

TEST(Protocol, MalformedRejected) {
  const char* bad[] = {
      "", "not json", "[1,2]", R"({"type":3})", R"({"type":"bye"})", R"({"version":1})",
      R"({"type":"error","message":"x","episode":"0"})", R"({"type":"error","message":"x","step":1.5})",
      R"({"type":"error","message":"x","agent":0})", R"({"type":"hello","version":1)",
  };
  for (const char* line : bad) EXPECT_THROW(decode_message(line), ProtocolError) << line;
}

TEST(Protocol, LineLimit) {
  std::string big = R"({"type":"error","message":")" + std::string(kMaxLineBytes, 'x') + "\"}";
  EXPECT_THROW(decode_message(big), ProtocolError);
  std::string ok = R"({"type":"error","message":")" + std::string(1000, 'x') + "\"}";
  EXPECT_NO_THROW(decode_message(ok));
}

TEST(Protocol, EncodeOmitsAbsentEnvelope) {
  const auto text = encode_message(make_error("nope"));
  const auto j = json::parse(text);
  EXPECT_FALSE(j.contains("episode"));
  EXPECT_FALSE(j.contains("step"));
  EXPECT_FALSE(j.contains("agent"));
  EXPECT_EQ(text.find('\n'), std::string::npos);
}
