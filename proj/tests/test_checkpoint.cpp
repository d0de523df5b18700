#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "l2b/checkpoint.hpp"
#include "l2b/errors.hpp"

using namespace l2b;
using namespace l2b::nn;

namespace {

NetConfig tiny() {
  NetConfig c;
  c.embedding = {6, 4};
  c.pairwise = {4, 3};
  c.attention = {5};
  c.value = {5, 4};
  return c;
}

Checkpoint sample() {
  Checkpoint ck{NetParams::initialize(tiny(), 9), {120, 3400}};
  ck.params.adam_m().setConstant(0.25);
  ck.params.adam_v().setConstant(0.5);
  ck.params.set_adam_step(3400);
  return ck;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  const Checkpoint ck = sample();
  const Checkpoint back = deserialize(serialize(ck), tiny());
  EXPECT_EQ(back.params.config(), tiny());
  EXPECT_EQ(back.params.values(), ck.params.values());
  EXPECT_EQ(back.params.adam_m(), ck.params.adam_m());
  EXPECT_EQ(back.params.adam_v(), ck.params.adam_v());
  EXPECT_EQ(back.params.adam_step(), 3400u);
  EXPECT_EQ(back.meta.episode, 120u);
  EXPECT_EQ(back.meta.updates, 3400u);
  EXPECT_EQ(serialize(back), serialize(ck));
}

TEST(Checkpoint, DetectsCorruption) {
  std::string bytes = serialize(sample());
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x20;
  EXPECT_THROW(deserialize(flipped), CheckpointError);
  EXPECT_THROW(deserialize(bytes.substr(0, bytes.size() - 9)), CheckpointError);
  EXPECT_THROW(deserialize("not a checkpoint at all"), CheckpointError);
  EXPECT_THROW(deserialize(""), CheckpointError);
}

TEST(Checkpoint, ArchitectureMismatchNamesShapes) {
  const std::string bytes = serialize(sample());
  NetConfig other = tiny();
  other.pairwise = {4, 7};
  try {
    deserialize(bytes, other);
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("pairwise"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3x4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("7x4"), std::string::npos) << msg;
  }
}

TEST(Checkpoint, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "l2b_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.ckpt";
  save_checkpoint(path, sample());
  EXPECT_FALSE(std::filesystem::exists(dir / "a.ckpt.tmp"));
  const Checkpoint back = load_checkpoint(path, tiny());
  EXPECT_EQ(back.params.values(), sample().params.values());
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
  std::filesystem::remove_all(dir);
}
