#include <gtest/gtest.h>

#include <filesystem>

#include "crew/extract.hpp"
#include "crew/generator.hpp"
#include "crew/serialization.hpp"

namespace crew {
namespace {

// Through text, as files would go.
Json reparse(const Json& j) { return Json::parse(j.dump()); }

TEST(Serialization, InstanceRoundTrip) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ScheduleInstance inst = generate_instance(default_desk_profile(), {1.5, 2, seed});
    EXPECT_EQ(instance_from_json(reparse(to_json(inst))), inst);
  }
}

TEST(Serialization, ScheduleRoundTrip) {
  Schedule s;
  s.complete = true;
  s.assignment = {{0, 3}, {1, 0}, {7, 2}};
  EXPECT_EQ(schedule_from_json(reparse(to_json(s))), s);
  s.complete = false;
  s.assignment.clear();
  EXPECT_EQ(schedule_from_json(reparse(to_json(s))), s);
}

TEST(Serialization, ProfileRoundTrip) {
  const DatasetProfile p = default_desk_profile();
  EXPECT_EQ(profile_from_json(reparse(to_json(p))), p);
}

TEST(Serialization, WeightsRoundTripBitExact) {
  RewardConfig reward;
  reward.variant = RewardVariant::kMoveup;
  reward.t_move = 3;
  PolicyWeights w = init_policy(5, 4, 16, 42, reward);
  w.train_density = 2.0;
  w.seed = 99;
  w.trunk1.w(0, 0) = 1.0 / 3.0;
  w.critic.b[0] = -1e-300;
  const PolicyWeights back = weights_from_json(reparse(to_json(w)));
  EXPECT_EQ(back, w);
  EXPECT_EQ(weights_hash(back), weights_hash(w));
}

TEST(Serialization, CoefficientsRoundTrip) {
  const DatasetProfile profile = default_desk_profile();
  const PolicyWeights w = init_policy(static_cast<int>(profile.pilot_roster.size()),
                                      profile.num_flight_types(), 16, 1);
  const ScheduleInstance inst = generate_instance(profile, {1.0, 1, 0});
  const CoefficientMatrix m = extract_montecarlo(w, inst, 2, 3);
  EXPECT_EQ(coefficients_from_json(reparse(to_json(m))), m);
}

TEST(Serialization, MissingOrMistypedFieldsRaiseFormatError) {
  const ScheduleInstance inst = generate_instance(default_desk_profile(), {1.0, 1, 0});
  Json j = to_json(inst);
  j.erase("pilots");
  EXPECT_THROW(instance_from_json(j), FormatError);
  j = to_json(inst);
  j["horizon_days"] = "seven";
  EXPECT_THROW(instance_from_json(j), FormatError);
  EXPECT_THROW(schedule_from_json(Json::array()), FormatError);
  EXPECT_THROW(weights_from_json(Json::object()), FormatError);
  EXPECT_THROW(profile_from_json(Json{{"flight_types", 3}}), FormatError);
}

TEST(Serialization, ArtifactEnvelope) {
  const Json a = make_artifact("schedule", to_json(Schedule{}), "abc");
  EXPECT_EQ(a.at("format_version"), kFormatVersion);
  EXPECT_EQ(a.at("kind"), "schedule");
  EXPECT_EQ(a.at("config_hash"), "abc");
  EXPECT_EQ(artifact_body(a, "schedule"), to_json(Schedule{}));
  EXPECT_THROW(artifact_body(a, "instance"), FormatError);
  Json future = a;
  future["format_version"] = kFormatVersion + 1;
  EXPECT_THROW(artifact_body(future, "schedule"), FormatError);
  EXPECT_THROW(artifact_body(Json::object(), "schedule"), FormatError);
}

TEST(Serialization, FilesAndHex) {
  const auto dir = std::filesystem::temp_directory_path() / "crew_serialization_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.json").string();
  const Json j = make_artifact("profile", to_json(default_desk_profile()), "0");
  write_json_file(path, j);
  EXPECT_EQ(read_json_file(path), j);
  write_text_file(path, "not json{");
  EXPECT_THROW(read_json_file(path), FormatError);
  EXPECT_THROW(read_text_file((dir / "missing.txt").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
  EXPECT_EQ(hex64(0), "0000000000000000");
  EXPECT_EQ(hex64(0xdeadbeefULL), "00000000deadbeef");
  EXPECT_EQ(hex64(~0ULL), "ffffffffffffffff");
}

}  // namespace
}  // namespace crew
