#ifndef CREW_SERIALIZATION_HPP_
#define CREW_SERIALIZATION_HPP_

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "crew/coefficients.hpp"
#include "crew/domain.hpp"
#include "crew/generator.hpp"
#include "crew/policy.hpp"

namespace crew {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const ScheduleInstance& inst);
Json to_json(const Schedule& sched);
Json to_json(const DatasetProfile& profile);
Json to_json(const CoefficientMatrix& coeffs);
Json to_json(const PolicyWeights& weights);

// All throw FormatError on missing or mistyped fields.
ScheduleInstance instance_from_json(const Json& j);
Schedule schedule_from_json(const Json& j);
DatasetProfile profile_from_json(const Json& j);
CoefficientMatrix coefficients_from_json(const Json& j);
PolicyWeights weights_from_json(const Json& j);

// {"format_version": 1, "kind": kind, "config_hash": hash, "body": ...}
Json make_artifact(const std::string& kind, Json body, const std::string& config_hash);
// Checks version and kind, returns the body.
Json artifact_body(const Json& artifact, const std::string& kind);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Hex rendering of a 64-bit hash, 16 digits.
std::string hex64(std::uint64_t v);

}  // namespace crew

#endif  // CREW_SERIALIZATION_HPP_
