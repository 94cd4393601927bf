#include "crew/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace crew {
namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

const Json& child(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

const char* kind_name(FlightKind k) { return k == FlightKind::kMission ? "mission" : "simulator"; }

FlightKind kind_from(const std::string& s) {
  if (s == "mission") return FlightKind::kMission;
  if (s == "simulator") return FlightKind::kSimulator;
  throw FormatError("unknown flight kind '" + s + "'");
}

Json pilot_json(const Pilot& p) {
  Json leave = Json::array();
  for (const DayInterval& l : p.leave) leave.push_back({l.start, l.end});
  return {{"id", p.id}, {"qualifications", p.qualifications}, {"leave", leave}};
}

Pilot pilot_from(const Json& j) {
  Pilot p;
  p.id = field<int>(j, "id");
  p.qualifications = field<std::vector<int>>(j, "qualifications");
  for (const auto& l : field<std::vector<std::array<int, 2>>>(j, "leave")) {
    p.leave.push_back({l[0], l[1]});
  }
  return p;
}

Json layer_json(const DenseLayer& l) {
  std::vector<double> w(l.w.size());
  for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < l.w.cols(); ++c) w[r * l.w.cols() + c] = l.w(r, c);
  }
  return {{"rows", l.w.rows()},
          {"cols", l.w.cols()},
          {"w", w},
          {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}};
}

DenseLayer layer_from(const Json& j) {
  const auto rows = field<Eigen::Index>(j, "rows");
  const auto cols = field<Eigen::Index>(j, "cols");
  const auto w = field<std::vector<double>>(j, "w");
  const auto b = field<std::vector<double>>(j, "b");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
      static_cast<Eigen::Index>(b.size()) != rows) {
    throw FormatError("layer shape does not match its data");
  }
  DenseLayer l;
  l.w.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) l.w(r, c) = w[r * cols + c];
  }
  l.b = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
  return l;
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const ScheduleInstance& inst) {
  Json pilots = Json::array();
  for (const Pilot& p : inst.pilots) pilots.push_back(pilot_json(p));
  Json flights = Json::array();
  for (const Flight& f : inst.flights) {
    flights.push_back({{"id", f.id},
                       {"kind", kind_name(f.kind)},
                       {"flight_type", f.flight_type},
                       {"start_day", f.start_day},
                       {"end_day", f.end_day},
                       {"slots", f.slots}});
  }
  Json slots = Json::array();
  for (const Slot& s : inst.slots) {
    slots.push_back(
        {{"id", s.id}, {"flight_id", s.flight_id}, {"required_qualification", s.required_qualification}});
  }
  return {{"horizon_days", inst.horizon_days},
          {"num_flight_types", inst.num_flight_types},
          {"pilots", pilots},
          {"flights", flights},
          {"slots", slots},
          {"training_matrix", inst.training_matrix},
          {"trq_flags", inst.trq_flags}};
}

ScheduleInstance instance_from_json(const Json& j) {
  ScheduleInstance inst;
  inst.horizon_days = field<int>(j, "horizon_days");
  inst.num_flight_types = field<int>(j, "num_flight_types");
  for (const Json& p : child(j, "pilots")) inst.pilots.push_back(pilot_from(p));
  for (const Json& f : child(j, "flights")) {
    Flight fl;
    fl.id = field<int>(f, "id");
    fl.kind = kind_from(field<std::string>(f, "kind"));
    fl.flight_type = field<int>(f, "flight_type");
    fl.start_day = field<int>(f, "start_day");
    fl.end_day = field<int>(f, "end_day");
    fl.slots = field<std::vector<int>>(f, "slots");
    inst.flights.push_back(std::move(fl));
  }
  for (const Json& s : child(j, "slots")) {
    inst.slots.push_back({field<int>(s, "id"), field<int>(s, "flight_id"),
                          field<int>(s, "required_qualification")});
  }
  inst.training_matrix = field<std::vector<std::vector<int>>>(j, "training_matrix");
  inst.trq_flags = field<std::vector<std::array<bool, 2>>>(j, "trq_flags");
  try {
    check_instance(inst);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return inst;
}

Json to_json(const Schedule& sched) {
  Json assignment = Json::array();
  for (const auto& [slot, pilot] : sched.assignment) assignment.push_back({{"slot", slot}, {"pilot", pilot}});
  return {{"complete", sched.complete}, {"assignment", assignment}};
}

Schedule schedule_from_json(const Json& j) {
  Schedule s;
  s.complete = field<bool>(j, "complete");
  for (const Json& a : child(j, "assignment")) {
    if (!s.assignment.emplace(field<int>(a, "slot"), field<int>(a, "pilot")).second) {
      throw FormatError("slot listed twice in schedule");
    }
  }
  return s;
}

Json to_json(const DatasetProfile& p) {
  Json types = Json::array();
  for (const FlightTypeSpec& t : p.flight_types) {
    types.push_back({{"kind", kind_name(t.kind)},
                     {"frequency", t.frequency},
                     {"duration_samples", t.duration_samples},
                     {"slot_quals", t.slot_quals}});
  }
  Json roster = Json::array();
  for (const Pilot& pilot : p.pilot_roster) roster.push_back(pilot_json(pilot));
  return {{"weekly_mission_mean", p.weekly_mission_mean},
          {"weekly_mission_stddev", p.weekly_mission_stddev},
          {"weekly_simulator_mean", p.weekly_simulator_mean},
          {"weekly_simulator_stddev", p.weekly_simulator_stddev},
          {"num_qualifications", p.num_qualifications},
          {"flight_types", types},
          {"pilot_roster", roster},
          {"training_template", p.training_template}};
}

DatasetProfile profile_from_json(const Json& j) {
  DatasetProfile p;
  p.weekly_mission_mean = field<double>(j, "weekly_mission_mean");
  p.weekly_mission_stddev = field<double>(j, "weekly_mission_stddev");
  p.weekly_simulator_mean = field<double>(j, "weekly_simulator_mean");
  p.weekly_simulator_stddev = field<double>(j, "weekly_simulator_stddev");
  p.num_qualifications = field<int>(j, "num_qualifications");
  for (const Json& t : child(j, "flight_types")) {
    p.flight_types.push_back({kind_from(field<std::string>(t, "kind")), field<int>(t, "frequency"),
                              field<std::vector<int>>(t, "duration_samples"),
                              field<std::vector<int>>(t, "slot_quals")});
  }
  for (const Json& pilot : child(j, "pilot_roster")) p.pilot_roster.push_back(pilot_from(pilot));
  p.training_template = field<std::vector<std::vector<int>>>(j, "training_template");
  try {
    check_profile(p);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return p;
}

Json to_json(const CoefficientMatrix& m) {
  Json values = Json::array();
  for (const auto& [key, v] : m.values) values.push_back({key.first, key.second, v});
  return {{"method", m.method}, {"n", m.n}, {"source_hash", hex64(m.source_hash)}, {"values", values}};
}

CoefficientMatrix coefficients_from_json(const Json& j) {
  CoefficientMatrix m;
  m.method = field<std::string>(j, "method");
  m.n = field<int>(j, "n");
  m.source_hash = std::stoull(field<std::string>(j, "source_hash"), nullptr, 16);
  for (const Json& row : child(j, "values")) {
    if (!row.is_array() || row.size() != 3) throw FormatError("coefficient rows are [pilot, slot, value]");
    m.values[{row[0].get<int>(), row[1].get<int>()}] = row[2].get<double>();
  }
  return m;
}

Json to_json(const PolicyWeights& w) {
  return {{"num_pilots", w.num_pilots},
          {"num_flight_types", w.num_flight_types},
          {"hidden", w.hidden},
          {"activation", "tanh"},
          {"layers",
           {{"trunk1", layer_json(w.trunk1)},
            {"trunk2", layer_json(w.trunk2)},
            {"actor", layer_json(w.actor)},
            {"critic", layer_json(w.critic)}}},
          {"observation_scale", w.reward.horizon},
          {"reward",
           {{"variant", to_string(w.reward.variant)},
            {"horizon", w.reward.horizon},
            {"complete_bonus", w.reward.complete_bonus},
            {"incomplete_penalty", w.reward.incomplete_penalty},
            {"t_move", w.reward.t_move}}},
          {"train_density", w.train_density},
          {"seed", w.seed}};
}

PolicyWeights weights_from_json(const Json& j) {
  PolicyWeights w;
  w.num_pilots = field<int>(j, "num_pilots");
  w.num_flight_types = field<int>(j, "num_flight_types");
  w.hidden = field<int>(j, "hidden");
  const Json& layers = child(j, "layers");
  w.trunk1 = layer_from(child(layers, "trunk1"));
  w.trunk2 = layer_from(child(layers, "trunk2"));
  w.actor = layer_from(child(layers, "actor"));
  w.critic = layer_from(child(layers, "critic"));
  const Json& r = child(j, "reward");
  try {
    w.reward.variant = reward_variant_from_string(field<std::string>(r, "variant"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  w.reward.horizon = field<int>(r, "horizon");
  w.reward.complete_bonus = field<double>(r, "complete_bonus");
  w.reward.incomplete_penalty = field<double>(r, "incomplete_penalty");
  w.reward.t_move = field<int>(r, "t_move");
  w.train_density = field<double>(j, "train_density");
  w.seed = field<std::uint64_t>(j, "seed");
  try {
    check_weights(w);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return w;
}

Json make_artifact(const std::string& kind, Json body, const std::string& config_hash) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["body"] = std::move(body);
  return j;
}

Json artifact_body(const Json& artifact, const std::string& kind) {
  const int version = field<int>(artifact, "format_version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported format_version " + std::to_string(version));
  }
  const std::string got = field<std::string>(artifact, "kind");
  if (got != kind) throw FormatError("expected a " + kind + " file, got " + got);
  return child(artifact, "body");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(1) + "\n"); }

}  // namespace crew
