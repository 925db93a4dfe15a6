#include "bellsig/io.hpp"

#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "bellsig/error.hpp"

namespace bellsig {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return std::string(s);
}

// Angles are written with 15 significant digits so the degree -> radian ->
// degree trip returns the same text.
std::string format_angle(double deg) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", deg);
  return buf;
}

// ---------------------------------------------------------------------------
// config values

struct RawValue {
  bool is_array = false;
  std::vector<std::string> items;  // one item for scalars

  const std::string& scalar(const std::string& key) const {
    if (is_array || items.size() != 1) throw ValidationError(key, key + ": expected a single value");
    return items.front();
  }
};

RawValue parse_raw(std::string_view text) {
  text = trim(text);
  RawValue v;
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ParseError(0, "unterminated array value");
    v.is_array = true;
    std::string_view body = trim(text.substr(1, text.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      v.items.push_back(unquote(body.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
  } else {
    v.items.push_back(unquote(text));
  }
  return v;
}

double to_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError(key, key + ": not a number: '" + text + "'");
  return v;
}

long long to_integer(const std::string& text, const std::string& key) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError(key, key + ": not an integer: '" + text + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ValidationError(key, key + ": not a nonnegative integer: '" + text + "'");
  return v;
}

bool to_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ValidationError(key, key + ": expected true or false");
}

struct Field {
  std::string key;
  bool indexable = false;
  std::function<void(ExperimentConfig&, const RawValue&, std::optional<std::size_t>)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

void no_index(const std::string& key, std::optional<std::size_t> index) {
  if (index) throw ValidationError(key, key + ": not an array key");
}

template <class Access>
Field number_field(std::string key, Access access, double scale = 1.0) {
  Field f;
  f.key = key;
  f.set = [=](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
    no_index(key, index);
    access(c) = to_double(v.scalar(key), key) * scale;
  };
  f.get = [=](const ExperimentConfig& c) {
    return scale == 1.0 ? format_double(access(c)) : format_angle(access(c) / scale);
  };
  return f;
}

template <class Access>
Field pair_field(std::string key, Access access, double scale = 1.0) {
  Field f;
  f.key = key;
  f.indexable = true;
  f.set = [=](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
    auto& arr = access(c);
    if (index) {
      if (*index >= arr.size()) throw ValidationError(key, key + ": index out of range");
      arr[*index] = to_double(v.scalar(key), key) * scale;
      return;
    }
    if (!v.is_array || v.items.size() != 2) throw ValidationError(key, key + ": expected [value, value]");
    for (std::size_t i = 0; i < 2; ++i) arr[i] = to_double(v.items[i], key) * scale;
  };
  f.get = [=](const ExperimentConfig& c) {
    const auto& arr = access(c);
    auto fmt = [&](double x) { return scale == 1.0 ? format_double(x) : format_angle(x / scale); };
    return "[" + fmt(arr[0]) + ", " + fmt(arr[1]) + "]";
  };
  return f;
}

template <class E, class Access>
Field enum_field(std::string key, Access access, std::vector<std::pair<E, std::string>> names) {
  Field f;
  f.key = key;
  f.set = [=](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
    no_index(key, index);
    const std::string& s = v.scalar(key);
    for (const auto& [e, name] : names)
      if (name == s) {
        access(c) = e;
        return;
      }
    std::string allowed;
    for (const auto& [e, name] : names) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ValidationError(key, key + ": unknown value '" + s + "' (expected one of " + allowed + ")");
  };
  f.get = [=](const ExperimentConfig& c) {
    for (const auto& [e, name] : names)
      if (e == access(c)) return name;
    return std::string("?");
  };
  return f;
}

std::vector<Field> station_fields(int s) {
  const std::string p = s == 0 ? "alice." : "bob.";
  const double deg = kPi / 180.0;
  auto st = [s](auto& c) -> auto& { return c.station(s); };
  return {
      pair_field(p + "hwp_deg", [st](auto& c) -> auto& { return st(c).hwp_targets; }, deg),
      number_field(p + "motor_sigma_deg", [st](auto& c) -> auto& { return st(c).motor_sigma; }, deg),
      enum_field<MotorModel>(p + "motor_model", [st](auto& c) -> auto& { return st(c).motor_model; },
                             {{MotorModel::gaussian, "gaussian"},
                              {MotorModel::uniform, "uniform"},
                              {MotorModel::backlash, "backlash"}}),
      number_field(p + "backlash_deg", [st](auto& c) -> auto& { return st(c).backlash_offset; }, deg),
      number_field(p + "coupling_kappa", [st](auto& c) -> auto& { return st(c).coupling_kappa; }),
      pair_field(p + "detector_eff", [st](auto& c) -> auto& { return st(c).detector_eff; }),
      pair_field(p + "attenuator", [st](auto& c) -> auto& { return st(c).attenuator; }),
      number_field(p + "dark_rate_hz", [st](auto& c) -> auto& { return st(c).dark_rate; }),
  };
}

std::string order_to_text(const std::array<SettingPair, 4>& order) {
  std::string s;
  for (const auto& [x, y] : order) {
    if (!s.empty()) s += ",";
    s += std::to_string(x) + std::to_string(y);
  }
  return s;
}

Field order_field() {
  Field f;
  f.key = "schedule.order";
  f.set = [](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
    const std::string key = "schedule.order";
    no_index(key, index);
    std::vector<std::string> items = v.items;
    if (!v.is_array) {
      items.clear();
      std::string_view rest = v.scalar(key);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        items.emplace_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
    if (items.size() != 4) throw ValidationError(key, key + ": expected four setting pairs such as 00,01,11,10");
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string& it = items[i];
      if (it.size() != 2 || (it[0] != '0' && it[0] != '1') || (it[1] != '0' && it[1] != '1'))
        throw ValidationError(key, key + ": bad setting pair '" + it + "'");
      c.schedule.setting_order[i] = {it[0] - '0', it[1] - '0'};
    }
  };
  f.get = [](const ExperimentConfig& c) { return order_to_text(c.schedule.setting_order); };
  return f;
}

const std::vector<Field>& config_fields() {
  static const std::vector<Field> fields = [] {
    const double deg = kPi / 180.0;
    std::vector<Field> f;
    f.push_back(number_field("source.visibility", [](auto& c) -> auto& { return c.source.visibility; }));
    f.push_back(number_field("source.phase_deg", [](auto& c) -> auto& { return c.source.phase; }, deg));
    f.push_back(number_field("source.pair_rate_hz", [](auto& c) -> auto& { return c.source.pair_rate; }));
    f.push_back(enum_field<DriftKind>("drift.kind", [](auto& c) -> auto& { return c.drift.kind; },
                                      {{DriftKind::none, "none"},
                                       {DriftKind::linear, "linear"},
                                       {DriftKind::random_walk, "random_walk"}}));
    f.push_back(number_field("drift.slope_per_s", [](auto& c) -> auto& { return c.drift.slope; }));
    f.push_back(number_field("drift.step_sigma_per_sqrt_s", [](auto& c) -> auto& { return c.drift.step_sigma; }));
    f.push_back(number_field("drift.floor", [](auto& c) -> auto& { return c.drift.floor; }));
    for (int s = 0; s < 2; ++s)
      for (auto& sf : station_fields(s)) f.push_back(std::move(sf));
    f.push_back(order_field());
    f.push_back(number_field("schedule.block_s", [](auto& c) -> auto& { return c.schedule.block_duration; }));
    {
      Field reps;
      reps.key = "schedule.repetitions";
      reps.set = [](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
        no_index("schedule.repetitions", index);
        const long long r = to_integer(v.scalar("schedule.repetitions"), "schedule.repetitions");
        if (r < 1 || r > 100000000)
          throw ValidationError("schedule.repetitions", "schedule.repetitions: must be >= 1");
        c.schedule.repetitions = static_cast<int>(r);
      };
      reps.get = [](const ExperimentConfig& c) { return std::to_string(c.schedule.repetitions); };
      f.push_back(reps);
    }
    f.push_back(number_field("schedule.total_per_setting_s",
                             [](auto& c) -> auto& { return c.schedule.total_per_setting; }));
    f.push_back(enum_field<AcquisitionMode>(
        "schedule.mode", [](auto& c) -> auto& { return c.schedule.acquisition_mode; },
        {{AcquisitionMode::four_detector, "four_detector"},
         {AcquisitionMode::single_detector_sequential, "single_detector_sequential"}}));
    {
      Field en;
      en.key = "calibration.enabled";
      en.set = [](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
        no_index("calibration.enabled", index);
        c.calibration.enabled = to_bool(v.scalar("calibration.enabled"), "calibration.enabled");
      };
      en.get = [](const ExperimentConfig& c) { return std::string(c.calibration.enabled ? "true" : "false"); };
      f.push_back(en);
    }
    f.push_back(number_field("calibration.tolerance", [](auto& c) -> auto& { return c.calibration.tolerance; }));
    f.push_back(number_field("calibration.block_s", [](auto& c) -> auto& { return c.calibration.block_duration; }));
    {
      Field it;
      it.key = "calibration.max_iterations";
      it.set = [](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
        no_index("calibration.max_iterations", index);
        const long long n = to_integer(v.scalar("calibration.max_iterations"), "calibration.max_iterations");
        if (n < 0 || n > 1000000)
          throw ValidationError("calibration.max_iterations", "calibration.max_iterations: must be >= 0");
        c.calibration.max_iterations = static_cast<int>(n);
      };
      it.get = [](const ExperimentConfig& c) { return std::to_string(c.calibration.max_iterations); };
      f.push_back(it);
    }
    f.push_back(number_field("accidental_rate_hz", [](auto& c) -> auto& { return c.accidental_rate; }));
    f.push_back(number_field("coincidence_window_s", [](auto& c) -> auto& { return c.coincidence_window; }));
    {
      Field seed;
      seed.key = "seed";
      seed.set = [](ExperimentConfig& c, const RawValue& v, std::optional<std::size_t> index) {
        no_index("seed", index);
        c.rng_seed = to_unsigned(v.scalar("seed"), "seed");
      };
      seed.get = [](const ExperimentConfig& c) { return std::to_string(c.rng_seed); };
      f.push_back(seed);
    }
    return f;
  }();
  return fields;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : config_fields())
    if (f.key == key) return f;
  throw ValidationError(key, "unknown configuration key '" + key + "'");
}

// ---------------------------------------------------------------------------
// records

template <class T>
T required(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, "line " + std::to_string(line) + ": missing field " + key);
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer())
      throw ParseError(line, "line " + std::to_string(line) + ": field " + key + " must be an integer");
  } else {
    if (!it->is_number())
      throw ParseError(line, "line " + std::to_string(line) + ": field " + key + " must be a number");
  }
  return it->get<T>();
}

template <std::size_t N>
std::array<std::int64_t, N> required_array(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, "line " + std::to_string(line) + ": missing field " + key);
  if (!it->is_array() || it->size() != N)
    throw ParseError(line, "line " + std::to_string(line) + ": field " + key + " must be an array of " +
                               std::to_string(N) + " integers");
  std::array<std::int64_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!(*it)[i].is_number_integer())
      throw ParseError(line, "line " + std::to_string(line) + ": field " + key + " must hold integers");
    out[i] = (*it)[i].template get<std::int64_t>();
  }
  return out;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------

std::size_t write_records(const std::vector<TrialRecord>& records, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& r : records) {
    ordered_json j;
    j["index"] = r.index;
    j["start_time_s"] = r.start_time;
    j["duration_s"] = r.duration;
    j["x"] = r.x;
    j["y"] = r.y;
    j["n_pp"] = r.counts[0];
    j["n_pm"] = r.counts[1];
    j["n_mp"] = r.counts[2];
    j["n_mm"] = r.counts[3];
    j["singles"] = r.singles;
    j["ss_coinc"] = r.same_station_coinc;
    const std::string line = j.dump() + "\n";
    out << line;
    bytes += line.size();
  }
  if (!out) throw IoError("failed writing records");
  return bytes;
}

std::vector<TrialRecord> read_records(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, "line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(line, "line " + std::to_string(line) + ": expected a JSON object");
    TrialRecord r;
    const auto index = required<std::int64_t>(j, "index", line);
    if (index < 0) throw ValidationError("index", "line " + std::to_string(line) + ": index must be >= 0");
    r.index = static_cast<std::uint64_t>(index);
    r.start_time = required<double>(j, "start_time_s", line);
    r.duration = required<double>(j, "duration_s", line);
    r.x = static_cast<int>(required<std::int64_t>(j, "x", line));
    r.y = static_cast<int>(required<std::int64_t>(j, "y", line));
    r.counts = {required<std::int64_t>(j, "n_pp", line), required<std::int64_t>(j, "n_pm", line),
                required<std::int64_t>(j, "n_mp", line), required<std::int64_t>(j, "n_mm", line)};
    r.singles = required_array<4>(j, "singles", line);
    r.same_station_coinc = required_array<2>(j, "ss_coinc", line);
    try {
      r.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(e.key(), "line " + std::to_string(line) + ": " + e.what());
    }
    out.push_back(r);
  }
  return out;
}

std::size_t write_records_file(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  std::ostringstream os;
  const std::size_t bytes = write_records(records, os);
  atomic_write(path, os.str());
  return bytes;
}

std::vector<TrialRecord> read_records_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file " + path.string());
  return read_records(in);
}

void set_config_value(ExperimentConfig& config, std::string_view key_text, std::string_view value) {
  std::string key(trim(key_text));
  std::optional<std::size_t> index;
  if (const auto open = key.find('['); open != std::string::npos) {
    if (key.back() != ']') throw ValidationError(key, "malformed indexed key '" + key + "'");
    const std::string idx = key.substr(open + 1, key.size() - open - 2);
    const std::string base = key.substr(0, open);
    index = static_cast<std::size_t>(to_unsigned(idx, base));
    key = base;
  }
  const Field& f = find_field(key);
  if (index && !f.indexable) throw ValidationError(key, key + ": not an array key");
  RawValue raw;
  try {
    raw = parse_raw(value);
  } catch (const ParseError& e) {
    throw ValidationError(key, key + ": " + e.what());
  }
  f.set(config, raw, index);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::string_view body = text;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line, "line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ValidationError(key, "line " + std::to_string(line) + ": duplicate key " + key);
    if (key == "format_version") {
      if (value != std::to_string(kFormatVersion))
        throw ValidationError(key, "line " + std::to_string(line) + ": unsupported format_version");
      continue;
    }
    try {
      set_config_value(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(e.key(), "line " + std::to_string(line) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out = "format_version = " + std::to_string(kFormatVersion) + "\n";
  for (const auto& f : config_fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

ordered_json report_to_json(const AnalysisReport& r) {
  ordered_json j;
  j["S"] = r.S;
  j["sigma_stat"] = r.sigma_stat;
  j["sigma_syst"] = r.sigma_syst;
  j["correlators"] = r.correlators;
  ordered_json sig;
  sig["xi"] = r.signaling.xi;
  sig["dof"] = r.signaling.dof;
  sig["log_p"] = finite_or_null(r.signaling.log_p);
  sig["log10_p"] = finite_or_null(r.signaling.log10_p());
  sig["sigma"] = finite_or_null(r.signaling.sigma);
  sig["naive"] = ordered_json::array();
  for (const auto& n : r.signaling.naive) {
    ordered_json e;
    e["label"] = n.label;
    e["s_hat"] = n.s_hat;
    e["sigma_hat"] = n.sigma_hat;
    e["z"] = n.z;
    sig["naive"].push_back(e);
  }
  j["signaling"] = sig;
  j["accidental_rate_hz"] = r.accidental_rate;
  j["format_version"] = kFormatVersion;
  return j;
}

ordered_json calibration_to_json(const CalibrationReport& report, const ExperimentConfig& calibrated) {
  ordered_json j;
  j["converged"] = report.converged;
  j["iterations"] = {{"alice", report.iterations[0]}, {"bob", report.iterations[1]}};
  j["measurements"] = ordered_json::array();
  for (const auto& m : report.measurements) {
    ordered_json e;
    e["station"] = m.station == 0 ? "alice" : "bob";
    e["gamma_hz"] = m.gamma;
    e["gamma_prime_hz"] = m.gamma_prime;
    e["relative_asymmetry"] = m.relative_asymmetry();
    j["measurements"].push_back(e);
  }
  j["alice_attenuator"] = calibrated.alice.attenuator;
  j["bob_attenuator"] = calibrated.bob.attenuator;
  j["format_version"] = kFormatVersion;
  return j;
}

void write_series_csv(const std::vector<SeriesPoint>& series, std::ostream& out) {
  out << kSeriesHeader << "\n";
  for (const auto& p : series) {
    out << format_double(p.elapsed);
    if (p.gap) {
      out << ",,,,,,,\n";
      continue;
    }
    for (double v : {p.S, p.sigma_stat, p.lr_sigma, p.z[0], p.z[1], p.z[2], p.z[3]}) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing series");
}

std::filesystem::path metadata_path(const std::filesystem::path& records_path) {
  return std::filesystem::path(records_path.string() + ".meta.json");
}

ordered_json metadata_to_json(const RunMetadata& meta) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["tool_version"] = meta.tool_version;
  j["seed"] = meta.seed;
  j["created_utc"] = meta.created_utc.empty() ? utc_timestamp() : meta.created_utc;
  j["warnings"] = meta.warnings;
  j["config"] = serialize_config(meta.config);
  return j;
}

RunMetadata metadata_from_json(const json& j) {
  RunMetadata m;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw ValidationError("format_version", "unsupported metadata format_version");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.created_utc = j.at("created_utc").get<std::string>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    m.config = parse_config_text(j.at("config").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed run metadata: ") + e.what());
  }
  if (m.seed != m.config.rng_seed) throw ValidationError("seed", "metadata seed differs from config seed");
  return m;
}

std::optional<RunMetadata> read_metadata_for(const std::filesystem::path& records_path) {
  const auto path = metadata_path(records_path);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  return metadata_from_json(j);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

}  // namespace bellsig
