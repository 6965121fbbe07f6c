#include <charconv>
#include <fstream>
#include <sstream>

#include "mazenet/error.hpp"
#include "mazenet/experiment.hpp"

namespace mazenet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string normalize_key(std::string_view key) {
  key = trim(key);
  while (!key.empty() && key.front() == '-') key.remove_prefix(1);
  std::string out(key);
  for (char& c : out)
    if (c == '_') c = '-';
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty())
    throw ArgumentError("invalid value '" + std::string(value) + "' for " + std::string(key));
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ArgumentError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace

std::vector<Method> parse_method_list(std::string_view text) {
  text = trim(text);
  if (text == "all") return {kMethods.begin(), kMethods.end()};
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const Method m = parse_method(trim(text.substr(start, end - start)));
    for (Method seen : out)
      if (seen == m) throw ArgumentError("method '" + std::string(to_string(m)) + "' listed twice");
    out.push_back(m);
    start = end + 1;
  }
  return out;
}

void apply_setting(ExperimentConfig& config, std::string_view raw_key, std::string_view value) {
  const std::string key = normalize_key(raw_key);
  TrainingConfig& t = config.training;
  if (key == "n") {
    config.maze_n = parse_number<int>(key, value);
  } else if (key == "train-count") {
    config.train_count = parse_number<int>(key, value);
  } else if (key == "test-count") {
    config.test_count = parse_number<int>(key, value);
  } else if (key == "obstacle-fraction") {
    config.obstacle_fraction = parse_number<double>(key, value);
  } else if (key == "method") {
    config.methods = parse_method_list(value);
  } else if (key == "sets") {
    config.batch_sets = parse_number<int>(key, value);
  } else if (key == "seed") {
    config.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "epochs") {
    t.epochs = parse_number<int>(key, value);
  } else if (key == "r") {
    t.R = parse_number<double>(key, value);
  } else if (key == "k0") {
    t.k0_scale = parse_number<double>(key, value);
  } else if (key == "process-noise") {
    t.process_noise = parse_number<double>(key, value);
  } else if (key == "gain-mode") {
    const auto v = trim(value);
    if (v == "solve" || v == "linear-solve" || v == "linear_solve")
      t.gain_mode = GainMode::LinearSolve;
    else if (v == "inverse" || v == "naive-inverse" || v == "naive_inverse")
      t.gain_mode = GainMode::NaiveInverse;
    else
      throw ArgumentError("invalid gain-mode '" + std::string(v) + "' (expected solve or inverse)");
  } else if (key == "core-iterations") {
    t.core_iterations = parse_number<int>(key, value);
  } else if (key == "recurrent") {
    t.n_recurrent = parse_number<int>(key, value);
  } else if (key == "fd-step") {
    t.fd_step = parse_number<double>(key, value);
  } else if (key == "per-maze-updates") {
    t.per_maze_updates = parse_bool(key, value);
  } else if (key == "schedule") {
    const auto v = trim(value);
    if (v == "tens")
      t.schedule = ReclusterSchedule::Tens;
    else if (v == "offset")
      t.schedule = ReclusterSchedule::Offset;
    else
      throw ArgumentError("invalid schedule '" + std::string(v) + "' (expected tens or offset)");
  } else if (key == "cluster-k") {
    t.cluster_k = parse_number<int>(key, value);
  } else if (key == "submaze-m") {
    t.submaze_m = parse_number<int>(key, value);
  } else if (key == "train-obstacles") {
    t.train_obstacles = parse_bool(key, value);
  } else if (key == "obstacle-target") {
    t.obstacle_target = parse_number<double>(key, value);
  } else {
    throw ArgumentError("unknown setting '" + std::string(raw_key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, 0);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line_no, 1);
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (maze_n < 3) throw ArgumentError("n must be >= 3");
  if (train_count < 1 || test_count < 1) throw ArgumentError("maze counts must be positive");
  if (batch_sets < 1) throw ArgumentError("sets must be positive");
  if (!(obstacle_fraction >= 0.0 && obstacle_fraction <= 0.5))
    throw ArgumentError("obstacle-fraction must lie in [0, 0.5]");
  if (methods.empty()) throw ArgumentError("no method selected");
  if (training.epochs < 0) throw ArgumentError("epochs must be >= 0");
  if (training.n_recurrent < 1) throw ArgumentError("recurrent must be >= 1");
  if (training.core_iterations < 0) throw ArgumentError("core-iterations must be >= 0");
  if (!(training.R > 0.0)) throw ArgumentError("r must be positive");
  if (!(training.k0_scale > 0.0)) throw ArgumentError("k0 must be positive");
  if (!(training.process_noise >= 0.0)) throw ArgumentError("process-noise must be >= 0");
  if (!(training.fd_step > 0.0)) throw ArgumentError("fd-step must be positive");
  for (Method m : methods) {
    if (m == Method::Submaze && (training.submaze_m < 1 || maze_n % training.submaze_m != 0))
      throw ArgumentError("submaze-m " + std::to_string(training.submaze_m) +
                          " must divide n " + std::to_string(maze_n));
    if ((m == Method::Cluster || m == Method::ClusterDuringEpochs) &&
        (training.cluster_k < 1 || training.cluster_k > maze_n * maze_n))
      throw ArgumentError("cluster-k must lie in [1, n*n]");
  }
}

}  // namespace mazenet
