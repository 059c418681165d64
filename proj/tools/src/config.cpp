#include "tess_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "tess/errors.hpp"
#include "tess/presets.hpp"

namespace tess::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v) {
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

std::uint64_t parse_count(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

template <typename E>
E parse_choice(const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError("expected one of " + names + ", got '" + v + "'");
}

template <typename E>
std::string choice_name(E value, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, v] : options) {
    if (v == value) return name;
  }
  return "?";
}

const std::initializer_list<std::pair<const char*, UpdateMode>> kModes = {
    {"per-sequence", UpdateMode::per_sequence}, {"per-step", UpdateMode::per_step}};
const std::initializer_list<std::pair<const char*, UpdateDirection>> kDirections = {
    {"descent", UpdateDirection::descent}, {"as-written", UpdateDirection::as_written}};
const std::initializer_list<std::pair<const char*, Task>> kTasks = {{"classification", Task::classification},
                                                                     {"regression", Task::regression}};
const std::initializer_list<std::pair<const char*, BasisKind>> kBases = {{"square-wave", BasisKind::square_wave},
                                                                          {"identity", BasisKind::identity}};

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_FIELD(key, member) \
  {key, {[](RunConfig& c, const std::string& v) { c.member = parse_real(v); }, \
         [](const RunConfig& c) { return format_real(c.member); }}}
#define COUNT_FIELD(key, member) \
  {key, {[](RunConfig& c, const std::string& v) { c.member = parse_count(v); }, \
         [](const RunConfig& c) { return std::to_string(c.member); }}}
#define TEXT_FIELD(key, member) \
  {key, {[](RunConfig& c, const std::string& v) { c.member = v; }, [](const RunConfig& c) { return c.member; }}}
#define CHOICE_FIELD(key, member, table) \
  {key, {[](RunConfig& c, const std::string& v) { c.member = parse_choice(v, table); }, \
         [](const RunConfig& c) { return choice_name(c.member, table); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      TEXT_FIELD("model.preset", preset),
      TEXT_FIELD("model.layers", layers),
      REAL_FIELD("lif.gamma", lif.gamma),
      REAL_FIELD("lif.v_th", lif.v_th),
      REAL_FIELD("lif.psi_amplitude", lif.psi_amplitude),
      REAL_FIELD("trace.lambda_pre", trace.lambda_pre),
      REAL_FIELD("trace.lambda_post", trace.lambda_post),
      REAL_FIELD("trace.alpha_pre", trace.alpha_pre),
      REAL_FIELD("trace.alpha_post", trace.alpha_post),
      REAL_FIELD("optim.lr", adam.lr),
      REAL_FIELD("optim.beta1", adam.beta1),
      REAL_FIELD("optim.beta2", adam.beta2),
      REAL_FIELD("optim.eps", adam.eps),
      COUNT_FIELD("sched.patience", sched_patience),
      REAL_FIELD("sched.factor", sched_factor),
      COUNT_FIELD("learn.start", learn_start),
      CHOICE_FIELD("learn.mode", mode, kModes),
      CHOICE_FIELD("learn.direction", direction, kDirections),
      CHOICE_FIELD("learn.task", task, kTasks),
      CHOICE_FIELD("basis.hidden", hidden_basis, kBases),
      CHOICE_FIELD("basis.head", head_basis, kBases),
      TEXT_FIELD("data.source", dataset),
      COUNT_FIELD("train.epochs", epochs),
      COUNT_FIELD("train.batch_size", batch_size),
      COUNT_FIELD("train.threads", threads),
      COUNT_FIELD("seed", seed),
      TEXT_FIELD("out.dir", out_dir),
      {"log.wall_time", {[](RunConfig& c, const std::string& v) { c.wall_time = parse_bool(v); },
                         [](const RunConfig& c) { return std::string(c.wall_time ? "true" : "false"); }}},
  };
  return table;
}

#undef REAL_FIELD
#undef COUNT_FIELD
#undef TEXT_FIELD
#undef CHOICE_FIELD

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw ConfigError("cannot format number");
  return std::string(buf, ptr);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown key '" + key + "'");
  try {
    it->second.set(*this, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown key '" + key + "'");
  return it->second.get(*this);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, f] : fields()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const std::string& k : keys()) out += k + " = " + get(k) + "\n";
  return out;
}

NetworkOptions RunConfig::network_options(std::size_t class_count) const {
  NetworkOptions o;
  o.class_count = class_count;
  o.task = task;
  o.lif = lif;
  o.trace = trace;
  o.learn_start = learn_start;
  o.hidden_basis = hidden_basis;
  o.head_basis = head_basis;
  o.lif.validate();
  o.trace.validate();
  return o;
}

TrainOptions RunConfig::train_options() const {
  if (adam.lr <= 0) throw ConfigError("optim.lr must be positive");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (threads == 0) throw ConfigError("train.threads must be positive");
  if (sched_factor <= 0 || sched_factor > 1) throw ConfigError("sched.factor must be in (0, 1]");
  TrainOptions t;
  t.adam = adam;
  t.direction = direction;
  t.mode = mode;
  t.threads = threads;
  return t;
}

std::vector<LayerSpec> RunConfig::layer_specs(std::size_t class_count) const {
  if (!layers.empty()) return parse_layer_list(layers, class_count);
  return make_preset(preset, class_count).layers;
}

RunConfig parse_config(const std::string& text, RunConfig base, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    try {
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'");
      const std::string key = trim(body.substr(0, eq));
      if (key.empty()) throw ConfigError("empty key");
      base.set(key, trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + " line " + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base), path.string());
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  try {
    if (eq == std::string::npos) throw ConfigError("expected key=value");
    config.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  } catch (const ConfigError& e) {
    throw ConfigError("override '" + assignment + "': " + e.what());
  }
}

std::vector<LayerSpec> parse_layer_list(const std::string& text, std::size_t class_count) {
  std::vector<LayerSpec> specs;
  std::istringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream fields(item);
    std::string part;
    while (std::getline(fields, part, ':')) parts.push_back(trim(part));
    auto count = [&](std::size_t i, std::uint64_t fallback) -> std::size_t {
      if (i >= parts.size()) return fallback;
      if (parts[i] == "C") return class_count;
      try {
        return parse_count(parts[i]);
      } catch (const ConfigError& e) {
        throw ConfigError("layer '" + item + "': " + e.what());
      }
    };
    const std::string& kind = parts.front();
    if (kind == "dense" && parts.size() == 2) {
      specs.push_back(LayerSpec::dense(count(1, 0)));
    } else if (kind == "conv" && parts.size() >= 2 && parts.size() <= 5) {
      specs.push_back(LayerSpec::conv(count(1, 0), count(2, 3), count(3, 1), count(4, 1)));
    } else if (kind == "avgpool" && parts.size() <= 2) {
      specs.push_back(LayerSpec::avgpool(count(1, 2)));
    } else {
      throw ConfigError("cannot parse layer '" + item + "' (dense:N, conv:CH[:K[:S[:P]]], avgpool[:W])");
    }
  }
  if (specs.empty()) throw ConfigError("empty layer list");
  return specs;
}

}  // namespace tess::cli
