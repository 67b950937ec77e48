#include "vesseltrace/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace vesseltrace {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void type_error(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorKind::TypeMismatch,
              std::string(key) + ": expected " + expected + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) type_error(key, value, "a number");
  return v;
}

long to_long(std::string_view key, std::string_view value) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) type_error(key, value, "an integer");
  return v;
}

int to_int(std::string_view key, std::string_view value) {
  const long v = to_long(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) type_error(key, value, "an int");
  return static_cast<int>(v);
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  type_error(key, value, "true or false");
}

// Shortest text that parses back to the same double.
std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

struct KeySpec {
  std::string name;
  std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename Field>
KeySpec double_key(std::string name, Field field) {
  return {std::move(name),
          [field](PipelineConfig& c, std::string_view k, std::string_view v) { field(c) = to_double(k, v); },
          [field](const PipelineConfig& c) { return fmt_double(field(c)); }};
}

template <typename Field>
KeySpec int_key(std::string name, Field field) {
  return {std::move(name),
          [field](PipelineConfig& c, std::string_view k, std::string_view v) { field(c) = to_int(k, v); },
          [field](const PipelineConfig& c) { return std::to_string(field(c)); }};
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    s.push_back(int_key("preprocess.tophat_radius", [](auto& c) -> auto& { return c.preprocess.tophat_radius; }));
    s.push_back({"preprocess.tophat_enabled",
                 [](PipelineConfig& c, std::string_view k, std::string_view v) { c.preprocess.tophat_enabled = to_bool(k, v); },
                 [](const PipelineConfig& c) { return std::string(c.preprocess.tophat_enabled ? "true" : "false"); }});
    s.push_back(int_key("preprocess.pad_width", [](auto& c) -> auto& { return c.preprocess.pad_width; }));
    s.push_back(int_key("preprocess.clahe_tiles_x", [](auto& c) -> auto& { return c.preprocess.clahe_tiles_x; }));
    s.push_back(int_key("preprocess.clahe_tiles_y", [](auto& c) -> auto& { return c.preprocess.clahe_tiles_y; }));
    s.push_back(double_key("preprocess.clahe_clip", [](auto& c) -> auto& { return c.preprocess.clahe_clip; }));
    s.push_back(int_key("preprocess.clahe_bins", [](auto& c) -> auto& { return c.preprocess.clahe_bins; }));
    s.push_back(double_key("preprocess.fov_threshold", [](auto& c) -> auto& { return c.preprocess.fov_threshold; }));

    s.push_back(double_key("filter.sigma", [](auto& c) -> auto& { return c.filter.sigma; }));
    s.push_back({"filter.rho_list",
                 [](PipelineConfig& c, std::string_view k, std::string_view v) {
                   std::vector<double> rhos;
                   for (auto part : split(v, ',')) rhos.push_back(to_double(k, part));
                   c.filter.rho_list = std::move(rhos);
                 },
                 [](const PipelineConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.filter.rho_list.size(); ++i) {
                     if (i) out += ",";
                     out += fmt_double(c.filter.rho_list[i]);
                   }
                   return out;
                 }});
    s.push_back(double_key("filter.sigma0", [](auto& c) -> auto& { return c.filter.sigma0; }));
    s.push_back(double_key("filter.alpha", [](auto& c) -> auto& { return c.filter.alpha; }));
    s.push_back(double_key("filter.t", [](auto& c) -> auto& { return c.filter.t; }));
    s.push_back(int_key("filter.n_orientations", [](auto& c) -> auto& { return c.filter.n_orientations; }));
    s.push_back(int_key("filter.weight_exponent", [](auto& c) -> auto& { return c.filter.weight_exponent; }));
    s.push_back({"filter.dog_polarity",
                 [](PipelineConfig& c, std::string_view k, std::string_view v) {
                   if (v == "center-on") c.filter.dog_polarity = DogPolarity::CenterOn;
                   else if (v == "center-off") c.filter.dog_polarity = DogPolarity::CenterOff;
                   else type_error(k, v, "center-on or center-off");
                 },
                 [](const PipelineConfig& c) {
                   return std::string(c.filter.dog_polarity == DogPolarity::CenterOn ? "center-on" : "center-off");
                 }});
    s.push_back(double_key("filter.dog_kernel_radius_factor",
                           [](auto& c) -> auto& { return c.filter.dog_kernel_radius_factor; }));

    s.push_back({"post.min_cluster",
                 [](PipelineConfig& c, std::string_view k, std::string_view v) {
                   const long n = to_long(k, v);
                   if (n < 0) type_error(k, v, "a count >= 0");
                   c.post.min_cluster = static_cast<std::size_t>(n);
                 },
                 [](const PipelineConfig& c) { return std::to_string(c.post.min_cluster); }});
    s.push_back(int_key("post.otsu_bins", [](auto& c) -> auto& { return c.post.otsu_bins; }));
    s.push_back({"post.connectivity",
                 [](PipelineConfig& c, std::string_view k, std::string_view v) {
                   const int n = to_int(k, v);
                   if (n != 4 && n != 8) type_error(k, v, "4 or 8");
                   c.post.connectivity = n == 4 ? Connectivity::Four : Connectivity::Eight;
                 },
                 [](const PipelineConfig& c) { return std::to_string(static_cast<int>(c.post.connectivity)); }});

    s.push_back(int_key("eval.gt_observer", [](auto& c) -> auto& { return c.eval.gt_observer; }));
    s.push_back(int_key("eval.auc_thresholds", [](auto& c) -> auto& { return c.eval.auc_thresholds; }));
    return s;
  }();
  return specs;
}

const KeySpec& find_key(std::string_view key) {
  for (const auto& spec : key_specs()) {
    if (spec.name == key) return spec;
  }
  throw Error(ErrorKind::UnknownKey, std::string(key));
}

// Calls fn(line_number, key, value) for every non-blank, non-comment line.
template <typename Fn>
void for_each_assignment(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": missing key");
      }
      try {
        fn(key, value);
      } catch (const Error& e) {
        throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileMissing, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void EvaluationConfig::validate() const {
  if (gt_observer != 1 && gt_observer != 2) throw Error(ErrorKind::OutOfRange, "eval.gt_observer must be 1 or 2");
  if (auc_thresholds < 1) throw Error(ErrorKind::OutOfRange, "eval.auc_thresholds must be >= 1");
}

void PipelineConfig::validate() const {
  preprocess.validate();
  filter.validate();
  post.validate();
  eval.validate();
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  find_key(key).set(cfg, key, value);
}

std::string get_config_value(const PipelineConfig& cfg, std::string_view key) { return find_key(key).get(cfg); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& spec : key_specs()) k.push_back(spec.name);
    return k;
  }();
  return keys;
}

PipelineConfig parse_config_text(std::string_view text) {
  PipelineConfig cfg;
  for_each_assignment(text, [&](std::string_view key, std::string_view value) { set_config_value(cfg, key, value); });
  cfg.validate();
  return cfg;
}

PipelineConfig parse_config(const std::filesystem::path& path) { return parse_config_text(read_text(path)); }

std::string serialize_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& spec : key_specs()) {
    out += spec.name + " = " + spec.get(cfg) + "\n";
  }
  return out;
}

SweepGrid parse_grid_text(std::string_view text) {
  SweepGrid grid;
  for_each_assignment(text, [&](std::string_view key, std::string_view value) {
    const KeySpec& spec = find_key(key);
    for (const auto& axis : grid) {
      if (axis.key == key) throw Error(ErrorKind::ParseError, "duplicate grid key " + std::string(key));
    }
    SweepAxis axis{spec.name, {}};
    const char sep = key == "filter.rho_list" ? '|' : ',';
    for (auto part : split(value, sep)) {
      if (part.empty()) throw Error(ErrorKind::ParseError, "empty value for " + std::string(key));
      PipelineConfig probe;
      spec.set(probe, key, part);  // type-check now, not mid-sweep
      axis.values.emplace_back(part);
    }
    grid.push_back(std::move(axis));
  });
  return grid;
}

SweepGrid parse_grid(const std::filesystem::path& path) { return parse_grid_text(read_text(path)); }

std::size_t grid_size(const SweepGrid& grid) {
  std::size_t n = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / axis.values.size()) return std::numeric_limits<std::size_t>::max();
    n *= axis.values.size();
  }
  return n;
}

std::vector<std::pair<std::string, std::string>> grid_combination(const SweepGrid& grid, std::size_t index) {
  std::vector<std::pair<std::string, std::string>> out(grid.size());
  for (std::size_t i = grid.size(); i-- > 0;) {
    const auto& axis = grid[i];
    out[i] = {axis.key, axis.values[index % axis.values.size()]};
    index /= axis.values.size();
  }
  return out;
}

}  // namespace vesseltrace
