// Grid config files: `key = value` lines, '#' comments, comma-separated lists.
// Relative paths resolve against the directory holding the config file.

#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rscc/evaluation.hpp"

namespace rscc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  const double v = parse_number<double>(s);
  if (!std::isfinite(v)) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad boolean '" + s + "'");
}

}  // namespace

GridConfig parse_grid_config(std::istream& is, const std::filesystem::path& base_dir) {
  GridConfig c;
  const auto path = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  const auto ints = [](const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(parse_number<int>(s));
    return out;
  };

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"methods", [&](const std::string& v) {
         c.methods.clear();
         for (const auto& s : split_list(v)) c.methods.push_back(parse_method(s));
       }},
      {"bins", [&](const std::string& v) { c.bins = ints(v); }},
      {"dims", [&](const std::string& v) { c.dims = ints(v); }},
      {"seeds", [&](const std::string& v) {
         c.seeds.clear();
         for (const auto& s : split_list(v)) c.seeds.push_back(parse_number<std::uint64_t>(s));
       }},
      {"cameras", [&](const std::string& v) {
         c.cameras.clear();
         for (const auto& s : split_list(v)) c.cameras.push_back(path(s));
       }},
      {"dataset", [&](const std::string& v) { c.dataset = path(v); }},
      {"illuminants", [&](const std::string& v) { c.illuminants = path(v); }},
      {"projection_set", [&](const std::string& v) {
         if (v.empty()) c.projection_set.reset();
         else c.projection_set = path(v);
       }},
      {"kmeans_k", [&](const std::string& v) { c.kmeans_k = parse_number<int>(v); }},
      {"kmeans_seed", [&](const std::string& v) { c.kmeans_seed = parse_number<std::uint64_t>(v); }},
      {"ill_pca_full_set", [&](const std::string& v) { c.ill_pca_full_set = parse_bool(v); }},
      {"fit_downsample", [&](const std::string& v) { c.fit_downsample = parse_number<int>(v); }},
      {"lda_downsample", [&](const std::string& v) { c.lda_downsample = parse_number<int>(v); }},
      {"model_downsample", [&](const std::string& v) { c.model_downsample = parse_number<int>(v); }},
      {"score_mode", [&](const std::string& v) { c.score_mode = parse_score_mode(v); }},
      {"smoothing", [&](const std::string& v) { c.smoothing = parse_double(v); }},
      {"nnmf_seed", [&](const std::string& v) { c.nnmf_seed = parse_number<std::uint64_t>(v); }},
      {"nnmf_max_iter", [&](const std::string& v) { c.nnmf_max_iter = parse_number<int>(v); }},
      {"nnmf_tol", [&](const std::string& v) { c.nnmf_tol = parse_double(v); }},
      {"lda_shrinkage", [&](const std::string& v) { c.lda_shrinkage = parse_double(v); }},
      {"test_on_train", [&](const std::string& v) { c.test_on_train = parse_bool(v); }},
      {"threads", [&](const std::string& v) { c.threads = parse_number<int>(v); }},
      {"output_dir", [&](const std::string& v) { c.output_dir = path(v); }},
      {"noise_method", [&](const std::string& v) { c.noise_method = parse_method(v); }},
      {"noise_dprime", [&](const std::string& v) { c.noise_dprime = parse_number<int>(v); }},
      {"noise_bins", [&](const std::string& v) { c.noise_bins = parse_number<int>(v); }},
      {"noise_levels", [&](const std::string& v) {
         c.noise_levels.clear();
         for (const auto& s : split_list(v)) c.noise_levels.push_back(parse_double(s));
       }},
      {"noise_seed", [&](const std::string& v) { c.noise_seed = parse_number<std::uint64_t>(v); }},
      {"noise_variant", [&](const std::string& v) { c.noise_variant = v; }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const auto where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw std::invalid_argument(where + "expected `key = value`");
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument(where + "unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + key + ": " + e.what());
    }
  }
  return c;
}

GridConfig parse_grid_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  return parse_grid_config(is, path.parent_path());
}

}  // namespace rscc
