#pragma once

// Run-configuration file: INI-style sections of key = value lines driving the
// whole pipeline. '#' and ';' lines are comments. Parse errors carry
// path:line positions. The resolved (defaulted + overridden) configuration
// can be rendered back out for embedding in artifacts.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bnkit/averaging.hpp"
#include "bnkit/dataset.hpp"
#include "bnkit/search.hpp"
#include "bnkit/transform.hpp"
#include "bnkit/validation.hpp"

namespace bnkit {

struct RunConfig {
  // [data]
  std::string csv;
  std::string na = "NA";

  // [schema] column = continuous|discrete[, percent]
  Schema schema;
  std::vector<std::string> schema_order;  // declaration order, for reporting

  // [recode] column = old:new, old:new, ...
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> recode;

  // [constraints]
  int strategy = 1;  // 1: blacklist only; 2: + within-domain whitelist
  std::string blacklist_file;
  std::string whitelist_file;
  std::string domains_file;

  // [search]
  ScoreType score = ScoreType::BIC;
  int restarts = 2;
  int perturbation = 5;
  std::uint64_t seed = 1;
  int max_parents = 0;

  // [averaging]
  int replicates = 1000;
  double strength_threshold = 0.85;
  double direction_threshold = 0.7;
  std::uint64_t averaging_seed = 1;

  // [cv]
  int folds = 10;
  std::uint64_t cv_seed = 1;
  bool standardize = false;
  std::string cv_mode = "fixed";  // or "relearn"
  bool cv_average = false;

  // [preprocess]
  bool impute = true;
  int knn_k = 10;
  bool apply_transforms = true;
  std::vector<TransformKind> battery = default_battery();

  // [analyze]
  std::vector<std::string> influence;  // node names for influence sections

  // [output]
  std::string out_dir = ".";
};

namespace detail {

struct ConfigPos {
  std::string path;
  std::size_t line = 0;
  std::string where() const { return path + ":" + std::to_string(line); }
};

[[noreturn]] inline void config_fail(const ConfigPos& pos, const std::string& msg) {
  throw config_error(pos.where() + ": " + msg);
}

inline long parse_int(const std::string& v, const ConfigPos& pos) {
  long out = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e) config_fail(pos, "expected an integer, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_seed(const std::string& v, const ConfigPos& pos) {
  std::uint64_t out = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e)
    config_fail(pos, "expected a non-negative integer seed, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& v, const ConfigPos& pos) {
  double out = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e) config_fail(pos, "expected a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v, const ConfigPos& pos) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  config_fail(pos, "expected a boolean (true/false), got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

inline void apply_config_entry(RunConfig& cfg, const std::string& section,
                               const std::string& key, const std::string& value,
                               const ConfigPos& pos) {
  auto unknown_key = [&]() {
    config_fail(pos, "unknown key '" + key + "' in section [" + section + "]");
  };
  if (section == "data") {
    if (key == "csv") cfg.csv = value;
    else if (key == "na") cfg.na = value;
    else unknown_key();
  } else if (section == "schema") {
    ColumnSpec spec;
    bool kind_set = false;
    for (const auto& tok : split_list(value)) {
      if (tok == "continuous") { spec.kind = NodeKind::Continuous; kind_set = true; }
      else if (tok == "discrete") { spec.kind = NodeKind::Discrete; kind_set = true; }
      else if (tok == "percent") spec.percent_scale = true;
      else config_fail(pos, "unknown schema token '" + tok + "' for column " + key);
    }
    if (!kind_set) config_fail(pos, "column " + key + " needs 'continuous' or 'discrete'");
    if (spec.kind == NodeKind::Discrete && spec.percent_scale)
      config_fail(pos, "column " + key + ": 'percent' applies to continuous columns only");
    if (!cfg.schema.emplace(key, spec).second)
      config_fail(pos, "column " + key + " declared twice");
    cfg.schema_order.push_back(key);
  } else if (section == "recode") {
    std::vector<std::pair<std::string, std::string>> mapping;
    for (const auto& tok : split_list(value)) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        config_fail(pos, "recode entries must be old:new, got '" + tok + "'");
      mapping.emplace_back(trim(tok.substr(0, colon)), trim(tok.substr(colon + 1)));
    }
    if (mapping.empty()) config_fail(pos, "empty recode map for column " + key);
    cfg.recode[key] = std::move(mapping);
  } else if (section == "constraints") {
    if (key == "strategy") {
      const long s = parse_int(value, pos);
      if (s != 1 && s != 2) config_fail(pos, "strategy must be 1 or 2");
      cfg.strategy = static_cast<int>(s);
    } else if (key == "blacklist") cfg.blacklist_file = value;
    else if (key == "whitelist") cfg.whitelist_file = value;
    else if (key == "domains") cfg.domains_file = value;
    else unknown_key();
  } else if (section == "search") {
    if (key == "score") {
      if (value == "bic") cfg.score = ScoreType::BIC;
      else if (value == "aic") cfg.score = ScoreType::AIC;
      else config_fail(pos, "score must be bic or aic");
    } else if (key == "restarts") cfg.restarts = static_cast<int>(parse_int(value, pos));
    else if (key == "perturbation") cfg.perturbation = static_cast<int>(parse_int(value, pos));
    else if (key == "seed") cfg.seed = parse_seed(value, pos);
    else if (key == "max_parents") cfg.max_parents = static_cast<int>(parse_int(value, pos));
    else unknown_key();
  } else if (section == "averaging") {
    if (key == "replicates") cfg.replicates = static_cast<int>(parse_int(value, pos));
    else if (key == "strength_threshold") cfg.strength_threshold = parse_real(value, pos);
    else if (key == "direction_threshold") cfg.direction_threshold = parse_real(value, pos);
    else if (key == "seed") cfg.averaging_seed = parse_seed(value, pos);
    else unknown_key();
  } else if (section == "cv") {
    if (key == "folds") cfg.folds = static_cast<int>(parse_int(value, pos));
    else if (key == "seed") cfg.cv_seed = parse_seed(value, pos);
    else if (key == "standardize") cfg.standardize = parse_bool(value, pos);
    else if (key == "mode") {
      if (value != "fixed" && value != "relearn")
        config_fail(pos, "cv mode must be fixed or relearn");
      cfg.cv_mode = value;
    } else if (key == "average") cfg.cv_average = parse_bool(value, pos);
    else unknown_key();
  } else if (section == "preprocess") {
    if (key == "impute") cfg.impute = parse_bool(value, pos);
    else if (key == "k") cfg.knn_k = static_cast<int>(parse_int(value, pos));
    else if (key == "apply_transforms") cfg.apply_transforms = parse_bool(value, pos);
    else if (key == "transforms") {
      cfg.battery.clear();
      for (const auto& tok : split_list(value)) {
        try {
          cfg.battery.push_back(transform_from_name(tok));
        } catch (const argument_error& e) {
          config_fail(pos, e.what());
        }
      }
      if (cfg.battery.empty()) config_fail(pos, "empty transform battery");
    } else unknown_key();
  } else if (section == "analyze") {
    if (key == "influence") cfg.influence = split_list(value);
    else unknown_key();
  } else if (section == "output") {
    if (key == "dir") cfg.out_dir = value;
    else unknown_key();
  } else {
    config_fail(pos, "unknown section [" + section + "]");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  std::string section;
  detail::ConfigPos pos{path, 0};
  while (std::getline(in, line)) {
    ++pos.line;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') detail::config_fail(pos, "malformed section header: " + t);
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section.empty()) detail::config_fail(pos, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      detail::config_fail(pos, "expected key = value, got '" + t + "'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) detail::config_fail(pos, "empty key");
    if (section.empty()) detail::config_fail(pos, "key '" + key + "' outside any section");
    detail::apply_config_entry(cfg, section, key, value, pos);
  }
  if (cfg.csv.empty()) throw config_error(path + ": [data] csv is required");
  if (cfg.schema.empty()) throw config_error(path + ": [schema] section is required");
  return cfg;
}

// One `--set section.key=value` command-line override.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw config_error("--set expects section.key=value, got '" + assignment + "'");
  const std::string target = detail::trim(assignment.substr(0, eq));
  const std::string value = detail::trim(assignment.substr(eq + 1));
  const auto dot = target.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == target.size())
    throw config_error("--set expects section.key=value, got '" + assignment + "'");
  detail::ConfigPos pos{"--set " + target, 0};
  detail::apply_config_entry(cfg, target.substr(0, dot), target.substr(dot + 1), value, pos);
}

// Apply the [recode] relabelings to a loaded table. Old labels must exist in
// the column's dictionary; several old labels may map onto one new label, in
// which case the levels merge. Codes are reassigned so the dictionary stays
// sorted by label.
inline void apply_recodes(MixedTable& t, const RunConfig& cfg) {
  for (const auto& [name, mapping] : cfg.recode) {
    const auto j = t.find(name);
    if (!j) throw data_error("recode: unknown column " + name);
    Column& col = t.column(*j);
    if (col.kind != NodeKind::Discrete)
      throw data_error("recode: column " + name + " is not discrete");
    std::vector<std::string> relabeled = col.levels;
    for (const auto& [from, to] : mapping) {
      const auto it = std::find(col.levels.begin(), col.levels.end(), from);
      if (it == col.levels.end())
        throw data_error("recode: column " + name + " has no level '" + from + "'");
      relabeled[static_cast<std::size_t>(it - col.levels.begin())] = to;
    }
    std::vector<std::string> merged = relabeled;
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    std::vector<int> code_map(relabeled.size());
    for (std::size_t k = 0; k < relabeled.size(); ++k) {
      const auto it = std::lower_bound(merged.begin(), merged.end(), relabeled[k]);
      code_map[k] = static_cast<int>(it - merged.begin());
    }
    for (auto& code : col.codes)
      if (code >= 0) code = code_map[static_cast<std::size_t>(code)];
    col.levels = std::move(merged);
  }
}

// Canonical `section.key = value` lines covering every effective setting;
// embedded verbatim in artifacts so a run can be reproduced from its outputs.
inline std::vector<std::string> resolved_config_lines(const RunConfig& cfg) {
  std::vector<std::string> out;
  auto put = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
  put("data.csv", cfg.csv);
  put("data.na", cfg.na);
  for (const auto& name : cfg.schema_order) {
    const ColumnSpec& s = cfg.schema.at(name);
    std::string v = s.kind == NodeKind::Discrete ? "discrete" : "continuous";
    if (s.percent_scale) v += ", percent";
    put("schema." + name, v);
  }
  for (const auto& [column, mapping] : cfg.recode) {
    std::string v;
    for (std::size_t i = 0; i < mapping.size(); ++i) {
      if (i) v += ", ";
      v += mapping[i].first + ":" + mapping[i].second;
    }
    put("recode." + column, v);
  }
  put("constraints.strategy", std::to_string(cfg.strategy));
  if (!cfg.blacklist_file.empty()) put("constraints.blacklist", cfg.blacklist_file);
  if (!cfg.whitelist_file.empty()) put("constraints.whitelist", cfg.whitelist_file);
  if (!cfg.domains_file.empty()) put("constraints.domains", cfg.domains_file);
  put("search.score", score_name(cfg.score));
  put("search.restarts", std::to_string(cfg.restarts));
  put("search.perturbation", std::to_string(cfg.perturbation));
  put("search.seed", std::to_string(cfg.seed));
  put("search.max_parents", std::to_string(cfg.max_parents));
  put("averaging.replicates", std::to_string(cfg.replicates));
  put("averaging.strength_threshold", detail::format_double(cfg.strength_threshold));
  put("averaging.direction_threshold", detail::format_double(cfg.direction_threshold));
  put("averaging.seed", std::to_string(cfg.averaging_seed));
  put("cv.folds", std::to_string(cfg.folds));
  put("cv.seed", std::to_string(cfg.cv_seed));
  put("cv.standardize", cfg.standardize ? "true" : "false");
  put("cv.mode", cfg.cv_mode);
  put("cv.average", cfg.cv_average ? "true" : "false");
  put("preprocess.impute", cfg.impute ? "true" : "false");
  put("preprocess.k", std::to_string(cfg.knn_k));
  put("preprocess.apply_transforms", cfg.apply_transforms ? "true" : "false");
  {
    std::string v;
    for (std::size_t i = 0; i < cfg.battery.size(); ++i) {
      if (i) v += ", ";
      v += transform_name(cfg.battery[i]);
    }
    put("preprocess.transforms", v);
  }
  if (!cfg.influence.empty()) {
    std::string v;
    for (std::size_t i = 0; i < cfg.influence.size(); ++i) {
      if (i) v += ", ";
      v += cfg.influence[i];
    }
    put("analyze.influence", v);
  }
  put("output.dir", cfg.out_dir);
  return out;
}

}  // namespace bnkit
