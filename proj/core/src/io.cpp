#include "mcfuse/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "text_file.hpp"

namespace mcfuse {

using nlohmann::json;

namespace {

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

json parse_json_line(const std::string& line, const TextFile& file) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    file.fail(std::string("invalid JSON: ") + e.what());
  }
}

double parse_double(const std::string& text, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": expected a number, got '" + text + "'");
  }
}

long long parse_integer(const std::string& text, std::string_view what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + ": expected an integer, got '" + text + "'");
  }
}

WordTuple tuple_from(const json& j, const TextFile& file) {
  if (!j.is_array()) file.fail("word tuple must be a JSON array of strings");
  std::vector<std::string> words;
  for (const auto& w : j) {
    if (!w.is_string()) file.fail("word tuple must be a JSON array of strings");
    words.push_back(w.get<std::string>());
  }
  try {
    return WordTuple(std::move(words));
  } catch (const InputError& e) {
    file.fail(e.what());
  }
}

void tuple_to(std::string& out, const WordTuple& t) {
  out += '[';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i > 0) out += ',';
    out += json_string(t[i]);
  }
  out += ']';
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot replace " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------

QuestionSet read_questions(const std::filesystem::path& path) {
  TextFile file(path);
  std::vector<Instance> instances;
  std::string line;
  while (file.next_line(line)) {
    const json j = parse_json_line(line, file);
    if (!j.is_object() || !j.contains("id") || !j.contains("stem") || !j.contains("choices") ||
        !j.contains("answer")) {
      file.fail("question record needs id, stem, choices and answer");
    }
    Instance inst;
    if (!j["id"].is_string()) file.fail("id must be a string");
    inst.id = j["id"].get<std::string>();
    inst.stem = tuple_from(j["stem"], file);
    if (!j["choices"].is_array()) file.fail("choices must be an array");
    for (const auto& c : j["choices"]) inst.choices.push_back(tuple_from(c, file));
    if (!j["answer"].is_number_unsigned()) file.fail("answer must be a nonnegative integer");
    inst.answer = j["answer"].get<std::size_t>();
    try {
      inst.validate();
    } catch (const InputError& e) {
      file.fail(e.what());
    }
    instances.push_back(std::move(inst));
  }
  try {
    return QuestionSet(std::move(instances));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string serialize_questions(const QuestionSet& questions) {
  std::string out;
  for (const auto& inst : questions.instances()) {
    out += "{\"id\":" + json_string(inst.id) + ",\"stem\":";
    tuple_to(out, inst.stem);
    out += ",\"choices\":[";
    for (std::size_t j = 0; j < inst.k(); ++j) {
      if (j > 0) out += ',';
      tuple_to(out, inst.choices[j]);
    }
    out += "],\"answer\":" + std::to_string(inst.answer) + "}\n";
  }
  return out;
}

void write_questions(const std::filesystem::path& path, const QuestionSet& questions) {
  write_file_atomic(path, serialize_questions(questions));
}

std::string question_digest(const QuestionSet& questions) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_questions(questions)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
  return buf;
}

// ---------------------------------------------------------------------------

CacheContents read_forecast_cache(const std::filesystem::path& path) {
  TextFile file(path);
  std::vector<std::string> instance_ids;
  std::vector<std::string> module_ids;
  std::unordered_map<std::string, std::size_t> instance_index;
  std::unordered_map<std::string, std::size_t> module_index;
  std::map<std::pair<std::size_t, std::size_t>, Distribution> cells;
  CacheContents contents;

  std::string line;
  std::size_t k = 0;
  while (file.next_line(line)) {
    const json j = parse_json_line(line, file);
    if (!j.is_object() || !j.contains("instance") || !j.contains("module") || !j.contains("probs") ||
        !j["instance"].is_string() || !j["module"].is_string() || !j["probs"].is_array()) {
      file.fail("cache record needs string instance, string module and a probs array");
    }
    std::vector<double> probs;
    for (const auto& p : j["probs"]) {
      if (!p.is_number()) file.fail("probabilities must be numbers");
      probs.push_back(p.get<double>());
    }
    if (k == 0) k = probs.size();
    if (probs.size() != k) file.fail("probability vector length differs from earlier records");

    const auto inst = j["instance"].get<std::string>();
    const auto mod = j["module"].get<std::string>();
    auto [ii, new_inst] = instance_index.try_emplace(inst, instance_ids.size());
    if (new_inst) instance_ids.push_back(inst);
    auto [mi, new_mod] = module_index.try_emplace(mod, module_ids.size());
    if (new_mod) module_ids.push_back(mod);

    bool renormalized = false;
    Distribution d;
    try {
      d = Distribution::ingest(std::move(probs), &renormalized);
    } catch (const InvalidScore& e) {
      file.fail(e.what());
    }
    if (renormalized) ++contents.renormalized_rows;
    if (!cells.emplace(std::pair{ii->second, mi->second}, std::move(d)).second) {
      file.fail("duplicate record for instance " + inst + ", module " + mod);
    }
  }

  if (cells.size() != instance_ids.size() * module_ids.size()) {
    throw ConsistencyError(path.string() + ": partial forecast cache (" + std::to_string(cells.size()) + " of " +
                           std::to_string(instance_ids.size() * module_ids.size()) + " records)");
  }
  std::vector<std::vector<Distribution>> grid(instance_ids.size());
  for (auto& [key, d] : cells) grid[key.first].push_back(std::move(d));
  if (instance_ids.empty()) throw InputError(path.string() + ": empty forecast cache");
  contents.forecasts = ForecastSet(std::move(instance_ids), std::move(module_ids), grid);
  return contents;
}

std::string serialize_forecast_cache(const ForecastSet& forecasts) {
  std::string out;
  for (std::size_t h = 0; h < forecasts.instances(); ++h) {
    const std::string prefix = "{\"instance\":" + json_string(forecasts.instance_ids()[h]) + ",\"module\":";
    for (std::size_t i = 0; i < forecasts.modules(); ++i) {
      out += prefix + json_string(forecasts.module_ids()[i]) + ",\"probs\":[";
      auto f = forecasts.forecast(h, i);
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (j > 0) out += ',';
        out += format_double(f[j]);
      }
      out += "]}\n";
    }
  }
  return out;
}

void write_forecast_cache(const std::filesystem::path& path, const ForecastSet& forecasts) {
  write_file_atomic(path, serialize_forecast_cache(forecasts));
}

ForecastSet align_to_questions(const ForecastSet& forecasts, const QuestionSet& questions) {
  if (forecasts.instances() != questions.size()) {
    throw ConsistencyError("cache covers " + std::to_string(forecasts.instances()) + " instances, question set has " +
                           std::to_string(questions.size()));
  }
  if (forecasts.choices() != questions.k()) {
    throw ConsistencyError("cache has k=" + std::to_string(forecasts.choices()) + ", questions have k=" +
                           std::to_string(questions.k()));
  }
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t h = 0; h < forecasts.instances(); ++h) position.emplace(forecasts.instance_ids()[h], h);
  std::vector<std::vector<Distribution>> grid;
  grid.reserve(questions.size());
  for (const auto& inst : questions.instances()) {
    auto it = position.find(inst.id);
    if (it == position.end()) throw ConsistencyError("cache has no forecasts for instance " + inst.id);
    auto& row = grid.emplace_back();
    for (std::size_t i = 0; i < forecasts.modules(); ++i) row.push_back(forecasts.distribution(it->second, i));
  }
  return ForecastSet(questions.ids(), forecasts.module_ids(), grid);
}

// ---------------------------------------------------------------------------

std::optional<std::string> KeyValueSection::get(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<KeyValueSection> read_key_value(const std::filesystem::path& path) {
  TextFile file(path);
  std::vector<KeyValueSection> sections(1);
  std::string line;
  while (file.next_line(line)) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') file.fail("unterminated section header");
      sections.push_back(KeyValueSection{trim(std::string_view(text).substr(1, text.size() - 2)), {},
                                         file.line_number()});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) file.fail("expected 'key = value'");
    auto key = trim(std::string_view(text).substr(0, eq));
    if (key.empty()) file.fail("empty key");
    auto& entries = sections.back().entries;
    for (const auto& [k, v] : entries) {
      if (k == key) file.fail("duplicate key '" + key + "'");
    }
    entries.emplace_back(std::move(key), trim(std::string_view(text).substr(eq + 1)));
  }
  return sections;
}

void apply_optimizer_keys(const KeyValueSection& section, OptimizerParams& params) {
  for (const auto& [key, value] : section.entries) {
    if (key == "fd_delta") {
      params.fd_delta = parse_double(value, key);
    } else if (key == "grad_clip") {
      params.grad_clip = parse_double(value, key);
    } else if (key == "step_size") {
      params.step_size = parse_double(value, key);
    } else if (key == "step_budget") {
      params.step_budget = static_cast<int>(parse_integer(value, key));
    } else if (key == "grad_norm_stop") {
      params.grad_norm_stop = parse_double(value, key);
    } else if (key == "restarts") {
      params.restarts = static_cast<int>(parse_integer(value, key));
    } else if (key == "seed") {
      params.seed = static_cast<std::uint64_t>(parse_integer(value, key));
    } else if (key == "smoothing_epsilon") {
      params.smoothing_epsilon = parse_double(value, key);
    }
  }
}

// ---------------------------------------------------------------------------

WeightsFile read_weights(const std::filesystem::path& path) {
  const auto sections = read_key_value(path);
  WeightsFile out;
  std::optional<Rule> rule;
  std::vector<std::string> ids;
  std::vector<double> values;
  for (const auto& section : sections) {
    for (const auto& [key, value] : section.entries) {
      if (key == "rule") {
        rule = parse_rule(value);
      } else if (key.starts_with("weight.")) {
        ids.push_back(key.substr(7));
        values.push_back(parse_double(value, key));
      } else if (key.starts_with("single.")) {
        out.single_weights.emplace_back(key.substr(7), parse_double(value, key));
      } else {
        out.metadata[key] = value;
      }
    }
  }
  if (!rule) throw InputError(path.string() + ": weights file has no rule");
  if (ids.empty()) throw InputError(path.string() + ": weights file has no weights");
  try {
    out.weights = WeightVector(*rule, std::move(ids), std::move(values));
  } catch (const InvalidParameter& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return out;
}

std::string serialize_weights(const WeightsFile& file) {
  std::ostringstream out;
  out << "# mcfuse weights\n";
  out << "rule = " << to_string(file.weights.rule()) << '\n';
  for (std::size_t i = 0; i < file.weights.size(); ++i) {
    out << "weight." << file.weights.module_ids()[i] << " = " << format_double(file.weights[i]) << '\n';
  }
  for (const auto& [id, w] : file.single_weights) out << "single." << id << " = " << format_double(w) << '\n';
  for (const auto& [key, value] : file.metadata) out << key << " = " << value << '\n';
  return out.str();
}

void write_weights(const std::filesystem::path& path, const WeightsFile& file) {
  write_file_atomic(path, serialize_weights(file));
}

}  // namespace mcfuse
