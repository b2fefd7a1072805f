#include "mcfuse/lexical/modules.hpp"

#include <fstream>
#include <functional>
#include <typeindex>

#include "mcfuse/io.hpp"
#include "text_file.hpp"

namespace mcfuse::lexical {

Distribution ChoiceScoringModule::solve(const Instance& instance) const {
  std::vector<double> raw(instance.k());
  for (std::size_t j = 0; j < instance.k(); ++j) raw[j] = score(instance, j);
  return normalize(raw);
}

EmbeddingModule::EmbeddingModule(std::string id, std::shared_ptr<const EmbeddingTable> table)
    : ChoiceScoringModule(std::move(id)), table_(std::move(table)) {}

double EmbeddingModule::score(const Instance& instance, std::size_t choice) const {
  const auto cos = embedding_similarity(*table_, instance.stem[0], instance.choices[choice][0]);
  return cos ? std::max(0.0, *cos) : 0.0;
}

ProximityModule::ProximityModule(std::string id, std::shared_ptr<const CooccurrenceTable> table)
    : ChoiceScoringModule(std::move(id)), table_(std::move(table)) {}

double ProximityModule::score(const Instance& instance, std::size_t choice) const {
  return proximity_pmi(*table_, instance.stem[0], instance.choices[choice][0]);
}

SynonymOverlapModule::SynonymOverlapModule(std::string id, std::shared_ptr<const SynonymLists> lists,
                                           OverlapPoints points)
    : ChoiceScoringModule(std::move(id)), lists_(std::move(lists)), points_(points) {}

double SynonymOverlapModule::score(const Instance& instance, std::size_t choice) const {
  return synonym_overlap(*lists_, instance.stem[0], instance.choices[choice][0], points_);
}

ConnectorModule::ConnectorModule(std::string id, std::shared_ptr<const SnippetStore> store, ConnectorWeights weights)
    : ChoiceScoringModule(std::move(id)), store_(std::move(store)), weights_(std::move(weights)) {}

double ConnectorModule::score(const Instance& instance, std::size_t choice) const {
  return connector_score(*store_, instance.stem[0], instance.choices[choice][0], weights_);
}

PhraseVectorModule::PhraseVectorModule(std::string id, std::shared_ptr<const PhrasePatternSet> patterns,
                                       std::shared_ptr<const PhraseFrequencyTable> frequencies)
    : SolverModule(std::move(id)), patterns_(std::move(patterns)), frequencies_(std::move(frequencies)) {}

Distribution PhraseVectorModule::solve(const Instance& instance) const {
  const auto stem = phrase_vector(*patterns_, *frequencies_, instance.stem[0], instance.stem[1]);
  std::vector<double> raw(instance.k());
  for (std::size_t j = 0; j < instance.k(); ++j) {
    const auto& c = instance.choices[j];
    raw[j] = relation_similarity(stem, phrase_vector(*patterns_, *frequencies_, c[0], c[1]));
  }
  return normalize(raw);
}

ThesaurusPathModule::ThesaurusPathModule(std::string id, std::shared_ptr<const ThesaurusGraph> graph,
                                         std::size_t max_links)
    : SolverModule(std::move(id)), graph_(std::move(graph)), max_links_(max_links) {}

Distribution ThesaurusPathModule::solve(const Instance& instance) const {
  return analogy_path_score(*graph_, instance, max_links_);
}

RelationModule::RelationModule(std::string id, std::shared_ptr<const RelationDatabase> db, Relation relation,
                               MatchOptions options)
    : SolverModule(std::move(id)), db_(std::move(db)), relation_(relation), options_(options) {}

Distribution RelationModule::solve(const Instance& instance) const {
  return relation_filter(*db_, relation_, instance, options_);
}

DefinitionModule::DefinitionModule(std::string id, std::shared_ptr<const DefinitionTable> definitions)
    : SolverModule(std::move(id)), definitions_(std::move(definitions)) {}

Distribution DefinitionModule::solve(const Instance& instance) const {
  return definition_similarity(*definitions_, instance);
}

std::vector<Distribution> run_module(const SolverModule& module, const QuestionSet& questions) {
  if (!questions.empty() && module.task() != questions.task_kind()) {
    throw ConfigError("module " + module.id() + " solves " + std::string(to_string(module.task())) +
                      " questions, the set holds " + std::string(to_string(questions.task_kind())) + " questions");
  }
  std::vector<Distribution> out;
  out.reserve(questions.size());
  for (const auto& inst : questions.instances()) out.push_back(module.solve(inst));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Loads each resource file once per configuration, keyed by (type, path).
class ResourceCache {
public:
  template <typename T>
  std::shared_ptr<const T> get(const std::filesystem::path& path, const std::function<T()>& load) {
    const auto key = std::make_pair(std::type_index(typeid(T)), path.lexically_normal().string());
    auto it = cache_.find(key);
    if (it != cache_.end()) return std::static_pointer_cast<const T>(it->second);
    if (!std::filesystem::exists(path)) throw InputError("missing resource file: " + path.string());
    auto loaded = std::make_shared<const T>(load());
    cache_.emplace(key, loaded);
    return loaded;
  }

private:
  std::map<std::pair<std::type_index, std::string>, std::shared_ptr<const void>> cache_;
};

class ModuleSpec {
public:
  ModuleSpec(const KeyValueSection& section, std::filesystem::path base, std::string id)
      : section_(section), base_(std::move(base)), id_(std::move(id)) {}

  const std::string& id() const { return id_; }

  std::string required(std::string_view key) const {
    auto v = section_.get(key);
    if (!v || v->empty()) throw ConfigError("module " + id_ + ": missing key '" + std::string(key) + "'");
    return *v;
  }

  std::filesystem::path path(std::string_view key) const {
    std::filesystem::path p = required(key);
    return p.is_absolute() ? p : base_ / p;
  }

  std::optional<std::filesystem::path> optional_path(std::string_view key) const {
    if (!section_.get(key)) return std::nullopt;
    return path(key);
  }

  double number(std::string_view key, double fallback) const {
    auto v = section_.get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("module " + id_ + ": key '" + std::string(key) + "' is not a number");
    }
  }

  bool flag(std::string_view key, bool fallback) const {
    auto v = section_.get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("module " + id_ + ": key '" + std::string(key) + "' is not a boolean");
  }

private:
  const KeyValueSection& section_;
  std::filesystem::path base_;
  std::string id_;
};

std::vector<std::string> read_documents(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::string> docs;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) docs.push_back(std::move(line));
  }
  return docs;
}

std::unique_ptr<SolverModule> build_module(const ModuleSpec& spec, ResourceCache& cache) {
  const std::string kind = spec.required("kind");
  if (kind == "embedding") {
    auto table = cache.get<EmbeddingTable>(spec.path("embeddings"),
                                           [&] { return EmbeddingTable::load(spec.path("embeddings")); });
    return std::make_unique<EmbeddingModule>(spec.id(), table);
  }
  if (kind == "proximity") {
    std::shared_ptr<const CooccurrenceTable> table;
    if (auto corpus = spec.optional_path("corpus")) {
      const auto window = static_cast<std::size_t>(spec.number("window_size", 10));
      table = cache.get<CooccurrenceTable>(*corpus, [&] {
        const auto docs = read_documents(*corpus);
        return CooccurrenceTable::from_documents(docs, window);
      });
    } else {
      table = cache.get<CooccurrenceTable>(spec.path("cooccurrence"),
                                           [&] { return CooccurrenceTable::load(spec.path("cooccurrence")); });
    }
    return std::make_unique<ProximityModule>(spec.id(), table);
  }
  if (kind == "synonym-overlap") {
    auto lists =
        cache.get<SynonymLists>(spec.path("synonyms"), [&] { return SynonymLists::load(spec.path("synonyms")); });
    OverlapPoints points{spec.number("membership_points", 10.0), spec.number("shared_points", 1.0)};
    return std::make_unique<SynonymOverlapModule>(spec.id(), lists, points);
  }
  if (kind == "connector") {
    auto store =
        cache.get<SnippetStore>(spec.path("snippets"), [&] { return SnippetStore::load(spec.path("snippets")); });
    ConnectorWeights weights = ConnectorWeights::defaults();
    const double sep = spec.number("separator_weight", 1.0);
    for (auto& [name, w] : weights.separators) w = sep;
    weights.keyword = spec.number("keyword_weight", 1.0);
    return std::make_unique<ConnectorModule>(spec.id(), store, std::move(weights));
  }
  if (kind == "phrase-vectors") {
    std::shared_ptr<const PhrasePatternSet> patterns;
    if (auto p = spec.optional_path("patterns")) {
      patterns = cache.get<PhrasePatternSet>(*p, [&] { return PhrasePatternSet::load(*p); });
    } else {
      patterns = std::make_shared<const PhrasePatternSet>(PhrasePatternSet::defaults());
    }
    auto freq = cache.get<PhraseFrequencyTable>(spec.path("frequencies"),
                                                [&] { return PhraseFrequencyTable::load(spec.path("frequencies")); });
    return std::make_unique<PhraseVectorModule>(spec.id(), patterns, freq);
  }
  if (kind == "thesaurus-paths") {
    auto graph =
        cache.get<ThesaurusGraph>(spec.path("graph"), [&] { return ThesaurusGraph::load(spec.path("graph")); });
    const auto links = static_cast<std::size_t>(spec.number("max_links", kMaxPathLinks));
    return std::make_unique<ThesaurusPathModule>(spec.id(), graph, links);
  }
  if (kind == "relation") {
    auto db = cache.get<RelationDatabase>(spec.path("relations"),
                                          [&] { return RelationDatabase::load(spec.path("relations")); });
    Relation relation;
    try {
      relation = parse_relation(spec.required("relation"));
    } catch (const InputError& e) {
      throw ConfigError("module " + spec.id() + ": " + e.what());
    }
    MatchOptions options{spec.flag("lemmatize", true), spec.flag("synonym_expand", true)};
    return std::make_unique<RelationModule>(spec.id(), db, relation, options);
  }
  if (kind == "definition-similarity") {
    auto defs = cache.get<DefinitionTable>(spec.path("definitions"),
                                           [&] { return DefinitionTable::load(spec.path("definitions")); });
    return std::make_unique<DefinitionModule>(spec.id(), defs);
  }
  throw ConfigError("module " + spec.id() + ": unknown kind '" + kind + "'");
}

}  // namespace

std::vector<std::unique_ptr<SolverModule>> load_modules(const std::filesystem::path& config_path) {
  const auto sections = read_key_value(config_path);
  const auto base = config_path.parent_path();
  ResourceCache cache;
  std::vector<std::unique_ptr<SolverModule>> modules;
  std::set<std::string> ids;
  for (const auto& section : sections) {
    if (section.name.empty()) {
      if (!section.entries.empty()) throw ConfigError(config_path.string() + ": keys outside a [module ...] section");
      continue;
    }
    if (!section.name.starts_with("module ")) {
      throw ConfigError(config_path.string() + ": unexpected section [" + section.name + "]");
    }
    std::string id = section.name.substr(7);
    while (!id.empty() && id.front() == ' ') id.erase(id.begin());
    if (id.empty()) throw ConfigError(config_path.string() + ": module section without an id");
    if (!ids.insert(id).second) throw ConfigError(config_path.string() + ": duplicate module id " + id);
    modules.push_back(build_module(ModuleSpec(section, base, id), cache));
  }
  if (modules.empty()) throw ConfigError(config_path.string() + ": no modules declared");
  return modules;
}

}  // namespace mcfuse::lexical
