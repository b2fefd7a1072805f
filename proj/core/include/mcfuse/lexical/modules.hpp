#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/lexical/paths.hpp"
#include "mcfuse/lexical/resources.hpp"
#include "mcfuse/lexical/scoring.hpp"

namespace mcfuse::lexical {

/// A solver that turns one question into a distribution over its choices.
/// Implementations hold immutable resources, so solve() may run
/// concurrently.
class SolverModule {
public:
  explicit SolverModule(std::string id) : id_(std::move(id)) {}
  virtual ~SolverModule() = default;

  const std::string& id() const { return id_; }
  virtual std::string_view kind() const = 0;
  virtual TaskKind task() const = 0;
  virtual Distribution solve(const Instance& instance) const = 0;

private:
  std::string id_;
};

/// Base for modules that score each choice independently and normalize.
class ChoiceScoringModule : public SolverModule {
public:
  using SolverModule::SolverModule;
  Distribution solve(const Instance& instance) const override;

protected:
  virtual double score(const Instance& instance, std::size_t choice) const = 0;
};

/// Cosine between stem and choice vectors, negative values clipped to 0.
class EmbeddingModule final : public ChoiceScoringModule {
public:
  EmbeddingModule(std::string id, std::shared_ptr<const EmbeddingTable> table);
  std::string_view kind() const override { return "embedding"; }
  TaskKind task() const override { return TaskKind::synonym; }

protected:
  double score(const Instance& instance, std::size_t choice) const override;

private:
  std::shared_ptr<const EmbeddingTable> table_;
};

class ProximityModule final : public ChoiceScoringModule {
public:
  ProximityModule(std::string id, std::shared_ptr<const CooccurrenceTable> table);
  std::string_view kind() const override { return "proximity"; }
  TaskKind task() const override { return TaskKind::synonym; }

protected:
  double score(const Instance& instance, std::size_t choice) const override;

private:
  std::shared_ptr<const CooccurrenceTable> table_;
};

class SynonymOverlapModule final : public ChoiceScoringModule {
public:
  SynonymOverlapModule(std::string id, std::shared_ptr<const SynonymLists> lists, OverlapPoints points = {});
  std::string_view kind() const override { return "synonym-overlap"; }
  TaskKind task() const override { return TaskKind::synonym; }

protected:
  double score(const Instance& instance, std::size_t choice) const override;

private:
  std::shared_ptr<const SynonymLists> lists_;
  OverlapPoints points_;
};

class ConnectorModule final : public ChoiceScoringModule {
public:
  ConnectorModule(std::string id, std::shared_ptr<const SnippetStore> store,
                  ConnectorWeights weights = ConnectorWeights::defaults());
  std::string_view kind() const override { return "connector"; }
  TaskKind task() const override { return TaskKind::synonym; }

protected:
  double score(const Instance& instance, std::size_t choice) const override;

private:
  std::shared_ptr<const SnippetStore> store_;
  ConnectorWeights weights_;
};

/// Cosine between the stem's and each choice's phrase vectors.
class PhraseVectorModule final : public SolverModule {
public:
  PhraseVectorModule(std::string id, std::shared_ptr<const PhrasePatternSet> patterns,
                     std::shared_ptr<const PhraseFrequencyTable> frequencies);
  std::string_view kind() const override { return "phrase-vectors"; }
  TaskKind task() const override { return TaskKind::analogy; }
  Distribution solve(const Instance& instance) const override;

private:
  std::shared_ptr<const PhrasePatternSet> patterns_;
  std::shared_ptr<const PhraseFrequencyTable> frequencies_;
};

class ThesaurusPathModule final : public SolverModule {
public:
  ThesaurusPathModule(std::string id, std::shared_ptr<const ThesaurusGraph> graph,
                      std::size_t max_links = kMaxPathLinks);
  std::string_view kind() const override { return "thesaurus-paths"; }
  TaskKind task() const override { return TaskKind::analogy; }
  Distribution solve(const Instance& instance) const override;

private:
  std::shared_ptr<const ThesaurusGraph> graph_;
  std::size_t max_links_;
};

class RelationModule final : public SolverModule {
public:
  RelationModule(std::string id, std::shared_ptr<const RelationDatabase> db, Relation relation,
                 MatchOptions options = {});
  std::string_view kind() const override { return "relation"; }
  TaskKind task() const override { return TaskKind::analogy; }
  Distribution solve(const Instance& instance) const override;

private:
  std::shared_ptr<const RelationDatabase> db_;
  Relation relation_;
  MatchOptions options_;
};

class DefinitionModule final : public SolverModule {
public:
  DefinitionModule(std::string id, std::shared_ptr<const DefinitionTable> definitions);
  std::string_view kind() const override { return "definition-similarity"; }
  TaskKind task() const override { return TaskKind::analogy; }
  Distribution solve(const Instance& instance) const override;

private:
  std::shared_ptr<const DefinitionTable> definitions_;
};

/// One distribution per instance. Throws ConfigError when the module's task
/// differs from the question set's.
std::vector<Distribution> run_module(const SolverModule& module, const QuestionSet& questions);

/// Builds the modules declared in a module configuration file. Resource
/// paths are relative to the file's directory; each file is loaded once.
/// Missing resources throw InputError naming the path; unknown kinds
/// throw ConfigError.
std::vector<std::unique_ptr<SolverModule>> load_modules(const std::filesystem::path& config_path);

}  // namespace mcfuse::lexical
