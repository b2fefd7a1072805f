#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/lexical/resources.hpp"

namespace mcfuse::lexical {

// Synonym scorers: stem word vs one choice word. Scores are nonnegative
// except embedding cosines, which the LSA module clips at zero.

/// Cosine of the two word vectors; nullopt when either word is unknown.
std::optional<double> embedding_similarity(const EmbeddingTable& table, std::string_view x, std::string_view y);

/// Fraction of not-free windows containing `choice` that also contain `stem`.
double proximity_pmi(const CooccurrenceTable& table, std::string_view stem, std::string_view choice);

struct OverlapPoints {
  double membership = 10.0;  ///< for each word appearing in the other's list
  double shared = 1.0;       ///< per word in both lists
};

double synonym_overlap(const SynonymLists& lists, std::string_view stem, std::string_view choice,
                       const OverlapPoints& points = {});

/// Separator weights (keyed by separator; " " is whitespace) and the weight
/// of each "dictionary"/"thesaurus" mention.
struct ConnectorWeights {
  std::map<std::string, double, std::less<>> separators;
  double keyword = 1.0;

  /// Unit weight on every separator.
  static ConnectorWeights defaults();
};

/// The separators between stem and choice that count as a connection.
std::span<const std::string_view> connector_separators();

double connector_score(const SnippetStore& store, std::string_view stem, std::string_view choice,
                       const ConnectorWeights& weights = ConnectorWeights::defaults());

/// Splits a snippet into lowercase words, separator symbols, and an opaque
/// break token for any other punctuation.
std::vector<std::string> connector_tokens(std::string_view snippet);

// Analogy scorers over A:B::C:D.

/// Component t is ln(1 + frequency of pattern t instantiated with x, y).
std::vector<double> phrase_vector(const PhrasePatternSet& patterns, const PhraseFrequencyTable& frequencies,
                                  std::string_view x, std::string_view y);

/// Cosine of two relation vectors; 0 when either is the zero vector.
double relation_similarity(std::span<const double> r1, std::span<const double> r2);

/// Per choice: cos(def(A), def(C)) + cos(def(B), def(D)) over definition
/// bag-of-words vectors, a missing definition contributing 0.
std::vector<double> definition_scores(const DefinitionTable& definitions, const Instance& instance);
Distribution definition_similarity(const DefinitionTable& definitions, const Instance& instance);

struct MatchOptions {
  bool lemmatize = true;       ///< also try the word with -s, -es, -ed, -ing stripped
  bool synonym_expand = true;  ///< also try one-hop synonyms from the database
};

/// Forms of `word` tried when matching a relation.
std::vector<std::string> match_variants(const RelationDatabase& db, std::string_view word, const MatchOptions& options);

/// Uniform unless the stem pair is in `relation`; then uniform over the
/// choices whose pair is also in it (uniform again if none are).
Distribution relation_filter(const RelationDatabase& db, Relation relation, const Instance& instance,
                             const MatchOptions& options = {});

}  // namespace mcfuse::lexical
