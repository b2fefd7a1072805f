#pragma once

// Local lexical resources that stand in for the web services the solver
// modules would otherwise query. All files are UTF-8; the exact layouts
// are documented in docs/formats.md.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mcfuse::lexical {

/// Splits on whitespace and normalizes each token; drops empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Unordered word pair with a canonical (lexicographic) order.
std::pair<std::string, std::string> unordered_pair(std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------

/// Window counts over a corpus. A corpus is a list of documents; each
/// document is cut into consecutive windows of `window_size` tokens.
class CooccurrenceTable {
public:
  struct Count {
    std::uint64_t windows = 0;      ///< windows containing the word(s)
    std::uint64_t without_not = 0;  ///< ... that also do not contain "not"
  };

  explicit CooccurrenceTable(std::size_t window_size = 10) : window_size_(window_size) {}

  static CooccurrenceTable from_documents(std::span<const std::string> documents, std::size_t window_size = 10);
  static CooccurrenceTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t window_size() const { return window_size_; }
  std::uint64_t total_windows() const { return total_windows_; }
  Count unigram(std::string_view word) const;
  Count pair(std::string_view a, std::string_view b) const;

  void add_unigram(std::string word, Count count);
  void add_pair(std::string_view a, std::string_view b, Count count);
  void set_total_windows(std::uint64_t total) { total_windows_ = total; }

  /// Throws InputError when a pair count exceeds a unigram count.
  void validate() const;

private:
  std::size_t window_size_;
  std::uint64_t total_windows_ = 0;
  std::map<std::string, Count, std::less<>> unigrams_;
  std::map<std::pair<std::string, std::string>, Count> pairs_;
};

/// Headword -> related words (the union of every sense list for that word).
class SynonymLists {
public:
  static SynonymLists load(const std::filesystem::path& path);

  void add(std::string_view head, std::string_view member);
  const std::set<std::string>& related(std::string_view head) const;

private:
  std::map<std::string, std::set<std::string>, std::less<>> lists_;
};

/// Stored search-result snippets per unordered word pair.
class SnippetStore {
public:
  static SnippetStore load(const std::filesystem::path& path);

  void add(std::string_view a, std::string_view b, std::string snippet);
  std::span<const std::string> snippets(std::string_view a, std::string_view b) const;

private:
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> store_;
};

/// Word vectors of one fixed dimension.
class EmbeddingTable {
public:
  static EmbeddingTable load(const std::filesystem::path& path);

  void add(std::string word, std::vector<double> vector);
  const std::vector<double>* find(std::string_view word) const;
  std::size_t dimension() const { return dimension_; }

private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Two-slot phrase templates over X and Y, e.g. "X in the Y".
class PhrasePatternSet {
public:
  static constexpr std::size_t kSize = 128;

  /// Requires exactly 128 templates, each with one X and one Y.
  explicit PhrasePatternSet(std::vector<std::string> templates);
  static PhrasePatternSet load(const std::filesystem::path& path);
  /// The 64 base templates followed by their X/Y reversals.
  static PhrasePatternSet defaults();

  std::size_t size() const { return templates_.size(); }
  const std::string& operator[](std::size_t t) const { return templates_[t]; }
  /// The template with X and Y replaced by the given words.
  std::string instantiate(std::size_t t, std::string_view x, std::string_view y) const;

private:
  std::vector<std::string> templates_;
};

/// The 64 base templates. Tokens ending in '*' match any word with that
/// prefix; "_" matches any single word.
std::span<const std::string_view> default_base_patterns();

/// Phrase -> hit count.
class PhraseFrequencyTable {
public:
  static PhraseFrequencyTable load(const std::filesystem::path& path);

  /// Counts, for every pattern instantiated with every (x, y) in `pairs`,
  /// the number of documents in which the phrase occurs.
  static PhraseFrequencyTable count_documents(std::span<const std::string> documents,
                                              const PhrasePatternSet& patterns,
                                              std::span<const std::pair<std::string, std::string>> pairs);

  void set(std::string phrase, std::uint64_t count);
  std::uint64_t frequency(std::string_view phrase) const;
  void save(const std::filesystem::path& path) const;

private:
  std::map<std::string, std::uint64_t, std::less<>> counts_;
};

enum class LinkKind { hypernym, hyponym, synonym, antonym, stem, gloss };

inline constexpr std::array<LinkKind, 6> kLinkKinds = {LinkKind::hypernym, LinkKind::hyponym, LinkKind::synonym,
                                                        LinkKind::antonym, LinkKind::stem, LinkKind::gloss};

std::string_view to_string(LinkKind kind);
LinkKind parse_link_kind(std::string_view name);

/// Directed multigraph over words with typed links; gloss links carry the
/// words of the gloss.
class ThesaurusGraph {
public:
  struct Edge {
    std::size_t from;
    std::size_t to;
    LinkKind kind;
    std::vector<std::string> gloss;
  };

  static ThesaurusGraph load(const std::filesystem::path& path);

  /// Self-loops are rejected with InputError.
  void add_edge(std::string_view from, LinkKind kind, std::string_view to, std::vector<std::string> gloss = {});

  std::optional<std::size_t> node(std::string_view word) const;
  const std::string& word(std::size_t node) const { return words_[node]; }
  std::size_t node_count() const { return words_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  /// Indices into edges() of the links leaving `node`.
  std::span<const std::size_t> out_edges(std::size_t node) const { return out_[node]; }

private:
  std::size_t intern(std::string_view word);

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

enum class Relation {
  synonym,
  antonym,
  hypernym,
  hyponym,
  meronym_substance,
  meronym_part,
  meronym_member,
  holonym_substance,
  holonym_member,
};

inline constexpr std::array<Relation, 9> kRelations = {
    Relation::synonym,           Relation::antonym,      Relation::hypernym,
    Relation::hyponym,           Relation::meronym_substance, Relation::meronym_part,
    Relation::meronym_member,    Relation::holonym_substance, Relation::holonym_member};

/// "synonym", "meronym:part", ...
std::string_view to_string(Relation relation);
Relation parse_relation(std::string_view name);

/// Ordered word pairs for each of the nine lexical relations.
class RelationDatabase {
public:
  static RelationDatabase load(const std::filesystem::path& path);

  void add(Relation relation, std::string_view a, std::string_view b);
  bool contains(Relation relation, std::string_view a, std::string_view b) const;
  /// Words listed as synonyms of `word` (either direction).
  std::vector<std::string> synonyms_of(std::string_view word) const;

private:
  std::array<std::set<std::pair<std::string, std::string>>, kRelations.size()> pairs_;
};

/// Word -> case-folded definition tokens, from one dictionary.
class DefinitionTable {
public:
  static DefinitionTable load(const std::filesystem::path& path);

  /// Appends to any existing definition of `word`.
  void add(std::string_view word, std::string_view definition);
  const std::vector<std::string>* find(std::string_view word) const;

private:
  std::map<std::string, std::vector<std::string>, std::less<>> definitions_;
};

}  // namespace mcfuse::lexical
