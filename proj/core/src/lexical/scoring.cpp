#include "mcfuse/lexical/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace mcfuse::lexical {

namespace {

constexpr std::string_view kSeparators[] = {"[",       "\"",     ":",      ",",       "=",   "/",   "\\", "(",
                                            "]",       "means",  "defined", "equals", "synonym", " ", "and"};
constexpr std::string_view kSymbolChars = "[\":,=/\\(]";
constexpr std::string_view kBreak = "\x1f";

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\'' || c == '-' || c >= 0x80; }

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

double bag_cosine(const std::vector<std::string>* a, const std::vector<std::string>* b) {
  if (a == nullptr || b == nullptr || a->empty() || b->empty()) return 0.0;
  std::map<std::string_view, double> ca;
  std::map<std::string_view, double> cb;
  for (const auto& t : *a) ca[t] += 1.0;
  for (const auto& t : *b) cb[t] += 1.0;
  double dot = 0.0;
  for (const auto& [t, c] : ca) {
    auto it = cb.find(t);
    if (it != cb.end()) dot += c * it->second;
  }
  auto sq = [](const auto& m) {
    double s = 0.0;
    for (const auto& [t, c] : m) s += c * c;
    return s;
  };
  return dot / std::sqrt(sq(ca) * sq(cb));
}

bool is_separator_token(std::string_view token) {
  return token != " " && std::find(std::begin(kSeparators), std::end(kSeparators), token) != std::end(kSeparators);
}

double weight_of(const ConnectorWeights& weights, std::string_view separator) {
  auto it = weights.separators.find(separator);
  return it == weights.separators.end() ? 0.0 : it->second;
}

// Weighted count of `first` <sep> `second` in a token stream.
double connections(std::span<const std::string> tokens, std::string_view first, std::string_view second,
                   const ConnectorWeights& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] != first) continue;
    if (tokens[i + 1] == second) total += weight_of(weights, " ");
    if (i + 2 < tokens.size() && tokens[i + 2] == second && is_separator_token(tokens[i + 1])) {
      total += weight_of(weights, tokens[i + 1]);
    }
  }
  return total;
}

}  // namespace

std::optional<double> embedding_similarity(const EmbeddingTable& table, std::string_view x, std::string_view y) {
  const auto* a = table.find(x);
  const auto* b = table.find(y);
  if (a == nullptr || b == nullptr) return std::nullopt;
  return cosine(*a, *b);
}

double proximity_pmi(const CooccurrenceTable& table, std::string_view stem, std::string_view choice) {
  const auto denom = table.unigram(normalize_token(choice)).without_not;
  if (denom == 0) return 0.0;
  return static_cast<double>(table.pair(stem, choice).without_not) / static_cast<double>(denom);
}

double synonym_overlap(const SynonymLists& lists, std::string_view stem, std::string_view choice,
                       const OverlapPoints& points) {
  const auto s = normalize_token(stem);
  const auto c = normalize_token(choice);
  const auto& of_stem = lists.related(s);
  const auto& of_choice = lists.related(c);
  double score = 0.0;
  if (of_stem.contains(c)) score += points.membership;
  if (of_choice.contains(s)) score += points.membership;
  std::size_t shared = 0;
  for (const auto& w : of_stem) shared += of_choice.contains(w) ? 1 : 0;
  return score + points.shared * static_cast<double>(shared);
}

ConnectorWeights ConnectorWeights::defaults() {
  ConnectorWeights w;
  for (auto sep : kSeparators) w.separators.emplace(std::string(sep), 1.0);
  return w;
}

std::span<const std::string_view> connector_separators() { return kSeparators; }

std::vector<std::string> connector_tokens(std::string_view snippet) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    auto t = normalize_token(word);
    if (!t.empty()) tokens.push_back(std::move(t));
    word.clear();
  };
  for (char ch : snippet) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_char(c)) {
      word += ch;
    } else if (kSymbolChars.find(ch) != std::string_view::npos) {
      flush();
      tokens.emplace_back(1, ch);
    } else if (std::isspace(c)) {
      flush();
    } else {
      flush();
      tokens.emplace_back(kBreak);
    }
  }
  flush();
  return tokens;
}

double connector_score(const SnippetStore& store, std::string_view stem, std::string_view choice,
                       const ConnectorWeights& weights) {
  const auto s = normalize_token(stem);
  const auto c = normalize_token(choice);
  double score = 0.0;
  for (const auto& snippet : store.snippets(s, c)) {
    const auto tokens = connector_tokens(snippet);
    score += connections(tokens, s, c, weights);
    if (s != c) score += connections(tokens, c, s, weights);
    for (const auto& t : tokens) {
      if (t == "dictionary" || t == "thesaurus") score += weights.keyword;
    }
  }
  return score;
}

// ---------------------------------------------------------------------------

std::vector<double> phrase_vector(const PhrasePatternSet& patterns, const PhraseFrequencyTable& frequencies,
                                  std::string_view x, std::string_view y) {
  const auto a = normalize_token(x);
  const auto b = normalize_token(y);
  std::vector<double> r(patterns.size());
  for (std::size_t t = 0; t < patterns.size(); ++t) {
    r[t] = std::log1p(static_cast<double>(frequencies.frequency(patterns.instantiate(t, a, b))));
  }
  return r;
}

double relation_similarity(std::span<const double> r1, std::span<const double> r2) {
  if (r1.size() != r2.size()) throw InvalidParameter("relation vectors differ in length");
  return cosine(r1, r2);
}

std::vector<double> definition_scores(const DefinitionTable& definitions, const Instance& instance) {
  if (instance.stem.arity() != 2) throw InvalidParameter("definition similarity needs an analogy instance");
  const auto* a = definitions.find(instance.stem[0]);
  const auto* b = definitions.find(instance.stem[1]);
  std::vector<double> raw;
  raw.reserve(instance.k());
  for (const auto& choice : instance.choices) {
    raw.push_back(bag_cosine(a, definitions.find(choice[0])) + bag_cosine(b, definitions.find(choice[1])));
  }
  return raw;
}

Distribution definition_similarity(const DefinitionTable& definitions, const Instance& instance) {
  return normalize(definition_scores(definitions, instance));
}

std::vector<std::string> match_variants(const RelationDatabase& db, std::string_view word, const MatchOptions& options) {
  std::set<std::string> forms{std::string(word)};
  if (options.lemmatize) {
    for (std::string_view suffix : {"s", "es", "ed", "ing"}) {
      if (word.size() > suffix.size() + 2 && word.ends_with(suffix)) {
        forms.emplace(word.substr(0, word.size() - suffix.size()));
      }
    }
  }
  if (options.synonym_expand) {
    std::vector<std::string> base(forms.begin(), forms.end());
    for (const auto& f : base) {
      for (auto& s : db.synonyms_of(f)) forms.insert(std::move(s));
    }
  }
  return {forms.begin(), forms.end()};
}

Distribution relation_filter(const RelationDatabase& db, Relation relation, const Instance& instance,
                             const MatchOptions& options) {
  if (instance.stem.arity() != 2) throw InvalidParameter("relation filters need an analogy instance");
  auto matches = [&](const WordTuple& pair) {
    const auto left = match_variants(db, pair[0], options);
    const auto right = match_variants(db, pair[1], options);
    for (const auto& a : left) {
      for (const auto& b : right) {
        if (db.contains(relation, a, b)) return true;
      }
    }
    return false;
  };

  const std::size_t k = instance.k();
  if (!matches(instance.stem)) return Distribution::uniform(k);
  std::vector<double> keep(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) keep[j] = matches(instance.choices[j]) ? 1.0 : 0.0;
  return normalize(keep);
}

}  // namespace mcfuse::lexical
