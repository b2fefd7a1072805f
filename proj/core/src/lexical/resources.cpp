#include "mcfuse/lexical/resources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcfuse/core.hpp"
#include "text_file.hpp"

namespace mcfuse::lexical {

namespace {

constexpr std::string_view kBasePatterns[] = {
    "X Y",           "X the Y",       "X to Y",          "X to the Y",      "X for Y",
    "X for the Y",   "X with Y",      "X with the Y",    "X from Y",        "X from the Y",
    "X not Y",       "X not the Y",   "X of Y",          "X of the Y",      "X in Y",
    "X in the Y",    "X at Y",        "X at the Y",      "X is Y",          "X is _ Y",
    "X is the Y",    "X are Y",       "X has Y",         "X have Y",        "X on Y",
    "X then Y",      "X's Y",         "X's _ Y",         "X turn* Y",       "X go Y",
    "X goes Y",      "X become* Y",   "X when Y",        "X will Y",        "X make* Y",
    "X get* Y",      "X give* Y",     "X contain* Y",    "X lack* Y",       "X use* Y",
    "X need* Y",     "X like Y",      "X like _ Y",      "X like the Y",    "X and not Y",
    "X but not Y",   "X yet Y",       "X their Y",       "X this Y",        "X that Y",
    "X which Y",     "X than Y",      "X rather than Y", "X instead of Y",  "X such as Y",
    "X for example Y", "X or Y",      "X after Y",       "X into Y",        "X onto Y",
    "X _ very Y",    "X _ not Y",     "X without Y",     "X within Y",
};
static_assert(std::size(kBasePatterns) * 2 == PhrasePatternSet::kSize);

std::string swap_slots(std::string_view pattern) {
  std::string out(pattern);
  for (char& c : out) {
    if (c == 'X') {
      c = 'Y';
    } else if (c == 'Y') {
      c = 'X';
    }
  }
  return out;
}

std::uint64_t parse_count(const std::string& field, const TextFile& file) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(field, &used);
    if (used != field.size() || v < 0) throw std::invalid_argument(field);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    file.fail("expected a nonnegative count, got '" + field + "'");
  }
}

bool token_matches(std::string_view pattern_token, std::string_view token) {
  if (pattern_token == "_") return true;
  if (!pattern_token.empty() && pattern_token.back() == '*') {
    return token.substr(0, pattern_token.size() - 1) == pattern_token.substr(0, pattern_token.size() - 1);
  }
  return pattern_token == token;
}

bool contains_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase) {
  if (phrase.empty() || tokens.size() < phrase.size()) return false;
  for (std::size_t s = 0; s + phrase.size() <= tokens.size(); ++s) {
    bool all = true;
    for (std::size_t t = 0; t < phrase.size() && all; ++t) all = token_matches(phrase[t], tokens[s + t]);
    if (all) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (in >> raw) {
    auto token = normalize_token(raw);
    if (!token.empty()) out.push_back(std::move(token));
  }
  return out;
}

std::pair<std::string, std::string> unordered_pair(std::string_view a, std::string_view b) {
  std::string x = normalize_token(a);
  std::string y = normalize_token(b);
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

// ---------------------------------------------------------------------------

CooccurrenceTable CooccurrenceTable::from_documents(std::span<const std::string> documents,
                                                    std::size_t window_size) {
  if (window_size == 0) throw InvalidParameter("window size must be positive");
  CooccurrenceTable table(window_size);
  for (const auto& doc : documents) {
    const auto tokens = tokenize(doc);
    for (std::size_t start = 0; start < tokens.size(); start += window_size) {
      const auto end = std::min(tokens.size(), start + window_size);
      std::set<std::string> present(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(end));
      const bool has_not = present.contains("not");
      ++table.total_windows_;
      for (const auto& w : present) {
        auto& c = table.unigrams_[w];
        ++c.windows;
        if (!has_not) ++c.without_not;
      }
      for (auto a = present.begin(); a != present.end(); ++a) {
        for (auto b = std::next(a); b != present.end(); ++b) {
          auto& c = table.pairs_[{*a, *b}];
          ++c.windows;
          if (!has_not) ++c.without_not;
        }
      }
    }
  }
  return table;
}

CooccurrenceTable CooccurrenceTable::load(const std::filesystem::path& path) {
  TextFile file(path);
  CooccurrenceTable table;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f[0] == "window_size" && f.size() == 2) {
      table.window_size_ = static_cast<std::size_t>(parse_count(f[1], file));
    } else if (f[0] == "windows" && f.size() == 2) {
      table.total_windows_ = parse_count(f[1], file);
    } else if (f[0] == "unigram" && f.size() == 4) {
      table.add_unigram(f[1], {parse_count(f[2], file), parse_count(f[3], file)});
    } else if (f[0] == "pair" && f.size() == 5) {
      table.add_pair(f[1], f[2], {parse_count(f[3], file), parse_count(f[4], file)});
    } else {
      file.fail("unrecognized co-occurrence record");
    }
  }
  try {
    table.validate();
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return table;
}

void CooccurrenceTable::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "window_size\t" << window_size_ << "\nwindows\t" << total_windows_ << '\n';
  for (const auto& [w, c] : unigrams_) out << "unigram\t" << w << '\t' << c.windows << '\t' << c.without_not << '\n';
  for (const auto& [p, c] : pairs_) {
    out << "pair\t" << p.first << '\t' << p.second << '\t' << c.windows << '\t' << c.without_not << '\n';
  }
  write_file_atomic(path, out.str());
}

CooccurrenceTable::Count CooccurrenceTable::unigram(std::string_view word) const {
  auto it = unigrams_.find(word);
  return it == unigrams_.end() ? Count{} : it->second;
}

CooccurrenceTable::Count CooccurrenceTable::pair(std::string_view a, std::string_view b) const {
  auto it = pairs_.find(unordered_pair(a, b));
  return it == pairs_.end() ? Count{} : it->second;
}

void CooccurrenceTable::add_unigram(std::string word, Count count) {
  auto& c = unigrams_[normalize_token(word)];
  c.windows += count.windows;
  c.without_not += count.without_not;
}

void CooccurrenceTable::add_pair(std::string_view a, std::string_view b, Count count) {
  auto& c = pairs_[unordered_pair(a, b)];
  c.windows += count.windows;
  c.without_not += count.without_not;
}

void CooccurrenceTable::validate() const {
  for (const auto& [w, c] : unigrams_) {
    if (c.without_not > c.windows) throw InputError("unigram '" + w + "': not-free count exceeds window count");
  }
  for (const auto& [p, c] : pairs_) {
    const auto a = unigram(p.first);
    const auto b = unigram(p.second);
    if (c.windows > std::min(a.windows, b.windows) || c.without_not > std::min(a.without_not, b.without_not) ||
        c.without_not > c.windows) {
      throw InputError("pair '" + p.first + "', '" + p.second + "' counted more often than its words");
    }
  }
}

// ---------------------------------------------------------------------------

SynonymLists SynonymLists::load(const std::filesystem::path& path) {
  TextFile file(path);
  SynonymLists lists;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() < 2) file.fail("synonym list line needs a headword and at least one member");
    for (std::size_t i = 1; i < f.size(); ++i) lists.add(f[0], f[i]);
  }
  return lists;
}

void SynonymLists::add(std::string_view head, std::string_view member) {
  auto h = normalize_token(head);
  auto m = normalize_token(member);
  if (h.empty() || m.empty() || h == m) return;
  lists_[h].insert(std::move(m));
}

const std::set<std::string>& SynonymLists::related(std::string_view head) const {
  static const std::set<std::string> empty;
  auto it = lists_.find(normalize_token(head));
  return it == lists_.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------

SnippetStore SnippetStore::load(const std::filesystem::path& path) {
  TextFile file(path);
  SnippetStore store;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() < 3) file.fail("snippet line needs two words and the snippet text");
    std::string text = f[2];
    for (std::size_t i = 3; i < f.size(); ++i) text += "\t" + f[i];
    store.add(f[0], f[1], std::move(text));
  }
  return store;
}

void SnippetStore::add(std::string_view a, std::string_view b, std::string snippet) {
  store_[unordered_pair(a, b)].push_back(std::move(snippet));
}

std::span<const std::string> SnippetStore::snippets(std::string_view a, std::string_view b) const {
  auto it = store_.find(unordered_pair(a, b));
  if (it == store_.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  TextFile file(path);
  EmbeddingTable table;
  std::string line;
  while (file.next_line(line)) {
    std::istringstream in(line);
    std::string word;
    in >> word;
    std::vector<double> v;
    std::string field;
    while (in >> field) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        file.fail("bad vector component '" + field + "'");
      }
    }
    try {
      table.add(word, std::move(v));
    } catch (const InputError& e) {
      file.fail(e.what());
    }
  }
  return table;
}

void EmbeddingTable::add(std::string word, std::vector<double> vector) {
  if (vector.empty()) throw InputError("embedding for '" + word + "' has no components");
  if (dimension_ == 0) dimension_ = vector.size();
  if (vector.size() != dimension_) throw InputError("embedding for '" + word + "' has the wrong dimension");
  double norm = 0.0;
  for (double x : vector) {
    if (!std::isfinite(x)) throw InputError("embedding for '" + word + "' is not finite");
    norm += x * x;
  }
  if (norm == 0.0) throw InputError("embedding for '" + word + "' is the zero vector");
  vectors_[normalize_token(word)] = std::move(vector);
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(normalize_token(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> default_base_patterns() { return kBasePatterns; }

PhrasePatternSet::PhrasePatternSet(std::vector<std::string> templates) : templates_(std::move(templates)) {
  if (templates_.size() != kSize) {
    throw InputError("phrase pattern set needs exactly 128 templates, got " + std::to_string(templates_.size()));
  }
  for (const auto& t : templates_) {
    if (std::count(t.begin(), t.end(), 'X') != 1 || std::count(t.begin(), t.end(), 'Y') != 1) {
      throw InputError("template '" + t + "' must contain X and Y exactly once");
    }
  }
}

PhrasePatternSet PhrasePatternSet::load(const std::filesystem::path& path) {
  TextFile file(path);
  std::vector<std::string> templates;
  std::string line;
  while (file.next_line(line)) templates.push_back(line);
  return PhrasePatternSet(std::move(templates));
}

PhrasePatternSet PhrasePatternSet::defaults() {
  std::vector<std::string> templates;
  for (auto p : kBasePatterns) templates.emplace_back(p);
  for (auto p : kBasePatterns) templates.push_back(swap_slots(p));
  return PhrasePatternSet(std::move(templates));
}

std::string PhrasePatternSet::instantiate(std::size_t t, std::string_view x, std::string_view y) const {
  std::string out;
  for (char c : templates_.at(t)) {
    if (c == 'X') {
      out += x;
    } else if (c == 'Y') {
      out += y;
    } else {
      out += c;
    }
  }
  return out;
}

PhraseFrequencyTable PhraseFrequencyTable::load(const std::filesystem::path& path) {
  TextFile file(path);
  PhraseFrequencyTable table;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() != 2) file.fail("phrase frequency line needs a phrase and a count");
    table.set(f[0], parse_count(f[1], file));
  }
  return table;
}

PhraseFrequencyTable PhraseFrequencyTable::count_documents(
    std::span<const std::string> documents, const PhrasePatternSet& patterns,
    std::span<const std::pair<std::string, std::string>> pairs) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(documents.size());
  for (const auto& d : documents) tokenized.push_back(tokenize(d));

  PhraseFrequencyTable table;
  for (const auto& [x, y] : pairs) {
    for (std::size_t t = 0; t < patterns.size(); ++t) {
      const std::string phrase = patterns.instantiate(t, x, y);
      std::vector<std::string> phrase_tokens;
      std::istringstream in(phrase);
      for (std::string tok; in >> tok;) phrase_tokens.push_back(tok);
      std::uint64_t hits = 0;
      for (const auto& doc : tokenized) hits += contains_phrase(doc, phrase_tokens) ? 1 : 0;
      if (hits > 0) table.set(phrase, hits);
    }
  }
  return table;
}

void PhraseFrequencyTable::set(std::string phrase, std::uint64_t count) { counts_[std::move(phrase)] = count; }

std::uint64_t PhraseFrequencyTable::frequency(std::string_view phrase) const {
  auto it = counts_.find(phrase);
  return it == counts_.end() ? 0 : it->second;
}

void PhraseFrequencyTable::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  for (const auto& [phrase, count] : counts_) out << phrase << '\t' << count << '\n';
  write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::hypernym: return "hypernym";
    case LinkKind::hyponym: return "hyponym";
    case LinkKind::synonym: return "synonym";
    case LinkKind::antonym: return "antonym";
    case LinkKind::stem: return "stem";
    case LinkKind::gloss: return "gloss";
  }
  return "?";
}

LinkKind parse_link_kind(std::string_view name) {
  for (auto kind : kLinkKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw InputError("unknown link kind: " + std::string(name));
}

ThesaurusGraph ThesaurusGraph::load(const std::filesystem::path& path) {
  TextFile file(path);
  ThesaurusGraph graph;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() < 3) file.fail("thesaurus edge needs head, link kind and tail");
    try {
      const LinkKind kind = parse_link_kind(f[1]);
      std::vector<std::string> gloss;
      for (std::size_t i = 3; i < f.size(); ++i) {
        for (auto& tok : tokenize(f[i])) gloss.push_back(std::move(tok));
      }
      graph.add_edge(f[0], kind, f[2], std::move(gloss));
    } catch (const InputError& e) {
      file.fail(e.what());
    }
  }
  return graph;
}

std::size_t ThesaurusGraph::intern(std::string_view word) {
  auto key = normalize_token(word);
  if (key.empty()) throw InputError("empty word in thesaurus graph");
  auto [it, inserted] = index_.try_emplace(key, words_.size());
  if (inserted) {
    words_.push_back(key);
    out_.emplace_back();
  }
  return it->second;
}

void ThesaurusGraph::add_edge(std::string_view from, LinkKind kind, std::string_view to,
                              std::vector<std::string> gloss) {
  if (normalize_token(from) == normalize_token(to)) {
    throw InputError("self-loop on '" + std::string(from) + "' in thesaurus graph");
  }
  const std::size_t a = intern(from);
  const std::size_t b = intern(to);
  out_[a].push_back(edges_.size());
  edges_.push_back(Edge{a, b, kind, std::move(gloss)});
}

std::optional<std::size_t> ThesaurusGraph::node(std::string_view word) const {
  auto it = index_.find(normalize_token(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::synonym: return "synonym";
    case Relation::antonym: return "antonym";
    case Relation::hypernym: return "hypernym";
    case Relation::hyponym: return "hyponym";
    case Relation::meronym_substance: return "meronym:substance";
    case Relation::meronym_part: return "meronym:part";
    case Relation::meronym_member: return "meronym:member";
    case Relation::holonym_substance: return "holonym:substance";
    case Relation::holonym_member: return "holonym:member";
  }
  return "?";
}

Relation parse_relation(std::string_view name) {
  for (auto r : kRelations) {
    if (to_string(r) == name) return r;
  }
  throw InputError("unknown lexical relation: " + std::string(name));
}

RelationDatabase RelationDatabase::load(const std::filesystem::path& path) {
  TextFile file(path);
  RelationDatabase db;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() != 3) file.fail("relation line needs relation, word, word");
    try {
      db.add(parse_relation(f[0]), f[1], f[2]);
    } catch (const InputError& e) {
      file.fail(e.what());
    }
  }
  return db;
}

void RelationDatabase::add(Relation relation, std::string_view a, std::string_view b) {
  pairs_[static_cast<std::size_t>(relation)].emplace(normalize_token(a), normalize_token(b));
}

bool RelationDatabase::contains(Relation relation, std::string_view a, std::string_view b) const {
  const auto& set = pairs_[static_cast<std::size_t>(relation)];
  return set.contains({std::string(a), std::string(b)});
}

std::vector<std::string> RelationDatabase::synonyms_of(std::string_view word) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : pairs_[static_cast<std::size_t>(Relation::synonym)]) {
    if (a == word) out.push_back(b);
    if (b == word) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

DefinitionTable DefinitionTable::load(const std::filesystem::path& path) {
  TextFile file(path);
  DefinitionTable table;
  std::vector<std::string> f;
  while (file.next_record(f)) {
    if (f.size() < 2) file.fail("definition line needs a word and its definition");
    std::string text = f[1];
    for (std::size_t i = 2; i < f.size(); ++i) text += " " + f[i];
    table.add(f[0], text);
  }
  return table;
}

void DefinitionTable::add(std::string_view word, std::string_view definition) {
  auto& tokens = definitions_[normalize_token(word)];
  for (auto& t : tokenize(definition)) tokens.push_back(std::move(t));
}

const std::vector<std::string>* DefinitionTable::find(std::string_view word) const {
  auto it = definitions_.find(normalize_token(word));
  return it == definitions_.end() ? nullptr : &it->second;
}

}  // namespace mcfuse::lexical
