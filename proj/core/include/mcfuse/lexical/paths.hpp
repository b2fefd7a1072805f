#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/lexical/resources.hpp"

namespace mcfuse::lexical {

enum class PathDirection { forward, backward };  // X -> Y, Y -> X

struct ThesaurusPath {
  PathDirection direction = PathDirection::forward;
  std::vector<std::size_t> edges;  ///< indices into ThesaurusGraph::edges(), in walk order
  std::vector<LinkKind> kinds;
  /// Intermediate nodes plus gloss words of traversed gloss links, sorted
  /// and deduplicated. Endpoints are excluded.
  std::vector<std::string> words;

  std::size_t length() const { return edges.size(); }
};

inline constexpr std::size_t kMaxPathLinks = 3;

/// Every minimum-length directed path X -> Y and every minimum-length path
/// Y -> X with at most `max_links` links. Empty when X == Y.
std::vector<ThesaurusPath> bfs_paths(const ThesaurusGraph& graph, std::string_view x, std::string_view y,
                                     std::size_t max_links = kMaxPathLinks);

/// Shared link kinds (multiset intersection) + 1 for equal direction +
/// shared words.
double path_similarity(const ThesaurusPath& p, const ThesaurusPath& q);

/// Per choice: the best path_similarity between any stem path and any
/// choice path (0 for choices without paths).
std::vector<double> analogy_path_scores(const ThesaurusGraph& graph, const Instance& instance,
                                        std::size_t max_links = kMaxPathLinks);
/// Normalized analogy_path_scores; uniform when the stem has no paths.
Distribution analogy_path_score(const ThesaurusGraph& graph, const Instance& instance,
                                std::size_t max_links = kMaxPathLinks);

}  // namespace mcfuse::lexical
