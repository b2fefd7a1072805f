#include "mcfuse/lexical/paths.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

namespace mcfuse::lexical {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

ThesaurusPath make_path(const ThesaurusGraph& graph, PathDirection direction, std::vector<std::size_t> edges) {
  ThesaurusPath path;
  path.direction = direction;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = graph.edges()[edges[e]];
    path.kinds.push_back(edge.kind);
    if (e > 0) path.words.push_back(graph.word(edge.from));
    path.words.insert(path.words.end(), edge.gloss.begin(), edge.gloss.end());
  }
  std::sort(path.words.begin(), path.words.end());
  path.words.erase(std::unique(path.words.begin(), path.words.end()), path.words.end());
  path.edges = std::move(edges);
  return path;
}

// All shortest directed paths source -> target within max_links.
void shortest_paths(const ThesaurusGraph& graph, std::size_t source, std::size_t target, std::size_t max_links,
                    PathDirection direction, std::vector<ThesaurusPath>& out) {
  std::vector<std::size_t> dist(graph.node_count(), kUnreached);
  dist[source] = 0;
  std::vector<std::size_t> frontier{source};
  std::size_t length = kUnreached;
  for (std::size_t depth = 0; depth < max_links && length == kUnreached && !frontier.empty(); ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t u : frontier) {
      for (std::size_t e : graph.out_edges(u)) {
        const std::size_t v = graph.edges()[e].to;
        if (dist[v] != kUnreached) continue;
        dist[v] = depth + 1;
        next.push_back(v);
        if (v == target) length = depth + 1;
      }
    }
    frontier = std::move(next);
  }
  if (length == kUnreached) return;

  // Walk the layered DAG; every route that reaches the target at `length`
  // is a shortest path.
  std::vector<std::size_t> stack;
  auto walk = [&](auto&& self, std::size_t u) -> void {
    if (stack.size() == length) {
      if (u == target) out.push_back(make_path(graph, direction, stack));
      return;
    }
    for (std::size_t e : graph.out_edges(u)) {
      const std::size_t v = graph.edges()[e].to;
      if (dist[v] != stack.size() + 1) continue;
      stack.push_back(e);
      self(self, v);
      stack.pop_back();
    }
  };
  walk(walk, source);
}

}  // namespace

std::vector<ThesaurusPath> bfs_paths(const ThesaurusGraph& graph, std::string_view x, std::string_view y,
                                     std::size_t max_links) {
  std::vector<ThesaurusPath> paths;
  const auto a = graph.node(x);
  const auto b = graph.node(y);
  if (!a || !b || *a == *b || max_links == 0) return paths;
  shortest_paths(graph, *a, *b, max_links, PathDirection::forward, paths);
  shortest_paths(graph, *b, *a, max_links, PathDirection::backward, paths);
  return paths;
}

double path_similarity(const ThesaurusPath& p, const ThesaurusPath& q) {
  auto kinds_p = p.kinds;
  auto kinds_q = q.kinds;
  std::sort(kinds_p.begin(), kinds_p.end());
  std::sort(kinds_q.begin(), kinds_q.end());
  std::vector<LinkKind> shared_kinds;
  std::set_intersection(kinds_p.begin(), kinds_p.end(), kinds_q.begin(), kinds_q.end(),
                        std::back_inserter(shared_kinds));
  std::vector<std::string> shared_words;
  std::set_intersection(p.words.begin(), p.words.end(), q.words.begin(), q.words.end(),
                        std::back_inserter(shared_words));
  return static_cast<double>(shared_kinds.size()) + (p.direction == q.direction ? 1.0 : 0.0) +
         static_cast<double>(shared_words.size());
}

std::vector<double> analogy_path_scores(const ThesaurusGraph& graph, const Instance& instance, std::size_t max_links) {
  if (instance.stem.arity() != 2) throw InvalidParameter("thesaurus paths need an analogy instance");
  const auto stem_paths = bfs_paths(graph, instance.stem[0], instance.stem[1], max_links);
  std::vector<double> raw(instance.k(), 0.0);
  if (stem_paths.empty()) return raw;
  for (std::size_t j = 0; j < instance.k(); ++j) {
    for (const auto& q : bfs_paths(graph, instance.choices[j][0], instance.choices[j][1], max_links)) {
      for (const auto& p : stem_paths) raw[j] = std::max(raw[j], path_similarity(p, q));
    }
  }
  return raw;
}

Distribution analogy_path_score(const ThesaurusGraph& graph, const Instance& instance, std::size_t max_links) {
  return normalize(analogy_path_scores(graph, instance, max_links));
}

}  // namespace mcfuse::lexical
