#ifndef CSPE_DOT_HPP
#define CSPE_DOT_HPP

// Reachable transition graph of a term set and its Graphviz rendering.

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cspe/sos.hpp"
#include "cspe/syntax.hpp"
#include "cspe/term.hpp"

namespace cspe {

struct Lts {
  struct Edge {
    std::size_t from;
    Action action;
    std::size_t to;
  };

  std::vector<Term> states;
  std::vector<Edge> edges;
  /// States [0, initial_count) are the starting terms.
  std::size_t initial_count = 0;
  /// Exploration stopped at the state cap; some edges are missing.
  bool truncated = false;
};

inline Lts explore(const TermSet& start, const Alphabet& alphabet,
                   std::size_t max_states = 10'000, const StepRules& rules = {}) {
  Lts lts;
  std::map<Term, std::size_t> index;
  auto intern = [&](const Term& t) {
    auto [it, fresh] = index.emplace(t, lts.states.size());
    if (fresh) lts.states.push_back(t);
    return it->second;
  };
  for (const auto& t : start) intern(t);
  lts.initial_count = lts.states.size();
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    if (lts.states.size() >= max_states) {
      lts.truncated = true;
      break;
    }
    Term cur = lts.states[i];
    for (const auto& t : internal_successors(cur, alphabet, rules)) {
      lts.edges.push_back({i, t.action, intern(t.target)});
    }
  }
  return lts;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// τ edges are dashed, doomed states are boxes, start states are doubled.
inline void write_dot(std::ostream& os, const Lts& lts) {
  os << "digraph lts {\n";
  os << "  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    const Term& t = lts.states[i];
    os << "  s" << i << " [label=\"" << detail::dot_escape(print_term(t)) << "\"";
    if (t.doomed()) os << ", shape=box";
    if (i < lts.initial_count) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : lts.edges) {
    os << "  s" << e.from << " -> s" << e.to << " [label=\""
       << detail::dot_escape(to_string(e.action)) << "\"";
    if (e.action.is_tau()) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
}

}  // namespace cspe

#endif  // CSPE_DOT_HPP
