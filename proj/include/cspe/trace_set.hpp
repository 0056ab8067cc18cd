#ifndef CSPE_TRACE_SET_HPP
#define CSPE_TRACE_SET_HPP

// Denotational trace semantics.
//
// A prefix-closed trace set is stored as a trie: the root stands for the
// empty trace and every edge appends one event.  The empty set has no root.
// Derivatives T(e) are then just child lookups, and the parallel operator
// can memoise on node identity.
//
// Each set carries `exact_depth`, the length up to which its traces agree
// with the ideal (possibly larger) set it approximates.  Sets built from an
// explicit list of traces are exact at every depth (kUnbounded).

#include <algorithm>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cspe/term.hpp"

namespace cspe {

using Trace = std::vector<Event>;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

class TraceSet {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    /// Sorted by event.
    std::vector<std::pair<Event, NodePtr>> children;
    /// Longest trace below this node.
    std::size_t height = 0;
    /// Number of traces below this node, the empty one included.
    std::size_t count = 1;

    const Node* child(const Event& e) const {
      auto it = std::lower_bound(
          children.begin(), children.end(), e,
          [](const auto& entry, const Event& key) { return entry.first < key; });
      return it != children.end() && it->first == e ? it->second.get() : nullptr;
    }
    NodePtr child_ptr(const Event& e) const {
      auto it = std::lower_bound(
          children.begin(), children.end(), e,
          [](const auto& entry, const Event& key) { return entry.first < key; });
      return it != children.end() && it->first == e ? it->second : nullptr;
    }
  };

  /// The empty trace set.
  TraceSet() = default;
  TraceSet(NodePtr root, std::size_t exact_depth)
      : root_(truncate(std::move(root), exact_depth)), exact_depth_(exact_depth) {}

  static TraceSet empty_set(std::size_t exact_depth = kUnbounded) {
    return TraceSet(nullptr, exact_depth);
  }
  /// {ε}
  static TraceSet epsilon(std::size_t exact_depth = kUnbounded) {
    return TraceSet(leaf(), exact_depth);
  }

  /// Prefix closure of `traces`, truncated at `exact_depth`.
  static TraceSet from_traces(const std::vector<Trace>& traces,
                              std::size_t exact_depth = kUnbounded) {
    NodePtr root;
    for (const auto& t : traces) root = merge(root, chain(t, 0));
    return TraceSet(std::move(root), exact_depth);
  }

  /// Every trace over `alphabet` of length at most `depth`.
  static TraceSet all_traces(const Alphabet& alphabet, std::size_t depth) {
    NodePtr node = leaf();
    for (std::size_t d = 0; d < depth; ++d) {
      auto next = std::make_shared<Node>();
      for (const auto& e : alphabet) next->children.emplace_back(e, node);
      finish(*next);
      node = std::move(next);
    }
    return TraceSet(std::move(node), depth);
  }

  bool empty() const noexcept { return root_ == nullptr; }
  std::size_t size() const noexcept { return root_ ? root_->count : 0; }
  std::size_t exact_depth() const noexcept { return exact_depth_; }
  const NodePtr& root() const noexcept { return root_; }

  bool contains(const Trace& t) const {
    const Node* n = root_.get();
    for (const auto& e : t) {
      if (n == nullptr) return false;
      n = n->child(e);
    }
    return n != nullptr;
  }

  /// All members in canonical order: lexicographic by event name, a trace
  /// before its extensions.
  std::vector<Trace> traces() const {
    std::vector<Trace> out;
    if (!root_) return out;
    out.reserve(root_->count);
    Trace cur;
    collect(*root_, cur, out);
    return out;
  }

  /// Keeps traces of length at most `depth`.
  TraceSet truncated(std::size_t depth) const {
    return TraceSet(root_, std::min(depth, exact_depth_));
  }

  /// Set equality on members; `exact_depth` is bookkeeping and is ignored.
  friend bool operator==(const TraceSet& a, const TraceSet& b) {
    return same(a.root_.get(), b.root_.get());
  }

  // Trie construction helpers, shared with the semantic operators.

  static NodePtr leaf() {
    static const NodePtr l = std::make_shared<Node>();
    return l;
  }

  static void finish(Node& n) {
    n.height = 0;
    n.count = 1;
    for (const auto& [e, c] : n.children) {
      n.height = std::max(n.height, c->height + 1);
      n.count += c->count;
    }
  }

  static NodePtr merge(const NodePtr& a, const NodePtr& b) {
    if (!a) return b;
    if (!b || a == b) return a;
    auto out = std::make_shared<Node>();
    auto ia = a->children.begin();
    auto ib = b->children.begin();
    while (ia != a->children.end() || ib != b->children.end()) {
      if (ib == b->children.end() || (ia != a->children.end() && ia->first < ib->first)) {
        out->children.push_back(*ia++);
      } else if (ia == a->children.end() || ib->first < ia->first) {
        out->children.push_back(*ib++);
      } else {
        out->children.emplace_back(ia->first, merge(ia->second, ib->second));
        ++ia;
        ++ib;
      }
    }
    finish(*out);
    return out;
  }

  static NodePtr truncate(NodePtr n, std::size_t depth) {
    if (!n || n->height <= depth) return n;
    if (depth == 0) return leaf();
    auto out = std::make_shared<Node>();
    out->children.reserve(n->children.size());
    for (const auto& [e, c] : n->children) out->children.emplace_back(e, truncate(c, depth - 1));
    finish(*out);
    return out;
  }

 private:
  static NodePtr chain(const Trace& t, std::size_t from) {
    if (from == t.size()) return leaf();
    auto n = std::make_shared<Node>();
    n->children.emplace_back(t[from], chain(t, from + 1));
    finish(*n);
    return n;
  }

  static void collect(const Node& n, Trace& cur, std::vector<Trace>& out) {
    out.push_back(cur);
    for (const auto& [e, c] : n.children) {
      cur.push_back(e);
      collect(*c, cur, out);
      cur.pop_back();
    }
  }

  static bool same(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->count != b->count || a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i) {
      if (a->children[i].first != b->children[i].first) return false;
      if (!same(a->children[i].second.get(), b->children[i].second.get())) return false;
    }
    return true;
  }

  NodePtr root_;
  std::size_t exact_depth_ = kUnbounded;
};

namespace detail {

inline std::size_t saturating_inc(std::size_t d) {
  return d == kUnbounded ? d : d + 1;
}

}  // namespace detail

inline TraceSet set_union(const TraceSet& a, const TraceSet& b) {
  std::size_t depth = std::min(a.exact_depth(), b.exact_depth());
  return TraceSet(TraceSet::merge(a.root(), b.root()), depth);
}

/// eT = {ε} ∪ {e·t | t ∈ T}.  The result is exact one level deeper than
/// `t`, capped at `bound`.
inline TraceSet prepend_adjoin(const Event& e, const TraceSet& t,
                               std::size_t bound = kUnbounded) {
  std::size_t depth = std::min(detail::saturating_inc(t.exact_depth()), bound);
  if (t.empty()) return TraceSet::epsilon(depth);
  auto node = std::make_shared<TraceSet::Node>();
  node->children.emplace_back(e, t.root());
  TraceSet::finish(*node);
  return TraceSet(std::move(node), depth);
}

/// T(e) = {t | e·t ∈ T}.  Undefined for a set exact only at depth 0,
/// since nothing is known about its traces of length one.
inline TraceSet derive(const TraceSet& t, const Event& e) {
  if (t.exact_depth() == 0) {
    throw std::domain_error("derive: trace set is only exact at depth 0");
  }
  std::size_t depth = t.exact_depth() == kUnbounded ? kUnbounded : t.exact_depth() - 1;
  if (t.empty()) return TraceSet::empty_set(depth);
  return TraceSet(t.root()->child_ptr(e), depth);
}

struct ParallelOptions {
  /// When false, the empty-operand equation is skipped and the interleaving
  /// equation is applied to empty operands too.  Only mutation tests turn
  /// this off.
  bool empty_operand_precedence = true;
};

namespace detail {

class ParallelEvaluator {
 public:
  using NodePtr = TraceSet::NodePtr;

  ParallelEvaluator(const EventSet& sync, const Alphabet& alphabet, ParallelOptions options)
      : sync_(sync), alphabet_(alphabet), options_(options) {}

  NodePtr compose(const NodePtr& a, const NodePtr& b, std::size_t budget) {
    if (options_.empty_operand_precedence && (!a || !b)) return nullptr;
    auto key = std::make_tuple(a.get(), b.get(), budget);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    auto node = std::make_shared<TraceSet::Node>();
    if (budget > 0) {
      for (const auto& e : alphabet_) {
        NodePtr da = a ? a->child_ptr(e) : nullptr;
        NodePtr db = b ? b->child_ptr(e) : nullptr;
        NodePtr sub;
        if (sync_.contains(e)) {
          sub = compose(da, db, budget - 1);
        } else {
          sub = TraceSet::merge(compose(da, b, budget - 1), compose(a, db, budget - 1));
        }
        if (sub) node->children.emplace_back(e, std::move(sub));
      }
    }
    TraceSet::finish(*node);
    // Σ is nonempty, so every union term contributes ε.
    NodePtr result = alphabet_.empty() ? nullptr : NodePtr(std::move(node));
    memo_.emplace(key, result);
    return result;
  }

 private:
  const EventSet& sync_;
  const Alphabet& alphabet_;
  ParallelOptions options_;
  // Keys are subtries of the two root operands, which the caller keeps
  // alive for the evaluator's lifetime, so addresses are stable.
  std::map<std::tuple<const TraceSet::Node*, const TraceSet::Node*, std::size_t>, NodePtr> memo_;
};

inline std::size_t parallel_budget(const TraceSet& a, const TraceSet& b) {
  std::size_t depth = std::min(a.exact_depth(), b.exact_depth());
  std::size_t ha = a.empty() ? 0 : a.root()->height;
  std::size_t hb = b.empty() ? 0 : b.root()->height;
  // Interleavings are never longer than ha + hb, except in the mutated
  // evaluator, which treats ∅ as {ε} and produces traces of any length.
  return depth == kUnbounded ? ha + hb : depth;
}

}  // namespace detail

/// T1 |[E]| T2: ∅ whenever either side is ∅; otherwise
///   ⋃_{e∈E} e(T1(e) ∥ T2(e)) ∪ ⋃_{e∈Σ−E} (e(T1(e) ∥ T2) ∪ e(T1 ∥ T2(e))).
inline TraceSet par_comp(const TraceSet& t1, const EventSet& sync, const TraceSet& t2,
                         const Alphabet& alphabet, ParallelOptions options = {}) {
  std::size_t depth = std::min(t1.exact_depth(), t2.exact_depth());
  detail::ParallelEvaluator eval(sync, alphabet, options);
  return TraceSet(eval.compose(t1.root(), t2.root(), detail::parallel_budget(t1, t2)), depth);
}

namespace detail {

class SemanticsEvaluator {
 public:
  using NodePtr = TraceSet::NodePtr;

  SemanticsEvaluator(const Alphabet& alphabet, ParallelOptions options)
      : alphabet_(alphabet), options_(options) {}

  NodePtr eval(const Term& p, std::size_t depth) {
    switch (p.kind()) {
      case Term::Kind::kStop:
        return TraceSet::leaf();
      case Term::Kind::kFail:
        return nullptr;
      case Term::Kind::kPrefix: {
        if (!p.events().closed()) {
          throw OpenTermError("semantics: prefix offers an open event set");
        }
        auto node = std::make_shared<TraceSet::Node>();
        if (depth > 0) {
          for (const auto& e : eval_event_set(p.events(), alphabet_)) {
            NodePtr sub = eval(substitute(e, p.binder(), p.body()), depth - 1);
            if (sub) node->children.emplace_back(e, std::move(sub));
          }
        }
        TraceSet::finish(*node);
        return node;
      }
      case Term::Kind::kChoice:
        return TraceSet::merge(eval(p.left(), depth), eval(p.right(), depth));
      case Term::Kind::kParallel: {
        NodePtr l = eval(p.left(), depth);
        NodePtr r = eval(p.right(), depth);
        EventSet sync = eval_event_set(p.events(), alphabet_);
        ParallelEvaluator par(sync, alphabet_, options_);
        return par.compose(l, r, depth);
      }
    }
    return nullptr;
  }

 private:
  const Alphabet& alphabet_;
  ParallelOptions options_;
};

}  // namespace detail

/// { t ∈ sem(p) : |t| ≤ depth }.
inline TraceSet semantics(const Term& p, std::size_t depth, const Alphabet& alphabet,
                          ParallelOptions options = {}) {
  if (!p.closed()) throw OpenTermError("semantics: term has free variables");
  detail::SemanticsEvaluator eval(alphabet, options);
  return TraceSet(eval.eval(p, depth), depth);
}

// ---------------------------------------------------------------------------
// Text form: one trace per line, events joined by '.', ε as an empty line.
// ---------------------------------------------------------------------------

inline std::string format_trace(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += '.';
    out += t[i].name;
  }
  return out;
}

inline Trace parse_trace(const std::string& text) {
  Trace out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = text.find('.', start);
    out.push_back(Event{text.substr(start, dot - start)});
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return out;
}

inline void write_trace_set(std::ostream& os, const TraceSet& t) {
  for (const auto& trace : t.traces()) os << format_trace(trace) << '\n';
}

inline TraceSet read_trace_set(std::istream& is, std::size_t exact_depth = kUnbounded) {
  std::vector<Trace> traces;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    traces.push_back(parse_trace(line));
  }
  return TraceSet::from_traces(traces, exact_depth);
}

inline std::ostream& operator<<(std::ostream& os, const TraceSet& t) {
  os << '{';
  bool first = true;
  for (const auto& trace : t.traces()) {
    if (!first) os << ", ";
    first = false;
    os << (trace.empty() ? std::string("ε") : format_trace(trace));
  }
  return os << '}';
}

}  // namespace cspe

#endif  // CSPE_TRACE_SET_HPP
