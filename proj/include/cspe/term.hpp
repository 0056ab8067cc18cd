#ifndef CSPE_TERM_HPP
#define CSPE_TERM_HPP

// Process terms, event-set expressions, substitution and the syntactic
// doomed/viable split.
//
//   P, Q ::= STOP | FAIL | ?x:E -> P | P [] Q | P |[E]| Q
//   E    ::= {y, ...} | Sigma | E u E | E n E | E \ E
//   y    ::= event | variable
//
// Terms are immutable and share structure; copying one is a reference
// count bump.  Structural equality and a total order are provided so terms
// can be stored in ordered sets.

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cspe/error.hpp"

namespace cspe {

struct Event {
  std::string name;

  friend auto operator<=>(const Event&, const Event&) = default;
  friend bool operator==(const Event&, const Event&) = default;
};

struct EventVar {
  std::string name;

  friend auto operator<=>(const EventVar&, const EventVar&) = default;
  friend bool operator==(const EventVar&, const EventVar&) = default;
};

using EventParam = std::variant<Event, EventVar>;
using EventSet = std::set<Event>;
/// The declared, finite alphabet.  Ordered by event name.
using Alphabet = EventSet;
using Environment = std::map<EventVar, Event>;

inline Alphabet make_alphabet(std::initializer_list<const char*> names) {
  Alphabet out;
  for (const char* n : names) out.insert(Event{n});
  return out;
}

namespace detail {

inline std::vector<std::string> merge_names(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Event-set expressions
// ---------------------------------------------------------------------------

class EventSetExpr {
 public:
  enum class Kind { kLiteral, kFullAlphabet, kUnion, kIntersection, kDifference };

  /// The empty literal `{}`.
  EventSetExpr() : EventSetExpr(literal({})) {}

  static EventSetExpr literal(std::vector<EventParam> params) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kLiteral;
    for (const auto& p : params) {
      if (const auto* v = std::get_if<EventVar>(&p)) node->free.push_back(v->name);
    }
    std::sort(node->free.begin(), node->free.end());
    node->free.erase(std::unique(node->free.begin(), node->free.end()),
                     node->free.end());
    node->params = std::move(params);
    return EventSetExpr(std::move(node));
  }

  static EventSetExpr events(std::initializer_list<const char*> names) {
    std::vector<EventParam> params;
    for (const char* n : names) params.emplace_back(Event{n});
    return literal(std::move(params));
  }

  static EventSetExpr full_alphabet() {
    static const EventSetExpr full = [] {
      auto node = std::make_shared<Node>();
      node->kind = Kind::kFullAlphabet;
      return EventSetExpr(std::move(node));
    }();
    return full;
  }

  static EventSetExpr set_union(EventSetExpr a, EventSetExpr b) {
    return binary(Kind::kUnion, std::move(a), std::move(b));
  }
  static EventSetExpr set_intersection(EventSetExpr a, EventSetExpr b) {
    return binary(Kind::kIntersection, std::move(a), std::move(b));
  }
  static EventSetExpr set_difference(EventSetExpr a, EventSetExpr b) {
    return binary(Kind::kDifference, std::move(a), std::move(b));
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is_binary() const noexcept {
    return kind() != Kind::kLiteral && kind() != Kind::kFullAlphabet;
  }

  const std::vector<EventParam>& params() const {
    assert(kind() == Kind::kLiteral);
    return node_->params;
  }
  const EventSetExpr& lhs() const {
    assert(is_binary());
    return node_->operands[0];
  }
  const EventSetExpr& rhs() const {
    assert(is_binary());
    return node_->operands[1];
  }

  /// Sorted, duplicate-free names of the variables in literal leaves.
  const std::vector<std::string>& free_variables() const noexcept {
    return node_->free;
  }
  bool closed() const noexcept { return node_->free.empty(); }

  friend std::strong_ordering operator<=>(const EventSetExpr& a,
                                          const EventSetExpr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (a.kind() == Kind::kLiteral) return a.params() <=> b.params();
    if (a.kind() == Kind::kFullAlphabet) return std::strong_ordering::equal;
    if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
    return a.rhs() <=> b.rhs();
  }
  friend bool operator==(const EventSetExpr& a, const EventSetExpr& b) {
    return (a <=> b) == 0;
  }

 private:
  struct Node {
    Kind kind = Kind::kLiteral;
    std::vector<EventParam> params;
    std::vector<EventSetExpr> operands;
    std::vector<std::string> free;
  };

  explicit EventSetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static EventSetExpr binary(Kind kind, EventSetExpr a, EventSetExpr b) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->free = detail::merge_names(a.free_variables(), b.free_variables());
    node->operands = {std::move(a), std::move(b)};
    return EventSetExpr(std::move(node));
  }

  std::shared_ptr<const Node> node_;
};

/// Evaluates `expr` under `env`.  The result is always a subset of
/// `alphabet`; literal events outside it are dropped.
inline EventSet eval_event_set(const EventSetExpr& expr, const Environment& env,
                               const Alphabet& alphabet) {
  using Kind = EventSetExpr::Kind;
  switch (expr.kind()) {
    case Kind::kLiteral: {
      EventSet out;
      for (const auto& p : expr.params()) {
        Event e;
        if (const auto* ev = std::get_if<Event>(&p)) {
          e = *ev;
        } else {
          const auto& var = std::get<EventVar>(p);
          auto it = env.find(var);
          if (it == env.end()) throw UnboundVariableError(var.name);
          e = it->second;
        }
        if (alphabet.contains(e)) out.insert(std::move(e));
      }
      return out;
    }
    case Kind::kFullAlphabet:
      return alphabet;
    default:
      break;
  }
  EventSet a = eval_event_set(expr.lhs(), env, alphabet);
  EventSet b = eval_event_set(expr.rhs(), env, alphabet);
  EventSet out;
  switch (expr.kind()) {
    case Kind::kUnion:
      std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                     std::inserter(out, out.end()));
      break;
    case Kind::kIntersection:
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(out, out.end()));
      break;
    default:
      std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.end()));
      break;
  }
  return out;
}

/// Closed-expression shorthand.
inline EventSet eval_event_set(const EventSetExpr& expr, const Alphabet& alphabet) {
  return eval_event_set(expr, Environment{}, alphabet);
}

inline EventSetExpr substitute(const Event& e, const EventVar& x,
                               const EventSetExpr& expr) {
  using Kind = EventSetExpr::Kind;
  if (!std::binary_search(expr.free_variables().begin(),
                          expr.free_variables().end(), x.name)) {
    return expr;
  }
  switch (expr.kind()) {
    case Kind::kLiteral: {
      std::vector<EventParam> params;
      params.reserve(expr.params().size());
      for (const auto& p : expr.params()) {
        const auto* v = std::get_if<EventVar>(&p);
        if (v != nullptr && *v == x) {
          params.emplace_back(e);
        } else {
          params.push_back(p);
        }
      }
      return EventSetExpr::literal(std::move(params));
    }
    case Kind::kUnion:
      return EventSetExpr::set_union(substitute(e, x, expr.lhs()),
                                     substitute(e, x, expr.rhs()));
    case Kind::kIntersection:
      return EventSetExpr::set_intersection(substitute(e, x, expr.lhs()),
                                            substitute(e, x, expr.rhs()));
    case Kind::kDifference:
      return EventSetExpr::set_difference(substitute(e, x, expr.lhs()),
                                          substitute(e, x, expr.rhs()));
    case Kind::kFullAlphabet:
      break;
  }
  return expr;
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

class Term {
 public:
  enum class Kind { kStop, kFail, kPrefix, kChoice, kParallel };

  /// STOP.
  Term() : Term(stop()) {}

  static Term stop() {
    static const Term t = leaf(Kind::kStop);
    return t;
  }
  static Term fail() {
    static const Term t = leaf(Kind::kFail);
    return t;
  }

  static Term prefix(EventVar binder, EventSetExpr events, Term body) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kPrefix;
    node->size = body.size() + 1;
    node->doomed = false;
    std::vector<std::string> body_free = body.free_variables();
    std::erase(body_free, binder.name);
    node->free = detail::merge_names(events.free_variables(), body_free);
    node->binder = std::move(binder);
    node->events = std::move(events);
    node->children = {std::move(body)};
    return Term(std::move(node));
  }

  static Term choice(Term left, Term right) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kChoice;
    node->size = left.size() + right.size() + 1;
    node->doomed = left.doomed() && right.doomed();
    node->free = detail::merge_names(left.free_variables(), right.free_variables());
    node->children = {std::move(left), std::move(right)};
    return Term(std::move(node));
  }

  static Term parallel(Term left, EventSetExpr sync, Term right) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::kParallel;
    node->size = left.size() + right.size() + 1;
    node->doomed = left.doomed() || right.doomed();
    node->free = detail::merge_names(
        sync.free_variables(),
        detail::merge_names(left.free_variables(), right.free_variables()));
    node->events = std::move(sync);
    node->children = {std::move(left), std::move(right)};
    return Term(std::move(node));
  }

  Kind kind() const noexcept { return node_->kind; }

  /// Constructor count; event sets do not contribute.
  std::size_t size() const noexcept { return node_->size; }

  /// Membership in D ::= FAIL | D [] D | D |[E]| P | P |[E]| D.
  /// Cached at construction, so this is O(1).
  bool doomed() const noexcept { return node_->doomed; }

  const std::vector<std::string>& free_variables() const noexcept {
    return node_->free;
  }
  bool closed() const noexcept { return node_->free.empty(); }

  const EventVar& binder() const {
    assert(kind() == Kind::kPrefix);
    return node_->binder;
  }
  /// Offered set of a prefix, or synchronisation set of a parallel.
  const EventSetExpr& events() const {
    assert(kind() == Kind::kPrefix || kind() == Kind::kParallel);
    return node_->events;
  }
  const Term& body() const {
    assert(kind() == Kind::kPrefix);
    return node_->children[0];
  }
  const Term& left() const {
    assert(kind() == Kind::kChoice || kind() == Kind::kParallel);
    return node_->children[0];
  }
  const Term& right() const {
    assert(kind() == Kind::kChoice || kind() == Kind::kParallel);
    return node_->children[1];
  }

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    switch (a.kind()) {
      case Kind::kStop:
      case Kind::kFail:
        return std::strong_ordering::equal;
      case Kind::kPrefix:
        if (auto c = a.binder() <=> b.binder(); c != 0) return c;
        if (auto c = a.events() <=> b.events(); c != 0) return c;
        return a.body() <=> b.body();
      case Kind::kChoice:
        if (auto c = a.left() <=> b.left(); c != 0) return c;
        return a.right() <=> b.right();
      case Kind::kParallel:
        if (auto c = a.events() <=> b.events(); c != 0) return c;
        if (auto c = a.left() <=> b.left(); c != 0) return c;
        return a.right() <=> b.right();
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

 private:
  struct Node {
    Kind kind = Kind::kStop;
    std::size_t size = 1;
    bool doomed = false;
    EventVar binder;
    EventSetExpr events;
    std::vector<Term> children;
    std::vector<std::string> free;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Term leaf(Kind kind) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->doomed = kind == Kind::kFail;
    return Term(std::move(node));
  }

  std::shared_ptr<const Node> node_;
};

using TermSet = std::set<Term>;

enum class Viability { kViable, kDoomed };

inline Viability classify(const Term& p) {
  return p.doomed() ? Viability::kDoomed : Viability::kViable;
}

inline bool is_doomed(const Term& p) { return p.doomed(); }

inline std::size_t term_size(const Term& p) { return p.size(); }

/// Replaces the free occurrences of `x` in `p` by `e`, including those in
/// event-set literals.  A prefix rebinding `x` shields its body but not its
/// own offered set.
inline Term substitute(const Event& e, const EventVar& x, const Term& p) {
  if (!std::binary_search(p.free_variables().begin(), p.free_variables().end(),
                          x.name)) {
    return p;
  }
  switch (p.kind()) {
    case Term::Kind::kPrefix: {
      EventSetExpr events = substitute(e, x, p.events());
      Term body = p.binder() == x ? p.body() : substitute(e, x, p.body());
      return Term::prefix(p.binder(), std::move(events), std::move(body));
    }
    case Term::Kind::kChoice:
      return Term::choice(substitute(e, x, p.left()), substitute(e, x, p.right()));
    case Term::Kind::kParallel:
      return Term::parallel(substitute(e, x, p.left()),
                            substitute(e, x, p.events()),
                            substitute(e, x, p.right()));
    default:
      return p;
  }
}

/// Upper bound on the length of any trace `p` can emit: prefixes add one,
/// choice takes the longer branch, parallel adds both sides.
inline std::size_t max_trace_length(const Term& p) {
  switch (p.kind()) {
    case Term::Kind::kPrefix:
      return 1 + max_trace_length(p.body());
    case Term::Kind::kChoice:
      return std::max(max_trace_length(p.left()), max_trace_length(p.right()));
    case Term::Kind::kParallel:
      return max_trace_length(p.left()) + max_trace_length(p.right());
    default:
      return 0;
  }
}

/// Deepest chain of nested prefixes.
inline std::size_t prefix_nesting_depth(const Term& p) {
  switch (p.kind()) {
    case Term::Kind::kPrefix:
      return 1 + prefix_nesting_depth(p.body());
    case Term::Kind::kChoice:
    case Term::Kind::kParallel:
      return std::max(prefix_nesting_depth(p.left()), prefix_nesting_depth(p.right()));
    default:
      return 0;
  }
}

}  // namespace cspe

#endif  // CSPE_TERM_HPP
