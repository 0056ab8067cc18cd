#ifndef CSPE_CONFORMANCE_HPP
#define CSPE_CONFORMANCE_HPP

// Random term generation and cross-checks between the denotational and the
// operational semantics.  Every check returns a Report instead of throwing,
// so a harness can run a whole corpus and print one line per property.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cspe/monitor.hpp"
#include "cspe/sos.hpp"
#include "cspe/syntax.hpp"
#include "cspe/term.hpp"
#include "cspe/trace_set.hpp"

namespace cspe {

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct GenConfig {
  std::size_t max_size = 12;
  Alphabet alphabet = make_alphabet({"a", "b", "c"});
  std::uint64_t seed = 0;
  std::size_t set_expr_depth = 2;
};

/// Seeded source of closed random terms.  Output depends only on the
/// config: mt19937_64 is fully specified and draws use plain modulo.
class TermGenerator {
 public:
  explicit TermGenerator(GenConfig cfg)
      : cfg_(std::move(cfg)), rng_(cfg_.seed), events_(cfg_.alphabet.begin(), cfg_.alphabet.end()) {
    for (std::string v : {"x", "y", "z"}) {
      while (cfg_.alphabet.contains(Event{v})) v += '_';
      var_pool_.push_back(v);
    }
  }

  Term next() { return term(std::max<std::size_t>(cfg_.max_size, 1)); }

  std::uint64_t draw(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  std::mt19937_64& rng() { return rng_; }

 private:
  Term term(std::size_t budget) {
    if (budget == 1 || events_.empty()) return draw(2) == 0 ? Term::stop() : Term::fail();
    // Weights: STOP 1, FAIL 1, prefix 4, choice 2, parallel 2.
    std::uint64_t total = budget >= 3 ? 10 : 6;
    std::uint64_t pick = draw(total);
    if (pick == 0) return Term::stop();
    if (pick == 1) return Term::fail();
    if (pick < 6) {
      const std::string& var = var_pool_[draw(var_pool_.size())];
      EventSetExpr events = set_expr(cfg_.set_expr_depth);
      scope_.push_back(var);
      Term body = term(budget - 1);
      scope_.pop_back();
      return Term::prefix(EventVar{var}, std::move(events), std::move(body));
    }
    std::size_t left = 1 + draw(budget - 2);
    std::size_t right = budget - 1 - left;
    Term l = term(left);
    Term r = term(right);
    if (pick < 8) return Term::choice(std::move(l), std::move(r));
    return Term::parallel(std::move(l), set_expr(cfg_.set_expr_depth), std::move(r));
  }

  EventSetExpr set_expr(std::size_t depth) {
    std::uint64_t pick = draw(depth > 0 ? 8 : 5);
    if (pick < 4) {
      std::vector<EventParam> params;
      std::size_t n = draw(3);
      for (std::size_t i = 0; i < n; ++i) {
        if (!scope_.empty() && draw(3) == 0) {
          params.emplace_back(EventVar{scope_[draw(scope_.size())]});
        } else {
          params.emplace_back(events_[draw(events_.size())]);
        }
      }
      return EventSetExpr::literal(std::move(params));
    }
    if (pick == 4) return EventSetExpr::full_alphabet();
    EventSetExpr a = set_expr(depth - 1);
    EventSetExpr b = set_expr(depth - 1);
    if (pick == 5) return EventSetExpr::set_union(std::move(a), std::move(b));
    if (pick == 6) return EventSetExpr::set_intersection(std::move(a), std::move(b));
    return EventSetExpr::set_difference(std::move(a), std::move(b));
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<Event> events_;
  std::vector<std::string> var_pool_;
  std::vector<std::string> scope_;
};

inline Term gen_term(const GenConfig& cfg) { return TermGenerator(cfg).next(); }

/// Random trace of length at most `max_length`.
inline Trace random_trace(std::mt19937_64& rng, const Alphabet& alphabet, std::size_t max_length) {
  std::vector<Event> events(alphabet.begin(), alphabet.end());
  Trace t(rng() % (max_length + 1));
  for (auto& e : t) e = events[rng() % events.size()];
  return t;
}

/// Random prefix-closed set with traces of length at most `max_depth`;
/// empty with probability about 1/8.
inline TraceSet random_trace_set(std::mt19937_64& rng, const Alphabet& alphabet,
                                 std::size_t max_depth) {
  if (rng() % 8 == 0) return TraceSet::empty_set();
  std::vector<Trace> traces{Trace{}};
  std::size_t n = rng() % 6;
  for (std::size_t i = 0; i < n; ++i) traces.push_back(random_trace(rng, alphabet, max_depth));
  return TraceSet::from_traces(traces);
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

struct Report {
  std::string property;
  bool passed = true;
  std::string counterexample;
};

/// Rule variants under test; defaults are the real semantics.
struct CheckOptions {
  StepRules rules;
  ParallelOptions parallel;
};

namespace detail {

inline bool shorter_then_lex(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline std::string show_trace(const Trace& t) {
  return t.empty() ? std::string("ε") : format_trace(t);
}

}  // namespace detail

/// { s : |s| ≤ depth, ∃M. P =s=> M, M viable }, explored breadth-first
/// over the sets run(P, s).  Not assumed prefix-closed.
inline std::set<Trace> operational_traces(const Term& p, std::size_t depth,
                                          const Alphabet& alphabet,
                                          const StepRules& rules = {}) {
  std::set<Trace> out;
  std::vector<std::pair<Trace, TermSet>> frontier{{Trace{}, tau_closure(p, alphabet, rules)}};
  for (std::size_t len = 0; !frontier.empty(); ++len) {
    std::vector<std::pair<Trace, TermSet>> next;
    for (auto& [s, terms] : frontier) {
      if (detail::any_viable(terms)) out.insert(s);
      if (len == depth) continue;
      for (const auto& e : alphabet) {
        TermSet after;
        for (const auto& m : terms) after.merge(visible_successors(m, e, alphabet, rules));
        if (after.empty()) continue;
        Trace s2 = s;
        s2.push_back(e);
        next.emplace_back(std::move(s2), std::move(after));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

inline Report compare_trace_sets(std::string property, const TraceSet& expected,
                                 const std::set<Trace>& actual) {
  Report r{std::move(property), true, {}};
  auto lhs = expected.traces();
  std::set<Trace> l(lhs.begin(), lhs.end());
  std::vector<Trace> diff;
  std::set_symmetric_difference(l.begin(), l.end(), actual.begin(), actual.end(),
                                std::back_inserter(diff));
  if (!diff.empty()) {
    auto worst = *std::min_element(diff.begin(), diff.end(), detail::shorter_then_lex);
    r.passed = false;
    r.counterexample = "trace=" + detail::show_trace(worst) +
                       (l.contains(worst) ? " only-denotational" : " only-operational");
  }
  return r;
}

/// sem(P) and the viable-reachable traces agree up to `depth`.
inline Report check_correspondence(const Term& p, std::size_t depth, const Alphabet& alphabet,
                                   const CheckOptions& opts = {}) {
  return compare_trace_sets("correspondence", semantics(p, depth, alphabet, opts.parallel),
                            operational_traces(p, depth, alphabet, opts.rules));
}

/// A doomed term only τ-steps, stays doomed, shrinks, and ends at FAIL.
inline Report check_doomed_normalization(const Term& p, const Alphabet& alphabet,
                                         const CheckOptions& opts = {}) {
  Report r{"doomed-normalization", true, {}};
  if (!p.doomed()) return r;
  TermSet seen{p};
  std::vector<Term> work{p};
  while (!work.empty() && r.passed) {
    Term cur = std::move(work.back());
    work.pop_back();
    auto succ = internal_successors(cur, alphabet, opts.rules);
    if (succ.empty() && cur.kind() != Term::Kind::kFail) {
      r.passed = false;
      r.counterexample = "stuck-at=" + print_term(cur);
    }
    for (const auto& t : succ) {
      std::string why;
      if (!t.action.is_tau()) why = "visible-step";
      else if (!t.target.doomed()) why = "left-doomed";
      else if (t.target.size() >= t.source.size()) why = "size-not-decreasing";
      if (!why.empty()) {
        r.passed = false;
        r.counterexample = why + " " + print_term(t.source) + " --" + to_string(t.action) +
                           "--> " + print_term(t.target);
        break;
      }
      if (seen.insert(t.target).second) work.push_back(t.target);
    }
  }
  return r;
}

/// Doomed exactly when the trace set is empty.
inline Report check_doomed_iff_empty(const Term& p, std::size_t depth, const Alphabet& alphabet,
                                 const CheckOptions& opts = {}) {
  Report r{"doomed-iff-empty", true, {}};
  bool empty = semantics(p, depth, alphabet, opts.parallel).empty();
  if (empty != p.doomed()) {
    r.passed = false;
    r.counterexample = std::string(p.doomed() ? "doomed" : "viable") + " but sem " +
                       (empty ? "empty" : "nonempty");
  }
  return r;
}

/// sem(P)(e) = ⋃_{P =e=> Q} sem(Q), compared up to depth-1.
inline Report check_derivative(const Term& p, const Event& e, std::size_t depth,
                           const Alphabet& alphabet, const CheckOptions& opts = {}) {
  Report r{"derivative[" + e.name + "]", true, {}};
  if (depth == 0) depth = 1;
  TraceSet lhs = derive(semantics(p, depth, alphabet, opts.parallel), e);
  TraceSet rhs = TraceSet::empty_set(depth - 1);
  for (const auto& q : visible_successors(p, e, alphabet, opts.rules)) {
    rhs = set_union(rhs, semantics(q, depth - 1, alphabet, opts.parallel));
  }
  auto rt = rhs.traces();
  return compare_trace_sets(r.property, lhs, std::set<Trace>(rt.begin(), rt.end()));
}

/// (T1 ∪ T1') |[E]| T2 = (T1 |[E]| T2) ∪ (T1' |[E]| T2).
inline Report check_continuity_instance(const TraceSet& t1, const TraceSet& t1p,
                                        const TraceSet& t2, const EventSet& sync,
                                        const Alphabet& alphabet, const CheckOptions& opts = {}) {
  TraceSet lhs = par_comp(set_union(t1, t1p), sync, t2, alphabet, opts.parallel);
  TraceSet rhs = set_union(par_comp(t1, sync, t2, alphabet, opts.parallel),
                           par_comp(t1p, sync, t2, alphabet, opts.parallel));
  auto rt = rhs.traces();
  return compare_trace_sets("continuity", lhs, std::set<Trace>(rt.begin(), rt.end()));
}

/// Final monitor verdict agrees with membership in sem(P, |trace|).
inline Report check_monitor_agreement(const Term& p, const Trace& trace, const Alphabet& alphabet,
                                      const CheckOptions& opts = {}) {
  Report r{"monitor-agreement", true, {}};
  MonitorOptions mo;
  mo.rules = opts.rules;
  Verdict v = monitor_trace(p, alphabet, trace, mo);
  bool member = semantics(p, trace.size(), alphabet, opts.parallel).contains(trace);
  if ((v == Verdict::kRunning) != member) {
    r.passed = false;
    r.counterexample = "trace=" + detail::show_trace(trace) + " verdict=" + to_string(v) +
                       (member ? " in-sem" : " not-in-sem");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Counterexample minimisation
// ---------------------------------------------------------------------------

namespace detail {

inline void subterm_paths(const Term& p, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  out.push_back(cur);
  auto visit = [&](int i, const Term& child) {
    cur.push_back(i);
    subterm_paths(child, cur, out);
    cur.pop_back();
  };
  switch (p.kind()) {
    case Term::Kind::kPrefix:
      visit(0, p.body());
      break;
    case Term::Kind::kChoice:
    case Term::Kind::kParallel:
      visit(0, p.left());
      visit(1, p.right());
      break;
    default:
      break;
  }
}

inline const Term& at_path(const Term& p, const std::vector<int>& path, std::size_t from = 0) {
  if (from == path.size()) return p;
  const Term& child = p.kind() == Term::Kind::kPrefix ? p.body()
                      : path[from] == 0               ? p.left()
                                                      : p.right();
  return at_path(child, path, from + 1);
}

inline Term replace_at(const Term& p, const std::vector<int>& path, const Term& repl,
                       std::size_t from = 0) {
  if (from == path.size()) return repl;
  switch (p.kind()) {
    case Term::Kind::kPrefix:
      return Term::prefix(p.binder(), p.events(), replace_at(p.body(), path, repl, from + 1));
    case Term::Kind::kChoice:
      return path[from] == 0 ? Term::choice(replace_at(p.left(), path, repl, from + 1), p.right())
                             : Term::choice(p.left(), replace_at(p.right(), path, repl, from + 1));
    case Term::Kind::kParallel:
      return path[from] == 0
                 ? Term::parallel(replace_at(p.left(), path, repl, from + 1), p.events(), p.right())
                 : Term::parallel(p.left(), p.events(), replace_at(p.right(), path, repl, from + 1));
    default:
      return p;
  }
}

}  // namespace detail

/// Greedily replaces subterms with STOP or FAIL (or hoists a closed operand
/// of a binary node) while `still_fails` holds.  Returns the smallest term
/// reached.
inline Term minimize(Term p, const std::function<bool(const Term&)>& still_fails) {
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<std::vector<int>> paths;
    std::vector<int> cur;
    detail::subterm_paths(p, cur, paths);
    for (const auto& path : paths) {
      const Term& sub = detail::at_path(p, path);
      std::vector<Term> candidates{Term::stop(), Term::fail()};
      if (sub.kind() == Term::Kind::kChoice || sub.kind() == Term::Kind::kParallel) {
        candidates.push_back(sub.left());
        candidates.push_back(sub.right());
      } else if (sub.kind() == Term::Kind::kPrefix) {
        candidates.push_back(sub.body());
      }
      for (const auto& c : candidates) {
        if (c.size() >= sub.size()) continue;
        Term next = detail::replace_at(p, path, c);
        if (!next.closed() || next.size() > p.size()) continue;
        if (still_fails(next)) {
          p = std::move(next);
          progress = true;
          break;
        }
      }
      if (progress) break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

/// Runs every term-level check on `p` with trace bound `depth`, minimising
/// the term for any failure.
inline std::vector<Report> check_term(const Term& p, std::size_t depth, const Alphabet& alphabet,
                                      const CheckOptions& opts = {}) {
  using Check = std::function<Report(const Term&)>;
  std::vector<Check> checks{
      [&](const Term& t) { return check_correspondence(t, depth, alphabet, opts); },
      [&](const Term& t) { return check_doomed_normalization(t, alphabet, opts); },
      [&](const Term& t) { return check_doomed_iff_empty(t, depth, alphabet, opts); },
  };
  for (const auto& e : alphabet) {
    checks.push_back([&, e](const Term& t) {
      return check_derivative(t, e, std::max<std::size_t>(depth, 1), alphabet, opts);
    });
  }
  std::vector<Report> out;
  for (const auto& check : checks) {
    Report r = check(p);
    if (!r.passed) {
      Term small = minimize(p, [&](const Term& t) { return !check(t).passed; });
      r = check(small);
      r.counterexample += " term=" + print_term(small);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_report(const Report& r, const std::string& seed) {
  std::string line = (r.passed ? "PASS " : "FAIL ") + r.property + " " + seed;
  if (!r.passed && !r.counterexample.empty()) line += " " + r.counterexample;
  return line;
}

}  // namespace cspe

#endif  // CSPE_CONFORMANCE_HPP
