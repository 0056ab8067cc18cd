#ifndef CSPE_SOS_HPP
#define CSPE_SOS_HPP

// Small-step operational semantics.
//
// internal_successors() enumerates P -a-> P' for a in Σ ∪ {τ}.  Parallel
// rules that let one operand move carry a viability guard on the *other*
// operand; once a side is doomed only the FAIL-propagation rules and the
// doomed/doomed τ rules can fire, which forces the failure to spread.
//
// Weak transitions P =s=> Q are computed by interleaving τ-closures with
// single visible steps.

#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cspe/error.hpp"
#include "cspe/term.hpp"
#include "cspe/trace_set.hpp"

namespace cspe {

class Action {
 public:
  static Action tau() { return Action(); }
  static Action visible(Event e) { return Action(std::move(e)); }

  bool is_tau() const noexcept { return !event_.has_value(); }
  const Event& event() const { return *event_; }

  friend auto operator<=>(const Action&, const Action&) = default;
  friend bool operator==(const Action&, const Action&) = default;

 private:
  Action() = default;
  explicit Action(Event e) : event_(std::move(e)) {}

  std::optional<Event> event_;
};

inline std::string to_string(const Action& a) {
  return a.is_tau() ? std::string("tau") : a.event().name;
}

struct Transition {
  Term source;
  Action action;
  Term target;

  friend auto operator<=>(const Transition&, const Transition&) = default;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Selects the rule set.  The defaults are the real semantics; the switches
/// exist so tests can check that the viability guards matter.
struct StepRules {
  /// Left operand may move only if the right one is viable.
  bool guard_right_viable = true;
  /// Right operand may move only if the left one is viable.
  bool guard_left_viable = true;
};

namespace detail {

using Step = std::pair<Action, Term>;

class StepCollector {
 public:
  void add(Action a, Term t) {
    if (seen_.emplace(a, t).second) steps_.emplace_back(std::move(a), std::move(t));
  }
  std::vector<Step> take() { return std::move(steps_); }

 private:
  std::vector<Step> steps_;
  std::set<Step> seen_;
};

inline bool in_set(const Action& a, const EventSet& set) {
  return !a.is_tau() && set.contains(a.event());
}

inline std::vector<Step> steps(const Term& p, const Alphabet& alphabet,
                               const StepRules& rules) {
  StepCollector out;
  switch (p.kind()) {
    case Term::Kind::kStop:
    case Term::Kind::kFail:
      break;

    case Term::Kind::kPrefix:
      for (const auto& e : eval_event_set(p.events(), alphabet)) {
        out.add(Action::visible(e), substitute(e, p.binder(), p.body()));
      }
      break;

    case Term::Kind::kChoice: {
      auto ls = steps(p.left(), alphabet, rules);
      auto rs = steps(p.right(), alphabet, rules);
      for (const auto& [a, l2] : ls) {
        if (a.is_tau()) out.add(a, Term::choice(l2, p.right()));
      }
      for (const auto& [a, r2] : rs) {
        if (a.is_tau()) out.add(a, Term::choice(p.left(), r2));
      }
      for (const auto& [a, l2] : ls) {
        if (!a.is_tau()) out.add(a, l2);
      }
      for (const auto& [a, r2] : rs) {
        if (!a.is_tau()) out.add(a, r2);
      }
      if (p.left().kind() == Term::Kind::kFail && p.right().kind() == Term::Kind::kFail) {
        out.add(Action::tau(), Term::fail());
      }
      break;
    }

    case Term::Kind::kParallel: {
      const Term& l = p.left();
      const Term& r = p.right();
      EventSet sync = eval_event_set(p.events(), alphabet);
      auto ls = steps(l, alphabet, rules);
      auto rs = steps(r, alphabet, rules);
      bool l_ok = !l.doomed();
      bool r_ok = !r.doomed();

      if (r_ok || !rules.guard_right_viable) {
        for (const auto& [a, l2] : ls) {
          if (!in_set(a, sync)) out.add(a, Term::parallel(l2, p.events(), r));
        }
      }
      if (l_ok || !rules.guard_left_viable) {
        for (const auto& [a, r2] : rs) {
          if (!in_set(a, sync)) out.add(a, Term::parallel(l, p.events(), r2));
        }
      }
      if (l_ok && r_ok) {
        for (const auto& [a, l2] : ls) {
          if (!in_set(a, sync)) continue;
          for (const auto& [b, r2] : rs) {
            if (a == b) out.add(a, Term::parallel(l2, p.events(), r2));
          }
        }
      }
      if (!l_ok && !r_ok) {
        for (const auto& [a, l2] : ls) {
          if (a.is_tau()) out.add(a, Term::parallel(l2, p.events(), r));
        }
        for (const auto& [a, r2] : rs) {
          if (a.is_tau()) out.add(a, Term::parallel(l, p.events(), r2));
        }
      }
      if (l.kind() == Term::Kind::kFail) out.add(Action::tau(), Term::fail());
      if (r.kind() == Term::Kind::kFail) out.add(Action::tau(), Term::fail());
      break;
    }
  }
  return out.take();
}

}  // namespace detail

/// Every derivable P -a-> P', duplicates removed, in rule order.
inline std::vector<Transition> internal_successors(const Term& p, const Alphabet& alphabet,
                                                   const StepRules& rules = {}) {
  if (!p.closed()) {
    throw OpenTermError("internal_successors: term has free variables");
  }
  std::vector<Transition> out;
  for (auto& [a, t] : detail::steps(p, alphabet, rules)) {
    out.push_back(Transition{p, std::move(a), std::move(t)});
  }
  return out;
}

/// Terms reachable from `p` by zero or more τ steps, `p` included.
inline TermSet tau_closure(const Term& p, const Alphabet& alphabet,
                           const StepRules& rules = {}) {
  TermSet seen{p};
  std::vector<Term> work{p};
  while (!work.empty()) {
    Term cur = std::move(work.back());
    work.pop_back();
    for (const auto& t : internal_successors(cur, alphabet, rules)) {
      if (t.action.is_tau() && seen.insert(t.target).second) work.push_back(t.target);
    }
  }
  return seen;
}

/// { Q : P =e=> Q }.
inline TermSet visible_successors(const Term& p, const Event& e, const Alphabet& alphabet,
                                  const StepRules& rules = {}) {
  TermSet out;
  for (const auto& r : tau_closure(p, alphabet, rules)) {
    for (const auto& t : internal_successors(r, alphabet, rules)) {
      if (t.action.is_tau() || t.action.event() != e || out.contains(t.target)) continue;
      out.merge(tau_closure(t.target, alphabet, rules));
    }
  }
  return out;
}

/// { M : P =s=> M }.
inline TermSet run(const Term& p, const Trace& s, const Alphabet& alphabet,
                   const StepRules& rules = {}) {
  TermSet current = tau_closure(p, alphabet, rules);
  for (const auto& e : s) {
    TermSet next;
    for (const auto& q : current) next.merge(visible_successors(q, e, alphabet, rules));
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

}  // namespace cspe

#endif  // CSPE_SOS_HPP
