#ifndef CSPE_MONITOR_HPP
#define CSPE_MONITOR_HPP

// Online verdicts.  The monitor tracks every term the specification could
// have reached on the events consumed so far.  The consumed trace belongs to
// the specification's trace set exactly when one of those terms is viable,
// so the verdict flips to FAILED on the first event that leaves the set.
//
// A MonitorState is a value; feed() returns the successor state.  Callers
// that share one state between threads must serialise feeds themselves.

#include <cstddef>
#include <memory>
#include <ostream>
#include <string>
#include <utility>

#include "cspe/error.hpp"
#include "cspe/sos.hpp"
#include "cspe/term.hpp"
#include "cspe/trace_set.hpp"

namespace cspe {

enum class Verdict { kRunning, kFailed };

inline const char* to_string(Verdict v) {
  return v == Verdict::kRunning ? "RUNNING" : "FAILED";
}

inline std::ostream& operator<<(std::ostream& os, Verdict v) { return os << to_string(v); }

struct MonitorOptions {
  /// Out-of-alphabet events fail the run instead of raising UnknownEventError.
  bool strict = false;
  std::size_t max_residuals = 1'000'000;
  StepRules rules;
};

class MonitorState {
 public:
  const TermSet& residuals() const noexcept { return residuals_; }
  Verdict verdict() const noexcept { return verdict_; }
  const Trace& consumed() const noexcept { return consumed_; }
  const Alphabet& alphabet() const noexcept { return *alphabet_; }
  const MonitorOptions& options() const noexcept { return options_; }

 private:
  friend MonitorState init_monitor(const Term&, Alphabet, MonitorOptions);
  friend MonitorState feed(MonitorState, const Event&);

  TermSet residuals_;
  Verdict verdict_ = Verdict::kRunning;
  Trace consumed_;
  std::shared_ptr<const Alphabet> alphabet_;
  MonitorOptions options_;
};

namespace detail {

inline bool any_viable(const TermSet& terms) {
  for (const auto& t : terms) {
    if (!t.doomed()) return true;
  }
  return false;
}

}  // namespace detail

inline MonitorState init_monitor(const Term& p, Alphabet alphabet, MonitorOptions options = {}) {
  if (!p.closed()) throw OpenTermError("init_monitor: specification term is open");
  MonitorState s;
  s.alphabet_ = std::make_shared<const Alphabet>(std::move(alphabet));
  s.options_ = options;
  s.residuals_ = tau_closure(p, *s.alphabet_, options.rules);
  if (s.residuals_.size() > options.max_residuals) {
    throw ResidualOverflowError(s.residuals_.size(), options.max_residuals);
  }
  s.verdict_ = detail::any_viable(s.residuals_) ? Verdict::kRunning : Verdict::kFailed;
  return s;
}

/// Consumes one event.  FAILED is absorbing.
inline MonitorState feed(MonitorState state, const Event& e) {
  if (!state.alphabet_->contains(e)) {
    if (!state.options_.strict) throw UnknownEventError(e.name);
    state.consumed_.push_back(e);
    state.residuals_.clear();
    state.verdict_ = Verdict::kFailed;
    return state;
  }
  state.consumed_.push_back(e);
  if (state.verdict_ == Verdict::kFailed) {
    state.residuals_.clear();
    return state;
  }

  TermSet next;
  for (const auto& r : state.residuals_) {
    if (r.doomed()) continue;
    next.merge(visible_successors(r, e, *state.alphabet_, state.options_.rules));
    if (next.size() > state.options_.max_residuals) {
      throw ResidualOverflowError(next.size(), state.options_.max_residuals);
    }
  }
  if (detail::any_viable(next)) {
    std::erase_if(next, [](const Term& t) { return t.doomed(); });
    state.verdict_ = Verdict::kRunning;
  } else {
    state.verdict_ = Verdict::kFailed;
  }
  state.residuals_ = std::move(next);
  return state;
}

inline Verdict verdict_of(const MonitorState& state) noexcept { return state.verdict(); }

/// Verdict after feeding all of `trace` from the initial state.
inline Verdict monitor_trace(const Term& p, const Alphabet& alphabet, const Trace& trace,
                             MonitorOptions options = {}) {
  MonitorState s = init_monitor(p, alphabet, options);
  for (const auto& e : trace) s = feed(std::move(s), e);
  return s.verdict();
}

}  // namespace cspe

#endif  // CSPE_MONITOR_HPP
