#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "cspe/conformance.hpp"
#include "cspe/sos.hpp"

namespace cspe {
namespace {

const Alphabet kAb = make_alphabet({"a", "b"});
const Alphabet kAbc = make_alphabet({"a", "b", "c"});

EventSetExpr lit(std::initializer_list<const char*> names) { return EventSetExpr::events(names); }
Term pre(std::initializer_list<const char*> names, Term body) {
  return Term::prefix(EventVar{"x"}, lit(names), std::move(body));
}
Event ev(const char* n) { return Event{n}; }

using Edge = std::pair<Action, Term>;

std::set<Edge> edges(const Term& p, const Alphabet& ab, const StepRules& rules = {}) {
  std::set<Edge> out;
  for (const auto& t : internal_successors(p, ab, rules)) {
    EXPECT_EQ(t.source, p);
    out.emplace(t.action, t.target);
  }
  return out;
}

// Reference transition relation: one function per inference rule, each
// returning the conclusions that rule derives for `p`.
std::set<Edge> reference(const Term& p, const Alphabet& ab) {
  using K = Term::Kind;
  using Rule = std::function<void(const Term&, std::set<Edge>&)>;
  auto viable = [](const Term& t) { return !t.doomed(); };
  auto sync_of = [&](const Term& t) { return eval_event_set(t.events(), ab); };
  auto blocked = [&](const Action& a, const EventSet& s) { return !a.is_tau() && s.contains(a.event()); };

  std::vector<Rule> rules{
      // prefix
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kPrefix) return;
        for (const auto& e : eval_event_set(t.events(), ab)) {
          out.emplace(Action::visible(e), substitute(e, t.binder(), t.body()));
        }
      },
      // choice, τ on either side keeps the choice
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kChoice) return;
        for (const auto& [a, l] : reference(t.left(), ab)) {
          if (a.is_tau()) out.emplace(a, Term::choice(l, t.right()));
        }
        for (const auto& [a, r] : reference(t.right(), ab)) {
          if (a.is_tau()) out.emplace(a, Term::choice(t.left(), r));
        }
      },
      // choice, a visible event resolves it
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kChoice) return;
        for (const auto& side : {t.left(), t.right()}) {
          for (const auto& [a, s] : reference(side, ab)) {
            if (!a.is_tau()) out.emplace(a, s);
          }
        }
      },
      // parallel, left moves alone against a viable right
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kParallel || !viable(t.right())) return;
        for (const auto& [a, l] : reference(t.left(), ab)) {
          if (!blocked(a, sync_of(t))) out.emplace(a, Term::parallel(l, t.events(), t.right()));
        }
      },
      // parallel, right moves alone against a viable left
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kParallel || !viable(t.left())) return;
        for (const auto& [a, r] : reference(t.right(), ab)) {
          if (!blocked(a, sync_of(t))) out.emplace(a, Term::parallel(t.left(), t.events(), r));
        }
      },
      // parallel, synchronised event
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kParallel || !viable(t.left()) || !viable(t.right())) return;
        for (const auto& [a, l] : reference(t.left(), ab)) {
          for (const auto& [b, r] : reference(t.right(), ab)) {
            if (a == b && blocked(a, sync_of(t))) out.emplace(a, Term::parallel(l, t.events(), r));
          }
        }
      },
      // parallel, both doomed: either side τ-steps
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() != K::kParallel || viable(t.left()) || viable(t.right())) return;
        for (const auto& [a, l] : reference(t.left(), ab)) {
          if (a.is_tau()) out.emplace(a, Term::parallel(l, t.events(), t.right()));
        }
        for (const auto& [a, r] : reference(t.right(), ab)) {
          if (a.is_tau()) out.emplace(a, Term::parallel(t.left(), t.events(), r));
        }
      },
      // FAIL [] FAIL
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() == K::kChoice && t.left().kind() == K::kFail && t.right().kind() == K::kFail) {
          out.emplace(Action::tau(), Term::fail());
        }
      },
      // FAIL |[E]| P and P |[E]| FAIL
      [&](const Term& t, std::set<Edge>& out) {
        if (t.kind() == K::kParallel &&
            (t.left().kind() == K::kFail || t.right().kind() == K::kFail)) {
          out.emplace(Action::tau(), Term::fail());
        }
      },
  };
  std::set<Edge> out;
  for (const auto& r : rules) r(p, out);
  return out;
}

TEST(InternalSuccessorsTest, PrefixOffersEachEvent) {
  EXPECT_EQ(edges(pre({"a", "b"}, Term::stop()), kAb),
            (std::set<Edge>{{Action::visible(ev("a")), Term::stop()},
                            {Action::visible(ev("b")), Term::stop()}}));
}

TEST(InternalSuccessorsTest, FailingSiblingBlocksTheOtherOperand) {
  Term p = Term::parallel(Term::fail(), lit({}), pre({"a"}, Term::stop()));
  EXPECT_EQ(edges(p, kAb), (std::set<Edge>{{Action::tau(), Term::fail()}}));
}

TEST(InternalSuccessorsTest, StopAndFailAreInert) {
  EXPECT_TRUE(internal_successors(Term::stop(), kAb).empty());
  EXPECT_TRUE(internal_successors(Term::fail(), kAb).empty());
}

TEST(InternalSuccessorsTest, ChoiceWithOneFailingBranch) {
  Term p = Term::choice(Term::fail(), pre({"a"}, Term::stop()));
  EXPECT_EQ(edges(p, kAb), (std::set<Edge>{{Action::visible(ev("a")), Term::stop()}}));
  EXPECT_EQ(edges(p, kAb), reference(p, kAb));
}

TEST(InternalSuccessorsTest, SynchronisationNeedsBothSides) {
  Term p = Term::parallel(pre({"a"}, Term::stop()), lit({"a"}), pre({"a", "b"}, Term::fail()));
  EXPECT_EQ(edges(p, kAb),
            (std::set<Edge>{{Action::visible(ev("a")), Term::parallel(Term::stop(), lit({"a"}), Term::fail())},
                            {Action::visible(ev("b")), Term::parallel(pre({"a"}, Term::stop()), lit({"a"}), Term::fail())}}));
}

TEST(InternalSuccessorsTest, RuleOrderIsStable) {
  Term p = Term::choice(Term::parallel(Term::fail(), lit({}), Term::stop()), pre({"b", "a"}, Term::stop()));
  auto first = internal_successors(p, kAb);
  ASSERT_EQ(first.size(), 3u);
  EXPECT_TRUE(first[0].action.is_tau());
  EXPECT_EQ(first[1].action, Action::visible(ev("a")));
  EXPECT_EQ(first[2].action, Action::visible(ev("b")));
  EXPECT_EQ(first, internal_successors(p, kAb));
}

TEST(InternalSuccessorsTest, RejectsOpenTerms) {
  Term open = Term::prefix(EventVar{"y"}, EventSetExpr::literal({EventVar{"x"}}), Term::stop());
  EXPECT_THROW(internal_successors(open, kAb), OpenTermError);
}

TEST(InternalSuccessorsTest, MatchesRuleByRuleReference) {
  TermGenerator gen(GenConfig{12, kAbc, 21, 2});
  for (int i = 0; i < 3000; ++i) {
    Term p = gen.next();
    // Walk a few reachable terms too, not just generator output.
    TermSet reach = tau_closure(p, kAbc);
    for (const auto& e : kAbc) reach.merge(visible_successors(p, e, kAbc));
    for (const auto& q : reach) {
      ASSERT_EQ(edges(q, kAbc), reference(q, kAbc)) << print_term(q);
    }
  }
}

TEST(InternalSuccessorsTest, NoDuplicates) {
  TermGenerator gen(GenConfig{12, kAbc, 22, 2});
  for (int i = 0; i < 2000; ++i) {
    Term p = gen.next();
    auto ts = internal_successors(p, kAbc);
    std::set<Transition> uniq(ts.begin(), ts.end());
    EXPECT_EQ(uniq.size(), ts.size());
  }
}

TEST(SosPropertyTest, TauStepsShrinkAndDoomedTermsStayDoomed) {
  TermGenerator gen(GenConfig{12, kAbc, 23, 2});
  for (int i = 0; i < 3000; ++i) {
    Term p = gen.next();
    std::vector<Term> work{p};
    TermSet seen{p};
    while (!work.empty()) {
      Term cur = work.back();
      work.pop_back();
      auto ts = internal_successors(cur, kAbc);
      if (cur.doomed() && cur.kind() != Term::Kind::kFail) {
        EXPECT_FALSE(ts.empty()) << "doomed progress: " << print_term(cur);
      }
      for (const auto& t : ts) {
        if (t.action.is_tau()) {
          EXPECT_LT(t.target.size(), t.source.size());
        }
        if (cur.doomed()) {
          EXPECT_TRUE(t.action.is_tau()) << print_term(cur);
          EXPECT_TRUE(t.target.doomed()) << print_term(cur);
        }
        if (seen.insert(t.target).second) work.push_back(t.target);
      }
    }
  }
}

TEST(SosPropertyTest, DoomedTermsReachFail) {
  Term d = Term::choice(Term::parallel(Term::fail(), lit({}), Term::stop()), Term::fail());
  TermSet closure = tau_closure(d, kAb);
  EXPECT_TRUE(closure.contains(Term::fail()));
  EXPECT_TRUE(check_doomed_normalization(d, kAb).passed);
}

// A doomed right operand must not let the left one emit events.  The
// unguarded variant is the mutant the guard exists to reject.
TEST(SosPropertyTest, ViabilityGuardBlocksVisibleSteps) {
  StepRules unguarded;
  unguarded.guard_right_viable = false;
  unguarded.guard_left_viable = false;
  TermGenerator gen(GenConfig{6, kAbc, 24, 1});
  bool mutant_differs = false;
  for (int i = 0; i < 2000; ++i) {
    Term q = gen.next();
    for (const Term& d : {Term::fail(), Term::parallel(Term::stop(), lit({}), Term::fail())}) {
      for (const Term& p : {Term::parallel(q, lit({"a"}), d), Term::parallel(d, lit({"a"}), q)}) {
        for (const auto& t : internal_successors(p, kAbc)) EXPECT_TRUE(t.action.is_tau());
        for (const auto& t : internal_successors(p, kAbc, unguarded)) {
          if (!t.action.is_tau()) mutant_differs = true;
        }
      }
    }
  }
  EXPECT_TRUE(mutant_differs);
}

TEST(TauClosureTest, Examples) {
  EXPECT_EQ(tau_closure(Term::stop(), kAb), TermSet{Term::stop()});
  Term p = Term::parallel(Term::fail(), lit({}), Term::stop());
  EXPECT_EQ(tau_closure(p, kAb), (TermSet{p, Term::fail()}));
  Term q = Term::choice(p, Term::fail());
  EXPECT_EQ(tau_closure(q, kAb), (TermSet{q, Term::choice(Term::fail(), Term::fail()), Term::fail()}));
}

TEST(VisibleSuccessorsTest, Examples) {
  EXPECT_EQ(visible_successors(pre({"a"}, Term::stop()), ev("a"), kAb), TermSet{Term::stop()});
  EXPECT_TRUE(visible_successors(pre({"a"}, Term::stop()), ev("b"), kAb).empty());
  Term p = Term::choice(pre({"a"}, Term::stop()), pre({"a"}, Term::fail()));
  EXPECT_EQ(visible_successors(p, ev("a"), kAb), (TermSet{Term::stop(), Term::fail()}));
}

TEST(VisibleSuccessorsTest, IncludesTauSuccessorsOfTargets) {
  // After a, the right operand is FAIL and propagates.
  Term p = Term::parallel(Term::stop(), lit({}), pre({"a"}, Term::fail()));
  TermSet got = visible_successors(p, ev("a"), kAb);
  EXPECT_EQ(got, (TermSet{Term::parallel(Term::stop(), lit({}), Term::fail()), Term::fail()}));
}

TEST(RunTest, Examples) {
  EXPECT_EQ(run(Term::stop(), {}, kAb), TermSet{Term::stop()});
  EXPECT_EQ(run(pre({"a", "b"}, Term::fail()), {ev("a")}, kAb), TermSet{Term::fail()});
  EXPECT_TRUE(run(pre({"a"}, Term::stop()), {ev("a"), ev("b")}, kAb).empty());
}

}  // namespace
}  // namespace cspe
