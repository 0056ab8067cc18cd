#include <random>

#include <gtest/gtest.h>

#include "cspe/conformance.hpp"
#include "cspe/monitor.hpp"

namespace cspe {
namespace {

const Alphabet kAb = make_alphabet({"a", "b"});
const Alphabet kAbc = make_alphabet({"a", "b", "c"});

EventSetExpr lit(std::initializer_list<const char*> names) { return EventSetExpr::events(names); }
Term pre(const char* var, std::initializer_list<const char*> names, Term body) {
  return Term::prefix(EventVar{var}, lit(names), std::move(body));
}
Event ev(const char* n) { return Event{n}; }

TEST(MonitorTest, InitialVerdicts) {
  MonitorState s = init_monitor(Term::stop(), kAb);
  EXPECT_EQ(s.verdict(), Verdict::kRunning);
  EXPECT_EQ(s.residuals(), TermSet{Term::stop()});
  EXPECT_EQ(verdict_of(init_monitor(Term::fail(), kAb)), Verdict::kFailed);
  EXPECT_EQ(verdict_of(init_monitor(Term::parallel(Term::fail(), lit({}), Term::stop()), kAb)),
            Verdict::kFailed);
}

TEST(MonitorTest, InitialDoomedResidualsAreKept) {
  Term p = Term::parallel(Term::fail(), lit({}), Term::stop());
  EXPECT_EQ(init_monitor(p, kAb).residuals(), (TermSet{p, Term::fail()}));
}

TEST(MonitorTest, FeedExamples) {
  MonitorState s = feed(init_monitor(pre("x", {"a", "b"}, Term::stop()), kAb), ev("a"));
  EXPECT_EQ(s.verdict(), Verdict::kRunning);
  EXPECT_EQ(s.residuals(), TermSet{Term::stop()});
  EXPECT_EQ(s.consumed(), Trace{ev("a")});

  EXPECT_EQ(verdict_of(feed(init_monitor(pre("x", {"a", "b"}, Term::fail()), kAb), ev("a"))),
            Verdict::kFailed);

  EXPECT_EQ(verdict_of(feed(init_monitor(Term::stop(), kAb), ev("a"))), Verdict::kFailed);
}

TEST(MonitorTest, ViableBranchSurvivesAndDoomedSiblingIsPruned) {
  Term p = Term::choice(pre("x", {"a"}, pre("y", {"b"}, Term::stop())), pre("x", {"a"}, Term::fail()));
  MonitorState s = feed(init_monitor(p, kAb), ev("a"));
  EXPECT_EQ(s.verdict(), Verdict::kRunning);
  EXPECT_EQ(s.residuals(), TermSet{pre("y", {"b"}, Term::stop())});
  s = feed(std::move(s), ev("b"));
  EXPECT_EQ(s.verdict(), Verdict::kRunning);
  EXPECT_TRUE(semantics(p, 2, kAb).contains({ev("a"), ev("b")}));
}

TEST(MonitorTest, FailedIsAbsorbing) {
  MonitorState s = feed(init_monitor(pre("x", {"a"}, Term::stop()), kAb), ev("b"));
  ASSERT_EQ(s.verdict(), Verdict::kFailed);
  for (const char* e : {"a", "b", "a"}) {
    s = feed(std::move(s), ev(e));
    EXPECT_EQ(s.verdict(), Verdict::kFailed);
  }
  EXPECT_EQ(s.consumed().size(), 4u);
}

TEST(MonitorTest, UnknownEvents) {
  MonitorState s = init_monitor(Term::stop(), kAb);
  EXPECT_THROW(feed(s, ev("zz")), UnknownEventError);
  MonitorOptions strict;
  strict.strict = true;
  EXPECT_EQ(verdict_of(feed(init_monitor(pre("x", {"a"}, Term::stop()), kAb, strict), ev("zz"))),
            Verdict::kFailed);
}

TEST(MonitorTest, ResidualCapIsEnforced) {
  // Two interleaved copies of the same offer produce distinct residuals.
  Term side = pre("x", {"a"}, pre("y", {"a", "b"}, Term::stop()));
  Term p = Term::choice(Term::parallel(side, lit({}), side), pre("x", {"a"}, Term::stop()));
  MonitorOptions tight;
  tight.max_residuals = 2;
  MonitorState s = init_monitor(p, kAb, tight);
  EXPECT_THROW(feed(s, ev("a")), ResidualOverflowError);
}

TEST(MonitorTest, OpenSpecIsRejected) {
  Term open = Term::prefix(EventVar{"y"}, EventSetExpr::literal({EventVar{"x"}}), Term::stop());
  EXPECT_THROW(init_monitor(open, kAb), OpenTermError);
}

TEST(MonitorPropertyTest, VerdictMatchesTraceSetMembership) {
  std::mt19937_64 rng(31);
  TermGenerator gen(GenConfig{10, kAbc, 31, 2});
  for (int i = 0; i < 1500; ++i) {
    Term p = gen.next();
    Trace t = random_trace(rng, kAbc, 5);
    TraceSet sem = semantics(p, t.size(), kAbc);
    MonitorState s = init_monitor(p, kAbc);
    Trace prefix;
    EXPECT_EQ(s.verdict() == Verdict::kRunning, sem.contains(prefix));
    for (const auto& e : t) {
      s = feed(std::move(s), e);
      prefix.push_back(e);
      ASSERT_EQ(s.verdict() == Verdict::kRunning, sem.contains(prefix))
          << print_term(p) << " after " << format_trace(prefix);
    }
  }
}

TEST(MonitorPropertyTest, ViableResidualsAreReachable) {
  std::mt19937_64 rng(32);
  TermGenerator gen(GenConfig{10, kAbc, 32, 2});
  for (int i = 0; i < 500; ++i) {
    Term p = gen.next();
    Trace t = random_trace(rng, kAbc, 4);
    MonitorState s = init_monitor(p, kAbc);
    for (const auto& e : t) s = feed(std::move(s), e);
    TermSet reached = run(p, t, kAbc);
    for (const auto& r : s.residuals()) {
      if (!r.doomed()) {
        EXPECT_TRUE(reached.contains(r)) << print_term(r);
      }
    }
  }
}

}  // namespace
}  // namespace cspe
