#include <doctest.h>

#include <algorithm>
#include <random>

#include "seqdiag/reasoner.hpp"
#include "seqdiag/sat.hpp"
#include "support/support.hpp"

using namespace seqdiag;
using namespace testsupport;

namespace {

SentenceSet without(const KnowledgeBase& kb, std::size_t removed) {
  SentenceSet s;
  for (std::size_t i = 0; i < kb.axioms.size(); ++i)
    if (i != removed) s.formulas.insert(s.formulas.end(), kb.axioms[i].formulas.begin(), kb.axioms[i].formulas.end());
  s.formulas.insert(s.formulas.end(), kb.background.begin(), kb.background.end());
  return s;
}

bool contains(const std::vector<Formula>& fs, const std::string& text) {
  const Formula f = parse_formula(text);
  return std::find(fs.begin(), fs.end(), f) != fs.end();
}

}  // namespace

TEST_SUITE("reasoner") {

TEST_CASE("direct contradiction is inconsistent") {
  CHECK_FALSE(is_consistent({{parse_formula("A"), parse_formula("!A")}, {}}));
  CHECK(is_consistent({{}, {}}));
}

TEST_CASE("ex1 consistency and entailment") {
  const KnowledgeBase kb = load_data_kb("ex1.kb");
  SentenceSet all = without(kb, 99);
  CHECK_FALSE(is_consistent(all));
  const SentenceSet o2 = without(kb, 1);
  CHECK(is_consistent(o2));
  CHECK(entails(o2, parse_formula("B_w")));
  CHECK_FALSE(entails(o2, parse_formula("C_w")));
  CHECK(entails({{}, {}}, parse_formula("A | !A")));
}

TEST_CASE("ex1 entailment rows") {
  const KnowledgeBase kb = load_data_kb("ex1.kb");
  const auto vocab = kb.vocabulary();
  SentenceSet bg{kb.background, {}};
  // O_i = O \ {ax_i}
  const auto o1 = enumerate_entailments(without(kb, 0), vocab, &bg);
  const auto o2 = enumerate_entailments(without(kb, 1), vocab, &bg);
  const auto o3 = enumerate_entailments(without(kb, 2), vocab, &bg);
  const auto o4 = enumerate_entailments(without(kb, 3), vocab, &bg);
  CHECK_FALSE(contains(o1, "B_w"));
  CHECK(contains(o2, "B_w"));
  CHECK_FALSE(contains(o2, "C_w"));
  CHECK(contains(o3, "B_w"));
  CHECK(contains(o3, "C_w"));
  CHECK_FALSE(contains(o3, "D_w"));
  CHECK(contains(o4, "B_w"));
  CHECK(contains(o4, "C_w"));
  CHECK(contains(o4, "D_w"));
  // Background facts are filtered.
  CHECK_FALSE(contains(o4, "A_w"));
}

TEST_CASE("empty theory entails nothing over its vocabulary") {
  CHECK(enumerate_entailments({{}, {}}, {"X"}).empty());
}

TEST_CASE("enumerate_entailments rejects inconsistent input") {
  CHECK_THROWS_AS(enumerate_entailments({{parse_formula("A"), parse_formula("!A")}, {}}, {"A"}),
                  InconsistentInputError);
}

TEST_CASE("implications are reported for undecided premises only") {
  SentenceSet s{{parse_formula("a -> b"), parse_formula("b -> c"), parse_formula("d")}, {}};
  const auto out = enumerate_entailments(s, {"a", "b", "c", "d"});
  CHECK(contains(out, "d"));
  CHECK(contains(out, "a -> b"));
  CHECK(contains(out, "a -> c"));
  CHECK(contains(out, "b -> c"));
  CHECK_FALSE(contains(out, "d -> a"));
  CHECK(std::is_sorted(out.begin(), out.end(),
                       [](const Formula& x, const Formula& y) { return to_string(x) < to_string(y); }));
}

TEST_CASE("sat solver agrees with truth tables on random instances") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> atoms{"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 400; ++i) {
    std::vector<Formula> fs;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) fs.push_back(random_formula(rng, atoms, 1 + static_cast<int>(rng() % 3)));
    const Formula goal = random_formula(rng, atoms, 1);
    REQUIRE(is_consistent({fs, {}}) == tt_consistent(fs));
    if (tt_consistent(fs)) REQUIRE(entails({fs, {}}, goal) == tt_entails(fs, goal));
    // entails(s, f) iff s + !f is inconsistent
    std::vector<Formula> neg = fs;
    neg.push_back(Formula::negation(goal));
    CHECK(entails({fs, {}}, goal) == !is_consistent({neg, {}}));
  }
}

TEST_CASE("enumerated entailments re-verify and respect monotonicity") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> atoms{"a", "b", "c", "d", "e"};
  for (int i = 0; i < 100; ++i) {
    std::vector<Formula> fs;
    for (int k = 0; k < 4; ++k) fs.push_back(random_formula(rng, atoms, 1));
    if (!tt_consistent(fs)) continue;
    const std::set<std::string> vocab(atoms.begin(), atoms.end());
    for (const auto& f : enumerate_entailments({fs, {}}, vocab)) {
      CHECK(tt_entails(fs, f));
      std::vector<Formula> bigger = fs;
      bigger.push_back(random_formula(rng, atoms, 1));
      if (tt_consistent(bigger)) CHECK(entails({bigger, {}}, f));
    }
  }
}

TEST_CASE("kb reasoner matches stateless calls under masks") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 60; ++i) {
    const KnowledgeBase kb = random_kb(rng);
    KbReasoner r(kb);
    for (int t = 0; t < 8; ++t) {
      AxiomMask mask(kb.axioms.size());
      std::vector<Formula> fs = kb.background;
      for (std::size_t k = 0; k < mask.size(); ++k) {
        mask[k] = rng() % 2;
        if (mask[k]) fs.insert(fs.end(), kb.axioms[k].formulas.begin(), kb.axioms[k].formulas.end());
      }
      const Formula extra = random_formula(rng, {"p0", "p1", "p2"}, 1);
      std::vector<Formula> with = fs;
      with.push_back(extra);
      const std::vector<Formula> ex{extra};
      REQUIRE(r.consistent(mask, ex) == tt_consistent(with));
      const Formula goal = random_formula(rng, {"p1", "p3", "p4"}, 1);
      if (tt_consistent(with)) CHECK(r.entails(mask, ex, goal) == tt_entails(with, goal));
    }
  }
}

TEST_CASE("entailment profile agrees with single entailment checks") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    const KnowledgeBase kb = random_kb(rng);
    KbReasoner r(kb);
    AxiomMask mask(kb.axioms.size());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = rng() % 2;
    if (!r.consistent(mask, {})) continue;
    const EntailmentProfile p = r.profile(mask, {});
    for (const auto& a : r.vocabulary()) {
      CHECK(p.positive.count(a) == r.entails(mask, {}, Formula::atom(a)));
      CHECK(p.negative.count(a) == r.entails(mask, {}, Formula::negation(Formula::atom(a))));
      for (const auto& b : r.vocabulary()) {
        if (a == b) continue;
        const bool imp = r.entails(mask, {}, Formula::implication(Formula::atom(a), Formula::atom(b)));
        CHECK(p.entails_implication(a, b) == imp);
      }
    }
  }
}

TEST_CASE("conflict budget exhaustion is a distinct error") {
  // Pigeonhole 7 into 6 needs many conflicts.
  std::vector<Formula> fs;
  const int holes = 6, pigeons = 7;
  auto v = [](int p, int h) { return Formula::atom("x" + std::to_string(p) + "_" + std::to_string(h)); };
  for (int p = 0; p < pigeons; ++p) {
    std::vector<Formula> any;
    for (int h = 0; h < holes; ++h) any.push_back(v(p, h));
    fs.push_back(Formula::disjunction(any));
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q)
        fs.push_back(Formula::negation(Formula::conjunction({v(p, h), v(q, h)})));
  const auto saved = conflict_budget();
  set_conflict_budget(10);
  CHECK_THROWS_AS(is_consistent({fs, {}}), ResourceLimitError);
  set_conflict_budget(saved);
  CHECK_FALSE(is_consistent({fs, {}}));
}

TEST_CASE("incremental solver with assumptions") {
  sat::Solver s;
  const auto a = s.new_var(), b = s.new_var(), c = s.new_var();
  s.add_clause({sat::Lit::make(a, true), sat::Lit::make(b)});
  s.add_clause({sat::Lit::make(b, true), sat::Lit::make(c)});
  const std::vector<sat::Lit> as1{sat::Lit::make(a), sat::Lit::make(c, true)};
  CHECK(s.solve(as1) == sat::Result::Unsat);
  const std::vector<sat::Lit> as2{sat::Lit::make(a)};
  REQUIRE(s.solve(as2) == sat::Result::Sat);
  CHECK(s.model_value(c));
  const auto fixed = s.propagate_assumptions(as2);
  REQUIRE(fixed);
  CHECK(std::find(fixed->begin(), fixed->end(), sat::Lit::make(c)) != fixed->end());
  CHECK_FALSE(s.propagate_assumptions(as1));
}

}
