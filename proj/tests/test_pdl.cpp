#include <doctest.h>

#include <deque>

#include "del/corpus.hpp"
#include "del/decide.hpp"
#include "del/pdl.hpp"
#include "del/semantics.hpp"
#include "support/gen.hpp"
#include "support/micro.hpp"

using namespace del;
using deltest::Rng;

namespace {

Regex act(int i) { return Regex::letter({Symbol::Action, i}); }
Regex agt(int i) { return Regex::letter({Symbol::Agent, i}); }
Regex cat(std::initializer_list<Regex> xs) {
  Regex out = Regex::epsilon();
  for (const auto& x : xs) out = Regex::concat(out, x);
  return out;
}

ActionAutomaton random_automaton(Rng& r, int states, int agents) {
  ActionAutomaton aut;
  for (int i = 0; i < states; ++i) aut.states.push_back(Program::skip());
  for (int g = 0; g < agents; ++g) aut.agents.push_back(std::string(1, static_cast<char>('A' + g)));
  for (int x = 0; x < states; ++x) {
    for (int g = 0; g < agents; ++g) {
      for (int y = 0; y < states; ++y) {
        if (deltest::coin(r, 0.35)) aut.edges.push_back({x, g, y});
      }
    }
  }
  return aut;
}

// [alpha] C_C psi with alpha simple, as the differential corpus wants.
Sentence one_common_under_action(Rng& r, const Signature& sig) {
  deltest::GenConfig c;
  c.dynamic = false;
  c.common = false;
  auto alpha = deltest::random_simple(r, sig, c, 1 + deltest::pick(r, 2), 1);
  auto psi = deltest::random_sentence(r, sig, c, 2);
  auto body = Sentence::dyn_box(alpha, Sentence::cbox(deltest::random_agent_set(r, sig), psi));
  return deltest::coin(r) ? body : Sentence::neg(body);
}

}  // namespace

TEST_CASE("pdl evaluation basics") {
  auto sig = pub_signature();
  Rng r(11);
  for (int k = 0; k < 30; ++k) {
    auto s = deltest::random_model(r, sig.agents(), {"p", "q"}, 1 + deltest::pick(r, 5));
    auto box = PdlSentence::box(PdlProgram::agent("A"), PdlSentence::atom("p"));
    CHECK(pdl_eval(s, box) == truth_set(s, Sentence::box("A", Sentence::atom("p")), sig));

    auto tests = PdlProgram::seq(PdlProgram::test(PdlSentence::atom("p")), PdlProgram::test(PdlSentence::atom("q")));
    auto rel = pdl_relation(s, tests);
    auto pq = s.truth("p") & s.truth("q");
    for (std::size_t x = 0; x < s.size(); ++x) {
      StateSet want(s.size());
      if (pq[x]) want.set(x);
      CHECK(rel[x] == want);
    }
  }

  auto c2 = gen_cn(2);
  auto any = PdlProgram::star(PdlProgram::choice(PdlProgram::agent("A"), PdlProgram::agent("B")));
  auto got = pdl_eval(c2, PdlSentence::diamond(any, PdlSentence::atom("q")));
  StateSet want(c2.size());
  auto target = c2.truth("q");
  for (std::size_t x = 0; x < c2.size(); ++x) {
    std::vector<char> seen(c2.size(), 0);
    std::deque<int> work{static_cast<int>(x)};
    seen[x] = 1;
    while (!work.empty()) {
      int y = work.front();
      work.pop_front();
      if (target[y]) want.set(x);
      for (int g = 0; g < 2; ++g) {
        for (int z : c2.successors(g, y)) {
          if (!seen[z]) seen[z] = 1, work.push_back(z);
        }
      }
    }
  }
  CHECK(got == want);

  CHECK_THROWS_AS(pdl_eval(c2, PdlSentence::box(PdlProgram::agent("Z"), PdlSentence::top())), Error);
  CHECK(render(PdlSentence::box(any, PdlSentence::atom("q"))) == "[(A + B)*] q");
}

TEST_CASE("nfa_to_regex small cases") {
  ActionAutomaton loop;
  loop.states = {Program::skip()};
  loop.agents = {"A"};
  loop.edges = {{0, 0, 0}};
  auto r = nfa_to_regex(loop, {0});
  CHECK(regex_equivalent(r, cat({act(0), Regex::star(cat({agt(0), act(0)}))})));
  CHECK(regex_language(r, 5) == path_language(loop, {0}, 5));

  CHECK(nfa_to_regex(loop, {}).kind() == Regex::Kind::Empty);

  ActionAutomaton split;
  split.states = {Program::skip(), Program::skip()};
  split.agents = {"A"};
  CHECK(nfa_to_regex(split, {1}).kind() == Regex::Kind::Empty);
}

TEST_CASE("nfa_to_regex agrees with path enumeration") {
  Rng r(5);
  int nonempty = 0;
  for (int k = 0; k < 100; ++k) {
    auto aut = random_automaton(r, 3, 2);
    std::set<int> accept;
    for (int i = 0; i < 3; ++i) {
      if (deltest::coin(r)) accept.insert(i);
    }
    auto re = nfa_to_regex(aut, accept);
    auto want = path_language(aut, accept, 6);
    CHECK(regex_language(re, 6) == want);
    nonempty += !want.empty();
  }
  CHECK(nonempty > 50);
}

TEST_CASE("two-action example") {
  // X = {alpha, beta}: alpha ->A alpha, alpha ->B beta, beta ->A alpha.
  ActionAutomaton aut;
  aut.states = {Program::skip(), Program::skip()};
  aut.agents = {"A", "B"};
  aut.edges = {{0, 0, 0}, {0, 1, 1}, {1, 0, 0}};
  auto got = nfa_to_regex(aut, {0, 1});

  auto a = act(0), b = act(1), A = agt(0), B = agt(1);
  auto aloop = Regex::star(cat({A, a}));
  auto ret = cat({a, aloop, B, b, A});
  auto repaired = cat({Regex::star(ret), a, aloop, Regex::alt(Regex::epsilon(), cat({B, b}))});
  CHECK(regex_equivalent(got, repaired));
  CHECK(regex_language(got, 9) == path_language(aut, {0, 1}, 9));

  // The printed form without the leading alpha after each return differs.
  auto printed = cat({Regex::star(cat({a, aloop, B, b, A})), Regex::alt(Regex::epsilon(), cat({B, b}))});
  CHECK_FALSE(regex_equivalent(got, printed));
}

TEST_CASE("regex_equivalent") {
  auto a = act(0), A = agt(0);
  CHECK(regex_equivalent(Regex::star(Regex::star(a)), Regex::star(a)));
  CHECK(regex_equivalent(Regex::concat(Regex::star(a), a), Regex::concat(a, Regex::star(a))));
  CHECK_FALSE(regex_equivalent(Regex::star(a), Regex::concat(a, Regex::star(a))));
  CHECK_FALSE(regex_equivalent(Regex::alt(a, A), a));
  CHECK(regex_equivalent(Regex::empty(), Regex::concat(a, Regex::empty())));
}

TEST_CASE("translation clauses") {
  auto sig = pub_signature();
  PdlTranslator t(sig);
  CHECK(render(t.translate(parse_sentence("K_A p", sig))) == "[A] p");
  CHECK(render(t.translate(parse_sentence("C_{A,B} p", sig))) == "[(A + B)*] p");
  CHECK_THROWS_AS(t.translate(Sentence::dyn_box(Program::star(Program::skip()), Sentence::atom("p"))), Error);
}

TEST_CASE("translation agrees with the source semantics") {
  Rng r(77);
  int checked = 0;
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    PdlTranslator t(sig);
    deltest::GenConfig c;
    c.depth = 3;
    c.max_dynamic = 2;
    for (int k = 0; k < 150; ++k) {
      auto phi = k % 2 ? one_common_under_action(r, sig) : deltest::random_sentence(r, sig, c, 3);
      auto pdl = t.translate(phi);
      for (int m = 0; m < 2; ++m) {
        auto s = deltest::random_model(r, sig.agents(), c.atoms, 1 + deltest::pick(r, 6));
        CHECK_MESSAGE(pdl_eval(s, pdl) == truth_set(s, phi, sig), render(phi));
        ++checked;
      }
    }
  }
  CHECK(checked == 600);
}

TEST_CASE("validity agrees with the decider on the micro-corpus") {
  auto sig = deltest::micro_signature();
  auto models = deltest::all_small_models(sig.agents(), {"p"}, 3);
  Decider d(sig);
  PdlTranslator t(sig);
  Rng r(3);
  int valid = 0;
  for (int k = 0; k < 200; ++k) {
    auto phi = deltest::micro_sentence(r, sig);
    auto pdl = t.translate(phi);
    auto counter = d.countermodel(phi);
    if (!counter) {
      ++valid;
      for (const auto& s : models) CHECK(pdl_eval(s, pdl).all());
    } else {
      CHECK_FALSE(pdl_eval(counter->model, pdl)[counter->state]);
    }
  }
  CHECK(valid >= 10);
}
