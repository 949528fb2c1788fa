#include <doctest.h>

#include <cmath>
#include <set>

#include "del/bisim.hpp"
#include "del/canon.hpp"
#include "del/semantics.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace del;
using deltest::Rng;

namespace {

Program pub(const char* f) { return parse_program(std::string("Pub(") + f + ")", pub_signature()); }
Program pri(const std::string& text) { return parse_program(text, pri_signature()); }

std::set<std::string> renders(const std::vector<Program>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) out.insert(render(x));
  return out;
}

}  // namespace

TEST_CASE("preconditions of simple actions") {
  CHECK(pre_of(SimpleAction(Program::skip())) == Sentence::top());
  CHECK(pre_of(SimpleAction(Program::crash())) == Sentence::bottom());
  CHECK(pre_of(SimpleAction(pub("p"))) == Sentence::atom("p"));
  CHECK(pre_of(SimpleAction(Program::seq(pub("p"), pub("q")))) == Sentence::dyn_diamond(pub("p"), Sentence::atom("q")));
  CHECK(pre_of(SimpleAction(pri("skp(p, q)"))) == Sentence::atom("q"));
  CHECK_THROWS_AS(SimpleAction(Program::choice(pub("p"), pub("q"))), Error);
}

TEST_CASE("arrows of the canonical action model") {
  auto sig = pub_signature();
  CHECK(renders(successors(SimpleAction(pub("p")), "A", sig)) == std::set<std::string>{"Pub(p)"});
  CHECK(renders(successors(SimpleAction(Program::skip()), "A", sig)) == std::set<std::string>{"skip"});
  CHECK(successors(SimpleAction(Program::crash()), "A", sig).empty());
  auto psig = pri_signature();
  CHECK(renders(successors(SimpleAction(pri("Pri(p, true)")), "B", psig)) == std::set<std::string>{"skp(p, true)"});
  CHECK(renders(successors(SimpleAction(pri("Pri(p, true)")), "A", psig)) == std::set<std::string>{"Pri(p, true)"});
  CHECK(renders(successors(SimpleAction(pri("Pri(p, true) ; Pri(q, true)")), "B", psig)) ==
        std::set<std::string>{"skp(p, true) ; skp(q, true)"});
}

TEST_CASE("reachable sets") {
  auto sig = pub_signature();
  CHECK(renders(reachable(SimpleAction(pub("p")), {"A", "B"}, sig)) == std::set<std::string>{"Pub(p)"});
  auto psig = pri_signature();
  auto xs = reachable(SimpleAction(pri("Pri(p, true)")), {"A", "B"}, psig);
  CHECK(renders(xs) == std::set<std::string>{"Pri(p, true)", "skp(p, true)"});
  CHECK(render(xs.front()) == "Pri(p, true)");
  CHECK(renders(reachable(SimpleAction(pri("Pri(p, true)")), {"A"}, psig)) == std::set<std::string>{"Pri(p, true)"});
}

TEST_CASE("property: reachable sets are bounded by n^length") {
  Rng r(31);
  auto sig = pri_signature();
  deltest::GenConfig c;
  c.depth = 1;
  OmegaArrowOracle oracle(sig);
  for (int k = 0; k < 300; ++k) {
    int len = 1 + deltest::pick(r, 3);
    SimpleAction a(deltest::random_simple(r, sig, c, len, 1));
    auto agents = deltest::random_agent_set(r, sig);
    auto xs = oracle.reachable(a, agents);
    CHECK(xs.size() <= static_cast<std::size_t>(std::pow(sig.n(), a.length())));
    CHECK(render(xs.front()) == render(a.program()));
    // Closed under successors.
    auto set = renders(xs);
    for (const auto& x : xs) {
      for (const auto& g : agents) {
        for (const auto& y : oracle.successors(SimpleAction(x), g)) CHECK(set.count(render(y)));
      }
    }
  }
}

TEST_CASE("property: Omega-based update agrees with the induced update") {
  Rng r(37);
  deltest::GenConfig c;
  c.depth = 1;
  c.dynamic = false;
  for (const auto& sig : {pub_signature(), pri_signature()}) {
    auto eval = [&](const StateModel& m, const Sentence& f) { return truth_set(m, f, sig); };
    for (int k = 0; k < 100; ++k) {
      SimpleAction a(deltest::random_simple(r, sig, c, 1 + deltest::pick(r, 2), 1));
      auto s = deltest::random_model(r, sig.agents(), c.atoms, 1 + deltest::pick(r, 5));
      auto u = eval_program(s, a.program(), sig);
      auto v = update_product(s, omega_program_model(a, sig), eval);
      CHECK(deltest::equivalent_updates(u, v));
      // Deterministic here, so u^-1 ; I ; v relates bisimilar states.
      Relation id;
      for (int x = 0; x < static_cast<int>(s.size()); ++x) id.emplace_back(x, x);
      for (auto [x, y] : connect_updates(u, id, v)) CHECK(bisimilar(u.target, x, v.target, y));
    }
  }
}

TEST_CASE("property: monoid laws for preconditions") {
  Rng r(41);
  deltest::GenConfig c;
  c.depth = 1;
  auto sig = pri_signature();
  for (int k = 0; k < 100; ++k) {
    auto a = deltest::random_simple(r, sig, c, 1, 1);
    auto b = deltest::random_simple(r, sig, c, 1, 1);
    auto g = deltest::random_simple(r, sig, c, 1, 1);
    auto s = deltest::random_model(r, sig.agents(), c.atoms, 1 + deltest::pick(r, 5));
    auto pa = truth_set(s, pre_of(SimpleAction(a)), sig);
    CHECK(truth_set(s, pre_of(SimpleAction(Program::seq(a, Program::skip()))), sig) == pa);
    CHECK(truth_set(s, pre_of(SimpleAction(Program::seq(Program::skip(), a))), sig) == pa);
    CHECK(truth_set(s, pre_of(SimpleAction(Program::seq(a, Program::seq(b, g)))), sig) ==
          truth_set(s, pre_of(SimpleAction(Program::seq(Program::seq(a, b), g))), sig));
  }
}

TEST_CASE("Omega program model shape") {
  auto sig = pri_signature();
  auto m = omega_program_model(SimpleAction(pri("Pri(p, true)")), sig);
  CHECK(m.size() == 2);
  CHECK(m.id(0) == "Pri(p, true)");
  CHECK(m.designated() == std::vector<int>{0});
  CHECK(m.pre(0).render() == "p");
}
