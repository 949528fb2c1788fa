#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "del/canon.hpp"
#include "del/syntax.hpp"

namespace del {

// Value of the termination interpretation. overflow means the exact value
// would need more than the configured number of bits; it compares as unknown.
struct Measure {
  bool overflow = false;
  boost::multiprecision::cpp_int value;
  std::string str() const;
};

inline constexpr std::size_t kDefaultMeasureBits = std::size_t{1} << 20;

Measure measure(const Sentence& t, std::size_t max_bits = kDefaultMeasureBits);
Measure measure(const Program& a, std::size_t max_bits = kDefaultMeasureBits);

// Desugars programs and replaces |, M_, E_, <p> by their duals. The result
// uses only true, false, atoms, ~, &, ->, K_, C_, [basic], Pre.
Sentence to_core(const Sentence& s);

struct RewriteStep {
  std::string rule;  // "r1" .. "r9"
  Sentence result;
};

// Membership in the normal-form grammar, decided without the rewrite rules.
bool is_normal_form(const Sentence& s);
bool is_normal_action(const Program& a);

struct NormalizeOptions {
  std::size_t fuel = 1'000'000;
  bool trace = false;
  // Assert strict decrease of the measure on every step under the cap.
  bool check_measure = false;
  std::size_t max_bits = kDefaultMeasureBits;
};

struct NormalizeResult {
  Sentence nf;
  std::size_t steps = 0;
  std::vector<RewriteStep> trace;
  std::size_t measure_checked = 0;  // steps where both sides were exact
  std::size_t measure_skipped = 0;  // steps past the overflow cap
};

// Leftmost-outermost rewriting with R. Action subterms of [a] and Pre(a) are
// rewritten before the rules at that node, so r7 and r8 only ever see
// reassociated actions. Caches are per instance and not synchronized.
class Rewriter {
 public:
  explicit Rewriter(Signature sig);

  const Signature& signature() const { return oracle_.signature(); }

  // One step on a core term; nothing when the term is a normal form.
  std::optional<RewriteStep> step(const Sentence& t);
  // Input may use sugar and compound programs; it is passed through to_core.
  NormalizeResult normalize_traced(const Sentence& s, const NormalizeOptions& opt = {});
  Sentence normalize(const Sentence& s);

  // f(phi) for a normal form, sorted by rendering. GuardError past cap members.
  std::vector<Sentence> closure(const Sentence& nf, std::size_t cap = 4096);

  OmegaArrowOracle& oracle() { return oracle_; }

 private:
  struct Found {
    std::string rule;
    Sentence s;
    Program p;
  };
  std::optional<Found> step_s(const Sentence& t);
  std::optional<Found> step_p(const Program& a);
  bool known_normal(const void* id) const { return normal_.count(id) > 0; }
  void mark_normal(const Sentence& t);
  void mark_normal(const Program& a);
  const std::unordered_set<Sentence, SentenceHash>& f(const Sentence& phi, std::size_t cap);

  OmegaArrowOracle oracle_;
  std::unordered_set<const void*> normal_;
  std::vector<Sentence> keep_s_;
  std::vector<Program> keep_p_;
  std::unordered_map<Sentence, Sentence, SentenceHash> nf_memo_;
  std::unordered_map<Sentence, std::unique_ptr<std::unordered_set<Sentence, SentenceHash>>, SentenceHash> f_memo_;
};

std::optional<RewriteStep> rewrite_step(const Sentence& t, const Signature& sig);
Sentence normalize(const Sentence& s, const Signature& sig);
NormalizeResult normalize_traced(const Sentence& s, const Signature& sig, const NormalizeOptions& opt = {});
std::vector<Sentence> closure(const Sentence& nf, const Signature& sig, std::size_t cap = 4096);

}  // namespace del
