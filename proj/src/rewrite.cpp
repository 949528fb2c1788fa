#include "del/rewrite.hpp"

#include <algorithm>
#include <functional>

namespace del {

namespace mp = boost::multiprecision;

// ------------------------------------------------------------------ measure

std::string Measure::str() const { return overflow ? std::string("overflow") : value.str(); }

namespace {

class MeasureEval {
 public:
  explicit MeasureEval(std::size_t max_bits) : max_bits_(max_bits) {}

  Measure of(const Sentence& t) {
    auto it = s_memo_.find(t.identity());
    if (it != s_memo_.end()) return it->second;
    Measure m = compute(t);
    keep_s_.push_back(t);
    s_memo_.emplace(t.identity(), m);
    return m;
  }

  Measure of(const Program& a) {
    auto it = p_memo_.find(a.identity());
    if (it != p_memo_.end()) return it->second;
    Measure m = compute(a);
    keep_p_.push_back(a);
    p_memo_.emplace(a.identity(), m);
    return m;
  }

 private:
  static Measure over() { return Measure{true, 0}; }

  Measure exact(mp::cpp_int v) const {
    if (mp::msb(v) + 1 > max_bits_) return over();
    return Measure{false, std::move(v)};
  }

  Measure add(const Measure& a, const Measure& b, int extra = 0) const {
    if (a.overflow || b.overflow) return over();
    return exact(a.value + b.value + extra);
  }

  // a^b, refusing before the multiplication when the result cannot fit.
  Measure power(const Measure& a, const Measure& b) const {
    if (a.overflow || b.overflow) return over();
    if (b.value > max_bits_) return over();
    auto e = b.value.convert_to<unsigned long long>();
    // a >= 3, so a^e has at least e * msb(a) bits.
    if (static_cast<unsigned long long>(mp::msb(a.value)) * e > max_bits_) return over();
    return exact(mp::pow(a.value, static_cast<unsigned>(e)));
  }

  Measure compute(const Sentence& t) {
    switch (t.kind()) {
      case SentenceKind::True:
      case SentenceKind::False:
      case SentenceKind::Atom: return Measure{false, 3};
      case SentenceKind::Not: return add(of(t.sub()), Measure{false, 0}, 1);
      case SentenceKind::And: return add(of(t.lhs()), of(t.rhs()));
      case SentenceKind::Implies: return add(of(t.lhs()), of(t.rhs()), 3);
      case SentenceKind::Box: return add(of(t.sub()), Measure{false, 0}, 2);
      case SentenceKind::CBox: return add(of(t.sub()), Measure{false, 0}, 1);
      case SentenceKind::DynBox: return power(of(t.program()), of(t.sub()));
      case SentenceKind::Pre: return of(t.program());
      default: break;
    }
    throw Error("measure is defined on core terms only: " + render(t));
  }

  Measure compute(const Program& a) {
    switch (a.kind()) {
      case ProgramKind::Basic: {
        Measure m{false, 1};
        for (const auto& x : a.args()) m = add(m, of(x));
        return m;
      }
      case ProgramKind::Seq: return power(of(a.lhs()), add(of(a.rhs()), Measure{false, 0}, 1));
      default: break;
    }
    throw Error("measure is defined on compositions of basic actions only: " + render(a));
  }

  std::size_t max_bits_;
  std::unordered_map<const void*, Measure> s_memo_, p_memo_;
  std::vector<Sentence> keep_s_;
  std::vector<Program> keep_p_;
};

Program core_program(const Program& a);

}  // namespace

Measure measure(const Sentence& t, std::size_t max_bits) { return MeasureEval(max_bits).of(t); }
Measure measure(const Program& a, std::size_t max_bits) { return MeasureEval(max_bits).of(a); }

// --------------------------------------------------------------------- core

namespace {

Sentence core_rec(const Sentence& s) {
  switch (s.kind()) {
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom: return s;
    case SentenceKind::Not: return Sentence::neg(core_rec(s.sub()));
    case SentenceKind::And: return Sentence::conj(core_rec(s.lhs()), core_rec(s.rhs()));
    case SentenceKind::Or:
      return Sentence::neg(Sentence::conj(Sentence::neg(core_rec(s.lhs())), Sentence::neg(core_rec(s.rhs()))));
    case SentenceKind::Implies: return Sentence::implies(core_rec(s.lhs()), core_rec(s.rhs()));
    case SentenceKind::Box: return Sentence::box(s.name(), core_rec(s.sub()));
    case SentenceKind::Diamond: return Sentence::neg(Sentence::box(s.name(), Sentence::neg(core_rec(s.sub()))));
    case SentenceKind::CBox: return Sentence::cbox(s.agents(), core_rec(s.sub()));
    case SentenceKind::CDiamond:
      return Sentence::neg(Sentence::cbox(s.agents(), Sentence::neg(core_rec(s.sub()))));
    case SentenceKind::DynBox: return Sentence::dyn_box(core_program(s.program()), core_rec(s.sub()));
    case SentenceKind::DynDiamond:
      return Sentence::neg(Sentence::dyn_box(core_program(s.program()), Sentence::neg(core_rec(s.sub()))));
    case SentenceKind::Pre: return Sentence::pre(core_program(s.program()));
  }
  return s;
}

Program core_program(const Program& a) {
  switch (a.kind()) {
    case ProgramKind::Basic: {
      std::vector<Sentence> args;
      for (const auto& x : a.args()) args.push_back(core_rec(x));
      return Program::basic(a.type_index(), a.type_name(), std::move(args));
    }
    case ProgramKind::Seq: return Program::seq(core_program(a.lhs()), core_program(a.rhs()));
    default: break;
  }
  throw Error("not an action of the rewrite language: " + render(a));
}

}  // namespace

Sentence to_core(const Sentence& s) {
  if (contains_star(s)) throw Error("iteration has no normal form: " + render(s));
  return core_rec(desugar(s));
}

// -------------------------------------------------------------- recognizer

bool is_normal_action(const Program& a) {
  switch (a.kind()) {
    case ProgramKind::Basic:
      return std::all_of(a.args().begin(), a.args().end(), [](const Sentence& x) { return is_normal_form(x); });
    case ProgramKind::Seq: return a.rhs().kind() == ProgramKind::Basic && is_normal_action(a.lhs()) && is_normal_action(a.rhs());
    default: return false;
  }
}

bool is_normal_form(const Sentence& s) {
  switch (s.kind()) {
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom: return true;
    case SentenceKind::Not:
    case SentenceKind::Box:
    case SentenceKind::CBox: return is_normal_form(s.sub());
    case SentenceKind::And: return is_normal_form(s.lhs()) && is_normal_form(s.rhs());
    case SentenceKind::DynBox:
      return s.sub().kind() == SentenceKind::CBox && is_normal_action(s.program()) && is_normal_form(s.sub());
    default: return false;
  }
}

// ----------------------------------------------------------------- rewriter

Rewriter::Rewriter(Signature sig) : oracle_(std::move(sig)) {}

void Rewriter::mark_normal(const Sentence& t) {
  if (normal_.insert(t.identity()).second) keep_s_.push_back(t);
}

void Rewriter::mark_normal(const Program& a) {
  if (normal_.insert(a.identity()).second) keep_p_.push_back(a);
}

std::optional<Rewriter::Found> Rewriter::step_p(const Program& a) {
  if (known_normal(a.identity())) return std::nullopt;
  switch (a.kind()) {
    case ProgramKind::Basic: {
      const auto& args = a.args();
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (auto r = step_s(args[i])) {
          auto next = args;
          next[i] = r->s;
          return Found{r->rule, Sentence(), Program::basic(a.type_index(), a.type_name(), std::move(next))};
        }
      }
      break;
    }
    case ProgramKind::Seq: {
      if (a.rhs().kind() == ProgramKind::Seq) {
        return Found{"r9", Sentence(), Program::seq(Program::seq(a.lhs(), a.rhs().lhs()), a.rhs().rhs())};
      }
      if (auto r = step_p(a.lhs())) return Found{r->rule, Sentence(), Program::seq(r->p, a.rhs())};
      if (auto r = step_p(a.rhs())) return Found{r->rule, Sentence(), Program::seq(a.lhs(), r->p)};
      break;
    }
    default: throw Error("not an action of the rewrite language: " + render(a));
  }
  mark_normal(a);
  return std::nullopt;
}

std::optional<Rewriter::Found> Rewriter::step_s(const Sentence& t) {
  if (known_normal(t.identity())) return std::nullopt;
  auto wrap = [](std::optional<Found> r, const std::function<Sentence(const Found&)>& rebuild) {
    if (r) r->s = rebuild(*r);
    return r;
  };
  switch (t.kind()) {
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom: break;
    case SentenceKind::Not:
      if (auto r = step_s(t.sub())) return wrap(r, [](const Found& f) { return Sentence::neg(f.s); });
      break;
    case SentenceKind::And:
      if (auto r = step_s(t.lhs())) return wrap(r, [&](const Found& f) { return Sentence::conj(f.s, t.rhs()); });
      if (auto r = step_s(t.rhs())) return wrap(r, [&](const Found& f) { return Sentence::conj(t.lhs(), f.s); });
      break;
    case SentenceKind::Implies:
      return Found{"r1", Sentence::neg(Sentence::conj(t.lhs(), Sentence::neg(t.rhs()))), Program()};
    case SentenceKind::Box:
      if (auto r = step_s(t.sub())) return wrap(r, [&](const Found& f) { return Sentence::box(t.name(), f.s); });
      break;
    case SentenceKind::CBox:
      if (auto r = step_s(t.sub())) return wrap(r, [&](const Found& f) { return Sentence::cbox(t.agents(), f.s); });
      break;
    case SentenceKind::Pre: {
      const Program& a = t.program();
      if (auto r = step_p(a)) return wrap(r, [](const Found& f) { return Sentence::pre(f.p); });
      if (a.kind() == ProgramKind::Basic) return Found{"r2", a.args()[a.type_index()], Program()};
      if (a.kind() == ProgramKind::Seq) {
        return Found{"r3", Sentence::conj(Sentence::pre(a.lhs()), Sentence::dyn_box(a.lhs(), Sentence::pre(a.rhs()))),
                     Program()};
      }
      break;
    }
    case SentenceKind::DynBox: {
      const Program& a = t.program();
      if (auto r = step_p(a)) return wrap(r, [&](const Found& f) { return Sentence::dyn_box(f.p, t.sub()); });
      const Sentence& body = t.sub();
      switch (body.kind()) {
        case SentenceKind::True:
        case SentenceKind::False:
        case SentenceKind::Atom: return Found{"r4", Sentence::implies(Sentence::pre(a), body), Program()};
        case SentenceKind::Not:
          return Found{"r5", Sentence::implies(Sentence::pre(a), Sentence::neg(Sentence::dyn_box(a, body.sub()))),
                       Program()};
        case SentenceKind::And:
          return Found{"r6", Sentence::conj(Sentence::dyn_box(a, body.lhs()), Sentence::dyn_box(a, body.rhs())),
                       Program()};
        case SentenceKind::Box: {
          std::vector<Sentence> parts;
          for (const auto& b : oracle_.successors(SimpleAction(a), body.name())) {
            parts.push_back(Sentence::box(body.name(), Sentence::dyn_box(b, body.sub())));
          }
          return Found{"r7", Sentence::implies(Sentence::pre(a), Sentence::conj_all(parts)), Program()};
        }
        case SentenceKind::DynBox:
          return Found{"r8", Sentence::dyn_box(Program::seq(a, body.program()), body.sub()), Program()};
        default:
          if (auto r = step_s(body)) return wrap(r, [&](const Found& f) { return Sentence::dyn_box(a, f.s); });
          break;
      }
      break;
    }
    default: throw Error("not a core term: " + render(t));
  }
  mark_normal(t);
  return std::nullopt;
}

std::optional<RewriteStep> Rewriter::step(const Sentence& t) {
  auto r = step_s(t);
  if (!r) return std::nullopt;
  return RewriteStep{r->rule, r->s};
}

NormalizeResult Rewriter::normalize_traced(const Sentence& s, const NormalizeOptions& opt) {
  NormalizeResult out;
  Sentence t = to_core(s);
  std::optional<MeasureEval> meval;
  if (opt.check_measure) meval.emplace(opt.max_bits);
  while (auto r = step_s(t)) {
    if (++out.steps > opt.fuel) {
      throw GuardError("normalization exceeded " + std::to_string(opt.fuel) + " steps");
    }
    if (meval) {
      Measure before = meval->of(t), after = meval->of(r->s);
      if (before.overflow || after.overflow) {
        ++out.measure_skipped;
      } else {
        ++out.measure_checked;
        if (!(after.value < before.value)) {
          throw Error("measure did not decrease under " + r->rule + ": " + render(t) + " => " + render(r->s));
        }
      }
    }
    if (opt.trace) out.trace.push_back(RewriteStep{r->rule, r->s});
    t = r->s;
  }
  out.nf = t;
  return out;
}

Sentence Rewriter::normalize(const Sentence& s) {
  auto it = nf_memo_.find(s);
  if (it != nf_memo_.end()) return it->second;
  Sentence t = normalize_traced(s).nf;
  nf_memo_.emplace(s, t);
  return t;
}

// ------------------------------------------------------------------ closure

const std::unordered_set<Sentence, SentenceHash>& Rewriter::f(const Sentence& phi, std::size_t cap) {
  auto it = f_memo_.find(phi);
  if (it != f_memo_.end()) return *it->second;
  auto out = std::make_unique<std::unordered_set<Sentence, SentenceHash>>();
  auto absorb = [&](const std::unordered_set<Sentence, SentenceHash>& xs) {
    out->insert(xs.begin(), xs.end());
    if (out->size() > cap) throw GuardError("closure exceeds " + std::to_string(cap) + " sentences");
  };
  auto add = [&](const Sentence& x) {
    out->insert(x);
    if (out->size() > cap) throw GuardError("closure exceeds " + std::to_string(cap) + " sentences");
  };
  switch (phi.kind()) {
    case SentenceKind::True:
    case SentenceKind::False:
    case SentenceKind::Atom: add(phi); break;
    case SentenceKind::Not:
    case SentenceKind::Box:
      absorb(f(phi.sub(), cap));
      add(phi);
      break;
    case SentenceKind::And:
      absorb(f(phi.lhs(), cap));
      absorb(f(phi.rhs(), cap));
      add(phi);
      break;
    case SentenceKind::CBox:
      absorb(f(phi.sub(), cap));
      add(phi);
      for (const auto& g : phi.agents()) add(Sentence::box(g, phi));
      break;
    case SentenceKind::DynBox: {
      if (!is_normal_form(phi)) throw Error("closure expects a normal form: " + render(phi));
      const Sentence& cb = phi.sub();
      const auto& agents = cb.agents();
      for (const auto& b : oracle_.reachable(SimpleAction(phi.program()), agents)) {
        Sentence bc = Sentence::dyn_box(b, cb);
        for (const auto& g : agents) {
          for (const auto& x : subsentences(Sentence::box(g, bc))) add(x);
        }
        // Sentences inside b are exactly those under its basic leaves.
        std::function<void(const Program&)> leaves = [&](const Program& p) {
          if (p.kind() == ProgramKind::Seq) {
            leaves(p.lhs());
            leaves(p.rhs());
            return;
          }
          for (const auto& arg : p.args()) {
            for (const auto& x : subsentences(arg)) absorb(f(x, cap));
          }
        };
        leaves(b);
        absorb(f(normalize(Sentence::pre(b)), cap));
        absorb(f(normalize(Sentence::dyn_box(b, cb.sub())), cap));
      }
      absorb(f(cb, cap));
      break;
    }
    default: throw Error("closure expects a normal form: " + render(phi));
  }
  auto [pos, ok] = f_memo_.emplace(phi, std::move(out));
  return *pos->second;
}

std::vector<Sentence> Rewriter::closure(const Sentence& nf, std::size_t cap) {
  if (!is_normal_form(nf)) throw Error("closure expects a normal form: " + render(nf));
  const auto& set = f(nf, cap);
  std::vector<std::pair<std::string, Sentence>> keyed;
  for (const auto& x : set) keyed.emplace_back(render(x), x);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Sentence> out;
  for (auto& [k, x] : keyed) out.push_back(std::move(x));
  return out;
}

std::optional<RewriteStep> rewrite_step(const Sentence& t, const Signature& sig) { return Rewriter(sig).step(t); }

Sentence normalize(const Sentence& s, const Signature& sig) { return Rewriter(sig).normalize(s); }

NormalizeResult normalize_traced(const Sentence& s, const Signature& sig, const NormalizeOptions& opt) {
  return Rewriter(sig).normalize_traced(s, opt);
}

std::vector<Sentence> closure(const Sentence& nf, const Signature& sig, std::size_t cap) {
  return Rewriter(sig).closure(nf, cap);
}

}  // namespace del
