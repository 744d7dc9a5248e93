#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Exact word algebra for the genus-g surface group
//
//   Gamma_g = < a_1, b_1, ..., a_g, b_g | [a_1,b_1][a_2,b_2]...[a_g,b_g] >.
//
// The relator has length 4g and satisfies the C'(1/8) small-cancellation
// condition, so Dehn's algorithm solves the word problem: a freely reduced
// word represents the identity iff it contains a subword longer than half of
// some cyclic rotation of the relator or its inverse, which can be replaced
// by the shorter complementary half until the word is empty.
//
// Canonical forms: a word is first Dehn-reduced (no more-than-half relator
// subword), then minimized in shortlex order over the finite closure of
// exactly-half relator swaps, which connects all geodesic representatives of
// the same element. Group equality is then plain word equality.

namespace hyperbloch::group {

inline constexpr int kDefaultMaxBallRadius = 8;
inline constexpr double kAmplitudePruneTol = 1e-15;

// A signed generator. generator_index is 1..2g with i <= g meaning alpha_i
// and i > g meaning beta_{i-g}; code packs (index, sign) so that the letter
// order a1 < A1 < a2 < A2 < ... < b1 < B1 < ... is just integer order
// (capitals are inverses).
struct Letter {
  std::uint16_t code = 0;

  Letter() = default;
  Letter(int generator_index, int sign)
      : code(static_cast<std::uint16_t>(2 * (generator_index - 1) +
                                        (sign < 0 ? 1 : 0))) {
    if (generator_index < 1) throw std::invalid_argument("bad generator index");
  }

  int generator_index() const { return static_cast<int>(code / 2) + 1; }
  bool is_inverse() const { return (code & 1u) != 0; }
  int sign() const { return is_inverse() ? -1 : 1; }
  Letter inverse() const {
    Letter l;
    l.code = code ^ 1u;
    return l;
  }

  friend bool operator==(Letter a, Letter b) { return a.code == b.code; }
  friend auto operator<=>(Letter a, Letter b) { return a.code <=> b.code; }
};

using Word = std::vector<Letter>;

inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->inverse());
  return out;
}

inline void free_reduce(Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == l.inverse())
      out.pop_back();
    else
      out.push_back(l);
  }
  w = std::move(out);
}

namespace detail {

// All cyclic rotations of the relator and of its inverse, precomputed once
// per genus.
struct RelatorTable {
  int genus = 0;
  Word relator;                 // [a_1,b_1]...[a_g,b_g], length 4g
  std::vector<Word> rotations;  // 8g words of length 4g
};

inline Word relator_word(int genus) {
  Word r;
  for (int i = 1; i <= genus; ++i) {
    const Letter a(i, +1), b(genus + i, +1);
    r.push_back(a);
    r.push_back(b);
    r.push_back(a.inverse());
    r.push_back(b.inverse());
  }
  return r;
}

inline const RelatorTable& relator_table(int genus) {
  static std::map<int, RelatorTable> cache;
  auto it = cache.find(genus);
  if (it == cache.end()) {
    RelatorTable t;
    t.genus = genus;
    t.relator = relator_word(genus);
    for (const Word& base : {t.relator, inverse_word(t.relator)}) {
      for (std::size_t s = 0; s < base.size(); ++s) {
        Word rot(base.begin() + static_cast<std::ptrdiff_t>(s), base.end());
        rot.insert(rot.end(), base.begin(),
                   base.begin() + static_cast<std::ptrdiff_t>(s));
        t.rotations.push_back(std::move(rot));
      }
    }
    it = cache.emplace(genus, std::move(t)).first;
  }
  return it->second;
}

inline bool matches_at(const Word& w, std::size_t pos, const Word& pat,
                       std::size_t len) {
  for (std::size_t k = 0; k < len; ++k)
    if (!(w[pos + k] == pat[k])) return false;
  return true;
}

// One pass of Dehn shortening: replace a subword matching more than half of
// a relator rotation by the inverse of the complementary part. Returns true
// if the word changed.
inline bool dehn_shrink_once(Word& w, const RelatorTable& t) {
  const std::size_t rlen = t.relator.size();  // 4g
  const std::size_t half = rlen / 2;
  const std::size_t max_len = std::min(w.size(), rlen - 1);
  for (std::size_t len = max_len; len >= half + 1; --len) {
    for (std::size_t pos = 0; pos + len <= w.size(); ++pos) {
      for (const Word& rot : t.rotations) {
        if (!matches_at(w, pos, rot, len)) continue;
        Word tail(rot.begin() + static_cast<std::ptrdiff_t>(len), rot.end());
        Word repl = inverse_word(tail);
        Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
        out.insert(out.end(), repl.begin(), repl.end());
        out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(pos + len),
                   w.end());
        free_reduce(out);
        w = std::move(out);
        return true;
      }
    }
  }
  return false;
}

inline void dehn_reduce(Word& w, const RelatorTable& t) {
  free_reduce(w);
  while (w.size() >= t.relator.size() / 2 + 1 && dehn_shrink_once(w, t)) {
  }
}

// Shortlex-least representative over the closure of exactly-half relator
// swaps. Dehn-reduced words are geodesic and any two geodesic spellings are
// connected by such swaps, so the minimum is a true canonical form.
inline Word canonical_form(Word w, const RelatorTable& t) {
  dehn_reduce(w, t);
  const std::size_t half = t.relator.size() / 2;
  std::set<Word> seen;
  std::vector<Word> queue;
  seen.insert(w);
  queue.push_back(w);
  while (!queue.empty()) {
    Word u = std::move(queue.back());
    queue.pop_back();
    if (u.size() < half) continue;
    for (std::size_t pos = 0; pos + half <= u.size(); ++pos) {
      for (const Word& rot : t.rotations) {
        if (!matches_at(u, pos, rot, half)) continue;
        Word tail(rot.begin() + static_cast<std::ptrdiff_t>(half), rot.end());
        Word repl = inverse_word(tail);
        Word v(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(pos));
        v.insert(v.end(), repl.begin(), repl.end());
        v.insert(v.end(), u.begin() + static_cast<std::ptrdiff_t>(pos + half),
                 u.end());
        free_reduce(v);
        if (v.size() < u.size()) {
          // A swap exposed a shorter spelling; restart from scratch.
          return canonical_form(std::move(v), t);
        }
        if (seen.insert(v).second) {
          if (seen.size() > 65536)
            throw std::runtime_error("canonical_form: swap closure blow-up");
          queue.push_back(std::move(v));
        }
      }
    }
  }
  return *std::min_element(seen.begin(), seen.end(), shortlex_less);
}

}  // namespace detail

// An element of Gamma_g, stored in canonical form; equality of elements is
// equality of the stored words.
class GroupElement {
 public:
  explicit GroupElement(int genus) : genus_(check_genus(genus)) {}

  GroupElement(int genus, Word letters) : genus_(check_genus(genus)) {
    validate_letters(letters);
    word_ = detail::canonical_form(std::move(letters),
                                   detail::relator_table(genus_));
  }

  static GroupElement identity(int genus) { return GroupElement(genus); }

  static GroupElement generator(int genus, int generator_index, int sign = 1) {
    return GroupElement(genus, Word{Letter(generator_index, sign)});
  }

  int genus() const { return genus_; }
  const Word& word() const { return word_; }
  std::size_t length() const { return word_.size(); }
  bool is_identity() const { return word_.empty(); }

  friend bool operator==(const GroupElement& x, const GroupElement& y) {
    return x.genus_ == y.genus_ && x.word_ == y.word_;
  }

  // Shortlex order on canonical words (elements of different genus do not
  // belong in the same container; genus is compared first as a guard).
  friend bool operator<(const GroupElement& x, const GroupElement& y) {
    if (x.genus_ != y.genus_) return x.genus_ < y.genus_;
    return shortlex_less(x.word_, y.word_);
  }

 private:
  static int check_genus(int genus) {
    if (genus < 2) throw std::invalid_argument("genus must be >= 2");
    return genus;
  }
  void validate_letters(const Word& letters) const {
    for (Letter l : letters)
      if (l.generator_index() > 2 * genus_)
        throw std::invalid_argument("letter index out of range for genus");
  }

  int genus_;
  Word word_;
};

inline void require_same_genus(const GroupElement& x, const GroupElement& y) {
  if (x.genus() != y.genus())
    throw std::invalid_argument("genus mismatch between group elements");
}

inline GroupElement compose(const GroupElement& x, const GroupElement& y) {
  require_same_genus(x, y);
  Word w = x.word();
  w.insert(w.end(), y.word().begin(), y.word().end());
  return GroupElement(x.genus(), std::move(w));
}

inline GroupElement invert(const GroupElement& x) {
  return GroupElement(x.genus(), inverse_word(x.word()));
}

inline bool equals(const GroupElement& x, const GroupElement& y) {
  require_same_genus(x, y);
  return x == y;
}

inline GroupElement commutator(const GroupElement& x, const GroupElement& y) {
  return compose(compose(x, y), compose(invert(x), invert(y)));
}

inline GroupElement relator_element(int genus) {
  return GroupElement(genus, detail::relator_word(genus));
}

// Image in Z^{2g}; component j-1 counts the exponent sum of generator j.
using AbelianImage = std::vector<long long>;

inline AbelianImage abelianize(const GroupElement& x) {
  AbelianImage v(static_cast<std::size_t>(2 * x.genus()), 0);
  for (Letter l : x.word())
    v[static_cast<std::size_t>(l.generator_index() - 1)] += l.sign();
  return v;
}

inline bool in_commutator_subgroup(const GroupElement& x) {
  const AbelianImage v = abelianize(x);
  return std::all_of(v.begin(), v.end(), [](long long e) { return e == 0; });
}

// All elements of word length <= radius, in shortlex order. The exponential
// growth is bounded by max_radius (default 8).
inline std::vector<GroupElement> ball(int genus, int radius,
                                      int max_radius = kDefaultMaxBallRadius) {
  if (radius < 0) throw std::invalid_argument("ball radius must be >= 0");
  if (radius > max_radius)
    throw std::invalid_argument("ball radius exceeds configured maximum");
  std::set<GroupElement> known;
  std::vector<GroupElement> frontier{GroupElement::identity(genus)};
  known.insert(frontier.front());
  std::vector<Letter> alphabet;
  for (int i = 1; i <= 2 * genus; ++i) {
    alphabet.push_back(Letter(i, +1));
    alphabet.push_back(Letter(i, -1));
  }
  for (int r = 0; r < radius; ++r) {
    std::vector<GroupElement> next;
    for (const GroupElement& g : frontier) {
      for (Letter l : alphabet) {
        Word w = g.word();
        w.push_back(l);
        GroupElement h(genus, std::move(w));
        if (h.length() <= static_cast<std::size_t>(radius) &&
            known.insert(h).second)
          next.push_back(std::move(h));
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return {known.begin(), known.end()};
}

// ---------------------------------------------------------------------------
// Finitely supported functions psi : Gamma -> C.

class GammaFunction {
 public:
  using TermMap = std::map<GroupElement, std::complex<double>>;

  explicit GammaFunction(int genus) : genus_(genus) {
    if (genus < 2) throw std::invalid_argument("genus must be >= 2");
  }

  static GammaFunction delta(const GroupElement& g,
                             std::complex<double> amplitude = 1.0) {
    GammaFunction f(g.genus());
    f.add(g, amplitude);
    return f;
  }

  int genus() const { return genus_; }
  const TermMap& terms() const { return terms_; }
  std::size_t support_size() const { return terms_.size(); }

  std::complex<double> at(const GroupElement& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? std::complex<double>(0.0) : it->second;
  }

  void add(const GroupElement& g, std::complex<double> amplitude) {
    if (g.genus() != genus_)
      throw std::invalid_argument("genus mismatch in GammaFunction");
    auto [it, inserted] = terms_.emplace(g, amplitude);
    if (!inserted) it->second += amplitude;
    if (std::abs(it->second) < kAmplitudePruneTol) terms_.erase(it);
  }

  void set(const GroupElement& g, std::complex<double> amplitude) {
    if (g.genus() != genus_)
      throw std::invalid_argument("genus mismatch in GammaFunction");
    if (std::abs(amplitude) < kAmplitudePruneTol)
      terms_.erase(g);
    else
      terms_[g] = amplitude;
  }

  GammaFunction& operator*=(std::complex<double> c) {
    if (std::abs(c) < kAmplitudePruneTol) {
      terms_.clear();
      return *this;
    }
    for (auto& [g, a] : terms_) a *= c;
    return *this;
  }

  friend GammaFunction operator+(const GammaFunction& f,
                                 const GammaFunction& g) {
    if (f.genus_ != g.genus_)
      throw std::invalid_argument("genus mismatch in GammaFunction sum");
    GammaFunction out = f;
    for (const auto& [el, a] : g.terms_) out.add(el, a);
    return out;
  }

 private:
  int genus_;
  TermMap terms_;
};

// (T_gamma psi)(x) = psi(gamma x); an l^2 isometry.
inline GammaFunction translate(const GammaFunction& psi,
                               const GroupElement& gamma) {
  GammaFunction out(psi.genus());
  const GroupElement gi = invert(gamma);
  for (const auto& [g, a] : psi.terms()) out.add(compose(gi, g), a);
  return out;
}

// (psi1 * psi2)(g) = sum_h psi1(h) psi2(h^{-1} g).
inline GammaFunction convolve(const GammaFunction& psi1,
                              const GammaFunction& psi2) {
  if (psi1.genus() != psi2.genus())
    throw std::invalid_argument("genus mismatch in convolution");
  GammaFunction out(psi1.genus());
  for (const auto& [g1, a1] : psi1.terms())
    for (const auto& [g2, a2] : psi2.terms()) out.add(compose(g1, g2), a1 * a2);
  return out;
}

// Summands are accumulated in sorted order, so the norm depends only on the
// multiset of amplitudes; translation then preserves it bit for bit.
inline double lp_norm(const GammaFunction& psi, double p) {
  std::vector<double> mags;
  mags.reserve(psi.support_size());
  if (p == 1.0) {
    for (const auto& [g, a] : psi.terms()) mags.push_back(std::abs(a));
    std::sort(mags.begin(), mags.end());
    double s = 0.0;
    for (double m : mags) s += m;
    return s;
  }
  if (p == 2.0) {
    for (const auto& [g, a] : psi.terms()) mags.push_back(std::norm(a));
    std::sort(mags.begin(), mags.end());
    double s = 0.0;
    for (double m : mags) s += m;
    return std::sqrt(s);
  }
  if (std::isinf(p)) {
    double s = 0.0;
    for (const auto& [g, a] : psi.terms()) s = std::max(s, std::abs(a));
    return s;
  }
  throw std::invalid_argument("lp_norm supports p = 1, 2, infinity");
}

// ---------------------------------------------------------------------------
// Word strings: lowercase a/b = generator, uppercase = inverse, digits = index
// ("a1 B2 A1"). The identity is written "e".

inline std::string letter_to_string(Letter l, int genus) {
  const int idx = l.generator_index();
  const bool beta = idx > genus;
  char c = beta ? 'b' : 'a';
  if (l.is_inverse()) c = static_cast<char>(std::toupper(c));
  return std::string(1, c) + std::to_string(beta ? idx - genus : idx);
}

inline std::string word_to_string(const GroupElement& g) {
  if (g.is_identity()) return "e";
  std::string out;
  for (Letter l : g.word()) {
    if (!out.empty()) out.push_back(' ');
    out += letter_to_string(l, g.genus());
  }
  return out;
}

inline GroupElement parse_word(int genus, const std::string& text) {
  Word letters;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "e") continue;
    const char c = tok[0];
    const char lower = static_cast<char>(std::tolower(c));
    if ((lower != 'a' && lower != 'b') || tok.size() < 2)
      throw std::invalid_argument("bad letter token: " + tok);
    int idx = 0;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(tok[k])))
        throw std::invalid_argument("bad letter token: " + tok);
      idx = idx * 10 + (tok[k] - '0');
    }
    if (idx < 1 || idx > genus)
      throw std::invalid_argument("letter index out of range: " + tok);
    const int gen_index = (lower == 'a') ? idx : genus + idx;
    letters.push_back(Letter(gen_index, std::isupper(static_cast<unsigned char>(c)) ? -1 : 1));
  }
  return GroupElement(genus, std::move(letters));
}

// gamma-spec mini-language: whitespace separated letters plus [x,y] commutator
// sugar, nestable, e.g. "[a1,b1] A2".
inline GroupElement parse_gamma_spec(int genus, const std::string& text) {
  struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    int genus;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    }

    GroupElement parse_sequence(char terminator) {
      GroupElement acc = GroupElement::identity(genus);
      for (skip_ws(); pos < s.size() && s[pos] != terminator; skip_ws()) {
        if (s[pos] == '[') {
          ++pos;
          GroupElement x = parse_sequence(',');
          expect(',');
          GroupElement y = parse_sequence(']');
          expect(']');
          acc = compose(acc, commutator(x, y));
        } else {
          acc = compose(acc, parse_letter());
        }
      }
      return acc;
    }

    GroupElement parse_letter() {
      std::string tok;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])))) {
        tok.push_back(s[pos]);
        ++pos;
      }
      if (tok.empty())
        throw std::invalid_argument("gamma-spec: unexpected character at " +
                                    std::to_string(pos));
      return parse_word(genus, tok);
    }

    void expect(char c) {
      if (pos >= s.size() || s[pos] != c)
        throw std::invalid_argument(std::string("gamma-spec: expected '") + c +
                                    "'");
      ++pos;
    }
  };
  Parser p{text, 0, genus};
  GroupElement g = p.parse_sequence('\0');
  p.skip_ws();
  if (p.pos != text.size())
    throw std::invalid_argument("gamma-spec: trailing characters");
  return g;
}

}  // namespace hyperbloch::group
