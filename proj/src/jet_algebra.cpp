#include "levijet/jet_algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace levijet {

JetPoly::JetPoly(int n_vars, int cap) : n_vars_(n_vars), cap_(cap) {
  if (n_vars <= 0) throw std::invalid_argument("JetPoly: n_vars must be positive");
  if (cap < 0) throw std::invalid_argument("JetPoly: cap must be nonnegative");
}

JetPoly JetPoly::constant(int n_vars, int cap, const Rational& c) {
  JetPoly p(n_vars, cap);
  p.add_term(mono_unit(n_vars), c);
  return p;
}

JetPoly JetPoly::variable(int n_vars, int cap, int i) {
  JetPoly p(n_vars, cap);
  p.add_term(mono_variable(n_vars, i), Rational(1));
  return p;
}

JetPoly JetPoly::monomial(int n_vars, int cap, const Mono& e, const Rational& c) {
  JetPoly p(n_vars, cap);
  p.add_term(e, c);
  return p;
}

Rational JetPoly::coeff(const Mono& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void JetPoly::add_term(const Mono& e, const Rational& c) {
  if (static_cast<int>(e.size()) != n_vars_)
    throw std::invalid_argument("JetPoly::add_term: exponent arity mismatch");
  if (c == 0 || total_degree(e) > cap_) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int JetPoly::vanishing_order() const {
  if (terms_.empty()) return kOrderInfinity;
  return total_degree(terms_.begin()->first);  // graded-lex: first is minimal
}

int JetPoly::top_degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.rbegin()->first);
}

JetPoly JetPoly::drop_above(int bound) const {
  JetPoly r(n_vars_, cap_);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e) > bound) break;
    r.terms_.emplace(e, c);
  }
  return r;
}

JetPoly JetPoly::drop_below(int bound) const {
  JetPoly r(n_vars_, cap_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) >= bound) r.terms_.emplace(e, c);
  return r;
}

JetPoly JetPoly::recapped(int new_cap) const {
  JetPoly r(n_vars_, new_cap);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e) > new_cap) break;
    r.terms_.emplace(e, c);
  }
  return r;
}

JetPoly JetPoly::homogeneous_part(int k) const {
  JetPoly r(n_vars_, cap_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) == k) r.terms_.emplace(e, c);
  return r;
}

void require_same_shape(const JetPoly& a, const JetPoly& b) {
  if (a.n_vars() != b.n_vars() || a.cap() != b.cap())
    throw std::invalid_argument("jet shape mismatch: (" +
                                std::to_string(a.n_vars()) + ", cap " +
                                std::to_string(a.cap()) + ") vs (" +
                                std::to_string(b.n_vars()) + ", cap " +
                                std::to_string(b.cap()) + ")");
}

JetPoly& JetPoly::operator+=(const JetPoly& o) {
  require_same_shape(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& o) {
  require_same_shape(*this, o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

JetPoly JetPoly::operator-() const {
  JetPoly r(n_vars_, cap_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

JetPoly operator*(const JetPoly& a, const JetPoly& b) {
  require_same_shape(a, b);
  JetPoly r(a.n_vars_, a.cap_);
  // Graded-lex keys are degree-major, so b's usable range shrinks as a's
  // term degree grows; the inner loop breaks at the cap boundary.
  for (const auto& [ea, ca] : a.terms_) {
    const int da = total_degree(ea);
    if (da > a.cap_) break;
    for (const auto& [eb, cb] : b.terms_) {
      if (da + total_degree(eb) > a.cap_) break;
      r.add_term(mono_mul(ea, eb), ca * cb);
    }
  }
  return r;
}

JetPoly& JetPoly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

bool operator==(const JetPoly& a, const JetPoly& b) {
  return a.n_vars_ == b.n_vars_ && a.cap_ == b.cap_ && a.terms_ == b.terms_;
}

JetPoly JetPoly::derivative(int i) const {
  JetPoly r(n_vars_, cap_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Mono d = e;
    d[i] -= 1;
    r.add_term(d, c * Rational(e[i]));
  }
  return r;
}

std::string JetPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << "(" << levijet::to_string(c) << ")";
    for (int i = 0; i < n_vars_; ++i) {
      if (e[i] == 0) continue;
      out << "*z" << i + 1;
      if (e[i] > 1) out << "^" << e[i];
    }
  }
  return out.str();
}

int JetVectorField::vanishing_order() const {
  int o = kOrderInfinity;
  for (const auto& p : comps) o = std::min(o, p.vanishing_order());
  return o;
}

JetPoly JetVectorField::apply(const JetPoly& f) const {
  if (comps.empty()) throw std::invalid_argument("JetVectorField: empty");
  JetPoly r(f.n_vars(), f.cap());
  for (int i = 0; i < n_vars(); ++i) {
    if (comps[i].is_zero()) continue;
    r += comps[i] * f.derivative(i);
  }
  return r;
}

JetVectorField vf_bracket(const JetVectorField& u, const JetVectorField& v) {
  if (u.n_vars() != v.n_vars())
    throw std::invalid_argument("vf_bracket: arity mismatch");
  JetVectorField r;
  r.comps.reserve(u.comps.size());
  for (int i = 0; i < u.n_vars(); ++i)
    r.comps.push_back(u.apply(v.comps[i]) - v.apply(u.comps[i]));
  return r;
}

int JetBivector::idx(int i, int j) const {
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

JetBivector::JetBivector(int n_vars, int cap) : n_(n_vars), cap_(cap) {
  up_.assign(static_cast<std::size_t>(n_) * (n_ - 1) / 2, JetPoly(n_vars, cap));
}

const JetPoly& JetBivector::upper(int i, int j) const {
  if (!(0 <= i && i < j && j < n_))
    throw std::out_of_range("JetBivector::upper: need i < j");
  return up_[idx(i, j)];
}

JetPoly& JetBivector::upper(int i, int j) {
  if (!(0 <= i && i < j && j < n_))
    throw std::out_of_range("JetBivector::upper: need i < j");
  return up_[idx(i, j)];
}

JetPoly JetBivector::component(int i, int j) const {
  if (i == j) return JetPoly(n_, cap_);
  if (i < j) return up_[idx(i, j)];
  return -up_[idx(j, i)];
}

int JetBivector::vanishing_order() const {
  int o = kOrderInfinity;
  for (const auto& p : up_) o = std::min(o, p.vanishing_order());
  return o;
}

JetBivector JetBivector::drop_above(int bound) const {
  JetBivector r(n_, cap_);
  for (std::size_t t = 0; t < up_.size(); ++t) r.up_[t] = up_[t].drop_above(bound);
  return r;
}

JetBivector& JetBivector::operator+=(const JetBivector& o) {
  if (n_ != o.n_ || cap_ != o.cap_)
    throw std::invalid_argument("JetBivector: shape mismatch");
  for (std::size_t t = 0; t < up_.size(); ++t) up_[t] += o.up_[t];
  return *this;
}

JetBivector& JetBivector::operator-=(const JetBivector& o) {
  if (n_ != o.n_ || cap_ != o.cap_)
    throw std::invalid_argument("JetBivector: shape mismatch");
  for (std::size_t t = 0; t < up_.size(); ++t) up_[t] -= o.up_[t];
  return *this;
}

bool operator==(const JetBivector& a, const JetBivector& b) {
  return a.n_ == b.n_ && a.cap_ == b.cap_ && a.up_ == b.up_;
}

JetBivector JetBivector::homothety(const Rational& t) const {
  if (t == 0) throw std::invalid_argument("homothety: t must be nonzero");
  JetBivector r(n_, cap_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      JetPoly& dst = r.upper(i, j);
      for (const auto& [e, c] : upper(i, j).terms())
        dst.add_term(e, c * pow_rational(t, 1 - total_degree(e)));
    }
  return r;
}

int JetTrivector::idx(int i, int j, int k) const {
  return combination_rank(n_, {i, j, k});
}

JetTrivector::JetTrivector(int n_vars, int cap) : n_(n_vars), cap_(cap) {
  triples_ = combinations(n_, 3);
  up_.assign(triples_.size(), JetPoly(n_vars, cap));
}

const JetPoly& JetTrivector::upper(int i, int j, int k) const {
  if (!(0 <= i && i < j && j < k && k < n_))
    throw std::out_of_range("JetTrivector::upper: need i < j < k");
  return up_[idx(i, j, k)];
}

JetPoly& JetTrivector::upper(int i, int j, int k) {
  if (!(0 <= i && i < j && j < k && k < n_))
    throw std::out_of_range("JetTrivector::upper: need i < j < k");
  return up_[idx(i, j, k)];
}

bool JetTrivector::is_zero() const {
  for (const auto& p : up_)
    if (!p.is_zero()) return false;
  return true;
}

int JetTrivector::vanishing_order() const {
  int o = kOrderInfinity;
  for (const auto& p : up_) o = std::min(o, p.vanishing_order());
  return o;
}

JetDiffeo::JetDiffeo(int n_vars, int cap) : cap_(cap) {
  chi_.assign(n_vars, JetPoly(n_vars, cap));
}

JetDiffeo JetDiffeo::from_displacement(std::vector<JetPoly> chi) {
  if (chi.empty()) throw std::invalid_argument("JetDiffeo: no components");
  JetDiffeo d;
  d.cap_ = chi.front().cap();
  const int n = static_cast<int>(chi.size());
  for (const auto& p : chi) {
    if (p.n_vars() != n || p.cap() != d.cap_)
      throw std::invalid_argument("JetDiffeo: component shape mismatch");
    if (p.vanishing_order() < 2)
      throw std::invalid_argument(
          "JetDiffeo: displacement must have vanishing order >= 2");
  }
  d.chi_ = std::move(chi);
  return d;
}

JetPoly JetDiffeo::component(int i) const {
  JetPoly p = chi_[i];
  p.add_term(mono_variable(n_vars(), i), Rational(1));
  return p;
}

JetPoly compose(const JetPoly& f, const JetDiffeo& theta) {
  if (f.n_vars() != theta.n_vars() || f.cap() != theta.cap())
    throw std::invalid_argument("compose: shape mismatch");
  const int n = f.n_vars();
  const int cap = f.cap();
  // Memoized powers of the substituted coordinates; exponents stay small.
  std::vector<std::vector<JetPoly>> powers(n);
  for (int i = 0; i < n; ++i)
    powers[i].push_back(JetPoly::constant(n, cap, Rational(1)));
  auto power = [&](int i, int k) -> const JetPoly& {
    while (static_cast<int>(powers[i].size()) <= k) {
      if (powers[i].size() == 1)
        powers[i].push_back(theta.component(i));
      else
        powers[i].push_back(powers[i].back() * powers[i][1]);
    }
    return powers[i][k];
  };
  JetPoly r(n, cap);
  for (const auto& [e, c] : f.terms()) {
    JetPoly term = JetPoly::constant(n, cap, c);
    for (int i = 0; i < n; ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    r += term;
  }
  return r;
}

JetDiffeo compose(const JetDiffeo& outer, const JetDiffeo& inner) {
  if (outer.n_vars() != inner.n_vars() || outer.cap() != inner.cap())
    throw std::invalid_argument("compose: diffeo shape mismatch");
  std::vector<JetPoly> chi;
  chi.reserve(outer.n_vars());
  // (outer o inner)_i = z_i + inner_chi_i + outer_chi_i(inner(z)).
  for (int i = 0; i < outer.n_vars(); ++i)
    chi.push_back(inner.displacement()[i] +
                  compose(outer.displacement()[i], inner));
  return JetDiffeo::from_displacement(std::move(chi));
}

JetDiffeo invert(const JetDiffeo& theta) {
  const int n = theta.n_vars();
  const int cap = theta.cap();
  // xi_{s+1} = -chi o (Id + xi_s) gains one degree of agreement per sweep
  // (chi has order >= 2), so cap - 1 sweeps pin every degree up to cap.
  const int sweeps = cap > 2 ? cap - 1 : 1;
  JetDiffeo xi(n, cap);  // identity displacement (zero)
  for (int s = 0; s < sweeps; ++s) {
    std::vector<JetPoly> next;
    next.reserve(n);
    for (int i = 0; i < n; ++i) next.push_back(-compose(theta.displacement()[i], xi));
    xi = JetDiffeo::from_displacement(std::move(next));
  }
  // Two-sided exactness: the fixed point is reached, not merely approached.
  const JetDiffeo check = compose(theta, xi);
  for (int i = 0; i < n; ++i)
    if (!check.displacement()[i].is_zero())
      throw std::logic_error("invert: fixed point not reached");
  return xi;
}

JetPoly poisson_bracket(const JetBivector& pi, const JetPoly& f,
                        const JetPoly& g) {
  if (pi.n_vars() != f.n_vars() || pi.cap() != f.cap())
    throw std::invalid_argument("poisson_bracket: shape mismatch");
  require_same_shape(f, g);
  const int n = pi.n_vars();
  std::vector<JetPoly> df, dg;
  df.reserve(n);
  dg.reserve(n);
  for (int u = 0; u < n; ++u) {
    df.push_back(f.derivative(u));
    dg.push_back(g.derivative(u));
  }
  JetPoly r(n, f.cap());
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const JetPoly& puv = pi.upper(u, v);
      if (puv.is_zero()) continue;
      r += puv * (df[u] * dg[v] - df[v] * dg[u]);
    }
  return r;
}

JetPoly coordinate_bracket(const JetBivector& pi, int i, const JetPoly& f) {
  if (pi.n_vars() != f.n_vars() || pi.cap() != f.cap())
    throw std::invalid_argument("coordinate_bracket: shape mismatch");
  JetPoly r(f.n_vars(), f.cap());
  for (int u = 0; u < pi.n_vars(); ++u) {
    if (u == i) continue;
    const JetPoly piu = pi.component(i, u);
    if (piu.is_zero()) continue;
    r += piu * f.derivative(u);
  }
  return r;
}

JetTrivector schouten_jacobiator(const JetBivector& pi) {
  const int n = pi.n_vars();
  const int cap = pi.cap();
  JetTrivector jac(n, cap);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        JetPoly s = coordinate_bracket(pi, i, pi.upper(j, k));
        s += coordinate_bracket(pi, j, pi.component(k, i));
        s += coordinate_bracket(pi, k, pi.upper(i, j));
        jac.upper(i, j, k) = s.drop_above(cap - 1);
      }
  return jac;
}

JetBivector pushforward(const JetBivector& pi, const JetDiffeo& theta) {
  return pushforward(pi, theta, invert(theta));
}

JetBivector pushforward(const JetBivector& pi, const JetDiffeo& theta,
                        const JetDiffeo& theta_inv) {
  if (pi.n_vars() != theta.n_vars() || pi.cap() != theta.cap())
    throw std::invalid_argument("pushforward: shape mismatch");
  const int n = pi.n_vars();
  JetBivector out(n, pi.cap());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.upper(i, j) =
          compose(poisson_bracket(pi, theta.component(i), theta.component(j)),
                  theta_inv);
  return out;
}

}  // namespace levijet
