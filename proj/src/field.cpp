#include "sdlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "sdlab/errors.hpp"

namespace sdlab {

namespace {

// Phase offset so that trig factor = cos(theta - shift); sin x = cos(x - pi/2).
double trig_shift(Trig t) { return t == Trig::sin ? std::numbers::pi / 2 : 0.0; }

// d^r/dtheta^r cos(theta - shift) = cos(theta - shift + r*pi/2).
double trig_derivative(Trig t, double theta, int r) {
  if (t == Trig::none) return r == 0 ? 1.0 : 0.0;
  const int q = r % 4;
  const double base = theta - trig_shift(t);
  switch (q) {
    case 0: return std::cos(base);
    case 1: return -std::sin(base);
    case 2: return -std::cos(base);
    default: return std::sin(base);
  }
}

// Partial derivative of a single term along the ordered index list `idx`.
// Leibniz over position subsets gives the binomial weights automatically.
double term_partial(const Term& t, std::span<const double> x, const int* idx, int r,
                    double theta) {
  const int dim = static_cast<int>(x.size());
  double total = 0.0;
  for (int mask = 0; mask < (1 << r); ++mask) {
    // positions in mask differentiate the monomial, the rest the trig factor
    int counts[16] = {0};
    double wave_factor = 1.0;
    int trig_order = 0;
    for (int p = 0; p < r; ++p) {
      if (mask & (1 << p)) {
        ++counts[idx[p]];
      } else {
        wave_factor *= t.wave.empty() ? 0.0 : t.wave[idx[p]];
        ++trig_order;
      }
    }
    if (wave_factor == 0.0 && trig_order > 0) continue;
    double mono = 1.0;
    for (int i = 0; i < dim && mono != 0.0; ++i) {
      const int p = t.powers.empty() ? 0 : t.powers[i];
      const int c = counts[i];
      if (c > p) {
        mono = 0.0;
        break;
      }
      for (int k = 0; k < c; ++k) mono *= static_cast<double>(p - k);
      if (p - c > 0) mono *= std::pow(x[i], p - c);
    }
    if (mono == 0.0) continue;
    total += mono * wave_factor * trig_derivative(t.trig, theta, trig_order);
  }
  return t.coeff * total;
}

Term normalized(Term t, int dim) {
  if (t.powers.empty()) t.powers.assign(dim, 0);
  if (t.wave.empty()) t.wave.assign(dim, 0.0);
  if (static_cast<int>(t.powers.size()) != dim || static_cast<int>(t.wave.size()) != dim)
    throw Error(ErrorKind::config, "field", "term arity does not match field dimension");
  for (int p : t.powers)
    if (p < 0) throw Error(ErrorKind::config, "field", "negative monomial power");
  if (t.trig == Trig::none) std::fill(t.wave.begin(), t.wave.end(), 0.0);
  return t;
}

}  // namespace

ScalarField ScalarField::constant(int dim, double c) {
  ScalarField f(dim);
  f.add_term(Term{c, {}, {}, Trig::none});
  return f;
}

ScalarField ScalarField::monomial(int dim, double c, std::vector<int> powers) {
  ScalarField f(dim);
  f.add_term(Term{c, std::move(powers), {}, Trig::none});
  return f;
}

ScalarField ScalarField::trig(int dim, double c, std::vector<double> wave, Trig kind) {
  ScalarField f(dim);
  f.add_term(Term{c, {}, std::move(wave), kind});
  return f;
}

void ScalarField::add_term(Term t) {
  if (t.coeff == 0.0) return;
  terms_.push_back(normalized(std::move(t), dim_));
}

double ScalarField::value(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    double theta = 0.0;
    for (int i = 0; i < dim_; ++i) theta += t.wave[i] * x[i];
    v += term_partial(t, x, nullptr, 0, theta);
  }
  return v;
}

ScalarJet ScalarField::jet(std::span<const double> x, int order) const {
  const int n = dim_;
  ScalarJet out(n);
  for (const auto& t : terms_) {
    double theta = 0.0;
    for (int i = 0; i < n; ++i) theta += t.wave[i] * x[i];
    out.value += term_partial(t, x, nullptr, 0, theta);
    if (order < 1) continue;
    for (int i = 0; i < n; ++i) {
      int idx1[1] = {i};
      out.d1[i] += term_partial(t, x, idx1, 1, theta);
      if (order < 2) continue;
      for (int j = i; j < n; ++j) {
        int idx2[2] = {i, j};
        const double v2 = term_partial(t, x, idx2, 2, theta);
        out.d2[i * n + j] += v2;
        if (j != i) out.d2[j * n + i] += v2;
        if (order < 3) continue;
        for (int k = j; k < n; ++k) {
          int idx3[3] = {i, j, k};
          const double v3 = term_partial(t, x, idx3, 3, theta);
          // scatter to all distinct permutations
          const int perm[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
          int done[6];
          int ndone = 0;
          for (const auto& p : perm) {
            const int flat = (p[0] * n + p[1]) * n + p[2];
            if (std::find(done, done + ndone, flat) != done + ndone) continue;
            done[ndone++] = flat;
            out.d3[flat] += v3;
          }
        }
      }
    }
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (dim_ == 0) dim_ = other.dim_;
  if (other.dim_ != dim_ && !other.terms_.empty())
    throw Error(ErrorKind::config, "field", "dimension mismatch in field sum");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::config, "field", "dimension mismatch in product");
  const int n = a.dim();
  ScalarField out(n);
  auto combine = [n](const std::vector<double>& w1, const std::vector<double>& w2, double sgn) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = w1[i] + sgn * w2[i];
    return w;
  };
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) {
      std::vector<int> pw(n);
      for (int i = 0; i < n; ++i) pw[i] = s.powers[i] + t.powers[i];
      const double c = s.coeff * t.coeff;
      if (s.trig == Trig::none || t.trig == Trig::none) {
        const Term& trig_term = s.trig == Trig::none ? t : s;
        out.add_term(Term{c, pw, trig_term.wave, trig_term.trig});
        continue;
      }
      const auto sum = combine(s.wave, t.wave, 1.0);
      const auto diff = combine(s.wave, t.wave, -1.0);
      // product-to-sum identities
      if (s.trig == Trig::cos && t.trig == Trig::cos) {
        out.add_term(Term{0.5 * c, pw, diff, Trig::cos});
        out.add_term(Term{0.5 * c, pw, sum, Trig::cos});
      } else if (s.trig == Trig::sin && t.trig == Trig::sin) {
        out.add_term(Term{0.5 * c, pw, diff, Trig::cos});
        out.add_term(Term{-0.5 * c, pw, sum, Trig::cos});
      } else if (s.trig == Trig::sin) {  // sin(a) cos(b)
        out.add_term(Term{0.5 * c, pw, sum, Trig::sin});
        out.add_term(Term{0.5 * c, pw, diff, Trig::sin});
      } else {  // cos(a) sin(b)
        out.add_term(Term{0.5 * c, pw, sum, Trig::sin});
        out.add_term(Term{-0.5 * c, pw, diff, Trig::sin});
      }
    }
  }
  return out.simplified();
}

ScalarField ScalarField::simplified() const {
  std::map<std::tuple<std::vector<int>, std::vector<double>, int>, double> acc;
  for (const auto& t : terms_) {
    Term u = t;
    // cos(-k.x) = cos(k.x), sin(-k.x) = -sin(k.x): canonical sign has first nonzero wave > 0
    auto first = std::find_if(u.wave.begin(), u.wave.end(), [](double w) { return w != 0.0; });
    if (first == u.wave.end()) {
      if (u.trig == Trig::sin) continue;
      u.trig = Trig::none;
    } else if (*first < 0.0) {
      for (auto& w : u.wave) w = -w;
      if (u.trig == Trig::sin) u.coeff = -u.coeff;
    }
    acc[{u.powers, u.wave, static_cast<int>(u.trig)}] += u.coeff;
  }
  ScalarField out(dim_);
  for (const auto& [key, c] : acc) {
    if (c == 0.0) continue;
    out.add_term(Term{c, std::get<0>(key), std::get<1>(key), static_cast<Trig>(std::get<2>(key))});
  }
  return out;
}

}  // namespace sdlab
